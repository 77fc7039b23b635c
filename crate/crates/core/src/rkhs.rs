//! Orthonormal monomial bases of the Bergman space of the model domains, the
//! truncated reproducing kernel they span, closed-form kernels, and exact
//! kernel jets up to order (1,1) on the diagonal.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::domain::{factorial, Domain, Point};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// One orthonormal basis function `normalization * z^exponents`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisTerm {
    pub exponents: Vec<i32>,
    pub normalization: f64,
}

impl BasisTerm {
    fn value(&self, z: &[Complex64]) -> Complex64 {
        self.exponents
            .iter()
            .zip(z)
            .fold(Complex64::new(self.normalization, 0.0), |acc, (&e, &zi)| acc * zi.powi(e))
    }

    /// `d/dz_i` of the term.
    fn derivative(&self, z: &[Complex64], i: usize) -> Complex64 {
        let e = self.exponents[i];
        if e == 0 {
            return ZERO;
        }
        let mut acc = Complex64::new(self.normalization * e as f64, 0.0);
        for (j, (&ej, &zj)) in self.exponents.iter().zip(z).enumerate() {
            let p = if j == i { ej - 1 } else { ej };
            if p != 0 {
                acc *= zj.powi(p);
            }
        }
        acc
    }
}

/// A finite orthonormal system spanning a truncation of the Bergman space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisSpec {
    pub domain: Domain,
    pub terms: Vec<BasisTerm>,
}

/// Graded ordering of multi-indices of total degree `deg` in `n` variables,
/// larger leading exponents first.
fn multi_indices_of_degree(n: usize, deg: i32) -> Vec<Vec<i32>> {
    if n == 1 {
        return vec![vec![deg]];
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in multi_indices_of_degree(n - 1, deg - first) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

fn ln_factorial(k: i32) -> f64 {
    (1..=k).map(|j| (j as f64).ln()).sum()
}

/// Squared L² norm of `z^k` on the annulus `r < |z| < 1`.
fn annulus_monomial_norm_sqr(k: i32, r: f64) -> f64 {
    if k == -1 {
        2.0 * PI * (1.0 / r).ln()
    } else {
        // pi (1 - r^{2k+2}) / (k+1), written with expm1 for accuracy
        let e = (2 * k + 2) as f64 * r.ln();
        -PI * e.exp_m1() / (k + 1) as f64
    }
}

impl BasisSpec {
    /// The first `m` orthonormal monomials of the domain.
    pub fn build(domain: &Domain, m: usize) -> Result<Self> {
        let n = domain.dim();
        if m < n + 1 {
            return Err(Error::BasisTooSmall { size: m, needed: n + 1 });
        }
        let terms: Vec<BasisTerm> = match domain {
            Domain::Disc | Domain::PuncturedDisc => (0..m as i32)
                .map(|k| BasisTerm {
                    exponents: vec![k],
                    normalization: ((k + 1) as f64 / PI).sqrt(),
                })
                .collect(),
            Domain::Annulus { inner_radius } => {
                let ks = std::iter::once(0).chain((1..).flat_map(|k| [k, -k]));
                ks.take(m)
                    .map(|k| BasisTerm {
                        exponents: vec![k],
                        normalization: 1.0 / annulus_monomial_norm_sqr(k, *inner_radius).sqrt(),
                    })
                    .collect()
            }
            Domain::Polydisc { dim } => graded(*dim, m)
                .map(|alpha| {
                    let norm = alpha.iter().map(|&a| ((a + 1) as f64 / PI).sqrt()).product();
                    BasisTerm { exponents: alpha, normalization: norm }
                })
                .collect(),
            Domain::Ball { dim } => graded(*dim, m)
                .map(|alpha| {
                    // int_{B_n} |z^a|^2 = pi^n a! / (n + |a|)!
                    let total: i32 = alpha.iter().sum();
                    let ln_norm = ln_factorial(*dim as i32 + total)
                        - *dim as f64 * PI.ln()
                        - alpha.iter().map(|&a| ln_factorial(a)).sum::<f64>();
                    BasisTerm { exponents: alpha, normalization: (0.5 * ln_norm).exp() }
                })
                .collect(),
            Domain::CustomSeries(series) => {
                if m > series.terms.len() {
                    return Err(Error::InvalidArgument(format!(
                        "custom series has {} terms, {m} requested",
                        series.terms.len()
                    )));
                }
                series.terms[..m]
                    .iter()
                    .map(|t| BasisTerm {
                        exponents: t.exponents.clone(),
                        normalization: t.normalization,
                    })
                    .collect()
            }
        };
        Ok(BasisSpec { domain: domain.clone(), terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Values of all basis functions at `z`.
    pub fn values(&self, z: &Point) -> Result<Vec<Complex64>> {
        self.domain.require_interior(z)?;
        Ok(self.terms.iter().map(|t| t.value(&z.0)).collect())
    }

    /// The `(n+1) x m` matrix whose row 0 holds `phi_k(z)` and row `i` holds
    /// `d phi_k / d z_i (z)`.
    pub fn jet_rows(&self, z: &Point) -> Result<DMatrix<Complex64>> {
        self.domain.require_interior(z)?;
        let n = self.dim();
        Ok(DMatrix::from_fn(n + 1, self.len(), |r, k| {
            let term = &self.terms[k];
            if r == 0 {
                term.value(&z.0)
            } else {
                term.derivative(&z.0, r - 1)
            }
        }))
    }

    /// CSV dump: term index, exponents, normalization.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,exponents,normalization\n");
        for (i, t) in self.terms.iter().enumerate() {
            let exps: Vec<String> = t.exponents.iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("{i},{},{:.17e}\n", exps.join(" "), t.normalization));
        }
        out
    }
}

fn graded(n: usize, m: usize) -> impl Iterator<Item = Vec<i32>> {
    (0..).flat_map(move |d| multi_indices_of_degree(n, d)).take(m)
}

/// The kernel `K(z, zeta-bar)` and its first mixed derivatives on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelJet {
    /// `K(z, z)`.
    pub value: f64,
    /// `d K / d z_i`.
    pub holo_grad: Vec<Complex64>,
    /// `d K / d zeta-bar_j` at `zeta = z`.
    pub antiholo_grad: Vec<Complex64>,
    /// `d^2 K / d z_i d zeta-bar_j`.
    pub mixed: DMatrix<Complex64>,
}

impl KernelJet {
    pub fn dim(&self) -> usize {
        self.holo_grad.len()
    }

    /// The Hermitian `(n+1) x (n+1)` matrix `[[K, K_jbar], [K_i, K_ijbar]]`.
    pub fn bordered(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        DMatrix::from_fn(n + 1, n + 1, |r, c| match (r, c) {
            (0, 0) => Complex64::new(self.value, 0.0),
            (0, j) => self.antiholo_grad[j - 1],
            (i, 0) => self.holo_grad[i - 1],
            (i, j) => self.mixed[(i - 1, j - 1)],
        })
    }

    fn from_bordered(b: &DMatrix<Complex64>) -> Self {
        let n = b.nrows() - 1;
        KernelJet {
            value: b[(0, 0)].re,
            holo_grad: (1..=n).map(|i| b[(i, 0)]).collect(),
            antiholo_grad: (1..=n).map(|j| b[(0, j)]).collect(),
            mixed: b.view((1, 1), (n, n)).into_owned(),
        }
    }
}

/// Where kernel values come from: a truncated orthonormal series or the exact
/// kernel of the domain.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSource {
    Series(BasisSpec),
    ClosedForm(Domain),
}

/// Profile of a kernel of the form `F(t)` with `t` a sesquilinear pairing,
/// together with its first two derivatives.
#[derive(Debug, Clone, Copy)]
struct Profile {
    f: Complex64,
    f1: Complex64,
    f2: Complex64,
}

fn disc_profile(t: Complex64) -> Profile {
    let u = Complex64::new(1.0, 0.0) - t;
    let u2 = u * u;
    Profile {
        f: 1.0 / (PI * u2),
        f1: 2.0 / (PI * u2 * u),
        f2: 6.0 / (PI * u2 * u2),
    }
}

fn ball_profile(n: usize, t: Complex64) -> Profile {
    let c = factorial(n) / PI.powi(n as i32);
    let u = Complex64::new(1.0, 0.0) - t;
    let p = (n + 1) as i32;
    Profile {
        f: c / u.powi(p),
        f1: c * (p as f64) / u.powi(p + 1),
        f2: c * (p as f64) * ((p + 1) as f64) / u.powi(p + 2),
    }
}

/// Annulus kernel as a sum over the reflections `q_j = r^{2j}`:
/// `F(t) = (1/pi) [sum_{j>=0} q_j/(1 - t q_j)^2 + sum_{j>=1} q_j/(t - q_j)^2] + 1/(2 pi t ln(1/r))`.
fn annulus_profile(r: f64, t: Complex64) -> Profile {
    let one = Complex64::new(1.0, 0.0);
    let log_inv = (1.0 / r).ln();
    let mut f = one / (2.0 * PI * log_inv * t);
    let mut f1 = -one / (2.0 * PI * log_inv * t * t);
    let mut f2 = one / (PI * log_inv * t * t * t);
    let r2 = r * r;
    let mut q = 1.0;
    let mut j = 0;
    loop {
        let a = one - t * q;
        let a2 = a * a;
        let pos_f = q / a2;
        let pos_f1 = 2.0 * q * q / (a2 * a);
        let pos_f2 = 6.0 * q * q * q / (a2 * a2);
        f += pos_f / PI;
        f1 += pos_f1 / PI;
        f2 += pos_f2 / PI;
        let mut contribution = pos_f.norm();
        if j >= 1 {
            let b = t - q;
            let b2 = b * b;
            let neg_f = q / b2;
            f += neg_f / PI;
            f1 += -2.0 * q / (b2 * b) / PI;
            f2 += 6.0 * q / (b2 * b2) / PI;
            contribution = contribution.max(neg_f.norm());
        }
        j += 1;
        q *= r2;
        if (contribution < 1e-18 * f.norm() && j > 2) || j > 10_000 {
            break;
        }
    }
    Profile { f, f1, f2 }
}

fn require_closed_form(domain: &Domain) -> Result<()> {
    match domain {
        Domain::CustomSeries(_) => Err(Error::ClosedFormUnavailable),
        _ => Ok(()),
    }
}

/// Jet of a kernel `F(<z, zeta>)` in `n` variables.
fn pairing_jet(z: &Point, p: Profile) -> KernelJet {
    let n = z.dim();
    let holo_grad: Vec<Complex64> = z.0.iter().map(|c| p.f1 * c.conj()).collect();
    let antiholo_grad: Vec<Complex64> = z.0.iter().map(|c| p.f1 * c).collect();
    let mixed = DMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { p.f1 } else { ZERO };
        delta + p.f2 * z.0[i].conj() * z.0[j]
    });
    KernelJet { value: p.f.re, holo_grad, antiholo_grad, mixed }
}

impl KernelSource {
    pub fn domain(&self) -> &Domain {
        match self {
            KernelSource::Series(b) => &b.domain,
            KernelSource::ClosedForm(d) => d,
        }
    }

    pub fn dim(&self) -> usize {
        self.domain().dim()
    }

    /// Closed form if the domain has one, else the series with `m` terms.
    pub fn preferred(domain: &Domain, m: usize) -> Result<Self> {
        match domain {
            Domain::CustomSeries(_) => Ok(KernelSource::Series(BasisSpec::build(domain, m)?)),
            d => Ok(KernelSource::ClosedForm(d.clone())),
        }
    }

    /// `K(z, w-bar)`.
    pub fn kernel_eval(&self, z: &Point, w: &Point) -> Result<Complex64> {
        let domain = self.domain();
        domain.require_interior(z)?;
        domain.require_interior(w)?;
        match self {
            KernelSource::Series(basis) => Ok(basis
                .terms
                .iter()
                .map(|t| t.value(&z.0) * t.value(&w.0).conj())
                .sum()),
            KernelSource::ClosedForm(d) => {
                require_closed_form(d)?;
                let pair = |a: Complex64, b: Complex64| a * b.conj();
                Ok(match d {
                    Domain::Disc | Domain::PuncturedDisc => {
                        disc_profile(pair(z.0[0], w.0[0])).f
                    }
                    Domain::Annulus { inner_radius } => {
                        annulus_profile(*inner_radius, pair(z.0[0], w.0[0])).f
                    }
                    Domain::Polydisc { .. } => z
                        .0
                        .iter()
                        .zip(&w.0)
                        .map(|(&a, &b)| disc_profile(pair(a, b)).f)
                        .product(),
                    Domain::Ball { dim } => {
                        let t: Complex64 = z.0.iter().zip(&w.0).map(|(&a, &b)| pair(a, b)).sum();
                        ball_profile(*dim, t).f
                    }
                    Domain::CustomSeries(_) => unreachable!(),
                })
            }
        }
    }

    /// Exact jet of the kernel on the diagonal at `z`.
    pub fn kernel_jet(&self, z: &Point) -> Result<KernelJet> {
        let domain = self.domain();
        domain.require_interior(z)?;
        let jet = match self {
            KernelSource::Series(basis) => {
                let v = basis.jet_rows(z)?;
                KernelJet::from_bordered(&(&v * v.adjoint()))
            }
            KernelSource::ClosedForm(d) => {
                require_closed_form(d)?;
                let r2 = |c: &Complex64| Complex64::new(c.norm_sqr(), 0.0);
                match d {
                    Domain::Disc | Domain::PuncturedDisc => {
                        pairing_jet(z, disc_profile(r2(&z.0[0])))
                    }
                    Domain::Annulus { inner_radius } => {
                        pairing_jet(z, annulus_profile(*inner_radius, r2(&z.0[0])))
                    }
                    Domain::Ball { dim } => {
                        pairing_jet(z, ball_profile(*dim, Complex64::new(z.norm_sqr(), 0.0)))
                    }
                    Domain::Polydisc { dim } => {
                        let n = *dim;
                        let factors: Vec<KernelJet> = z
                            .0
                            .iter()
                            .map(|c| pairing_jet(&Point::scalar(*c), disc_profile(r2(c))))
                            .collect();
                        let value: f64 = factors.iter().map(|j| j.value).product();
                        let logd: Vec<Complex64> =
                            factors.iter().map(|j| j.holo_grad[0] / j.value).collect();
                        let logdbar: Vec<Complex64> =
                            factors.iter().map(|j| j.antiholo_grad[0] / j.value).collect();
                        let mixed = DMatrix::from_fn(n, n, |i, j| {
                            if i == j {
                                factors[i].mixed[(0, 0)] / factors[i].value * value
                            } else {
                                logd[i] * logdbar[j] * value
                            }
                        });
                        KernelJet {
                            value,
                            holo_grad: logd.iter().map(|g| g * value).collect(),
                            antiholo_grad: logdbar.iter().map(|g| g * value).collect(),
                            mixed,
                        }
                    }
                    Domain::CustomSeries(_) => unreachable!(),
                }
            }
        };
        if !(jet.value > 0.0 && jet.value.is_finite()) {
            return Err(Error::DegenerateKernel(format!("K(z,z) = {}", jet.value)));
        }
        Ok(jet)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disc_basis_normalizations() {
        let b = BasisSpec::build(&Domain::Disc, 2).unwrap();
        assert_eq!(b.terms[0].exponents, vec![0]);
        assert_relative_eq!(b.terms[0].normalization, (1.0 / PI).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(b.terms[1].normalization, (2.0 / PI).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn annulus_reciprocal_log_term() {
        let r = 0.3;
        let b = BasisSpec::build(&Domain::annulus(r).unwrap(), 3).unwrap();
        let exps: Vec<i32> = b.terms.iter().map(|t| t.exponents[0]).collect();
        assert_eq!(exps, vec![0, 1, -1]);
        let want = 1.0 / (2.0 * PI * (1.0 / r).ln()).sqrt();
        assert_relative_eq!(b.terms[2].normalization, want, max_relative = 1e-14);
    }

    #[test]
    fn punctured_disc_shares_disc_basis() {
        let a = BasisSpec::build(&Domain::Disc, 3).unwrap();
        let b = BasisSpec::build(&Domain::PuncturedDisc, 3).unwrap();
        assert_eq!(a.terms, b.terms);
    }

    #[test]
    fn graded_ordering() {
        let b = BasisSpec::build(&Domain::ball(2).unwrap(), 6).unwrap();
        let exps: Vec<Vec<i32>> = b.terms.iter().map(|t| t.exponents.clone()).collect();
        assert_eq!(
            exps,
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
        );
    }

    #[test]
    fn basis_too_small() {
        assert_eq!(
            BasisSpec::build(&Domain::ball(2).unwrap(), 2),
            Err(Error::BasisTooSmall { size: 2, needed: 3 })
        );
    }

    /// Gram matrix of a one-variable basis by polar quadrature on `rin < |z| < 1`.
    fn polar_gram(basis: &BasisSpec, rin: f64) -> DMatrix<Complex64> {
        let radial = GaussLegendre::new(60);
        let angles = 256;
        let m = basis.len();
        let mut g = DMatrix::from_element(m, m, ZERO);
        for (x, w) in radial.nodes.iter().zip(&radial.weights) {
            let rho = rin + (1.0 - rin) * 0.5 * (x + 1.0);
            let wr = w * 0.5 * (1.0 - rin) * rho;
            for a in 0..angles {
                let theta = 2.0 * PI * a as f64 / angles as f64;
                let z = Complex64::from_polar(rho, theta);
                let vals: Vec<Complex64> = basis.terms.iter().map(|t| t.value(&[z])).collect();
                for i in 0..m {
                    for j in 0..m {
                        g[(i, j)] += vals[i] * vals[j].conj() * wr * (2.0 * PI / angles as f64);
                    }
                }
            }
        }
        g
    }

    #[test]
    fn disc_basis_is_orthonormal_by_quadrature() {
        let basis = BasisSpec::build(&Domain::Disc, 12).unwrap();
        let g = polar_gram(&basis, 0.0);
        let eye = DMatrix::<Complex64>::identity(12, 12);
        assert!((g - eye).camax() < 1e-12);
    }

    #[test]
    fn annulus_basis_is_orthonormal_by_quadrature() {
        let basis = BasisSpec::build(&Domain::annulus(0.5).unwrap(), 11).unwrap();
        let g = polar_gram(&basis, 0.5);
        let eye = DMatrix::<Complex64>::identity(11, 11);
        assert!((g - eye).camax() < 1e-12);
    }

    #[test]
    fn ball_basis_is_orthonormal_by_quadrature() {
        // z = (r1 e^{ia}, r2 e^{ib}) with r2 in [0, sqrt(1 - r1^2)]
        let basis = BasisSpec::build(&Domain::ball(2).unwrap(), 10).unwrap();
        let m = basis.len();
        let rule = GaussLegendre::new(24);
        let angles = 16;
        let mut g = DMatrix::from_element(m, m, ZERO);
        for (x1, w1) in rule.nodes.iter().zip(&rule.weights) {
            let r1 = 0.5 * (x1 + 1.0);
            let top = (1.0 - r1 * r1).sqrt();
            for (x2, w2) in rule.nodes.iter().zip(&rule.weights) {
                let r2 = 0.5 * top * (x2 + 1.0);
                let w = w1 * 0.5 * w2 * 0.5 * top * r1 * r2;
                for a in 0..angles {
                    for b in 0..angles {
                        let ta = 2.0 * PI * a as f64 / angles as f64;
                        let tb = 2.0 * PI * b as f64 / angles as f64;
                        let z = [Complex64::from_polar(r1, ta), Complex64::from_polar(r2, tb)];
                        let vals: Vec<Complex64> =
                            basis.terms.iter().map(|t| t.value(&z)).collect();
                        let dw = w * (2.0 * PI / angles as f64).powi(2);
                        for i in 0..m {
                            for j in 0..m {
                                g[(i, j)] += vals[i] * vals[j].conj() * dw;
                            }
                        }
                    }
                }
            }
        }
        let eye = DMatrix::<Complex64>::identity(m, m);
        let dev = (g - eye).camax();
        assert!(dev < 1e-12, "{dev}");
    }

    #[test]
    fn reproducing_property_on_the_span() {
        // for f = phi_k, sum_j <f, phi_j> phi_j(z) = f(z); with the quadrature Gram
        let basis = BasisSpec::build(&Domain::annulus(0.5).unwrap(), 9).unwrap();
        let g = polar_gram(&basis, 0.5);
        let z = Point::scalar(c(0.3, -0.55));
        let vals = basis.values(&z).unwrap();
        for k in 0..basis.len() {
            let recon: Complex64 = (0..basis.len()).map(|j| vals[j].conj() * g[(k, j)]).sum();
            assert!((recon - vals[k].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn disc_closed_form_values() {
        let src = KernelSource::ClosedForm(Domain::Disc);
        let k0 = src.kernel_eval(&Point::real(0.0), &Point::real(0.0)).unwrap();
        assert_relative_eq!(k0.re, 1.0 / PI, max_relative = 1e-15);
        let k = src.kernel_eval(&Point::real(0.5), &Point::real(0.5)).unwrap();
        assert_relative_eq!(k.re, 16.0 / (9.0 * PI), max_relative = 1e-15);
    }

    #[test]
    fn disc_series_converges_to_closed_form() {
        let series = KernelSource::Series(BasisSpec::build(&Domain::Disc, 50).unwrap());
        let exact = KernelSource::ClosedForm(Domain::Disc);
        let z = Point::real(0.5);
        let a = series.kernel_eval(&z, &z).unwrap();
        let b = exact.kernel_eval(&z, &z).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn annulus_image_sum_matches_long_laurent_series() {
        let d = Domain::annulus(0.5).unwrap();
        let series = KernelSource::Series(BasisSpec::build(&d, 401).unwrap());
        let exact = KernelSource::ClosedForm(d);
        let z = Point::scalar(c(0.7, 0.1));
        let w = Point::scalar(c(-0.2, 0.6));
        let a = series.kernel_eval(&z, &w).unwrap();
        let b = exact.kernel_eval(&z, &w).unwrap();
        assert!((a - b).norm() < 1e-11 * b.norm(), "{a} vs {b}");
        let ja = series.kernel_jet(&z).unwrap();
        let jb = exact.kernel_jet(&z).unwrap();
        assert_relative_eq!(ja.value, jb.value, max_relative = 1e-12);
        assert!((ja.holo_grad[0] - jb.holo_grad[0]).norm() < 1e-11 * jb.holo_grad[0].norm());
        assert!((ja.mixed[(0, 0)] - jb.mixed[(0, 0)]).norm() < 1e-11 * jb.mixed[(0, 0)].norm());
    }

    #[test]
    fn jets_at_the_origin() {
        let disc = KernelSource::ClosedForm(Domain::Disc).kernel_jet(&Point::real(0.0)).unwrap();
        assert_relative_eq!(disc.value, 1.0 / PI, max_relative = 1e-15);
        assert_eq!(disc.holo_grad[0], ZERO);
        assert_eq!(disc.antiholo_grad[0], ZERO);
        assert_relative_eq!(disc.mixed[(0, 0)].re, 2.0 / PI, max_relative = 1e-15);

        let ball = KernelSource::ClosedForm(Domain::ball(2).unwrap())
            .kernel_jet(&Point::origin(2))
            .unwrap();
        let pi2 = PI * PI;
        assert_relative_eq!(ball.value, 2.0 / pi2, max_relative = 1e-15);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 6.0 / pi2 } else { 0.0 };
                assert!((ball.mixed[(i, j)] - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn series_and_closed_form_jets_agree() {
        let z = Point(vec![c(0.2, 0.1), c(-0.1, 0.25)]);
        for (d, m) in [(Domain::ball(2).unwrap(), 300), (Domain::polydisc(2).unwrap(), 300)] {
            let a = KernelSource::Series(BasisSpec::build(&d, m).unwrap()).kernel_jet(&z).unwrap();
            let b = KernelSource::ClosedForm(d.clone()).kernel_jet(&z).unwrap();
            assert_relative_eq!(a.value, b.value, max_relative = 1e-10);
            assert!((a.bordered() - b.bordered()).camax() < 1e-9 * b.bordered().camax(), "{d}");
        }
    }

    #[test]
    fn antiholomorphic_gradient_is_conjugate() {
        let z = Point::scalar(c(0.3, 0.4));
        let src = KernelSource::Series(BasisSpec::build(&Domain::Disc, 30).unwrap());
        let jet = src.kernel_jet(&z).unwrap();
        assert!((jet.antiholo_grad[0] - jet.holo_grad[0].conj()).norm() < 1e-15);
    }

    #[test]
    fn truncated_kernel_grows_with_m() {
        let z = Point::scalar(c(0.6, -0.3));
        let mut last = 0.0;
        for m in 2..40 {
            let src = KernelSource::Series(BasisSpec::build(&Domain::Disc, m).unwrap());
            let k = src.kernel_eval(&z, &z).unwrap();
            assert!(k.im.abs() < 1e-15 && k.re > 0.0);
            assert!(k.re >= last);
            last = k.re;
        }
    }

    #[test]
    fn closed_form_unavailable_for_custom_series() {
        let d = Domain::custom_from_json(
            r#"{"support": "disc", "terms": [{"exponents": [0], "normalization": 0.5},
                                             {"exponents": [1], "normalization": 0.8}]}"#,
        )
        .unwrap();
        let src = KernelSource::ClosedForm(d.clone());
        assert_eq!(
            src.kernel_jet(&Point::real(0.1)).unwrap_err(),
            Error::ClosedFormUnavailable
        );
        assert!(matches!(KernelSource::preferred(&d, 2).unwrap(), KernelSource::Series(_)));
    }

    #[test]
    fn outside_points_are_rejected() {
        let src = KernelSource::ClosedForm(Domain::Disc);
        assert_eq!(
            src.kernel_jet(&Point::real(1.2)).unwrap_err(),
            Error::OutsideDomain
        );
    }
}
