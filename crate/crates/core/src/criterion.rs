//! Quantities of the completeness criterion for `(n+1) T - Ric`: the jet
//! determinant of a function tuple, the norm identity of the bordered kernel
//! jet, the ratio against the Gramian, its supremum over tuples, the
//! Fubini–Study pullback and the one-function Kobayashi ratio.
//!
//! Function tuples live in the span of a [`BasisSpec`]; the basis is
//! orthonormal, so inner products are coefficient inner products.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::linalg::{determinant, HermitianMatrix};
use crate::metrics::{bergman_tensor, complex_hessian, effective_step, tilde_tensor};
use crate::rkhs::{BasisSpec, KernelSource};
use crate::wedge::gram_determinant;

/// Gram determinants at or below this count as a dependent tuple.
pub const DEPENDENCE_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `f = sum_k c_k phi_k` in the span of a basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FunctionVector {
    pub coefficients: Vec<Complex64>,
}

impl FunctionVector {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(FunctionVector { coefficients })
    }

    /// The basis function `phi_k` of a basis of size `m`.
    pub fn basis_element(k: usize, m: usize) -> Self {
        let mut coefficients = vec![ZERO; m];
        coefficients[k] = Complex64::new(1.0, 0.0);
        FunctionVector { coefficients }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    fn check_len(&self, basis: &BasisSpec) -> Result<()> {
        if self.coefficients.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), found: self.coefficients.len() });
        }
        Ok(())
    }

    /// `f(z)`.
    pub fn value(&self, basis: &BasisSpec, z: &Point) -> Result<Complex64> {
        self.check_len(basis)?;
        Ok(basis.values(z)?.iter().zip(&self.coefficients).map(|(p, c)| p * c).sum())
    }
}

/// The first `n+1` basis functions as a tuple.
pub fn leading_tuple(basis: &BasisSpec) -> Vec<FunctionVector> {
    (0..=basis.dim()).map(|k| FunctionVector::basis_element(k, basis.len())).collect()
}

/// `m x s` matrix whose columns are the coefficient vectors.
fn coefficient_matrix(basis: &BasisSpec, fs: &[FunctionVector]) -> Result<DMatrix<Complex64>> {
    for f in fs {
        f.check_len(basis)?;
    }
    Ok(DMatrix::from_fn(basis.len(), fs.len(), |k, j| fs[j].coefficients[k]))
}

fn check_tuple_size(basis: &BasisSpec, fs: &[FunctionVector]) -> Result<()> {
    let n = basis.dim();
    if fs.len() != n + 1 {
        return Err(Error::DimensionMismatch { expected: n + 1, found: fs.len() });
    }
    Ok(())
}

/// The `(n+1) x (n+1)` matrix with row 0 the values `f_j(z)` and row `i` the
/// partials `d f_j / d z_i (z)`.
pub fn jet_matrix(basis: &BasisSpec, fs: &[FunctionVector], z: &Point) -> Result<DMatrix<Complex64>> {
    check_tuple_size(basis, fs)?;
    let c = coefficient_matrix(basis, fs)?;
    Ok(basis.jet_rows(z)? * c)
}

/// Gramian `det(<f_i, f_j>)` of a tuple.
pub fn tuple_gram(fs: &[FunctionVector]) -> Result<f64> {
    let vectors: Vec<Vec<Complex64>> = fs.iter().map(|f| f.coefficients.clone()).collect();
    gram_determinant(&vectors)
}

/// Determinant of [`jet_matrix`] for an independent tuple.
pub fn jet_matrix_det(basis: &BasisSpec, fs: &[FunctionVector], z: &Point) -> Result<Complex64> {
    check_tuple_size(basis, fs)?;
    let gram = tuple_gram(fs)?;
    if gram <= DEPENDENCE_TOL {
        return Err(Error::DependentTuple { gram });
    }
    Ok(determinant(&jet_matrix(basis, fs, z)?))
}

/// `K^{n+1} det T` at `z`.
pub fn criterion_denominator(source: &KernelSource, z: &Point) -> Result<f64> {
    let jet = source.kernel_jet(z)?;
    let t = bergman_tensor(source, z)?;
    Ok(jet.value.powi(source.dim() as i32 + 1) * t.determinant())
}

/// Relative difference between `det` of the bordered jet and `K^{n+1} det T`.
pub fn norm_identity_residual(source: &KernelSource, z: &Point) -> Result<f64> {
    let jet = source.kernel_jet(z)?;
    let bordered = determinant(&jet.bordered()).re;
    let t = bergman_tensor(source, z)?;
    let product = jet.value.powi(source.dim() as i32 + 1) * t.determinant();
    if !(product > 0.0 && product.is_finite()) {
        return Err(Error::DegenerateKernel(format!("K^(n+1) det T = {product}")));
    }
    Ok((bordered - product).abs() / product)
}

/// Criterion quantities for one tuple at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionReport {
    /// `|det jet_matrix|^2`.
    pub numerator: f64,
    /// Gramian of the tuple.
    pub gram: f64,
    /// `K^{n+1} det T`.
    pub denominator: f64,
    /// `numerator / denominator`.
    pub ratio: f64,
    /// `numerator / gram`.
    pub normalized: f64,
}

/// Evaluates the criterion ratio for `fs` (given in `basis`) against the
/// kernel of `source`.
pub fn tilde_ratio(
    source: &KernelSource,
    basis: &BasisSpec,
    fs: &[FunctionVector],
    z: &Point,
) -> Result<CriterionReport> {
    if source.domain() != &basis.domain {
        return Err(Error::InvalidArgument("basis and kernel source use different domains".into()));
    }
    let numerator = jet_matrix_det(basis, fs, z)?.norm_sqr();
    let gram = tuple_gram(fs)?;
    let denominator = criterion_denominator(source, z)?;
    if !(denominator > 0.0 && denominator.is_finite()) {
        return Err(Error::DegenerateKernel(format!("denominator {denominator}")));
    }
    Ok(CriterionReport {
        numerator,
        gram,
        denominator,
        ratio: numerator / denominator,
        normalized: numerator / gram,
    })
}

/// Coefficients of `K_m(., z)` and `d/d zeta-bar_i K_m(., zeta)` at `zeta = z`:
/// the tuple at which `numerator / gram` attains `K^{n+1} det T`.
pub fn dual_tuple(basis: &BasisSpec, z: &Point) -> Result<Vec<FunctionVector>> {
    let v = basis.jet_rows(z)?;
    Ok((0..v.nrows())
        .map(|r| FunctionVector { coefficients: v.row(r).iter().map(|c| c.conj()).collect() })
        .collect())
}

/// Outcome of [`fraction_sup_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionProbe {
    /// Largest `numerator / gram` found.
    pub best: f64,
    /// `K_m^{n+1} det T_m` of the truncated kernel.
    pub target: f64,
    /// Value at the dual tuple.
    pub dual: f64,
    /// Final value of every random restart, by restart index.
    pub restarts: Vec<f64>,
}

/// `log(|det(V C)|^2 / det(C* C))`.
fn log_objective(v: &DMatrix<Complex64>, c: &DMatrix<Complex64>) -> f64 {
    let num = determinant(&(v * c)).norm_sqr();
    let gram = determinant(&(c.adjoint() * c)).re;
    num.ln() - gram.ln()
}

/// Orthonormalizes the columns of `c` (the objective is invariant under
/// `C -> C A` for invertible `A`).
fn orthonormalize(c: DMatrix<Complex64>) -> DMatrix<Complex64> {
    c.qr().q()
}

/// Ascent on the Grassmannian of `(n+1)`-frames, starting from `c0`.
fn ascend(v: &DMatrix<Complex64>, c0: DMatrix<Complex64>, iters: usize) -> Result<f64> {
    let mut c = orthonormalize(c0);
    let mut value = log_objective(v, &c);
    let mut step: f64 = 1.0;
    for _ in 0..iters {
        let vc = v * &c;
        let Some(inv) = vc.clone().try_inverse() else {
            return Err(Error::OptimizerDiverged("singular jet matrix at an iterate".into()));
        };
        // d/dC-bar of log|det VC|^2 - log det C*C at orthonormal C
        let grad = v.adjoint() * inv.adjoint() - &c;
        let gnorm = grad.norm();
        if !gnorm.is_finite() {
            return Err(Error::OptimizerDiverged(format!("gradient norm {gnorm}")));
        }
        if gnorm < 1e-13 {
            break;
        }
        let mut accepted = false;
        let mut trial_step = (step * 2.0).min(1e3);
        while trial_step > 1e-14 {
            let trial = orthonormalize(&c + &grad * Complex64::new(trial_step, 0.0));
            let tv = log_objective(v, &trial);
            if tv.is_finite() && tv > value {
                c = trial;
                step = trial_step;
                let gain = tv - value;
                value = tv;
                accepted = gain > 1e-15 * value.abs().max(1.0);
                break;
            }
            trial_step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if !value.is_finite() {
        return Err(Error::OptimizerDiverged(format!("objective {value}")));
    }
    Ok(value)
}

/// Maximizes `|det jet_matrix|^2 / gram` over tuples in the span of `basis`
/// by seeded multi-start ascent plus the dual-tuple warm start.
pub fn fraction_sup_probe(basis: &BasisSpec, z: &Point, restarts: usize, seed: u64) -> Result<FractionProbe> {
    const ITERS: usize = 400;
    let v = basis.jet_rows(z)?;
    let (s, m) = (v.nrows(), v.ncols());
    let target_log = determinant(&(&v * v.adjoint())).re.ln();
    if !target_log.is_finite() {
        return Err(Error::DegenerateKernel("truncated bordered jet is singular".into()));
    }
    let dual_log = ascend(&v, v.adjoint(), ITERS)?;
    let random_logs: Vec<f64> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let c0 = DMatrix::from_fn(m, s, |_, _| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            ascend(&v, c0, ITERS)
        })
        .collect::<Result<_>>()?;
    // deterministic best-of, ties resolved toward the dual start then lower index
    let best_log = random_logs.iter().fold(dual_log, |acc, &x| if x > acc { x } else { acc });
    Ok(FractionProbe {
        best: best_log.exp(),
        target: target_log.exp(),
        dual: dual_log.exp(),
        restarts: random_logs.iter().map(|x| x.exp()).collect(),
    })
}

/// Max-norm difference between the finite-difference complex Hessian of
/// `log det(bordered jet)` and the tilde tensor at `z`.
pub fn fubini_pullback_residual(source: &KernelSource, z: &Point, h: f64) -> Result<f64> {
    let step = effective_step(source, z, h)?;
    let log_wedge_norm = |p: &Point| -> Result<f64> {
        let det = determinant(&source.kernel_jet(p)?.bordered()).re;
        if det > 0.0 && det.is_finite() {
            Ok(det.ln())
        } else {
            Err(Error::DegenerateKernel(format!("bordered jet determinant {det}")))
        }
    };
    let pullback = HermitianMatrix::symmetrized(complex_hessian(source, z, step, log_wedge_norm)?);
    let tilde = tilde_tensor(source, z, h)?;
    Ok(pullback.max_abs_diff(&tilde))
}

/// `|f(z)|^2 / K(z, z)`.
pub fn kobayashi_ratio(source: &KernelSource, basis: &BasisSpec, f: &FunctionVector, z: &Point) -> Result<f64> {
    if f.norm_sqr() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let k = source.kernel_eval(z, z)?.re;
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::DegenerateKernel(format!("K(z,z) = {k}")));
    }
    Ok(f.value(basis, z)?.norm_sqr() / k)
}

/// One row of a criterion sweep toward a boundary point.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionRow {
    pub k: usize,
    pub boundary_distance: f64,
    pub report: CriterionReport,
}

/// [`tilde_ratio`] along the approach sequence toward `target`.
pub fn criterion_sweep(
    source: &KernelSource,
    basis: &BasisSpec,
    fs: &[FunctionVector],
    target: &Point,
    kmax: usize,
) -> Result<Vec<CriterionRow>> {
    let domain = source.domain();
    domain
        .approach_sequence(target, kmax)?
        .iter()
        .enumerate()
        .map(|(i, z)| {
            Ok(CriterionRow {
                k: i + 1,
                boundary_distance: domain.boundary_distance(z)?,
                report: tilde_ratio(source, basis, fs, z)?,
            })
        })
        .collect()
}
