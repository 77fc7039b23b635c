//! The acceptance suite: eight checks with residuals, shared by the test
//! target and the command-line `report` command.

use std::f64::consts::{LN_10, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::criterion::{
    fraction_sup_probe, leading_tuple, norm_identity_residual, tilde_ratio, FunctionVector,
};
use crate::domain::{Domain, Point};
use crate::error::Result;
use crate::geodesy::{
    completeness_probe, distance_upper, radial_distance, slope_fit, DistanceConfig, LengthConfig,
    ProbeConfig, ProbeMethod,
};
use crate::green::{hyperconvexity_bound, sublevel_volume, BoundConfig, GreenSpec, SamplingBox};
use crate::metrics::{metric_tensors, tilde_tensor, MetricKind, DEFAULT_FD_STEP};
use crate::rkhs::{BasisSpec, KernelSource};
use crate::wedge::{inner, pairing_matrix, plucker_residual, wedge_of, WedgeVector};

/// Outcome of one acceptance check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    /// The quantity compared against the tolerance (worst case over the check).
    pub residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {} {}: residual {:.3e} (tolerance {:.1e}); {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.residual,
            self.tolerance,
            self.detail
        )
    }
}

/// Names of the checks, indexed by `id - 1`.
pub const CHECK_NAMES: [&str; 8] = [
    "norm identity",
    "closed-form tensor oracles",
    "fraction supremum bracket",
    "criterion decay",
    "completeness probes",
    "Green sublevel mechanism",
    "wedge identities",
    "biholomorphic invariance",
];

/// `count` seeded points of `domain` with boundary distance above `margin`.
pub fn random_interior_points(domain: &Domain, count: usize, seed: u64, margin: f64) -> Result<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = domain.dim();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = Point((0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect());
        if domain.contains(&p)? && domain.boundary_distance(&p)? > margin {
            out.push(p);
        }
    }
    Ok(out)
}

/// Runs check `id` (1 through 8).
pub fn run_check(id: usize, seed: u64) -> Result<CheckOutcome> {
    match id {
        1 => norm_identity(seed),
        2 => tensor_oracles(),
        3 => fraction_bracket(seed),
        4 => criterion_decay(),
        5 => completeness_probes(seed),
        6 => green_mechanism(seed),
        7 => wedge_identities(seed),
        8 => biholomorphic_invariance(seed),
        _ => Err(crate::error::Error::InvalidArgument(format!("no acceptance check {id}"))),
    }
}

/// All eight checks in order. A check that errors is reported as failed.
pub fn run_report(seed: u64) -> Vec<CheckOutcome> {
    (1..=8)
        .map(|id| {
            run_check(id, seed).unwrap_or_else(|e| CheckOutcome {
                id,
                name: CHECK_NAMES[id - 1],
                passed: false,
                residual: f64::NAN,
                tolerance: f64::NAN,
                detail: format!("error: {e}"),
            })
        })
        .collect()
}

fn outcome(id: usize, residual: f64, tolerance: f64, extra_ok: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        id,
        name: CHECK_NAMES[id - 1],
        passed: extra_ok && residual <= tolerance,
        residual,
        tolerance,
        detail,
    }
}

fn series_sources() -> Result<Vec<(String, KernelSource)>> {
    let specs = [
        (Domain::Disc, 60),
        (Domain::ball(2)?, 30),
        (Domain::polydisc(2)?, 36),
        (Domain::annulus(0.5)?, 60),
    ];
    specs
        .into_iter()
        .map(|(d, m)| Ok((format!("{d} m={m}"), KernelSource::Series(BasisSpec::build(&d, m)?))))
        .collect()
}

fn norm_identity(seed: u64) -> Result<CheckOutcome> {
    const TOL: f64 = 1e-8;
    let mut sources = series_sources()?;
    for d in [Domain::Disc, Domain::ball(2)?, Domain::polydisc(2)?, Domain::annulus(0.5)?] {
        sources.push((format!("{d} exact"), KernelSource::ClosedForm(d)));
    }
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (label, src) in &sources {
        let points = random_interior_points(src.domain(), 100, seed, 1e-3)?;
        let r = points
            .par_iter()
            .map(|z| norm_identity_residual(src, z))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        worst = worst.max(r);
        parts.push(format!("{label}: {r:.1e}"));
    }
    Ok(outcome(1, worst, TOL, true, format!("max relative residual over 100 points; {}", parts.join(", "))))
}

fn tensor_oracles() -> Result<CheckOutcome> {
    const TOL: f64 = 1e-5;
    let rel = |got: &crate::linalg::HermitianMatrix, want: f64| {
        let n = got.order();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let w = if i == j { want } else { 0.0 };
                worst = worst.max((got.get(i, j) - Complex64::new(w, 0.0)).norm() / want.abs());
            }
        }
        worst
    };
    let disc = metric_tensors(&KernelSource::ClosedForm(Domain::Disc), &Point::real(0.0), DEFAULT_FD_STEP)?;
    let ball = metric_tensors(&KernelSource::ClosedForm(Domain::ball(2)?), &Point::origin(2), DEFAULT_FD_STEP)?;
    let residuals = [
        rel(&disc.bergman, 2.0),
        rel(&disc.ricci, -2.0),
        rel(&disc.tilde, 6.0),
        rel(&ball.bergman, 3.0),
        rel(&ball.ricci, -3.0),
        rel(&ball.tilde, 12.0),
    ];
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    Ok(outcome(
        2,
        worst,
        TOL,
        true,
        format!(
            "disc T={:.9} Ric={:.9} Ttilde={:.9}; ball(2) Ttilde diag={:.9}",
            disc.bergman.get(0, 0).re,
            disc.ricci.get(0, 0).re,
            disc.tilde.get(0, 0).re,
            ball.tilde.get(0, 0).re
        ),
    ))
}

fn fraction_bracket(seed: u64) -> Result<CheckOutcome> {
    let specs = [
        (Domain::Disc, 10),
        (Domain::ball(2)?, 15),
        (Domain::polydisc(2)?, 16),
        (Domain::annulus(0.5)?, 12),
    ];
    let mut over = 0.0f64;
    let mut under = 0.0f64;
    let mut random_over = 0.0f64;
    for (d, m) in specs {
        let basis = BasisSpec::build(&d, m)?;
        let src = KernelSource::Series(basis.clone());
        let points = random_interior_points(&d, 20, seed, 0.05)?;
        let results = points
            .par_iter()
            .enumerate()
            .map(|(i, z)| -> Result<(f64, f64, f64)> {
                let p = fraction_sup_probe(&basis, z, 8, seed.wrapping_add(i as u64))?;
                // random tuples: numerator / gram never exceeds the denominator
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64 + 1) << 20);
                let fs: Vec<FunctionVector> = (0..=d.dim())
                    .map(|_| {
                        FunctionVector::new(
                            (0..m).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect(),
                        )
                    })
                    .collect::<Result<_>>()?;
                let r = tilde_ratio(&src, &basis, &fs, z)?;
                Ok((p.best / p.target - 1.0, 1.0 - p.dual / p.target, r.normalized / r.denominator - 1.0))
            })
            .collect::<Result<Vec<_>>>()?;
        for (o, u, ro) in results {
            over = over.max(o);
            under = under.max(u);
            random_over = random_over.max(ro);
        }
    }
    let ok = under <= 1e-4 && random_over <= 1e-9;
    Ok(outcome(
        3,
        over,
        1e-9,
        ok,
        format!("max best/target-1 {over:.1e}; max 1-dual/target {under:.1e} (tol 1e-4); random tuples max normalized/denominator-1 {random_over:.1e}"),
    ))
}

fn criterion_decay() -> Result<CheckOutcome> {
    const TOL: f64 = 1e-6;
    let cases = [
        (Domain::Disc, Point::real(1.0), Point::real(0.5)),
        (Domain::ball(2)?, Point::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])?, Point::origin(2)),
        (Domain::annulus(0.5)?, Point::real(0.5), Point::real(0.75)),
    ];
    let mut worst = 0.0f64;
    let mut monotone = true;
    let mut parts = Vec::new();
    for (d, target, anchor) in cases {
        let basis = BasisSpec::build(&d, d.dim() + 1)?;
        let src = KernelSource::ClosedForm(d.clone());
        let fs = leading_tuple(&basis);
        let base = tilde_ratio(&src, &basis, &fs, &anchor)?.ratio;
        let ratios = d
            .approach_sequence(&target, 6)?
            .iter()
            .map(|z| tilde_ratio(&src, &basis, &fs, z).map(|r| r.ratio))
            .collect::<Result<Vec<_>>>()?;
        monotone &= ratios.windows(2).all(|w| w[1] < w[0]);
        let rel = ratios[5] / base;
        worst = worst.max(rel);
        parts.push(format!("{d}: ratio(k=6)/anchor {rel:.1e}"));
    }
    Ok(outcome(4, worst, TOL, monotone, format!("{}; decreasing in k: {monotone}", parts.join(", "))))
}

fn completeness_probes(seed: u64) -> Result<CheckOutcome> {
    let sqrt6 = 6f64.sqrt();
    let length = LengthConfig::default();

    // disc: optimized upper bounds from 0 against the closed form
    let disc = KernelSource::ClosedForm(Domain::Disc);
    let dcfg = DistanceConfig { segments: 16, iters: 25, seed, length };
    let targets = Domain::Disc.approach_sequence(&Point::real(1.0), 6)?;
    let disc_d = targets
        .par_iter()
        .map(|p| distance_upper(&disc, MetricKind::Tilde, &Point::real(0.0), p, &dcfg).map(|d| d.distance))
        .collect::<Result<Vec<_>>>()?;
    let disc_err = targets
        .iter()
        .zip(&disc_d)
        .map(|(p, d)| {
            let want = sqrt6 * p.0[0].re.atanh();
            (d - want).abs() / want
        })
        .fold(0.0, f64::max);
    let ks: Vec<f64> = (1..=6).map(f64::from).collect();
    let slope = slope_fit(&ks, &disc_d).unwrap_or(f64::NAN);
    let slope_want = sqrt6 / 2.0 * LN_10;
    let slope_err = (slope / slope_want - 1.0).abs();

    // punctured disc: bounded radial distances to the puncture
    let punct = KernelSource::ClosedForm(Domain::PuncturedDisc);
    let cap = sqrt6 * 0.5f64.atanh();
    let pres = completeness_probe(&punct, MetricKind::Tilde, &Point::real(0.0), 6, &ProbeConfig::default())?;
    let bounded = pres.rows.iter().all(|r| r.distance_estimate <= cap + 1e-3);
    let punct_oracle = pres
        .rows
        .iter()
        .map(|r| (r.distance_estimate - sqrt6 * (0.5f64.atanh() - r.point.0[0].re.atanh())).abs())
        .fold(0.0, f64::max);
    let last_gap = (pres.rows[5].distance_estimate - cap).abs();

    // annulus: strictly increasing toward the inner circle
    let ann = KernelSource::ClosedForm(Domain::annulus(0.5)?);
    let ares = completeness_probe(&ann, MetricKind::Tilde, &Point::real(0.5), 6, &ProbeConfig {
        method: ProbeMethod::Auto,
        ..ProbeConfig::default()
    })?;
    let increasing = ares.rows.windows(2).all(|w| w[1].distance_estimate > w[0].distance_estimate);
    let slopes_positive = ares.rows.iter().skip(1).all(|r| r.slope_fit.is_some_and(|s| s > 0.0));

    // cross-check: radial quadrature agrees with the optimized bounds on the disc
    let radial_gap = targets
        .iter()
        .zip(&disc_d)
        .map(|(p, d)| {
            radial_distance(&disc, MetricKind::Tilde, 0.0, p.0[0].re, Complex64::new(1.0, 0.0), &length)
                .map(|r| (d - r).abs() / r)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let ok = slope_err <= 0.05
        && bounded
        && punct_oracle <= 1e-6
        && last_gap <= 1e-3
        && increasing
        && slopes_positive
        && radial_gap <= 0.01;
    Ok(outcome(
        5,
        disc_err,
        0.01,
        ok,
        format!(
            "disc slope {slope:.4} vs {slope_want:.4} (rel {slope_err:.1e}, tol 5e-2), optimized vs radial {radial_gap:.1e}; \
             punctured max {:.6} <= {cap:.6}+1e-3: {bounded}, k=6 gap {last_gap:.1e}, oracle {punct_oracle:.1e}; \
             annulus increasing: {increasing}, slope {:.4}, running slopes positive: {slopes_positive}",
            pres.rows.iter().map(|r| r.distance_estimate).fold(0.0, f64::max),
            ares.slope.unwrap_or(f64::NAN),
        ),
    ))
}

fn green_mechanism(seed: u64) -> Result<CheckOutcome> {
    let g0 = GreenSpec::new(Domain::Disc, Point::real(0.0))?;
    let v = sublevel_volume(&g0, -1.0, 1_000_000, seed, SamplingBox::Domain)?;
    let want = PI * (-2.0f64).exp();
    let z_score = (v.value - want).abs() / v.stderr;

    let poles = Domain::Disc.approach_sequence(&Point::real(1.0), 6)?;
    let basis = BasisSpec::build(&Domain::Disc, 2)?;
    let src = KernelSource::ClosedForm(Domain::Disc);
    let cfg = BoundConfig { samples: 100_000, seed, ..BoundConfig::default() };
    let rows = hyperconvexity_bound(&src, &basis, &leading_tuple(&basis), &poles, &cfg)?;
    let decreasing = rows.windows(2).all(|w| w[1].volume.value < w[0].volume.value);
    let dominated = rows.iter().all(|r| r.dominated);
    let bound_to_zero = rows.windows(2).all(|w| w[1].bound < w[0].bound);
    Ok(outcome(
        6,
        z_score,
        3.0,
        decreasing && dominated && bound_to_zero,
        format!(
            "volume at pole 0 {:.6} vs {want:.6} (stderr {:.1e}); volumes decreasing: {decreasing}; \
             bound dominates ratio at all {} poles: {dominated}; last bound {:.2e}",
            v.value,
            v.stderr,
            rows.len(),
            rows.last().map_or(f64::NAN, |r| r.bound)
        ),
    ))
}

/// Laplace expansion along the first row.
fn laplace_determinant(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    if n == 1 {
        return m[(0, 0)];
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let minor = m.clone().remove_row(0).remove_column(j);
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += m[(0, j)] * laplace_determinant(&minor) * sign;
    }
    acc
}

fn wedge_identities(seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cb = 0.0f64;
    let mut decomposable = 0.0f64;
    let random = |rng: &mut ChaCha8Rng, s: usize, m: usize| -> Vec<Vec<Complex64>> {
        (0..s)
            .map(|_| (0..m).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())
            .collect()
    };
    for _ in 0..200 {
        let m = rng.random_range(3..=8);
        let s = rng.random_range(1..=3);
        let a = random(&mut rng, s, m);
        let b = random(&mut rng, s, m);
        let lhs = inner(&wedge_of(&a)?, &wedge_of(&b)?)?;
        let rhs = laplace_determinant(&pairing_matrix(&a, &b));
        cb = cb.max((lhs - rhs).norm() / rhs.norm().max(1.0));
        let u = wedge_of(&a)?;
        decomposable = decomposable.max(plucker_residual(&u)? / u.norm_sqr().max(1e-300));
    }
    let u = WedgeVector::basis(&[0, 1], 4)?.add(&WedgeVector::basis(&[2, 3], 4)?)?;
    let non = plucker_residual(&u)?;
    let ok = decomposable <= 1e-12 && non == 1.0;
    Ok(outcome(
        7,
        cb,
        1e-10,
        ok,
        format!("Cauchy-Binet max {cb:.1e} over 200 instances; decomposable residual max {decomposable:.1e}; e1^e2+e3^e4 residual {non}"),
    ))
}

fn biholomorphic_invariance(seed: u64) -> Result<CheckOutcome> {
    const TOL: f64 = 1e-8;
    let src = KernelSource::ClosedForm(Domain::Disc);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    while cases.len() < 20 {
        let a = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        let z = Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
        let w = (z - a) / (1.0 - a.conj() * z);
        if a.norm() <= 0.5 && z.norm() <= 0.5 && w.norm() <= 0.7 {
            cases.push((a, z, w));
        }
    }
    let worst = cases
        .par_iter()
        .map(|&(a, z, w)| -> Result<f64> {
            let deriv = (1.0 - a.norm_sqr()) / (1.0 - a.conj() * z).powi(2);
            let pulled = tilde_tensor(&src, &Point::scalar(w), DEFAULT_FD_STEP)?.get(0, 0).re * deriv.norm_sqr();
            let here = tilde_tensor(&src, &Point::scalar(z), DEFAULT_FD_STEP)?.get(0, 0).re;
            Ok((pulled - here).abs() / here)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(outcome(8, worst, TOL, true, "max relative deviation over 20 seeded disc automorphisms".into()))
}
