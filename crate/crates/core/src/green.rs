//! Pluricomplex Green functions of the disc and the ball, Monte Carlo volumes
//! and `L^2` masses of their sublevel sets, the extension constant, and the
//! bound chain that dominates the criterion ratio near the boundary.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::criterion::{tilde_ratio, FunctionVector};
use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::rkhs::{BasisSpec, KernelSource};

/// Number of batches behind every Monte Carlo standard error.
pub const BATCHES: usize = 32;
/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 1000;
/// Sublevel used by the bound chain.
pub const DEFAULT_LEVEL: f64 = -1.0;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Green function of `domain` with logarithmic pole at `pole`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GreenSpec {
    pub domain: Domain,
    pub pole: Point,
}

impl GreenSpec {
    /// Only the disc and the ball are supported.
    pub fn new(domain: Domain, pole: Point) -> Result<Self> {
        match domain {
            Domain::Disc | Domain::Ball { .. } => {}
            other => {
                return Err(Error::UnsupportedDomain(format!("no Green function for {other}")));
            }
        }
        domain.require_interior(&pole)?;
        Ok(GreenSpec { domain, pole })
    }

    fn dim(&self) -> usize {
        self.domain.dim()
    }
}

fn hermitian_product(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

/// The involutive automorphism of the unit ball exchanging `a` and `0`:
/// `(a - P_a z - s_a Q_a z) / (1 - <z, a>)`, `s_a = sqrt(1 - |a|^2)`, where
/// `P_a` projects onto `C a` and `Q_a = I - P_a`.
pub fn ball_automorphism(a: &[Complex64], z: &[Complex64]) -> Vec<Complex64> {
    let a2: f64 = a.iter().map(|c| c.norm_sqr()).sum();
    let za = hermitian_product(z, a);
    let denom = Complex64::new(1.0, 0.0) - za;
    if a2 == 0.0 {
        return z.iter().map(|c| -c).collect();
    }
    let s = (1.0 - a2).sqrt();
    a.iter()
        .zip(z)
        .map(|(&ai, &zi)| {
            let p = ai * za / a2;
            let q = zi - p;
            (ai - p - q * s) / denom
        })
        .collect()
}

/// `|phi_pole(zeta)|`, the pseudo-hyperbolic distance to the pole.
fn pseudo_hyperbolic(g: &GreenSpec, zeta: &Point) -> f64 {
    match &g.domain {
        Domain::Disc => {
            let (z, w) = (g.pole.0[0], zeta.0[0]);
            ((w - z) / (1.0 - z.conj() * w)).norm()
        }
        _ => ball_automorphism(&g.pole.0, &zeta.0).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
    }
}

/// `G(zeta, pole)`; `-inf` at the pole itself.
pub fn green_value(g: &GreenSpec, zeta: &Point) -> Result<f64> {
    g.domain.require_interior(zeta)?;
    if zeta == &g.pole {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(pseudo_hyperbolic(g, zeta).ln())
}

/// Monte Carlo estimate with batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Region sampled by [`sublevel_volume`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingBox {
    /// The cube `[-1, 1]^{2n}` around the domain.
    Domain,
    /// The cube around the Euclidean ball known to contain the sublevel set
    /// (pseudo-hyperbolic balls are Euclidean ellipsoids).
    Enclosing,
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::TooFewSamples { samples, minimum: MIN_SAMPLES });
    }
    Ok(())
}

fn check_level(level: f64) -> Result<()> {
    if !(level < 0.0 && level.is_finite()) {
        return Err(Error::InvalidArgument(format!("sublevel {level} must be negative")));
    }
    Ok(())
}

fn batch_sizes(samples: usize) -> Vec<usize> {
    (0..BATCHES).map(|b| samples / BATCHES + usize::from(b < samples % BATCHES)).collect()
}

fn batch_rng(seed: u64, batch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    rng
}

/// Mean of per-batch means and its standard error, summed in batch order.
fn batch_statistics(means: &[f64], sizes: &[usize]) -> (f64, f64) {
    let total: usize = sizes.iter().sum();
    let mean = means.iter().zip(sizes).map(|(m, &s)| m * s as f64).sum::<f64>() / total as f64;
    let b = means.len() as f64;
    let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (b - 1.0);
    (mean, (var / b).sqrt())
}

/// Center and radius of a Euclidean ball containing `{|phi_pole| < rho}`.
fn enclosing_ball(g: &GreenSpec, rho: f64) -> (Vec<Complex64>, f64) {
    let a2 = g.pole.norm_sqr();
    let d = 1.0 - rho * rho * a2;
    let center = g.pole.0.iter().map(|c| c * ((1.0 - rho * rho) / d)).collect();
    let radial = rho * (1.0 - a2) / d;
    let transverse = rho * ((1.0 - a2) / d).sqrt();
    let radius = if g.dim() == 1 { radial } else { radial.max(transverse) };
    (center, radius)
}

/// Lebesgue measure of `{G(., pole) < level}` by uniform sampling of a box
/// with rejection.
pub fn sublevel_volume(
    g: &GreenSpec,
    level: f64,
    samples: usize,
    seed: u64,
    region: SamplingBox,
) -> Result<VolumeEstimate> {
    check_samples(samples)?;
    check_level(level)?;
    let n = g.dim();
    let (lo, hi): (Vec<f64>, Vec<f64>) = match region {
        SamplingBox::Domain => (vec![-1.0; 2 * n], vec![1.0; 2 * n]),
        SamplingBox::Enclosing => {
            let (center, r) = enclosing_ball(g, level.exp());
            let flat: Vec<f64> = center.iter().flat_map(|c| [c.re, c.im]).collect();
            (
                flat.iter().map(|x| (x - r * (1.0 + 1e-9)).max(-1.0)).collect(),
                flat.iter().map(|x| (x + r * (1.0 + 1e-9)).min(1.0)).collect(),
            )
        }
    };
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let sizes = batch_sizes(samples);
    let means: Vec<f64> = sizes
        .par_iter()
        .enumerate()
        .map(|(batch, &count)| {
            let mut rng = batch_rng(seed, batch);
            let mut hits = 0usize;
            let mut coords = vec![ZERO; n];
            for _ in 0..count {
                for (i, c) in coords.iter_mut().enumerate() {
                    *c = Complex64::new(
                        rng.random_range(lo[2 * i]..hi[2 * i]),
                        rng.random_range(lo[2 * i + 1]..hi[2 * i + 1]),
                    );
                }
                let p = Point(coords.clone());
                if p.norm_sqr() < 1.0 && pseudo_hyperbolic(g, &p).ln() < level {
                    hits += 1;
                }
            }
            hits as f64 / count as f64
        })
        .collect();
    let (mean, se) = batch_statistics(&means, &sizes);
    Ok(VolumeEstimate { value: box_volume * mean, stderr: box_volume * se, samples, seed })
}

/// Volume of the Euclidean ball of radius `r` in `C^n`.
fn ball_volume(n: usize, r: f64) -> f64 {
    PI.powi(n as i32) / crate::domain::factorial(n) * r.powi(2 * n as i32)
}

/// Uniform point of the ball of radius `r` in `C^n`.
fn uniform_in_ball(rng: &mut ChaCha8Rng, n: usize, r: f64) -> Vec<Complex64> {
    let g: Vec<f64> = (0..2 * n).map(|_| rng.sample(StandardNormal)).collect();
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: f64 = rng.random();
    let scale = r * u.powf(1.0 / (2 * n) as f64) / norm;
    (0..n).map(|i| Complex64::new(g[2 * i] * scale, g[2 * i + 1] * scale)).collect()
}

/// `int_{G < level} |f|^2 dlambda`. The sublevel set is the image of the
/// ball of radius `e^level` under the automorphism exchanging the pole and 0;
/// sampling runs over that ball with the real Jacobian
/// `((1 - |a|^2) / |1 - <w, a>|^2)^{n+1}` as weight.
pub fn sublevel_mass(
    g: &GreenSpec,
    basis: &BasisSpec,
    f: &FunctionVector,
    level: f64,
    samples: usize,
    seed: u64,
) -> Result<VolumeEstimate> {
    check_samples(samples)?;
    check_level(level)?;
    if basis.domain != g.domain {
        return Err(Error::InvalidArgument("basis and Green function use different domains".into()));
    }
    let n = g.dim();
    let rho = level.exp();
    let a = &g.pole.0;
    let a2 = g.pole.norm_sqr();
    let sizes = batch_sizes(samples);
    let means: Vec<f64> = sizes
        .par_iter()
        .enumerate()
        .map(|(batch, &count)| -> Result<f64> {
            let mut rng = batch_rng(seed, batch);
            let mut acc = 0.0;
            for _ in 0..count {
                let w = uniform_in_ball(&mut rng, n, rho);
                let z = match g.domain {
                    Domain::Disc => vec![(a[0] - w[0]) / (1.0 - a[0].conj() * w[0])],
                    _ => ball_automorphism(a, &w),
                };
                let jac = ((1.0 - a2) / (1.0 - hermitian_product(&w, a)).norm_sqr()).powi(n as i32 + 1);
                acc += f.value(basis, &Point(z))?.norm_sqr() * jac;
            }
            Ok(acc / count as f64)
        })
        .collect::<Result<_>>()?;
    let (mean, se) = batch_statistics(&means, &sizes);
    let vol = ball_volume(n, rho);
    Ok(VolumeEstimate { value: vol * mean, stderr: vol * se, samples, seed })
}

/// `1 + e^{4n + 7 + sup_modulus^2}`.
pub fn extension_constant(n: usize, sup_modulus: f64) -> f64 {
    1.0 + (4.0 * n as f64 + 7.0 + sup_modulus * sup_modulus).exp()
}

/// Settings of [`hyperconvexity_bound`].
#[derive(Debug, Clone, Copy)]
pub struct BoundConfig {
    pub level: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig { level: DEFAULT_LEVEL, samples: 100_000, seed: 0 }
    }
}

/// One pole of the bound chain.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub pole: Point,
    /// Volume of the sublevel set.
    pub volume: VolumeEstimate,
    /// `C^{n+1} prod_j int_{G < level} |f_j|^2`.
    pub bound: f64,
    pub bound_stderr: f64,
    /// Criterion ratio of the tuple at the pole.
    pub ratio: f64,
    /// `C^{n+1}`.
    pub constant_factor: f64,
    /// `ratio <= bound + 3 * bound_stderr`.
    pub dominated: bool,
}

fn mix_seed(seed: u64, a: usize, b: usize) -> u64 {
    seed ^ ((a as u64) << 32 | b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// For each pole: the sublevel volume, the mass bound from the extension
/// lemma and Hadamard's inequality, and the criterion ratio it dominates.
pub fn hyperconvexity_bound(
    source: &KernelSource,
    basis: &BasisSpec,
    fs: &[FunctionVector],
    poles: &[Point],
    cfg: &BoundConfig,
) -> Result<Vec<BoundRow>> {
    let domain = source.domain().clone();
    let n = domain.dim();
    let constant_factor = extension_constant(n, domain.sup_modulus()).powi(n as i32 + 1);
    poles
        .iter()
        .enumerate()
        .map(|(i, pole)| {
            let g = GreenSpec::new(domain.clone(), pole.clone())?;
            let volume = sublevel_volume(&g, cfg.level, cfg.samples, mix_seed(cfg.seed, i, 0), SamplingBox::Enclosing)?;
            let masses = fs
                .iter()
                .enumerate()
                .map(|(j, f)| sublevel_mass(&g, basis, f, cfg.level, cfg.samples, mix_seed(cfg.seed, i, j + 1)))
                .collect::<Result<Vec<_>>>()?;
            let product: f64 = masses.iter().map(|m| m.value).product();
            let rel = masses.iter().map(|m| (m.stderr / m.value).powi(2)).sum::<f64>().sqrt();
            let bound = constant_factor * product;
            let bound_stderr = bound * rel;
            let ratio = tilde_ratio(source, basis, fs, pole)?.ratio;
            Ok(BoundRow {
                pole: pole.clone(),
                volume,
                bound,
                bound_stderr,
                ratio,
                constant_factor,
                dominated: ratio <= bound + 3.0 * bound_stderr,
            })
        })
        .collect()
}

/// Gramian of the tuple and the product of squared norms (Hadamard's
/// inequality says the first never exceeds the second).
pub fn hadamard_sides(fs: &[FunctionVector]) -> Result<(f64, f64)> {
    let gram = crate::criterion::tuple_gram(fs)?;
    Ok((gram, fs.iter().map(FunctionVector::norm_sqr).product()))
}
