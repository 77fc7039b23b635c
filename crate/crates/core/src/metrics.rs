//! The Bergman tensor `T = d dbar log K`, its Ricci tensor
//! `Ric = -d dbar log det T`, and the modified tensor `(n+1) T - Ric`.
//!
//! `T` comes from the exact kernel jet. Ricci needs fourth derivatives of the
//! kernel, so it is taken by central finite differences of `log det T` on a
//! real-coordinate stencil followed by one Richardson step.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::linalg::HermitianMatrix;
use crate::rkhs::{KernelJet, KernelSource};

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-3;

/// Which metric a length or distance is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Bergman,
    Tilde,
}

impl std::str::FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bergman" => Ok(MetricKind::Bergman),
            "tilde" => Ok(MetricKind::Tilde),
            _ => Err(Error::InvalidArgument(format!("unknown metric `{s}`"))),
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MetricKind::Bergman => "bergman",
            MetricKind::Tilde => "tilde",
        })
    }
}

/// `T_ij = (K K_ij - K_i K_jbar) / K^2` from a kernel jet, unchecked.
pub fn tensor_from_jet(jet: &KernelJet) -> HermitianMatrix {
    let n = jet.dim();
    let k = jet.value;
    let m = DMatrix::from_fn(n, n, |i, j| {
        (jet.mixed[(i, j)] * k - jet.holo_grad[i] * jet.antiholo_grad[j]) / (k * k)
    });
    HermitianMatrix::symmetrized(m)
}

/// The Bergman metric tensor at `z`.
pub fn bergman_tensor(source: &KernelSource, z: &Point) -> Result<HermitianMatrix> {
    let jet = source.kernel_jet(z)?;
    let t = tensor_from_jet(&jet);
    t.require_positive_definite()?;
    Ok(t)
}

/// `log det T` at `z`; fails when `det T <= 0`.
pub fn log_det_bergman(source: &KernelSource, z: &Point) -> Result<f64> {
    let t = tensor_from_jet(&source.kernel_jet(z)?);
    let det = t.determinant();
    if det > 0.0 && det.is_finite() {
        Ok(det.ln())
    } else {
        Err(Error::NotPositiveDefinite { min_eigenvalue: t.min_eigenvalue() })
    }
}

/// Step actually used at `z`: `min(h, boundary_distance / 8)`.
pub fn effective_step(source: &KernelSource, z: &Point, h: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("finite-difference step {h} must be positive")));
    }
    let d = source.domain().boundary_distance(z)?;
    Ok(h.min(d / 8.0))
}

fn shifted(z: &Point, moves: &[(usize, f64)]) -> Point {
    let mut p = z.clone();
    for &(axis, delta) in moves {
        let c = &mut p.0[axis / 2];
        if axis % 2 == 0 {
            c.re += delta;
        } else {
            c.im += delta;
        }
    }
    p
}

/// Real Hessian of `f` in the coordinates `(x_1, y_1, ..., x_n, y_n)` with
/// central differences of step `h`.
fn real_hessian<F>(z: &Point, h: f64, f0: f64, f: &F) -> Result<DMatrix<f64>>
where
    F: Fn(&Point) -> Result<f64>,
{
    let d = 2 * z.dim();
    let mut hess = DMatrix::zeros(d, d);
    let h2 = h * h;
    for a in 0..d {
        let plus = f(&shifted(z, &[(a, h)]))?;
        let minus = f(&shifted(z, &[(a, -h)]))?;
        hess[(a, a)] = (plus - 2.0 * f0 + minus) / h2;
        for b in (a + 1)..d {
            let pp = f(&shifted(z, &[(a, h), (b, h)]))?;
            let pm = f(&shifted(z, &[(a, h), (b, -h)]))?;
            let mp = f(&shifted(z, &[(a, -h), (b, h)]))?;
            let mm = f(&shifted(z, &[(a, -h), (b, -h)]))?;
            let v = (pp - pm - mp + mm) / (4.0 * h2);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    Ok(hess)
}

/// `d^2 f / dz_i dzbar_j` at `z` from real finite differences with one
/// Richardson extrapolation (steps `h` and `h/2`). Every stencil node must lie
/// inside the domain of `source`.
pub fn complex_hessian<F>(source: &KernelSource, z: &Point, h: f64, f: F) -> Result<DMatrix<Complex64>>
where
    F: Fn(&Point) -> Result<f64>,
{
    let domain = source.domain();
    let guarded = |p: &Point| -> Result<f64> {
        if !domain.contains(p)? {
            return Err(Error::StencilOutside);
        }
        f(p)
    };
    let f0 = guarded(z)?;
    let coarse = real_hessian(z, h, f0, &guarded)?;
    let fine = real_hessian(z, 0.5 * h, f0, &guarded)?;
    let hr = (fine * 4.0 - coarse) / 3.0;
    let n = z.dim();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        Complex64::new(
            0.25 * (hr[(xi, xj)] + hr[(yi, yj)]),
            0.25 * (hr[(xi, yj)] - hr[(yi, xj)]),
        )
    }))
}

/// Ricci tensor of the Bergman metric, `-d dbar log det T`.
pub fn ricci_tensor(source: &KernelSource, z: &Point, h: f64) -> Result<HermitianMatrix> {
    let step = effective_step(source, z, h)?;
    let hess = complex_hessian(source, z, step, |p| log_det_bergman(source, p))?;
    Ok(HermitianMatrix::symmetrized(-hess))
}

/// `T`, `Ric` and `(n+1) T - Ric` at one point.
#[derive(Debug, Clone, Serialize)]
pub struct MetricTensors {
    pub bergman: HermitianMatrix,
    pub ricci: HermitianMatrix,
    pub tilde: HermitianMatrix,
}

/// All three tensors at `z`. A tilde tensor that is not positive definite is
/// an error.
pub fn metric_tensors(source: &KernelSource, z: &Point, h: f64) -> Result<MetricTensors> {
    let bergman = bergman_tensor(source, z)?;
    let ricci = ricci_tensor(source, z, h)?;
    let n = source.dim();
    let tilde = bergman.scale((n + 1) as f64).sub(&ricci);
    tilde.require_positive_definite()?;
    Ok(MetricTensors { bergman, ricci, tilde })
}

/// `(n+1) T - Ric`.
pub fn tilde_tensor(source: &KernelSource, z: &Point, h: f64) -> Result<HermitianMatrix> {
    metric_tensors(source, z, h).map(|t| t.tilde)
}

/// Tensor of the requested metric at `z`.
pub fn tensor(source: &KernelSource, kind: MetricKind, z: &Point, h: f64) -> Result<HermitianMatrix> {
    match kind {
        MetricKind::Bergman => bergman_tensor(source, z),
        MetricKind::Tilde => tilde_tensor(source, z, h),
    }
}

/// `sqrt(sum M_ij X_i conj(X_j))`.
pub fn vector_length(m: &HermitianMatrix, x: &[Complex64]) -> Result<f64> {
    let q = m.quadratic_form(x)?;
    // tiny negative values are rounding on a semidefinite form
    Ok(q.max(0.0).sqrt())
}
