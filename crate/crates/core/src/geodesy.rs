//! Lengths of piecewise-linear paths in the Bergman and tilde metrics,
//! optimized distance upper bounds, radial distances, and completeness probes
//! toward boundary points.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{Domain, Point};
use crate::error::{Error, Result};
use crate::metrics::{tensor, vector_length, MetricKind, DEFAULT_FD_STEP};
use crate::quadrature::{adaptive, AdaptiveConfig};
use crate::rkhs::KernelSource;

/// Consecutive nodes closer than this are rejected as a degenerate segment.
pub const MIN_SEGMENT: f64 = 1e-14;

/// A piecewise-linear path through interior points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Path {
    nodes: Vec<Point>,
}

impl Path {
    /// Checks node count, dimensions, distinctness and membership.
    pub fn new(domain: &Domain, nodes: Vec<Point>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPath(format!("{} node(s), need at least 2", nodes.len())));
        }
        for p in &nodes {
            domain.require_interior(p)?;
        }
        for (i, w) in nodes.windows(2).enumerate() {
            if w[0].distance(&w[1]) < MIN_SEGMENT {
                return Err(Error::InvalidPath(format!("nodes {i} and {} coincide", i + 1)));
            }
        }
        Ok(Path { nodes })
    }

    /// `segments + 1` equally spaced nodes on the segment `a -> b`.
    pub fn straight(domain: &Domain, a: &Point, b: &Point, segments: usize) -> Result<Self> {
        if segments == 0 {
            return Err(Error::InvalidPath("zero segments".into()));
        }
        let nodes = (0..=segments).map(|i| a.lerp(b, i as f64 / segments as f64)).collect();
        Path::new(domain, nodes)
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn segments(&self) -> usize {
        self.nodes.len() - 1
    }
}

/// Numerical settings shared by length and distance computations.
#[derive(Debug, Clone, Copy)]
pub struct LengthConfig {
    /// Finite-difference step for the Ricci part of the tilde tensor.
    pub fd_step: f64,
    pub quadrature: AdaptiveConfig,
}

impl Default for LengthConfig {
    fn default() -> Self {
        LengthConfig { fd_step: DEFAULT_FD_STEP, quadrature: AdaptiveConfig::default() }
    }
}

/// Length of the straight segment `a -> b`.
pub fn segment_length(
    source: &KernelSource,
    kind: MetricKind,
    a: &Point,
    b: &Point,
    cfg: &LengthConfig,
) -> Result<f64> {
    let velocity = b.sub(a);
    adaptive(0.0, 1.0, cfg.quadrature, |t| {
        let m = tensor(source, kind, &a.lerp(b, t), cfg.fd_step)?;
        vector_length(&m, &velocity)
    })
}

/// Sum of the segment lengths of `path`.
pub fn path_length(source: &KernelSource, kind: MetricKind, path: &Path, cfg: &LengthConfig) -> Result<f64> {
    segment_lengths(source, kind, &path.nodes, cfg).map(|s| s.iter().sum())
}

fn segment_lengths(
    source: &KernelSource,
    kind: MetricKind,
    nodes: &[Point],
    cfg: &LengthConfig,
) -> Result<Vec<f64>> {
    nodes
        .par_windows(2)
        .map(|w| segment_length(source, kind, &w[0], &w[1], cfg))
        .collect()
}

/// Settings of [`distance_upper`].
#[derive(Debug, Clone, Copy)]
pub struct DistanceConfig {
    pub segments: usize,
    pub iters: usize,
    pub seed: u64,
    pub length: LengthConfig,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        DistanceConfig { segments: 16, iters: 200, seed: 0, length: LengthConfig::default() }
    }
}

/// Result of [`distance_upper`].
#[derive(Debug, Clone, Serialize)]
pub struct DistanceEstimate {
    /// Best path length found.
    pub distance: f64,
    /// Length of the initial straight path.
    pub straight: f64,
    /// Accepted descent steps.
    pub accepted_steps: usize,
    /// Best length after each accepted step, starting with the straight path.
    pub history: Vec<f64>,
    pub path: Path,
}

/// Shifts real coordinate `axis` (`2i` real part, `2i+1` imaginary part).
fn nudge(p: &Point, axis: usize, delta: f64) -> Point {
    let mut q = p.clone();
    let c: &mut Complex64 = &mut q.0[axis / 2];
    if axis.is_multiple_of(2) {
        c.re += delta;
    } else {
        c.im += delta;
    }
    q
}

struct PathState {
    nodes: Vec<Point>,
    total: f64,
}

/// Upper bound on the distance from `a` to `b`: the length of a path with
/// `segments` straight pieces whose interior nodes are moved by seeded
/// descent from the straight line. The endpoints are put in a canonical
/// order first, so the result is symmetric in `a` and `b`.
pub fn distance_upper(
    source: &KernelSource,
    kind: MetricKind,
    a: &Point,
    b: &Point,
    cfg: &DistanceConfig,
) -> Result<DistanceEstimate> {
    let domain = source.domain();
    let (a, b) = if canonical_less(b, a) { (b, a) } else { (a, b) };
    let path = Path::straight(domain, a, b, cfg.segments)?;
    let lcfg = cfg.length;
    let lengths = segment_lengths(source, kind, &path.nodes, &lcfg)?;
    let straight: f64 = lengths.iter().sum();
    let mut state = PathState { total: straight, nodes: path.nodes };
    let mut history = vec![straight];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let interior = state.nodes.len() - 2;
    let axes = 2 * a.dim();
    let mut step = 0.25 * (a.distance(b) / cfg.segments as f64);
    let mut accepted = 0;

    // length of the two segments touching node j when it is moved to p
    let local = |nodes: &[Point], j: usize, p: &Point| -> Result<f64> {
        Ok(segment_length(source, kind, &nodes[j - 1], p, &lcfg)?
            + segment_length(source, kind, p, &nodes[j + 1], &lcfg)?)
    };

    for _ in 0..cfg.iters {
        if interior == 0 || step < 1e-13 {
            break;
        }
        let nodes = &state.nodes;
        let grad: Vec<f64> = (0..interior * axes)
            .into_par_iter()
            .map(|idx| {
                let j = idx / axes + 1;
                let axis = idx % axes;
                let room = domain.boundary_distance(&nodes[j]).unwrap_or(0.0);
                let span = nodes[j].distance(&nodes[j - 1]).min(nodes[j].distance(&nodes[j + 1]));
                let delta = 1e-5 * room.min(span);
                if delta <= 0.0 {
                    return 0.0;
                }
                let plus = local(nodes, j, &nudge(&nodes[j], axis, delta));
                let minus = local(nodes, j, &nudge(&nodes[j], axis, -delta));
                match (plus, minus) {
                    (Ok(p), Ok(m)) => (p - m) / (2.0 * delta),
                    _ => 0.0,
                }
            })
            .collect();
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let mut improved = false;
        if gmax > 0.0 {
            let direction: Vec<f64> = grad.iter().map(|g| -g / gmax).collect();
            improved = line_search(source, kind, &lcfg, &mut state, &direction, &mut step, axes)?;
        }
        if !improved {
            // seeded random directions before giving up at this scale
            for _ in 0..2 {
                let direction: Vec<f64> = (0..interior * axes).map(|_| rng.random_range(-1.0..1.0)).collect();
                if line_search(source, kind, &lcfg, &mut state, &direction, &mut step, axes)? {
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.25;
            continue;
        }
        accepted += 1;
        history.push(state.total);
    }
    let path = Path::new(domain, state.nodes)?;
    Ok(DistanceEstimate { distance: state.total, straight, accepted_steps: accepted, history, path })
}

fn canonical_less(p: &Point, q: &Point) -> bool {
    for (x, y) in p.0.iter().zip(&q.0) {
        match x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Backtracking along `direction` (one entry per interior real coordinate);
/// accepts the first trial that shortens the path.
fn line_search(
    source: &KernelSource,
    kind: MetricKind,
    cfg: &LengthConfig,
    state: &mut PathState,
    direction: &[f64],
    step: &mut f64,
    axes: usize,
) -> Result<bool> {
    let domain = source.domain();
    let mut alpha = *step * 2.0;
    for _ in 0..30 {
        let mut trial = state.nodes.clone();
        let mut inside = true;
        for (idx, d) in direction.iter().enumerate() {
            let j = idx / axes + 1;
            trial[j] = nudge(&trial[j], idx % axes, alpha * d);
        }
        for p in &trial[1..trial.len() - 1] {
            if !domain.contains(p)? {
                inside = false;
                break;
            }
        }
        if inside && trial.windows(2).all(|w| w[0].distance(&w[1]) >= MIN_SEGMENT) {
            if let Ok(lengths) = segment_lengths(source, kind, &trial, cfg) {
                let total: f64 = lengths.iter().sum();
                if total < state.total {
                    *state = PathState { nodes: trial, total };
                    *step = alpha;
                    return Ok(true);
                }
            }
        }
        alpha *= 0.5;
    }
    Ok(false)
}

fn require_rotational(domain: &Domain) -> Result<()> {
    match domain {
        Domain::Disc | Domain::PuncturedDisc | Domain::Annulus { .. } => Ok(()),
        other => Err(Error::UnsupportedDomain(format!("radial distance needs a rotationally symmetric planar domain, got {other}"))),
    }
}

/// Length of the radial segment from `r1 * direction` to `r2 * direction`
/// (`direction` is normalized). Exact distance on the disc, an upper bound
/// elsewhere.
pub fn radial_distance(
    source: &KernelSource,
    kind: MetricKind,
    r1: f64,
    r2: f64,
    direction: Complex64,
    cfg: &LengthConfig,
) -> Result<f64> {
    let domain = source.domain();
    require_rotational(domain)?;
    let norm = direction.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::InvalidArgument("radial direction must be nonzero".into()));
    }
    let u = direction / norm;
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    for r in [lo, hi] {
        domain.require_interior(&Point::scalar(u * r))?;
    }
    // the open segment must avoid the hole or the puncture
    let min_inside = match domain {
        Domain::Annulus { inner_radius } => *inner_radius,
        Domain::PuncturedDisc => 0.0,
        _ => -1.0,
    };
    if lo <= min_inside {
        return Err(Error::InvalidPath(format!("radial segment [{lo}, {hi}] leaves the domain")));
    }
    let tangent = [u];
    adaptive(lo, hi, cfg.quadrature, |t| {
        let m = tensor(source, kind, &Point::scalar(u * t), cfg.fd_step)?;
        vector_length(&m, &tangent)
    })
}

/// How a probe measures distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeMethod {
    /// Radial quadrature when anchor and targets share a ray, else optimized paths.
    Auto,
    Radial,
    Optimized,
}

/// Settings of [`completeness_probe`].
#[derive(Debug, Clone)]
pub struct ProbeConfig {
    /// Start point; `None` picks the default anchor of the domain.
    pub anchor: Option<Point>,
    pub method: ProbeMethod,
    pub distance: DistanceConfig,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { anchor: None, method: ProbeMethod::Auto, distance: DistanceConfig::default() }
    }
}

/// One approach point of a probe.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeRow {
    pub k: usize,
    pub point: Point,
    pub boundary_distance: f64,
    pub distance_estimate: f64,
    /// Least-squares slope of distance against `k` over rows `1..=k`
    /// (undefined for the first row).
    pub slope_fit: Option<f64>,
}

/// Rows of a probe plus the slope fitted over all of them.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub anchor: Point,
    pub method: ProbeMethod,
    pub rows: Vec<ProbeRow>,
    pub slope: Option<f64>,
}

/// Default anchor toward `target`: the origin for the ball and polydisc,
/// otherwise the point on the target ray halfway across the domain
/// (`0.5` for the disc and punctured disc, `(1 + r) / 2` for the annulus).
pub fn default_anchor(domain: &Domain, target: &Point) -> Result<Point> {
    let dir = |t: &Point| {
        let z = t.0[0];
        if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) }
    };
    match domain.geometry() {
        Domain::Disc | Domain::PuncturedDisc => Ok(Point::scalar(dir(target) * 0.5)),
        Domain::Annulus { inner_radius } => Ok(Point::scalar(dir(target) * (0.5 * (1.0 + inner_radius)))),
        d => Ok(Point::origin(d.dim())),
    }
}

/// Least-squares slope of `ys` against `xs`; `None` with fewer than two points.
pub fn slope_fit(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// `Some(direction)` when `anchor` and every point lie on one ray from 0.
fn common_ray(anchor: &Point, points: &[Point]) -> Option<Complex64> {
    if anchor.dim() != 1 {
        return None;
    }
    let first = points.first()?.0[0];
    if first.norm() == 0.0 {
        return None;
    }
    let u = first / first.norm();
    let on_ray = |z: Complex64| (z - u * (z * u.conj()).re).norm() <= 1e-12 && (z * u.conj()).re >= 0.0;
    (on_ray(anchor.0[0]) && points.iter().all(|p| on_ray(p.0[0]))).then_some(u)
}

/// Distances from the anchor to each point of the approach sequence toward
/// `target`, with running slope fits. Growth without bound signals
/// completeness toward `target`; a bounded column signals incompleteness.
pub fn completeness_probe(
    source: &KernelSource,
    kind: MetricKind,
    target: &Point,
    kmax: usize,
    cfg: &ProbeConfig,
) -> Result<ProbeResult> {
    let domain = source.domain();
    let points = domain.approach_sequence(target, kmax)?;
    let anchor = match &cfg.anchor {
        Some(a) => {
            domain.require_interior(a)?;
            a.clone()
        }
        None => default_anchor(domain, target)?,
    };
    let ray = match domain.geometry() {
        Domain::Disc | Domain::PuncturedDisc | Domain::Annulus { .. } => common_ray(&anchor, &points),
        _ => None,
    };
    let method = match (cfg.method, ray) {
        (ProbeMethod::Auto, Some(_)) | (ProbeMethod::Radial, Some(_)) => ProbeMethod::Radial,
        (ProbeMethod::Radial, None) => {
            return Err(Error::InvalidArgument("anchor and approach points do not share a ray".into()))
        }
        _ => ProbeMethod::Optimized,
    };
    let distances: Vec<f64> = points
        .par_iter()
        .map(|p| match (method, ray) {
            (ProbeMethod::Radial, Some(u)) => {
                let r0 = (anchor.0[0] * u.conj()).re;
                let r1 = (p.0[0] * u.conj()).re;
                radial_distance(source, kind, r0, r1, u, &cfg.distance.length)
            }
            _ => distance_upper(source, kind, &anchor, p, &cfg.distance).map(|d| d.distance),
        })
        .collect::<Result<_>>()?;
    let ks: Vec<f64> = (1..=points.len()).map(|k| k as f64).collect();
    let rows = points
        .into_iter()
        .enumerate()
        .map(|(i, point)| {
            Ok(ProbeRow {
                k: i + 1,
                boundary_distance: domain.boundary_distance(&point)?,
                point,
                distance_estimate: distances[i],
                slope_fit: slope_fit(&ks[..=i], &distances[..=i]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbeResult { anchor, method, slope: slope_fit(&ks, &distances), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc() -> KernelSource {
        KernelSource::ClosedForm(Domain::Disc)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn straight_disc_length() {
        let p = Path::new(&Domain::Disc, vec![Point::real(0.0), Point::real(0.5)]).unwrap();
        let l = path_length(&disc(), MetricKind::Bergman, &p, &LengthConfig::default()).unwrap();
        let want = 2f64.sqrt() * 0.5f64.atanh();
        assert!((l - want).abs() < 1e-10 * want);
    }

    #[test]
    fn refinement_is_additive() {
        let cfg = LengthConfig::default();
        let a = Point::scalar(c(-0.3, 0.2));
        let b = Point::scalar(c(0.6, -0.1));
        let one = path_length(&disc(), MetricKind::Tilde, &Path::straight(&Domain::Disc, &a, &b, 1).unwrap(), &cfg).unwrap();
        let two = path_length(&disc(), MetricKind::Tilde, &Path::straight(&Domain::Disc, &a, &b, 2).unwrap(), &cfg).unwrap();
        assert!((one - two).abs() < 1e-9);
    }

    #[test]
    fn degenerate_paths() {
        let a = Point::real(0.2);
        assert!(Path::new(&Domain::Disc, vec![a.clone(), a.clone()]).is_err());
        assert!(Path::new(&Domain::Disc, vec![a.clone()]).is_err());
        assert!(Path::new(&Domain::Disc, vec![a, Point::real(1.5)]).is_err());
        let near = Path::new(&Domain::Disc, vec![Point::real(0.2), Point::real(0.2 + 1e-9)]).unwrap();
        let l = path_length(&disc(), MetricKind::Bergman, &near, &LengthConfig::default()).unwrap();
        assert!(l < 1e-8);
    }

    #[test]
    fn radial_disc_distances() {
        let cfg = LengthConfig::default();
        for rho in [0.3, 0.9, 0.999] {
            let b = radial_distance(&disc(), MetricKind::Bergman, 0.0, rho, c(1.0, 0.0), &cfg).unwrap();
            let want = 2f64.sqrt() * f64::atanh(rho);
            assert!((b - want).abs() < 1e-9 * want);
        }
    }

    #[test]
    fn radial_tilde_is_sqrt3_bergman() {
        let cfg = LengthConfig::default();
        let ratio = |rho: f64| {
            let b = radial_distance(&disc(), MetricKind::Bergman, 0.0, rho, c(1.0, 0.0), &cfg).unwrap();
            let t = radial_distance(&disc(), MetricKind::Tilde, 0.0, rho, c(1.0, 0.0), &cfg).unwrap();
            (t / b / 3f64.sqrt() - 1.0).abs()
        };
        // the stencil keeps its full step while boundary_distance >= 8h
        assert!(ratio(0.3) < 1e-8);
        assert!(ratio(0.9) < 1e-8);
        // closer in, the step is tied to boundary_distance / 8 and the
        // Richardson remainder is a fixed fraction of the tensor
        assert!(ratio(0.999) < 1e-5);
        assert!(ratio(1.0 - 1e-6) < 1e-5);
    }

    #[test]
    fn radial_requires_symmetric_domain() {
        let ball = KernelSource::ClosedForm(Domain::ball(2).unwrap());
        assert!(radial_distance(&ball, MetricKind::Bergman, 0.0, 0.5, c(1.0, 0.0), &LengthConfig::default()).is_err());
        let annulus = KernelSource::ClosedForm(Domain::annulus(0.5).unwrap());
        assert!(radial_distance(&annulus, MetricKind::Bergman, 0.75, -0.75, c(1.0, 0.0), &LengthConfig::default()).is_err());
    }

    #[test]
    fn optimized_distance_matches_radial_geodesic() {
        let cfg = DistanceConfig { iters: 20, ..DistanceConfig::default() };
        let d = distance_upper(&disc(), MetricKind::Tilde, &Point::real(0.0), &Point::real(0.9), &cfg).unwrap();
        let want = 6f64.sqrt() * 0.9f64.atanh();
        assert!((d.distance - want).abs() < 0.01 * want);
        assert!(d.distance <= d.straight);
        assert!(d.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn optimized_distance_is_symmetric_and_shortens_chords() {
        let cfg = DistanceConfig { segments: 8, iters: 15, seed: 3, ..DistanceConfig::default() };
        let a = Point::scalar(c(0.6, 0.3));
        let b = Point::scalar(c(-0.5, 0.45));
        let ab = distance_upper(&disc(), MetricKind::Bergman, &a, &b, &cfg).unwrap();
        let ba = distance_upper(&disc(), MetricKind::Bergman, &b, &a, &cfg).unwrap();
        assert_eq!(ab.distance, ba.distance);
        assert!(ab.distance < ab.straight);
        assert!(ab.accepted_steps > 0);
        // Poincaré distance oracle: sqrt(2) artanh |(a-b)/(1 - conj(b) a)|
        let z = a.0[0];
        let w = b.0[0];
        let want = 2f64.sqrt() * ((z - w) / (1.0 - w.conj() * z)).norm().atanh();
        assert!(ab.distance >= want * (1.0 - 1e-9));
        assert!(ab.distance <= want * 1.01);
    }

    #[test]
    fn slope_fits() {
        assert_eq!(slope_fit(&[1.0], &[2.0]), None);
        let s = slope_fit(&[1.0, 2.0, 3.0], &[1.0, 3.0, 5.0]).unwrap();
        assert!((s - 2.0).abs() < 1e-15);
    }

    #[test]
    fn disc_probe_grows_and_punctured_probe_is_bounded() {
        let cfg = ProbeConfig::default();
        let grow = completeness_probe(&disc(), MetricKind::Tilde, &Point::real(1.0), 5, &cfg).unwrap();
        assert_eq!(grow.method, ProbeMethod::Radial);
        assert!(grow.rows.windows(2).all(|w| w[1].distance_estimate > w[0].distance_estimate + 1.0));
        let punct = KernelSource::ClosedForm(Domain::PuncturedDisc);
        let bounded = completeness_probe(&punct, MetricKind::Tilde, &Point::real(0.0), 5, &cfg).unwrap();
        let cap = 6f64.sqrt() * 0.5f64.atanh();
        assert!(bounded.rows.iter().all(|r| r.distance_estimate <= cap + 1e-3));
    }

    #[test]
    fn default_anchors() {
        assert_eq!(default_anchor(&Domain::Disc, &Point::real(1.0)).unwrap(), Point::real(0.5));
        assert_eq!(default_anchor(&Domain::annulus(0.5).unwrap(), &Point::real(-0.5)).unwrap(), Point::real(-0.75));
        assert_eq!(default_anchor(&Domain::ball(2).unwrap(), &Point::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap()).unwrap(), Point::origin(2));
    }
}
