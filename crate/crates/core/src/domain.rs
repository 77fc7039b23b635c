//! Bounded model domains in `C^n`: membership, distance to the boundary and
//! radial sequences of points converging to a boundary point.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used to decide whether a point sits on the boundary.
const BOUNDARY_TOL: f64 = 1e-12;

/// A point of `C^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<Complex64>);

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("point coordinates must be finite".into()));
        }
        Ok(Point(coords))
    }

    /// One-dimensional point.
    pub fn scalar(z: Complex64) -> Self {
        Point(vec![z])
    }

    pub fn real(x: f64) -> Self {
        Point(vec![Complex64::new(x, 0.0)])
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![Complex64::new(0.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Point {
        Point(self.0.iter().map(|c| c * s).collect())
    }

    /// `self + t * (other - self)`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + (b - a) * t)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Point) -> Vec<Complex64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    /// Euclidean distance to another point.
    pub fn distance(&self, other: &Point) -> f64 {
        self.sub(other).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Parses `"0.5+0.3i"` or comma separated coordinates `"0.3,0-0.1i"`.
    pub fn parse(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|part| {
                Complex64::from_str(part.trim())
                    .map_err(|_| Error::InvalidArgument(format!("cannot parse coordinate `{part}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Point::new(coords)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}{:+}i", c.re, c.im)?;
        }
        Ok(())
    }
}

/// One user supplied series term: a monomial exponent and its normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub exponents: Vec<i32>,
    pub normalization: f64,
}

/// A kernel given by an explicit list of orthonormal monomials living on a
/// geometric support domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomSeries {
    pub support: Box<Domain>,
    pub terms: Vec<SeriesTerm>,
}

/// The supported model domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Domain {
    Disc,
    Polydisc { dim: usize },
    Ball { dim: usize },
    Annulus { inner_radius: f64 },
    PuncturedDisc,
    CustomSeries(CustomSeries),
}

#[derive(Deserialize)]
struct CustomSeriesFile {
    #[serde(default)]
    support: Option<String>,
    dimension: Option<usize>,
    terms: Vec<SeriesTerm>,
}

impl Domain {
    pub fn polydisc(dim: usize) -> Result<Self> {
        Domain::Polydisc { dim }.validated()
    }

    pub fn ball(dim: usize) -> Result<Self> {
        Domain::Ball { dim }.validated()
    }

    pub fn annulus(inner_radius: f64) -> Result<Self> {
        Domain::Annulus { inner_radius }.validated()
    }

    pub fn custom(support: Domain, terms: Vec<SeriesTerm>) -> Result<Self> {
        Domain::CustomSeries(CustomSeries { support: Box::new(support), terms }).validated()
    }

    /// Reads a custom series from JSON:
    /// `{"support": "disc", "terms": [{"exponents": [0], "normalization": 0.56}]}`.
    /// Without `support` the unit polydisc of the given `dimension` is used.
    pub fn custom_from_json(json: &str) -> Result<Self> {
        let file: CustomSeriesFile = serde_json::from_str(json)
            .map_err(|e| Error::InvalidDomain(format!("custom series JSON: {e}")))?;
        let support = match file.support {
            Some(s) => s.parse::<Domain>()?,
            None => {
                let dim = file
                    .dimension
                    .or_else(|| file.terms.first().map(|t| t.exponents.len()))
                    .ok_or_else(|| Error::InvalidDomain("custom series without terms".into()))?;
                if dim == 1 {
                    Domain::Disc
                } else {
                    Domain::Polydisc { dim }
                }
            }
        };
        Domain::custom(support, file.terms)
    }

    fn validated(self) -> Result<Self> {
        match &self {
            Domain::Polydisc { dim } | Domain::Ball { dim } if *dim == 0 => {
                Err(Error::InvalidDomain("dimension must be at least 1".into()))
            }
            Domain::Annulus { inner_radius } if !(*inner_radius > 0.0 && *inner_radius < 1.0) => {
                Err(Error::InvalidDomain(format!(
                    "annulus inner radius {inner_radius} not in (0,1)"
                )))
            }
            Domain::CustomSeries(series) => {
                if matches!(*series.support, Domain::CustomSeries(_)) {
                    return Err(Error::InvalidDomain("custom support must be a model domain".into()));
                }
                let support = (*series.support).clone().validated()?;
                let n = support.dim();
                if series.terms.is_empty() {
                    return Err(Error::InvalidDomain("custom series without terms".into()));
                }
                for (i, term) in series.terms.iter().enumerate() {
                    if term.exponents.len() != n {
                        return Err(Error::InvalidDomain(format!(
                            "term {i} has {} exponents, support dimension is {n}",
                            term.exponents.len()
                        )));
                    }
                    if !(term.normalization > 0.0 && term.normalization.is_finite()) {
                        return Err(Error::InvalidDomain(format!(
                            "term {i} normalization must be strictly positive"
                        )));
                    }
                    if series.terms[..i].iter().any(|t| t.exponents == term.exponents) {
                        return Err(Error::InvalidDomain(format!("term {i} repeats an exponent")));
                    }
                }
                Ok(self)
            }
            _ => Ok(self),
        }
    }

    /// Complex dimension `n`.
    pub fn dim(&self) -> usize {
        match self {
            Domain::Disc | Domain::Annulus { .. } | Domain::PuncturedDisc => 1,
            Domain::Polydisc { dim } | Domain::Ball { dim } => *dim,
            Domain::CustomSeries(s) => s.support.dim(),
        }
    }

    /// The domain whose geometry this one uses (itself except for custom series).
    pub fn geometry(&self) -> &Domain {
        match self {
            Domain::CustomSeries(s) => s.support.geometry(),
            d => d,
        }
    }

    /// `max |z|` over the closure of the domain.
    pub fn sup_modulus(&self) -> f64 {
        1.0
    }

    fn check_dim(&self, z: &Point) -> Result<()> {
        if z.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: z.dim() });
        }
        Ok(())
    }

    /// Signed distance-like quantity: positive inside, zero on the boundary.
    fn signed_boundary_distance(&self, z: &Point) -> f64 {
        match self.geometry() {
            Domain::Disc => 1.0 - z.0[0].norm(),
            Domain::PuncturedDisc => {
                let r = z.0[0].norm();
                (1.0 - r).min(r)
            }
            Domain::Annulus { inner_radius } => {
                let r = z.0[0].norm();
                (1.0 - r).min(r - inner_radius)
            }
            Domain::Polydisc { .. } => z
                .0
                .iter()
                .map(|c| 1.0 - c.norm())
                .fold(f64::INFINITY, f64::min),
            Domain::Ball { .. } => 1.0 - z.norm(),
            Domain::CustomSeries(_) => unreachable!("geometry() never returns a custom series"),
        }
    }

    /// Whether `z` lies in the open domain.
    pub fn contains(&self, z: &Point) -> Result<bool> {
        self.check_dim(z)?;
        Ok(self.signed_boundary_distance(z) > 0.0)
    }

    /// Euclidean distance from an interior point to the boundary. The puncture
    /// of the punctured disc counts as boundary.
    pub fn boundary_distance(&self, z: &Point) -> Result<f64> {
        self.check_dim(z)?;
        let d = self.signed_boundary_distance(z);
        if d > 0.0 {
            Ok(d)
        } else {
            Err(Error::OutsideDomain)
        }
    }

    pub fn require_interior(&self, z: &Point) -> Result<()> {
        self.boundary_distance(z).map(|_| ())
    }

    pub fn is_on_boundary(&self, z: &Point) -> Result<bool> {
        self.check_dim(z)?;
        let on_outer = match self.geometry() {
            Domain::Polydisc { .. } => {
                let m = z.0.iter().map(|c| c.norm()).fold(0.0, f64::max);
                (m - 1.0).abs() <= BOUNDARY_TOL
            }
            Domain::Ball { .. } => (z.norm() - 1.0).abs() <= BOUNDARY_TOL,
            _ => (z.0[0].norm() - 1.0).abs() <= BOUNDARY_TOL,
        };
        let on_inner = match self.geometry() {
            Domain::PuncturedDisc => z.0[0].norm() <= BOUNDARY_TOL,
            Domain::Annulus { inner_radius } => (z.0[0].norm() - inner_radius).abs() <= BOUNDARY_TOL,
            _ => false,
        };
        Ok(on_outer || on_inner)
    }

    /// Interior points `z_k`, `k = 1..=kmax`, with boundary distance `10^-k`,
    /// on the ray through the origin that hits `target`. For the puncture the
    /// positive real axis is used.
    pub fn approach_sequence(&self, target: &Point, kmax: usize) -> Result<Vec<Point>> {
        if kmax == 0 {
            return Err(Error::InvalidArgument("kmax must be at least 1".into()));
        }
        if !self.is_on_boundary(target)? {
            return Err(Error::NotOnBoundary);
        }
        let eps = |k: usize| 10f64.powi(-(k as i32));
        let points: Vec<Point> = match self.geometry() {
            Domain::PuncturedDisc if target.0[0].norm() <= BOUNDARY_TOL => {
                (1..=kmax).map(|k| Point::real(eps(k))).collect()
            }
            Domain::Annulus { inner_radius } if target.0[0].norm() < 1.0 - BOUNDARY_TOL => {
                let dir = target.0[0] / target.0[0].norm();
                (1..=kmax)
                    .map(|k| Point::scalar(dir * (inner_radius + eps(k))))
                    .collect()
            }
            Domain::Polydisc { .. } => {
                // radial scaling keeps the largest coordinate at modulus 1 - eps
                let m = target.0.iter().map(|c| c.norm()).fold(0.0, f64::max);
                (1..=kmax).map(|k| target.scaled((1.0 - eps(k)) / m)).collect()
            }
            _ => {
                let r = target.norm();
                (1..=kmax).map(|k| target.scaled((1.0 - eps(k)) / r)).collect()
            }
        };
        for (k, p) in points.iter().enumerate() {
            let d = self.boundary_distance(p).map_err(|_| {
                Error::InvalidArgument(format!("approach point {} leaves the domain", k + 1))
            })?;
            if (d - eps(k + 1)).abs() > 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "domain too thin for the boundary-distance schedule at k={}",
                    k + 1
                )));
            }
        }
        Ok(points)
    }

    /// Volume of the domain (Lebesgue measure in `R^{2n}`).
    pub fn volume(&self) -> f64 {
        use std::f64::consts::PI;
        match self.geometry() {
            Domain::Disc | Domain::PuncturedDisc => PI,
            Domain::Annulus { inner_radius } => PI * (1.0 - inner_radius * inner_radius),
            Domain::Polydisc { dim } => PI.powi(*dim as i32),
            Domain::Ball { dim } => PI.powi(*dim as i32) / factorial(*dim),
            Domain::CustomSeries(_) => unreachable!(),
        }
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl FromStr for Domain {
    type Err = Error;

    /// `disc`, `polydisc:<n>`, `ball:<n>`, `annulus:<r>` or `punctured-disc`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let parse_dim = |arg: Option<&str>| -> Result<usize> {
            arg.ok_or_else(|| Error::InvalidDomain(format!("`{name}` needs a dimension")))?
                .parse()
                .map_err(|_| Error::InvalidDomain(format!("bad dimension in `{s}`")))
        };
        match (name, arg) {
            ("disc", None) => Ok(Domain::Disc),
            ("punctured-disc", None) => Ok(Domain::PuncturedDisc),
            ("polydisc", a) => Domain::polydisc(parse_dim(a)?),
            ("ball", a) => Domain::ball(parse_dim(a)?),
            ("annulus", Some(r)) => Domain::annulus(
                r.parse()
                    .map_err(|_| Error::InvalidDomain(format!("bad radius in `{s}`")))?,
            ),
            _ => Err(Error::InvalidDomain(format!("unknown domain `{s}`"))),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Disc => write!(f, "disc"),
            Domain::PuncturedDisc => write!(f, "punctured-disc"),
            Domain::Polydisc { dim } => write!(f, "polydisc:{dim}"),
            Domain::Ball { dim } => write!(f, "ball:{dim}"),
            Domain::Annulus { inner_radius } => write!(f, "annulus:{inner_radius}"),
            Domain::CustomSeries(s) => write!(f, "custom[{}; {} terms]", s.support, s.terms.len()),
        }
    }
}
