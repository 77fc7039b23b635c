//! Exterior powers of a finite-dimensional coordinate inner-product space:
//! wedge coordinates (minors), inner products, Gram determinants and the
//! quadratic Plücker relations that characterize decomposable vectors.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::determinant;

/// Largest index universe the Plücker enumeration accepts.
pub const MAX_PLUCKER_AMBIENT: usize = 64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A strictly increasing tuple of coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    /// Checks strict increase and the ambient bound.
    pub fn new(indices: Vec<usize>, ambient: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!("{indices:?} is not strictly increasing")));
        }
        if indices.iter().any(|&i| i >= ambient) {
            return Err(Error::InvalidArgument(format!("{indices:?} exceeds ambient {ambient}")));
        }
        Ok(MultiIndex(indices))
    }

    /// Sorts `indices`, returning the permutation sign, or `None` on a repeat.
    pub fn sorted_with_sign(mut indices: Vec<usize>) -> Option<(Self, f64)> {
        let mut sign = 1.0;
        // insertion sort, counting transpositions
        for i in 1..indices.len() {
            let mut j = i;
            while j > 0 && indices[j - 1] > indices[j] {
                indices.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            None
        } else {
            Some((MultiIndex(indices), sign))
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

/// An element of the `degree`-th exterior power of `C^ambient` in the
/// orthonormal basis `e_J`.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeVector {
    degree: usize,
    ambient: usize,
    coords: BTreeMap<MultiIndex, Complex64>,
}

/// Strictly increasing `k`-subsets of `items`, in lexicographic order.
pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len();
        for i in start..=items.len().saturating_sub(need) {
            if items.len() < need {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= items.len() {
        rec(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl WedgeVector {
    pub fn zero(degree: usize, ambient: usize) -> Result<Self> {
        if degree == 0 || degree > ambient {
            return Err(Error::ShapeMismatch(format!(
                "degree {degree} must be in 1..={ambient}"
            )));
        }
        Ok(WedgeVector { degree, ambient, coords: BTreeMap::new() })
    }

    /// The basis vector `e_{i_1} ^ ... ^ e_{i_s}` for any ordering of the
    /// indices (sign normalized).
    pub fn basis(indices: &[usize], ambient: usize) -> Result<Self> {
        let mut w = WedgeVector::zero(indices.len(), ambient)?;
        w.add_term(indices, Complex64::new(1.0, 0.0))?;
        Ok(w)
    }

    /// Adds `value * e_{indices}`; indices in any order, stored sorted with the
    /// permutation sign. Repeated indices contribute nothing.
    pub fn add_term(&mut self, indices: &[usize], value: Complex64) -> Result<()> {
        if indices.len() != self.degree {
            return Err(Error::ShapeMismatch(format!(
                "term of degree {} added to degree {}",
                indices.len(),
                self.degree
            )));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.ambient) {
            return Err(Error::ShapeMismatch(format!("index {bad} exceeds ambient {}", self.ambient)));
        }
        if let Some((key, sign)) = MultiIndex::sorted_with_sign(indices.to_vec()) {
            let entry = self.coords.entry(key).or_insert(ZERO);
            *entry += value * sign;
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Coordinate `a_J` for a strictly increasing `J`.
    pub fn coord(&self, indices: &[usize]) -> Complex64 {
        self.coords.get(&MultiIndex(indices.to_vec())).copied().unwrap_or(ZERO)
    }

    pub fn coords(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coords.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn scale(&self, c: Complex64) -> WedgeVector {
        WedgeVector {
            degree: self.degree,
            ambient: self.ambient,
            coords: self.coords.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn add(&self, other: &WedgeVector) -> Result<WedgeVector> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coords {
            *out.coords.entry(k.clone()).or_insert(ZERO) += v;
        }
        Ok(out)
    }

    fn check_shape(&self, other: &WedgeVector) -> Result<()> {
        if self.degree != other.degree || self.ambient != other.ambient {
            return Err(Error::ShapeMismatch(format!(
                "degree/ambient {}/{} vs {}/{}",
                self.degree, self.ambient, other.degree, other.ambient
            )));
        }
        Ok(())
    }

    /// Indices that appear in some nonzero coordinate.
    fn support_indices(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self
            .coords
            .iter()
            .filter(|(_, v)| **v != ZERO)
            .flat_map(|(k, _)| k.0.iter().copied())
            .collect();
        set.into_iter().collect()
    }
}

/// `v_1 ^ ... ^ v_s` for `s` vectors of `C^m`: the coordinate at `J` is the
/// `s x s` minor of the stacked vectors on the columns `J`.
pub fn wedge_of(vectors: &[Vec<Complex64>]) -> Result<WedgeVector> {
    let s = vectors.len();
    let m = vectors.first().map(Vec::len).ok_or_else(|| {
        Error::ShapeMismatch("wedge of an empty tuple".into())
    })?;
    if let Some(v) = vectors.iter().find(|v| v.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, found: v.len() });
    }
    let mut out = WedgeVector::zero(s, m)?;
    let all: Vec<usize> = (0..m).collect();
    for cols in combinations(&all, s) {
        let minor = DMatrix::from_fn(s, s, |r, c| vectors[r][cols[c]]);
        let det = determinant(&minor);
        if det != ZERO {
            out.coords.insert(MultiIndex(cols), det);
        }
    }
    Ok(out)
}

/// `<u, v> = sum_J u_J conj(v_J)`.
pub fn inner(u: &WedgeVector, v: &WedgeVector) -> Result<Complex64> {
    u.check_shape(v)?;
    Ok(u.coords
        .iter()
        .filter_map(|(k, a)| v.coords.get(k).map(|b| a * b.conj()))
        .sum())
}

/// The matrix of pairwise inner products `<alpha_i, beta_j>`.
pub fn pairing_matrix(alphas: &[Vec<Complex64>], betas: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    DMatrix::from_fn(alphas.len(), betas.len(), |i, j| {
        alphas[i].iter().zip(&betas[j]).map(|(a, b)| a * b.conj()).sum()
    })
}

/// Gram determinant `det(<alpha_i, alpha_j>)`, the squared norm of the wedge.
pub fn gram_determinant(vectors: &[Vec<Complex64>]) -> Result<f64> {
    let m = vectors.first().map(Vec::len).unwrap_or(0);
    if let Some(v) = vectors.iter().find(|v| v.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, found: v.len() });
    }
    Ok(determinant(&pairing_matrix(vectors, vectors)).re)
}

/// Sign of the term `a_{I+i} a_{L-i}`: `+1` when the counts of elements of
/// `L` and of `I` below `i` have equal parity, `-1` otherwise.
fn plucker_sign(i_set: &[usize], l_set: &[usize], i: usize) -> f64 {
    let below_l = l_set.iter().filter(|&&j| j < i).count();
    let below_i = i_set.iter().filter(|&&j| j < i).count();
    if (below_l + below_i) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Value of the relation `sum_{i in L} rho a_{I+i} a_{L-i}` for one pair.
fn plucker_relation(u: &WedgeVector, i_set: &[usize], l_set: &[usize]) -> Complex64 {
    let mut acc = ZERO;
    for (pos, &i) in l_set.iter().enumerate() {
        if i_set.binary_search(&i).is_ok() {
            continue;
        }
        let mut left = i_set.to_vec();
        let at = left.partition_point(|&x| x < i);
        left.insert(at, i);
        let a = u.coord(&left);
        if a == ZERO {
            continue;
        }
        let mut right = l_set.to_vec();
        right.remove(pos);
        acc += a * u.coord(&right) * plucker_sign(i_set, l_set, i);
    }
    acc
}

/// Largest modulus of the quadratic Plücker relations over all index pairs
/// `|I| = s-1`, `|L| = s+1` drawn from the indices of the support. Indices
/// outside the support cannot contribute a nonzero term.
pub fn plucker_residual(u: &WedgeVector) -> Result<f64> {
    if u.norm_sqr() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let s = u.degree;
    let universe = u.support_indices();
    if universe.len() > MAX_PLUCKER_AMBIENT {
        return Err(Error::InvalidArgument(format!(
            "support spans {} indices, Plücker enumeration is capped at {MAX_PLUCKER_AMBIENT}",
            universe.len()
        )));
    }
    let relations = binomial(universe.len(), s - 1) * binomial(universe.len(), s + 1);
    if relations > 5e7 {
        return Err(Error::InvalidArgument(format!(
            "{relations:.0} Plücker relations exceed the enumeration budget"
        )));
    }
    let firsts = combinations(&universe, s - 1);
    let seconds = combinations(&universe, s + 1);
    let residual = firsts
        .par_iter()
        .map(|i_set| {
            seconds
                .iter()
                .map(|l_set| plucker_relation(u, i_set, l_set).norm())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(residual)
}

/// `plucker_residual(u) / |u|^2 <= tol`.
pub fn is_decomposable(u: &WedgeVector, tol: f64) -> Result<bool> {
    let r = plucker_residual(u)?;
    Ok(r / u.norm_sqr() <= tol)
}

/// Coordinate map exchanged with the CLI:
/// `{"degree": 2, "ambient": 4, "coords": [{"index": [0, 1], "re": 1.0, "im": 0.0}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WedgeJson {
    pub degree: usize,
    pub ambient: usize,
    pub coords: Vec<WedgeJsonEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WedgeJsonEntry {
    pub index: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl TryFrom<WedgeJson> for WedgeVector {
    type Error = Error;

    fn try_from(j: WedgeJson) -> Result<Self> {
        let mut w = WedgeVector::zero(j.degree, j.ambient)?;
        for e in j.coords {
            w.add_term(&e.index, Complex64::new(e.re, e.im))?;
        }
        Ok(w)
    }
}
