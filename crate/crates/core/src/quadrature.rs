//! Gauss–Legendre rules and an adaptive bisection integrator.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Fallible variant of [`GaussLegendre::integrate`].
    pub fn try_integrate<E, F>(&self, a: f64, b: f64, mut f: F) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x)?;
        }
        Ok(acc * half)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, dp)
}

/// Settings for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveConfig {
    pub order: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig { order: 8, rel_tol: 1e-10, abs_tol: 1e-14, max_depth: 48 }
    }
}

/// Adaptive bisection: an interval is accepted once the single-rule estimate
/// and the sum over its two halves agree to the tolerance.
pub fn adaptive<E, F>(a: f64, b: f64, cfg: AdaptiveConfig, mut f: F) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let rule = GaussLegendre::new(cfg.order);
    let whole = rule.try_integrate(a, b, &mut f)?;
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut total = 0.0;
    // scale for the relative criterion, refined as pieces are accepted
    let scale = whole.abs();
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.try_integrate(lo, mid, &mut f)?;
        let right = rule.try_integrate(mid, hi, &mut f)?;
        let refined = left + right;
        let err = (refined - est).abs();
        let tol = (cfg.rel_tol * scale.max(refined.abs())).max(cfg.abs_tol);
        if err <= tol || depth >= cfg.max_depth || mid <= lo || mid >= hi {
            total += refined;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in 1..=20 {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}: {s}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let rule = GaussLegendre::new(8);
        for p in 0..16 {
            let got = rule.integrate(0.0, 1.0, |x| x.powi(p));
            let want = 1.0 / (p as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "degree {p}");
        }
    }

    #[test]
    fn adaptive_handles_near_singular_endpoint() {
        // int_0^{1-1e-6} 1/(1-t^2) dt = artanh(1 - 1e-6)
        let b = 1.0 - 1e-6;
        let got: f64 =
            adaptive::<(), _>(0.0, b, AdaptiveConfig::default(), |t| Ok(1.0 / (1.0 - t * t)))
                .unwrap();
        assert!((got - b.atanh()).abs() < 1e-9 * b.atanh());
    }
}
