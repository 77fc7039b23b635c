//! Invariants checked on seeded random inputs against independent oracles.

use std::f64::consts::PI;

use bergman_core::criterion::{
    kobayashi_ratio, leading_tuple, norm_identity_residual, tilde_ratio, FunctionVector,
};
use bergman_core::geodesy::{distance_upper, DistanceConfig};
use bergman_core::green::{green_value, GreenSpec};
use bergman_core::metrics::{metric_tensors, vector_length, DEFAULT_FD_STEP};
use bergman_core::{BasisSpec, Domain, KernelSource, MetricKind, Point};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn point_in_disc(r: f64, theta: f64) -> Point {
    Point::scalar(Complex64::from_polar(r, theta))
}

/// Ricci oracle of the ball of dimension `n`, where `Ric = -T` and
/// `T_ij = (n+1) (delta_ij / (1-|z|^2) + conj(z_i) z_j / (1-|z|^2)^2)`.
fn ball_ricci(z: &[Complex64]) -> Vec<Vec<Complex64>> {
    let n = z.len();
    let s = 1.0 - z.iter().map(|x| x.norm_sqr()).sum::<f64>();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let delta = if i == j { 1.0 / s } else { 0.0 };
                    -(n as f64 + 1.0) * (c(delta, 0.0) + z[i].conj() * z[j] / (s * s))
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn disc_ricci_matches_oracle(r in 0.0f64..0.9, theta in 0.0f64..6.3) {
        let z = point_in_disc(r, theta);
        let t = metric_tensors(&KernelSource::ClosedForm(Domain::Disc), &z, DEFAULT_FD_STEP).unwrap();
        let want = -2.0 / (1.0 - r * r).powi(2);
        prop_assert!((t.ricci.get(0, 0).re - want).abs() < 1e-5 * want.abs());
        prop_assert!((t.tilde.get(0, 0).re + 3.0 * want).abs() < 1e-5 * want.abs());
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn ball_ricci_matches_oracle(a in -0.5f64..0.5, b in -0.5f64..0.5, d in -0.5f64..0.5, e in -0.5f64..0.5) {
        let z = vec![c(a, b), c(d, e)];
        let t = metric_tensors(&KernelSource::ClosedForm(Domain::ball(2).unwrap()), &Point::new(z.clone()).unwrap(), DEFAULT_FD_STEP).unwrap();
        let want = ball_ricci(&z);
        let scale = want[0][0].norm();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((t.ricci.get(i, j) - want[i][j]).norm() < 1e-5 * scale);
            }
        }
    }

    #[test]
    fn polydisc_ricci_is_minus_bergman(a in -0.8f64..0.8, b in -0.5f64..0.5, d in -0.8f64..0.8) {
        let z = Point::new(vec![c(a, b), c(d, 0.1)]).unwrap();
        let t = metric_tensors(&KernelSource::ClosedForm(Domain::polydisc(2).unwrap()), &z, DEFAULT_FD_STEP).unwrap();
        let scale = t.bergman.get(0, 0).re.max(t.bergman.get(1, 1).re);
        prop_assert!(t.ricci.max_abs_diff(&t.bergman.scale(-1.0)) < 1e-5 * scale);
    }

    #[test]
    fn tilde_is_positive_and_consistent(r in 0.0f64..0.95, theta in 0.0f64..6.3) {
        let src = KernelSource::Series(BasisSpec::build(&Domain::Disc, 60).unwrap());
        let z = point_in_disc(r, theta);
        let t = metric_tensors(&src, &z, DEFAULT_FD_STEP).unwrap();
        prop_assert!(t.tilde.min_eigenvalue() > 0.0);
        let rebuilt = t.bergman.scale(2.0).sub(&t.ricci);
        prop_assert!(rebuilt.max_abs_diff(&t.tilde) == 0.0);
    }

    #[test]
    fn norm_identity_holds_everywhere(r in 0.0f64..0.99, theta in 0.0f64..6.3) {
        let z = point_in_disc(r, theta);
        let series = KernelSource::Series(BasisSpec::build(&Domain::Disc, 60).unwrap());
        prop_assert!(norm_identity_residual(&series, &z).unwrap() < 1e-8);
        prop_assert!(norm_identity_residual(&KernelSource::ClosedForm(Domain::Disc), &z).unwrap() < 1e-8);
    }

    #[test]
    fn annulus_norm_identity(r in 0.51f64..0.99, theta in 0.0f64..6.3) {
        let z = point_in_disc(r, theta);
        let d = Domain::annulus(0.5).unwrap();
        let series = KernelSource::Series(BasisSpec::build(&d, 60).unwrap());
        prop_assert!(norm_identity_residual(&series, &z).unwrap() < 1e-8);
        prop_assert!(norm_identity_residual(&KernelSource::ClosedForm(d), &z).unwrap() < 1e-8);
    }

    #[test]
    fn ratio_is_invariant_under_recombination(
        seed in prop::collection::vec(-1.0f64..1.0, 32),
        mix in prop::collection::vec(-1.0f64..1.0, 8),
        r in 0.0f64..0.8,
    ) {
        let basis = BasisSpec::build(&Domain::Disc, 8).unwrap();
        let src = KernelSource::Series(basis.clone());
        let f0 = FunctionVector::new((0..8).map(|k| c(seed[k], seed[k + 8])).collect()).unwrap();
        let f1 = FunctionVector::new((0..8).map(|k| c(seed[k + 16], seed[k + 24])).collect()).unwrap();
        let a = [[c(mix[0], mix[1]), c(mix[2], mix[3])], [c(mix[4], mix[5]), c(mix[6], mix[7])]];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        prop_assume!(det.norm() > 0.1);
        let combine = |i: usize| FunctionVector::new(
            f0.coefficients.iter().zip(&f1.coefficients).map(|(x, y)| a[i][0] * x + a[i][1] * y).collect()
        ).unwrap();
        let z = Point::real(r);
        let before = tilde_ratio(&src, &basis, &[f0.clone(), f1.clone()], &z).unwrap();
        let after = tilde_ratio(&src, &basis, &[combine(0), combine(1)], &z).unwrap();
        let scale = det.norm_sqr();
        prop_assert!((after.numerator - scale * before.numerator).abs() <= 1e-9 * after.numerator.max(1e-300));
        prop_assert!((after.gram - scale * before.gram).abs() <= 1e-9 * after.gram);
        prop_assert!((after.normalized - before.normalized).abs() <= 1e-9 * before.normalized.max(1e-300));
        prop_assert!(before.normalized <= before.denominator * (1.0 + 1e-9));
    }

    #[test]
    fn kobayashi_ratio_is_bounded_by_norm(coefs in prop::collection::vec(-1.0f64..1.0, 12), r in 0.0f64..0.99, theta in 0.0f64..6.3) {
        let basis = BasisSpec::build(&Domain::Disc, 6).unwrap();
        let f = FunctionVector::new((0..6).map(|k| c(coefs[k], coefs[k + 6])).collect()).unwrap();
        prop_assume!(f.norm_sqr() > 1e-6);
        let z = point_in_disc(r, theta);
        for src in [KernelSource::Series(basis.clone()), KernelSource::ClosedForm(Domain::Disc)] {
            prop_assert!(kobayashi_ratio(&src, &basis, &f, &z).unwrap() <= f.norm_sqr() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn vector_length_is_homogeneous(x in -2.0f64..2.0, y in -2.0f64..2.0, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let src = KernelSource::ClosedForm(Domain::ball(2).unwrap());
        let t = metric_tensors(&src, &Point::new(vec![c(0.2, 0.1), c(-0.3, 0.0)]).unwrap(), DEFAULT_FD_STEP).unwrap();
        let v = [c(x, y), c(y, -x)];
        let k = c(re, im);
        let scaled = [v[0] * k, v[1] * k];
        let l = vector_length(&t.tilde, &v).unwrap();
        prop_assert!((vector_length(&t.tilde, &scaled).unwrap() - k.norm() * l).abs() < 1e-12 * (1.0 + k.norm() * l));
    }

    #[test]
    fn disc_green_is_negative_and_symmetric(
        r1 in 0.0f64..0.95, t1 in 0.0f64..6.3, r2 in 0.0f64..0.95, t2 in 0.0f64..6.3,
    ) {
        let (z, w) = (point_in_disc(r1, t1), point_in_disc(r2, t2));
        prop_assume!(z.distance(&w) > 1e-9);
        let gz = green_value(&GreenSpec::new(Domain::Disc, z.clone()).unwrap(), &w).unwrap();
        let gw = green_value(&GreenSpec::new(Domain::Disc, w.clone()).unwrap(), &z).unwrap();
        prop_assert!(gz < 0.0);
        prop_assert!((gz - gw).abs() < 1e-12 * (1.0 + gz.abs()));
    }

    #[test]
    fn green_vanishes_at_the_boundary(r in 0.0f64..0.9, t in 0.0f64..6.3, dir in 0.0f64..6.3) {
        let g = GreenSpec::new(Domain::Disc, point_in_disc(r, t)).unwrap();
        let v = green_value(&g, &point_in_disc(1.0 - 1e-4, dir)).unwrap();
        prop_assert!(v < 0.0 && v > -1e-3);
    }
}

#[test]
fn ball_green_vanishes_at_the_boundary() {
    let pole = Point::new(vec![c(0.3, -0.2), c(0.1, 0.4)]).unwrap();
    let g = GreenSpec::new(Domain::ball(2).unwrap(), pole).unwrap();
    for k in 0..8 {
        let theta = k as f64 * 0.7;
        let u = [Complex64::from_polar(0.6, theta), Complex64::from_polar(0.8, -theta)];
        let zeta = Point::new(u.iter().map(|x| x * (1.0 - 1e-4)).collect()).unwrap();
        let v = green_value(&g, &zeta).unwrap();
        assert!(v < 0.0 && v > -1e-3, "{v}");
    }
}

#[test]
fn approach_sequences_hit_the_schedule() {
    let cases = [
        (Domain::Disc, Point::scalar(Complex64::from_polar(1.0, 0.4))),
        (Domain::PuncturedDisc, Point::real(0.0)),
        (Domain::annulus(0.5).unwrap(), Point::scalar(Complex64::from_polar(0.5, 2.0))),
        (Domain::annulus(0.5).unwrap(), Point::real(-1.0)),
        (Domain::ball(3).unwrap(), Point::new(vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]).unwrap()),
        (Domain::polydisc(2).unwrap(), Point::new(vec![c(1.0, 0.0), c(0.3, 0.2)]).unwrap()),
    ];
    for (d, target) in cases {
        let pts = d.approach_sequence(&target, 8).unwrap();
        for (k, p) in pts.iter().enumerate() {
            assert!(d.contains(p).unwrap());
            let want = 10f64.powi(-(k as i32 + 1));
            assert!((d.boundary_distance(p).unwrap() - want).abs() < 1e-12, "{d} k={}", k + 1);
        }
    }
}

#[test]
fn criterion_ratio_decays_on_the_polydisc() {
    let d = Domain::polydisc(2).unwrap();
    let basis = BasisSpec::build(&d, 3).unwrap();
    let src = KernelSource::ClosedForm(d.clone());
    let fs = leading_tuple(&basis);
    let target = Point::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    let ratios: Vec<f64> = d
        .approach_sequence(&target, 6)
        .unwrap()
        .iter()
        .map(|z| tilde_ratio(&src, &basis, &fs, z).unwrap().ratio)
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
    assert!(ratios[5] < 1e-6 * tilde_ratio(&src, &basis, &fs, &Point::origin(2)).unwrap().ratio);
}

#[test]
fn disc_kernel_value_at_half() {
    let k = KernelSource::ClosedForm(Domain::Disc).kernel_eval(&Point::real(0.5), &Point::real(0.5)).unwrap();
    assert!((k.re - 16.0 / (9.0 * PI)).abs() < 1e-15);
}

#[test]
fn triangle_inequality_on_seeded_triples() {
    let src = KernelSource::ClosedForm(Domain::Disc);
    let cfg = DistanceConfig { segments: 6, iters: 10, seed: 11, ..DistanceConfig::default() };
    let pts = [
        Point::scalar(c(0.1, 0.2)),
        Point::scalar(c(-0.4, 0.3)),
        Point::scalar(c(0.3, -0.5)),
    ];
    let d = |a: &Point, b: &Point| distance_upper(&src, MetricKind::Tilde, a, b, &cfg).unwrap().distance;
    let (ab, bc, ac) = (d(&pts[0], &pts[1]), d(&pts[1], &pts[2]), d(&pts[0], &pts[2]));
    // the optimized bounds sit within 1e-3 of the true distance, which obeys the inequality
    let exact = |a: &Point, b: &Point| {
        let (z, w) = (a.0[0], b.0[0]);
        6f64.sqrt() * ((z - w) / (1.0 - w.conj() * z)).norm().atanh()
    };
    for (got, want) in [(ab, exact(&pts[0], &pts[1])), (bc, exact(&pts[1], &pts[2])), (ac, exact(&pts[0], &pts[2]))] {
        assert!(got >= want * (1.0 - 1e-9) && got <= want * (1.0 + 1e-3), "{got} {want}");
    }
    assert!(ac <= ab + bc + 1e-6);
    assert!((d(&pts[1], &pts[0]) - ab).abs() < 1e-6);
}
