//! Worked values for each module through the public API.

use std::f64::consts::PI;

use bergman_core::criterion::fubini_pullback_residual;
use bergman_core::geodesy::{radial_distance, LengthConfig};
use bergman_core::metrics::vector_length;
use bergman_core::{BasisSpec, Domain, Error, HermitianMatrix, KernelSource, MetricKind, Point};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn membership_and_boundary_distance() {
    assert!(Domain::Disc.contains(&Point::real(0.0)).unwrap());
    assert!(!Domain::annulus(0.5).unwrap().contains(&Point::real(0.25)).unwrap());
    assert!(!Domain::PuncturedDisc.contains(&Point::real(0.0)).unwrap());
    assert_eq!(Domain::Disc.boundary_distance(&Point::real(0.0)).unwrap(), 1.0);
    assert_eq!(Domain::annulus(0.5).unwrap().boundary_distance(&Point::real(0.75)).unwrap(), 0.25);
    assert_eq!(Domain::PuncturedDisc.boundary_distance(&Point::real(0.001)).unwrap(), 0.001);
    assert!(matches!(
        Domain::Disc.contains(&Point::origin(2)),
        Err(Error::DimensionMismatch { .. })
    ));
    assert_eq!(Domain::Disc.boundary_distance(&Point::real(1.2)), Err(Error::OutsideDomain));
}

#[test]
fn approach_sequences() {
    let close = |a: &[Point], b: &[f64]| {
        a.len() == b.len() && a.iter().zip(b).all(|(p, x)| (p.0[0] - c(*x, 0.0)).norm() < 1e-15)
    };
    assert!(close(&Domain::Disc.approach_sequence(&Point::real(1.0), 3).unwrap(), &[0.9, 0.99, 0.999]));
    assert!(close(&Domain::PuncturedDisc.approach_sequence(&Point::real(0.0), 2).unwrap(), &[0.1, 0.01]));
    let ball = Domain::ball(2).unwrap();
    let seq = ball.approach_sequence(&Point::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), 1).unwrap();
    assert_eq!(seq, vec![Point::new(vec![c(0.9, 0.0), c(0.0, 0.0)]).unwrap()]);
    assert_eq!(Domain::Disc.approach_sequence(&Point::real(0.5), 2), Err(Error::NotOnBoundary));
}

#[test]
fn basis_normalizations() {
    let disc = BasisSpec::build(&Domain::Disc, 2).unwrap();
    assert_eq!(disc.terms[0].exponents, vec![0]);
    assert!((disc.terms[0].normalization - (1.0 / PI).sqrt()).abs() < 1e-15);
    assert!((disc.terms[1].normalization - (2.0 / PI).sqrt()).abs() < 1e-15);

    let r: f64 = 0.3;
    let ann = BasisSpec::build(&Domain::annulus(r).unwrap(), 3).unwrap();
    let minus_one = ann.terms.iter().find(|t| t.exponents == vec![-1]).unwrap();
    assert!((minus_one.normalization - 1.0 / (2.0 * PI * (1.0 / r).ln()).sqrt()).abs() < 1e-14);

    let punct = BasisSpec::build(&Domain::PuncturedDisc, 3).unwrap();
    assert_eq!(punct.terms, BasisSpec::build(&Domain::Disc, 3).unwrap().terms);

    assert!(matches!(
        BasisSpec::build(&Domain::ball(2).unwrap(), 2),
        Err(Error::BasisTooSmall { size: 2, needed: 3 })
    ));
}

#[test]
fn kernel_values_and_jets() {
    let disc = KernelSource::ClosedForm(Domain::Disc);
    assert!((disc.kernel_eval(&Point::real(0.0), &Point::real(0.0)).unwrap().re - 1.0 / PI).abs() < 1e-16);
    let jet = disc.kernel_jet(&Point::real(0.0)).unwrap();
    assert!((jet.mixed[(0, 0)].re - 2.0 / PI).abs() < 1e-15);
    let series = KernelSource::Series(BasisSpec::build(&Domain::Disc, 50).unwrap());
    let z = Point::real(0.5);
    let gap = (series.kernel_eval(&z, &z).unwrap() - disc.kernel_eval(&z, &z).unwrap()).norm();
    assert!(gap < 1e-10);

    let ball = KernelSource::ClosedForm(Domain::ball(2).unwrap());
    let jet = ball.kernel_jet(&Point::origin(2)).unwrap();
    assert!((jet.value - 2.0 / (PI * PI)).abs() < 1e-15);
    assert!((jet.mixed[(1, 1)].re - 6.0 / (PI * PI)).abs() < 1e-14);

    let w = Point::scalar(c(0.3, -0.4));
    let jet = disc.kernel_jet(&w).unwrap();
    assert!((jet.antiholo_grad[0] - jet.holo_grad[0].conj()).norm() < 1e-15);
}

#[test]
fn vector_lengths() {
    let m = HermitianMatrix::from_real_diagonal(&[2.0]);
    assert!((vector_length(&m, &[c(1.0, 0.0)]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(vector_length(&m, &[c(0.0, 0.0)]).unwrap(), 0.0);
    assert!(matches!(vector_length(&m, &[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn fubini_pullback_converges_under_step_halving() {
    // at the disc center both sides are 6 to rounding; off center the
    // finite-difference error is visible and falls at least like h^2
    let disc = KernelSource::ClosedForm(Domain::Disc);
    assert!(fubini_pullback_residual(&disc, &Point::real(0.0), 1e-3).unwrap() < 1e-5);
    let z = Point::scalar(c(0.4, 0.2));
    let coarse = fubini_pullback_residual(&disc, &z, 0.04).unwrap();
    let fine = fubini_pullback_residual(&disc, &z, 0.02).unwrap();
    assert!(coarse > 1e-9, "{coarse}");
    assert!(fine <= coarse / 4.0, "{coarse} {fine}");
}

#[test]
fn punctured_disc_distance_to_the_puncture_is_finite() {
    let src = KernelSource::ClosedForm(Domain::PuncturedDisc);
    let cap = 6f64.sqrt() * 0.5f64.atanh();
    let cfg = LengthConfig::default();
    let mut last = 0.0;
    for eps in [1e-2, 1e-4, 1e-6, 1e-8] {
        let d = radial_distance(&src, MetricKind::Tilde, 0.5, eps, c(1.0, 0.0), &cfg).unwrap();
        assert!(d > last && d < cap);
        last = d;
    }
    assert!(cap - last < 1e-6);
}
