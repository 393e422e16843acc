//! Strip window enumeration and the contracting-plane attractor:
//! frozen sizes, nesting, membership verdicts, and the acceptance
//! sweep over candidate lattice points.

use std::sync::OnceLock;

use bconv_core::field::{find_and_classify, parse_polynomial, ConjugateSystem, LatticeVector};
use bconv_core::window::{
    certify_inner_radius, condition1_against, condition1_check, figure1_cloud, fractal_approx,
    generate_xbar, r_membership, Verdict, XBarWindow,
};
use bconv_core::Error;

const CAP: usize = 10_000_000;

fn quartic() -> &'static ConjugateSystem {
    static SYS: OnceLock<ConjugateSystem> = OnceLock::new();
    SYS.get_or_init(|| {
        let p = parse_polynomial(&[1, -1, -1, 1, -1]).unwrap();
        find_and_classify(&p, None).unwrap()
    })
}

fn w20() -> &'static XBarWindow {
    static W: OnceLock<XBarWindow> = OnceLock::new();
    W.get_or_init(|| generate_xbar(quartic(), 20.0, CAP).unwrap())
}

#[test]
fn window_size_and_depth_freeze() {
    let w = w20();
    assert_eq!(w.len(), 291);
    assert_eq!(w.generation_depth, 16);
    assert!((w.free_bound - 20.0).abs() < 1e-12);
}

#[test]
fn windows_nest_and_mirror() {
    let sys = quartic();
    let w10 = generate_xbar(sys, 10.0, CAP).unwrap();
    let w = w20();
    for v in &w10.points {
        assert!(w.contains(v), "lost {v:?} when widening the bound");
    }
    assert!(w10.len() < w.len());
    for v in &w.points {
        assert!(w.contains(&v.neg()), "window not centrally symmetric at {v:?}");
    }
}

#[test]
fn window_points_have_separated_base_coordinates() {
    let sys = quartic();
    let mut pes: Vec<f64> = w20().points.iter().map(|v| sys.pe(v)).collect();
    pes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in pes.windows(2) {
        assert!(w[1] - w[0] > 1e-6, "base coordinates collide: {} {}", w[0], w[1]);
    }
}

#[test]
fn attractor_approximation_shape() {
    let sys = quartic();
    let fa = fractal_approx(sys, 12, None, CAP).unwrap();
    assert_eq!(fa.depth, 12);
    assert!(!fa.is_real);
    assert!(fa.cloud_radius <= sys.attractor_radius());
    // Deeper cylinders shrink by the contraction ratio.
    let fa2 = fractal_approx(sys, 13, None, CAP).unwrap();
    assert!(
        (fa2.cylinder_radius / fa.cylinder_radius - sys.contracting_rho()).abs() < 1e-12
    );
    let cert = fa.interior.expect("interior certificate");
    assert!((cert.radius - 0.9).abs() < 1e-12);
    assert_eq!(cert.depth, 5);
    assert_eq!(certify_inner_radius(sys).unwrap().radius, cert.radius);
}

#[test]
fn membership_verdicts_at_the_extremes() {
    let sys = quartic();
    let fa = fractal_approx(sys, 12, None, CAP).unwrap();
    let origin = r_membership(num_complex::Complex64::new(0.0, 0.0), &fa, sys, 1e-3);
    assert_eq!(origin.verdict, Verdict::Inside);
    let far = r_membership(
        num_complex::Complex64::new(sys.attractor_radius() + 1.0, 0.0),
        &fa,
        sys,
        1e-3,
    );
    assert_eq!(far.verdict, Verdict::Outside);
    assert!(far.margin > 0.5);
}

#[test]
fn acceptance_sweep_confirms_the_window() {
    let sys = quartic();
    let report = condition1_check(sys, 20.0, 12, 1e-3, CAP).unwrap();
    assert_eq!(report.window_size, 291);
    assert_eq!(report.inside, 291);
    assert!(report.counterexamples.is_empty());
    assert!(report.window_never_outside);
    assert!(report.consistent);
    assert!(report.uncertain * 10 < report.candidates);
}

#[test]
fn sweep_flags_a_doctored_window() {
    let sys = quartic();
    let fa = fractal_approx(sys, 12, None, CAP).unwrap();
    // Shrink the free bound by hand to keep the candidate box small;
    // the planted defect is the origin, which is certified interior,
    // so its absence must surface as the one counterexample.
    let mut points = w20().points.clone();
    points.retain(|v| sys.pf(v).abs() <= 1.0);
    assert!(points.remove(&LatticeVector::zero(4)));
    let doctored = XBarWindow {
        points,
        free_bound: 1.0,
        generation_depth: w20().generation_depth,
    };
    let report = condition1_against(sys, &doctored, &fa, 1e-3).unwrap();
    assert_eq!(report.counterexamples, vec![LatticeVector::zero(4)]);
    assert!(report.window_never_outside);
    assert!(!report.consistent);
}

#[test]
fn bounds_below_the_escape_threshold_are_refused() {
    let sys = quartic();
    let err = generate_xbar(sys, 1.0, CAP).unwrap_err();
    assert!(matches!(err, Error::BoundTooSmall { .. }));
    // Nothing below the escape threshold can close under the digit maps.
    if let Error::BoundTooSmall { threshold, .. } = err {
        assert!((threshold - sys.escape_threshold()).abs() < 1e-12);
    }
}

#[test]
fn small_cloud_is_exact() {
    let sys = quartic();
    let cloud = figure1_cloud(sys, 1, CAP).unwrap();
    assert_eq!(cloud, vec![(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0)]);
}

#[test]
fn cloud_depth_is_capped() {
    assert!(matches!(
        figure1_cloud(quartic(), 21, CAP),
        Err(Error::ResourceLimit { .. })
    ));
}
