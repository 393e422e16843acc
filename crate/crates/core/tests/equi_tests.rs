//! Equidistribution diagnostics: transport distance to the uniform
//! measure, level-n truncations of the weighted orbit, and the folding
//! identity between the two-sided restriction and the one-sided chain.

use std::sync::OnceLock;

use bconv_core::equi::{
    build_wn, criterion_series_w, fold_check, folded_measure, table1, wasserstein1_to_lebesgue,
    EmpiricalMeasure1D, TruncationMode,
};
use bconv_core::exchange::{successor_chain, SuccessorChain};
use bconv_core::field::{find_and_classify, parse_polynomial, ConjugateSystem};
use bconv_core::limit::{build_garsia_graph, lambda_estimate, weight_table, WeightTable};
use bconv_core::window::generate_xbar;
use bconv_core::Error;

const CAP: usize = 10_000_000;

fn quartic() -> &'static ConjugateSystem {
    static SYS: OnceLock<ConjugateSystem> = OnceLock::new();
    SYS.get_or_init(|| {
        let p = parse_polynomial(&[1, -1, -1, 1, -1]).unwrap();
        find_and_classify(&p, None).unwrap()
    })
}

fn c20() -> &'static SuccessorChain {
    static C: OnceLock<SuccessorChain> = OnceLock::new();
    C.get_or_init(|| {
        let w = generate_xbar(quartic(), 20.0, CAP).unwrap();
        successor_chain(&w, quartic()).unwrap()
    })
}

fn lambda_value() -> f64 {
    static L: OnceLock<f64> = OnceLock::new();
    *L.get_or_init(|| {
        let graph = build_garsia_graph(quartic(), CAP).unwrap();
        lambda_estimate(&graph, quartic(), 1e-9).unwrap().value
    })
}

fn t30() -> &'static WeightTable {
    static T: OnceLock<WeightTable> = OnceLock::new();
    T.get_or_init(|| weight_table(quartic(), 30, lambda_value(), 20.0, CAP).unwrap())
}

#[test]
fn single_central_atom_is_half_the_interval_away() {
    let l = quartic().interval_half_width();
    let m = EmpiricalMeasure1D::new(vec![(0.0, 1.0)], l);
    assert_eq!(wasserstein1_to_lebesgue(&m).unwrap(), l / 2.0);
}

#[test]
fn midpoint_grids_hit_the_closed_form() {
    // N equally weighted atoms at cell midpoints sit at distance
    // half-width / (2N) from the uniform measure: transport never crosses
    // cell boundaries, and each cell pays mass/N times an average h/4.
    let l = quartic().interval_half_width();
    for n in [1usize, 7, 100] {
        let h = 2.0 * l / n as f64;
        let atoms: Vec<(f64, f64)> = (0..n)
            .map(|i| (-l + h * (i as f64 + 0.5), 3.25))
            .collect();
        let m = EmpiricalMeasure1D::new(atoms, l);
        let w1 = wasserstein1_to_lebesgue(&m).unwrap();
        assert!((w1 - l / (2.0 * n as f64)).abs() <= 1e-15, "n = {n}");
    }
}

#[test]
fn distance_ignores_the_weight_scale() {
    let l = quartic().interval_half_width();
    let base: Vec<(f64, f64)> = vec![(-1.0, 0.4), (0.3, 1.1), (1.2, 0.2)];
    let scaled: Vec<(f64, f64)> = base.iter().map(|&(x, w)| (x, 17.0 * w)).collect();
    let a = wasserstein1_to_lebesgue(&EmpiricalMeasure1D::new(base, l)).unwrap();
    let b = wasserstein1_to_lebesgue(&EmpiricalMeasure1D::new(scaled, l)).unwrap();
    assert!((a - b).abs() <= 1e-15);
}

#[test]
fn empty_measures_are_refused() {
    let m = EmpiricalMeasure1D::new(vec![], 1.0);
    assert!(matches!(
        wasserstein1_to_lebesgue(&m),
        Err(Error::EmptyMeasure)
    ));
}

#[test]
fn folding_is_exact_on_and_off_the_rim() {
    let sys = quartic();
    let esc = sys.escape_threshold();
    // Multiples of the escape threshold put lattice points exactly on the
    // rim; 7.3 is a generic bound with empty rim. All must fold exactly.
    for bound in [esc, 2.0 * esc, 7.3] {
        let defect = fold_check(c20(), t30(), sys, bound).unwrap();
        assert_eq!(defect, 0.0, "bound {bound}");
    }
}

#[test]
fn folded_restrictions_freeze() {
    let sys = quartic();
    let esc = sys.escape_threshold();
    let m1 = folded_measure(c20(), t30(), sys, esc).unwrap();
    let m2 = folded_measure(c20(), t30(), sys, 2.0 * esc).unwrap();
    assert_eq!(m1.len(), 71);
    assert_eq!(m2.len(), 157);
    assert!(m2.total_mass > m1.total_mass);
}

#[test]
fn truncation_indices_freeze() {
    let sys = quartic();
    let w1 = build_wn(c20(), t30(), sys, 1, TruncationMode::Linear).unwrap();
    assert_eq!(w1.m_index, 35);
    assert_eq!(w1.measure.len(), w1.m_index + 1);
    assert_eq!(w1.atoms_2d.len(), w1.measure.len());
    assert!((w1.bound - sys.escape_threshold()).abs() < 1e-12);
    // The last retained chain point sits exactly on the rim; a naive
    // float comparison of its free coordinate would drop it.
    let rim_free = c20().free_values[w1.m_index];
    assert!((rim_free - w1.bound).abs() < 1e-9);
    for (n, want) in [(1usize, 6usize), (2, 12), (3, 21)] {
        let wn = build_wn(c20(), t30(), sys, n, TruncationMode::Geometric).unwrap();
        assert_eq!(wn.measure.len(), want, "geometric level {n}");
        assert_eq!(wn.m_index, want - 1);
    }
}

#[test]
fn truncations_grow_with_the_level() {
    let sys = quartic();
    let mut prev_mass = 0.0;
    for n in 1..=3 {
        let wn = build_wn(c20(), t30(), sys, n, TruncationMode::Geometric).unwrap();
        assert_eq!(wn.n, n);
        assert!(wn.measure.total_mass > prev_mass);
        prev_mass = wn.measure.total_mass;
    }
}

#[test]
fn exhausted_chains_and_tables_are_refused() {
    let sys = quartic();
    // Linear level 3 needs free reach 16.8; the short chain stops at 14.4.
    assert!(matches!(
        build_wn(c20(), t30(), sys, 3, TruncationMode::Linear),
        Err(Error::WindowExhausted { .. })
    ));
    // A restriction bound beyond the weight table's coverage.
    assert!(matches!(
        fold_check(c20(), t30(), sys, 25.0),
        Err(Error::WindowExhausted { .. })
    ));
}

#[test]
fn weighted_criterion_series_bookkeeping() {
    let sys = quartic();
    let cs = criterion_series_w(c20(), t30(), sys, lambda_value(), 2, TruncationMode::Linear).unwrap();
    assert!((cs.reference_constant - 4.0 / sys.beta()).abs() <= 1e-12);
    assert!(cs.hypothesis_holds);
    assert_eq!(cs.bounds.len(), 2);
    let esc = sys.escape_threshold();
    assert!((cs.bounds[0] - esc).abs() < 1e-12);
    assert!((cs.bounds[1] - 2.0 * esc).abs() < 1e-12);
    // Masses are the folded-restriction masses at the same bounds.
    let m1 = folded_measure(c20(), t30(), sys, esc).unwrap();
    assert!((cs.masses[0] - m1.total_mass).abs() < 1e-9);
    let mut acc = 0.0;
    for (t, p) in cs.terms.iter().zip(&cs.partial_sums) {
        acc += t;
        assert!((acc - p).abs() <= 1e-12);
    }
}

#[test]
fn distance_table_runs_on_the_short_chain() {
    let sys = quartic();
    let report = table1(c20(), t30(), sys, 2).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert_eq!(report.rows[0].n, 1);
    // The atoms column counts the folded two-sided restriction.
    assert_eq!(report.rows[0].atoms, 71);
    assert_eq!(report.rows[1].atoms, 157);
    assert!(report.rows[1].w1 < report.rows[0].w1);
    for row in &report.rows {
        assert!(row.w1.is_finite() && row.w1 > 0.0);
    }
}
