//! Sequential vs parallel kernels on their two real workloads: the
//! expand-merge step of the transfer operator and the per-point map of
//! window classification. Inputs are grown to well past the dispatch
//! threshold so the parallel path is actually exercised.

use criterion::{criterion_group, criterion_main, Criterion};

use bconv_core::field::{apply_digit, find_and_classify, parse_polynomial, strip_membership};
use bconv_core::measure::{eval_g_lattice, phi_step, PointMeasure, DIGITS};
use bconv_core::par::kernels;
use bconv_core::{ConjugateSystem, LatticeVector, StripVerdict};

fn quartic() -> ConjugateSystem {
    let poly = parse_polynomial(&[1, -1, -1, 1, -1]).unwrap();
    find_and_classify(&poly, None).unwrap()
}

/// Atoms of the deepest iterate whose support clears the given size.
fn grown_atoms(sys: &ConjugateSystem, min_len: usize) -> Vec<(LatticeVector, u128)> {
    let mut m = PointMeasure::dirac_zero(sys.degree());
    for _ in 0..64 {
        if m.len() >= min_len {
            break;
        }
        m = phi_step(&m, sys);
    }
    m.sorted_atoms()
}

fn bench_expand_merge(c: &mut Criterion) {
    let sys = quartic();
    let atoms = grown_atoms(&sys, 1 << 15);
    let expand = |v: &LatticeVector, w: u128, out: &mut Vec<(LatticeVector, u128)>| {
        for (digit, mult) in DIGITS {
            let child = apply_digit(v, digit, &sys);
            if strip_membership(&child, &sys) != StripVerdict::Outside {
                out.push((child, w * mult));
            }
        }
    };
    let mut group = c.benchmark_group("expand_merge");
    group.sample_size(10);
    group.bench_function("seq", |b| b.iter(|| kernels::expand_merge_seq(&atoms, expand)));
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| b.iter(|| kernels::expand_merge_par(&atoms, expand)));
    group.finish();
}

fn bench_map(c: &mut Criterion) {
    let sys = quartic();
    let points: Vec<LatticeVector> = grown_atoms(&sys, 1 << 15)
        .into_iter()
        .map(|(v, _)| v)
        .collect();
    let classify = |v: &LatticeVector| eval_g_lattice(v, &sys);
    let mut group = c.benchmark_group("map");
    group.sample_size(10);
    group.bench_function("seq", |b| b.iter(|| kernels::map_seq(&points, classify)));
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| b.iter(|| kernels::map_par(&points, classify)));
    group.finish();
}

criterion_group!(benches, bench_expand_merge, bench_map);
criterion_main!(benches);
