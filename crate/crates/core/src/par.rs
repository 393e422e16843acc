//! Data-parallel kernels with sequential twins.
//!
//! Every hot loop in the pipeline is one of two shapes: an order-preserving
//! map over an input slice, or a weight-merging accumulation keyed by
//! lattice vector. Both shapes give bit-identical results sequentially and
//! in parallel (maps preserve order; merged integer additions commute), so
//! the `parallel` feature changes throughput only, never output.
//!
//! The `kernels` module is public so the bench suite can pit the two
//! implementations against each other, but it is not a stable API.

use crate::field::LatticeVector;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many items the parallel dispatch falls through to the
/// sequential kernel; spawning threads costs more than the work.
pub const PAR_THRESHOLD: usize = 1 << 11;

#[doc(hidden)]
pub mod kernels {
    use super::*;
    use std::collections::HashMap;

    /// Order-preserving map, sequential.
    pub fn map_seq<T: Sync, U: Send, F: Fn(&T) -> U + Sync>(items: &[T], f: F) -> Vec<U> {
        items.iter().map(|t| f(t)).collect()
    }

    /// Order-preserving map, parallel. Identical output to `map_seq`.
    #[cfg(feature = "parallel")]
    pub fn map_par<T: Sync, U: Send, F: Fn(&T) -> U + Sync>(items: &[T], f: F) -> Vec<U> {
        items.par_iter().map(|t| f(t)).collect()
    }

    /// Expand each (vector, weight) atom into up to `K` weighted children
    /// and merge by key, sequential. Output sorted by key.
    pub fn expand_merge_seq<F>(atoms: &[(LatticeVector, u128)], expand: F) -> Vec<(LatticeVector, u128)>
    where
        F: Fn(&LatticeVector, u128, &mut Vec<(LatticeVector, u128)>) + Sync,
    {
        let mut buf = Vec::with_capacity(4);
        let mut acc: HashMap<LatticeVector, u128> = HashMap::with_capacity(atoms.len() * 2);
        for (v, w) in atoms {
            buf.clear();
            expand(v, *w, &mut buf);
            for (child, cw) in buf.drain(..) {
                *acc.entry(child).or_insert(0) += cw;
            }
        }
        let mut out: Vec<_> = acc.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Parallel twin of `expand_merge_seq`: chunked local accumulation,
    /// then a commutative merge. Identical output.
    #[cfg(feature = "parallel")]
    pub fn expand_merge_par<F>(atoms: &[(LatticeVector, u128)], expand: F) -> Vec<(LatticeVector, u128)>
    where
        F: Fn(&LatticeVector, u128, &mut Vec<(LatticeVector, u128)>) + Sync,
    {
        let chunk = (atoms.len() / (rayon::current_num_threads() * 4)).max(256);
        let partials: Vec<HashMap<LatticeVector, u128>> = atoms
            .par_chunks(chunk)
            .map(|part| {
                let mut buf = Vec::with_capacity(4);
                let mut acc: HashMap<LatticeVector, u128> = HashMap::with_capacity(part.len() * 2);
                for (v, w) in part {
                    buf.clear();
                    expand(v, *w, &mut buf);
                    for (child, cw) in buf.drain(..) {
                        *acc.entry(child).or_insert(0) += cw;
                    }
                }
                acc
            })
            .collect();
        let mut acc: HashMap<LatticeVector, u128> = HashMap::new();
        for part in partials {
            for (k, w) in part {
                *acc.entry(k).or_insert(0) += w;
            }
        }
        let mut out: Vec<_> = acc.into_iter().collect();
        out.sort_unstable();
        out
    }
}

/// Map dispatch: parallel when built with the feature and the input is
/// large enough to pay for it.
pub(crate) fn map<T: Sync, U: Send, F: Fn(&T) -> U + Sync>(items: &[T], f: F) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        if items.len() >= PAR_THRESHOLD {
            return kernels::map_par(items, f);
        }
    }
    kernels::map_seq(items, f)
}

/// Expand-merge dispatch, same policy as `map`.
pub(crate) fn expand_merge<F>(atoms: &[(LatticeVector, u128)], expand: F) -> Vec<(LatticeVector, u128)>
where
    F: Fn(&LatticeVector, u128, &mut Vec<(LatticeVector, u128)>) + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if atoms.len() >= PAR_THRESHOLD {
            return kernels::expand_merge_par(atoms, expand);
        }
    }
    kernels::expand_merge_seq(atoms, expand)
}
