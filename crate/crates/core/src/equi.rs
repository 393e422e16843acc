//! Equidistribution diagnostics: truncate the weighted orbit of the origin
//! at nested free-coordinate bounds, fold the one-sided truncation onto the
//! two-sided restriction of the limit weights, measure Wasserstein-1
//! distances of base-coordinate projections to normalized Lebesgue with an
//! exact CDF integral, and assemble the summability series in orbit form.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exchange::SuccessorChain;
use crate::field::{ConjugateSystem, LatticeVector};
use crate::limit::{rn_bound, WeightTable};
use crate::measure::eval_g_lattice;

/// How the free-coordinate bound grows with the index n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationMode {
    /// n / (|free root| - 1): the bound behind the 20-row distance table.
    Linear,
    /// sum of |free root|^i for i < n: the reachable-set radius at depth n,
    /// the bound the summability theorems truncate at.
    Geometric,
}

impl TruncationMode {
    pub fn bound(self, n: usize, sys: &ConjugateSystem) -> f64 {
        match self {
            TruncationMode::Linear => n as f64 * sys.escape_threshold(),
            TruncationMode::Geometric => rn_bound(sys, n),
        }
    }
}

/// Weighted atoms on a symmetric interval, sorted by position. Lebesgue
/// comparisons normalize both sides, so the weight scale is arbitrary.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure1D {
    /// (position, weight), sorted ascending by position.
    pub atoms: Vec<(f64, f64)>,
    pub total_mass: f64,
    /// The carrying interval is [-half_width, half_width].
    pub half_width: f64,
}

impl EmpiricalMeasure1D {
    pub fn new(mut atoms: Vec<(f64, f64)>, half_width: f64) -> Self {
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        debug_assert!(atoms.iter().all(|&(_, w)| w > 0.0));
        let total_mass = atoms.iter().map(|&(_, w)| w).sum();
        EmpiricalMeasure1D {
            atoms,
            total_mass,
            half_width,
        }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// One truncated orbit measure: atoms at the base coordinates of the first
/// m + 1 orbit points, weighted by their limit weights.
#[derive(Debug, Clone)]
pub struct Wn {
    pub measure: EmpiricalMeasure1D,
    /// (pi_e, pi_c, weight) per retained orbit point, orbit order.
    pub atoms_2d: Vec<(f64, Complex64, f64)>,
    /// Greatest chain index whose free coordinate fits the bound.
    pub m_index: usize,
    pub bound: f64,
    pub n: usize,
    pub mode: TruncationMode,
}

/// Truncate the weighted orbit at the mode's level-n bound. The chain must
/// certifiably cover the bound: a bound beyond the chain's reach could
/// silently drop qualifying points, so it is refused instead.
pub fn build_wn(
    chain: &SuccessorChain,
    table: &WeightTable,
    sys: &ConjugateSystem,
    n: usize,
    mode: TruncationMode,
) -> Result<Wn> {
    let bound = mode.bound(n, sys);
    let reach = chain.free_reach();
    if bound > reach + rim_fuzz(bound) {
        return Err(Error::WindowExhausted {
            got: reach,
            needed: bound,
            why: "chain reach below the requested truncation bound",
        });
    }
    let rim = boundary_atom(sys, bound);
    let fz = rim_fuzz(bound);
    let mut m_index = 0usize;
    for k in 0..chain.len() {
        let fv = chain.free_values[k];
        if fv > bound + fz {
            break;
        }
        if fv > bound - fz && rim.as_ref() != Some(&chain.points[k]) {
            continue;
        }
        m_index = k;
    }
    let mut atoms = Vec::with_capacity(m_index + 1);
    let mut atoms_2d = Vec::with_capacity(m_index + 1);
    for v in &chain.points[..=m_index] {
        let f = table
            .value(v)
            .ok_or_else(|| Error::MissingWeight(v.clone()))?;
        atoms.push((sys.pe(v), f));
        atoms_2d.push((sys.pe(v), sys.pc(v), f));
    }
    Ok(Wn {
        measure: EmpiricalMeasure1D::new(atoms, sys.interval_half_width()),
        atoms_2d,
        m_index,
        bound,
        n,
        mode,
    })
}

/// Exact Wasserstein-1 distance to Lebesgue normalized on the carrying
/// interval: the integral of |F_m - F_Leb| over the interval. Between
/// consecutive atoms the atomic CDF is constant and the uniform CDF is
/// linear, so each segment integrates in closed form.
pub fn wasserstein1_to_lebesgue(m: &EmpiricalMeasure1D) -> Result<f64> {
    if m.atoms.is_empty() || m.total_mass <= 0.0 {
        return Err(Error::EmptyMeasure);
    }
    let l = m.half_width;
    let mut total = 0.0;
    let mut cum = 0.0;
    let mut left = -l;
    for i in 0..=m.atoms.len() {
        let right = if i < m.atoms.len() {
            m.atoms[i].0.clamp(-l, l)
        } else {
            l
        };
        total += segment_abs_integral(left, right, cum, l);
        if i < m.atoms.len() {
            cum += m.atoms[i].1 / m.total_mass;
        }
        left = right;
    }
    Ok(total)
}

/// Integral over [a, b] of |c - (t + l) / (2l)|. The integrand is a linear
/// function of t crossing zero at most once, at t = 2lc - l.
fn segment_abs_integral(a: f64, b: f64, c: f64, l: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let da = c - (a + l) / (2.0 * l);
    let db = c - (b + l) / (2.0 * l);
    if da.signum() == db.signum() || da == 0.0 || db == 0.0 {
        return (da.abs() + db.abs()) / 2.0 * (b - a);
    }
    let t = (2.0 * l * c - l).clamp(a, b);
    (da.abs() * (t - a) + db.abs() * (b - t)) / 2.0
}

/// Slack for deciding whether a float free coordinate sits on the rim of
/// a restriction: thousands of ulps, far below the atom spacing.
fn rim_fuzz(bound: f64) -> f64 {
    bound.abs() * 1e-12 + 1e-12
}

/// Exact lattice representative of the cutoff, when the cutoff is an
/// integer multiple of the escape threshold with a lattice preimage.
/// Restrictions are closed intervals, and these points sit exactly on the
/// rim, where their float free coordinate can land on either side of the
/// float bound. Membership at the rim goes by identity with this point.
fn boundary_atom(sys: &ConjugateSystem, bound: f64) -> Option<LatticeVector> {
    let esc = sys.escape_threshold();
    let n = (bound / esc).round();
    if !(1.0..=1e9).contains(&n) || (n * esc - bound).abs() > rim_fuzz(bound) {
        return None;
    }
    sys.free_bound_atom(n as i64)
}

/// The folded two-sided restriction as exact lattice atoms: the origin
/// once, every positive-free chain point paired with its mirror. The
/// cutoff is closed, with the rim resolved through `boundary_atom`.
/// Weights are straight table lookups, so comparing this against a direct
/// table restriction checks bookkeeping and nothing else.
fn folded_lattice_restriction(
    chain: &SuccessorChain,
    table: &WeightTable,
    sys: &ConjugateSystem,
    bound: f64,
) -> Result<Vec<(LatticeVector, f64)>> {
    let reach = chain.free_reach();
    let fz = rim_fuzz(bound);
    if bound > reach + fz {
        return Err(Error::WindowExhausted {
            got: reach,
            needed: bound,
            why: "chain reach below the requested truncation bound",
        });
    }
    let rim = boundary_atom(sys, bound);
    let mut out = Vec::new();
    for (k, v) in chain.points.iter().enumerate() {
        let fv = chain.free_values[k];
        if fv > bound + fz {
            break;
        }
        if fv > bound - fz && rim.as_ref() != Some(v) {
            continue;
        }
        let f = table
            .value(v)
            .ok_or_else(|| Error::MissingWeight(v.clone()))?;
        out.push((v.clone(), f));
        if !v.is_zero() {
            out.push((v.neg(), f));
        }
    }
    Ok(out)
}

/// Base-coordinate projection of the folded restriction at `bound`.
pub fn folded_measure(
    chain: &SuccessorChain,
    table: &WeightTable,
    sys: &ConjugateSystem,
    bound: f64,
) -> Result<EmpiricalMeasure1D> {
    let entries = folded_lattice_restriction(chain, table, sys, bound)?;
    let atoms = entries.iter().map(|(v, f)| (sys.pe(v), *f)).collect();
    Ok(EmpiricalMeasure1D::new(atoms, sys.interval_half_width()))
}

/// Maximum weight discrepancy between the folded one-sided truncation and
/// the direct two-sided table restriction at the same bound, compared atom
/// by atom on exact lattice keys. Unmatched atoms count their full weight.
pub fn fold_check(
    chain: &SuccessorChain,
    table: &WeightTable,
    sys: &ConjugateSystem,
    bound: f64,
) -> Result<f64> {
    if bound > table.free_bound {
        return Err(Error::WindowExhausted {
            got: table.free_bound,
            needed: bound,
            why: "table free bound below the requested restriction",
        });
    }
    let mut diff: BTreeMap<LatticeVector, f64> =
        folded_lattice_restriction(chain, table, sys, bound)?
            .into_iter()
            .collect();
    let rim = boundary_atom(sys, bound);
    let fz = rim_fuzz(bound);
    for (v, f) in table.sorted_entries() {
        let pa = sys.pf(&v).abs();
        let inside = if pa <= bound - fz {
            true
        } else if pa <= bound + fz {
            match &rim {
                Some(e) => v == *e || v == e.neg(),
                None => pa <= bound,
            }
        } else {
            false
        };
        if inside {
            *diff.entry(v).or_insert(0.0) -= f;
        }
    }
    Ok(diff.values().fold(0.0f64, |acc, &d| acc.max(d.abs())))
}

/// The summability series evaluated on the folded truncations. Negative
/// terms are what the absolute-continuity criterion feeds on; the
/// hypothesis flag records whether the growth constant clears the
/// reference 4 / (product of strip moduli) at all.
#[derive(Debug, Clone)]
pub struct CriterionSeriesW {
    /// terms[k] belongs to n = k + 1.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// 4 / (product of strip moduli).
    pub reference_constant: f64,
    pub lambda: f64,
    pub hypothesis_holds: bool,
    pub mode: TruncationMode,
    pub bounds: Vec<f64>,
    /// Folded-measure mass per n.
    pub masses: Vec<f64>,
}

pub fn criterion_series_w(
    chain: &SuccessorChain,
    table: &WeightTable,
    sys: &ConjugateSystem,
    lambda: f64,
    n_max: usize,
    mode: TruncationMode,
) -> Result<CriterionSeriesW> {
    let prod: f64 = sys
        .strip_reps
        .iter()
        .map(|&i| sys.reps[i].value.norm())
        .product();
    let reference_constant = 4.0 / prod;
    let mut terms = Vec::with_capacity(n_max);
    let mut partial_sums = Vec::with_capacity(n_max);
    let mut bounds = Vec::with_capacity(n_max);
    let mut masses = Vec::with_capacity(n_max);
    let mut acc = 0.0;
    for n in 1..=n_max {
        let bound = mode.bound(n, sys);
        let entries = folded_lattice_restriction(chain, table, sys, bound)?;
        let mut mass = 0.0;
        let mut g_int = 0.0;
        for (v, f) in &entries {
            mass += f;
            g_int += f * eval_g_lattice(v, sys) as f64;
        }
        let t = ((prod / 4.0) * g_int / mass).ln();
        terms.push(t);
        acc += t;
        partial_sums.push(acc);
        bounds.push(bound);
        masses.push(mass);
    }
    Ok(CriterionSeriesW {
        terms,
        partial_sums,
        reference_constant,
        lambda,
        hypothesis_holds: lambda < reference_constant,
        mode,
        bounds,
        masses,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Table1Row {
    pub n: usize,
    pub bound: f64,
    pub atoms: usize,
    pub w1: f64,
}

/// The 20-row distance table: W1 between the folded restriction and
/// normalized Lebesgue at each linear bound.
#[derive(Debug, Clone)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
    pub mode: TruncationMode,
}

/// Distances at linear bounds n / (|free root| - 1), n = 1..=n_max, with
/// positions rescaled by the interval half-width so the comparison runs
/// against uniform on [-1, 1]. W1 is invariant under the weight scale, so
/// the table does not depend on how the weight table is normalized.
pub fn table1(
    chain: &SuccessorChain,
    table: &WeightTable,
    sys: &ConjugateSystem,
    n_max: usize,
) -> Result<Table1Report> {
    let l = sys.interval_half_width();
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let bound = TruncationMode::Linear.bound(n, sys);
        let entries = folded_lattice_restriction(chain, table, sys, bound)?;
        let atoms: Vec<(f64, f64)> = entries.iter().map(|(v, f)| (sys.pe(v) / l, *f)).collect();
        let count = atoms.len();
        let measure = EmpiricalMeasure1D::new(atoms, 1.0);
        rows.push(Table1Row {
            n,
            bound,
            atoms: count,
            w1: wasserstein1_to_lebesgue(&measure)?,
        });
    }
    Ok(Table1Report {
        rows,
        mode: TruncationMode::Linear,
    })
}
