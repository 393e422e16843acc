//! The induced dynamics on the window: order the points by their free
//! coordinate, realize the successor map as a piecewise lattice
//! translation, and follow the orbit of the origin together with the
//! multiplicative weight cocycle read off the limit-weight table.
//!
//! The free embedding is injective on the lattice, so ordering by the free
//! coordinate is a genuine total order and each point has a unique
//! successor. The step vectors take finitely many values; grouping points
//! by their step vector is what makes the successor map a domain exchange.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ConjugateSystem, LatticeVector};
use crate::limit::WeightTable;
use crate::measure::DIGITS;
use crate::window::{FractalApprox, XBarWindow};

/// Window points with nonnegative free coordinate in successor order:
/// `points[0]` is the origin and `points[k + 1]` is the window point with
/// the smallest free coordinate above `points[k]`.
#[derive(Debug, Clone)]
pub struct SuccessorChain {
    pub points: Vec<LatticeVector>,
    /// Free coordinate per point; strictly increasing.
    pub free_values: Vec<f64>,
    /// Successive free-coordinate differences, one per step.
    pub gaps: Vec<f64>,
}

impl SuccessorChain {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest free coordinate the chain certifies coverage up to.
    pub fn free_reach(&self) -> f64 {
        *self.free_values.last().expect("chains hold at least the origin")
    }

    /// Gap values clustered at `tol`; the successor map of a cut-and-project
    /// set takes finitely many step sizes, so this list stays short no
    /// matter how long the chain grows.
    pub fn distinct_gaps(&self, tol: f64) -> Vec<f64> {
        let mut sorted = self.gaps.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out: Vec<f64> = Vec::new();
        for g in sorted {
            match out.last() {
                Some(&last) if g - last <= tol => {}
                _ => out.push(g),
            }
        }
        out
    }
}

/// Sort the nonnegative-free half of the window into successor order.
///
/// The chain is cut one escape-threshold width below the window bound:
/// a point closer to the edge could have its true successor just outside
/// the generated window, and a truncated chain must never misreport one.
pub fn successor_chain(window: &XBarWindow, sys: &ConjugateSystem) -> Result<SuccessorChain> {
    let cutoff = window.free_bound - sys.escape_threshold();
    let mut staged: Vec<(f64, LatticeVector)> = window
        .points
        .iter()
        .filter_map(|v| {
            let pf = sys.pf(v);
            (0.0..=cutoff).contains(&pf).then(|| (pf, v.clone()))
        })
        .collect();
    staged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if staged.len() < 2 {
        return Err(Error::WindowExhausted {
            got: window.free_bound,
            needed: 2.0 * sys.escape_threshold(),
            why: "no successor step survives the window-edge truncation",
        });
    }
    debug_assert!(staged[0].1.is_zero(), "origin must lead the chain");
    for pair in staged.windows(2) {
        // Injectivity of the free embedding makes ties impossible.
        assert!(
            pair[1].0 > pair[0].0,
            "free coordinate collision at {} / {}",
            pair[0].1,
            pair[1].1
        );
    }
    let free_values: Vec<f64> = staged.iter().map(|(pf, _)| *pf).collect();
    let gaps: Vec<f64> = free_values.windows(2).map(|w| w[1] - w[0]).collect();
    let points: Vec<LatticeVector> = staged.into_iter().map(|(_, v)| v).collect();
    Ok(SuccessorChain {
        points,
        free_values,
        gaps,
    })
}

/// The successor map as a finite exchange of pieces: each chain point
/// advances by one of `translations`, and a piece is the set of points
/// sharing a translation. Pieces carry sampled supports in the
/// (base, contracting) projection, not closed-form boundaries.
#[derive(Debug, Clone)]
pub struct DomainExchangeSpec {
    /// Distinct step vectors, in order of first appearance along the chain.
    pub translations: Vec<LatticeVector>,
    /// piece_samples[i]: (pi_e, pi_c) of the chain points that step by
    /// translations[i].
    pub piece_samples: Vec<Vec<(f64, Complex64)>>,
    /// Piece index per chain step; assignment[k] names the translation
    /// moving points[k] to points[k + 1].
    pub assignment: Vec<usize>,
    /// Piece count seen in the first half of the chain alone.
    pub first_half_pieces: usize,
}

impl DomainExchangeSpec {
    pub fn piece_count(&self) -> usize {
        self.translations.len()
    }

    /// The piece census is trustworthy only once the first half of the
    /// chain already saw every translation; otherwise the chain is too
    /// short and the mismatch is reported without failing the run.
    pub fn stability_error(&self) -> Option<Error> {
        if self.first_half_pieces == self.piece_count() {
            None
        } else {
            Some(Error::UnstablePieceCount {
                first_half: self.first_half_pieces,
                full: self.piece_count(),
            })
        }
    }
}

/// Collect the step vectors of a chain and group its points into pieces.
pub fn discover_translations(
    chain: &SuccessorChain,
    sys: &ConjugateSystem,
) -> Result<DomainExchangeSpec> {
    let steps = chain.points.len().saturating_sub(1);
    if steps < 50 {
        return Err(Error::InsufficientSamples {
            what: "chain steps for piece discovery",
            needed: 50,
            got: steps,
        });
    }
    let half = steps / 2;
    let mut translations: Vec<LatticeVector> = Vec::new();
    let mut index: HashMap<LatticeVector, usize> = HashMap::new();
    let mut piece_samples: Vec<Vec<(f64, Complex64)>> = Vec::new();
    let mut assignment = Vec::with_capacity(steps);
    let mut first_half_pieces = 0usize;
    for k in 0..steps {
        let u = chain.points[k + 1].sub(&chain.points[k]);
        let idx = match index.get(&u) {
            Some(&i) => i,
            None => {
                let i = translations.len();
                index.insert(u.clone(), i);
                translations.push(u);
                piece_samples.push(Vec::new());
                i
            }
        };
        assignment.push(idx);
        piece_samples[idx].push((sys.pe(&chain.points[k]), sys.pc(&chain.points[k])));
        if k + 1 == half {
            first_half_pieces = translations.len();
        }
    }
    Ok(DomainExchangeSpec {
        translations,
        piece_samples,
        assignment,
        first_half_pieces,
    })
}

/// The orbit of the origin under the successor map, with its weight
/// cocycle accumulated two independent ways. Both weight columns are
/// normalized so the origin carries log-weight 0.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    /// (pi_e, pi_c) of the k-th orbit point.
    pub points: Vec<(f64, Complex64)>,
    /// log f(x_k) - log f(0) by direct table lookup.
    pub log_weights_direct: Vec<f64>,
    /// The same quantity as the running sum of per-step increments;
    /// telescoping makes the two columns agree to rounding.
    pub log_weights_cocycle: Vec<f64>,
    /// increments[k] = log f(x_{k+1}) - log f(x_k), one per step.
    pub increments: Vec<f64>,
    /// Piece index per step, copied from the exchange spec.
    pub pieces: Vec<usize>,
}

pub fn orbit_with_cocycle(
    chain: &SuccessorChain,
    spec: &DomainExchangeSpec,
    table: &WeightTable,
    sys: &ConjugateSystem,
) -> Result<OrbitRecord> {
    debug_assert_eq!(spec.assignment.len() + 1, chain.points.len());
    let mut logs = Vec::with_capacity(chain.points.len());
    for v in &chain.points {
        logs.push(
            table
                .log_value(v)
                .ok_or_else(|| Error::MissingWeight(v.clone()))?,
        );
    }
    let log0 = logs[0];
    let points = chain
        .points
        .iter()
        .map(|v| (sys.pe(v), sys.pc(v)))
        .collect();
    let log_weights_direct: Vec<f64> = logs.iter().map(|l| l - log0).collect();
    let increments: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
    let mut log_weights_cocycle = Vec::with_capacity(logs.len());
    let mut acc = 0.0;
    log_weights_cocycle.push(0.0);
    for d in &increments {
        acc += d;
        log_weights_cocycle.push(acc);
    }
    Ok(OrbitRecord {
        points,
        log_weights_direct,
        log_weights_cocycle,
        increments,
        pieces: spec.assignment.clone(),
    })
}

/// Within-cell variation of the cocycle increments at one cylinder depth.
#[derive(Debug, Clone, Copy)]
pub struct RegularityRow {
    pub depth: usize,
    /// (piece, cylinder) cells holding at least one sample.
    pub occupied_cells: usize,
    pub max_spread: f64,
    pub mean_spread: f64,
}

#[derive(Debug, Clone)]
pub struct RegularityReport {
    pub rows: Vec<RegularityRow>,
    pub max_abs_increment: f64,
}

/// How much the increment map varies within one piece and one depth-r
/// cylinder of the contracting coordinate. If the increments really are
/// continuous functions of the contracting coordinate piece by piece, the
/// spreads must shrink as the cylinders refine; the rows expose that trend
/// without claiming any particular rate.
///
/// A sample's depth-r address is the nearest depth-r cylinder center;
/// addresses are a partition device here, so approximate assignment near
/// cylinder boundaries is harmless.
pub fn cocycle_regularity(
    record: &OrbitRecord,
    spec: &DomainExchangeSpec,
    fractal: &FractalApprox,
    sys: &ConjugateSystem,
    max_depth: usize,
) -> Result<RegularityReport> {
    let samples = record.increments.len();
    if samples < 100 {
        return Err(Error::InsufficientSamples {
            what: "orbit steps for cocycle regularity",
            needed: 100,
            got: samples,
        });
    }
    debug_assert_eq!(record.pieces.len(), samples);
    debug_assert!(record.pieces.iter().all(|&p| p < spec.piece_count()));
    let r_max = max_depth.min(fractal.depth).max(1);
    let z = sys.contracting_value();
    let mut rows = Vec::with_capacity(r_max);
    let mut centers = vec![Complex64::new(0.0, 0.0)];
    let mut zk = Complex64::new(1.0, 0.0);
    for depth in 1..=r_max {
        // Extend the depth-(r-1) centers by one appended digit.
        let mut seen: BTreeSet<(i64, i64)> = BTreeSet::new();
        let mut next = Vec::with_capacity(centers.len() * 3);
        for &c in &centers {
            for &(digit, _) in DIGITS.iter() {
                let q = c + zk * Complex64::new(digit as f64, 0.0);
                let key = ((q.re * 1e12).round() as i64, (q.im * 1e12).round() as i64);
                if seen.insert(key) {
                    next.push(q);
                }
            }
        }
        centers = next;
        zk *= z;

        let mut cells: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
        for (k, &inc) in record.increments.iter().enumerate() {
            let p = record.points[k].1;
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (j, &c) in centers.iter().enumerate() {
                let d = (p - c).norm();
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            let cell = cells.entry((record.pieces[k], best)).or_insert((inc, inc));
            cell.0 = cell.0.min(inc);
            cell.1 = cell.1.max(inc);
        }
        let mut max_spread = 0.0f64;
        let mut sum = 0.0f64;
        for (lo, hi) in cells.values() {
            let s = hi - lo;
            max_spread = max_spread.max(s);
            sum += s;
        }
        rows.push(RegularityRow {
            depth,
            occupied_cells: cells.len(),
            max_spread,
            mean_spread: sum / cells.len() as f64,
        });
    }
    let max_abs_increment = record
        .increments
        .iter()
        .fold(0.0f64, |a, &b| a.max(b.abs()));
    Ok(RegularityReport {
        rows,
        max_abs_increment,
    })
}
