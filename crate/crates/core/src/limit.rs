//! The limit weights: the growth constant lambda from the finite overlap
//! graph, the table of limit weights f(x) = lim mu_bar_n(x)/lambda^n, the
//! eigenmeasure residual that validates the table, and the mass growth of
//! the nested free-coordinate windows.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::field::{
    apply_digit, box_membership, div_by_beta, strip_membership, ConjugateSystem, LatticeVector,
    StripVerdict,
};
use crate::measure::{eval_g_lattice, phi_step, PointMeasure, DIGITS};
use crate::window::{generate_xbar, XBarWindow};

/// Finite weighted graph on the lattice points that can still return to
/// the origin: every expanding coordinate, the free one included, within
/// its own 1/(|beta_j|-1) bound. Once outside that box a point escapes
/// monotonically and never reaches 0 again, so paths 0 -> 0 of any length
/// live entirely inside the graph.
#[derive(Debug, Clone)]
pub struct GarsiaGraph {
    /// Sorted; states[index[v]] == v.
    pub states: Vec<LatticeVector>,
    pub index: HashMap<LatticeVector, usize>,
    /// edges[i] lists (target state, multiplicity).
    pub edges: Vec<Vec<(usize, u32)>>,
}

impl GarsiaGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// x -> A x for the weighted adjacency operator (forward edges).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        for (i, outs) in self.edges.iter().enumerate() {
            for &(j, w) in outs {
                y[j] += w as f64 * x[i];
            }
        }
        y
    }

    /// Exact number of weighted length-n paths 0 -> 0. Equals the origin
    /// weight of the n-fold lifted pushforward.
    pub fn count_paths_to_origin(&self, n: usize) -> u128 {
        let start = self.index[&LatticeVector::zero(
            self.states[0].coords.len(),
        )];
        let mut x = vec![0u128; self.len()];
        x[start] = 1;
        for _ in 0..n {
            let mut y = vec![0u128; self.len()];
            for (i, outs) in self.edges.iter().enumerate() {
                if x[i] == 0 {
                    continue;
                }
                for &(j, w) in outs {
                    y[j] += x[i] * w as u128;
                }
            }
            x = y;
        }
        x[start]
    }
}

pub fn build_garsia_graph(sys: &ConjugateSystem, cap: usize) -> Result<GarsiaGraph> {
    let zero = LatticeVector::zero(sys.degree());
    let mut seen: BTreeMap<LatticeVector, ()> = BTreeMap::new();
    seen.insert(zero.clone(), ());
    let mut frontier = vec![zero];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for v in &frontier {
            for &(digit, _) in DIGITS.iter() {
                let child = apply_digit(v, digit, sys);
                if box_membership(&child, sys) == StripVerdict::Outside {
                    continue;
                }
                if !seen.contains_key(&child) {
                    seen.insert(child.clone(), ());
                    next.push(child);
                }
            }
        }
        if seen.len() > cap {
            return Err(Error::ResourceLimit {
                what: "graph states",
                cap,
                reached: seen.len(),
            });
        }
        frontier = next;
    }
    let states: Vec<LatticeVector> = seen.into_keys().collect();
    let index: HashMap<LatticeVector, usize> = states
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();
    let edges = states
        .iter()
        .map(|v| {
            DIGITS
                .iter()
                .filter_map(|&(digit, mult)| {
                    let child = apply_digit(v, digit, sys);
                    index.get(&child).map(|&j| (j, mult as u32))
                })
                .collect()
        })
        .collect();
    Ok(GarsiaGraph {
        states,
        index,
        edges,
    })
}

/// lambda with its own convergence data and the independent cross-check.
#[derive(Debug, Clone)]
pub struct LambdaEstimate {
    /// Spectral radius of the graph operator (power iteration).
    pub value: f64,
    /// Infinity-norm eigen defect of the converged vector.
    pub residual: f64,
    pub iterations: usize,
    /// Stride-2 origin-mass ratio sqrt(mu_bar_n(0)/mu_bar_{n-2}(0)) from
    /// direct operator iteration; the stride cancels the parity flip the
    /// negative free conjugate induces.
    pub ratio_value: f64,
    pub ratio_depth: usize,
    pub cross_tol: f64,
    pub agree: bool,
}

const LAMBDA_MAX_ITERS: usize = 5000;
const RATIO_DEPTH: usize = 40;

pub fn lambda_estimate(
    graph: &GarsiaGraph,
    sys: &ConjugateSystem,
    tol: f64,
) -> Result<LambdaEstimate> {
    let n = graph.len();
    let start = graph.index[&LatticeVector::zero(sys.degree())];
    let mut x = vec![0.0; n];
    x[start] = 1.0;
    let mut lambda = 0.0;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    for it in 1..=LAMBDA_MAX_ITERS {
        let y = graph.apply(&x);
        let norm = y.iter().cloned().fold(0.0, f64::max);
        if norm == 0.0 {
            return Err(Error::NoConvergence {
                what: "power iteration",
                iterations: it,
                residual: f64::INFINITY,
            });
        }
        // Rayleigh quotient in the positive cone.
        let num: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let den: f64 = x.iter().map(|a| a * a).sum();
        let rq = num / den;
        let x_next: Vec<f64> = y.iter().map(|v| v / norm).collect();
        residual = graph
            .apply(&x_next)
            .iter()
            .zip(&x_next)
            .map(|(ax, xv)| (ax - rq * xv).abs())
            .fold(0.0, f64::max);
        let moved = (rq - lambda).abs();
        lambda = rq;
        x = x_next;
        iterations = it;
        if it > 4 && moved <= tol * lambda.abs() && residual <= tol.max(1e-12) * lambda {
            break;
        }
        if it == LAMBDA_MAX_ITERS {
            return Err(Error::NoConvergence {
                what: "power iteration",
                iterations: it,
                residual,
            });
        }
    }

    // Direct operator iteration, exact integers at the origin.
    let mut m = PointMeasure::dirac_zero(sys.degree());
    let zero = LatticeVector::zero(sys.degree());
    let mut w_stride = 1u128;
    let mut w_final = 1u128;
    for step in 1..=RATIO_DEPTH {
        m = phi_step(&m, sys);
        if step == RATIO_DEPTH - 2 {
            w_stride = m.weight(&zero);
        } else if step == RATIO_DEPTH {
            w_final = m.weight(&zero);
        }
    }
    let ratio_value = ((w_final as f64) / (w_stride as f64)).sqrt();
    let cross_tol = 1e-3;
    let agree = ((ratio_value - lambda) / lambda).abs() <= cross_tol;
    Ok(LambdaEstimate {
        value: lambda,
        residual,
        iterations,
        ratio_value,
        ratio_depth: RATIO_DEPTH,
        cross_tol,
        agree,
    })
}

/// Lifted n-fold pushforward of the origin Dirac mass, as an independent
/// accumulation (the overlap-counting module iterates the same operator;
/// equality of the two paths is the lifting identity and is tested, not
/// assumed). `b` declares the free-coordinate coverage the caller needs;
/// the support reaches free values up to sum_{i<n} |beta_free|^i, so a
/// smaller declaration is refused rather than silently truncated.
pub fn mu_bar_n(n: usize, b: f64, sys: &ConjugateSystem, cap: usize) -> Result<PointMeasure> {
    let needed = rn_bound(sys, n);
    if b < needed {
        return Err(Error::WindowExhausted {
            got: b,
            needed,
            why: "free bound must cover the reachable set at this depth",
        });
    }
    let mut atoms: BTreeMap<LatticeVector, u128> = BTreeMap::new();
    atoms.insert(LatticeVector::zero(sys.degree()), 1);
    for _ in 0..n {
        let mut next: BTreeMap<LatticeVector, u128> = BTreeMap::new();
        for (v, &w) in &atoms {
            for &(digit, mult) in DIGITS.iter() {
                let child = apply_digit(v, digit, sys);
                if strip_membership(&child, sys) != StripVerdict::Outside {
                    *next.entry(child).or_insert(0) += w * mult;
                }
            }
        }
        if next.len() > cap {
            return Err(Error::ResourceLimit {
                what: "lifted measure atoms",
                cap,
                reached: next.len(),
            });
        }
        atoms = next;
    }
    Ok(PointMeasure::from_atoms(atoms.into_iter().collect()))
}

/// Free-coordinate radius of the depth-n reachable set:
/// sum_{i=0}^{n-1} |beta_free|^i.
pub fn rn_bound(sys: &ConjugateSystem, n: usize) -> f64 {
    let q = sys.free_modulus();
    (0..n).map(|i| q.powi(i as i32)).sum()
}

/// Limit weights over a free-coordinate window. Values are stored in log
/// scale; lookups return linear values.
///
/// The raw estimate mu_bar_n(x)/lambda^n converges like (gamma/lambda)^n
/// for a subdominant gamma, too slowly for the residual targets at
/// feasible n. A one-term Richardson extrapolation through the stride-2
/// iterates removes the leading error mode:
///   f(x) ~ (f_n(x) - q f_{n-2}(x)) / (1 - q),
/// with the contraction factor q calibrated per run by minimizing the
/// interior eigenmeasure residual, which is computable without ground
/// truth. Nonpositive extrapolations (fringe points still far from their
/// asymptotics) fall back to the raw estimate.
#[derive(Debug, Clone)]
pub struct WeightTable {
    log_f: HashMap<LatticeVector, f64>,
    /// Raw stride-2 stabilization gap |f_n - f_{n-2}|, absolute.
    pub stab_gap: HashMap<LatticeVector, f64>,
    pub f0: f64,
    pub n_stab: usize,
    pub free_bound: f64,
    /// Calibrated extrapolation factor.
    pub q: f64,
    /// Entries whose relative stabilization gap exceeds 5%.
    pub flagged: usize,
}

impl WeightTable {
    pub fn value(&self, v: &LatticeVector) -> Option<f64> {
        self.log_f.get(v).map(|&l| l.exp())
    }

    pub fn log_value(&self, v: &LatticeVector) -> Option<f64> {
        self.log_f.get(v).copied()
    }

    pub fn len(&self) -> usize {
        self.log_f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_f.is_empty()
    }

    /// Entries in lattice order.
    pub fn sorted_entries(&self) -> Vec<(LatticeVector, f64)> {
        let mut out: Vec<_> = self
            .log_f
            .iter()
            .map(|(v, &l)| (v.clone(), l.exp()))
            .collect();
        out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Log-scale entries in lattice order. Dump format for caching: logs
    /// round-trip bit-exactly where exp/ln would not.
    pub fn log_entries(&self) -> Vec<(LatticeVector, f64)> {
        let mut out: Vec<_> = self.log_f.iter().map(|(v, &l)| (v.clone(), l)).collect();
        out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Rebuild a table from dumped parts. The caller vouches that the
    /// parts came from `log_entries`/`stab_gap` of a table built under the
    /// same configuration; nothing is recomputed or checked here.
    pub fn from_parts(
        log_entries: Vec<(LatticeVector, f64)>,
        stab_gap: Vec<(LatticeVector, f64)>,
        f0: f64,
        n_stab: usize,
        free_bound: f64,
        q: f64,
        flagged: usize,
    ) -> WeightTable {
        WeightTable {
            log_f: log_entries.into_iter().collect(),
            stab_gap: stab_gap.into_iter().collect(),
            f0,
            n_stab,
            free_bound,
            q,
            flagged,
        }
    }
}

const WEIGHT_TABLE_MAX_N: usize = 60;
const FLAG_REL_GAP: f64 = 0.05;

pub fn weight_table(
    sys: &ConjugateSystem,
    n_stab: usize,
    lambda: f64,
    b: f64,
    cap: usize,
) -> Result<WeightTable> {
    if n_stab < 4 || n_stab > WEIGHT_TABLE_MAX_N {
        return Err(Error::ResourceLimit {
            what: "stabilization depth",
            cap: WEIGHT_TABLE_MAX_N,
            reached: n_stab,
        });
    }
    // Two snapshots of the operator iteration, exact integers.
    let mut m = PointMeasure::dirac_zero(sys.degree());
    let mut snap_prev2: Option<PointMeasure> = None;
    for step in 1..=n_stab {
        m = phi_step(&m, sys);
        if m.len() > cap {
            return Err(Error::ResourceLimit {
                what: "lifted measure atoms",
                cap,
                reached: m.len(),
            });
        }
        if step == n_stab - 2 {
            snap_prev2 = Some(m.clone());
        }
    }
    let snap_prev2 = snap_prev2.expect("n_stab >= 4 guarantees the early snapshot");

    let b_eff = b * (1.0 + 1e-12);
    let log_lambda = lambda.ln();
    // Raw stride-2 estimates over the window, linear scale.
    let mut raw: Vec<(LatticeVector, f64, f64)> = Vec::new();
    for (v, &w) in m.atoms() {
        if sys.pf(v).abs() > b_eff {
            continue;
        }
        let f_n = ((w as f64).ln() - n_stab as f64 * log_lambda).exp();
        let f_p = snap_prev2
            .atoms()
            .get(v)
            .map(|&w2| ((w2 as f64).ln() - (n_stab as f64 - 2.0) * log_lambda).exp())
            .unwrap_or(0.0);
        raw.push((v.clone(), f_n, f_p));
    }
    if raw.is_empty() {
        return Err(Error::EmptyMeasure);
    }

    // Calibrate q by the interior residual itself; golden-section search
    // on a smooth unimodal objective.
    let window = generate_xbar(sys, b, cap)?;
    let objective = |q: f64| -> f64 {
        let table = assemble(&raw, q);
        interior_residual_of(&table, lambda, &window, sys).unwrap_or(f64::INFINITY)
    };
    let q = golden_min(&objective, 0.02, 0.98, 60);
    let log_f = assemble(&raw, q);

    let f0 = log_f[&LatticeVector::zero(sys.degree())].exp();
    let mut stab_gap = HashMap::with_capacity(raw.len());
    let mut flagged = 0usize;
    for (v, f_n, f_p) in &raw {
        let gap = (f_n - f_p).abs();
        if gap > FLAG_REL_GAP * f_n {
            flagged += 1;
        }
        stab_gap.insert(v.clone(), gap);
    }
    Ok(WeightTable {
        log_f,
        stab_gap,
        f0,
        n_stab,
        free_bound: b,
        q,
        flagged,
    })
}

/// Extrapolated log-weights for a given contraction factor.
fn assemble(raw: &[(LatticeVector, f64, f64)], q: f64) -> HashMap<LatticeVector, f64> {
    raw.iter()
        .map(|(v, f_n, f_p)| {
            let ext = (f_n - q * f_p) / (1.0 - q);
            let val = if ext > 0.0 { ext } else { *f_n };
            (v.clone(), val.ln())
        })
        .collect()
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-6 {
            break;
        }
    }
    if fc < fd {
        c
    } else {
        d
    }
}

/// Residual of the eigen equation over certified interior points of the
/// window: points whose every existing in-strip preimage carries a table
/// entry. Fringe points, whose preimage weights are still building up,
/// are excluded; they measure window truncation, not table quality.
#[derive(Debug, Clone, Copy)]
pub struct EigenResidual {
    pub max_relative: f64,
    pub interior_points: usize,
    pub window_points: usize,
}

pub fn eigen_residual(
    table: &WeightTable,
    lambda: f64,
    window: &XBarWindow,
    sys: &ConjugateSystem,
) -> Result<EigenResidual> {
    let log_f: HashMap<LatticeVector, f64> = table
        .sorted_entries()
        .into_iter()
        .map(|(v, f)| (v, f.ln()))
        .collect();
    match residual_over(&log_f, lambda, window, sys) {
        Some((max_relative, interior_points)) => Ok(EigenResidual {
            max_relative,
            interior_points,
            window_points: window.len(),
        }),
        None => Err(Error::WindowTooSmall(
            "no interior point has a fully tabulated preimage neighborhood",
        )),
    }
}

fn interior_residual_of(
    log_f: &HashMap<LatticeVector, f64>,
    lambda: f64,
    window: &XBarWindow,
    sys: &ConjugateSystem,
) -> Option<f64> {
    residual_over(log_f, lambda, window, sys).map(|(r, _)| r)
}

fn residual_over(
    log_f: &HashMap<LatticeVector, f64>,
    lambda: f64,
    window: &XBarWindow,
    sys: &ConjugateSystem,
) -> Option<(f64, usize)> {
    let mut max_rel: f64 = 0.0;
    let mut interior = 0usize;
    for x in &window.points {
        let fx = match log_f.get(x) {
            Some(&l) => l.exp(),
            None => continue,
        };
        let mut s = 0.0;
        let mut all_present = true;
        for &(digit, mult) in DIGITS.iter() {
            let mut shifted = x.clone();
            shifted.coords[0] -= digit;
            let pre = match div_by_beta(&shifted, sys) {
                Some(p) => p,
                None => continue, // no lattice preimage under this digit
            };
            if strip_membership(&pre, sys) == StripVerdict::Outside {
                continue; // the operator pulls no mass from outside
            }
            match log_f.get(&pre) {
                Some(&l) => s += mult as f64 * l.exp(),
                None => {
                    all_present = false;
                    break;
                }
            }
        }
        if !all_present {
            continue;
        }
        interior += 1;
        let rel = ((s / lambda - fx) / fx).abs();
        if rel > max_rel {
            max_rel = rel;
        }
    }
    if interior == 0 {
        None
    } else {
        Some((max_rel, interior))
    }
}

/// One row per nested free window R_n.
#[derive(Debug, Clone, Copy)]
pub struct RnMassRow {
    pub n: usize,
    pub bound: f64,
    /// mu_bar(R_n) from the weight table.
    pub mass: f64,
    /// Table points in the next shell (bound_n, bound_{n+1}].
    pub shell_count: usize,
    /// Shell error diagnostic: shell_count * f0 / ((1/lambda) * mass of
    /// the operator image of the restricted measure).
    pub eps_n: f64,
}

/// Masses of the nested windows and the shell diagnostics; exponential
/// growth of `mass` is the computable face of the lower mass bounds.
pub fn rn_mass_series(
    table: &WeightTable,
    n_max: usize,
    sys: &ConjugateSystem,
    lambda: f64,
) -> Result<Vec<RnMassRow>> {
    let needed = rn_bound(sys, n_max + 1);
    if table.free_bound < needed {
        return Err(Error::WindowExhausted {
            got: table.free_bound,
            needed,
            why: "table must cover R_{n_max+1} for the shell counts",
        });
    }
    let entries = table.sorted_entries();
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let bound = rn_bound(sys, n);
        let bound_next = rn_bound(sys, n + 1);
        let mut mass = 0.0;
        let mut shell = 0usize;
        let mut image_mass = 0.0;
        for (v, f) in &entries {
            let pf = sys.pf(v).abs();
            if pf <= bound {
                mass += f;
                image_mass += f * eval_g_lattice(v, sys) as f64;
            } else if pf <= bound_next {
                shell += 1;
            }
        }
        let denom = image_mass / lambda;
        let eps_n = if denom > 0.0 {
            shell as f64 * table.f0 / denom
        } else {
            f64::INFINITY
        };
        rows.push(RnMassRow {
            n,
            bound,
            mass,
            shell_count: shell,
            eps_n,
        });
    }
    Ok(rows)
}
