//! The cut-and-project side: the discrete window of lattice points seen
//! through the strip, the attractor in contracting coordinates, and the
//! finite-resolution consistency check that the window is exactly the
//! lattice points whose contracting projection falls inside the attractor.
//!
//! Membership in the attractor R is decided three-valued. Outside is
//! certified by a branch-and-bound lower bound on the distance to R.
//! Inside is certified through an inner-ball certificate: once a disk
//! D(0, r) is shown to be covered by its own depth-k images, every such
//! image of D at every deeper prefix is a subset of R, and covering a
//! neighborhood of a query point by those certified balls proves interior
//! membership. False "inside" verdicts are impossible by construction.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{
    apply_digit, strip_membership, ConjugateSystem, LatticeVector, StripVerdict,
};
use crate::measure::{mu_n, DIGITS};
use crate::par;

/// All window points with free coordinate within `free_bound`, as a set
/// with deterministic iteration order.
#[derive(Debug, Clone)]
pub struct XBarWindow {
    pub points: BTreeSet<LatticeVector>,
    pub free_bound: f64,
    pub generation_depth: usize,
}

impl XBarWindow {
    pub fn contains(&self, v: &LatticeVector) -> bool {
        self.points.contains(v)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Breadth-first closure of {0} under the three digit maps, pruning
/// branches that leave the strip or exceed the free bound. Both prunes are
/// final: expanding and free coordinates grow monotonically once outside
/// their bound, so no pruned branch can re-enter (re-checked in debug
/// builds for a sample of pruned points).
pub fn generate_xbar(sys: &ConjugateSystem, b: f64, cap: usize) -> Result<XBarWindow> {
    let threshold = sys.escape_threshold();
    if b < threshold {
        return Err(Error::BoundTooSmall {
            given: b,
            threshold,
        });
    }
    let b_eff = b * (1.0 + 1e-12);
    let zero = LatticeVector::zero(sys.degree());
    let mut visited: BTreeSet<LatticeVector> = BTreeSet::new();
    visited.insert(zero.clone());
    let mut frontier = vec![zero];
    let mut depth = 0usize;
    #[cfg(debug_assertions)]
    let mut pruned_sample: Vec<LatticeVector> = Vec::new();

    while !frontier.is_empty() {
        depth += 1;
        let children: Vec<Vec<(LatticeVector, bool)>> = par::map(&frontier, |v| {
            DIGITS
                .iter()
                .map(|&(digit, _)| {
                    let child = apply_digit(v, digit, sys);
                    let keep = strip_membership(&child, sys) != StripVerdict::Outside
                        && sys.pf(&child).abs() <= b_eff;
                    (child, keep)
                })
                .collect()
        });
        let mut next = Vec::new();
        for group in children {
            for (child, keep) in group {
                if !keep {
                    #[cfg(debug_assertions)]
                    if pruned_sample.len() < 256 {
                        pruned_sample.push(child);
                    }
                    continue;
                }
                if visited.insert(child.clone()) {
                    next.push(child);
                }
            }
        }
        if visited.len() > cap {
            return Err(Error::ResourceLimit {
                what: "window points",
                cap,
                reached: visited.len(),
            });
        }
        frontier = next;
    }

    #[cfg(debug_assertions)]
    for v in &pruned_sample {
        debug_assert!(
            !reenters_within(v, sys, b_eff, 5),
            "pruned point re-entered the window: {v}"
        );
    }

    Ok(XBarWindow {
        points: visited,
        free_bound: b,
        generation_depth: depth,
    })
}

/// Does any descendant of `v` within `levels` digit applications satisfy
/// both window constraints again? Monotone escape says no.
#[cfg(debug_assertions)]
fn reenters_within(v: &LatticeVector, sys: &ConjugateSystem, b: f64, levels: usize) -> bool {
    let mut layer = vec![v.clone()];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(layer.len() * 3);
        for w in &layer {
            for &(digit, _) in DIGITS.iter() {
                let child = apply_digit(w, digit, sys);
                if strip_membership(&child, sys) != StripVerdict::Outside
                    && sys.pf(&child).abs() <= b
                {
                    return true;
                }
                next.push(child);
            }
        }
        layer = next;
    }
    false
}

/// Certificate that the closed disk (or segment, for a real contracting
/// direction) of `radius` about 0 lies inside the attractor: it is covered
/// by its own images under all depth-`depth` digit compositions. By
/// induction the disk is covered by its depth-k images for every multiple
/// of `depth`, so each of its points is a nested-cylinder limit, hence in
/// the closed attractor.
#[derive(Debug, Clone, Copy)]
pub struct InteriorCertificate {
    pub radius: f64,
    pub depth: usize,
}

/// Depth-K approximation of the attractor in the primary contracting
/// coordinate: all composition images of 0, optionally deduplicated on a
/// grid. Every attractor point lies within `cylinder_radius` of a listed
/// point.
#[derive(Debug, Clone)]
pub struct FractalApprox {
    pub depth: usize,
    pub points: Vec<Complex64>,
    pub cylinder_radius: f64,
    pub is_real: bool,
    /// Largest |p| over the cloud; the attractor radius bound for free.
    pub cloud_radius: f64,
    pub interior: Option<InteriorCertificate>,
}

/// Exact-key deduplication grain for contracting points. Distinct depth-K
/// centers closer than this are numerically identical for our purposes.
const CENTER_KEY_SCALE: f64 = 1e12;

fn center_key(p: Complex64) -> (i64, i64) {
    ((p.re * CENTER_KEY_SCALE).round() as i64, (p.im * CENTER_KEY_SCALE).round() as i64)
}

/// All depth-`k` centers in the primary contracting coordinate,
/// deduplicated by exact key. Grows like 3^k before deduplication but
/// collapses heavily because the digit maps overlap.
fn contracting_centers(sys: &ConjugateSystem, k: usize, cap: usize) -> Result<Vec<Complex64>> {
    let z = sys.contracting_value();
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    for _ in 0..k {
        let mut seen: BTreeSet<(i64, i64)> = BTreeSet::new();
        let mut next = Vec::with_capacity(pts.len() * 3);
        for &p in &pts {
            for &(digit, _) in DIGITS.iter() {
                let q = z * p + Complex64::new(digit as f64, 0.0);
                if seen.insert(center_key(q)) {
                    next.push(q);
                }
            }
        }
        if next.len() > cap {
            return Err(Error::ResourceLimit {
                what: "fractal points",
                cap,
                reached: next.len(),
            });
        }
        pts = next;
    }
    Ok(pts)
}

pub fn fractal_approx(
    sys: &ConjugateSystem,
    k: usize,
    grid_delta: Option<f64>,
    cap: usize,
) -> Result<FractalApprox> {
    if sys.s() != 1 {
        return Err(Error::UnsupportedDimension(format!(
            "{} contracting representatives; attractor machinery expects one",
            sys.s()
        )));
    }
    let z = sys.contracting_value();
    let rho = sys.contracting_rho();
    let is_real = sys.contracting_is_real();
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    for _ in 0..k {
        let mut seen: BTreeSet<(i64, i64)> = BTreeSet::new();
        let mut next = Vec::with_capacity(pts.len() * 3);
        for &p in &pts {
            for &(digit, _) in DIGITS.iter() {
                let q = z * p + Complex64::new(digit as f64, 0.0);
                let key = match grid_delta {
                    Some(delta) => (
                        (q.re / delta).round() as i64,
                        (q.im / delta).round() as i64,
                    ),
                    None => center_key(q),
                };
                if seen.insert(key) {
                    next.push(q);
                }
            }
        }
        if next.len() > cap {
            return Err(Error::ResourceLimit {
                what: "fractal points",
                cap,
                reached: next.len(),
            });
        }
        pts = next;
    }
    // Each cylinder's content stays within rho^K * (attractor radius) of
    // its center; grid snapping compounds to delta/(1-rho) extra.
    let mut cylinder_radius = rho.powi(k as i32) * sys.attractor_radius();
    if let Some(delta) = grid_delta {
        cylinder_radius += delta * std::f64::consts::SQRT_2 / (1.0 - rho);
    }
    let cloud_radius = pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let interior = certify_inner_radius(sys);
    Ok(FractalApprox {
        depth: k,
        points: pts,
        cylinder_radius,
        is_real,
        cloud_radius,
        interior,
    })
}

/// Try to certify an inner disk D(0, r) subset of the attractor by
/// covering it with its own depth-k images D(c_w, rho^k r). Larger radii
/// are preferred; shallow depths are tried first because deeper frontiers
/// only help if the contraction has already separated the centers.
pub fn certify_inner_radius(sys: &ConjugateSystem) -> Option<InteriorCertificate> {
    let rho = sys.contracting_rho();
    let is_real = sys.contracting_is_real();
    for &radius in &[0.9, 0.75, 0.6, 0.45, 0.3, 0.2] {
        for depth in 4..=8 {
            let centers = match contracting_centers(sys, depth, 1 << 20) {
                Ok(c) => c,
                Err(_) => continue,
            };
            let ball = rho.powi(depth as i32) * radius;
            let ok = if is_real {
                segment_covered(-radius, radius, &centers, ball)
            } else {
                disk_covered(Complex64::new(0.0, 0.0), radius, &centers, ball)
            };
            if ok {
                return Some(InteriorCertificate { radius, depth });
            }
        }
    }
    None
}

/// Is the segment [lo, hi] covered by the union of [c - r, c + r]?
/// Exact sweep over merged intervals (real contracting direction).
fn segment_covered(lo: f64, hi: f64, centers: &[Complex64], r: f64) -> bool {
    let mut ivals: Vec<(f64, f64)> = centers.iter().map(|c| (c.re - r, c.re + r)).collect();
    ivals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut reach = lo;
    for (a, b) in ivals {
        if a > reach + 1e-12 {
            return false;
        }
        reach = reach.max(b);
        if reach >= hi - 1e-12 {
            return true;
        }
    }
    reach >= hi - 1e-12
}

/// Is the closed disk B(center, radius) covered by the union of balls
/// B(c, r), c in centers? Quadtree subdivision: a square is settled when
/// it falls outside the disk or fits inside one ball with slack; failure
/// at the finest grain refutes the cover.
fn disk_covered(center: Complex64, radius: f64, centers: &[Complex64], r: f64) -> bool {
    let min_h = radius / 512.0;
    let mut stack = vec![(center.re, center.im, radius)];
    while let Some((cx, cy, h)) = stack.pop() {
        let d_from_center = Complex64::new(cx - center.re, cy - center.im).norm();
        if d_from_center - h * std::f64::consts::SQRT_2 > radius {
            continue; // square entirely outside the disk
        }
        let fits = centers
            .iter()
            .any(|c| Complex64::new(cx - c.re, cy - c.im).norm() <= r - h * std::f64::consts::SQRT_2 - 1e-12);
        if fits {
            continue;
        }
        if h < min_h {
            return false;
        }
        let q = h / 2.0;
        stack.push((cx - q, cy - q, q));
        stack.push((cx + q, cy - q, q));
        stack.push((cx - q, cy + q, q));
        stack.push((cx + q, cy + q, q));
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Inside,
    Outside,
    Uncertain,
}

/// Three-valued attractor membership with the margin that supported the
/// verdict. Inside and outside are certified and survive halving the
/// resolution margin; uncertain is an honest refusal.
#[derive(Debug, Clone, Copy)]
pub struct MembershipVerdict {
    pub verdict: Verdict,
    pub margin: f64,
}

/// Distance from p to the attractor, as a certified (lower, upper) pair.
/// Branch-and-bound over cylinder centers: a depth-k center c bounds all
/// its content within rho^k * attractor_radius, so a frontier node prunes
/// once its optimistic distance exceeds the incumbent.
pub fn attractor_distance(p: Complex64, sys: &ConjugateSystem, resolution: f64) -> (f64, f64) {
    let z = sys.contracting_value();
    let rho = sys.contracting_rho();
    let r_att = sys.attractor_radius();
    let mut frontier = vec![Complex64::new(0.0, 0.0)];
    let mut zk = Complex64::new(1.0, 0.0); // z^depth, digit scale at this depth
    let mut best = p.norm(); // distance to center 0, an upper bound via radius below
    let mut rad = r_att;
    let max_depth = 60;
    for _ in 0..max_depth {
        // Upper bound from current centers; prune against it.
        for c in &frontier {
            let d = (p - c).norm();
            if d < best {
                best = d;
            }
        }
        if rad < resolution || frontier.is_empty() {
            break;
        }
        let keep = best + rad + 1e-12;
        let mut seen: BTreeSet<(i64, i64)> = BTreeSet::new();
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for &c in &frontier {
            if (p - c).norm() > keep {
                continue;
            }
            for &(digit, _) in DIGITS.iter() {
                let q = c + zk * Complex64::new(digit as f64, 0.0);
                if seen.insert(center_key(q)) {
                    next.push(q);
                }
            }
        }
        frontier = next;
        zk *= z;
        rad *= rho;
    }
    ((best - rad).max(0.0), best)
}

/// Collect certified interior balls B(c_w, rho^k * cert.radius) relevant
/// to a neighborhood of p, walking prefixes down to `k_max`. A node is
/// explored only while some descendant ball could still reach the
/// neighborhood.
fn certified_balls_near(
    p: Complex64,
    eps: f64,
    sys: &ConjugateSystem,
    cert: &InteriorCertificate,
    k_max: usize,
) -> Vec<(Complex64, f64)> {
    let z = sys.contracting_value();
    let rho = sys.contracting_rho();
    let r_att = sys.attractor_radius();
    let mut balls = Vec::new();
    let mut frontier = vec![Complex64::new(0.0, 0.0)];
    let mut zk = Complex64::new(1.0, 0.0);
    let mut rk = 1.0; // rho^k
    for _ in 0..=k_max {
        for &c in &frontier {
            let ball_r = rk * cert.radius;
            if (p - c).norm() <= eps + ball_r {
                balls.push((c, ball_r));
            }
        }
        let horizon = eps + rk * (cert.radius + 3.0 * r_att);
        let mut seen: BTreeSet<(i64, i64)> = BTreeSet::new();
        let mut next = Vec::new();
        for &c in &frontier {
            if (p - c).norm() > horizon {
                continue;
            }
            for &(digit, _) in DIGITS.iter() {
                let q = c + zk * Complex64::new(digit as f64, 0.0);
                if seen.insert(center_key(q)) {
                    next.push(q);
                }
            }
        }
        frontier = next;
        zk *= z;
        rk *= rho;
    }
    balls
}

/// Is the eps-ball around p covered by certified interior balls?
fn interior_ball_covered(
    p: Complex64,
    eps: f64,
    sys: &ConjugateSystem,
    cert: &InteriorCertificate,
) -> bool {
    // Deep enough that ball radii resolve eps/64 grains.
    let rho = sys.contracting_rho();
    let k_max = ((eps / 64.0 / cert.radius).ln() / rho.ln()).ceil().max(1.0) as usize + 2;
    let balls = certified_balls_near(p, eps, sys, cert, k_max);
    if balls.is_empty() {
        return false;
    }
    if sys.contracting_is_real() {
        let ivals: Vec<(f64, f64)> = balls.iter().map(|(c, r)| (c.re - r, c.re + r)).collect();
        let mut sorted = ivals;
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut reach = p.re - eps;
        for (a, b) in sorted {
            if a > reach + 1e-15 {
                return false;
            }
            reach = reach.max(b);
        }
        return reach >= p.re + eps - 1e-15;
    }
    // Quadtree cover of the disk B(p, eps) by the collected balls.
    let min_h = eps / 64.0;
    let mut stack = vec![(p.re, p.im, eps)];
    while let Some((cx, cy, h)) = stack.pop() {
        if Complex64::new(cx - p.re, cy - p.im).norm() - h * std::f64::consts::SQRT_2 > eps {
            continue;
        }
        let fits = balls.iter().any(|(c, r)| {
            Complex64::new(cx - c.re, cy - c.im).norm() <= r - h * std::f64::consts::SQRT_2 - 1e-12
        });
        if fits {
            continue;
        }
        if h < min_h {
            return false;
        }
        let q = h / 2.0;
        stack.push((cx - q, cy - q, q));
        stack.push((cx + q, cy - q, q));
        stack.push((cx - q, cy + q, q));
        stack.push((cx + q, cy + q, q));
    }
    true
}

/// Three-valued membership of a contracting-space point in the attractor.
///
/// Outside: either the coarse test against the depth-K cloud
/// (dist > cylinder_radius + eps) or a branch-and-bound refinement
/// certifying dist(p, R) > eps. Inside: the eps-ball around p is covered
/// by certified interior balls, which requires the inner-disk certificate.
/// Anything else stays uncertain.
pub fn r_membership(
    p: Complex64,
    approx: &FractalApprox,
    sys: &ConjugateSystem,
    eps_r: f64,
) -> MembershipVerdict {
    // Coarse outside test straight against the stored cloud.
    let mut d_cloud = f64::INFINITY;
    for c in &approx.points {
        let d = (p - c).norm();
        if d < d_cloud {
            d_cloud = d;
        }
    }
    if d_cloud > approx.cylinder_radius + eps_r {
        return MembershipVerdict {
            verdict: Verdict::Outside,
            margin: d_cloud - approx.cylinder_radius - eps_r,
        };
    }
    // Refined outside test: certified lower bound on dist(p, R).
    let (lo, _hi) = attractor_distance(p, sys, (eps_r / 100.0).min(1e-6));
    if lo > eps_r {
        return MembershipVerdict {
            verdict: Verdict::Outside,
            margin: lo - eps_r,
        };
    }
    if let Some(cert) = &approx.interior {
        if interior_ball_covered(p, eps_r, sys, cert) {
            return MembershipVerdict {
                verdict: Verdict::Inside,
                margin: eps_r,
            };
        }
    }
    MembershipVerdict {
        verdict: Verdict::Uncertain,
        margin: 0.0,
    }
}

/// Everything the consistency check observed, at its stated resolution.
#[derive(Debug, Clone)]
pub struct Condition1Report {
    pub free_bound: f64,
    pub fractal_depth: usize,
    pub eps_r: f64,
    /// Lattice points of the enumeration box passing the strip and free
    /// filters; the population whose verdicts are counted below.
    pub candidates: usize,
    pub inside: usize,
    pub outside: usize,
    pub uncertain: usize,
    /// Candidates certified inside the attractor but absent from the
    /// window. Empty means consistent at this resolution.
    pub counterexamples: Vec<LatticeVector>,
    pub window_size: usize,
    /// No window point's contracting projection was certified outside.
    pub window_never_outside: bool,
    pub consistent: bool,
}

/// Enumerate every lattice point that could satisfy the strip and free
/// constraints, via coordinate bounds pulled back through the inverse
/// root Vandermonde matrix.
fn candidate_box(sys: &ConjugateSystem, b: f64) -> Result<Vec<i64>> {
    let deg = sys.degree();
    // All deg roots, conjugate pairs expanded, in rep order.
    let mut roots: Vec<Complex64> = Vec::with_capacity(deg);
    let mut bounds: Vec<f64> = Vec::with_capacity(deg);
    let r_att = sys.attractor_radius();
    for (i, rep) in sys.reps.iter().enumerate() {
        let bound = if i == sys.free {
            b
        } else if rep.expanding {
            let j = sys.strip_reps.iter().position(|&k| k == i).unwrap();
            sys.strip_half_width(j)
        } else {
            // Candidates farther out are trivially outside the attractor
            // and cannot be counterexamples; one unit of slack keeps the
            // uncertain shell inside the box.
            r_att + 1.0
        };
        roots.push(rep.value);
        bounds.push(bound * (1.0 + 1e-9));
        if !rep.is_real {
            roots.push(rep.value.conj());
            bounds.push(bound * (1.0 + 1e-9));
        }
    }
    debug_assert_eq!(roots.len(), deg);
    let v = DMatrix::<Complex64>::from_fn(deg, deg, |r, c| roots[r].powu(c as u32));
    let vinv = v
        .try_inverse()
        .ok_or_else(|| Error::UnsupportedDimension("singular root Vandermonde".into()))?;
    let mut box_bounds = Vec::with_capacity(deg);
    for i in 0..deg {
        let mut s = 0.0;
        for (j, &bj) in bounds.iter().enumerate() {
            s += vinv[(i, j)].norm() * bj;
        }
        box_bounds.push((s + 1e-9).floor() as i64);
    }
    Ok(box_bounds)
}

/// The finite-resolution test of the window/attractor identity: every
/// strip-and-free admissible lattice point certified inside the attractor
/// must already be a window point.
pub fn condition1_check(
    sys: &ConjugateSystem,
    b: f64,
    k: usize,
    eps_r: f64,
    cap: usize,
) -> Result<Condition1Report> {
    let window = generate_xbar(sys, b, cap)?;
    let approx = fractal_approx(sys, k, None, cap)?;
    condition1_against(sys, &window, &approx, eps_r)
}

/// Same check against caller-supplied window and attractor approximation;
/// the self-test hands in a doctored window.
pub fn condition1_against(
    sys: &ConjugateSystem,
    window: &XBarWindow,
    approx: &FractalApprox,
    eps_r: f64,
) -> Result<Condition1Report> {
    let b = window.free_bound;
    let box_bounds = candidate_box(sys, b)?;
    let deg = sys.degree();

    // Odometer over the integer box, filtered by strip and free bound.
    let mut candidates: Vec<LatticeVector> = Vec::new();
    let mut idx = vec![0i64; deg];
    let mut counters: Vec<i64> = box_bounds.iter().map(|&bi| -bi).collect();
    let b_eff = b * (1.0 + 1e-12);
    'outer: loop {
        idx.copy_from_slice(&counters);
        let v = LatticeVector::from_slice(&idx);
        if sys.pf(&v).abs() <= b_eff && strip_membership(&v, sys) != StripVerdict::Outside {
            candidates.push(v);
        }
        for i in 0..deg {
            counters[i] += 1;
            if counters[i] <= box_bounds[i] {
                continue 'outer;
            }
            counters[i] = -box_bounds[i];
        }
        break;
    }

    let verdicts: Vec<MembershipVerdict> =
        par::map(&candidates, |v| r_membership(sys.pc(v), approx, sys, eps_r));

    let mut inside = 0;
    let mut outside = 0;
    let mut uncertain = 0;
    let mut counterexamples = Vec::new();
    for (v, mv) in candidates.iter().zip(&verdicts) {
        match mv.verdict {
            Verdict::Inside => {
                inside += 1;
                if !window.contains(v) {
                    counterexamples.push(v.clone());
                }
            }
            Verdict::Outside => outside += 1,
            Verdict::Uncertain => uncertain += 1,
        }
    }

    let window_points: Vec<LatticeVector> = window.points.iter().cloned().collect();
    let window_never_outside = par::map(&window_points, |v| {
        r_membership(sys.pc(v), approx, sys, eps_r).verdict != Verdict::Outside
    })
    .into_iter()
    .all(|ok| ok);

    let consistent = counterexamples.is_empty() && window_never_outside;
    Ok(Condition1Report {
        free_bound: b,
        fractal_depth: approx.depth,
        eps_r,
        candidates: candidates.len(),
        inside,
        outside,
        uncertain,
        counterexamples,
        window_size: window.len(),
        window_never_outside,
        consistent,
    })
}

const FIGURE1_MAX_N: usize = 20;

/// The level-n difference cloud in (base, free) coordinates: supports of
/// the difference measure, both embeddings per atom, deduplicated.
pub fn figure1_cloud(sys: &ConjugateSystem, n: usize, cap: usize) -> Result<Vec<(f64, f64)>> {
    if n > FIGURE1_MAX_N {
        return Err(Error::ResourceLimit {
            what: "figure depth",
            cap: FIGURE1_MAX_N,
            reached: n,
        });
    }
    let m = mu_n(n, sys, cap)?;
    let mut pts: Vec<(f64, f64)> = m
        .sorted_atoms()
        .iter()
        .map(|(v, _)| (sys.pe(v), sys.pf(v)))
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    Ok(pts)
}
