//! Algebraic groundwork: the base root beta, its Galois conjugates, the
//! rank-deg lattice Z[beta] in coordinates, and the embeddings into the
//! expanding, free and contracting directions.
//!
//! Everything downstream funnels through three facts established here:
//! the reduction row rewriting beta^deg over the power basis, the
//! classification of conjugates into expanding and contracting blocks with
//! a certified hyperbolicity margin, and (when beta - 1 or beta + 1 is a
//! unit) an exact lattice representative of the strip endpoint, which turns
//! boundary membership questions into integer comparisons.

use nalgebra::DMatrix;
use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Monic integer polynomial, coefficients in descending degree order,
/// `coeffs[0] == 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalPolynomial {
    pub coeffs: Vec<i64>,
}

impl MinimalPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in &self.coeffs {
            acc = acc * z + Complex64::new(c as f64, 0.0);
        }
        acc
    }

    pub fn eval_derivative_complex(&self, z: Complex64) -> Complex64 {
        let deg = self.degree();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &c) in self.coeffs.iter().enumerate().take(deg) {
            let k = (deg - i) as f64;
            acc = acc * z + Complex64::new(c as f64 * k, 0.0);
        }
        acc
    }

    /// p(1); the strip endpoint admits an exact lattice representative
    /// iff this is a unit (+-1).
    pub fn at_one(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    pub fn at_minus_one(&self) -> i64 {
        let deg = self.degree();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| if (deg - i) % 2 == 0 { c } else { -c })
            .sum()
    }
}

impl std::fmt::Display for MinimalPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let deg = self.degree();
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let k = deg - i;
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            match (k, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "x")?,
                (1, m) => write!(f, "{m}x")?,
                (_, 1) => write!(f, "x^{k}")?,
                (_, m) => write!(f, "{m}x^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Validate raw descending coefficients into a `MinimalPolynomial`.
pub fn parse_polynomial(coeffs: &[i64]) -> Result<MinimalPolynomial> {
    if coeffs.len() < 3 {
        return Err(Error::DegreeTooSmall(coeffs.len().saturating_sub(1)));
    }
    if coeffs[0] != 1 {
        return Err(Error::NotMonic(coeffs[0]));
    }
    Ok(MinimalPolynomial {
        coeffs: coeffs.to_vec(),
    })
}

/// One representative per real root or complex-conjugate pair.
#[derive(Debug, Clone, Copy)]
pub struct Conjugate {
    pub value: Complex64,
    pub is_real: bool,
    pub expanding: bool,
}

/// Lattice element of Z[beta] in power-basis coordinates
/// (v = sum coords[i] * beta^i). Arithmetic is exact; coordinate overflow
/// aborts via the workspace-wide overflow checks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    pub coords: SmallVec<[i64; 6]>,
}

impl LatticeVector {
    pub fn zero(deg: usize) -> Self {
        LatticeVector {
            coords: SmallVec::from_elem(0, deg),
        }
    }

    /// The lattice element 1 (the constant).
    pub fn one(deg: usize) -> Self {
        let mut v = Self::zero(deg);
        v.coords[0] = 1;
        v
    }

    pub fn from_slice(c: &[i64]) -> Self {
        LatticeVector {
            coords: SmallVec::from_slice(c),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn neg(&self) -> Self {
        LatticeVector {
            coords: self.coords.iter().map(|&c| -c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.coords.len(), other.coords.len());
        LatticeVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.coords.len(), other.coords.len());
        LatticeVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn norm_l1(&self) -> i64 {
        self.coords.iter().map(|&c| c.abs()).sum()
    }
}

impl std::fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Values of the embeddings at a lattice point, split by dynamical role.
/// `error` bounds the absolute floating error of any single returned value.
#[derive(Debug, Clone)]
pub struct EmbeddedPoint {
    /// One value per strip representative (expanding excluding the free
    /// direction), base root first.
    pub expanding: Vec<Complex64>,
    /// One value per contracting representative.
    pub contracting: Vec<Complex64>,
    /// Value at the designated free (real expanding, non-base) direction.
    pub free: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripVerdict {
    Inside,
    Outside,
    /// Within floating error of the boundary and no exact resolution was
    /// possible. Never returned when the relevant endpoint is a unit.
    Boundary,
}

/// The classified number-field data every other module consumes.
#[derive(Debug, Clone)]
pub struct ConjugateSystem {
    pub poly: MinimalPolynomial,
    /// Representatives: index 0 is beta; the rest are sorted expanding
    /// before contracting, each block by descending modulus.
    pub reps: Vec<Conjugate>,
    /// Indices into `reps` of expanding representatives (starts with 0;
    /// includes the free direction, which is algebraically expanding).
    pub expanding: Vec<usize>,
    /// Expanding representatives that the strip constrains: `expanding`
    /// minus the free direction. Its length is the strip dimension d.
    pub strip_reps: Vec<usize>,
    /// Indices into `reps` of contracting representatives.
    pub contracting: Vec<usize>,
    /// Index into `reps` of the free direction: real, expanding, not beta.
    pub free: usize,
    /// beta^deg = sum reduction[i] * beta^i.
    pub reduction: Vec<i64>,
    /// min over roots of | |z| - 1 |.
    pub hyperbolicity_margin: f64,
    /// Absolute error bound on any root value after polishing.
    pub root_error: f64,
    /// u with (beta - 1) u = 1, exact, when beta - 1 is a unit.
    pub endpoint_unit_minus: Option<LatticeVector>,
    /// w with (beta + 1) w = 1, exact, when beta + 1 is a unit.
    pub endpoint_unit_plus: Option<LatticeVector>,
}

impl ConjugateSystem {
    pub fn degree(&self) -> usize {
        self.poly.degree()
    }

    pub fn beta(&self) -> f64 {
        self.reps[0].value.re
    }

    /// Signed value of the free conjugate.
    pub fn free_value(&self) -> f64 {
        self.reps[self.free].value.re
    }

    pub fn free_modulus(&self) -> f64 {
        self.free_value().abs()
    }

    /// Strip dimension: expanding directions the strip constrains.
    pub fn d(&self) -> usize {
        self.strip_reps.len()
    }

    /// Contracting representatives count.
    pub fn s(&self) -> usize {
        self.contracting.len()
    }

    /// Half-width of the interval/disk at strip representative `j`
    /// (index into `self.strip_reps`): 1 / (|beta_j| - 1).
    pub fn strip_half_width(&self, j: usize) -> f64 {
        1.0 / (self.reps[self.strip_reps[j]].value.norm() - 1.0)
    }

    /// Half-width at the base root, the interval the measures live on.
    pub fn interval_half_width(&self) -> f64 {
        1.0 / (self.beta() - 1.0)
    }

    /// Free values above this cannot return to the window under the
    /// three digit maps: 1 / (|free| - 1).
    pub fn escape_threshold(&self) -> f64 {
        1.0 / (self.free_modulus() - 1.0)
    }

    /// Lattice point whose free coordinate equals exactly n times the
    /// escape threshold, when the shifted base divides n in the
    /// coefficient ring. Such a point sits on the rim of the level-n
    /// free-coordinate restriction, where its float image can land on
    /// either side of the float bound; restrictions resolve it by
    /// lattice identity instead.
    pub fn free_bound_atom(&self, n: i64) -> Option<LatticeVector> {
        if self.free_value() > 0.0 {
            solve_shifted(self, -1, n)
        } else {
            solve_shifted(self, 1, -n)
        }
    }

    /// Largest contracting modulus.
    pub fn contracting_rho(&self) -> f64 {
        self.contracting
            .iter()
            .map(|&i| self.reps[i].value.norm())
            .fold(0.0, f64::max)
    }

    /// The attractor in the primary contracting direction sits inside
    /// a ball of this radius about the origin.
    pub fn attractor_radius(&self) -> f64 {
        1.0 / (1.0 - self.contracting_rho())
    }

    /// Primary contracting representative (largest modulus).
    pub fn contracting_value(&self) -> Complex64 {
        self.reps[self.contracting[0]].value
    }

    pub fn contracting_is_real(&self) -> bool {
        self.reps[self.contracting[0]].is_real
    }

    /// True when the expanding block is exactly {beta, free}, both real;
    /// the 2-dimensional window pictures assume this.
    pub fn expanding_block_is_real_pair(&self) -> bool {
        self.expanding.len() == 2 && self.expanding.iter().all(|&i| self.reps[i].is_real)
    }

    /// Value of the embedding at representative `rep` (index into `reps`).
    pub fn eval_at_rep(&self, v: &LatticeVector, rep: usize) -> Complex64 {
        horner(&v.coords, self.reps[rep].value)
    }

    /// Base-root value pi_e(v).
    pub fn pe(&self, v: &LatticeVector) -> f64 {
        horner(&v.coords, self.reps[0].value).re
    }

    /// Free value pi_f(v).
    pub fn pf(&self, v: &LatticeVector) -> f64 {
        horner(&v.coords, self.reps[self.free].value).re
    }

    /// Primary contracting value pi_c(v).
    pub fn pc(&self, v: &LatticeVector) -> Complex64 {
        horner(&v.coords, self.reps[self.contracting[0]].value)
    }

    /// Absolute floating error bound for any embedding value of `v`.
    pub fn embed_error(&self, v: &LatticeVector) -> f64 {
        // The largest root modulus dominates the growth of every Horner pass.
        let r = self
            .reps
            .iter()
            .map(|c| c.value.norm())
            .fold(1.0, f64::max);
        let mut scale = 0.0_f64;
        for &c in v.coords.iter().rev() {
            scale = scale * r + c.abs() as f64;
        }
        scale.max(1.0) * (self.root_error * self.degree() as f64 + 16.0 * f64::EPSILON)
    }

    /// Exact lattice representative of the positive strip endpoint at
    /// expanding representative `rep`, when one exists: a vector e with
    /// eval_at_rep(e, rep) == +strip half-width, exactly.
    fn endpoint_vector(&self, rep: usize) -> Option<LatticeVector> {
        if !self.reps[rep].is_real {
            return None;
        }
        if self.reps[rep].value.re > 1.0 {
            self.endpoint_unit_minus.clone()
        } else {
            // z < -1: half-width is 1/(|z|-1) = -1/(z+1), realized by -w.
            self.endpoint_unit_plus.as_ref().map(|w| w.neg())
        }
    }
}

fn horner(coords: &[i64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coords.iter().rev() {
        acc = acc * z + Complex64::new(c as f64, 0.0);
    }
    acc
}

/// Multiplication by beta in power-basis coordinates: shift, then fold the
/// top coefficient back through the reduction row. Exact.
pub fn mul_by_beta(v: &LatticeVector, sys: &ConjugateSystem) -> LatticeVector {
    let deg = sys.degree();
    debug_assert_eq!(v.coords.len(), deg);
    let t = v.coords[deg - 1];
    let mut out = LatticeVector::zero(deg);
    out.coords[0] = t * sys.reduction[0];
    for i in 1..deg {
        out.coords[i] = v.coords[i - 1] + t * sys.reduction[i];
    }
    out
}

/// v -> beta*v + digit. Digits are small signed integers.
pub fn apply_digit(v: &LatticeVector, digit: i64, sys: &ConjugateSystem) -> LatticeVector {
    let mut out = mul_by_beta(v, sys);
    out.coords[0] += digit;
    out
}

/// Exact inverse of `mul_by_beta` when it exists in the lattice
/// (w divisible by beta). None otherwise.
pub fn div_by_beta(w: &LatticeVector, sys: &ConjugateSystem) -> Option<LatticeVector> {
    let deg = sys.degree();
    let r0 = sys.reduction[0];
    debug_assert!(r0 != 0);
    if w.coords[0] % r0 != 0 {
        return None;
    }
    let t = w.coords[0] / r0;
    let mut v = LatticeVector::zero(deg);
    v.coords[deg - 1] = t;
    for i in 0..deg - 1 {
        v.coords[i] = w.coords[i + 1] - t * sys.reduction[i + 1];
    }
    Some(v)
}

/// All embedding values at `v`, with a shared error bound.
pub fn embed(v: &LatticeVector, sys: &ConjugateSystem) -> EmbeddedPoint {
    let expanding = sys
        .strip_reps
        .iter()
        .map(|&i| horner(&v.coords, sys.reps[i].value))
        .collect();
    let contracting = sys
        .contracting
        .iter()
        .map(|&i| horner(&v.coords, sys.reps[i].value))
        .collect();
    EmbeddedPoint {
        expanding,
        contracting,
        free: sys.pf(v),
        error: sys.embed_error(v),
    }
}

/// Is v inside the product of expanding intervals/disks (closed)?
/// Ambiguities within floating error are resolved exactly through the
/// endpoint unit when the relevant coordinate is real and the endpoint is
/// a unit; `Boundary` is returned only when exactness is unattainable.
pub fn strip_membership(v: &LatticeVector, sys: &ConjugateSystem) -> StripVerdict {
    membership_over(v, sys, &sys.strip_reps)
}

/// Like `strip_membership`, but also bounding the free coordinate by its
/// own 1 / (|beta_free| - 1). This is the state condition of the finite
/// overlap graph: only points in this box can ever map back to 0.
pub fn box_membership(v: &LatticeVector, sys: &ConjugateSystem) -> StripVerdict {
    membership_over(v, sys, &sys.expanding)
}

fn membership_over(v: &LatticeVector, sys: &ConjugateSystem, reps: &[usize]) -> StripVerdict {
    let err = sys.embed_error(v);
    let mut saw_boundary = false;
    for &rep in reps {
        let bound = 1.0 / (sys.reps[rep].value.norm() - 1.0);
        let val = horner(&v.coords, sys.reps[rep].value);
        let mag = if sys.reps[rep].is_real {
            val.re.abs()
        } else {
            val.norm()
        };
        if mag <= bound - err {
            continue;
        }
        if mag >= bound + err {
            return StripVerdict::Outside;
        }
        // Numerically on the fence at this coordinate.
        match resolve_boundary(v, sys, rep, val.re) {
            Some(true) => continue,
            Some(false) => return StripVerdict::Outside,
            None => saw_boundary = true,
        }
    }
    if saw_boundary {
        StripVerdict::Boundary
    } else {
        StripVerdict::Inside
    }
}

/// Exact comparison |pi_rep(v)| <= half-width via the endpoint vector.
/// Some(true)/Some(false) is a certain answer; None means no exact route.
fn resolve_boundary(
    v: &LatticeVector,
    sys: &ConjugateSystem,
    rep: usize,
    approx_val: f64,
) -> Option<bool> {
    let e = sys.endpoint_vector(rep)?;
    if *v == e || *v == e.neg() {
        return Some(true); // exactly the closed endpoint
    }
    // Sign of half-width - |pi(v)| equals the sign of pi(e -+ v), an
    // embedding value of a nonzero lattice vector; trust it only when it
    // clears its own error bound.
    let w = if approx_val >= 0.0 { e.sub(v) } else { e.add(v) };
    let x = horner(&w.coords, sys.reps[rep].value).re;
    if x.abs() > sys.embed_error(&w) {
        Some(x > 0.0)
    } else {
        None
    }
}

const ROOT_SEPARATION_FLOOR: f64 = 1e-7;
const HYPERBOLICITY_FLOOR: f64 = 1e-8;

/// Find all roots, certify separation and hyperbolicity, classify
/// conjugates, pick the free direction, and precompute the reduction row
/// and exact endpoint units.
///
/// `free_override`, when given, selects among real expanding
/// representatives by index into the canonical `reps` ordering.
pub fn find_and_classify(
    poly: &MinimalPolynomial,
    free_override: Option<usize>,
) -> Result<ConjugateSystem> {
    let deg = poly.degree();
    let roots = polished_roots(poly)?;

    // Pairwise separation over all deg roots.
    let mut sep = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            sep = sep.min((roots[i] - roots[j]).norm());
        }
    }
    if sep < ROOT_SEPARATION_FLOOR {
        return Err(Error::NumericallyDegenerateRoots {
            sep,
            threshold: ROOT_SEPARATION_FLOOR,
        });
    }

    let margin = roots
        .iter()
        .map(|z| (z.norm() - 1.0).abs())
        .fold(f64::INFINITY, f64::min);
    if margin <= HYPERBOLICITY_FLOOR {
        let worst = roots
            .iter()
            .min_by(|a, b| {
                let ka = (a.norm() - 1.0).abs();
                let kb = (b.norm() - 1.0).abs();
                ka.partial_cmp(&kb).unwrap()
            })
            .unwrap();
        return Err(Error::NonHyperbolic {
            modulus: worst.norm(),
            margin,
        });
    }

    let root_error = roots
        .iter()
        .map(|&z| {
            let d = poly.eval_derivative_complex(z).norm();
            poly.eval_complex(z).norm() / d.max(1e-300)
        })
        .fold(0.0, f64::max)
        + 1e-15;

    // Collapse conjugate pairs to representatives with im >= 0.
    let real_tol = 1e-9;
    let mut reps: Vec<Conjugate> = Vec::new();
    for &z in &roots {
        if z.im.abs() <= real_tol {
            reps.push(Conjugate {
                value: Complex64::new(z.re, 0.0),
                is_real: true,
                expanding: z.norm() > 1.0,
            });
        } else if z.im > 0.0 {
            reps.push(Conjugate {
                value: z,
                is_real: false,
                expanding: z.norm() > 1.0,
            });
        }
    }

    // Base root: the real root in (1, 2).
    let beta_pos = reps
        .iter()
        .position(|c| c.is_real && c.value.re > 1.0 && c.value.re < 2.0)
        .ok_or_else(|| {
            let largest = reps
                .iter()
                .filter(|c| c.is_real)
                .map(|c| c.value.re)
                .fold(f64::NEG_INFINITY, f64::max);
            Error::NoRootInUnitInterval(largest)
        })?;

    // Canonical order: beta, then expanding before contracting, each block
    // by descending modulus; ties broken by (re, im) for determinism.
    let beta_rep = reps.remove(beta_pos);
    reps.sort_by_key(|c| {
        (
            !c.expanding,
            std::cmp::Reverse(quantize(c.value.norm())),
            quantize(c.value.re),
            quantize(c.value.im),
        )
    });
    reps.insert(0, beta_rep);

    let expanding: Vec<usize> = (0..reps.len()).filter(|&i| reps[i].expanding).collect();
    let contracting: Vec<usize> = (0..reps.len()).filter(|&i| !reps[i].expanding).collect();
    if contracting.is_empty() {
        return Err(Error::UnsupportedDimension(
            "no contracting conjugate".into(),
        ));
    }

    let free_candidates: Vec<usize> = expanding
        .iter()
        .copied()
        .filter(|&i| i != 0 && reps[i].is_real)
        .collect();
    let free = match free_override {
        Some(idx) => {
            if free_candidates.contains(&idx) {
                idx
            } else {
                return Err(Error::BadFreeOverride(idx));
            }
        }
        None => *free_candidates
            .first()
            .ok_or(Error::NoAdmissibleFreeDirection)?,
    };

    // beta^deg = sum reduction[i] beta^i : negate the trailing coefficients.
    let reduction: Vec<i64> = (0..deg).map(|i| -poly.coeffs[deg - i]).collect();

    let strip_reps: Vec<usize> = expanding.iter().copied().filter(|&i| i != free).collect();
    let mut sys = ConjugateSystem {
        poly: poly.clone(),
        reps,
        expanding,
        strip_reps,
        contracting,
        free,
        reduction,
        hyperbolicity_margin: margin,
        root_error,
        endpoint_unit_minus: None,
        endpoint_unit_plus: None,
    };
    if sys.poly.at_one().abs() == 1 {
        sys.endpoint_unit_minus = solve_shifted_unit(&sys, -1);
    }
    if sys.poly.at_minus_one().abs() == 1 {
        sys.endpoint_unit_plus = solve_shifted_unit(&sys, 1);
    }
    Ok(sys)
}

/// Total-order key for f64 sorting in the canonical rep ordering.
fn quantize(x: f64) -> i64 {
    (x * 1e12).round() as i64
}

/// Solve (beta + shift) u = 1 exactly over the power basis: build the
/// integer matrix of multiplication by beta + shift, solve in floats,
/// round, then verify the product exactly in lattice arithmetic.
fn solve_shifted_unit(sys: &ConjugateSystem, shift: i64) -> Option<LatticeVector> {
    solve_shifted(sys, shift, 1)
}

/// Solve (beta + shift) x = target over the coefficient lattice. The float
/// solve only proposes; integrality and the product are verified exactly.
fn solve_shifted(sys: &ConjugateSystem, shift: i64, target: i64) -> Option<LatticeVector> {
    let deg = sys.degree();
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for j in 0..deg {
        let mut e = LatticeVector::zero(deg);
        e.coords[j] = 1;
        let mut col = mul_by_beta(&e, sys);
        col.coords[j] += shift;
        for i in 0..deg {
            m[(i, j)] = col.coords[i] as f64;
        }
    }
    let rhs =
        nalgebra::DVector::<f64>::from_fn(deg, |i, _| if i == 0 { target as f64 } else { 0.0 });
    let sol = m.lu().solve(&rhs)?;
    let mut u = LatticeVector::zero(deg);
    for i in 0..deg {
        let r = sol[i].round();
        if (sol[i] - r).abs() > 1e-6 || r.abs() > 1e15 {
            return None;
        }
        u.coords[i] = r as i64;
    }
    // Exact verification: (beta + shift) u == target in the lattice.
    let mut prod = mul_by_beta(&u, sys);
    for i in 0..deg {
        prod.coords[i] += shift * u.coords[i];
    }
    let mut want = LatticeVector::zero(deg);
    want.coords[0] = target;
    if prod == want {
        Some(u)
    } else {
        None
    }
}

/// Companion-matrix eigenvalues polished by complex Newton steps.
fn polished_roots(poly: &MinimalPolynomial) -> Result<Vec<Complex64>> {
    let deg = poly.degree();
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -(poly.coeffs[deg - i] as f64);
    }
    let eigs = comp.complex_eigenvalues();
    let mut roots: Vec<Complex64> = Vec::with_capacity(deg);
    for z0 in eigs.iter() {
        let mut z = *z0;
        for _ in 0..60 {
            let p = poly.eval_complex(z);
            let d = poly.eval_derivative_complex(z);
            if d.norm() < 1e-300 {
                break;
            }
            let step = p / d;
            z -= step;
            if step.norm() < 1e-15 * z.norm().max(1.0) {
                break;
            }
        }
        // Snap near-real roots and re-polish on the real line.
        if z.im.abs() < 1e-9 {
            let mut x = z.re;
            for _ in 0..60 {
                let p = poly.eval_complex(Complex64::new(x, 0.0)).re;
                let d = poly.eval_derivative_complex(Complex64::new(x, 0.0)).re;
                if d.abs() < 1e-300 {
                    break;
                }
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            z = Complex64::new(x, 0.0);
        }
        roots.push(z);
    }
    Ok(roots)
}
