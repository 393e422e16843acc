use crate::field::LatticeVector;

/// Failure modes across the pipeline. Variants are grouped by stage so a
/// caller (notably the CLI) can map them onto coarse exit classes without
/// matching every case.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    // ---- algebraic input ----
    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(i64),
    #[error("need degree >= 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("no real root in (1, 2); largest real root found: {0}")]
    NoRootInUnitInterval(f64),
    #[error("root separation {sep:.3e} below safe threshold {threshold:.3e}; conjugates cannot be classified")]
    NumericallyDegenerateRoots { sep: f64, threshold: f64 },
    #[error("conjugate of modulus {modulus} lies within {margin:.3e} of the unit circle")]
    NonHyperbolic { modulus: f64, margin: f64 },
    #[error("no real conjugate of modulus > 1 other than the base root; the construction needs one")]
    NoAdmissibleFreeDirection,
    #[error("free-direction override {0} does not name a real expanding conjugate")]
    BadFreeOverride(usize),

    // ---- resource limits ----
    #[error("{what} exceeded cap of {cap} (reached {reached})")]
    ResourceLimit {
        what: &'static str,
        cap: usize,
        reached: usize,
    },

    // ---- convergence ----
    #[error("{what} did not converge within {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    // ---- window / table consistency ----
    #[error("free bound {given} is below the escape threshold {threshold}; the window would not be closed under pruning")]
    BoundTooSmall { given: f64, threshold: f64 },
    #[error("window bound {got} is smaller than required {needed} ({why})")]
    WindowExhausted { got: f64, needed: f64, why: &'static str },
    #[error("window too small: {0}")]
    WindowTooSmall(&'static str),
    #[error("piece count changed from {first_half} (first half) to {full} (full chain); chain too short to trust")]
    UnstablePieceCount { first_half: usize, full: usize },
    #[error("weight table has no entry for {0:?}")]
    MissingWeight(LatticeVector),
    #[error("need at least {needed} samples, got {got} ({what})")]
    InsufficientSamples {
        what: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("operation requires a one-dimensional real expanding block, found {0}")]
    UnsupportedDimension(String),
    #[error("measure has no atoms")]
    EmptyMeasure,
}

/// Coarse classes used for process exit codes and triage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    NumberField,
    Resource,
    Convergence,
    WindowOrTable,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            NotMonic(_)
            | DegreeTooSmall(_)
            | NoRootInUnitInterval(_)
            | NumericallyDegenerateRoots { .. }
            | NonHyperbolic { .. }
            | NoAdmissibleFreeDirection
            | BadFreeOverride(_) => ErrorClass::NumberField,
            ResourceLimit { .. } => ErrorClass::Resource,
            NoConvergence { .. } => ErrorClass::Convergence,
            BoundTooSmall { .. }
            | WindowExhausted { .. }
            | WindowTooSmall(_)
            | UnstablePieceCount { .. }
            | MissingWeight(_)
            | InsufficientSamples { .. }
            | UnsupportedDimension(_)
            | EmptyMeasure => ErrorClass::WindowOrTable,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
