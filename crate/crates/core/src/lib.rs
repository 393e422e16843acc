//! Computational machinery for a family of Bernoulli convolution
//! parameters: algebraic classification of the base root and its
//! conjugates, exact transfer-operator iteration on integer-weighted
//! difference measures, a cut-and-project window with a certified
//! window/attractor consistency check, the growth constant and limit
//! weights of the lifted operator, the induced successor dynamics on the
//! window with its weight cocycle, and equidistribution diagnostics for
//! the truncated orbit measures.
//!
//! Lattice arithmetic is exact integer arithmetic throughout; floating
//! point enters only through root finding and carries certified error
//! bounds wherever a verdict depends on it. Hot loops run data-parallel
//! under the default `parallel` feature and fall back to sequential twins
//! without it; outputs are bit-identical either way.

pub mod equi;
pub mod error;
pub mod exchange;
pub mod field;
pub mod limit;
pub mod measure;
pub mod par;
pub mod window;

pub use error::{Error, ErrorClass, Result};
pub use field::{
    find_and_classify, parse_polynomial, ConjugateSystem, LatticeVector, MinimalPolynomial,
    StripVerdict,
};
pub use measure::PointMeasure;
pub use window::XBarWindow;
