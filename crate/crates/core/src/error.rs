//! Error type shared by every solver.

use thiserror::Error;

/// Failures raised by the special functions, the shell model and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("argument out of domain: {0}")]
    Domain(String),
    /// The evaluation point sits on (or numerically next to) a pole.
    #[error("too close to a pole: {0}")]
    PoleProximity(String),
    /// The normalizing Bessel function `J_n(k xi)` vanishes; shift `xi`.
    #[error("J_{n}({x}) is numerically zero")]
    BesselZero { n: i32, x: f64 },
    /// Two branches cannot be told apart at the current resolution.
    #[error("ambiguous branch assignment near k_oL = {0}")]
    BranchAmbiguity(f64),
    /// The requested band gap does not exist.
    #[error("no band gap: {0}")]
    NoGap(String),
    /// A closed-form expression divides by zero.
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),
    /// A closed-form expression takes the square root of a negative number.
    #[error("negative radicand: {0}")]
    DegenerateRadicand(String),
    /// A bracketing search found no sign change.
    #[error("no root found: {0}")]
    NoRootFound(String),
    /// Physical parameters violate a model invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
