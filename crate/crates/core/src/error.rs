//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while building or evolving a chain.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A series was asked for without any numerator forcing termination.
    #[error("series does not terminate: no numerator parameter forces a finite sum")]
    NonTerminating {
        /// True when the failing series was a basic (q-) series.
        basic: bool,
    },

    /// A denominator parameter produces a zero factor before the series
    /// terminates.
    #[error("denominator parameter {parameter} hits zero at term {term_index}, before termination at {termination_index}")]
    DenominatorPole {
        parameter: f64,
        term_index: u32,
        termination_index: u32,
    },

    /// A scalar parameter violates its documented range.
    #[error("{context}: {name} must satisfy {requirement}, got {value}")]
    ParamOutOfRange {
        context: &'static str,
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    /// A discrete time step does not satisfy 0 < t_S * max(B+D) < 1.
    #[error("invalid time step: t_S * max(B+D) = {product} must lie strictly inside (0, 1)")]
    InvalidTimescale { product: f64 },

    /// The ground-state weight is not square-summable under truncation.
    #[error("weight is not square-summable: partial sums still grow at the truncation boundary x_max = {x_max}")]
    NonSummable { x_max: usize },

    /// A state or mode index lies outside the state space.
    #[error("{context}: index {index} exceeds maximum {max}")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        max: usize,
    },

    /// A discrete-time eigenvalue left the closed interval [-1, 1].
    #[error("kappa({mode}) = {value} lies outside [-1, 1] beyond slack {slack}")]
    BoundViolation { mode: usize, value: f64, slack: f64 },

    /// An iterative solver failed to converge.
    #[error("{context}: no convergence after {iterations} iterations")]
    ConvergenceFailure {
        context: &'static str,
        iterations: usize,
    },

    /// The operation is not defined for the given family or configuration.
    #[error("{context}: {reason}")]
    Unsupported {
        context: &'static str,
        reason: &'static str,
    },

    /// An initial distribution or state fails its normalization contract.
    #[error("invalid initial vector: {reason} (deviation {deviation})")]
    InvalidInitial {
        reason: &'static str,
        deviation: f64,
    },
}
