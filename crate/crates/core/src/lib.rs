//! Birth-death chains on a finite or truncated state space, the similarity
//! transform that turns their generators into real symmetric tridiagonal
//! operators, exact spectral data for five orthogonal-polynomial rate
//! families, and the classical / quantum evolutions driven by that data.
//!
//! Module map:
//!
//! * [`specfun`] - terminating hypergeometric / basic hypergeometric series,
//!   shifted factorials, and log-scaled products.
//! * [`process`] - rate tables, generator `L`, symmetrized `H`, bidiagonal
//!   factor `A`, stochastic step matrix `K`, and the ground-state weight.
//! * [`families`] - closed-form rates, eigenvalues, polynomials, and norm
//!   constants for the five solvable rate families.
//! * [`spectral`] - orthonormal eigensystems: closed-form assembly and an
//!   independent Sturm-bisection solver.
//! * [`evolve`] - distribution/transition/amplitude evolution in continuous
//!   and discrete time, long-time averages, damped limits, period detection.
//! * [`verify`] - named invariant checks aggregated by the CLI.

// Index loops throughout mirror the dense linear-algebra formulas they
// implement, usually indexing several arrays in lockstep; iterator rewrites
// hide that symmetry. Negated comparisons like `!(x > 0.0)` are deliberate
// NaN-rejecting guards.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dd;
pub mod error;
pub mod evolve;
pub mod families;
pub mod process;
pub mod specfun;
pub mod spectral;
pub mod tolerances;
pub mod verify;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
