//! Named numerical thresholds used across the crate and its test suites.
//!
//! Everything that gates a construction, a solver, or an invariant check is
//! pinned here so the values live in exactly one place.

/// A series numerator counts as a terminating parameter when it lies within
/// this distance of a non-positive integer (or of `q^-m` in the basic case,
/// relative for magnitudes above one).
pub const SERIES_TERMINATION_MATCH: f64 = 1e-9;

/// Entrywise agreement of the bidiagonal factorization `tA * A` with `H`,
/// relative to `max(1, max |H|)`.
pub const FACTORIZATION_REL: f64 = 1e-14;

/// Max-norm budget for `H * phi0_hat` (the ground state is a zero mode).
pub const ZERO_MODE_RESIDUAL: f64 = 1e-12;

/// Entrywise agreement of `Phi^-1 H Phi` with the row-stochastic form,
/// relative to `max(1, max |H|)`.
pub const CONJUGATION_REL: f64 = 1e-12;

/// Log-space agreement of the weight recurrence `phi0(x+1)^2 * D(x+1)` with
/// `phi0(x)^2 * B(x)`.
pub const PHI0_RECURRENCE_LOG: f64 = 1e-13;

/// Stationary vectors built from rate tables rescaled by a common factor
/// must agree entrywise within this bound.
pub const RESCALE_INVARIANCE: f64 = 1e-13;

/// Detailed balance `K(x,y) pi(y) = K(y,x) pi(x)`, entrywise.
pub const DETAILED_BALANCE: f64 = 1e-13;

/// Entrywise agreement of `1 - Phi^-1 K Phi` with `t_S * H`, relative to
/// `max(1, max |H^d|)`.
pub const HD_SCALING_REL: f64 = 1e-13;

/// Difference-equation residual, relative to `max(1, |E(n) * P_n(x)|)`.
pub const DIFFERENCE_EQUATION_REL: f64 = 1e-10;

/// Orthogonality of weighted polynomials, as a normalized Gram deviation.
pub const ORTHOGONALITY: f64 = 1e-10;

/// Reflection symmetry of the symmetric two-rate family at p = 1/2.
pub const REFLECTION_SYMMETRY: f64 = 1e-12;

/// Max-norm eigen-residual `H v - lambda v` for closed-form eigenvectors.
pub const EIGEN_RESIDUAL: f64 = 1e-10;

/// Absolute agreement of closed-form eigenvalues with the bisection solver.
pub const SPECTRUM_MATCH_ABS: f64 = 1e-9;

/// Max-norm agreement of closed-form and numeric eigenvectors after sign
/// alignment.
pub const EIGENVECTOR_MATCH: f64 = 1e-8;

/// Gram-matrix deviation from the identity for eigensystem columns.
pub const GRAM_IDENTITY: f64 = 1e-10;

/// Completeness deviation `sum_n v_n(x) v_n(y) - delta(x,y)`.
pub const COMPLETENESS: f64 = 1e-10;

/// Entrywise spectral reconstruction of `H` (and of `K` in discrete time),
/// relative to `max(1, max |H|)`.
pub const SPECTRAL_RECONSTRUCTION_REL: f64 = 1e-9;

/// Slack allowed on the discrete-time bound `kappa in [-1, 1]`.
pub const KAPPA_SLACK: f64 = 1e-12;

/// Quantum norm conservation `sum_x |Psi(x,y;t)|^2 = 1`.
pub const UNITARITY: f64 = 1e-10;

/// Chapman-Kolmogorov composition of classical transition kernels.
pub const CHAPMAN_KOLMOGOROV: f64 = 1e-10;

/// Discrete-time amplitudes against continuous-time amplitudes at
/// `t = t_S * steps`.
pub const DT_CT_CONSISTENCY: f64 = 1e-12;

/// Classical probabilities may undershoot zero by at most this much.
pub const POSITIVITY_SLACK: f64 = 1e-12;

/// Stationary and initial distributions must sum to one within this.
pub const DISTRIBUTION_SUM: f64 = 1e-12;

/// The leading expansion coefficient of a normalized distribution is one.
pub const EXPANSION_C0: f64 = 1e-12;

/// Dual-route agreement of the squared quantum amplitude (modulus-squared
/// versus the cosine double sum).
pub const PSI_SQUARED_ROUTES: f64 = 1e-11;

/// Bisection interval target for eigenvalues; widened to a few ulps of
/// `|lambda|` when 1e-13 is below representable resolution.
pub const BISECTION_TARGET_ABS: f64 = 1e-13;

/// Pivot magnitude guard inside the Sturm sign-count recurrence.
pub const STURM_PIVOT_GUARD: f64 = 1e-300;

/// Relative eigenvalue gap below which inverse-iteration vectors are
/// re-orthogonalized as a cluster. Each vector's contamination along a
/// neighbour grows like `eps / gap`, so the window is kept wide: the extra
/// Gram-Schmidt passes on already-orthogonal vectors are harmless, while a
/// missed near-degenerate pair would poison every downstream identity.
pub const CLUSTER_GAP_REL: f64 = 1e-3;

/// Default tail mass allowed beyond a truncated state space.
pub const TAIL_TOLERANCE_DEFAULT: f64 = 1e-14;

/// Modes whose closed forms must survive truncation: the boundary-residual
/// estimate for all `n <= CHARLIER_MODE_GUARD` must fall below
/// `CHARLIER_BOUNDARY_RESIDUAL` before truncation stops deepening.
pub const CHARLIER_MODE_GUARD: usize = 16;

/// Target for the estimated eigen-residual induced at the truncation cut.
pub const CHARLIER_BOUNDARY_RESIDUAL: f64 = 1e-12;

/// Largest denominator (and combined lcm) accepted when rationalizing
/// eigenvalue ratios during period detection.
pub const PERIOD_DENOMINATOR_CAP: u64 = 1_000_000;

/// Fraction of the step bound used when no explicit `t_S` is supplied:
/// `t_S = 0.9 / max(B + D)`.
pub const DEFAULT_STEP_FRACTION: f64 = 0.9;

/// Agreement between the closed-form ground norm constant and the one
/// recovered by summing the weights (compared in log scale).
pub const GROUND_NORM_REL: f64 = 1e-12;

/// Eigenvalue interlacing slack for the leading principal submatrix.
pub const INTERLACING_SLACK: f64 = 1e-10;
