//! Birth-death rate tables on a finite window and the operators built from
//! them: the probability-flow generator, its symmetric similarity transform,
//! the square-root factor, the zero-row-sum dual form, and the discrete-time
//! step kernel.
//!
//! Construction order is chosen so that conservation laws hold bitwise, not
//! just to rounding: generator columns sum to exactly 0.0 and step-kernel
//! columns to exactly 1.0 when off-diagonal entries are accumulated before
//! the diagonal (see `column_sum`). Identities that genuinely involve
//! rounding (similarity, factorization) are checked to tolerance in
//! [`crate::verify`].

use crate::error::Error;
use crate::specfun::LogScaled;
use crate::tolerances::{CHARLIER_BOUNDARY_RESIDUAL, DEFAULT_STEP_FRACTION};
use crate::Result;

/// The index window `0..=top` a process lives on, and how it arose.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateSpace {
    /// Intrinsically finite: the top birth rate vanishes by construction.
    Finite { n_max: usize },
    /// A reflecting cut of an unbounded lattice, carrying the bound on the
    /// stationary mass that was discarded beyond the cut.
    Truncated {
        x_max: usize,
        declared_tail_mass: f64,
    },
}

impl StateSpace {
    /// Highest state index.
    pub fn top(&self) -> usize {
        match *self {
            StateSpace::Finite { n_max } => n_max,
            StateSpace::Truncated { x_max, .. } => x_max,
        }
    }

    /// Number of states, `top + 1`.
    pub fn len(&self) -> usize {
        self.top() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// How time advances: a continuous flow or fixed stochastic steps of
/// length `t_s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeKind {
    Continuous,
    Discrete { t_s: f64 },
}

/// Validated per-state birth and death rates on a window.
///
/// Invariants enforced at construction: `death[0] == 0`, `birth[top] == 0`
/// (reflecting ends), every interior rate strictly positive and finite.
#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    birth: Vec<f64>,
    death: Vec<f64>,
    space: StateSpace,
}

impl RateTable {
    pub fn new(birth: Vec<f64>, death: Vec<f64>, space: StateSpace) -> Result<RateTable> {
        let n = space.len();
        if n < 2 {
            return Err(Error::ParamOutOfRange {
                context: "rate table",
                name: "states",
                requirement: ">= 2",
                value: n as f64,
            });
        }
        if birth.len() != n || death.len() != n {
            return Err(Error::ParamOutOfRange {
                context: "rate table",
                name: "rate vector length",
                requirement: "match state count",
                value: birth.len().min(death.len()) as f64,
            });
        }
        if death[0] != 0.0 {
            return Err(Error::ParamOutOfRange {
                context: "rate table",
                name: "death[0]",
                requirement: "= 0",
                value: death[0],
            });
        }
        if birth[n - 1] != 0.0 {
            return Err(Error::ParamOutOfRange {
                context: "rate table",
                name: "birth[top]",
                requirement: "= 0",
                value: birth[n - 1],
            });
        }
        for &b in &birth[..n - 1] {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::ParamOutOfRange {
                    context: "rate table",
                    name: "birth",
                    requirement: "> 0 and finite below the top state",
                    value: b,
                });
            }
        }
        for &d in &death[1..] {
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::ParamOutOfRange {
                    context: "rate table",
                    name: "death",
                    requirement: "> 0 and finite above state 0",
                    value: d,
                });
            }
        }
        Ok(RateTable {
            birth,
            death,
            space,
        })
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn top(&self) -> usize {
        self.space.top()
    }

    pub fn birth(&self, x: usize) -> f64 {
        self.birth[x]
    }

    pub fn death(&self, x: usize) -> f64 {
        self.death[x]
    }

    pub fn births(&self) -> &[f64] {
        &self.birth
    }

    pub fn deaths(&self) -> &[f64] {
        &self.death
    }

    /// Largest total exit rate `max_x (B(x) + D(x))`.
    pub fn max_total_rate(&self) -> f64 {
        self.birth
            .iter()
            .zip(&self.death)
            .map(|(b, d)| b + d)
            .fold(0.0, f64::max)
    }

    /// Default stochastic step length: a fixed fraction of the stability
    /// bound `1 / max_x (B(x) + D(x))`.
    pub fn default_step(&self) -> f64 {
        DEFAULT_STEP_FRACTION / self.max_total_rate()
    }

    /// Uniformly rescale all rates by `factor > 0` (a pure change of time
    /// unit; eigenvectors are unaffected and eigenvalues scale by `factor`).
    pub fn scaled(&self, factor: f64) -> Result<RateTable> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::ParamOutOfRange {
                context: "rate table",
                name: "rate_scale",
                requirement: "> 0 and finite",
                value: factor,
            });
        }
        RateTable::new(
            self.birth.iter().map(|b| b * factor).collect(),
            self.death.iter().map(|d| d * factor).collect(),
            self.space,
        )
    }
}

/// A real tridiagonal matrix; `upper[x]` is entry `(x, x+1)` and `lower[x]`
/// is entry `(x+1, x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    upper: Vec<f64>,
    lower: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, upper: Vec<f64>, lower: Vec<f64>) -> TridiagonalMatrix {
        assert_eq!(upper.len() + 1, diag.len());
        assert_eq!(lower.len() + 1, diag.len());
        TridiagonalMatrix { diag, upper, lower }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j == i + 1 {
            self.upper[i]
        } else if i == j + 1 {
            self.lower[j]
        } else {
            0.0
        }
    }

    /// Upper and lower off-diagonals are bitwise identical.
    pub fn is_bitwise_symmetric(&self) -> bool {
        self.upper
            .iter()
            .zip(&self.lower)
            .all(|(u, l)| u.to_bits() == l.to_bits())
    }

    /// Column sum with the off-diagonal entries accumulated first, then the
    /// diagonal. With the construction order used by [`build_generator`] and
    /// [`build_step_kernel`] this cancellation is exact in IEEE arithmetic,
    /// so conserved column sums come out bitwise equal to 0.0 and 1.0.
    pub fn column_sum(&self, j: usize) -> f64 {
        let n = self.n();
        let mut s = 0.0;
        if j > 0 {
            s += self.upper[j - 1];
        }
        if j + 1 < n {
            s += self.lower[j];
        }
        s + self.diag[j]
    }

    /// Row sum, off-diagonal entries first (see [`Self::column_sum`]).
    pub fn row_sum(&self, i: usize) -> f64 {
        let n = self.n();
        let mut s = 0.0;
        if i > 0 {
            s += self.lower[i - 1];
        }
        if i + 1 < n {
            s += self.upper[i];
        }
        s + self.diag[i]
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.lower[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// Dense row-major copy, for small-window checks and test oracles.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.entry(i, j)).collect())
            .collect()
    }
}

/// Probability-flow generator: `d/dt P = L P` columnwise, with
/// `L(y+1, y) = B(y)`, `L(y-1, y) = D(y)`, `L(y, y) = -(B(y) + D(y))`.
/// Columns sum to exactly 0.0 under [`TridiagonalMatrix::column_sum`].
pub fn build_generator(rates: &RateTable) -> TridiagonalMatrix {
    let n = rates.len();
    let diag = (0..n).map(|y| -(rates.birth(y) + rates.death(y))).collect();
    let lower = (0..n - 1).map(|y| rates.birth(y)).collect();
    let upper = (0..n - 1).map(|y| rates.death(y + 1)).collect();
    TridiagonalMatrix::new(diag, upper, lower)
}

/// Symmetric non-negative form: diagonal `B(x) + D(x)`, off-diagonal
/// `-sqrt(B(x) D(x+1))`. Same spectrum as `-L`; orthonormal eigenvectors.
pub fn build_hamiltonian(rates: &RateTable) -> TridiagonalMatrix {
    let n = rates.len();
    let diag = (0..n).map(|x| rates.birth(x) + rates.death(x)).collect();
    let off: Vec<f64> = (0..n - 1)
        .map(|x| -(rates.birth(x) * rates.death(x + 1)).sqrt())
        .collect();
    TridiagonalMatrix::new(diag, off.clone(), off)
}

/// Upper-bidiagonal square-root factor `A` with `A(x, x) = sqrt(B(x))` and
/// `A(x, x+1) = -sqrt(D(x+1))`, so that `A^T A` reproduces
/// [`build_hamiltonian`] and positive semi-definiteness is structural.
pub fn build_root_factor(rates: &RateTable) -> TridiagonalMatrix {
    let n = rates.len();
    let diag = (0..n).map(|x| rates.birth(x).sqrt()).collect();
    let upper = (0..n - 1).map(|x| -rates.death(x + 1).sqrt()).collect();
    TridiagonalMatrix::new(diag, upper, vec![0.0; n - 1])
}

/// The similarity transform of the symmetric form whose rows sum to zero:
/// diagonal `B(x) + D(x)`, entry `(x, x+1) = -B(x)`, entry `(x, x-1) = -D(x)`.
/// Built directly from the rates so the zero row sums are bitwise exact;
/// agreement with the conjugated symmetric form is a tolerance check.
pub fn build_dual_hamiltonian(rates: &RateTable) -> TridiagonalMatrix {
    let n = rates.len();
    let diag = (0..n).map(|x| rates.birth(x) + rates.death(x)).collect();
    let upper = (0..n - 1).map(|x| -rates.birth(x)).collect();
    let lower = (0..n - 1).map(|x| -rates.death(x + 1)).collect();
    TridiagonalMatrix::new(diag, upper, lower)
}

/// One-step stochastic kernel `K = I + t_s L`: columns sum to exactly 1.0
/// under [`TridiagonalMatrix::column_sum`]. Requires `0 < t_s` and
/// `t_s * max_x (B(x) + D(x)) <= 1` so every entry stays a probability.
pub fn build_step_kernel(rates: &RateTable, t_s: f64) -> Result<TridiagonalMatrix> {
    let product = t_s * rates.max_total_rate();
    if !(t_s > 0.0 && t_s.is_finite()) || !(product <= 1.0) {
        return Err(Error::InvalidTimescale { product });
    }
    let n = rates.len();
    let diag = (0..n)
        .map(|y| 1.0 - (t_s * rates.birth(y) + t_s * rates.death(y)))
        .collect();
    let lower = (0..n - 1).map(|y| t_s * rates.birth(y)).collect();
    let upper = (0..n - 1).map(|y| t_s * rates.death(y + 1)).collect();
    Ok(TridiagonalMatrix::new(diag, upper, lower))
}

/// Discrete-time symmetric form: exactly `t_s` times [`build_hamiltonian`],
/// entry by entry. Its spectrum is `t_s` times the continuous one, and
/// `I - K` conjugated symmetrically agrees with it to rounding.
pub fn build_discrete_hamiltonian(rates: &RateTable, t_s: f64) -> Result<TridiagonalMatrix> {
    let product = t_s * rates.max_total_rate();
    if !(t_s > 0.0 && t_s.is_finite()) || !(product <= 1.0) {
        return Err(Error::InvalidTimescale { product });
    }
    let h = build_hamiltonian(rates);
    let scale = |v: &[f64]| v.iter().map(|e| t_s * e).collect::<Vec<f64>>();
    Ok(TridiagonalMatrix::new(
        scale(h.diag()),
        scale(h.upper()),
        scale(h.lower()),
    ))
}

/// Ground-mode weights: `phi0(x) = sqrt(prod_{y<x} B(y) / D(y+1))` stored in
/// log scale, the normalization `d0^2 = 1 / sum_x phi0(x)^2`, and the
/// stationary distribution `pi(x) = d0^2 phi0(x)^2`.
#[derive(Clone, Debug)]
pub struct WeightVector {
    phi0: Vec<LogScaled>,
    d0_squared: LogScaled,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.phi0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unnormalized ground weight `phi0(x)` (log scale; positive).
    pub fn phi0(&self, x: usize) -> LogScaled {
        self.phi0[x]
    }

    /// Normalization constant `d0^2` (log scale; positive).
    pub fn d0_squared(&self) -> LogScaled {
        self.d0_squared
    }

    /// Stationary probability `pi(x) = d0^2 phi0(x)^2`.
    pub fn pi(&self, x: usize) -> f64 {
        self.d0_squared.mul(self.phi0[x].powi(2)).value()
    }

    pub fn pi_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|x| self.pi(x)).collect()
    }

    /// Unit-norm ground mode `d0 * phi0(x)`, the square root of `pi(x)`.
    pub fn phi0_hat(&self, x: usize) -> f64 {
        self.d0_squared
            .sqrt()
            .expect("d0^2 is positive")
            .mul(self.phi0[x])
            .value()
    }

    pub fn phi0_hat_vec(&self) -> Vec<f64> {
        (0..self.len()).map(|x| self.phi0_hat(x)).collect()
    }
}

/// log(sum exp(l)) without overflow.
fn log_sum_exp(logs: &[f64]) -> f64 {
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

/// Build the ground-mode weights from a rate table.
pub fn build_weights(rates: &RateTable) -> WeightVector {
    let n = rates.len();
    let mut log_phi0 = Vec::with_capacity(n);
    let mut acc = 0.0f64;
    log_phi0.push(0.0);
    for x in 0..n - 1 {
        acc += 0.5 * (rates.birth(x).ln() - rates.death(x + 1).ln());
        log_phi0.push(acc);
    }
    let log_norm = log_sum_exp(&log_phi0.iter().map(|l| 2.0 * l).collect::<Vec<f64>>());
    WeightVector {
        phi0: log_phi0
            .iter()
            .map(|&l| LogScaled::from_log(l, 1))
            .collect(),
        d0_squared: LogScaled::from_log(-log_norm, 1),
    }
}

/// Choose a reflecting cut `x_max` for an unbounded lattice.
///
/// The cut is accepted when (a) the geometric bound on the stationary mass
/// beyond the window is at most `tail_tolerance`, and (b) the boundary
/// residual `mode_residual(n, x_max + 1)` of every retained closed-form mode
/// `n <= mode_guard` is below the certification threshold, so the cut is
/// invisible to those modes at working precision. The search starts from a
/// rate-informed floor and grows the window geometrically.
pub fn truncate_space(
    birth: &dyn Fn(usize) -> f64,
    death: &dyn Fn(usize) -> f64,
    mode_residual: &dyn Fn(usize, usize) -> f64,
    mode_guard: usize,
    tail_tolerance: f64,
) -> Result<StateSpace> {
    let floor = 4 * (birth(0).ceil() as usize) + 20;
    let mut x_max = floor;
    let cap = 16_384usize;
    loop {
        if let Some(tail) = tail_bound(birth, death, x_max, tail_tolerance) {
            let modes_ok = (0..=mode_guard)
                .all(|nn| mode_residual(nn, x_max + 1) <= CHARLIER_BOUNDARY_RESIDUAL);
            if modes_ok {
                return Ok(StateSpace::Truncated {
                    x_max,
                    declared_tail_mass: tail,
                });
            }
        }
        x_max += (x_max / 2).max(8);
        if x_max > cap {
            return Err(Error::NonSummable { x_max });
        }
    }
}

/// Geometric tail-mass bound for a cut at `x_max`, if one holds there.
fn tail_bound(
    birth: &dyn Fn(usize) -> f64,
    death: &dyn Fn(usize) -> f64,
    x_max: usize,
    tail_tolerance: f64,
) -> Option<f64> {
    // log pi (unnormalized) by the detailed-balance recurrence
    let mut logs = Vec::with_capacity(x_max + 2);
    let mut acc = 0.0f64;
    logs.push(0.0);
    for x in 0..=x_max {
        let (b, d) = (birth(x), death(x + 1));
        if !(b > 0.0 && d > 0.0) {
            return None;
        }
        acc += b.ln() - d.ln();
        logs.push(acc);
    }
    let ratio = birth(x_max + 1) / death(x_max + 2);
    if !(ratio < 0.5) {
        return None;
    }
    let log_window = log_sum_exp(&logs[..=x_max]);
    // mass beyond the cut <= pi(x_max+1) / (1 - ratio)
    let log_tail = logs[x_max + 1] - (1.0 - ratio).ln();
    let tail = (log_tail - log_window).exp();
    if tail <= tail_tolerance {
        Some(tail)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_rates() -> RateTable {
        // 4 states, asymmetric rates
        RateTable::new(
            vec![2.0, 1.5, 0.5, 0.0],
            vec![0.0, 1.0, 2.5, 3.0],
            StateSpace::Finite { n_max: 3 },
        )
        .unwrap()
    }

    #[test]
    fn validation_rejects_bad_tables() {
        let sp = StateSpace::Finite { n_max: 2 };
        assert!(RateTable::new(vec![1.0, 1.0, 0.0], vec![0.1, 1.0, 1.0], sp).is_err());
        assert!(RateTable::new(vec![1.0, 1.0, 0.5], vec![0.0, 1.0, 1.0], sp).is_err());
        assert!(RateTable::new(vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0], sp).is_err());
        assert!(RateTable::new(vec![1.0, 1.0, 0.0], vec![0.0, -1.0, 1.0], sp).is_err());
        assert!(RateTable::new(vec![1.0, 1.0], vec![0.0, 1.0, 1.0], sp).is_err());
        assert!(RateTable::new(vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0], sp).is_ok());
    }

    #[test]
    fn generator_columns_sum_to_exact_zero() {
        let l = build_generator(&toy_rates());
        for j in 0..l.n() {
            assert_eq!(l.column_sum(j), 0.0, "column {j}");
        }
    }

    #[test]
    fn step_kernel_columns_sum_to_exact_one() {
        let r = toy_rates();
        // also try an awkward irrational step within the stability bound
        for t_s in [
            r.default_step(),
            0.17 / r.max_total_rate(),
            1.0 / r.max_total_rate(),
        ] {
            let k = build_step_kernel(&r, t_s).unwrap();
            for j in 0..k.n() {
                assert_eq!(k.column_sum(j), 1.0, "t_s {t_s}, column {j}");
            }
        }
    }

    #[test]
    fn step_kernel_rejects_oversized_steps() {
        let r = toy_rates();
        let too_big = 1.001 / r.max_total_rate();
        assert!(matches!(
            build_step_kernel(&r, too_big),
            Err(Error::InvalidTimescale { .. })
        ));
        assert!(build_step_kernel(&r, 0.0).is_err());
        assert!(build_step_kernel(&r, -0.1).is_err());
    }

    #[test]
    fn dual_hamiltonian_rows_sum_to_exact_zero() {
        let h = build_dual_hamiltonian(&toy_rates());
        for i in 0..h.n() {
            assert_eq!(h.row_sum(i), 0.0, "row {i}");
        }
    }

    #[test]
    fn root_factor_reproduces_hamiltonian() {
        let r = toy_rates();
        let a = build_root_factor(&r);
        let h = build_hamiltonian(&r);
        let ad = a.to_dense();
        let n = r.len();
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += ad[k][i] * ad[k][j];
                }
                assert!(
                    (s - h.entry(i, j)).abs() <= 1e-14 * h.diag()[i].abs().max(1.0),
                    "({i},{j})"
                );
            }
        }
    }

    #[test]
    fn hamiltonian_annihilates_ground_mode() {
        let r = toy_rates();
        let w = build_weights(&r);
        let h = build_hamiltonian(&r);
        let residual = h.apply(&w.phi0_hat_vec());
        for (x, v) in residual.iter().enumerate() {
            assert!(v.abs() < 1e-13, "state {x}: {v}");
        }
    }

    #[test]
    fn weights_are_normalized_and_detailed_balanced() {
        let r = toy_rates();
        let w = build_weights(&r);
        let total: f64 = w.pi_vec().iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        for x in 0..r.top() {
            let lhs = r.birth(x) * w.pi(x);
            let rhs = r.death(x + 1) * w.pi(x + 1);
            assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0), "bond {x}");
        }
        // phi0_hat is the square root of pi
        for x in 0..r.len() {
            assert!((w.phi0_hat(x).powi(2) - w.pi(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn rescaling_rates_rescales_spectral_data_only() {
        let r = toy_rates();
        let s = r.scaled(3.7).unwrap();
        let (wr, ws) = (build_weights(&r), build_weights(&s));
        for x in 0..r.len() {
            assert!((wr.pi(x) - ws.pi(x)).abs() < 1e-13);
        }
        let (hr, hs) = (build_hamiltonian(&r), build_hamiltonian(&s));
        for x in 0..r.len() {
            assert!((hs.diag()[x] - 3.7 * hr.diag()[x]).abs() < 1e-13 * hs.diag()[x].max(1.0));
        }
        assert!(r.scaled(0.0).is_err());
        assert!(r.scaled(f64::INFINITY).is_err());
    }

    #[test]
    fn discrete_hamiltonian_is_exact_multiple_of_continuous() {
        let r = toy_rates();
        let t_s = r.default_step();
        let h = build_hamiltonian(&r);
        let hd = build_discrete_hamiltonian(&r, t_s).unwrap();
        for x in 0..r.len() {
            assert_eq!(hd.diag()[x], t_s * h.diag()[x]);
        }
        for x in 0..r.len() - 1 {
            assert_eq!(hd.upper()[x], t_s * h.upper()[x]);
        }
    }

    #[test]
    fn truncation_covers_constant_birth_linear_death() {
        // birth a, death x: stationary weights decay factorially
        let a = 1.0;
        let space = truncation_of_constant_birth(a).unwrap();
        match space {
            StateSpace::Truncated {
                x_max,
                declared_tail_mass,
            } => {
                assert!(x_max >= 24, "window too small: {x_max}");
                assert!(declared_tail_mass <= 1e-14);
            }
            other => panic!("expected truncated space, got {other:?}"),
        }
    }

    fn truncation_of_constant_birth(a: f64) -> Result<StateSpace> {
        truncate_space(&move |_x| a, &|x| x as f64, &|_n, _x| 0.0, 0, 1e-14)
    }

    #[test]
    fn matrix_helpers_are_consistent() {
        let m = TridiagonalMatrix::new(vec![1.0, 2.0, 3.0], vec![-0.5, 0.25], vec![4.0, -1.5]);
        assert_eq!(m.entry(0, 1), -0.5);
        assert_eq!(m.entry(1, 0), 4.0);
        assert_eq!(m.entry(0, 2), 0.0);
        let v = vec![1.0, -2.0, 3.0];
        let got = m.apply(&v);
        let dense = m.to_dense();
        for i in 0..3 {
            let want: f64 = (0..3).map(|j| dense[i][j] * v[j]).sum();
            assert!((got[i] - want).abs() < 1e-15);
        }
        assert!(!m.is_bitwise_symmetric());
        let s = TridiagonalMatrix::new(vec![1.0, 1.0], vec![0.3], vec![0.3]);
        assert!(s.is_bitwise_symmetric());
    }
}
