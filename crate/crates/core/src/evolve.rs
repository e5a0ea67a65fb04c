//! Time evolution driven by a spectral decomposition: classical heat flow,
//! fixed-step Markov chains, unitary quantum walks and their fixed-step
//! counterparts, long-time averages, damped limits, and revival-time
//! detection.
//!
//! Everything here consumes an [`EigenSystem`]; no family formulas appear.
//! Classical kernels use the similarity weights through the ratio
//! `v0(x)/v0(y)` only, which keeps tail states usable far beyond the range
//! where the raw weights would overflow.

use num_complex::Complex64;

use crate::error::Error;
use crate::process::TridiagonalMatrix;
use crate::spectral::{kappa_spectrum, EigenSystem};
use crate::tolerances::{DISTRIBUTION_SUM, EXPANSION_C0, PERIOD_DENOMINATOR_CAP};
use crate::Result;

/// A validated probability vector over the state window.
#[derive(Clone, Debug)]
pub struct InitialDistribution {
    probs: Vec<f64>,
}

impl InitialDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let mut sum = 0.0f64;
        for &p in &probs {
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidInitial {
                    reason: "negative or non-finite probability entry",
                    deviation: p,
                });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > DISTRIBUTION_SUM {
            return Err(Error::InvalidInitial {
                reason: "probabilities do not sum to 1",
                deviation: sum - 1.0,
            });
        }
        Ok(InitialDistribution { probs })
    }

    pub fn point_mass(dim: usize, x: usize) -> Result<Self> {
        if x >= dim {
            return Err(Error::IndexOutOfRange {
                context: "point mass state",
                index: x,
                max: dim - 1,
            });
        }
        let mut probs = vec![0.0; dim];
        probs[x] = 1.0;
        Ok(InitialDistribution { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }
}

/// A validated unit-norm complex state vector.
#[derive(Clone, Debug)]
pub struct InitialState {
    amps: Vec<Complex64>,
}

impl InitialState {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > DISTRIBUTION_SUM {
            return Err(Error::InvalidInitial {
                reason: "squared amplitudes do not sum to 1",
                deviation: norm_sq - 1.0,
            });
        }
        Ok(InitialState { amps })
    }

    pub fn point(dim: usize, x: usize) -> Result<Self> {
        if x >= dim {
            return Err(Error::IndexOutOfRange {
                context: "point state",
                index: x,
                max: dim - 1,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[x] = Complex64::new(1.0, 0.0);
        Ok(InitialState { amps })
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }
}

/// Distribution snapshots on a time grid: `values[ti][x]`.
#[derive(Clone, Debug)]
pub struct DistributionGrid {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

/// Amplitude snapshots on a time grid: `values[ti][x]`.
#[derive(Clone, Debug)]
pub struct AmplitudeGrid {
    pub times: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
}

fn check_state(eigen: &EigenSystem, context: &'static str, x: usize) -> Result<()> {
    if x >= eigen.dim() {
        return Err(Error::IndexOutOfRange {
            context,
            index: x,
            max: eigen.dim() - 1,
        });
    }
    Ok(())
}

fn check_nonnegative_time(context: &'static str, t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::ParamOutOfRange {
            context,
            name: "t",
            requirement: ">= 0",
            value: t,
        });
    }
    Ok(())
}

/// Expansion coefficients `c_n = sum_x v_n(x)/v_0(x) * p0(x)`; `c_0` is
/// checked to equal 1, which every true distribution satisfies identically.
pub fn expansion_coefficients(eigen: &EigenSystem, p0: &InitialDistribution) -> Result<Vec<f64>> {
    assert_eq!(eigen.dim(), p0.dim(), "dimension mismatch");
    let dim = eigen.dim();
    let ground = eigen.vector(0);
    let mut coeffs = Vec::with_capacity(dim);
    for n in 0..dim {
        let vn = eigen.vector(n);
        let c: f64 = (0..dim).map(|x| vn[x] / ground[x] * p0.probs()[x]).sum();
        coeffs.push(c);
    }
    let dev = coeffs[0] - 1.0;
    if dev.abs() > EXPANSION_C0 {
        return Err(Error::InvalidInitial {
            reason: "leading expansion coefficient deviates from 1",
            deviation: dev,
        });
    }
    Ok(coeffs)
}

/// Heat-flow distribution `P(x; t) = v0(x) sum_n c_n e^{-E(n) t} v_n(x)`.
pub fn classical_ct_distribution(
    eigen: &EigenSystem,
    p0: &InitialDistribution,
    times: &[f64],
) -> Result<DistributionGrid> {
    let coeffs = expansion_coefficients(eigen, p0)?;
    let dim = eigen.dim();
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        check_nonnegative_time("classical evolution", t)?;
        let decays: Vec<f64> = (0..dim).map(|n| (-eigen.eigenvalue(n) * t).exp()).collect();
        let mut row = Vec::with_capacity(dim);
        for x in 0..dim {
            let s: f64 = (0..dim)
                .map(|n| coeffs[n] * decays[n] * eigen.vector(n)[x])
                .sum();
            row.push(eigen.vector(0)[x] * s);
        }
        values.push(row);
    }
    Ok(DistributionGrid {
        times: times.to_vec(),
        values,
    })
}

/// Full transition kernel `P(x, y; t)` (probability of `x` at time `t`
/// starting from `y`), indexed `[x][y]`.
pub fn classical_ct_kernel(eigen: &EigenSystem, t: f64) -> Result<Vec<Vec<f64>>> {
    check_nonnegative_time("classical kernel", t)?;
    let dim = eigen.dim();
    let decays: Vec<f64> = (0..dim).map(|n| (-eigen.eigenvalue(n) * t).exp()).collect();
    let ground = eigen.vector(0);
    let mut kernel = vec![vec![0.0; dim]; dim];
    for x in 0..dim {
        for y in 0..dim {
            let s: f64 = (0..dim)
                .map(|n| decays[n] * eigen.vector(n)[x] * eigen.vector(n)[y])
                .sum();
            kernel[x][y] = ground[x] / ground[y] * s;
        }
    }
    Ok(kernel)
}

/// Heat kernel in the self-adjoint gauge,
/// `G(x, y; t) = sum_n e^{-E(n) t} v_n(x) v_n(y)`, indexed `[x][y]`.
/// The probability kernel is `P(x, y; t) = v0(x) G(x, y; t) / v0(y)`; when
/// weights span many orders of magnitude this symmetric form is the one
/// with uniformly small absolute error.
pub fn symmetric_ct_kernel(eigen: &EigenSystem, t: f64) -> Result<Vec<Vec<f64>>> {
    check_nonnegative_time("symmetric kernel", t)?;
    let dim = eigen.dim();
    let decays: Vec<f64> = (0..dim).map(|n| (-eigen.eigenvalue(n) * t).exp()).collect();
    let mut kernel = vec![vec![0.0; dim]; dim];
    for x in 0..dim {
        for y in x..dim {
            let s: f64 = (0..dim)
                .map(|n| decays[n] * eigen.vector(n)[x] * eigen.vector(n)[y])
                .sum();
            kernel[x][y] = s;
            kernel[y][x] = s;
        }
    }
    Ok(kernel)
}

/// Fixed-step distribution `P(x; l) = v0(x) sum_n c_n kappa(n)^l v_n(x)`.
pub fn classical_dt_distribution(
    eigen: &EigenSystem,
    t_s: f64,
    p0: &InitialDistribution,
    steps: &[u64],
) -> Result<DistributionGrid> {
    let kappas = kappa_spectrum(eigen.eigenvalues(), t_s)?;
    let coeffs = expansion_coefficients(eigen, p0)?;
    let dim = eigen.dim();
    let mut values = Vec::with_capacity(steps.len());
    for &ell in steps {
        let powers: Vec<f64> = kappas.iter().map(|k| k.powi(ell as i32)).collect();
        let mut row = Vec::with_capacity(dim);
        for x in 0..dim {
            let s: f64 = (0..dim)
                .map(|n| coeffs[n] * powers[n] * eigen.vector(n)[x])
                .sum();
            row.push(eigen.vector(0)[x] * s);
        }
        values.push(row);
    }
    Ok(DistributionGrid {
        times: steps.iter().map(|&l| l as f64).collect(),
        values,
    })
}

/// Fixed-step transition kernel after `ell` steps, indexed `[x][y]`.
pub fn classical_dt_kernel(eigen: &EigenSystem, t_s: f64, ell: u64) -> Result<Vec<Vec<f64>>> {
    let kappas = kappa_spectrum(eigen.eigenvalues(), t_s)?;
    let dim = eigen.dim();
    let powers: Vec<f64> = kappas.iter().map(|k| k.powi(ell as i32)).collect();
    let ground = eigen.vector(0);
    let mut kernel = vec![vec![0.0; dim]; dim];
    for x in 0..dim {
        for y in 0..dim {
            let s: f64 = (0..dim)
                .map(|n| powers[n] * eigen.vector(n)[x] * eigen.vector(n)[y])
                .sum();
            kernel[x][y] = ground[x] / ground[y] * s;
        }
    }
    Ok(kernel)
}

/// Trajectory `p_0, K p_0, K^2 p_0, ...` up to `max_ell` by repeated
/// application of the one-step kernel; the spectral-free reference route.
pub fn kernel_power_trajectory(
    kernel: &TridiagonalMatrix,
    p0: &InitialDistribution,
    max_ell: u64,
) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(max_ell as usize + 1);
    let mut current = p0.probs().to_vec();
    out.push(current.clone());
    for _ in 0..max_ell {
        current = kernel.apply(&current);
        out.push(current.clone());
    }
    out
}

/// Unitary kernel `Psi(x, y; t) = sum_n e^{-i E(n) t} v_n(x) v_n(y)`,
/// indexed `[x][y]`.
pub fn quantum_ct_kernel(eigen: &EigenSystem, t: f64) -> Vec<Vec<Complex64>> {
    let dim = eigen.dim();
    let phases: Vec<Complex64> = (0..dim)
        .map(|n| {
            let th = eigen.eigenvalue(n) * t;
            Complex64::new(th.cos(), -th.sin())
        })
        .collect();
    let mut kernel = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for x in 0..dim {
        for y in x..dim {
            let s: Complex64 = (0..dim)
                .map(|n| phases[n] * (eigen.vector(n)[x] * eigen.vector(n)[y]))
                .sum();
            kernel[x][y] = s;
            kernel[y][x] = s;
        }
    }
    kernel
}

/// Amplitudes of a single endpoint pair on a time grid.
pub fn quantum_pair_amplitude(
    eigen: &EigenSystem,
    x: usize,
    y: usize,
    times: &[f64],
) -> Result<Vec<Complex64>> {
    check_state(eigen, "amplitude endpoint", x)?;
    check_state(eigen, "amplitude endpoint", y)?;
    let dim = eigen.dim();
    let weights: Vec<f64> = (0..dim)
        .map(|n| eigen.vector(n)[x] * eigen.vector(n)[y])
        .collect();
    Ok(times
        .iter()
        .map(|&t| {
            (0..dim)
                .map(|n| {
                    let th = eigen.eigenvalue(n) * t;
                    Complex64::new(th.cos(), -th.sin()) * weights[n]
                })
                .sum()
        })
        .collect())
}

/// Fixed-step unitary amplitudes: phases advance by `E_d(n) = t_s E(n)` per
/// step, so step `l` reproduces continuous time `t_s * l`.
pub fn quantum_dt_pair_amplitude(
    eigen: &EigenSystem,
    t_s: f64,
    x: usize,
    y: usize,
    steps: &[u64],
) -> Result<Vec<Complex64>> {
    kappa_spectrum(eigen.eigenvalues(), t_s)?;
    check_state(eigen, "amplitude endpoint", x)?;
    check_state(eigen, "amplitude endpoint", y)?;
    let dim = eigen.dim();
    let discrete: Vec<f64> = (0..dim).map(|n| t_s * eigen.eigenvalue(n)).collect();
    let weights: Vec<f64> = (0..dim)
        .map(|n| eigen.vector(n)[x] * eigen.vector(n)[y])
        .collect();
    Ok(steps
        .iter()
        .map(|&ell| {
            (0..dim)
                .map(|n| {
                    let th = discrete[n] * ell as f64;
                    Complex64::new(th.cos(), -th.sin()) * weights[n]
                })
                .sum()
        })
        .collect())
}

/// Evolve a full state vector unitarily over a time grid.
pub fn quantum_ct_state(
    eigen: &EigenSystem,
    psi0: &InitialState,
    times: &[f64],
) -> Result<AmplitudeGrid> {
    assert_eq!(eigen.dim(), psi0.dim(), "dimension mismatch");
    let dim = eigen.dim();
    // mode overlaps <v_n, psi0>
    let overlaps: Vec<Complex64> = (0..dim)
        .map(|n| {
            psi0.amps()
                .iter()
                .zip(eigen.vector(n))
                .map(|(a, v)| a * v)
                .sum()
        })
        .collect();
    let mut values = Vec::with_capacity(times.len());
    for &t in times {
        let mut row = vec![Complex64::new(0.0, 0.0); dim];
        for n in 0..dim {
            let th = eigen.eigenvalue(n) * t;
            let factor = Complex64::new(th.cos(), -th.sin()) * overlaps[n];
            for (ri, vi) in row.iter_mut().zip(eigen.vector(n)) {
                *ri += factor * *vi;
            }
        }
        values.push(row);
    }
    Ok(AmplitudeGrid {
        times: times.to_vec(),
        values,
    })
}

/// `|Psi(x, y; t)|^2` via the modulus of the assembled amplitude.
pub fn quantum_probability_modulus(
    eigen: &EigenSystem,
    x: usize,
    y: usize,
    times: &[f64],
) -> Result<Vec<f64>> {
    Ok(quantum_pair_amplitude(eigen, x, y, times)?
        .into_iter()
        .map(|a| a.norm_sqr())
        .collect())
}

/// `|Psi(x, y; t)|^2` via the expanded cosine double sum
/// `sum_n w_n^2 + 2 sum_{n>m} cos((E(n)-E(m)) t) w_n w_m`,
/// `w_n = v_n(x) v_n(y)`.
pub fn quantum_probability_cosine(
    eigen: &EigenSystem,
    x: usize,
    y: usize,
    times: &[f64],
) -> Result<Vec<f64>> {
    check_state(eigen, "probability endpoint", x)?;
    check_state(eigen, "probability endpoint", y)?;
    let dim = eigen.dim();
    let weights: Vec<f64> = (0..dim)
        .map(|n| eigen.vector(n)[x] * eigen.vector(n)[y])
        .collect();
    let diagonal: f64 = weights.iter().map(|w| w * w).sum();
    Ok(times
        .iter()
        .map(|&t| {
            let mut s = diagonal;
            for n in 1..dim {
                for m in 0..n {
                    let gap = eigen.eigenvalue(n) - eigen.eigenvalue(m);
                    s += 2.0 * (gap * t).cos() * weights[n] * weights[m];
                }
            }
            s
        })
        .collect())
}

/// Long-time average of `|Psi(x, y; t)|^2` for a non-degenerate spectrum:
/// `M(x, y) = sum_n v_n(x)^2 v_n(y)^2`. The output is symmetric bit for bit.
pub fn long_time_average(eigen: &EigenSystem) -> Vec<Vec<f64>> {
    let dim = eigen.dim();
    let squared: Vec<Vec<f64>> = (0..dim)
        .map(|n| eigen.vector(n).iter().map(|v| v * v).collect())
        .collect();
    let mut out = vec![vec![0.0; dim]; dim];
    for x in 0..dim {
        for y in x..dim {
            let s: f64 = (0..dim).map(|n| squared[n][x] * squared[n][y]).sum();
            out[x][y] = s;
            out[y][x] = s;
        }
    }
    out
}

/// Amplitude with every excited mode damped at rate `epsilon`:
/// `v_0(x) v_0(y) + e^{-eps t} * (oscillatory rest)`. As `t` grows this
/// tends to the ground projector entry `v_0(x) v_0(y)`.
pub fn damped_amplitude(
    eigen: &EigenSystem,
    epsilon: f64,
    t: f64,
    x: usize,
    y: usize,
) -> Result<Complex64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::ParamOutOfRange {
            context: "damped evolution",
            name: "epsilon",
            requirement: "> 0",
            value: epsilon,
        });
    }
    check_nonnegative_time("damped evolution", t)?;
    check_state(eigen, "amplitude endpoint", x)?;
    check_state(eigen, "amplitude endpoint", y)?;
    let dim = eigen.dim();
    let mut s = Complex64::new(eigen.vector(0)[x] * eigen.vector(0)[y], 0.0);
    let damp = (-epsilon * t).exp();
    for n in 1..dim {
        let th = eigen.eigenvalue(n) * t;
        let w = eigen.vector(n)[x] * eigen.vector(n)[y];
        s += Complex64::new(th.cos(), -th.sin()) * (damp * w);
    }
    Ok(s)
}

/// Best rational approximation `h/k` with `k <= cap` and absolute error at
/// most `tol`, by continued fractions.
fn rationalize(r: f64, cap: u64, tol: f64) -> Option<(u64, u64)> {
    if !(r > 0.0 && r.is_finite()) {
        return None;
    }
    let (mut h_prev, mut h) = (1u64, r.floor() as u64);
    let (mut k_prev, mut k) = (0u64, 1u64);
    let mut frac = r - r.floor();
    for _ in 0..64 {
        if (r - h as f64 / k as f64).abs() <= tol {
            return Some((h, k));
        }
        if frac <= 1e-15 {
            return None;
        }
        let next = 1.0 / frac;
        let a = next.floor();
        frac = next - a;
        let a = a as u64;
        let h_new = a.checked_mul(h)?.checked_add(h_prev)?;
        let k_new = a.checked_mul(k)?.checked_add(k_prev)?;
        if k_new > cap {
            return None;
        }
        h_prev = h;
        h = h_new;
        k_prev = k;
        k = k_new;
    }
    None
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Smallest time `T` with `E(n) T` a multiple of `2 pi` for every mode, if
/// the spectrum is commensurate (rationalizable with denominators below a
/// cap); `None` otherwise. A candidate is only returned after every phase
/// has been re-verified to land on an integer multiple.
pub fn detect_period(eigenvalues: &[f64]) -> Option<f64> {
    let base = *eigenvalues.iter().find(|&&e| e > 1e-300)?;
    let active: Vec<f64> = eigenvalues
        .iter()
        .copied()
        .filter(|&e| e > 1e-300)
        .collect();

    let mut ratios = Vec::with_capacity(active.len());
    for &e in &active {
        ratios.push(rationalize(e / base, PERIOD_DENOMINATOR_CAP, 1e-9)?);
    }
    let mut lcm = 1u64;
    for &(_, k) in &ratios {
        let g = gcd(lcm, k);
        lcm = lcm.checked_mul(k / g)?;
        if lcm > PERIOD_DENOMINATOR_CAP {
            return None;
        }
    }
    // multiplier m_n = p_n * (lcm / q_n); E(n) * (2 pi lcm / (G base)) is
    // then (m_n / G) full turns
    let mut g_all = 0u64;
    for &(p, k) in &ratios {
        let m = p.checked_mul(lcm / k)?;
        g_all = gcd(g_all, m);
    }
    if g_all == 0 {
        return None;
    }
    let period = 2.0 * std::f64::consts::PI * (lcm / g_all) as f64 / base;

    // reject unless every phase verifiably closes
    for &e in &active {
        let turns = e * period / (2.0 * std::f64::consts::PI);
        if (turns - turns.round()).abs() > 1e-9 * turns.abs().max(1.0) {
            return None;
        }
    }
    Some(period)
}
