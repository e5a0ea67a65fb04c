//! Eigen-decompositions of the symmetrized chain Hamiltonian.
//!
//! Two independent routes produce an [`EigenSystem`]:
//!
//! * [`analytic_eigensystem`] assembles closed-form modes
//!   `d_n * phi0(x) * P(n, x)` in log scale, and
//! * [`numeric_eigensystem`] knows nothing about the closed forms: it runs
//!   Sturm-count bisection plus inverse iteration directly on the matrix.
//!
//! Keeping the second route formula-free is what makes cross-checking the
//! first one meaningful.

use crate::error::Error;
use crate::families::{FamilySpec, SolvableFamily};
use crate::process::{RateTable, StateSpace, TridiagonalMatrix};
use crate::tolerances::{
    BISECTION_TARGET_ABS, CHARLIER_MODE_GUARD, CLUSTER_GAP_REL, KAPPA_SLACK, STURM_PIVOT_GUARD,
};
use crate::Result;

/// How an eigensystem was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralSource {
    Analytic,
    Numeric,
}

/// A full orthonormal eigen-decomposition: `eigenvalues[n]` with unit vector
/// `vectors[n]`, ascending in `n`.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    source: SpectralSource,
}

impl EigenSystem {
    pub fn new(eigenvalues: Vec<f64>, vectors: Vec<Vec<f64>>, source: SpectralSource) -> Self {
        assert_eq!(eigenvalues.len(), vectors.len());
        for v in &vectors {
            assert_eq!(v.len(), eigenvalues.len());
        }
        EigenSystem {
            eigenvalues,
            vectors,
            source,
        }
    }

    /// Dimension of the state window (= number of modes).
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalue(&self, n: usize) -> f64 {
        self.eigenvalues[n]
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn vector(&self, n: usize) -> &[f64] {
        &self.vectors[n]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn source(&self) -> SpectralSource {
        self.source
    }

    /// Smallest positive spectral gap `E(1) - E(0)`.
    pub fn spectral_gap(&self) -> f64 {
        if self.dim() > 1 {
            self.eigenvalues[1] - self.eigenvalues[0]
        } else {
            f64::INFINITY
        }
    }

    /// `max_{n<=m} |<v_n, v_m> - delta_nm|` over the given mode range.
    pub fn orthonormality_defect(&self, modes: usize) -> f64 {
        let m = modes.min(self.dim());
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in i..m {
                let dot: f64 = self.vectors[i]
                    .iter()
                    .zip(&self.vectors[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `max_{x,y} |sum_n v_n(x) v_n(y) - delta_xy|` using all modes.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for x in 0..d {
            for y in x..d {
                let s: f64 = (0..d)
                    .map(|n| self.vectors[n][x] * self.vectors[n][y])
                    .sum();
                let target = if x == y { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// `max_n ||H v_n - E(n) v_n||_inf` over the given mode range.
    pub fn residual_inf(&self, h: &TridiagonalMatrix, modes: usize) -> f64 {
        let m = modes.min(self.dim());
        let mut worst = 0.0f64;
        for n in 0..m {
            worst = worst.max(mode_residual_inf(h, self.eigenvalues[n], &self.vectors[n]));
        }
        worst
    }
}

/// `||H v - lambda v||_inf` for one candidate pair.
pub fn mode_residual_inf(h: &TridiagonalMatrix, lambda: f64, v: &[f64]) -> f64 {
    h.apply(v)
        .iter()
        .zip(v)
        .map(|(hv, vi)| (hv - lambda * vi).abs())
        .fold(0.0f64, f64::max)
}

/// Discrete-time spectrum `kappa(n) = 1 - t_s E(n)`, verified to lie in
/// `[-1, 1]` up to a small slack.
pub fn kappa_spectrum(eigenvalues: &[f64], t_s: f64) -> Result<Vec<f64>> {
    if !(t_s > 0.0 && t_s.is_finite()) {
        return Err(Error::InvalidTimescale { product: t_s });
    }
    let kappas: Vec<f64> = eigenvalues.iter().map(|e| 1.0 - t_s * e).collect();
    for (mode, &k) in kappas.iter().enumerate() {
        if !(-1.0 - KAPPA_SLACK..=1.0 + KAPPA_SLACK).contains(&k) {
            return Err(Error::BoundViolation {
                mode,
                value: k,
                slack: KAPPA_SLACK,
            });
        }
    }
    Ok(kappas)
}

/// Number of modes of the truncated model whose closed forms are certified
/// on the window (boundary-residual criterion at build time).
pub fn certified_modes(space: StateSpace) -> usize {
    match space {
        StateSpace::Finite { n_max } => n_max + 1,
        StateSpace::Truncated { .. } => CHARLIER_MODE_GUARD + 1,
    }
}

/// Assemble the closed-form eigensystem of a family on the window described
/// by `rates`.
///
/// For finite families the modes are exactly the normalized closed forms.
/// For the truncated one, closed forms cover the guarded low modes (each
/// renormalized on the window) and the remaining directions are completed to
/// an orthonormal basis carrying the continued integer spectrum; only the
/// guarded modes are certified against the closed forms.
pub fn analytic_eigensystem(family: &FamilySpec, rates: &RateTable) -> Result<EigenSystem> {
    family.validate()?;
    let dim = rates.len();
    match rates.space() {
        StateSpace::Finite { n_max } => {
            let mut vectors = Vec::with_capacity(dim);
            let mut eigenvalues = Vec::with_capacity(dim);
            for n in 0..=n_max {
                let mut v = Vec::with_capacity(dim);
                for x in 0..=n_max {
                    v.push(family.phi_hat(n, x)?);
                }
                vectors.push(v);
                eigenvalues.push(family.eigenvalue(n));
            }
            Ok(EigenSystem::new(
                eigenvalues,
                vectors,
                SpectralSource::Analytic,
            ))
        }
        StateSpace::Truncated { .. } => {
            let guard = CHARLIER_MODE_GUARD.min(dim - 1);
            let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(dim);
            for n in 0..=guard {
                let mut v = Vec::with_capacity(dim);
                for x in 0..dim {
                    v.push(family.phi_hat(n, x)?);
                }
                let norm = l2_norm(&v);
                if !(norm > 0.5) {
                    return Err(Error::ConvergenceFailure {
                        context: "truncated closed-form mode lost its mass on the window",
                        iterations: n,
                    });
                }
                for c in &mut v {
                    *c /= norm;
                }
                vectors.push(v);
            }
            complete_orthonormal(&mut vectors, dim)?;
            let eigenvalues: Vec<f64> = (0..dim).map(|n| family.eigenvalue(n)).collect();
            Ok(EigenSystem::new(
                eigenvalues,
                vectors,
                SpectralSource::Analytic,
            ))
        }
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    // scale by the peak so near-singular inverse-iteration solves (entries
    // ~1/pivot) cannot overflow the squared sum
    let peak = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if peak == 0.0 || !peak.is_finite() {
        return peak;
    }
    let sum: f64 = v.iter().map(|c| (c / peak) * (c / peak)).sum();
    peak * sum.sqrt()
}

/// Grow `vectors` to a full orthonormal basis of dimension `dim` by
/// twice-reorthogonalized Gram-Schmidt over coordinate candidates. The
/// candidate order (high coordinates first) is deterministic.
fn complete_orthonormal(vectors: &mut Vec<Vec<f64>>, dim: usize) -> Result<()> {
    let have = vectors.len();
    let candidates: Vec<usize> = (have..dim).chain(0..have).collect();
    let mut used = 0usize;
    for &j in &candidates {
        if vectors.len() == dim {
            break;
        }
        used += 1;
        let mut v = vec![0.0; dim];
        v[j] = 1.0;
        for _pass in 0..2 {
            for u in vectors.iter() {
                let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= dot * ui;
                }
            }
        }
        let norm = l2_norm(&v);
        if norm < 1e-3 {
            continue; // nearly dependent candidate; try the next coordinate
        }
        for c in &mut v {
            *c /= norm;
        }
        vectors.push(v);
    }
    if vectors.len() == dim {
        Ok(())
    } else {
        Err(Error::ConvergenceFailure {
            context: "orthonormal completion ran out of candidates",
            iterations: used,
        })
    }
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by Sturm-count
/// bisection and inverse iteration. Deterministic; clustered eigenvalues are
/// re-orthogonalized pairwise.
pub fn numeric_eigensystem(h: &TridiagonalMatrix) -> Result<EigenSystem> {
    assert!(
        h.is_bitwise_symmetric(),
        "numeric eigensystem expects a symmetric matrix"
    );
    let n = h.n();
    let diag = h.diag();
    let off = h.upper();

    // Gershgorin enclosure
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    let spread = (hi - lo).max(1.0);
    lo -= 1e-12 * spread;
    hi += 1e-12 * spread;

    let mut eigenvalues = Vec::with_capacity(n);
    for k in 0..n {
        eigenvalues.push(bisect_kth(diag, off, k, lo, hi)?);
    }

    let mut vectors = Vec::with_capacity(n);
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        vectors.push(inverse_iteration(h, lambda, k)?);
    }

    // Re-orthogonalize within clusters of nearly equal eigenvalues.
    let scale = eigenvalues.iter().fold(1.0f64, |m, e| m.max(e.abs()));
    let mut start = 0;
    for end in 1..=n {
        let boundary =
            end == n || (eigenvalues[end] - eigenvalues[end - 1]).abs() > CLUSTER_GAP_REL * scale;
        if boundary {
            if end - start > 1 {
                orthogonalize_block(&mut vectors, start, end);
            }
            start = end;
        }
    }

    for v in &mut vectors {
        fix_sign(v);
    }
    Ok(EigenSystem::new(
        eigenvalues,
        vectors,
        SpectralSource::Numeric,
    ))
}

/// Number of eigenvalues strictly below `sigma` (Sturm pivot count).
fn sturm_count(diag: &[f64], off: &[f64], sigma: f64) -> usize {
    let mut count = 0;
    let mut pivot = 1.0f64;
    for i in 0..diag.len() {
        let coupling = if i > 0 { off[i - 1] * off[i - 1] } else { 0.0 };
        pivot = diag[i] - sigma - coupling / pivot;
        if pivot.abs() < STURM_PIVOT_GUARD {
            pivot = -STURM_PIVOT_GUARD;
        }
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect_kth(diag: &[f64], off: &[f64], k: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        let width_target = BISECTION_TARGET_ABS.max(4.0 * f64::EPSILON * mid.abs());
        if hi - lo <= width_target {
            return Ok(mid);
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::ConvergenceFailure {
        context: "eigenvalue bisection",
        iterations: 256,
    })
}

/// One eigenvector by inverse iteration; `seed` varies the deterministic
/// start so clustered modes begin independent.
fn inverse_iteration(h: &TridiagonalMatrix, lambda: f64, seed: usize) -> Result<Vec<f64>> {
    let n = h.n();
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i + 3 * seed + 1) as f64).sin())
        .collect();
    normalize(&mut v);
    let scale = h
        .diag()
        .iter()
        .chain(h.upper())
        .fold(1.0f64, |m, x| m.max(x.abs()));
    for iter in 0..8 {
        let w = solve_shifted(h, lambda, &v);
        let norm = l2_norm(&w);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ConvergenceFailure {
                context: "inverse iteration produced a degenerate solve",
                iterations: iter,
            });
        }
        v = w;
        for c in &mut v {
            *c /= norm;
        }
        if mode_residual_inf(h, lambda, &v) <= 64.0 * f64::EPSILON * scale {
            break;
        }
    }
    Ok(v)
}

fn normalize(v: &mut [f64]) {
    let norm = l2_norm(v);
    for c in v.iter_mut() {
        *c /= norm;
    }
}

/// Dense partial-pivoted solve of `(H - lambda I) w = rhs`. The matrix is
/// tiny here, so robustness beats band exploitation.
fn solve_shifted(h: &TridiagonalMatrix, lambda: f64, rhs: &[f64]) -> Vec<f64> {
    let n = h.n();
    let mut a = h.to_dense();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let mut b = rhs.to_vec();
    // nudging a vanished pivot by an *absolute* epsilon would let back
    // substitution overflow; perturb relative to the shifted matrix instead,
    // which bounds the solution by ~1/(eps * scale) while still leaving the
    // solve singular enough for the iteration to converge in one step
    let tiny = f64::EPSILON
        * a.iter()
            .flatten()
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty");
        a.swap(col, piv);
        b.swap(col, piv);
        let mut p = a[col][col];
        if p.abs() < tiny {
            p = tiny.copysign(if p == 0.0 { 1.0 } else { p });
            a[col][col] = p;
        }
        for row in col + 1..n {
            let m = a[row][col] / p;
            if m != 0.0 {
                for j in col..n {
                    a[row][j] -= m * a[col][j];
                }
                b[row] -= m * b[col];
            }
        }
    }
    let mut w = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for j in row + 1..n {
            s -= a[row][j] * w[j];
        }
        w[row] = s / a[row][row];
    }
    w
}

fn orthogonalize_block(vectors: &mut [Vec<f64>], start: usize, end: usize) {
    for i in start..end {
        for _pass in 0..2 {
            for j in start..i {
                let dot: f64 = vectors[j].iter().zip(&vectors[i]).map(|(a, b)| a * b).sum();
                let u = vectors[j].clone();
                for (vi, ui) in vectors[i].iter_mut().zip(&u) {
                    *vi -= dot * ui;
                }
            }
        }
        normalize(&mut vectors[i]);
    }
}

/// Deterministic sign convention: first component positive (falling back to
/// the largest-magnitude component when the first vanishes).
fn fix_sign(v: &mut [f64]) {
    let lead = if v[0] != 0.0 {
        v[0]
    } else {
        *v.iter()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .expect("nonempty")
    };
    if lead < 0.0 {
        for c in v.iter_mut() {
            *c = -*c;
        }
    }
}
