//! Shared oracles and helpers for the integration suites: a dense
//! scaling-and-squaring matrix exponential (independent of the spectral
//! code paths under test), dense matrix algebra, and seeded randomness.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A strictly positive probability vector drawn uniformly and normalized.
pub fn random_distribution(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let u = Uniform::new(0.05f64, 1.0);
    let mut p: Vec<f64> = (0..dim).map(|_| u.sample(rng)).collect();
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    p
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i][j] += aik * b[k][j];
            }
        }
    }
    c
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (&x, &y) in ra.iter().zip(rb) {
            worst = worst.max((x - y).abs());
        }
    }
    worst
}

/// `exp(a t)` by scaling and squaring with a Taylor core.
///
/// The argument is scaled until its 1-norm is below 1/4, the exponential of
/// the scaled matrix is summed term by term until terms fall below 1e-20
/// relative, and the result is squared back up. For generator matrices the
/// squaring phase multiplies column-stochastic factors, which keeps absolute
/// errors near machine level.
pub fn expm_dense(a: &[Vec<f64>], t: f64) -> Vec<Vec<f64>> {
    let n = a.len();
    let norm: f64 = (0..n)
        .map(|j| (0..n).map(|i| (a[i][j] * t).abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm <= 0.25 {
        0
    } else {
        (norm / 0.25).log2().ceil() as u32
    };
    let scale = t / (2.0f64).powi(squarings as i32);
    let b: Vec<Vec<f64>> = a
        .iter()
        .map(|row| row.iter().map(|&v| v * scale).collect())
        .collect();

    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..200 {
        term = matmul(&term, &b);
        for row in &mut term {
            for v in row.iter_mut() {
                *v /= k as f64;
            }
        }
        let mut biggest = 0.0f64;
        for (i, row) in term.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                result[i][j] += v;
                biggest = biggest.max(v.abs());
            }
        }
        if biggest < 1e-20 {
            break;
        }
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

pub fn identity(n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}
