//! Terminating hypergeometric and basic hypergeometric series, shifted
//! factorials, and log-scaled products.
//!
//! The series evaluators insist on termination: some numerator parameter
//! must be a non-positive integer (ordinary case) or a non-positive integer
//! power `q^-m` (basic case). Terms are generated by the term-ratio
//! recurrence and accumulated in double-double arithmetic: the series of
//! interest alternate in sign and their largest term can exceed the final
//! sum by many orders of magnitude, so doubled precision is what keeps the
//! f64 results meaningful at desk scale (see README for the measured
//! envelope).

use crate::dd::Dd;
use crate::error::Error;
use crate::tolerances::SERIES_TERMINATION_MATCH;
use crate::Result;

/// Parameters of one terminating (basic) hypergeometric series.
///
/// With `q = None` this is an ordinary series with term
/// `prod (a_i)_k / prod (b_j)_k * z^k / k!`; with `q = Some(q)` it is a
/// basic series with term
/// `prod (a_i;q)_k / prod (b_j;q)_k * z^k / (q;q)_k *
/// [(-1)^k q^(k(k-1)/2)]^(1+s-r)`.
///
/// Parameters are held in double-double precision. Derived parameters such
/// as `q^-n` condition the sum far beyond their own rounding error, so they
/// must enter the series with more than f64 accuracy; use the `_dd`
/// constructors when a parameter is computed rather than given.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesParams {
    pub numerators: Vec<Dd>,
    pub denominators: Vec<Dd>,
    pub argument: Dd,
    pub q: Option<Dd>,
}

impl SeriesParams {
    /// Ordinary hypergeometric parameters.
    pub fn ordinary(numerators: Vec<f64>, denominators: Vec<f64>, argument: f64) -> Self {
        Self::ordinary_dd(
            numerators.into_iter().map(Dd::from_f64).collect(),
            denominators.into_iter().map(Dd::from_f64).collect(),
            Dd::from_f64(argument),
        )
    }

    /// Basic hypergeometric parameters in base `q`.
    pub fn basic(numerators: Vec<f64>, denominators: Vec<f64>, q: f64, argument: f64) -> Self {
        Self::basic_dd(
            numerators.into_iter().map(Dd::from_f64).collect(),
            denominators.into_iter().map(Dd::from_f64).collect(),
            Dd::from_f64(q),
            Dd::from_f64(argument),
        )
    }

    /// Ordinary parameters carried in double-double precision.
    pub fn ordinary_dd(numerators: Vec<Dd>, denominators: Vec<Dd>, argument: Dd) -> Self {
        SeriesParams {
            numerators,
            denominators,
            argument,
            q: None,
        }
    }

    /// Basic parameters carried in double-double precision.
    pub fn basic_dd(numerators: Vec<Dd>, denominators: Vec<Dd>, q: Dd, argument: Dd) -> Self {
        SeriesParams {
            numerators,
            denominators,
            argument,
            q: Some(q),
        }
    }
}

/// A nonzero magnitude stored as `sign * exp(log_magnitude)`.
///
/// Stationary weights and norm constants overflow f64 near the top of the
/// supported parameter range; they are assembled and stored in log scale and
/// exponentiated only at the point of use.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogScaled {
    pub log_magnitude: f64,
    pub sign: i8,
}

#[allow(clippy::should_implement_trait)] // `mul` pairs with `value`/`from_value`, not operator syntax
impl LogScaled {
    pub const ONE: LogScaled = LogScaled {
        log_magnitude: 0.0,
        sign: 1,
    };

    /// The zero element: sign 0, log magnitude -inf.
    pub fn zero() -> LogScaled {
        LogScaled {
            log_magnitude: f64::NEG_INFINITY,
            sign: 0,
        }
    }

    pub fn from_value(v: f64) -> LogScaled {
        if v == 0.0 {
            LogScaled::zero()
        } else {
            LogScaled {
                log_magnitude: v.abs().ln(),
                sign: if v > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn from_log(log_magnitude: f64, sign: i8) -> LogScaled {
        debug_assert!((-1..=1).contains(&sign));
        if sign == 0 {
            LogScaled::zero()
        } else {
            LogScaled {
                log_magnitude,
                sign,
            }
        }
    }

    /// The represented value; may overflow to +-inf or underflow to 0.
    pub fn value(self) -> f64 {
        f64::from(self.sign) * self.log_magnitude.exp()
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn mul(self, rhs: LogScaled) -> LogScaled {
        if self.sign == 0 || rhs.sign == 0 {
            LogScaled::zero()
        } else {
            LogScaled {
                log_magnitude: self.log_magnitude + rhs.log_magnitude,
                sign: self.sign * rhs.sign,
            }
        }
    }

    /// Square root of a non-negative magnitude; `None` for negative sign.
    pub fn sqrt(self) -> Option<LogScaled> {
        match self.sign {
            0 => Some(LogScaled::zero()),
            1 => Some(LogScaled {
                log_magnitude: 0.5 * self.log_magnitude,
                sign: 1,
            }),
            _ => None,
        }
    }

    /// Reciprocal; `None` for zero.
    pub fn recip(self) -> Option<LogScaled> {
        if self.sign == 0 {
            None
        } else {
            Some(LogScaled {
                log_magnitude: -self.log_magnitude,
                sign: self.sign,
            })
        }
    }

    pub fn powi(self, k: i32) -> LogScaled {
        if self.sign == 0 {
            return if k == 0 {
                LogScaled::ONE
            } else {
                LogScaled::zero()
            };
        }
        LogScaled {
            log_magnitude: self.log_magnitude * f64::from(k),
            sign: if k % 2 == 0 { 1 } else { self.sign },
        }
    }
}

/// Product of log-scaled factors with Neumaier-compensated log summation,
/// so products of millions of factors lose no more than a couple of ulps.
pub fn log_scaled_product(factors: &[LogScaled]) -> LogScaled {
    let mut sign: i8 = 1;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for f in factors {
        if f.sign == 0 {
            return LogScaled::zero();
        }
        sign *= f.sign;
        let t = sum + f.log_magnitude;
        if sum.abs() >= f.log_magnitude.abs() {
            comp += (sum - t) + f.log_magnitude;
        } else {
            comp += (f.log_magnitude - t) + sum;
        }
        sum = t;
    }
    LogScaled::from_log(sum + comp, sign)
}

/// Shifted factorial `(a)_n = a (a+1) ... (a+n-1)`, with `(a)_0 = 1`.
pub fn shifted_factorial(a: f64, n: u32) -> f64 {
    let mut p = 1.0;
    for k in 0..n {
        p *= a + f64::from(k);
    }
    p
}

/// `(a)_n` in log scale; exact zero when the product hits zero.
pub fn shifted_factorial_log(a: f64, n: u32) -> LogScaled {
    let mut sign: i8 = 1;
    let mut log = 0.0;
    for k in 0..n {
        let f = a + f64::from(k);
        if f == 0.0 {
            return LogScaled::zero();
        }
        if f < 0.0 {
            sign = -sign;
        }
        log += f.abs().ln();
    }
    LogScaled::from_log(log, sign)
}

/// q-shifted factorial `(a;q)_n = (1-a)(1-aq) ... (1-aq^(n-1))`.
pub fn q_shifted_factorial(a: f64, q: f64, n: u32) -> f64 {
    let mut p = 1.0;
    let mut qk = 1.0;
    for _ in 0..n {
        p *= 1.0 - a * qk;
        qk *= q;
    }
    p
}

/// `(a;q)_n` in log scale.
pub fn q_shifted_factorial_log(a: f64, q: f64, n: u32) -> LogScaled {
    let mut sign: i8 = 1;
    let mut log = 0.0;
    let mut qk = 1.0;
    for _ in 0..n {
        let f = 1.0 - a * qk;
        if f == 0.0 {
            return LogScaled::zero();
        }
        if f < 0.0 {
            sign = -sign;
        }
        log += f.abs().ln();
        qk *= q;
    }
    LogScaled::from_log(log, sign)
}

/// Binomial coefficient `C(n, k)` in log scale.
pub fn binomial_log(n: usize, k: usize) -> LogScaled {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut log = 0.0;
    for j in 1..=k {
        log += ((n - k + j) as f64).ln() - (j as f64).ln();
    }
    LogScaled::from_log(log, 1)
}

/// q-binomial coefficient `(q;q)_n / ((q;q)_k (q;q)_(n-k))` in log scale.
pub fn q_binomial_log(n: usize, k: usize, q: f64) -> LogScaled {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    let mut log = 0.0;
    // (1 - q^(n-k+j)) / (1 - q^j) for j = 1..=k
    for j in 1..=k {
        log += (1.0 - q.powi((n - k + j) as i32)).ln() - (1.0 - q.powi(j as i32)).ln();
    }
    LogScaled::from_log(log, 1)
}

/// Smallest m >= 0 with some numerator within tolerance of -m.
fn ordinary_termination(numerators: &[Dd]) -> Option<u32> {
    let mut best: Option<u32> = None;
    for &a in numerators {
        let a = a.to_f64();
        let r = a.round();
        if r <= 0.0 && (a - r).abs() <= SERIES_TERMINATION_MATCH {
            let m = (-r) as u32;
            best = Some(best.map_or(m, |b| b.min(m)));
        }
    }
    best
}

/// Smallest m >= 0 with some numerator within tolerance of q^-m.
/// The match is relative for magnitudes above one, since q^-m itself
/// exceeds any absolute tolerance at desk scale.
fn basic_termination(numerators: &[Dd], q: f64) -> Option<u32> {
    let mut best: Option<u32> = None;
    for &a in numerators {
        let a = a.to_f64();
        if a <= 0.0 {
            continue;
        }
        let m_est = (a.ln() / q.recip().ln()).round();
        if !(0.0..=4096.0).contains(&m_est) {
            continue;
        }
        let m = m_est as u32;
        let target = q.powi(-(m as i32));
        if (a - target).abs() <= SERIES_TERMINATION_MATCH * target.max(1.0) {
            best = Some(best.map_or(m, |b| b.min(m)));
        }
    }
    best
}

/// Terminating ordinary hypergeometric sum `rFs(numerators; denominators; z)`.
///
/// Errors with [`Error::NonTerminating`] when no numerator is a non-positive
/// integer, and with [`Error::DenominatorPole`] when a denominator parameter
/// reaches a non-positive integer before the series terminates.
pub fn hyper_rfs(params: &SeriesParams) -> Result<f64> {
    let m =
        ordinary_termination(&params.numerators).ok_or(Error::NonTerminating { basic: false })?;
    for &b in &params.denominators {
        let bf = b.to_f64();
        let r = bf.round();
        if r <= 0.0 && (bf - r).abs() <= SERIES_TERMINATION_MATCH {
            let pole_term = (-r) as u32 + 1;
            if pole_term <= m {
                return Err(Error::DenominatorPole {
                    parameter: bf,
                    term_index: pole_term,
                    termination_index: m,
                });
            }
        }
    }
    let z = params.argument;
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for k in 0..m {
        let kf = f64::from(k);
        let mut num = z;
        for &a in &params.numerators {
            num = num.mul(a.add_f64(kf));
        }
        let mut den = Dd::from_f64(kf + 1.0);
        for &b in &params.denominators {
            den = den.mul(b.add_f64(kf));
        }
        term = term.mul(num.div(den));
        sum = sum.add(term);
    }
    Ok(sum.to_f64())
}

/// Terminating basic hypergeometric sum `rphis(numerators; denominators; q; z)`,
/// including the `[(-1)^k q^(k(k-1)/2)]^(1+s-r)` convention factor.
pub fn hyper_rphis(params: &SeriesParams) -> Result<f64> {
    let qd = params.q.ok_or(Error::Unsupported {
        context: "hyper_rphis",
        reason: "missing base q",
    })?;
    let q = qd.to_f64();
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::ParamOutOfRange {
            context: "hyper_rphis",
            name: "q",
            requirement: "0 < q < 1",
            value: q,
        });
    }
    let m =
        basic_termination(&params.numerators, q).ok_or(Error::NonTerminating { basic: true })?;
    for &b in &params.denominators {
        let bf = b.to_f64();
        if bf > 0.0 {
            let j_est = (bf.ln() / q.recip().ln()).round();
            if (0.0..=4096.0).contains(&j_est) {
                let j = j_est as u32;
                let target = q.powi(-(j as i32));
                if (bf - target).abs() <= SERIES_TERMINATION_MATCH * target.max(1.0) && j < m {
                    return Err(Error::DenominatorPole {
                        parameter: bf,
                        term_index: j + 1,
                        termination_index: m,
                    });
                }
            }
        }
    }
    let excess = 1 + params.denominators.len() as i32 - params.numerators.len() as i32;
    let z = params.argument;
    let mut qk = Dd::ONE;
    let mut qk1 = qd;
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for _ in 0..m {
        let mut num = z;
        for &a in &params.numerators {
            num = num.mul(Dd::ONE.sub(qk.mul(a)));
        }
        let mut den = Dd::ONE.sub(qk1);
        for &b in &params.denominators {
            den = den.mul(Dd::ONE.sub(qk.mul(b)));
        }
        if excess != 0 {
            let sign = if excess % 2 == 0 { 1.0 } else { -1.0 };
            num = num.mul(qk.powi(excess)).mul_f64(sign);
        }
        term = term.mul(num.div(den));
        sum = sum.add(term);
        qk = qk.mul(qd);
        qk1 = qk1.mul(qd);
    }
    Ok(sum.to_f64())
}
