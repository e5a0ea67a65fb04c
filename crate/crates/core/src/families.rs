//! Closed-form data for five exactly solvable birth-death models: rates,
//! spectra, orthogonal-polynomial evaluators, norm constants, and ground
//! weights, all driven through the generic series evaluators of
//! [`crate::specfun`].
//!
//! Every quantity here is a pure formula evaluation; the numerically
//! delicate alternating series live behind [`crate::specfun::hyper_rfs`] /
//! [`crate::specfun::hyper_rphis`], and everything prone to overflow is
//! assembled in log scale.

use num_complex::Complex64;

use crate::dd::Dd;
use crate::error::Error;
use crate::process::{self, RateTable, StateSpace};
use crate::specfun::{
    binomial_log, hyper_rfs, hyper_rphis, log_scaled_product, q_binomial_log,
    q_shifted_factorial_log, shifted_factorial_log, LogScaled, SeriesParams,
};
use crate::tolerances::{CHARLIER_MODE_GUARD, SERIES_TERMINATION_MATCH, TAIL_TOLERANCE_DEFAULT};
use crate::Result;

/// One of the five shipped solvable models with validated parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilySpec {
    /// Linear rates `B = p(N-x)`, `D = (1-p)x`; spectrum `n`.
    Krawtchouk { n_max: usize, p: f64 },
    /// Quadratic rates `B = (x+a)(N-x)`, `D = x(b+N-x)`; spectrum `n(n+a+b-1)`.
    Hahn { n_max: usize, a: f64, b: f64 },
    /// Rates quadratic in `q^x`; spectrum `(q^-n - 1)(1 - a b q^(n-1))`.
    QHahn {
        n_max: usize,
        a: f64,
        b: f64,
        q: f64,
    },
    /// Rates quadratic in `q^x`; bounded spectrum `1 - q^n`.
    QuantumQKrawtchouk { n_max: usize, p: f64, q: f64 },
    /// Constant birth `a`, linear death `x` on an unbounded lattice;
    /// spectrum `n`. The only shipped model that needs truncation.
    Charlier { a: f64 },
}

/// How the spectrum grows with the level index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectrumKind {
    Linear,
    Quadratic,
    QQuadratic,
    QExponential,
}

/// The five closed-form slots every solvable model must provide. This is the
/// extension point for further models; only [`FamilySpec`] implementations
/// ship here.
pub trait SolvableFamily {
    fn birth_rate(&self, x: usize) -> f64;
    fn death_rate(&self, x: usize) -> f64;
    /// Eigenvalue `E(n) >= 0`, `E(0) = 0`, strictly increasing.
    fn eigenvalue(&self, n: usize) -> f64;
    /// Polynomial `P(n, x)` normalized to `P(n, 0) = 1`.
    fn polynomial(&self, n: usize, x: usize) -> Result<f64>;
    /// Squared norm constant `d_n^2` of the n-th mode (log scale).
    fn norm_constant_squared(&self, n: usize) -> Result<LogScaled>;
    /// Squared ground weight `phi0(x)^2` (log scale).
    fn weight_squared(&self, x: usize) -> LogScaled;
}

fn param_err(
    context: &'static str,
    name: &'static str,
    requirement: &'static str,
    value: f64,
) -> Error {
    Error::ParamOutOfRange {
        context,
        name,
        requirement,
        value,
    }
}

fn log_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `exp(-i theta)`.
fn phase(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), -theta.sin())
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Krawtchouk { .. } => "krawtchouk",
            FamilySpec::Hahn { .. } => "hahn",
            FamilySpec::QHahn { .. } => "q_hahn",
            FamilySpec::QuantumQKrawtchouk { .. } => "quantum_q_krawtchouk",
            FamilySpec::Charlier { .. } => "charlier",
        }
    }

    /// Top state index for the intrinsically finite models.
    pub fn n_max(&self) -> Option<usize> {
        match *self {
            FamilySpec::Krawtchouk { n_max, .. }
            | FamilySpec::Hahn { n_max, .. }
            | FamilySpec::QHahn { n_max, .. }
            | FamilySpec::QuantumQKrawtchouk { n_max, .. } => Some(n_max),
            FamilySpec::Charlier { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.n_max().is_some()
    }

    /// Unbounded total rates rule out fixed-step evolution.
    pub fn supports_discrete_time(&self) -> bool {
        self.is_finite()
    }

    pub fn spectrum_kind(&self) -> SpectrumKind {
        match self {
            FamilySpec::Krawtchouk { .. } | FamilySpec::Charlier { .. } => SpectrumKind::Linear,
            FamilySpec::Hahn { .. } => SpectrumKind::Quadratic,
            FamilySpec::QHahn { .. } => SpectrumKind::QQuadratic,
            FamilySpec::QuantumQKrawtchouk { .. } => SpectrumKind::QExponential,
        }
    }

    /// Structural periodicity flag: true when the spectrum is known to be a
    /// common multiple of integers (all-integer spectra, or quadratic spectra
    /// with integral parameter sum within 1e-9).
    pub fn flags_periodic(&self) -> bool {
        match *self {
            FamilySpec::Krawtchouk { .. } | FamilySpec::Charlier { .. } => true,
            FamilySpec::Hahn { a, b, .. } => {
                let s = a + b;
                s > 0.5 && (s - s.round()).abs() <= SERIES_TERMINATION_MATCH
            }
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilySpec::Krawtchouk { n_max, p } => {
                if n_max < 1 {
                    return Err(param_err("krawtchouk", "N", ">= 1", n_max as f64));
                }
                if !(p > 0.0 && p < 1.0) {
                    return Err(param_err("krawtchouk", "p", "0 < p < 1", p));
                }
            }
            FamilySpec::Hahn { n_max, a, b } => {
                if n_max < 1 {
                    return Err(param_err("hahn", "N", ">= 1", n_max as f64));
                }
                if !(a > 0.0 && a.is_finite()) {
                    return Err(param_err("hahn", "a", "> 0", a));
                }
                if !(b > 0.0 && b.is_finite()) {
                    return Err(param_err("hahn", "b", "> 0", b));
                }
            }
            FamilySpec::QHahn { n_max, a, b, q } => {
                if n_max < 1 {
                    return Err(param_err("q_hahn", "N", ">= 1", n_max as f64));
                }
                if !(q > 0.0 && q < 1.0) {
                    return Err(param_err("q_hahn", "q", "0 < q < 1", q));
                }
                if !(a > 0.0 && a < 1.0) {
                    return Err(param_err("q_hahn", "a", "0 < a < 1", a));
                }
                if !(b > 0.0 && b < 1.0) {
                    return Err(param_err("q_hahn", "b", "0 < b < 1", b));
                }
            }
            FamilySpec::QuantumQKrawtchouk { n_max, p, q } => {
                if n_max < 1 {
                    return Err(param_err("quantum_q_krawtchouk", "N", ">= 1", n_max as f64));
                }
                if !(q > 0.0 && q < 1.0) {
                    return Err(param_err("quantum_q_krawtchouk", "q", "0 < q < 1", q));
                }
                let bound = q.powi(-(n_max as i32));
                if !(p > bound && p.is_finite()) {
                    return Err(param_err("quantum_q_krawtchouk", "p", "> q^-N", p));
                }
            }
            FamilySpec::Charlier { a } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(param_err("charlier", "a", "> 0", a));
                }
            }
        }
        Ok(())
    }

    /// The state window: the native one for finite models, a certified
    /// reflecting cut for the unbounded one.
    pub fn space(&self, tail_tolerance: f64) -> Result<StateSpace> {
        self.validate()?;
        match *self {
            FamilySpec::Charlier { a } => {
                if !(tail_tolerance > 0.0) {
                    return Err(param_err(
                        "charlier",
                        "tail_tolerance",
                        "> 0",
                        tail_tolerance,
                    ));
                }
                let spec = *self;
                process::truncate_space(
                    &move |_x| a,
                    &|x| x as f64,
                    &move |n, x| {
                        // coupling the cut removes, weighted by the retained
                        // mode's boundary magnitude
                        let coupling = (a * x as f64).sqrt();
                        match spec.mode_value_log(n, x) {
                            Ok(v) => coupling * v.value().abs(),
                            Err(_) => f64::INFINITY,
                        }
                    },
                    CHARLIER_MODE_GUARD,
                    tail_tolerance,
                )
            }
            _ => Ok(StateSpace::Finite {
                n_max: self.n_max().expect("finite"),
            }),
        }
    }

    /// Rate table on the default window (tail tolerance 1e-14 for the
    /// truncated model).
    pub fn rates(&self) -> Result<RateTable> {
        self.rates_with_tail(TAIL_TOLERANCE_DEFAULT)
    }

    /// Rate table with an explicit truncation tail tolerance.
    pub fn rates_with_tail(&self, tail_tolerance: f64) -> Result<RateTable> {
        let space = self.space(tail_tolerance)?;
        let top = space.top();
        let mut birth: Vec<f64> = (0..=top).map(|x| self.birth_rate(x)).collect();
        let death: Vec<f64> = (0..=top).map(|x| self.death_rate(x)).collect();
        // reflecting cut for the truncated model; finite formulas already
        // vanish exactly at the top
        birth[top] = 0.0;
        RateTable::new(birth, death, space)
    }

    /// Sinusoidal coordinate: `x` for the ordinary models, `q^-x - 1` for
    /// the q-deformed ones.
    pub fn eta(&self, x: usize) -> f64 {
        match *self {
            FamilySpec::QHahn { q, .. } | FamilySpec::QuantumQKrawtchouk { q, .. } => {
                q.powi(-(x as i32)) - 1.0
            }
            _ => x as f64,
        }
    }

    fn check_index(&self, context: &'static str, i: usize) -> Result<()> {
        if let Some(n_max) = self.n_max() {
            if i > n_max {
                return Err(Error::IndexOutOfRange {
                    context,
                    index: i,
                    max: n_max,
                });
            }
        }
        Ok(())
    }

    /// Normalized mode value `d_n * phi0(x) * P(n, x)`.
    pub fn phi_hat(&self, n: usize, x: usize) -> Result<f64> {
        Ok(self.mode_value_log(n, x)?.value())
    }

    /// `d_n * phi0(x) * P(n, x)` in log scale: the normalized mode value.
    fn mode_value_log(&self, n: usize, x: usize) -> Result<LogScaled> {
        let dn = self
            .norm_constant_squared(n)?
            .sqrt()
            .expect("norm constants are positive");
        let phi0 = self.weight_squared(x).sqrt().expect("weights are positive");
        let p = LogScaled::from_value(self.polynomial(n, x)?);
        Ok(dn.mul(phi0).mul(p))
    }

    /// End-to-end amplitude `Psi(N, 0; t)` from the printed closed forms of
    /// the four finite models.
    pub fn closed_form_psi_n0(&self, t: f64) -> Result<Complex64> {
        self.validate()?;
        match *self {
            FamilySpec::Krawtchouk { n_max, p } => {
                let scale = (0.5 * n_max as f64 * (p * (1.0 - p)).ln()).exp();
                // 1 - e^{-it}
                let base = Complex64::new(1.0 - t.cos(), t.sin());
                Ok(scale * base.powu(n_max as u32))
            }
            FamilySpec::Hahn { n_max, a, b } => {
                let nf = n_max as u32;
                let scale = shifted_factorial_log(a, nf)
                    .mul(shifted_factorial_log(b, nf))
                    .sqrt()
                    .expect("positive");
                let mut sum = Complex64::new(0.0, 0.0);
                for n in 0..=n_max {
                    let s = a + b - 1.0 + n as f64;
                    // (2n+a+b-1)/(s (s+1)_N), with the n = 0 pole cancelled
                    // analytically against the leading factor of (s)_{N+1}
                    let ratio = if n == 0 {
                        shifted_factorial_log(a + b, nf).recip().expect("positive")
                    } else {
                        log_scaled_product(&[
                            LogScaled::from_value(2.0 * n as f64 + a + b - 1.0),
                            LogScaled::from_value(s).recip().expect("nonzero"),
                            shifted_factorial_log(s + 1.0, nf).recip().expect("nonzero"),
                        ])
                    };
                    let coef = log_scaled_product(&[scale, binomial_log(n_max, n), ratio]);
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sum += sign * coef.value() * phase(self.eigenvalue(n) * t);
                }
                Ok(sum)
            }
            FamilySpec::QHahn { n_max, a, b, q } => {
                let nf = n_max as u32;
                let scale_sq = log_scaled_product(&[
                    q_shifted_factorial_log(a, q, nf),
                    q_shifted_factorial_log(b, q, nf),
                    LogScaled::from_log(n_max as f64 * a.ln(), 1),
                ]);
                let scale = scale_sq.sqrt().expect("positive").mul(
                    q_shifted_factorial_log(a * b, q, nf)
                        .recip()
                        .expect("positive"),
                );
                let mut sum = Complex64::new(0.0, 0.0);
                for n in 0..=n_max {
                    let w = self.q_hahn_spectral_weight(n);
                    let coef = log_scaled_product(&[
                        scale,
                        q_binomial_log(n_max, n, q),
                        w,
                        q_shifted_factorial_log(a * b * q.powi(n_max as i32), q, n as u32)
                            .recip()
                            .expect("positive"),
                        LogScaled::from_log((n * n.saturating_sub(1) / 2) as f64 * q.ln(), 1),
                    ]);
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sum += sign * coef.value() * phase(self.eigenvalue(n) * t);
                }
                Ok(sum)
            }
            FamilySpec::QuantumQKrawtchouk { n_max, p, q } => {
                let nf = n_max as u32;
                let a0 = q.powi(-(n_max as i32)) / p;
                let scale_log = 0.5
                    * (-(n_max as f64) * (p * q).ln()
                        + q_shifted_factorial_log(a0, q, nf).log_magnitude);
                let mut sum = Complex64::new(0.0, 0.0);
                for n in 0..=n_max {
                    let exponent = (n * (n + 1) / 2) as f64 - (n_max * n) as f64;
                    let coef = log_scaled_product(&[
                        LogScaled::from_log(scale_log, 1),
                        q_binomial_log(n_max, n, q),
                        LogScaled::from_log(exponent * q.ln(), 1),
                    ]);
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sum += sign * coef.value() * phase(self.eigenvalue(n) * t);
                }
                Ok(sum)
            }
            FamilySpec::Charlier { .. } => Err(Error::Unsupported {
                context: "closed_form_psi_n0",
                reason: "no end-to-end closed form on an unbounded lattice",
            }),
        }
    }

    /// Pole-free spectral weight `(a b q^{-1}; q)_n (1 - a b q^{2n-1}) /
    /// (1 - a b q^{-1})`, rewritten as `(a b; q)_{n-1} (1 - a b q^{2n-1})`
    /// so that `a b = q` is not a spurious singularity.
    fn q_hahn_spectral_weight(&self, n: usize) -> LogScaled {
        let (a, b, q) = match *self {
            FamilySpec::QHahn { a, b, q, .. } => (a, b, q),
            _ => unreachable!("q-Hahn only"),
        };
        if n == 0 {
            LogScaled::ONE
        } else {
            q_shifted_factorial_log(a * b, q, n as u32 - 1).mul(LogScaled::from_value(
                1.0 - a * b * q.powi(2 * n as i32 - 1),
            ))
        }
    }
}

impl SolvableFamily for FamilySpec {
    fn birth_rate(&self, x: usize) -> f64 {
        match *self {
            FamilySpec::Krawtchouk { n_max, p } => p * (n_max as f64 - x as f64),
            FamilySpec::Hahn { n_max, a, .. } => (x as f64 + a) * (n_max as f64 - x as f64),
            FamilySpec::QHahn { n_max, a, q, .. } => {
                (1.0 - a * q.powi(x as i32)) * (q.powi(x as i32 - n_max as i32) - 1.0)
            }
            FamilySpec::QuantumQKrawtchouk { n_max, p, q } => {
                q.powi(x as i32) / p * (q.powi(x as i32 - n_max as i32) - 1.0)
            }
            FamilySpec::Charlier { a } => a,
        }
    }

    fn death_rate(&self, x: usize) -> f64 {
        match *self {
            FamilySpec::Krawtchouk { p, .. } => (1.0 - p) * x as f64,
            FamilySpec::Hahn { n_max, b, .. } => x as f64 * (b + n_max as f64 - x as f64),
            FamilySpec::QHahn { n_max, a, b, q } => {
                a / q * (1.0 - q.powi(x as i32)) * (q.powi(x as i32 - n_max as i32) - b)
            }
            FamilySpec::QuantumQKrawtchouk { n_max, p, q } => {
                (1.0 - q.powi(x as i32)) * (1.0 - q.powi(x as i32 - n_max as i32 - 1) / p)
            }
            FamilySpec::Charlier { .. } => x as f64,
        }
    }

    fn eigenvalue(&self, n: usize) -> f64 {
        match *self {
            FamilySpec::Krawtchouk { .. } | FamilySpec::Charlier { .. } => n as f64,
            FamilySpec::Hahn { a, b, .. } => n as f64 * (n as f64 + a + b - 1.0),
            FamilySpec::QHahn { a, b, q, .. } => {
                (q.powi(-(n as i32)) - 1.0) * (1.0 - a * b * q.powi(n as i32 - 1))
            }
            FamilySpec::QuantumQKrawtchouk { q, .. } => 1.0 - q.powi(n as i32),
        }
    }

    fn polynomial(&self, n: usize, x: usize) -> Result<f64> {
        self.check_index("polynomial level", n)?;
        self.check_index("polynomial state", x)?;
        let (nf, xf) = (n as f64, x as f64);
        let params = match *self {
            FamilySpec::Krawtchouk { n_max, p } => SeriesParams::ordinary_dd(
                vec![Dd::from_f64(-nf), Dd::from_f64(-xf)],
                vec![Dd::from_f64(-(n_max as f64))],
                Dd::from_f64(p).recip(),
            ),
            FamilySpec::Hahn { n_max, a, b } => SeriesParams::ordinary_dd(
                vec![
                    Dd::from_f64(-nf),
                    Dd::from_f64(nf).add_f64(a).add_f64(b).add_f64(-1.0),
                    Dd::from_f64(-xf),
                ],
                vec![Dd::from_f64(a), Dd::from_f64(-(n_max as f64))],
                Dd::ONE,
            ),
            FamilySpec::QHahn { n_max, a, b, q } => {
                let qd = Dd::from_f64(q);
                SeriesParams::basic_dd(
                    vec![
                        qd.powi(-(n as i32)),
                        Dd::from_f64(a).mul_f64(b).mul(qd.powi(n as i32 - 1)),
                        qd.powi(-(x as i32)),
                    ],
                    vec![Dd::from_f64(a), qd.powi(-(n_max as i32))],
                    qd,
                    qd,
                )
            }
            FamilySpec::QuantumQKrawtchouk { n_max, p, q } => {
                let qd = Dd::from_f64(q);
                SeriesParams::basic_dd(
                    vec![qd.powi(-(n as i32)), qd.powi(-(x as i32))],
                    vec![qd.powi(-(n_max as i32))],
                    qd,
                    Dd::from_f64(p).mul(qd.powi(n as i32 + 1)),
                )
            }
            FamilySpec::Charlier { a } => SeriesParams::ordinary_dd(
                vec![Dd::from_f64(-nf), Dd::from_f64(-xf)],
                vec![],
                Dd::from_f64(a).recip().mul_f64(-1.0),
            ),
        };
        if params.q.is_some() {
            hyper_rphis(&params)
        } else {
            hyper_rfs(&params)
        }
    }

    fn norm_constant_squared(&self, n: usize) -> Result<LogScaled> {
        self.check_index("norm constant level", n)?;
        let out = match *self {
            FamilySpec::Krawtchouk { n_max, p } => log_scaled_product(&[
                binomial_log(n_max, n),
                LogScaled::from_log(n as f64 * (p.ln() - (1.0 - p).ln()), 1),
                LogScaled::from_log(n_max as f64 * (1.0 - p).ln(), 1),
            ]),
            FamilySpec::Hahn { n_max, a, b } => {
                let nf = n_max as u32;
                let s = a + b - 1.0 + n as f64;
                let ratio = if n == 0 {
                    shifted_factorial_log(a + b, nf).recip().expect("positive")
                } else {
                    log_scaled_product(&[
                        LogScaled::from_value(2.0 * n as f64 + a + b - 1.0),
                        LogScaled::from_value(s).recip().expect("nonzero"),
                        shifted_factorial_log(s + 1.0, nf).recip().expect("nonzero"),
                    ])
                };
                log_scaled_product(&[
                    binomial_log(n_max, n),
                    shifted_factorial_log(a, n as u32),
                    shifted_factorial_log(b, n as u32)
                        .recip()
                        .expect("positive"),
                    shifted_factorial_log(b, nf),
                    ratio,
                ])
            }
            FamilySpec::QHahn { n_max, a, b, q } => {
                let nf = n_max as u32;
                log_scaled_product(&[
                    q_binomial_log(n_max, n, q),
                    q_shifted_factorial_log(a, q, n as u32),
                    self.q_hahn_spectral_weight(n),
                    q_shifted_factorial_log(a * b * q.powi(n_max as i32), q, n as u32)
                        .recip()
                        .expect("positive"),
                    q_shifted_factorial_log(b, q, n as u32)
                        .recip()
                        .expect("positive"),
                    LogScaled::from_log((n_max as f64 - n as f64) * a.ln(), 1),
                    q_shifted_factorial_log(b, q, nf),
                    q_shifted_factorial_log(a * b, q, nf)
                        .recip()
                        .expect("positive"),
                ])
            }
            FamilySpec::QuantumQKrawtchouk { n_max, p, q } => {
                let an = q.powi(-(n as i32)) / p;
                let a0 = q.powi(-(n_max as i32)) / p;
                log_scaled_product(&[
                    q_binomial_log(n_max, n, q),
                    LogScaled::from_log(
                        -(n as f64) * p.ln() - (n_max as f64 * n as f64) * q.ln(),
                        1,
                    ),
                    q_shifted_factorial_log(an, q, n as u32)
                        .recip()
                        .expect("positive"),
                    q_shifted_factorial_log(a0, q, n_max as u32),
                ])
            }
            FamilySpec::Charlier { a } => {
                LogScaled::from_log(n as f64 * a.ln() - log_factorial(n) - a, 1)
            }
        };
        Ok(out)
    }

    fn weight_squared(&self, x: usize) -> LogScaled {
        match *self {
            FamilySpec::Krawtchouk { n_max, p } => log_scaled_product(&[
                binomial_log(n_max, x),
                LogScaled::from_log(x as f64 * (p.ln() - (1.0 - p).ln()), 1),
            ]),
            FamilySpec::Hahn { n_max, a, b } => {
                let nf = n_max as u32;
                log_scaled_product(&[
                    binomial_log(n_max, x),
                    shifted_factorial_log(a, x as u32),
                    shifted_factorial_log(b, nf - x as u32),
                    shifted_factorial_log(b, nf).recip().expect("positive"),
                ])
            }
            FamilySpec::QHahn { n_max, a, b, q } => {
                let nf = n_max as u32;
                log_scaled_product(&[
                    q_binomial_log(n_max, x, q),
                    q_shifted_factorial_log(a, q, x as u32),
                    q_shifted_factorial_log(b, q, nf - x as u32),
                    q_shifted_factorial_log(b, q, nf).recip().expect("positive"),
                    LogScaled::from_log(-(x as f64) * a.ln(), 1),
                ])
            }
            FamilySpec::QuantumQKrawtchouk { n_max, p, q } => {
                let a0 = q.powi(-(n_max as i32)) / p;
                log_scaled_product(&[
                    q_binomial_log(n_max, x, q),
                    LogScaled::from_log(
                        -(x as f64) * p.ln()
                            + (x as f64) * (x as f64 - 1.0 - n_max as f64) * q.ln(),
                        1,
                    ),
                    q_shifted_factorial_log(a0, q, x as u32)
                        .recip()
                        .expect("positive"),
                ])
            }
            FamilySpec::Charlier { a } => {
                LogScaled::from_log(x as f64 * a.ln() - log_factorial(x), 1)
            }
        }
    }
}
