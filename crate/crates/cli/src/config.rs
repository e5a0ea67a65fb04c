//! Job configuration: JSON schema, key=value overrides, validation, and
//! construction of the model objects the computations run on.

use crate::CliError;
use bdspec::families::FamilySpec;
use bdspec::process::{build_hamiltonian, RateTable, StateSpace};
use bdspec::spectral::{analytic_eigensystem, numeric_eigensystem, EigenSystem};
use bdspec::tolerances::TAIL_TOLERANCE_DEFAULT;
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Computation {
    Spectrum,
    Stationary,
    ClassicalCt,
    ClassicalDt,
    QuantumCt,
    QuantumDt,
    LongTimeAverage,
    Period,
    Verify,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Raw birth and death rate vectors, one entry per state.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRates {
    pub birth: Vec<f64>,
    pub death: Vec<f64>,
}

/// The JSON job description. Every field is optional at parse time; which
/// ones must be present depends on the requested computation and is checked
/// during validation so the error can name the missing piece.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub computation: Option<Computation>,
    pub family: Option<String>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub q: Option<f64>,
    pub rates: Option<RawRates>,
    pub times: Option<Vec<f64>>,
    pub steps: Option<Vec<u64>>,
    #[serde(rename = "t_S")]
    pub t_s: Option<f64>,
    pub y: Option<usize>,
    pub init: Option<Vec<f64>>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

fn validation(message: String) -> CliError {
    CliError::Validation(message)
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<JobConfig, CliError> {
        serde_json::from_str(text).map_err(|e| validation(format!("config: {e}")))
    }

    /// Patch one field from a `--override key=value` flag.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), CliError> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| validation(format!("override `{spec}` is not of the form key=value")))?;
        fn parsed<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
            value
                .parse()
                .map_err(|_| validation(format!("override {key}={value}: unparseable value")))
        }
        match key {
            "N" => self.n = Some(parsed(key, value)?),
            "p" => self.p = Some(parsed(key, value)?),
            "a" => self.a = Some(parsed(key, value)?),
            "b" => self.b = Some(parsed(key, value)?),
            "q" => self.q = Some(parsed(key, value)?),
            "t_S" => self.t_s = Some(parsed(key, value)?),
            _ => {
                return Err(validation(format!(
                    "override key `{key}` not recognized (expected one of N, p, a, b, q, t_S)"
                )))
            }
        }
        Ok(())
    }

    /// Structural checks that do not depend on the computation: any grid
    /// that is present must be non-empty, non-negative, and strictly
    /// increasing.
    pub fn validate_grids(&self) -> Result<(), CliError> {
        if let Some(times) = &self.times {
            if times.is_empty() {
                return Err(validation("times: grid must be non-empty".into()));
            }
            for (i, &t) in times.iter().enumerate() {
                if !(t.is_finite() && t >= 0.0) {
                    return Err(validation(format!(
                        "times[{i}] = {t}: grid entries must be finite and non-negative"
                    )));
                }
                if i > 0 && times[i - 1] >= t {
                    return Err(validation(format!(
                        "times[{i}] = {t}: grid must be strictly increasing"
                    )));
                }
            }
        }
        if let Some(steps) = &self.steps {
            if steps.is_empty() {
                return Err(validation("steps: grid must be non-empty".into()));
            }
            for i in 1..steps.len() {
                if steps[i - 1] >= steps[i] {
                    return Err(validation(format!(
                        "steps[{i}] = {}: grid must be strictly increasing",
                        steps[i]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn required_times(&self) -> Result<&[f64], CliError> {
        self.times
            .as_deref()
            .ok_or_else(|| validation("this computation needs a `times` grid".into()))
    }

    pub fn required_steps(&self) -> Result<&[u64], CliError> {
        self.steps
            .as_deref()
            .ok_or_else(|| validation("this computation needs a `steps` grid".into()))
    }

    fn required(&self, field: &str) -> Result<f64, CliError> {
        let value = match field {
            "p" => self.p,
            "a" => self.a,
            "b" => self.b,
            "q" => self.q,
            _ => unreachable!("unknown numeric family field"),
        };
        value.ok_or_else(|| {
            validation(format!(
                "family `{}` needs parameter `{field}`",
                self.family.as_deref().unwrap_or("")
            ))
        })
    }

    fn required_n(&self) -> Result<usize, CliError> {
        self.n.ok_or_else(|| {
            validation(format!(
                "family `{}` needs parameter `N`",
                self.family.as_deref().unwrap_or("")
            ))
        })
    }

    fn family_spec(&self, name: &str) -> Result<FamilySpec, CliError> {
        let spec = match name {
            "krawtchouk" => FamilySpec::Krawtchouk {
                n_max: self.required_n()?,
                p: self.required("p")?,
            },
            "hahn" => FamilySpec::Hahn {
                n_max: self.required_n()?,
                a: self.required("a")?,
                b: self.required("b")?,
            },
            "q_hahn" => FamilySpec::QHahn {
                n_max: self.required_n()?,
                a: self.required("a")?,
                b: self.required("b")?,
                q: self.required("q")?,
            },
            "quantum_q_krawtchouk" => FamilySpec::QuantumQKrawtchouk {
                n_max: self.required_n()?,
                p: self.required("p")?,
                q: self.required("q")?,
            },
            "charlier" => FamilySpec::Charlier {
                a: self.required("a")?,
            },
            other => {
                return Err(validation(format!(
                    "family `{other}` not recognized (expected krawtchouk, hahn, q_hahn, \
                     quantum_q_krawtchouk, or charlier)"
                )))
            }
        };
        Ok(spec)
    }
}

/// Truncation tolerance for unbounded families, overridable through the
/// environment.
pub fn tail_tolerance() -> Result<f64, CliError> {
    match std::env::var("BDSPEC_TAIL_TOL") {
        Err(std::env::VarError::NotPresent) => Ok(TAIL_TOLERANCE_DEFAULT),
        Err(e) => Err(validation(format!("BDSPEC_TAIL_TOL: {e}"))),
        Ok(text) => {
            let tol: f64 = text
                .parse()
                .map_err(|_| validation(format!("BDSPEC_TAIL_TOL=`{text}`: not a number")))?;
            if tol.is_finite() && tol > 0.0 && tol < 1.0 {
                Ok(tol)
            } else {
                Err(validation(format!(
                    "BDSPEC_TAIL_TOL={tol}: must lie strictly between 0 and 1"
                )))
            }
        }
    }
}

/// The model a computation runs on: where it came from, its validated rate
/// table, and an orthonormal eigensystem (closed-form for families, Sturm
/// bisection for raw tables).
pub struct Model {
    pub family: Option<FamilySpec>,
    pub rates: RateTable,
    pub eigen: EigenSystem,
}

pub fn build_model(cfg: &JobConfig) -> Result<Model, CliError> {
    match (&cfg.family, &cfg.rates) {
        (Some(_), Some(_)) => Err(validation(
            "exactly one of `family` and `rates` must be given; got both".into(),
        )),
        (None, None) => Err(validation(
            "exactly one of `family` and `rates` must be given; got neither".into(),
        )),
        (Some(name), None) => {
            let fam = cfg.family_spec(name)?;
            let rates = fam.rates_with_tail(tail_tolerance()?)?;
            let eigen = analytic_eigensystem(&fam, &rates)?;
            Ok(Model {
                family: Some(fam),
                rates,
                eigen,
            })
        }
        (None, Some(raw)) => {
            if raw.birth.is_empty() {
                return Err(validation("rates: vectors must be non-empty".into()));
            }
            let space = StateSpace::Finite {
                n_max: raw.birth.len() - 1,
            };
            let rates = RateTable::new(raw.birth.clone(), raw.death.clone(), space)?;
            let eigen = numeric_eigensystem(&build_hamiltonian(&rates))?;
            Ok(Model {
                family: None,
                rates,
                eigen,
            })
        }
    }
}
