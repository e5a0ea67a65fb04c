//! Rendering of computation results: CSV with exact-round-trip float
//! formatting, or JSON. Row and key order are fixed so identical jobs emit
//! identical bytes.

use crate::config::OutputFormat;
use bdspec::verify::CheckReport;
use num_complex::Complex64;
use serde_json::json;

/// Time axis of an emitted grid: physical times or step counts.
pub enum TimeAxis {
    Continuous(Vec<f64>),
    Steps(Vec<u64>),
}

impl TimeAxis {
    fn labels(&self) -> Vec<String> {
        match self {
            TimeAxis::Continuous(ts) => ts.iter().map(|&t| fmt17(t)).collect(),
            TimeAxis::Steps(ls) => ls.iter().map(|l| l.to_string()).collect(),
        }
    }

    fn json_value(&self) -> serde_json::Value {
        match self {
            TimeAxis::Continuous(ts) => json!(ts),
            TimeAxis::Steps(ls) => json!(ls),
        }
    }

    fn json_key(&self) -> &'static str {
        match self {
            TimeAxis::Continuous(_) => "times",
            TimeAxis::Steps(_) => "steps",
        }
    }
}

/// Everything a computation can produce.
pub enum Artifact {
    Spectrum(Vec<f64>),
    Stationary(Vec<f64>),
    Classical {
        axis: TimeAxis,
        values: Vec<Vec<f64>>,
    },
    Quantum {
        axis: TimeAxis,
        values: Vec<Vec<Complex64>>,
    },
    LongTimeAverage(Vec<Vec<f64>>),
    Period(Option<f64>),
    Verify(Vec<CheckReport>),
}

/// 17 significant decimal digits: enough to reproduce any binary64 value
/// exactly on re-parse.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn render(artifact: &Artifact, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(artifact),
        OutputFormat::Json => render_json(artifact),
    }
}

fn render_csv(artifact: &Artifact) -> String {
    let mut out = String::new();
    match artifact {
        Artifact::Spectrum(es) => {
            out.push_str("n,eigenvalue\n");
            for (n, e) in es.iter().enumerate() {
                out.push_str(&format!("{n},{}\n", fmt17(*e)));
            }
        }
        Artifact::Stationary(pi) => {
            out.push_str("x,prob\n");
            for (x, p) in pi.iter().enumerate() {
                out.push_str(&format!("{x},{}\n", fmt17(*p)));
            }
        }
        Artifact::Classical { axis, values } => {
            out.push_str("t,x,prob\n");
            for (label, row) in axis.labels().iter().zip(values) {
                for (x, p) in row.iter().enumerate() {
                    out.push_str(&format!("{label},{x},{}\n", fmt17(*p)));
                }
            }
        }
        Artifact::Quantum { axis, values } => {
            out.push_str("t,x,re,im,prob\n");
            for (label, row) in axis.labels().iter().zip(values) {
                for (x, amp) in row.iter().enumerate() {
                    out.push_str(&format!(
                        "{label},{x},{},{},{}\n",
                        fmt17(amp.re),
                        fmt17(amp.im),
                        fmt17(amp.norm_sqr())
                    ));
                }
            }
        }
        Artifact::LongTimeAverage(table) => {
            out.push_str("x,y,prob\n");
            for (x, row) in table.iter().enumerate() {
                for (y, p) in row.iter().enumerate() {
                    out.push_str(&format!("{x},{y},{}\n", fmt17(*p)));
                }
            }
        }
        Artifact::Period(period) => {
            out.push_str("period\n");
            match period {
                Some(t) => out.push_str(&format!("{}\n", fmt17(*t))),
                None => out.push_str("none\n"),
            }
        }
        Artifact::Verify(reports) => {
            out.push_str("invariant,worst,tolerance,passed\n");
            for r in reports {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    r.name,
                    fmt17(r.worst),
                    fmt17(r.tolerance),
                    r.passed
                ));
            }
        }
    }
    out
}

fn render_json(artifact: &Artifact) -> String {
    let value = match artifact {
        Artifact::Spectrum(es) => json!({ "eigenvalues": es }),
        Artifact::Stationary(pi) => json!({ "pi": pi }),
        Artifact::Classical { axis, values } => json!({
            axis.json_key(): axis.json_value(),
            "values": values,
        }),
        Artifact::Quantum { axis, values } => {
            let pairs: Vec<Vec<[f64; 2]>> = values
                .iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect();
            json!({
                axis.json_key(): axis.json_value(),
                "values": pairs,
            })
        }
        Artifact::LongTimeAverage(table) => json!({ "long_time_average": table }),
        Artifact::Period(period) => json!({ "period": period }),
        Artifact::Verify(reports) => {
            let checks: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "invariant": r.name,
                        "worst": r.worst,
                        "tolerance": r.tolerance,
                        "passed": r.passed,
                    })
                })
                .collect();
            json!({
                "checks": checks,
                "all_passed": reports.iter().all(|r| r.passed),
            })
        }
    };
    let mut text = serde_json::to_string(&value).expect("in-memory serialization");
    text.push('\n');
    text
}
