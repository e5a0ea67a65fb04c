//! End-to-end tests of the `bdspec` binary: config ingestion, overrides,
//! output formats, determinism, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU64, Ordering};

static COUNTER: AtomicU64 = AtomicU64::new(0);

fn scratch_file(contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "bdspec-cli-{}-{}",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("job.json");
    std::fs::write(&path, contents).unwrap();
    path
}

fn bdspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|line| line.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn spectrum_of_small_krawtchouk_is_integer() {
    let cfg = scratch_file(r#"{"family":"krawtchouk","N":4,"p":0.5,"computation":"spectrum"}"#);
    let out = bdspec(&["--config", cfg.to_str().unwrap()]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let eigenvalues: Vec<f64> = parsed["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(eigenvalues, vec![0.0, 1.0, 2.0, 3.0, 4.0]);
}

#[test]
fn quantum_amplitudes_at_time_zero_are_a_point_mass() {
    let cfg = scratch_file(
        r#"{"family":"hahn","N":3,"a":1.0,"b":1.5,"times":[0.0],"y":0,"format":"csv"}"#,
    );
    let out = bdspec(&["quantum_ct", "--config", cfg.to_str().unwrap()]);
    let text = stdout_of(&out);
    assert!(text.starts_with("t,x,re,im,prob\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let x: usize = row[1].parse().unwrap();
        let re: f64 = row[2].parse().unwrap();
        let im: f64 = row[3].parse().unwrap();
        let target = if x == 0 { 1.0 } else { 0.0 };
        assert!((re - target).abs() <= 1e-12, "x={x}: re={re}");
        assert!(im.abs() <= 1e-12, "x={x}: im={im}");
    }
}

#[test]
fn quantum_probability_column_sums_to_one_per_time() {
    let cfg = scratch_file(
        r#"{"family":"krawtchouk","N":7,"p":0.3,"times":[0.4,1.1,2.9],"y":2,"format":"csv"}"#,
    );
    let out = bdspec(&["quantum_ct", "--config", cfg.to_str().unwrap()]);
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 3 * 8);
    for chunk in rows.chunks(8) {
        let mass: f64 = chunk.iter().map(|row| row[4].parse::<f64>().unwrap()).sum();
        assert!((mass - 1.0).abs() <= 1e-10, "time block mass {mass}");
    }
}

#[test]
fn verify_reports_every_suite_and_exits_zero() {
    let cfg =
        scratch_file(r#"{"computation":"verify","family":"q_hahn","N":8,"a":0.3,"b":0.4,"q":0.5}"#);
    let out = bdspec(&["--config", cfg.to_str().unwrap()]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["all_passed"], serde_json::Value::Bool(true));
    let checks = parsed["checks"].as_array().unwrap();
    assert!(
        checks.len() >= 10,
        "expected a full battery, got {}",
        checks.len()
    );
    for check in checks {
        assert!(check["invariant"].is_string());
        assert!(check["worst"].is_number());
    }
}

#[test]
fn identical_jobs_emit_identical_bytes() {
    let cfg = scratch_file(
        r#"{"family":"krawtchouk","N":6,"p":0.3,"times":[0.0,0.5,1.5],"y":2,"format":"csv"}"#,
    );
    let first = bdspec(&["quantum_ct", "--config", cfg.to_str().unwrap()]);
    let second = bdspec(&["quantum_ct", "--config", cfg.to_str().unwrap()]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let out_path = cfg.with_file_name("grid.csv");
    let third = bdspec(&[
        "quantum_ct",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(third.status.success());
    assert_eq!(std::fs::read(&out_path).unwrap(), first.stdout);
}

#[test]
fn classical_csv_round_trips_bit_exactly() {
    use bdspec::evolve::{classical_ct_distribution, InitialDistribution};
    use bdspec::families::FamilySpec;
    use bdspec::spectral::analytic_eigensystem;

    let cfg = scratch_file(
        r#"{"family":"krawtchouk","N":5,"p":0.4,"times":[0.3,1.7],"y":1,"format":"csv"}"#,
    );
    let out = bdspec(&["classical_ct", "--config", cfg.to_str().unwrap()]);
    let rows = csv_rows(&stdout_of(&out));

    let fam = FamilySpec::Krawtchouk { n_max: 5, p: 0.4 };
    let rates = fam.rates().unwrap();
    let sys = analytic_eigensystem(&fam, &rates).unwrap();
    let p0 = InitialDistribution::point_mass(6, 1).unwrap();
    let grid = classical_ct_distribution(&sys, &p0, &[0.3, 1.7]).unwrap();

    assert_eq!(rows.len(), 12);
    for (i, row) in rows.iter().enumerate() {
        let reparsed: f64 = row[2].parse().unwrap();
        let in_memory = grid.values[i / 6][i % 6];
        assert_eq!(reparsed.to_bits(), in_memory.to_bits());
    }
}

#[test]
fn stationary_matches_binomial_weights() {
    let cfg = scratch_file(r#"{"family":"krawtchouk","N":4,"p":0.5}"#);
    let out = bdspec(&["stationary", "--config", cfg.to_str().unwrap()]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let pi: Vec<f64> = parsed["pi"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let want = [1.0, 4.0, 6.0, 4.0, 1.0].map(|c| c / 16.0);
    for (got, want) in pi.iter().zip(want) {
        assert!((got - want).abs() <= 1e-14);
    }
}

#[test]
fn override_flags_patch_the_family() {
    let cfg = scratch_file(r#"{"family":"krawtchouk","N":4,"p":0.5,"computation":"spectrum"}"#);
    let out = bdspec(&[
        "--config",
        cfg.to_str().unwrap(),
        "--override",
        "N=7",
        "--override",
        "p=0.2",
    ]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(parsed["eigenvalues"].as_array().unwrap().len(), 8);
}

#[test]
fn period_is_reported_or_absent() {
    let recurring = scratch_file(r#"{"family":"krawtchouk","N":5,"p":0.3}"#);
    let out = bdspec(&["period", "--config", recurring.to_str().unwrap()]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let period = parsed["period"].as_f64().unwrap();
    let tau = 2.0 * std::f64::consts::PI;
    assert!((period - tau).abs() <= 1e-9 * tau);

    let aperiodic = scratch_file(r#"{"family":"q_hahn","N":6,"a":0.4,"b":0.3,"q":0.37}"#);
    let out = bdspec(&["period", "--config", aperiodic.to_str().unwrap()]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(parsed["period"].is_null());

    let out = bdspec(&[
        "period",
        "--config",
        aperiodic.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(stdout_of(&out), "period\nnone\n");
}

#[test]
fn tail_tolerance_env_var_moves_the_window() {
    // the truncation window is the larger of what the tail bound and the
    // retained-mode guard demand, so a looser tolerance may leave it
    // unchanged — but a far tighter one must widen it
    let cfg = scratch_file(r#"{"family":"charlier","a":1.0,"format":"csv"}"#);
    let default = bdspec(&["stationary", "--config", cfg.to_str().unwrap()]);
    let tight = Command::new(env!("CARGO_BIN_EXE_bdspec"))
        .args(["stationary", "--config", cfg.to_str().unwrap()])
        .env("BDSPEC_TAIL_TOL", "1e-80")
        .output()
        .unwrap();
    assert!(tight.status.success());
    let default_rows = csv_rows(&stdout_of(&default)).len();
    let tight_rows = csv_rows(&String::from_utf8(tight.stdout).unwrap()).len();
    assert!(
        tight_rows > default_rows,
        "tighter tail tolerance must widen the window ({tight_rows} vs {default_rows})"
    );

    let rejected = Command::new(env!("CARGO_BIN_EXE_bdspec"))
        .args(["stationary", "--config", cfg.to_str().unwrap()])
        .env("BDSPEC_TAIL_TOL", "banana")
        .output()
        .unwrap();
    assert_eq!(rejected.status.code(), Some(2));
}

#[test]
fn raw_rate_tables_are_accepted() {
    let cfg = scratch_file(
        r#"{"rates":{"birth":[1.0,0.5,0.0],"death":[0.0,0.7,1.2]},"computation":"spectrum"}"#,
    );
    let out = bdspec(&["--config", cfg.to_str().unwrap()]);
    let parsed: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let eigenvalues: Vec<f64> = parsed["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(eigenvalues.len(), 3);
    assert!(
        eigenvalues[0].abs() <= 1e-12,
        "lowest mode {}",
        eigenvalues[0]
    );
    assert!(eigenvalues.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn validation_problems_exit_with_code_two() {
    let cases = [
        // both model sources
        r#"{"family":"krawtchouk","N":4,"p":0.5,"rates":{"birth":[1.0,0.0],"death":[0.0,1.0]},"computation":"spectrum"}"#,
        // neither model source
        r#"{"computation":"spectrum"}"#,
        // non-increasing grid
        r#"{"family":"krawtchouk","N":4,"p":0.5,"computation":"classical_ct","y":0,"times":[1.0,0.5]}"#,
        // negative time
        r#"{"family":"krawtchouk","N":4,"p":0.5,"computation":"classical_ct","y":0,"times":[-1.0]}"#,
        // missing family parameter
        r#"{"family":"krawtchouk","N":4,"computation":"spectrum"}"#,
        // unknown family
        r#"{"family":"laguerre","N":4,"computation":"spectrum"}"#,
        // unknown config key
        r#"{"family":"krawtchouk","N":4,"p":0.5,"computation":"spectrum","tee":1}"#,
        // out-of-range family parameter
        r#"{"family":"krawtchouk","N":4,"p":1.5,"computation":"spectrum"}"#,
        // quantum evolution without a source state
        r#"{"family":"krawtchouk","N":4,"p":0.5,"computation":"quantum_ct","times":[1.0]}"#,
        // both y and init
        r#"{"family":"krawtchouk","N":2,"p":0.5,"computation":"classical_ct","times":[1.0],"y":0,"init":[1.0,0.0,0.0]}"#,
    ];
    for config in cases {
        let path = scratch_file(config);
        let out = bdspec(&["--config", path.to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(2),
            "config {config} should fail validation; stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty(), "diagnostic expected for {config}");
    }

    // bad override key and unparseable value
    let path = scratch_file(r#"{"family":"krawtchouk","N":4,"p":0.5,"computation":"spectrum"}"#);
    for patch in ["z=1", "p=huh", "N"] {
        let out = bdspec(&["--config", path.to_str().unwrap(), "--override", patch]);
        assert_eq!(out.status.code(), Some(2), "override {patch}");
    }

    // unknown computation name is rejected by argument parsing
    let out = bdspec(&["differentiate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // missing config file
    let out = bdspec(&["spectrum", "--config", "/nonexistent/job.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn discrete_time_grids_use_step_labels() {
    let cfg = scratch_file(
        r#"{"family":"hahn","N":4,"a":0.8,"b":1.2,"steps":[0,3,10],"y":1,"format":"csv"}"#,
    );
    let out = bdspec(&["classical_dt", "--config", cfg.to_str().unwrap()]);
    let text = stdout_of(&out);
    assert!(text.starts_with("t,x,prob\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 15);
    assert_eq!(rows[0][0], "0");
    assert_eq!(rows[5][0], "3");
    assert_eq!(rows[10][0], "10");
    for row in &rows {
        let prob: f64 = row[2].parse().unwrap();
        assert!((-1e-12..=1.0 + 1e-12).contains(&prob));
    }

    // explicit t_S override flows into the discrete evolution
    let out = bdspec(&[
        "classical_dt",
        "--config",
        cfg.to_str().unwrap(),
        "--override",
        "t_S=0.01",
    ]);
    assert!(out.status.success());
    let patched = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_ne!(patched[5][2], rows[5][2], "step length must matter");
}

#[test]
fn long_time_average_is_symmetric_in_output() {
    let cfg = scratch_file(r#"{"family":"krawtchouk","N":5,"p":0.4,"format":"csv"}"#);
    let out = bdspec(&["long_time_average", "--config", cfg.to_str().unwrap()]);
    let rows = csv_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 36);
    let cell = |x: usize, y: usize| rows[x * 6 + y][2].clone();
    for x in 0..6 {
        for y in 0..6 {
            assert_eq!(cell(x, y), cell(y, x));
        }
    }
}
