//! Randomized structural properties: factorial-product identities, kernel
//! stochasticity/unitarity, spectrum rescaling covariance, period-detector
//! covariance, and the named invariant battery on arbitrary valid rate
//! tables.

// index loops below sweep (x, y) pairs of small dense tables
#![allow(clippy::needless_range_loop)]

use bdspec::evolve::{classical_ct_kernel, detect_period, quantum_ct_kernel};
use bdspec::families::FamilySpec;
use bdspec::process::{build_hamiltonian, RateTable, StateSpace};
use bdspec::specfun::{
    binomial_log, q_binomial_log, q_shifted_factorial, q_shifted_factorial_log, shifted_factorial,
    shifted_factorial_log,
};
use bdspec::spectral::{analytic_eigensystem, numeric_eigensystem};
use bdspec::verify::{all_passed, verify_rates};
use proptest::prelude::*;
use std::f64::consts::PI;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Forward product recurrence of the shifted factorial.
    #[test]
    fn shifted_factorial_recurrence(a in 0.1f64..5.0, n in 0u32..40) {
        let lhs = shifted_factorial(a, n + 1);
        let rhs = shifted_factorial(a, n) * (a + n as f64);
        prop_assert!(rel_close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    /// The log-scaled factorial agrees with the direct product while the
    /// latter stays representable.
    #[test]
    fn shifted_factorial_log_matches(a in 0.1f64..5.0, n in 0u32..40) {
        let direct = shifted_factorial(a, n);
        let scaled = shifted_factorial_log(a, n).value();
        prop_assert!(rel_close(direct, scaled, 1e-11), "{direct} vs {scaled}");
    }

    /// Forward product recurrence of the q-shifted factorial.
    #[test]
    fn q_shifted_factorial_recurrence(
        x in 0.05f64..0.95,
        q in 0.05f64..0.95,
        n in 0u32..30,
    ) {
        let lhs = q_shifted_factorial(x, q, n + 1);
        let rhs = q_shifted_factorial(x, q, n) * (1.0 - x * q.powi(n as i32));
        prop_assert!(rel_close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn q_shifted_factorial_log_matches(
        x in 0.05f64..0.95,
        q in 0.05f64..0.95,
        n in 0u32..30,
    ) {
        let direct = q_shifted_factorial(x, q, n);
        let scaled = q_shifted_factorial_log(x, q, n).value();
        prop_assert!(rel_close(direct, scaled, 1e-11), "{direct} vs {scaled}");
    }

    /// Pascal's rule on log-scaled binomials (exact in f64 up to n = 40).
    #[test]
    fn binomial_pascal_rule(n in 2usize..40, k_seed in 1usize..39) {
        let k = 1 + k_seed % (n - 1);
        let whole = binomial_log(n, k).value();
        let parts = binomial_log(n - 1, k - 1).value() + binomial_log(n - 1, k).value();
        prop_assert!(rel_close(whole, parts, 1e-11), "{whole} vs {parts}");
    }

    /// Reflection symmetry of the q-binomial.
    #[test]
    fn q_binomial_symmetry(n in 1usize..25, k_seed in 0usize..25, q in 0.05f64..0.95) {
        let k = k_seed % (n + 1);
        let left = q_binomial_log(n, k, q).value();
        let right = q_binomial_log(n, n - k, q).value();
        prop_assert!(rel_close(left, right, 1e-11), "{left} vs {right}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Every column of the probability-gauge propagator is a distribution.
    #[test]
    fn classical_kernel_columns_are_distributions(
        n_max in 1usize..10,
        p in 0.1f64..0.9,
        t in 0.01f64..10.0,
    ) {
        let fam = FamilySpec::Krawtchouk { n_max, p };
        let rates = fam.rates().unwrap();
        let sys = analytic_eigensystem(&fam, &rates).unwrap();
        let kernel = classical_ct_kernel(&sys, t).unwrap();
        let dim = n_max + 1;
        for y in 0..dim {
            let sum: f64 = (0..dim).map(|x| kernel[x][y]).sum();
            prop_assert!((sum - 1.0).abs() <= 1e-10, "column {y} sums to {sum}");
            for x in 0..dim {
                prop_assert!(kernel[x][y] >= -1e-12, "negative mass at ({x},{y})");
            }
        }
    }

    /// Rows of the unitary propagator keep unit norm.
    #[test]
    fn quantum_kernel_rows_are_unit_norm(
        n_max in 1usize..10,
        a in 0.2f64..2.5,
        b in 0.2f64..2.5,
        t in 0.01f64..10.0,
    ) {
        let fam = FamilySpec::Hahn { n_max, a, b };
        let rates = fam.rates().unwrap();
        let sys = analytic_eigensystem(&fam, &rates).unwrap();
        let kernel = quantum_ct_kernel(&sys, t);
        for (x, row) in kernel.iter().enumerate() {
            let norm: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() <= 1e-12, "row {x} norm {norm}");
        }
    }

    /// Rescaling all rates by c rescales the spectrum by c and leaves the
    /// stationary distribution untouched.
    #[test]
    fn rate_rescaling_covariance(
        n_max in 1usize..9,
        p in 0.15f64..0.85,
        c in 0.1f64..10.0,
    ) {
        let fam = FamilySpec::Krawtchouk { n_max, p };
        let rates = fam.rates().unwrap();
        let scaled = rates.scaled(c).unwrap();
        let base = numeric_eigensystem(&build_hamiltonian(&rates)).unwrap();
        let moved = numeric_eigensystem(&build_hamiltonian(&scaled)).unwrap();
        for n in 0..=n_max {
            let want = c * base.eigenvalue(n);
            prop_assert!(
                (moved.eigenvalue(n) - want).abs() <= 1e-11 * (1.0 + want.abs()),
                "mode {n}: {} vs {want}", moved.eigenvalue(n)
            );
        }
        let pi_base = bdspec::process::build_weights(&rates).pi_vec();
        let pi_moved = bdspec::process::build_weights(&scaled).pi_vec();
        for (a, b) in pi_base.iter().zip(&pi_moved) {
            prop_assert!((a - b).abs() <= 1e-13, "{a} vs {b}");
        }
    }

    /// An integer spectrum stretched by c has recurrence time 2 pi / c.
    #[test]
    fn period_detector_covariance(n_max in 2usize..12, c_log in -2.0f64..2.0) {
        let c = 10f64.powf(c_log);
        let eigenvalues: Vec<f64> = (0..=n_max).map(|n| c * n as f64).collect();
        let period = detect_period(&eigenvalues);
        prop_assert!(period.is_some(), "integer spectrum must recur");
        let t = period.unwrap();
        let want = 2.0 * PI / c;
        prop_assert!((t - want).abs() <= 1e-9 * want, "{t} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Any structurally valid rate table passes the named invariant battery.
    #[test]
    fn random_rate_tables_pass_verification(
        dim in 3usize..9,
        seeds in prop::collection::vec(0.05f64..4.0, 16),
    ) {
        let mut birth: Vec<f64> = (0..dim).map(|i| seeds[i % seeds.len()]).collect();
        let mut death: Vec<f64> = (0..dim).map(|i| seeds[(i + 7) % seeds.len()]).collect();
        birth[dim - 1] = 0.0;
        death[0] = 0.0;
        let rates = RateTable::new(birth, death, StateSpace::Finite { n_max: dim - 1 }).unwrap();
        let reports = verify_rates(&rates).unwrap();
        if !all_passed(&reports) {
            let failing: Vec<String> = reports
                .iter()
                .filter(|r| !r.passed)
                .map(|r| format!("{} worst {:.3e} tol {:.3e}", r.name, r.worst, r.tolerance))
                .collect();
            prop_assert!(false, "failing checks: {failing:?}");
        }
    }
}
