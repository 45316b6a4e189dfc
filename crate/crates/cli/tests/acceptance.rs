//! Acceptance suite. Run with
//! `cargo test -p nclp-cli --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::process::Command;

use rand::Rng;

use nclp::diagram::CSV_HEADER;
use nclp::embed::hjx_upper_bound;
use nclp::qubit::{
    alpha, alpha1, alpha_factored, find_counterexample, m_closed, qubit_map, qubit_state, theta_thresholds,
    QubitWitness, ScanConfig,
};
use nclp::random;
use nclp::tensor::{divergence_table, estimate_product, kron_superop, kron_state, DEFAULT_MAX_DIM};
use nclp::verify::{first_difference, second_order_coefficient};
use nclp::{build_embedded, estimate_norm, exact_norm_p2, EstimatorConfig};

const SEED: u64 = 0xC0FFEE;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn rng(stream: u64) -> impl Rng {
    random::rng(SEED, stream)
}

fn threshold_reproduction() -> Outcome {
    let cfg = ScanConfig::default();
    let (mut checked, mut exempt, mut mismatches) = (0, 0, Vec::new());
    for pi in 0..10 {
        let p = 1.0 + pi as f64 / 10.0;
        let th = theta_thresholds(p).unwrap();
        for k in 0..=100 {
            let theta = k as f64 / 100.0;
            if (theta - th.theta0).abs() <= 0.01 || (theta - th.theta1).abs() <= 0.01 {
                exempt += 1;
                continue;
            }
            checked += 1;
            let expected = theta < th.theta0 || theta > th.theta1;
            let found = find_counterexample(p, theta, 1e-6, &cfg).unwrap();
            if found.is_some() != expected {
                mismatches.push((p, theta));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("{checked} cells checked, {exempt} boundary cells exempt, mismatches {mismatches:?}"),
    )
}

fn taylor_coefficient() -> Outcome {
    let mut r = rng(2);
    let (mut worst_rel, mut worst_forms, mut worst_p1) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let p = r.random_range(1.0..2.0_f64).max(1.0 + 1e-3);
        let theta = r.random_range(0.0..=1.0);
        let a = alpha(p, theta).unwrap();
        worst_rel = worst_rel.max((second_order_coefficient(p, theta, 1e-4) - a).abs() / a.abs());
        worst_forms = worst_forms.max((a - alpha_factored(p, theta).unwrap()).abs() / a.abs().max(1.0));
        let theta1 = r.random_range(0.0..=1.0);
        worst_p1 = worst_p1.max((first_difference(1.0, theta1, 1e-4) - alpha1(theta1)).abs());
    }
    outcome(
        worst_rel <= 1e-3 && worst_forms <= 1e-12 && worst_p1 <= 1e-5,
        format!("t^2 coefficient rel err {worst_rel:.2e} (tol 1e-3), forms {worst_forms:.2e} (tol 1e-12), p = 1 slope {worst_p1:.2e} (tol 1e-5)"),
    )
}

fn specific_values() -> Outcome {
    let m06 = m_closed(0.6, 1.0, 0.0);
    let m09 = m_closed(0.9, 1.0, 0.0);
    let e06 = (m06 - 1.224_744_871).abs().max((m06 - (0.6f64 / 0.4).sqrt()).abs());
    let e09 = (m09 - 3.0).abs();
    let mut r = rng(3);
    let mut e05 = 0.0f64;
    for _ in 0..20 {
        let p = r.random_range(1.0..2.0);
        let theta = r.random_range(0.0..=1.0);
        e05 = e05.max((m_closed(0.5, p, theta) - 1.0).abs());
    }
    outcome(
        e06 <= 1e-8 && e09 <= 1e-10 && e05 <= 1e-14,
        format!("m(0.6) err {e06:.2e}, m(0.9) err {e09:.2e}, m(0.5) err {e05:.2e}"),
    )
}

fn upper_bound_soundness() -> Outcome {
    let mut r = rng(4);
    let cfg = EstimatorConfig::default();
    let (mut worst, mut cases) = (f64::NEG_INFINITY, 0);
    for k in 0..50 {
        let n = 2 + k % 2;
        let map = random::cp_map(&mut r, n, 1 + k % 3);
        let state = random::state(&mut r, n, 0.05);
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        for p in [2.0, 2.5, 3.0, 5.0] {
            for theta in [0.0, 0.3, 0.7, 1.0] {
                pairs.push((p, theta));
            }
        }
        pairs.extend([(1.0, 0.5), (1.3, 0.5), (1.7, 0.5)]);
        for (p, theta) in pairs {
            let e = build_embedded(&map, &state, p, theta).unwrap();
            let est = estimate_norm(e.action(), p, &cfg).unwrap();
            let bound = hjx_upper_bound(&map, &state, p).unwrap();
            worst = worst.max(est.value - bound);
            cases += 1;
        }
    }
    outcome(
        worst <= 1e-8,
        format!("{cases} cases, max(estimate - bound) = {worst:.2e} (tol 1e-8)"),
    )
}

fn p2_equivalence() -> Outcome {
    let mut r = rng(5);
    let cfg = EstimatorConfig::default();
    let mut worst = 0.0f64;
    for k in 0..50 {
        let n = 2 + k % 2;
        let map = if k % 2 == 0 {
            random::cp_map(&mut r, n, 2)
        } else {
            random::linear_map(&mut r, n)
        };
        let state = random::state(&mut r, n, 0.05);
        let theta = r.random_range(0.0..=1.0);
        let e = build_embedded(&map, &state, 2.0, theta).unwrap();
        let exact = exact_norm_p2(&e).unwrap();
        let est = estimate_norm(e.action(), 2.0, &cfg).unwrap();
        worst = worst.max((est.value - exact).abs() / exact);
    }
    let mut worst_family = 0.0f64;
    for _ in 0..20 {
        let c = r.random_range(0.05..0.95);
        let theta = r.random_range(0.0..=1.0);
        let e = build_embedded(&qubit_map(c).unwrap(), &qubit_state(c).unwrap(), 2.0, theta).unwrap();
        let est = estimate_norm(e.action(), 2.0, &cfg).unwrap();
        worst_family = worst_family
            .max((exact_norm_p2(&e).unwrap() - 1.0).abs())
            .max((est.value - 1.0).abs());
    }
    outcome(
        worst <= 1e-6 && worst_family <= 1e-6,
        format!("random instances rel err {worst:.2e}, qubit family |norm - 1| {worst_family:.2e} (tol 1e-6)"),
    )
}

fn tensor_lower_bound() -> Outcome {
    let mut r = rng(6);
    let cfg = EstimatorConfig::default();
    let (mut worst_lb, mut worst_p2, mut worst_p2_est) = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let (c1, c2) = (r.random_range(0.05..0.95), r.random_range(0.05..0.95));
        let theta = r.random_range(0.0..=1.0);
        let (t1, g1) = (qubit_map(c1).unwrap(), qubit_state(c1).unwrap());
        let (t2, g2) = (qubit_map(c2).unwrap(), qubit_state(c2).unwrap());
        for p in [1.0, 1.5] {
            let est = estimate_product((&t1, &g1), (&t2, &g2), p, theta, &cfg, DEFAULT_MAX_DIM).unwrap();
            worst_lb = worst_lb.max(est.factor_bound() - est.product.value);
        }
        let n1 = exact_norm_p2(&build_embedded(&t1, &g1, 2.0, theta).unwrap()).unwrap();
        let n2 = exact_norm_p2(&build_embedded(&t2, &g2, 2.0, theta).unwrap()).unwrap();
        let joint = build_embedded(&kron_superop(&t1, &t2), &kron_state(&g1, &g2).unwrap(), 2.0, theta).unwrap();
        worst_p2 = worst_p2.max((exact_norm_p2(&joint).unwrap() - n1 * n2).abs());
        let est = estimate_product((&t1, &g1), (&t2, &g2), 2.0, theta, &cfg, DEFAULT_MAX_DIM).unwrap();
        worst_p2_est = worst_p2_est.max((est.product.value - est.factor_bound()).abs());
    }
    outcome(
        worst_lb <= 1e-6 && worst_p2 <= 1e-10 && worst_p2_est <= 1e-10,
        format!(
            "max(product of factors - joint) {worst_lb:.2e} (tol 1e-6), p = 2 exact {worst_p2:.2e}, p = 2 estimates {worst_p2_est:.2e} (tol 1e-10)"
        ),
    )
}

fn divergence() -> Outcome {
    let first = |c: f64| {
        let w = QubitWitness::at(c, 1.0, 0.0).unwrap();
        divergence_table(w.m_value, 40).unwrap().first_exceeding(10.0)
    };
    let (a, b) = (first(0.6), first(0.9));
    outcome(a == Some(12) && b == Some(3), format!("c = 0.6 -> {a:?} (want 12), c = 0.9 -> {b:?} (want 3)"))
}

fn nclp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nclp"))
}

fn phase_diagram() -> Outcome {
    let run = || {
        let out = nclp().args(["phase-diagram", "--with-family"]).output().unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let (a, b) = (run(), run());
    let row = |prefix: &str| a.lines().any(|l| l.starts_with(prefix));
    let family_above_one = a
        .lines()
        .find(|l| l.starts_with("1.5,0.1,"))
        .and_then(|l| l.rsplit(',').next()?.parse::<f64>().ok())
        .is_some_and(|m| m > 1.0);
    let checks = [
        a.starts_with(CSV_HEADER),
        a.lines().any(|l| l == "3,0.9,bounded,Thm41,"),
        row("1.5,0.4,bounded,Thm43,"),
        row("1.5,0.1,unbounded,Thm61,"),
        family_above_one,
        row("1.5,0.2,unknown,None,"),
        a == b,
    ];
    outcome(checks.iter().all(|&c| c), format!("row and determinism checks {checks:?}"))
}

fn invariant_suite() -> Outcome {
    let out = nclp().args(["verify"]).output().unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let required = [
        "unitary_invariance",
        "holder",
        "dual_element_certificate",
        "gradient_vs_finite_differences",
        "choi_adjoint_duality",
        "kadison_schwarz",
        "family_symmetry",
        "thread_count_determinism",
    ];
    let checks = report["checks"].as_array().unwrap();
    let missing: Vec<_> = required
        .iter()
        .filter(|name| !checks.iter().any(|c| c["name"] == **name && c["passed"] == true))
        .collect();
    let failed: Vec<_> = checks
        .iter()
        .filter(|c| c["passed"] != true)
        .map(|c| c["name"].as_str().unwrap_or("?").to_string())
        .collect();
    outcome(
        out.status.code() == Some(0) && missing.is_empty() && failed.is_empty(),
        format!("{} checks, failed {failed:?}, required but not passing {missing:?}", checks.len()),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 threshold reproduction", threshold_reproduction),
        ("2 taylor coefficient", taylor_coefficient),
        ("3 specific values", specific_values),
        ("4 upper-bound soundness", upper_bound_soundness),
        ("5 p = 2 oracle equivalence", p2_equivalence),
        ("6 tensor lower bound", tensor_lower_bound),
        ("7 divergence demonstration", divergence),
        ("8 phase diagram regression", phase_diagram),
        ("9 invariant suite", invariant_suite),
    ];
    let mut failures = Vec::new();
    for (name, check) in criteria {
        let start = std::time::Instant::now();
        let o = check();
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {} ({:.1}s)", o.detail, start.elapsed().as_secs_f64());
        if !o.passed {
            failures.push(name);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
