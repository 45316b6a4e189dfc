//! Self-verification suite: every structural invariant of the toolkit checked
//! on seeded random instances, reported in a machine-readable form.

use rand::Rng;
use serde::Serialize;

use crate::cpmap::{compatibility, SuperOperator};
use crate::diagram::{self, DiagramSpec};
use crate::embed::{build_embedded, classify_region, exact_norm_p2, hjx_upper_bound, Region};
use crate::matrix::{
    self, c64, conjugate_exponent, dual_element, hermitian_max_eigenvalue, hermitian_min_eigenvalue,
    matrix_unit, re_inner, schatten_norm, ComplexMatrix,
};
use crate::normest::{ascend, estimate_norm, schatten_gradient, EstimatorConfig};
use crate::par::{self, Execution};
use crate::qubit::{
    alpha, alpha1, alpha_factored, family_value, m_closed, m_closed_power, optimal_ab, qubit_map,
    qubit_state, theta_thresholds, delta,
};
use crate::random;
use crate::tensor::estimate_product;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed deviation, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Accumulates the worst deviation over a set of cases.
struct Tally {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    cases: usize,
    failed: bool,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            worst: 0.0,
            cases: 0,
            failed: false,
        }
    }

    /// Records a deviation that must not exceed the tolerance.
    fn deviation(&mut self, d: f64) {
        self.cases += 1;
        if d.is_nan() || d > self.tolerance {
            self.failed = true;
        }
        if d.is_nan() || d > self.worst {
            self.worst = d;
        }
    }

    fn condition(&mut self, ok: bool) {
        self.deviation(if ok { 0.0 } else { f64::INFINITY });
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name,
            passed: !self.failed && self.cases > 0,
            worst: self.worst,
            tolerance: self.tolerance,
            cases: self.cases,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn quick_cfg(seed: u64) -> EstimatorConfig {
    EstimatorConfig {
        restarts: 12,
        seed,
        ..Default::default()
    }
}

/// Runs every check with instances derived from `seed`.
pub fn run_suite(seed: u64) -> VerifyReport {
    let checks = vec![
        unitary_invariance(seed),
        holder(seed),
        monotone_in_p(seed),
        frac_power_homomorphism(seed),
        dual_certificates(seed),
        gradient_finite_differences(seed),
        adjoint_duality(seed),
        kadison_schwarz(seed),
        c1_certificate(seed),
        unital_norm(seed),
        embedded_formula(seed),
        theta_symmetry_estimates(seed),
        half_contraction(seed),
        region_symmetry(),
        p2_equivalence(seed),
        monotone_ascent(seed),
        upper_bound_soundness(seed),
        homogeneity(seed),
        witness_certified(seed),
        thread_determinism(seed),
        family_symmetry(seed),
        family_baseline(seed),
        taylor_second_order(seed),
        alpha_forms_agree(seed),
        taylor_first_order(seed),
        alpha_sign_law(seed),
        family_pipeline_consistency(seed),
        tensor_lower_bound(seed),
        tensor_p2_multiplicative(seed),
        csv_determinism(),
    ];
    VerifyReport {
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn unitary_invariance(seed: u64) -> CheckResult {
    let mut t = Tally::new("unitary_invariance", 1e-10);
    let mut rng = random::rng(seed, 1);
    for _ in 0..20 {
        let x = random::ginibre(&mut rng, 3, 3);
        let u = random::unitary(&mut rng, 3);
        let v = random::unitary(&mut rng, 3);
        let uxv = &u * &x * &v;
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let a = schatten_norm(&uxv, p).unwrap();
            let b = schatten_norm(&x, p).unwrap();
            t.deviation(rel(a, b));
        }
    }
    t.finish()
}

fn holder(seed: u64) -> CheckResult {
    let mut t = Tally::new("holder", 1e-10);
    let mut rng = random::rng(seed, 2);
    for _ in 0..30 {
        let x = random::ginibre(&mut rng, 3, 3);
        let y = random::ginibre(&mut rng, 3, 3);
        let inv_p: f64 = rng.random_range(0.0..1.0);
        let inv_q: f64 = rng.random_range(0.0..(1.0 - inv_p));
        let (p, q) = (1.0 / inv_p, 1.0 / inv_q);
        let r = 1.0 / (inv_p + inv_q);
        let lhs = schatten_norm(&(&x * &y), r).unwrap();
        let rhs = schatten_norm(&x, p).unwrap() * schatten_norm(&y, q).unwrap();
        t.deviation((lhs - rhs).max(0.0));
    }
    t.finish()
}

fn monotone_in_p(seed: u64) -> CheckResult {
    let mut t = Tally::new("schatten_monotone_in_p", 1e-12);
    let mut rng = random::rng(seed, 3);
    for _ in 0..20 {
        let x = random::ginibre(&mut rng, 4, 4);
        let ps = [1.0, 1.2, 1.7, 2.0, 3.0, 6.0, f64::INFINITY];
        for w in ps.windows(2) {
            let a = schatten_norm(&x, w[0]).unwrap();
            let b = schatten_norm(&x, w[1]).unwrap();
            t.deviation((b - a).max(0.0));
        }
    }
    t.finish()
}

fn frac_power_homomorphism(seed: u64) -> CheckResult {
    let mut t = Tally::new("frac_power_homomorphism", 1e-10);
    let mut rng = random::rng(seed, 4);
    for _ in 0..20 {
        let g = random::state(&mut rng, 3, 0.3);
        let s: f64 = rng.random_range(-2.0..2.0);
        let r: f64 = rng.random_range(-2.0..2.0);
        let lhs = g.power(s).unwrap().frac_power(r).unwrap();
        let rhs = g.power(s * r).unwrap();
        t.deviation((lhs.matrix() - rhs.matrix()).norm() / rhs.matrix().norm());
    }
    t.finish()
}

fn dual_certificates(seed: u64) -> CheckResult {
    let mut t = Tally::new("dual_element_certificate", 1e-10);
    let mut rng = random::rng(seed, 5);
    for _ in 0..20 {
        let x = random::ginibre(&mut rng, 3, 3);
        for p in [1.0, 1.3, 2.0, 2.7, 5.0] {
            let z = dual_element(&x, p).unwrap();
            let q = conjugate_exponent(p);
            t.deviation(rel(re_inner(&z, &x), schatten_norm(&x, p).unwrap()));
            t.deviation((schatten_norm(&z, q).unwrap() - 1.0).abs());
        }
    }
    t.finish()
}

fn gradient_finite_differences(seed: u64) -> CheckResult {
    let mut t = Tally::new("gradient_vs_finite_differences", 1e-6);
    let mut rng = random::rng(seed, 6);
    let h = 1e-5;
    for p in [1.5, 2.5, 4.0] {
        let y = random::ginibre(&mut rng, 3, 3);
        let g = schatten_gradient(&y, p).unwrap();
        for idx in 0..9 {
            for (dir, part) in [(c64(1.0, 0.0), 0), (c64(0.0, 1.0), 1)] {
                let mut plus = y.clone();
                let mut minus = y.clone();
                plus[idx] += dir * h;
                minus[idx] -= dir * h;
                let fd = (schatten_norm(&plus, p).unwrap() - schatten_norm(&minus, p).unwrap()) / (2.0 * h);
                let analytic = if part == 0 { g[idx].re } else { g[idx].im };
                t.deviation((fd - analytic).abs());
            }
        }
    }
    t.finish()
}

fn adjoint_duality(seed: u64) -> CheckResult {
    let mut t = Tally::new("choi_adjoint_duality", 1e-10);
    let mut rng = random::rng(seed, 7);
    for _ in 0..20 {
        let map = random::linear_map(&mut rng, 3);
        let adj = map.adjoint();
        let x = random::ginibre(&mut rng, 3, 3);
        let y = random::ginibre(&mut rng, 3, 3);
        let lhs = matrix::trace(&(y.adjoint() * map.apply(&x).unwrap()));
        let rhs = matrix::trace(&(adj.apply(&y).unwrap().adjoint() * &x));
        t.deviation((lhs - rhs).norm() / lhs.norm().max(1.0));
        // Choi of the adjoint: entry ((i,k),(j,l)) is the conjugate of
        // entry ((k,i),(l,j)) of the original Choi matrix.
        let choi = map.choi_matrix();
        let adj_choi = adj.choi_matrix();
        let mut worst = 0.0f64;
        for (i, k, j, l) in index_quads(3) {
            let a = adj_choi[(i * 3 + k, j * 3 + l)];
            let b = choi[(k * 3 + i, l * 3 + j)].conj();
            worst = worst.max((a - b).norm());
        }
        t.deviation(worst / choi.norm());
    }
    t.finish()
}

fn index_quads(n: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..n.pow(4)).map(move |r| (r % n, (r / n) % n, (r / n / n) % n, r / n / n / n))
}

fn kadison_schwarz(seed: u64) -> CheckResult {
    let mut t = Tally::new("kadison_schwarz", 1e-10);
    let mut rng = random::rng(seed, 8);
    for _ in 0..20 {
        let n = rng.random_range(2..=3);
        let map = random::unital_cp_map(&mut rng, n, 3);
        let norm = matrix::operator_norm(&map.apply(&matrix::identity(n)).unwrap()).unwrap();
        let x = random::ginibre(&mut rng, n, n);
        let tx = map.apply(&x).unwrap();
        let gap = tx.adjoint() * &tx - map.apply(&(x.adjoint() * &x)).unwrap() * c64(norm, 0.0);
        t.deviation(hermitian_max_eigenvalue(&gap).max(0.0));
    }
    t.finish()
}

fn c1_certificate(seed: u64) -> CheckResult {
    let mut t = Tally::new("c1_certificate", 1e-12);
    let mut rng = random::rng(seed, 9);
    for _ in 0..20 {
        let n = rng.random_range(2..=3);
        let map = random::cp_map(&mut rng, n, 2);
        let state = random::state(&mut rng, n, 0.2);
        let report = compatibility(&map, &state).unwrap();
        let pulled = map.adjoint().apply(state.matrix()).unwrap();
        let at = |c: f64| hermitian_min_eigenvalue(&(state.matrix() * c64(c, 0.0) - &pulled));
        t.deviation((-at(report.c1 + 1e-10)).max(0.0));
        t.condition(at(report.c1 - 1e-6) < 0.0);
    }
    t.finish()
}

fn unital_norm(seed: u64) -> CheckResult {
    let mut t = Tally::new("unital_cp_has_unit_norm", 1e-10);
    let mut rng = random::rng(seed, 10);
    for _ in 0..10 {
        let n = rng.random_range(2..=3);
        let map = random::unital_cp_map(&mut rng, n, 2);
        let state = random::state(&mut rng, n, 0.2);
        let r = compatibility(&map, &state).unwrap();
        t.condition(r.unital && r.completely_positive);
        t.deviation((r.c_inf - 1.0).abs());
    }
    t.finish()
}

fn embedded_formula(seed: u64) -> CheckResult {
    let mut t = Tally::new("embedded_action_matches_formula", 1e-10);
    let mut rng = random::rng(seed, 11);
    for _ in 0..10 {
        let n = rng.random_range(2..=3);
        let map = random::linear_map(&mut rng, n);
        let state = random::state(&mut rng, n, 0.1);
        let p = rng.random_range(1.0..4.0);
        let theta = rng.random_range(0.0..=1.0);
        let e = build_embedded(&map, &state, p, theta).unwrap();
        for i in 0..n {
            for j in 0..n {
                let unit = matrix_unit(n, i, j);
                let a = e.apply(&unit).unwrap();
                let b = e.apply_direct(&unit).unwrap();
                t.deviation((&a - &b).norm() / b.norm().max(1.0));
            }
        }
        let id = build_embedded(&SuperOperator::identity(n), &state, p, theta).unwrap();
        let diff = id.action().action_matrix() - SuperOperator::identity(n).action_matrix();
        t.deviation(diff.norm() * 100.0);
    }
    t.finish()
}

fn theta_symmetry_estimates(seed: u64) -> CheckResult {
    let mut t = Tally::new("theta_symmetry_of_estimates", 1e-6);
    let mut rng = random::rng(seed, 12);
    for k in 0..6 {
        let c = rng.random_range(0.1..0.9);
        let p = rng.random_range(1.0..3.0);
        let theta = rng.random_range(0.0..=1.0);
        let (map, state) = (qubit_map(c).unwrap(), qubit_state(c).unwrap());
        let cfg = quick_cfg(seed ^ k);
        let a = estimate_norm(build_embedded(&map, &state, p, theta).unwrap().action(), p, &cfg).unwrap();
        let b = estimate_norm(build_embedded(&map, &state, p, 1.0 - theta).unwrap().action(), p, &cfg).unwrap();
        t.deviation(rel(a.value, b.value));
    }
    t.finish()
}

fn half_contraction(seed: u64) -> CheckResult {
    let mut t = Tally::new("theta_half_contraction", 1e-8);
    let mut rng = random::rng(seed, 13);
    for k in 0..10 {
        let n = rng.random_range(2..=3);
        let raw = random::cp_map(&mut rng, n, 2);
        let state = random::state(&mut rng, n, 0.1);
        let r = compatibility(&raw, &state).unwrap();
        let map = raw.scaled(c64(1.0 / r.c1.max(r.c_inf), 0.0));
        let p = rng.random_range(1.0..3.0);
        let e = build_embedded(&map, &state, p, 0.5).unwrap();
        let est = estimate_norm(e.action(), p, &quick_cfg(seed ^ k)).unwrap();
        t.deviation((est.value - 1.0).max(0.0));
    }
    t.finish()
}

fn region_symmetry() -> CheckResult {
    let mut t = Tally::new("region_theta_symmetry", 0.0);
    for pi in 0..=40 {
        let p = 1.0 + pi as f64 * 0.05;
        for k in 0..=100 {
            let theta = k as f64 / 100.0;
            let a = classify_region(p, theta);
            let b = classify_region(p, 1.0 - theta);
            t.condition(a.status == b.status);
        }
    }
    t.finish()
}

fn p2_equivalence(seed: u64) -> CheckResult {
    let mut t = Tally::new("p2_estimate_matches_exact", 1e-6);
    let mut rng = random::rng(seed, 14);
    for k in 0..10 {
        let n = rng.random_range(2..=3);
        let map = random::cp_map(&mut rng, n, 2);
        let state = random::state(&mut rng, n, 0.1);
        let theta = rng.random_range(0.0..=1.0);
        let e = build_embedded(&map, &state, 2.0, theta).unwrap();
        let exact = exact_norm_p2(&e).unwrap();
        let est = estimate_norm(e.action(), 2.0, &quick_cfg(seed ^ k)).unwrap();
        t.deviation(rel(est.value, exact));
    }
    t.finish()
}

fn monotone_ascent(seed: u64) -> CheckResult {
    let mut t = Tally::new("monotone_ascent", 1e-12);
    let mut rng = random::rng(seed, 15);
    for _ in 0..10 {
        let n = rng.random_range(2..=3);
        let u = random::linear_map(&mut rng, n);
        let adj = u.adjoint();
        let p = rng.random_range(1.0..4.0);
        let start = random::ginibre(&mut rng, n, n);
        let run = ascend(&u, &adj, p, &start, 300, 1e-14).unwrap();
        for w in run.trace.windows(2) {
            t.deviation((w[0] - w[1]).max(0.0));
        }
    }
    t.finish()
}

fn upper_bound_soundness(seed: u64) -> CheckResult {
    let mut t = Tally::new("lower_bound_below_upper_bound", 1e-8);
    let mut rng = random::rng(seed, 16);
    for k in 0..10 {
        let n = rng.random_range(2..=3);
        let map = random::cp_map(&mut rng, n, 2);
        let state = random::state(&mut rng, n, 0.1);
        let (p, theta) = if k % 2 == 0 {
            (rng.random_range(2.0..5.0), rng.random_range(0.0..=1.0))
        } else {
            (rng.random_range(1.0..2.0), 0.5)
        };
        let e = build_embedded(&map, &state, p, theta).unwrap();
        let est = estimate_norm(e.action(), p, &quick_cfg(seed ^ k)).unwrap();
        let bound = hjx_upper_bound(&map, &state, p).unwrap();
        t.deviation((est.value - bound).max(0.0));
    }
    t.finish()
}

fn homogeneity(seed: u64) -> CheckResult {
    let mut t = Tally::new("estimate_homogeneity", 1e-10);
    let mut rng = random::rng(seed, 17);
    for k in 0..5 {
        let u = random::linear_map(&mut rng, 2);
        let p = rng.random_range(1.0..3.0);
        let alpha = c64(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let cfg = quick_cfg(seed ^ k);
        let a = estimate_norm(&u, p, &cfg).unwrap().value;
        let b = estimate_norm(&u.scaled(alpha), p, &cfg).unwrap().value;
        t.deviation(rel(b, alpha.norm() * a));
    }
    t.finish()
}

fn witness_certified(seed: u64) -> CheckResult {
    let mut t = Tally::new("witness_certifies_value", 1e-10);
    let mut rng = random::rng(seed, 18);
    for k in 0..6 {
        let n = rng.random_range(2..=3);
        let u = random::linear_map(&mut rng, n);
        let p = rng.random_range(1.0..4.0);
        let est = estimate_norm(&u, p, &quick_cfg(seed ^ k)).unwrap();
        let again = schatten_norm(&u.apply(&est.witness).unwrap(), p).unwrap();
        t.deviation(rel(again, est.value));
        t.deviation((schatten_norm(&est.witness, p).unwrap() - 1.0).abs() * 100.0);
    }
    t.finish()
}

fn thread_determinism(seed: u64) -> CheckResult {
    let mut t = Tally::new("thread_count_determinism", 0.0);
    let mut rng = random::rng(seed, 19);
    let u = random::linear_map(&mut rng, 3);
    let cfg = quick_cfg(seed);
    let seq = estimate_norm(
        &u,
        1.5,
        &EstimatorConfig {
            exec: Execution::Sequential,
            ..cfg.clone()
        },
    )
    .unwrap();
    for threads in [1, 2, 4] {
        let est = par::with_threads(threads, || estimate_norm(&u, 1.5, &cfg).unwrap());
        t.condition(est.value.to_bits() == seq.value.to_bits() && est.witness == seq.witness);
    }
    t.finish()
}

fn family_symmetry(seed: u64) -> CheckResult {
    let mut t = Tally::new("family_symmetry", 1e-12);
    let mut rng = random::rng(seed, 20);
    for _ in 0..50 {
        let c = rng.random_range(0.01..0.99);
        let p = rng.random_range(1.0..2.0);
        let theta = rng.random_range(0.0..=1.0);
        let m = m_closed(c, p, theta);
        t.deviation(rel(m_closed(1.0 - c, p, theta), m));
        t.deviation(rel(m_closed(c, p, 1.0 - theta), m));
        // At p = 1 the (a, b) = (1, 0) choice only has the joint symmetry.
        t.deviation(rel(m_closed(1.0 - c, 1.0, 1.0 - theta), m_closed(c, 1.0, theta)));
    }
    t.finish()
}

fn family_baseline(seed: u64) -> CheckResult {
    let mut t = Tally::new("family_baseline_at_half", 1e-14);
    let mut rng = random::rng(seed, 21);
    for _ in 0..20 {
        let p = rng.random_range(1.0..2.0);
        let theta = rng.random_range(0.0..=1.0);
        t.deviation((m_closed(0.5, p, theta) - 1.0).abs());
    }
    t.deviation((m_closed(0.5, 1.0, 0.3) - 1.0).abs());
    t.finish()
}

/// Coefficient of `t^2` in `m_closed(1/2 + t)^p`, from the central second
/// difference with step `h` (half the second difference quotient).
pub fn second_order_coefficient(p: f64, theta: f64, h: f64) -> f64 {
    let f = |t: f64| m_closed_power(0.5 + t, p, theta);
    (f(h) - 2.0 * f(0.0) + f(-h)) / (2.0 * h * h)
}

/// Central first difference of `t -> m_closed(1/2 + t)` at `t = 0`.
pub fn first_difference(p: f64, theta: f64, h: f64) -> f64 {
    (m_closed(0.5 + h, p, theta) - m_closed(0.5 - h, p, theta)) / (2.0 * h)
}

fn taylor_second_order(seed: u64) -> CheckResult {
    let mut t = Tally::new("taylor_second_order_alpha", 1e-3);
    let mut rng = random::rng(seed, 22);
    for _ in 0..20 {
        let p = rng.random_range(1.01..1.99);
        let theta = rng.random_range(0.0..=1.0);
        let a = alpha(p, theta).unwrap();
        let err = (second_order_coefficient(p, theta, 1e-4) - a).abs();
        t.deviation(err / a.abs().max(1e-2));
    }
    t.finish()
}

fn alpha_forms_agree(seed: u64) -> CheckResult {
    let mut t = Tally::new("alpha_forms_agree", 1e-12);
    let mut rng = random::rng(seed, 28);
    for _ in 0..50 {
        let p = rng.random_range(1.01..1.99);
        let theta = rng.random_range(0.0..=1.0);
        let a = alpha(p, theta).unwrap();
        t.deviation((a - alpha_factored(p, theta).unwrap()).abs() / a.abs().max(1.0));
    }
    t.finish()
}

fn taylor_first_order(seed: u64) -> CheckResult {
    let mut t = Tally::new("taylor_first_order_p1", 1e-5);
    let mut rng = random::rng(seed, 23);
    for _ in 0..20 {
        let theta = rng.random_range(0.0..=1.0);
        t.deviation((first_difference(1.0, theta, 1e-4) - alpha1(theta)).abs());
    }
    t.finish()
}

fn alpha_sign_law(seed: u64) -> CheckResult {
    let mut t = Tally::new("alpha_sign_law", 0.0);
    let mut rng = random::rng(seed, 24);
    for _ in 0..200 {
        let p = rng.random_range(1.001..1.999);
        let theta = rng.random_range(0.0..=1.0);
        let th = theta_thresholds(p).unwrap();
        let outside = theta < th.theta0 || theta > th.theta1;
        t.condition((alpha(p, theta).unwrap() > 0.0) == outside);
        t.condition((classify_region(p, theta).status == Region::Unbounded) == outside);
    }
    t.finish()
}

fn family_pipeline_consistency(seed: u64) -> CheckResult {
    let mut t = Tally::new("family_vs_generic_pipeline", 1e-8);
    let mut rng = random::rng(seed, 25);
    for k in 0..6 {
        let c = rng.random_range(0.1..0.9);
        let p = rng.random_range(1.0..2.0);
        let theta = rng.random_range(0.0..=1.0);
        let (a, b) = if k == 0 {
            (1.0, 0.0)
        } else {
            optimal_ab(delta(c, p, theta), p).unwrap()
        };
        let p = if k == 0 { 1.0 } else { p };
        let fam = family_value(c, p, theta, a, b);
        let e = build_embedded(&qubit_map(c).unwrap(), &qubit_state(c).unwrap(), p, theta).unwrap();
        let mut y = ComplexMatrix::zeros(2, 2);
        y[(0, 1)] = c64(a, 0.0);
        y[(1, 0)] = c64(b, 0.0);
        t.deviation(rel(schatten_norm(&e.apply(&y).unwrap(), p).unwrap(), fam));
        let cfg = EstimatorConfig {
            seeds: vec![y],
            ..quick_cfg(seed ^ k)
        };
        let est = estimate_norm(e.action(), p, &cfg).unwrap();
        t.deviation((fam - est.value).max(0.0));
    }
    t.finish()
}

fn tensor_lower_bound(seed: u64) -> CheckResult {
    let mut t = Tally::new("tensor_lower_bound", 1e-6);
    let mut rng = random::rng(seed, 26);
    for k in 0..3 {
        let (c1, c2) = (rng.random_range(0.1..0.9), rng.random_range(0.1..0.9));
        let p = if k % 2 == 0 { 1.0 } else { 1.5 };
        let theta = rng.random_range(0.0..=1.0);
        let r = estimate_product(
            (&qubit_map(c1).unwrap(), &qubit_state(c1).unwrap()),
            (&qubit_map(c2).unwrap(), &qubit_state(c2).unwrap()),
            p,
            theta,
            &quick_cfg(seed ^ k),
            16,
        )
        .unwrap();
        t.deviation((r.factor_bound() - r.product.value).max(0.0));
    }
    t.finish()
}

fn tensor_p2_multiplicative(seed: u64) -> CheckResult {
    let mut t = Tally::new("tensor_p2_multiplicative", 1e-10);
    let mut rng = random::rng(seed, 27);
    for _ in 0..5 {
        let t1 = random::cp_map(&mut rng, 2, 2);
        let t2 = random::cp_map(&mut rng, 2, 2);
        let g1 = random::state(&mut rng, 2, 0.1);
        let g2 = random::state(&mut rng, 2, 0.1);
        let theta = rng.random_range(0.0..=1.0);
        let n1 = exact_norm_p2(&build_embedded(&t1, &g1, 2.0, theta).unwrap()).unwrap();
        let n2 = exact_norm_p2(&build_embedded(&t2, &g2, 2.0, theta).unwrap()).unwrap();
        let joint = build_embedded(
            &crate::tensor::kron_superop(&t1, &t2),
            &crate::tensor::kron_state(&g1, &g2).unwrap(),
            2.0,
            theta,
        )
        .unwrap();
        t.deviation(rel(exact_norm_p2(&joint).unwrap(), n1 * n2));
    }
    t.finish()
}

fn csv_determinism() -> CheckResult {
    let mut t = Tally::new("csv_byte_identical", 0.0);
    let spec = DiagramSpec {
        p_min: 1.0,
        p_max: 2.5,
        p_step: 0.25,
        theta_step: 0.1,
        with_family: true,
        ..Default::default()
    };
    let a = diagram::to_csv_string(&diagram::phase_diagram(&spec).unwrap());
    let b = par::with_threads(2, || diagram::to_csv_string(&diagram::phase_diagram(&spec).unwrap()));
    let c = diagram::to_csv_string(
        &diagram::phase_diagram(&DiagramSpec {
            exec: Execution::Sequential,
            ..spec
        })
        .unwrap(),
    );
    t.condition(a == b && a == c);
    t.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_for_default_seed() {
        let report = run_suite(7);
        for c in &report.checks {
            assert!(c.passed, "{} failed: worst {} > {}", c.name, c.worst, c.tolerance);
        }
        assert!(report.passed);
    }

    #[test]
    fn tally_flags_nan() {
        let mut t = Tally::new("x", 1.0);
        t.deviation(f64::NAN);
        assert!(!t.finish().passed);
    }
}
