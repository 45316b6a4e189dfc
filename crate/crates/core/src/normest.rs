//! Certified lower bounds for induced Schatten norms.
//!
//! The estimator maximizes `||U(Y)||_p` over the unit sphere of `S^p` by
//! alternating dual ascent. From `Y_k` it forms the norming element `Z_k` of
//! `U(Y_k)` in `S^q`, pulls it back with the Hilbert–Schmidt adjoint, and
//! takes `Y_{k+1}` as the norming element of `U*(Z_k)` in `S^p`. Writing
//! `<A, B> = Re tr(A* B)`,
//!
//! ```text
//! ||U(Y_{k+1})||_p >= <Z_k, U(Y_{k+1})> = ||U*(Z_k)||_q >= <U*(Z_k), Y_k> = ||U(Y_k)||_p
//! ```
//!
//! so each restart climbs monotonically. The reported value is always
//! `||U(witness)||_p` for the returned unit witness, never an extrapolation.

use serde::Serialize;

use crate::cpmap::SuperOperator;
use crate::error::{Error, Result};
use crate::matrix::{self, conjugate_exponent, matrix_unit, schatten_norm, ComplexMatrix, SingularSystem};
use crate::par::{self, Execution};
use crate::random;
use crate::search;

#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub seed: u64,
    /// Additional starting witnesses, tried after the random restarts.
    pub seeds: Vec<ComplexMatrix>,
    pub exec: Execution,
}

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iters: 500,
            rel_tol: 1e-10,
            seed: DEFAULT_SEED,
            seeds: Vec::new(),
            exec: Execution::default(),
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "estimator config needs restarts >= 1, max_iters >= 1, rel_tol > 0 \
                 (got {}, {}, {})",
                self.restarts, self.max_iters, self.rel_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    /// `||U(witness)||_p`.
    pub value: f64,
    #[serde(skip)]
    pub witness: ComplexMatrix,
    pub iterations: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

/// One ascent run from a fixed starting point.
#[derive(Debug, Clone)]
pub struct Ascent {
    pub value: f64,
    pub witness: ComplexMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Objective after each accepted step, starting with the initial point.
    pub trace: Vec<f64>,
}

fn normalize(y: &ComplexMatrix, p: f64) -> Option<ComplexMatrix> {
    let n = schatten_norm(y, p).ok()?;
    (n > 0.0 && n.is_finite()).then(|| y / matrix::c64(n, 0.0))
}

/// Runs the alternating ascent from `start`. `start` need not be normalized.
pub fn ascend(
    u: &SuperOperator,
    u_adj: &SuperOperator,
    p: f64,
    start: &ComplexMatrix,
    max_iters: usize,
    rel_tol: f64,
) -> Result<Ascent> {
    let q = conjugate_exponent(p);
    let mut y = normalize(start, p).ok_or(Error::ZeroMatrix)?;
    let mut image = u.apply(&y)?;
    let mut value = schatten_norm(&image, p)?;
    let mut trace = vec![value];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iters && value > 0.0 {
        iterations += 1;
        let z = matrix::dual_element(&image, p)?;
        let pulled = u_adj.apply(&z)?;
        if matrix::max_abs(&pulled) == 0.0 {
            converged = true;
            break;
        }
        let Some(next) = normalize(&matrix::dual_element(&pulled, q)?, p) else {
            converged = true;
            break;
        };
        let next_image = u.apply(&next)?;
        let next_value = schatten_norm(&next_image, p)?;
        if next_value <= value {
            // Stationary up to rounding.
            converged = true;
            break;
        }
        let gain = next_value - value;
        y = next;
        image = next_image;
        value = next_value;
        trace.push(value);
        if gain <= rel_tol * value {
            converged = true;
            break;
        }
    }
    Ok(Ascent {
        value,
        witness: y,
        iterations,
        converged,
        trace,
    })
}

/// Ginibre starting point for restart `index`, independent of every other
/// restart.
pub fn restart_start(seed: u64, index: usize, dim: usize, p: f64) -> ComplexMatrix {
    let g = random::ginibre(&mut random::rng(seed, index as u64), dim, dim);
    normalize(&g, p).unwrap_or_else(|| matrix_unit(dim, 0, 0))
}

/// Best unit anti-diagonal witness `[[0, a], [b, 0]]`, `a^p + b^p = 1`,
/// `a, b >= 0`, found by a grid plus golden-section search over `a`.
fn anti_diagonal_start(u: &SuperOperator, p: f64) -> Option<ComplexMatrix> {
    let witness = |a: f64| {
        let a = a.clamp(0.0, 1.0);
        let b = (1.0 - a.powf(p)).max(0.0).powf(1.0 / p);
        let mut y = ComplexMatrix::zeros(2, 2);
        y[(0, 1)] = matrix::c64(a, 0.0);
        y[(1, 0)] = matrix::c64(b, 0.0);
        y
    };
    let objective = |a: f64| {
        u.apply(&witness(a))
            .ok()
            .and_then(|x| schatten_norm(&x, p).ok())
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (a, _) = search::grid_then_golden(objective, 0.0, 1.0, 201, 1e-12, Execution::Sequential);
    Some(witness(a))
}

/// Lower-bounds `||U: S^p -> S^p||` and returns a unit witness attaining it.
///
/// Starting points, in index order: `cfg.restarts` Ginibre restarts, the
/// caller's `cfg.seeds`, every matrix unit, and for `dim = 2` the best
/// anti-diagonal witness. The best value wins; ties go to the lowest index,
/// so the result does not depend on the thread count.
pub fn estimate_norm(u: &SuperOperator, p: f64, cfg: &EstimatorConfig) -> Result<NormEstimate> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent {
            got: p,
            expected: "1 <= p < inf",
        });
    }
    cfg.validate()?;
    let n = u.dim();
    for s in &cfg.seeds {
        if s.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: s.nrows(),
            });
        }
        matrix::check_finite(s)?;
    }

    let mut extra: Vec<ComplexMatrix> = cfg.seeds.clone();
    for j in 0..n {
        for i in 0..n {
            extra.push(matrix_unit(n, i, j));
        }
    }
    if n == 2 {
        extra.extend(anti_diagonal_start(u, p));
    }

    let u_adj = u.adjoint();
    let total = cfg.restarts + extra.len();
    let runs = par::map_indexed(cfg.exec, total, |k| {
        let start = if k < cfg.restarts {
            restart_start(cfg.seed, k, n, p)
        } else {
            extra[k - cfg.restarts].clone()
        };
        // Zero seeds are skipped rather than failing the whole estimate.
        ascend(u, &u_adj, p, &start, cfg.max_iters, cfg.rel_tol).ok()
    });

    let mut best: Option<Ascent> = None;
    for run in runs.into_iter().flatten() {
        if best.as_ref().map_or(true, |b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.ok_or(Error::ZeroMatrix)?;

    let witness = normalize(&best.witness, p).ok_or(Error::ZeroMatrix)?;
    let value = schatten_norm(&u.apply(&witness)?, p)?;
    Ok(NormEstimate {
        value,
        witness,
        iterations: best.iterations,
        restarts_used: total,
        converged: best.converged,
    })
}

/// Gradient of `Y -> ||Y||_p` with respect to the real and imaginary parts of
/// the entries, packed as a complex matrix: `||Y||_p^{1-p} U diag(s^{p-1}) V*`.
pub fn schatten_gradient(y: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent {
            got: p,
            expected: "1 < p < inf",
        });
    }
    let sys = SingularSystem::new(y)?;
    let norm = sys.schatten(p);
    if norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let weights: Vec<f64> = sys.sigma.iter().map(|&s| (s / norm).powf(p - 1.0)).collect();
    Ok(sys.recompose(&weights))
}
