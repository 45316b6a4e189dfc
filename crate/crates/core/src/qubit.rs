//! The two-level counterexample family.
//!
//! For `c in (0, 1)` the state is `Gamma_c = diag(1 - c, c)` and the map `T_c`
//! is the unital completely positive map with
//!
//! ```text
//! T(E11) = (1 - c) I,  T(E22) = c I,  T(E12) = T(E21) = sqrt(c (1 - c)) (E12 + E21).
//! ```
//!
//! On anti-diagonal inputs `Y = [[0, a], [b, 0]]` the embedded map acts in
//! closed form through `delta = ((1 - c)/c)^((2 theta - 1)/p)`, which gives a
//! certified lower bound for `||U_{p,theta}||`. Values returned by
//! [`family_value`] and [`m_closed`] are on the norm scale (the `p`-th root of
//! `||U(Y)||_p^p`); [`m_closed_power`] gives the `p`-th power.

use serde::Serialize;

use crate::cpmap::{State, SuperOperator};
use crate::error::{Error, Result};
use crate::matrix::{c64, diag_real, identity, matrix_unit};
use crate::par::Execution;
use crate::search;

fn check_c(c: f64) -> Result<()> {
    if c > 0.0 && c < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("c must lie in (0, 1), got {c}")))
    }
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn qubit_state(c: f64) -> Result<State> {
    check_c(c)?;
    State::new(&diag_real(&[1.0 - c, c]))
}

pub fn qubit_map(c: f64) -> Result<SuperOperator> {
    check_c(c)?;
    let s = (c * (1.0 - c)).sqrt();
    let off = (matrix_unit(2, 0, 1) + matrix_unit(2, 1, 0)) * c64(s, 0.0);
    let images = [
        identity(2) * c64(1.0 - c, 0.0),
        off.clone(),
        off,
        identity(2) * c64(c, 0.0),
    ];
    // Column i + 2j of the action matrix is vec(T(E_ij)).
    let mut action = crate::matrix::ComplexMatrix::zeros(4, 4);
    for (k, img) in images.iter().enumerate() {
        action.column_mut(k).copy_from_slice(img.as_slice());
    }
    SuperOperator::from_action(2, action)
}

fn log_delta(c: f64, p: f64, theta: f64) -> f64 {
    (2.0 * theta - 1.0) / p * ((1.0 - c) / c).ln()
}

pub fn delta(c: f64, p: f64, theta: f64) -> f64 {
    ((1.0 - c) / c).powf((2.0 * theta - 1.0) / p)
}

/// Maximizer of the anti-diagonal objective on `a^p + b^p = 1`:
/// `a = (delta^q / (1 + delta^q))^(1/p)`, `b = (1 / (1 + delta^q))^(1/p)`.
pub fn optimal_ab(delta: f64, p: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent {
            got: p,
            expected: "1 < p < inf (p = 1 uses a = 1, b = 0)",
        });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
    }
    let q = p / (p - 1.0);
    let ql = q * delta.ln();
    Ok(((-softplus(-ql) / p).exp(), (-softplus(ql) / p).exp()))
}

/// `||U_{p,theta}(Y)||_p` for `Y = [[0, a], [b, 0]]`, `a, b >= 0`,
/// `a^p + b^p = 1`.
pub fn family_value(c: f64, p: f64, theta: f64, a: f64, b: f64) -> f64 {
    let d = delta(c, p, theta);
    let sum = (a + b / d).powf(p) + (a * d + b).powf(p);
    (c * (1.0 - c)).sqrt() * sum.powf(1.0 / p)
}

fn ln_m_power(c: f64, p: f64, theta: f64) -> f64 {
    let l = log_delta(c, p, theta);
    if p == 1.0 {
        0.5 * (c * (1.0 - c)).ln() + softplus(l)
    } else {
        let q = p / (p - 1.0);
        0.5 * p * (c * (1.0 - c)).ln() + softplus(-p * l) + (p - 1.0) * softplus(q * l)
    }
}

/// Closed-form family value at the optimal `(a, b)` (or `(1, 0)` when `p = 1`),
/// on the norm scale.
pub fn m_closed(c: f64, p: f64, theta: f64) -> f64 {
    (ln_m_power(c, p, theta) / p).exp()
}

/// `m_closed^p`, i.e. `gamma (1 + delta^-p)(1 + delta^q)^(p-1)`.
pub fn m_closed_power(c: f64, p: f64, theta: f64) -> f64 {
    ln_m_power(c, p, theta).exp()
}

/// Second-order coefficient `2((2 theta - 1)^2 q - p)` of `m_t^p` at `t = 0`.
pub fn alpha(p: f64, theta: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent {
            got: p,
            expected: "1 < p < inf (use alpha1 at p = 1)",
        });
    }
    let q = p / (p - 1.0);
    let lambda = 2.0 * theta - 1.0;
    Ok(2.0 * (lambda * lambda * q - p))
}

/// The same coefficient as `8 q (theta - theta0)(theta - theta1)`.
pub fn alpha_factored(p: f64, theta: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent {
            got: p,
            expected: "1 < p < inf",
        });
    }
    let q = p / (p - 1.0);
    let root = (p - 1.0).sqrt();
    let (t0, t1) = (0.5 * (1.0 - root), 0.5 * (1.0 + root));
    Ok(8.0 * q * (theta - t0) * (theta - t1))
}

/// First-order coefficient of `m_t` at `t = 0` when `p = 1`.
pub fn alpha1(theta: f64) -> f64 {
    -2.0 * (2.0 * theta - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub theta0: f64,
    pub theta1: f64,
}

pub fn theta_thresholds(p: f64) -> Result<Thresholds> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "thresholds are defined for 1 <= p <= 2, got {p}"
        )));
    }
    let root = (p - 1.0).sqrt();
    Ok(Thresholds {
        theta0: 0.5 * (1.0 - root),
        theta1: 0.5 * (1.0 + root),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitWitness {
    pub c: f64,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub m_value: f64,
    pub p: f64,
    pub theta: f64,
}

impl QubitWitness {
    /// Witness at `c` with the module's `(a, b)` choice.
    pub fn at(c: f64, p: f64, theta: f64) -> Result<Self> {
        check_c(c)?;
        let (a, b) = if p == 1.0 {
            (1.0, 0.0)
        } else {
            optimal_ab(delta(c, p, theta), p)?
        };
        Ok(Self {
            c,
            t: c - 0.5,
            a,
            b,
            m_value: family_value(c, p, theta, a, b),
            p,
            theta,
        })
    }

    /// The unit-norm input `[[0, a], [b, 0]]`.
    pub fn input(&self) -> crate::matrix::ComplexMatrix {
        let mut y = crate::matrix::ComplexMatrix::zeros(2, 2);
        y[(0, 1)] = c64(self.a, 0.0);
        y[(1, 0)] = c64(self.b, 0.0);
        y
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub points: usize,
    /// Distance kept from `t = +-1/2`.
    pub edge: f64,
    pub golden_tol: f64,
    pub exec: Execution,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            points: 1000,
            edge: 1e-3,
            golden_tol: 1e-12,
            exec: Execution::default(),
        }
    }
}

/// Maximizes `m_closed(1/2 + t, p, theta)` over `t`: coarse scan, then
/// golden-section refinement around the best node.
pub fn family_maximum(p: f64, theta: f64, cfg: &ScanConfig) -> Result<QubitWitness> {
    crate::embed::check_p_theta(p, theta)?;
    if cfg.points < 2 || !(cfg.edge > 0.0 && cfg.edge < 0.5) || !(cfg.golden_tol > 0.0) {
        return Err(Error::InvalidParameter("invalid scan configuration".into()));
    }
    let lo = -0.5 + cfg.edge;
    let hi = 0.5 - cfg.edge;
    let (t, _) = search::grid_then_golden(
        |t| m_closed(0.5 + t, p, theta),
        lo,
        hi,
        cfg.points,
        cfg.golden_tol,
        cfg.exec,
    );
    QubitWitness::at(0.5 + t, p, theta)
}

/// Returns a witness with `m_value > 1 + tol`, if the family has one.
pub fn find_counterexample(p: f64, theta: f64, tol: f64, cfg: &ScanConfig) -> Result<Option<QubitWitness>> {
    if !(1.0..2.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "counterexample search needs 1 <= p < 2, got {p}; p >= 2 is bounded"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let w = family_maximum(p, theta, cfg)?;
    Ok((w.m_value > 1.0 + tol).then_some(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn state_examples() {
        let s = qubit_state(0.6).unwrap();
        assert!((s.matrix() - diag_real(&[0.4, 0.6])).norm() < 1e-15);
        let s = qubit_state(0.5).unwrap();
        assert!((s.matrix() - diag_real(&[0.5, 0.5])).norm() < 1e-15);
        assert!(qubit_state(0.0).is_err());
        assert!(qubit_state(1.0).is_err());
        assert!(qubit_map(1.2).is_err());
    }

    #[test]
    fn map_is_unital() {
        let t = qubit_map(0.27).unwrap();
        assert!((t.apply(&identity(2)).unwrap() - identity(2)).norm() < 1e-15);
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(0.5, 1.3, 0.1), 1.0);
        assert_eq!(delta(0.2, 1.3, 0.5), 1.0);
        assert_relative_eq!(delta(0.6, 1.0, 0.0), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn optimal_ab_examples() {
        for p in [1.1, 1.5, 3.0] {
            let (a, b) = optimal_ab(1.0, p).unwrap();
            assert_relative_eq!(a, 2f64.powf(-1.0 / p), epsilon = 1e-15);
            assert_relative_eq!(b, 2f64.powf(-1.0 / p), epsilon = 1e-15);
        }
        let (a, b) = optimal_ab(1.5, 2.0).unwrap();
        assert_relative_eq!(a, (2.25f64 / 3.25).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(b, (1.0f64 / 3.25).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(a, 0.832_05, epsilon = 1e-5);
        assert_relative_eq!(b, 0.554_70, epsilon = 1e-5);
        assert!(optimal_ab(1.5, 1.0).is_err());
    }

    #[test]
    fn family_value_examples() {
        let p = 1.7;
        let a = 2f64.powf(-1.0 / p);
        assert_relative_eq!(family_value(0.5, p, 0.2, a, a), 1.0, epsilon = 1e-14);
        // sqrt(0.24) * (1 + 1.5) = sqrt(1.5)
        assert_relative_eq!(family_value(0.6, 1.0, 0.0, 1.0, 0.0), 1.224_744_871_391_589, epsilon = 1e-14);
        assert_relative_eq!(family_value(0.9, 1.0, 0.0, 1.0, 0.0), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn m_closed_matches_family_value() {
        for &(c, p, theta) in &[(0.51, 1.5, 0.0), (0.2, 1.3, 0.9), (0.95, 1.05, 0.1), (0.7, 1.0, 0.3)] {
            let w = QubitWitness::at(c, p, theta).unwrap();
            assert_relative_eq!(m_closed(c, p, theta), w.m_value, max_relative = 1e-12);
            assert_relative_eq!(w.a.powf(p) + w.b.powf(p), 1.0, epsilon = 1e-12);
        }
        assert!(m_closed(0.51, 1.5, 0.0) > 1.0);
        assert_relative_eq!(m_closed(0.6, 1.0, 0.0), 1.224_744_871, epsilon = 1e-8);
        assert_relative_eq!(m_closed(0.9, 1.0, 0.0), 3.0, epsilon = 1e-10);
    }

    #[test]
    fn alpha_examples() {
        assert_relative_eq!(alpha(1.7, 0.5).unwrap(), -3.4, epsilon = 1e-14);
        assert_relative_eq!(alpha(1.5, 0.0).unwrap(), 3.0, epsilon = 1e-14);
        assert_relative_eq!(alpha_factored(1.5, 0.0).unwrap(), 3.0, epsilon = 1e-12);
        assert_relative_eq!(alpha(2.0, 0.0).unwrap(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(alpha(2.0, 1.0).unwrap(), 0.0, epsilon = 1e-14);
        assert!(alpha(1.0, 0.2).is_err());
        assert_relative_eq!(alpha1(0.0), 2.0);
    }

    #[test]
    fn threshold_examples() {
        let t = theta_thresholds(1.0).unwrap();
        assert_eq!((t.theta0, t.theta1), (0.5, 0.5));
        let t = theta_thresholds(2.0).unwrap();
        assert_eq!((t.theta0, t.theta1), (0.0, 1.0));
        let t = theta_thresholds(1.25).unwrap();
        assert_relative_eq!(t.theta0, 0.25, epsilon = 1e-15);
        assert_relative_eq!(t.theta1, 0.75, epsilon = 1e-15);
        assert!(theta_thresholds(2.5).is_err());
        assert!(theta_thresholds(0.9).is_err());
    }

    #[test]
    fn counterexample_examples() {
        let cfg = ScanConfig::default();
        let w = find_counterexample(1.0, 0.0, 1e-6, &cfg).unwrap().unwrap();
        assert!(w.m_value > 1.0 + 1e-6);
        assert_eq!((w.a, w.b), (1.0, 0.0));

        let w = find_counterexample(1.5, 0.1, 1e-6, &cfg).unwrap().unwrap();
        assert!(w.m_value > 1.0 + 1e-6);
        assert_relative_eq!(w.m_value, m_closed(w.c, 1.5, 0.1), max_relative = 1e-12);

        assert!(find_counterexample(1.5, 0.5, 1e-6, &cfg).unwrap().is_none());
        assert!(find_counterexample(1.1, 0.95, 1e-6, &cfg).unwrap().is_some());
        assert!(find_counterexample(2.0, 0.1, 1e-6, &cfg).is_err());
    }
}
