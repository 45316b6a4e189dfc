//! The density-weighted map `U_{p,theta}` on the Schatten class, its exact
//! norm at `p = 2`, the interpolation upper bound, and the `(p, theta)` region
//! classifier.

use serde::Serialize;

use crate::cpmap::{compatibility, CompatibilityReport, State, SuperOperator};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// `U(Y) = G^{(1-theta)/p} T(G^{-(1-theta)/p} Y G^{-theta/p}) G^{theta/p}`
/// for a base map `T` and density `G`.
#[derive(Debug, Clone)]
pub struct EmbeddedMap {
    base: SuperOperator,
    state: State,
    p: f64,
    theta: f64,
    u_action: SuperOperator,
}

pub fn check_p_theta(p: f64, theta: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent {
            got: p,
            expected: "1 <= p < inf",
        });
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta must lie in [0, 1], got {theta}"
        )));
    }
    Ok(())
}

pub fn build_embedded(t: &SuperOperator, state: &State, p: f64, theta: f64) -> Result<EmbeddedMap> {
    check_p_theta(p, theta)?;
    if t.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: state.dim(),
        });
    }
    let left = (1.0 - theta) / p;
    let right = theta / p;
    let pre = SuperOperator::sandwich(state.power(-left)?.matrix(), state.power(-right)?.matrix())?;
    let post = SuperOperator::sandwich(state.power(left)?.matrix(), state.power(right)?.matrix())?;
    let u_action = post.compose(&t.compose(&pre)?)?;
    Ok(EmbeddedMap {
        base: t.clone(),
        state: state.clone(),
        p,
        theta,
        u_action,
    })
}

impl EmbeddedMap {
    pub fn base(&self) -> &SuperOperator {
        &self.base
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn action(&self) -> &SuperOperator {
        &self.u_action
    }

    pub fn apply(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.u_action.apply(y)
    }

    /// Evaluates the defining formula directly, bypassing the stored action
    /// matrix. Used to cross-check the composed action.
    pub fn apply_direct(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let left = (1.0 - self.theta) / self.p;
        let right = self.theta / self.p;
        let s = &self.state;
        let inner = s.power(-left)?.matrix() * y * s.power(-right)?.matrix();
        let mapped = self.base.apply(&inner)?;
        Ok(s.power(left)?.matrix() * mapped * s.power(right)?.matrix())
    }
}

/// Induced `S^2 -> S^2` norm: the largest singular value of the action matrix.
pub fn exact_norm_p2(e: &EmbeddedMap) -> Result<f64> {
    if e.p != 2.0 {
        return Err(Error::InvalidExponent {
            got: e.p,
            expected: "p = 2",
        });
    }
    Ok(e.u_action.hilbert_schmidt_norm())
}

/// `C_inf^{1 - 1/p} C_1^{1/p}` from the compatibility constants.
pub fn hjx_upper_bound(t: &SuperOperator, state: &State, p: f64) -> Result<f64> {
    let report = compatibility(t, state)?;
    Ok(bound_from_report(&report, p))
}

pub fn bound_from_report(report: &CompatibilityReport, p: f64) -> f64 {
    report.c_inf.powf(1.0 - 1.0 / p) * report.c1.powf(1.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    Bounded,
    Unbounded,
    Unknown,
}

/// Which result settles a region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundSource {
    /// `p >= 2`, every `theta`.
    Thm41,
    /// `p < 2` and `1 - p/2 <= theta <= p/2`.
    Thm43,
    /// `theta = 1/2`.
    HJXHalf,
    /// Qubit counterexample family plus tensor powers.
    Thm61,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionStatus {
    pub status: Region,
    pub source: BoundSource,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Bounded => "bounded",
            Region::Unbounded => "unbounded",
            Region::Unknown => "unknown",
        }
    }
}

impl BoundSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundSource::Thm41 => "Thm41",
            BoundSource::Thm43 => "Thm43",
            BoundSource::HJXHalf => "HJXHalf",
            BoundSource::Thm61 => "Thm61",
            BoundSource::None => "None",
        }
    }
}

/// Slack on the region boundaries so that decimal grid points lying on a
/// boundary are classified as if the arithmetic were exact.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Classifies `(p, theta)` for 2-positive maps with `phi o T <= phi`.
///
/// Points on the curves `theta = (1 -+ sqrt(p - 1))/2` are `Unknown` (the
/// counterexample region is open); the endpoints `1 - p/2` and `p/2` are
/// `Bounded`. Inputs outside `p >= 1`, `theta in [0, 1]` are `Unknown`.
pub fn classify_region(p: f64, theta: f64) -> RegionStatus {
    let status = |status, source| RegionStatus { status, source };
    if !(p >= 1.0) || !(0.0..=1.0).contains(&theta) {
        return status(Region::Unknown, BoundSource::None);
    }
    if p >= 2.0 {
        return status(Region::Bounded, BoundSource::Thm41);
    }
    let d = (theta - 0.5).abs();
    if d == 0.0 {
        return status(Region::Bounded, BoundSource::HJXHalf);
    }
    if d <= 0.5 * (p - 1.0) + BOUNDARY_TOL {
        return status(Region::Bounded, BoundSource::Thm43);
    }
    if d > 0.5 * (p - 1.0).sqrt() + BOUNDARY_TOL {
        return status(Region::Unbounded, BoundSource::Thm61);
    }
    status(Region::Unknown, BoundSource::None)
}
