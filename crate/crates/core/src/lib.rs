//! Numerical toolkit for density-weighted maps `U_{p,theta}` on Schatten
//! classes: exact and estimated induced norms, interpolation upper bounds,
//! the qubit counterexample family and the `(p, theta)` phase diagram.

pub mod cpmap;
pub mod diagram;
pub mod embed;
pub mod error;
pub mod io;
pub mod matrix;
pub mod normest;
pub mod par;
pub mod qubit;
pub mod random;
pub mod search;
pub mod tensor;
pub mod verify;

pub use cpmap::{compatibility, CompatibilityReport, State, SuperOperator};
pub use embed::{build_embedded, classify_region, exact_norm_p2, hjx_upper_bound, EmbeddedMap, Region, RegionStatus};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, PositiveMatrix};
pub use normest::{estimate_norm, EstimatorConfig, NormEstimate};
pub use par::Execution;
