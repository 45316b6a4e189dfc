//! Tensor products of maps and states, and the finite-stage divergence of
//! norms under tensor powers.
//!
//! Kronecker indices are lexicographic: `(i1, i2) -> i1 * n2 + i2`, matching
//! [`crate::matrix::kron`].

use serde::Serialize;

use crate::cpmap::{State, SuperOperator};
use crate::embed::build_embedded;
use crate::error::{Error, Result};
use crate::matrix::{kron, matrix_unit};
use crate::normest::{estimate_norm, EstimatorConfig, NormEstimate};

/// Largest total dimension for which [`estimate_product`] will run.
pub const DEFAULT_MAX_DIM: usize = 16;

/// `S1 (x) S2`, characterized by `(S1 (x) S2)(X (x) Y) = S1(X) (x) S2(Y)`.
pub fn kron_superop(s1: &SuperOperator, s2: &SuperOperator) -> SuperOperator {
    let (n1, n2) = (s1.dim(), s2.dim());
    let images1: Vec<_> = (0..n1 * n1)
        .map(|k| s1.apply(&matrix_unit(n1, k % n1, k / n1)).expect("dims match"))
        .collect();
    let images2: Vec<_> = (0..n2 * n2)
        .map(|k| s2.apply(&matrix_unit(n2, k % n2, k / n2)).expect("dims match"))
        .collect();
    SuperOperator::from_fn(n1 * n2, |e| {
        let pos = e.iter().position(|z| z.re == 1.0).expect("matrix unit");
        let n = n1 * n2;
        let (row, col) = (pos % n, pos / n);
        let (i1, i2) = (row / n2, row % n2);
        let (j1, j2) = (col / n2, col % n2);
        kron(&images1[i1 + j1 * n1], &images2[i2 + j2 * n2])
    })
}

pub fn kron_state(s1: &State, s2: &State) -> Result<State> {
    State::normalized(&kron(s1.matrix(), s2.matrix()))
}

/// Product of per-factor certified lower bounds.
pub fn tensor_norm_lower_bound(values: &[f64]) -> f64 {
    values.iter().product()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceTable {
    pub rows: Vec<(usize, f64)>,
}

impl DivergenceTable {
    /// Smallest `n` whose bound strictly exceeds `threshold`.
    pub fn first_exceeding(&self, threshold: f64) -> Option<usize> {
        self.rows.iter().find(|(_, v)| *v > threshold).map(|(n, _)| *n)
    }
}

/// Rows `(n, per_factor^n)` for `n = 1..=n_max`.
pub fn divergence_table(per_factor: f64, n_max: usize) -> Result<DivergenceTable> {
    if !(per_factor >= 0.0 && per_factor.is_finite()) || n_max == 0 {
        return Err(Error::InvalidParameter(format!(
            "divergence table needs per_factor >= 0 and n_max >= 1 (got {per_factor}, {n_max})"
        )));
    }
    Ok(DivergenceTable {
        rows: (1..=n_max).map(|n| (n, per_factor.powi(n as i32))).collect(),
    })
}

/// Estimates for two factors and for their tensor product.
#[derive(Debug, Clone)]
pub struct ProductEstimate {
    pub first: NormEstimate,
    pub second: NormEstimate,
    pub product: NormEstimate,
}

impl ProductEstimate {
    pub fn factor_bound(&self) -> f64 {
        tensor_norm_lower_bound(&[self.first.value, self.second.value])
    }
}

/// Estimates `||U_{p,theta}||` for `(T1, G1)`, `(T2, G2)` and for
/// `(T1 (x) T2, G1 (x) G2)`; the product estimate is seeded with the tensor
/// of the two factor witnesses.
pub fn estimate_product(
    (t1, g1): (&SuperOperator, &State),
    (t2, g2): (&SuperOperator, &State),
    p: f64,
    theta: f64,
    cfg: &EstimatorConfig,
    max_dim: usize,
) -> Result<ProductEstimate> {
    let total = t1.dim() * t2.dim();
    if total > max_dim {
        return Err(Error::InvalidParameter(format!(
            "tensor dimension {total} exceeds the cap {max_dim}"
        )));
    }
    let e1 = build_embedded(t1, g1, p, theta)?;
    let e2 = build_embedded(t2, g2, p, theta)?;
    let first = estimate_norm(e1.action(), p, cfg)?;
    let second = estimate_norm(e2.action(), p, cfg)?;

    let ek = build_embedded(&kron_superop(t1, t2), &kron_state(g1, g2)?, p, theta)?;
    let mut seeded = cfg.clone();
    seeded.seeds.push(kron(&first.witness, &second.witness));
    let product = estimate_norm(ek.action(), p, &seeded)?;
    Ok(ProductEstimate {
        first,
        second,
        product,
    })
}
