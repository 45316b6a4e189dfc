//! Seeded random instances: Ginibre matrices, Haar unitaries, faithful states
//! and completely positive maps.
//!
//! Every generator draws from a ChaCha stream keyed by `(seed, stream)`, so a
//! given instance can be regenerated without replaying the ones before it.

use nalgebra::QR;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cpmap::{State, SuperOperator};
use crate::matrix::{c64, identity, ComplexMatrix, C64};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// i.i.d. standard complex Gaussian entries (real and imaginary parts of
/// variance 1/2).
pub fn ginibre<R: rand::Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c64(scale * re, scale * im)
    })
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
pub fn unitary<R: rand::Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = ginibre(rng, n, n);
    let qr = QR::new(g);
    let q = qr.q();
    let r = qr.r();
    let mut out = q.clone();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            out[(i, j)] = q[(i, j)] * phase;
        }
    }
    out
}

/// Random faithful state: normalized Wishart matrix mixed with `floor * I / n`
/// so that the smallest eigenvalue stays away from zero.
pub fn state<R: rand::Rng>(rng: &mut R, n: usize, floor: f64) -> State {
    let g = ginibre(rng, n, n);
    let w = &g * g.adjoint();
    let tr = crate::matrix::trace(&w).re;
    let mixed = w * c64((1.0 - floor) / tr, 0.0) + identity(n) * c64(floor / n as f64, 0.0);
    State::normalized(&mixed).expect("Wishart mixture is faithful")
}

/// Random completely positive map with `kraus` Gaussian Kraus operators.
pub fn cp_map<R: rand::Rng>(rng: &mut R, n: usize, kraus: usize) -> SuperOperator {
    let ops: Vec<ComplexMatrix> = (0..kraus)
        .map(|_| ginibre(rng, n, n) * c64(1.0 / (n as f64).sqrt(), 0.0))
        .collect();
    SuperOperator::from_kraus(&ops).expect("square Kraus operators")
}

/// Random unital completely positive map: `X -> sum_k p_k U_k X U_k*`.
pub fn unital_cp_map<R: rand::Rng>(rng: &mut R, n: usize, terms: usize) -> SuperOperator {
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    let ops: Vec<ComplexMatrix> = weights
        .iter()
        .map(|w| unitary(rng, n) * c64((w / total).sqrt(), 0.0))
        .collect();
    SuperOperator::from_kraus(&ops).expect("square Kraus operators")
}

/// Arbitrary (generally non-positive) linear map with Gaussian action matrix.
pub fn linear_map<R: rand::Rng>(rng: &mut R, n: usize) -> SuperOperator {
    SuperOperator::from_action(n, ginibre(rng, n * n, n * n)).expect("shape matches")
}
