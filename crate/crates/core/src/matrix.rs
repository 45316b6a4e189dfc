//! Dense complex matrix kernel.
//!
//! Matrices are `nalgebra` dynamic matrices over `Complex64`. Everything here
//! is a pure function of its inputs; the only cached state lives in
//! [`PositiveMatrix`], which keeps its eigendecomposition around so that
//! repeated fractional powers of the same density are cheap.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Relative threshold below which Hermitian asymmetry is silently repaired.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative threshold for treating an eigenvalue or singular value as zero.
pub const SUPPORT_TOL: f64 = 1e-12;

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// The matrix unit `E_ij` (zero-based indices).
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(n, n);
    e[(i, j)] = C64::new(1.0, 0.0);
    e
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(values[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn check_finite(x: &ComplexMatrix) -> Result<()> {
    if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn check_square(x: &ComplexMatrix) -> Result<usize> {
    if x.nrows() == x.ncols() {
        Ok(x.nrows())
    } else {
        Err(Error::NotSquare {
            rows: x.nrows(),
            cols: x.ncols(),
        })
    }
}

pub fn max_abs(x: &ComplexMatrix) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `Re tr(a* b)`, the real Hilbert–Schmidt pairing.
pub fn re_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn trace(x: &ComplexMatrix) -> C64 {
    x.diagonal().iter().sum()
}

/// Standard Kronecker product; block `(i, j)` of the result is `x[(i, j)] * y`.
pub fn kron(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    x.kronecker(y)
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::InvalidExponent {
            got: p,
            expected: "1 <= p <= inf",
        })
    } else {
        Ok(())
    }
}

/// Conjugate exponent `p / (p - 1)`, with `1 <-> inf`.
pub fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Singular value decomposition `X = U diag(sigma) V*` with the singular values
/// sorted in descending order (stable with respect to the underlying solver's
/// ordering on ties).
#[derive(Debug, Clone)]
pub struct SingularSystem {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v_adj: ComplexMatrix,
}

impl SingularSystem {
    pub fn new(x: &ComplexMatrix) -> Result<Self> {
        check_finite(x)?;
        let svd = SVD::new_unordered(x.clone(), true, true);
        let u = svd.u.expect("left singular vectors requested");
        let v_t = svd.v_t.expect("right singular vectors requested");
        let raw: Vec<f64> = svd.singular_values.iter().copied().collect();

        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]));

        let k = raw.len();
        let sorted_u = ComplexMatrix::from_fn(u.nrows(), k, |r, c| u[(r, order[c])]);
        let sorted_vt = ComplexMatrix::from_fn(k, v_t.ncols(), |r, c| v_t[(order[r], c)]);
        let sigma = order.iter().map(|&i| raw[i]).collect();
        Ok(Self {
            u: sorted_u,
            sigma,
            v_adj: sorted_vt,
        })
    }

    pub fn max(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// `U diag(weights) V*`.
    pub fn recompose(&self, weights: &[f64]) -> ComplexMatrix {
        let mut scaled = self.u.clone();
        for (mut col, &w) in scaled.column_iter_mut().zip(weights) {
            col *= C64::new(w, 0.0);
        }
        scaled * &self.v_adj
    }

    /// `(sum sigma_i^p)^(1/p)`, computed relative to the largest singular value.
    pub fn schatten(&self, p: f64) -> f64 {
        let top = self.max();
        if top == 0.0 {
            return 0.0;
        }
        if p.is_infinite() {
            return top;
        }
        let sum: f64 = self.sigma.iter().map(|s| (s / top).powf(p)).sum();
        top * sum.powf(1.0 / p)
    }
}

/// Singular values in descending order.
pub fn singular_values(x: &ComplexMatrix) -> Result<Vec<f64>> {
    check_finite(x)?;
    let mut s: Vec<f64> = x.singular_values_unordered().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Schatten p-norm; `p = f64::INFINITY` gives the operator norm.
pub fn schatten_norm(x: &ComplexMatrix, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let s = singular_values(x)?;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0.0);
    }
    if p.is_infinite() {
        return Ok(top);
    }
    let sum: f64 = s.iter().map(|v| (v / top).powf(p)).sum();
    Ok(top * sum.powf(1.0 / p))
}

pub fn operator_norm(x: &ComplexMatrix) -> Result<f64> {
    schatten_norm(x, f64::INFINITY)
}

/// Norming element of `x` in the dual class `S^q`: returns `z` with
/// `||z||_q = 1` and `Re tr(z* x) = ||x||_p`.
///
/// At `p = 1` this is the polar factor on the numerical support of `x`; at
/// `p = inf` it is the rank-one projector onto the leading singular pair.
pub fn dual_element(x: &ComplexMatrix, p: f64) -> Result<ComplexMatrix> {
    check_exponent(p)?;
    let sys = SingularSystem::new(x)?;
    let top = sys.max();
    if top == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let weights: Vec<f64> = if p == 1.0 {
        sys.sigma
            .iter()
            .map(|&s| if s > SUPPORT_TOL * top { 1.0 } else { 0.0 })
            .collect()
    } else if p.is_infinite() {
        (0..sys.sigma.len())
            .map(|i| if i == 0 { 1.0 } else { 0.0 })
            .collect()
    } else {
        let norm = sys.schatten(p);
        sys.sigma
            .iter()
            .map(|&s| (s / norm).powf(p - 1.0))
            .collect()
    };
    Ok(sys.recompose(&weights))
}

/// Hermitian positive semidefinite matrix with its cached eigendecomposition.
#[derive(Debug, Clone)]
pub struct PositiveMatrix {
    entries: ComplexMatrix,
    spectrum: Vec<f64>,
    frame: ComplexMatrix,
}

impl PositiveMatrix {
    /// Symmetrizes `h` as `(h + h*)/2` after checking that the asymmetry is
    /// below `1e-12` relative, then clips eigenvalues in `[-1e-12 lambda_max, 0)`.
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        check_finite(h)?;
        check_square(h)?;
        let scale = max_abs(h);
        let asymmetry = max_abs(&(h - h.adjoint()));
        if asymmetry > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { asymmetry, scale });
        }
        let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(sym);
        let raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let mut order: Vec<usize> = (0..raw.len()).collect();
        order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]));

        let top = raw[order[0]].max(0.0);
        let bottom = raw[order[raw.len() - 1]];
        if bottom < -HERMITIAN_TOL * top || (top == 0.0 && bottom < 0.0) {
            return Err(Error::NotPositive {
                min_eigenvalue: bottom,
            });
        }
        let spectrum: Vec<f64> = order.iter().map(|&i| raw[i].max(0.0)).collect();
        let vecs = &eig.eigenvectors;
        let frame = ComplexMatrix::from_fn(vecs.nrows(), vecs.ncols(), |r, c| vecs[(r, order[c])]);
        let entries = reconstruct(&frame, &spectrum);
        Ok(Self {
            entries,
            spectrum,
            frame,
        })
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.entries
    }

    /// Eigenvalues in descending order.
    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn frame(&self) -> &ComplexMatrix {
        &self.frame
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.spectrum[0]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum[self.spectrum.len() - 1]
    }

    /// True when the smallest eigenvalue exceeds `1e-12` times the largest.
    pub fn is_definite(&self) -> bool {
        self.min_eigenvalue() > SUPPORT_TOL * self.max_eigenvalue()
    }

    /// `frame * diag(spectrum^s) * frame*`.
    pub fn frac_power(&self, s: f64) -> Result<PositiveMatrix> {
        if !s.is_finite() {
            return Err(Error::InvalidParameter(format!("power {s} is not finite")));
        }
        if s < 0.0 && !self.is_definite() {
            return Err(Error::Singular {
                power: s,
                ratio: self.min_eigenvalue() / self.max_eigenvalue(),
            });
        }
        let powered: Vec<f64> = self.spectrum.iter().map(|&l| l.powf(s)).collect();
        let mut order: Vec<usize> = (0..powered.len()).collect();
        order.sort_by(|&a, &b| powered[b].total_cmp(&powered[a]));
        let spectrum: Vec<f64> = order.iter().map(|&i| powered[i]).collect();
        let frame = ComplexMatrix::from_fn(self.frame.nrows(), self.frame.ncols(), |r, c| {
            self.frame[(r, order[c])]
        });
        let entries = reconstruct(&frame, &spectrum);
        Ok(PositiveMatrix {
            entries,
            spectrum,
            frame,
        })
    }
}

fn reconstruct(frame: &ComplexMatrix, spectrum: &[f64]) -> ComplexMatrix {
    let mut scaled = frame.clone();
    for (mut col, &l) in scaled.column_iter_mut().zip(spectrum) {
        col *= C64::new(l, 0.0);
    }
    let m = scaled * frame.adjoint();
    (&m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Largest eigenvalue of the Hermitian part of `h`.
pub fn hermitian_max_eigenvalue(h: &ComplexMatrix) -> f64 {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest eigenvalue of the Hermitian part of `h`.
pub fn hermitian_min_eigenvalue(h: &ComplexMatrix) -> f64 {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
