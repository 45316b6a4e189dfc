//! Linear maps on `M_n`, faithful states, Choi matrices and the
//! state-compatibility constants.
//!
//! Vectorization is column-stacking throughout: `vec(X)[i + j n] = X[i, j]`,
//! which is exactly the storage order of a column-major `nalgebra` matrix. The
//! action matrix of a map sends `vec(X)` to `vec(T(X))`, so its column
//! `i + j n` holds `vec(T(E_ij))`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{
    self, c64, check_finite, check_square, hermitian_max_eigenvalue, hermitian_min_eigenvalue,
    matrix_unit, ComplexMatrix, PositiveMatrix, C64,
};

/// Tolerance of the Choi test used by [`compatibility`].
pub const CP_TOL: f64 = 1e-10;
/// Tolerance for `||T(I) - I||_inf` in the unitality test.
pub const UNITAL_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-12;

/// Faithful state `phi(X) = tr(Gamma X)` on `M_n`.
#[derive(Debug, Clone)]
pub struct State {
    gamma: PositiveMatrix,
}

impl State {
    /// Requires `tr(Gamma) = 1` within `1e-12` and
    /// `lambda_min > 1e-12 lambda_max`.
    pub fn new(gamma: &ComplexMatrix) -> Result<Self> {
        let gamma = PositiveMatrix::new(gamma)?;
        let tr: f64 = gamma.spectrum().iter().sum();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotFaithful(format!("trace is {tr}, expected 1")));
        }
        if !gamma.is_definite() {
            return Err(Error::NotFaithful(format!(
                "smallest eigenvalue {:e} is not positive",
                gamma.min_eigenvalue()
            )));
        }
        Ok(Self { gamma })
    }

    /// Divides a positive matrix by its trace before validating.
    pub fn normalized(h: &ComplexMatrix) -> Result<Self> {
        let tr = matrix::trace(h).re;
        if !(tr > 0.0) {
            return Err(Error::NotFaithful(format!("trace is {tr}")));
        }
        let scaled = h / c64(tr, 0.0);
        // Renormalize through the spectrum so the trace check is exact to rounding.
        let pos = PositiveMatrix::new(&scaled)?;
        let sum: f64 = pos.spectrum().iter().sum();
        Self::new(&(pos.matrix() / c64(sum, 0.0)))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::new(&(matrix::identity(n) / c64(n as f64, 0.0))).expect("I/n is faithful")
    }

    pub fn dim(&self) -> usize {
        self.gamma.dim()
    }

    pub fn density(&self) -> &PositiveMatrix {
        &self.gamma
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.gamma.matrix()
    }

    /// `phi(x) = tr(Gamma x)`.
    pub fn expectation(&self, x: &ComplexMatrix) -> C64 {
        matrix::trace(&(self.gamma.matrix() * x))
    }

    pub fn power(&self, s: f64) -> Result<PositiveMatrix> {
        self.gamma.frac_power(s)
    }
}

/// Linear map `T: M_n -> M_n` stored by its `n^2 x n^2` action matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    action: ComplexMatrix,
}

impl SuperOperator {
    pub fn from_action(dim: usize, action: ComplexMatrix) -> Result<Self> {
        let n2 = dim * dim;
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        if action.nrows() != n2 || action.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                got: if action.nrows() != n2 {
                    action.nrows()
                } else {
                    action.ncols()
                },
            });
        }
        check_finite(&action)?;
        Ok(Self { dim, action })
    }

    /// Builds the map from its values on the matrix units.
    pub fn from_fn<F>(dim: usize, mut f: F) -> Self
    where
        F: FnMut(&ComplexMatrix) -> ComplexMatrix,
    {
        let n2 = dim * dim;
        let mut action = ComplexMatrix::zeros(n2, n2);
        for j in 0..dim {
            for i in 0..dim {
                let image = f(&matrix_unit(dim, i, j));
                assert_eq!(image.shape(), (dim, dim), "image has wrong shape");
                action.column_mut(i + j * dim).copy_from_slice(image.as_slice());
            }
        }
        Self { dim, action }
    }

    /// Inverse of [`choi_matrix`](Self::choi_matrix): block `(i, j)` of `choi`
    /// is taken as `T(E_ij)`.
    pub fn from_choi(dim: usize, choi: &ComplexMatrix) -> Result<Self> {
        let n2 = dim * dim;
        if choi.nrows() != n2 || choi.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                got: choi.nrows(),
            });
        }
        check_finite(choi)?;
        let mut action = ComplexMatrix::zeros(n2, n2);
        for j in 0..dim {
            for i in 0..dim {
                let block = choi.view((i * dim, j * dim), (dim, dim)).into_owned();
                action.column_mut(i + j * dim).copy_from_slice(block.as_slice());
            }
        }
        Ok(Self { dim, action })
    }

    /// `X -> sum_k K_k X K_k*`.
    pub fn from_kraus(ops: &[ComplexMatrix]) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidParameter("no Kraus operators".into()))?;
        let dim = check_square(first)?;
        for k in ops {
            if check_square(k)? != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.nrows(),
                });
            }
            check_finite(k)?;
        }
        Ok(Self::from_fn(dim, |x| {
            ops.iter()
                .map(|k| k * x * k.adjoint())
                .fold(ComplexMatrix::zeros(dim, dim), |acc, y| acc + y)
        }))
    }

    pub fn identity(dim: usize) -> Self {
        let n2 = dim * dim;
        Self {
            dim,
            action: ComplexMatrix::identity(n2, n2),
        }
    }

    pub fn transpose(dim: usize) -> Self {
        Self::from_fn(dim, |x| x.transpose())
    }

    /// `Y -> A Y B`, whose action matrix is `B^T (x) A`.
    pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        let dim = check_square(a)?;
        if check_square(b)? != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: b.nrows(),
            });
        }
        Ok(Self {
            dim,
            action: b.transpose().kronecker(a),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action_matrix(&self) -> &ComplexMatrix {
        &self.action
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: if x.nrows() != self.dim { x.nrows() } else { x.ncols() },
            });
        }
        let v = &self.action * ComplexMatrix::from_column_slice(self.dim * self.dim, 1, x.as_slice());
        Ok(ComplexMatrix::from_column_slice(self.dim, self.dim, v.as_slice()))
    }

    /// Block matrix `[T(E_ij)]`.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut choi = ComplexMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let col = self.action.column(i + j * n);
                let block = ComplexMatrix::from_column_slice(n, n, col.as_slice());
                choi.view_mut((i * n, j * n), (n, n)).copy_from(&block);
            }
        }
        choi
    }

    /// Hilbert–Schmidt adjoint: `tr(Y* T(X)) = tr(T*(Y)* X)`.
    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            action: self.action.adjoint(),
        }
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &SuperOperator) -> Result<Self> {
        if inner.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: inner.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            action: &self.action * &inner.action,
        })
    }

    pub fn scaled(&self, alpha: C64) -> Self {
        Self {
            dim: self.dim,
            action: &self.action * alpha,
        }
    }

    /// Choi test: the Choi matrix is Hermitian and
    /// `lambda_min >= -tol * max(1, lambda_max)`.
    pub fn is_completely_positive(&self, tol: f64) -> bool {
        let choi = self.choi_matrix();
        let scale = matrix::max_abs(&choi).max(1.0);
        if matrix::max_abs(&(&choi - choi.adjoint())) > tol * scale {
            return false;
        }
        let top = hermitian_max_eigenvalue(&choi);
        hermitian_min_eigenvalue(&choi) >= -tol * top.max(1.0)
    }

    /// Largest singular value of the action matrix, i.e. the `S^2 -> S^2` norm.
    pub fn hilbert_schmidt_norm(&self) -> f64 {
        matrix::operator_norm(&self.action).expect("action matrix is finite")
    }
}

/// Constants appearing in the norm bounds for `T` relative to a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompatibilityReport {
    /// Least `C` with `phi o T <= C phi` on the positive cone.
    pub c1: f64,
    /// `||T||`; exact as `||T(I)||_inf` for positive maps.
    pub c_inf: f64,
    /// Set when the Choi test failed and `c_inf` is the action-matrix proxy.
    pub c_inf_estimated: bool,
    pub unital: bool,
    pub completely_positive: bool,
}

pub fn compatibility(t: &SuperOperator, state: &State) -> Result<CompatibilityReport> {
    if state.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: state.dim(),
        });
    }
    let completely_positive = t.is_completely_positive(CP_TOL);

    let pulled_back = t.adjoint().apply(state.matrix())?;
    let inv_sqrt = state.power(-0.5)?;
    let conj = inv_sqrt.matrix() * pulled_back * inv_sqrt.matrix();
    let c1 = hermitian_max_eigenvalue(&conj).max(0.0);

    let id = matrix::identity(t.dim());
    let t_id = t.apply(&id)?;
    let unital = matrix::operator_norm(&(&t_id - &id))? <= UNITAL_TOL;
    let (c_inf, c_inf_estimated) = if completely_positive {
        (matrix::operator_norm(&t_id)?, false)
    } else {
        (t.hilbert_schmidt_norm(), true)
    };
    Ok(CompatibilityReport {
        c1,
        c_inf,
        c_inf_estimated,
        unital,
        completely_positive,
    })
}
