//! JSON encodings.
//!
//! Complex entries are `[re, im]` pairs and matrices are arrays of rows.
//! A superoperator file is `{"dim": n, "kind": "choi" | "action", "data": M}`
//! with `M` of size `n^2 x n^2`; a state file is `{"dim": n, "gamma": G}` with
//! `G` of size `n x n`.

use serde::{Deserialize, Serialize};

use crate::cpmap::{State, SuperOperator};
use crate::error::{Error, Result};
use crate::matrix::{c64, ComplexMatrix};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuperOpKind {
    Choi,
    Action,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperOpJson {
    pub dim: usize,
    pub kind: SuperOpKind,
    pub data: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dim: usize,
    pub gamma: MatrixJson,
}

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::InvalidParameter("matrix must be non-empty".into()));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch {
            expected: ncols,
            got: bad.len(),
        });
    }
    let m = ComplexMatrix::from_fn(nrows, ncols, |i, j| c64(rows[i][j][0], rows[i][j][1]));
    crate::matrix::check_finite(&m)?;
    Ok(m)
}

impl SuperOpJson {
    pub fn from_superop(t: &SuperOperator, kind: SuperOpKind) -> Self {
        let data = match kind {
            SuperOpKind::Choi => matrix_to_json(&t.choi_matrix()),
            SuperOpKind::Action => matrix_to_json(t.action_matrix()),
        };
        Self {
            dim: t.dim(),
            kind,
            data,
        }
    }

    pub fn to_superop(&self) -> Result<SuperOperator> {
        let m = matrix_from_json(&self.data)?;
        let n2 = self.dim * self.dim;
        if m.nrows() != n2 || m.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                got: m.nrows(),
            });
        }
        match self.kind {
            SuperOpKind::Choi => SuperOperator::from_choi(self.dim, &m),
            SuperOpKind::Action => SuperOperator::from_action(self.dim, m),
        }
    }
}

impl StateJson {
    pub fn from_state(s: &State) -> Self {
        Self {
            dim: s.dim(),
            gamma: matrix_to_json(s.matrix()),
        }
    }

    pub fn to_state(&self) -> Result<State> {
        let g = matrix_from_json(&self.gamma)?;
        if g.nrows() != self.dim || g.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: g.nrows(),
            });
        }
        State::new(&g)
    }
}

pub fn parse_superop(text: &str) -> Result<SuperOperator> {
    serde_json::from_str::<SuperOpJson>(text)?.to_superop()
}

pub fn parse_state(text: &str) -> Result<State> {
    serde_json::from_str::<StateJson>(text)?.to_state()
}
