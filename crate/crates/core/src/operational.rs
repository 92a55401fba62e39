//! Operational matrices for block pulse functions: deterministic integration
//! `P`, Itô integration `P_S` driven by a sampled path, and their Walsh-domain
//! forms `(1/m) T_W M T_W`.
//!
//! Both `P` and `P_S` are upper triangular: the integral up to a collocation
//! time never depends on later blocks.

use crate::brownian::BrownianPath;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::walsh::{BasisConfig, CoefficientVector, WalshMatrix};

/// `P` with `P[i][i] = h/2` and `P[i][j] = h` for `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationMatrix(Matrix);

/// `P_S` with `P_S[j][j] = B(t_j) - B(jh)` and `P_S[i][j] = B((i+1)h) - B(ih)`
/// for `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix(Matrix);

impl IntegrationMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

impl StochasticMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

impl AsRef<Matrix> for IntegrationMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

impl AsRef<Matrix> for StochasticMatrix {
    fn as_ref(&self) -> &Matrix {
        &self.0
    }
}

pub fn integration_matrix(cfg: &BasisConfig) -> IntegrationMatrix {
    let h = cfg.h();
    IntegrationMatrix(Matrix::from_fn(cfg.m(), cfg.m(), |i, j| {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => h,
            Equal => 0.5 * h,
            Greater => 0.0,
        }
    }))
}

pub fn stochastic_matrix(path: &BrownianPath, cfg: &BasisConfig) -> Result<StochasticMatrix> {
    path.matches(cfg)?;
    let b = |j: usize| path.at_half_step(j);
    Ok(StochasticMatrix(Matrix::from_fn(
        cfg.m(),
        cfg.m(),
        |i, j| {
            use std::cmp::Ordering::*;
            match i.cmp(&j) {
                // full-block increment B((i+1)h) - B(ih)
                Less => b(2 * i + 2) - b(2 * i),
                // half-block increment B(t_j) - B(jh)
                Equal => b(2 * j + 1) - b(2 * j),
                Greater => 0.0,
            }
        },
    )))
}

/// `(1/m) T_W M T_W`. Applying it twice returns `M`.
pub fn walsh_domain(matrix: &Matrix, tw: &WalshMatrix) -> Result<Matrix> {
    let m = tw.m();
    if matrix.rows() != m || matrix.cols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: if matrix.rows() != m {
                matrix.rows()
            } else {
                matrix.cols()
            },
        });
    }
    let t = tw.to_matrix();
    Ok(t.matmul(matrix)?.matmul(&t)?.scale(1.0 / m as f64))
}

pub fn diag_lift(v: &CoefficientVector) -> Matrix {
    let m = v.m();
    let mut out = Matrix::zeros(m, m);
    for (i, &x) in v.values().iter().enumerate() {
        out[(i, i)] = x;
    }
    out
}

pub fn diag_extract(matrix: &Matrix) -> Vec<f64> {
    (0..matrix.rows().min(matrix.cols()))
        .map(|i| matrix[(i, i)])
        .collect()
}
