//! Euler–Maruyama reference solution on the full grid `{jh}`, driven by the
//! same Brownian path as the collocation solver.
//!
//! ```text
//! y_{j+1} = y_j + k1(jh, (j+1)h) β(y_j) h + k2(jh, (j+1)h) σ(y_j) (B((j+1)h) - B(jh))
//! ```
//!
//! The kernel's second argument is frozen at the end of the step, which is
//! exact for constant kernels and only approximate when the kernel depends
//! strongly on `t`.

use crate::brownian::BrownianPath;
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::solver::SolveResult;
use crate::walsh::BasisConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Grid times `jh`, `j = 0 ..= m`.
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Average of the two iterates bracketing each collocation time.
    pub midpoint_values: Vec<f64>,
}

pub fn euler_maruyama(
    problem: &ProblemSpec,
    path: &BrownianPath,
    cfg: &BasisConfig,
) -> Result<OracleResult> {
    path.matches(cfg)?;
    let m = cfg.m();
    let h = cfg.h();
    let grid: Vec<f64> = (0..=m).map(|j| j as f64 * h).collect();
    let mut values = Vec::with_capacity(m + 1);
    let mut y = problem.x0;
    values.push(y);
    for j in 0..m {
        let (s, t) = (grid[j], grid[j + 1]);
        let db = path.at_half_step(2 * j + 2) - path.at_half_step(2 * j);
        y += problem.k1.eval(s, t) * (problem.beta)(y) * h
            + problem.k2.eval(s, t) * (problem.sigma)(y) * db;
        if !y.is_finite() {
            return Err(Error::NonFiniteIterate {
                index: j + 1,
                iteration: 0,
            });
        }
        values.push(y);
    }
    let midpoint_values = values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    Ok(OracleResult {
        grid,
        values,
        midpoint_values,
    })
}

/// `max_j |x_colloc[j] - midpoint_values[j]|`.
pub fn midpoint_discrepancy(result: &SolveResult, oracle: &OracleResult) -> Result<f64> {
    if result.x_colloc.len() != oracle.midpoint_values.len() {
        return Err(Error::DimensionMismatch {
            expected: oracle.midpoint_values.len(),
            actual: result.x_colloc.len(),
        });
    }
    Ok(result
        .x_colloc
        .iter()
        .zip(&oracle.midpoint_values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
