//! Collocation solver for the discretized integral equation.
//!
//! With block-integral coefficients `Z1`, `Z2` of `β(x)` and `σ(x)`, the
//! equation collapses at the collocation times `t_j` to
//!
//! ```text
//! x_j = x0 + m² (H1[j][j] + H2[j][j]),   H1 = m K1ᵀ diag(Z1) P,   H2 = m K2ᵀ diag(Z2) P_S
//! ```
//!
//! using `T_W W(t_j) = m e_j`. Since `Z1`, `Z2` are pointwise images of the
//! collocation values (`m Z[j] = β(x_j)`), the nonlinear system is solved by
//! successive substitution on `x_j` directly.

use crate::brownian::BrownianPath;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::operational::{diag_lift, integration_matrix, stochastic_matrix, IntegrationMatrix};
use crate::problem::ProblemSpec;
use crate::walsh::{BasisConfig, CoefficientVector, KernelMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Sup-norm bound on the update of the collocation values.
    pub tol: f64,
    pub max_iter: usize,
    /// Relaxation factor used once the residual has grown between iterations.
    pub damping: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            damping: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub z1: CoefficientVector,
    pub z2: CoefficientVector,
    /// `x_m(t_j)` for each collocation time.
    pub x_colloc: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl SolveResult {
    pub fn m(&self) -> usize {
        self.x_colloc.len()
    }
}

/// `m Kᵀ diag(Z) M`.
pub fn assemble_h(k: &KernelMatrix, z: &CoefficientVector, mat: &Matrix) -> Result<Matrix> {
    let m = k.m();
    check_dim(m, z.m())?;
    check_dim(m, mat.rows())?;
    check_dim(m, mat.cols())?;
    Ok(k.entries()
        .transpose()
        .matmul(&diag_lift(z))?
        .matmul(mat)?
        .scale(m as f64))
}

/// Diagonal of [`assemble_h`] in `O(m²)`: `H[j][j] = m Σ_i K[i][j] Z[i] M[i][j]`.
pub fn assemble_h_diagonal(
    k: &KernelMatrix,
    z: &CoefficientVector,
    mat: &Matrix,
) -> Result<Vec<f64>> {
    let m = k.m();
    check_dim(m, z.m())?;
    check_dim(m, mat.rows())?;
    check_dim(m, mat.cols())?;
    let scale = m as f64;
    Ok((0..m)
        .map(|j| {
            // M is upper triangular for both operational matrices, but the sum
            // runs over all i so that general matrices are handled too.
            scale
                * (0..m)
                    .map(|i| k.get(i, j) * z.values()[i] * mat[(i, j)])
                    .sum::<f64>()
        })
        .collect())
}

/// `x_j = x0 + m² (H1[j][j] + H2[j][j])` from the two diagonals.
pub fn collocation_from_diagonals(d1: &[f64], d2: &[f64], x0: f64) -> Vec<f64> {
    let m = d1.len() as f64;
    let m2 = m * m;
    d1.iter().zip(d2).map(|(a, b)| x0 + m2 * (a + b)).collect()
}

pub fn collocation_values(h1: &Matrix, h2: &Matrix, x0: f64) -> Result<Vec<f64>> {
    check_dim(h1.rows(), h2.rows())?;
    check_dim(h1.rows(), h1.cols())?;
    check_dim(h2.rows(), h2.cols())?;
    let d1 = crate::operational::diag_extract(h1);
    let d2 = crate::operational::diag_extract(h2);
    Ok(collocation_from_diagonals(&d1, &d2, x0))
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// Path-independent parts of the system for one problem and resolution:
/// projected kernels and the integration matrix. Reused across Monte Carlo
/// trials.
#[derive(Debug, Clone)]
pub struct CollocationSystem<'p> {
    problem: &'p ProblemSpec,
    cfg: BasisConfig,
    k1: KernelMatrix,
    k2: KernelMatrix,
    p: IntegrationMatrix,
}

impl<'p> CollocationSystem<'p> {
    pub fn new(problem: &'p ProblemSpec, cfg: &BasisConfig) -> Result<Self> {
        Ok(Self {
            problem,
            cfg: cfg.clone(),
            k1: problem.k1.project(cfg)?,
            k2: problem.k2.project(cfg)?,
            p: integration_matrix(cfg),
        })
    }

    pub fn cfg(&self) -> &BasisConfig {
        &self.cfg
    }

    pub fn problem(&self) -> &ProblemSpec {
        self.problem
    }

    pub fn solve(&self, path: &BrownianPath, opts: &SolverOptions) -> Result<SolveResult> {
        let ps = stochastic_matrix(path, &self.cfg)?;
        let m = self.cfg.m();
        let h = self.cfg.h();
        let x0 = self.problem.x0;
        let beta = &self.problem.beta;
        let sigma = &self.problem.sigma;

        let images =
            |x: &[f64], iteration: usize| -> Result<(CoefficientVector, CoefficientVector)> {
                let mut z1 = Vec::with_capacity(m);
                let mut z2 = Vec::with_capacity(m);
                for (index, &xj) in x.iter().enumerate() {
                    let (b, s) = (beta(xj), sigma(xj));
                    if !(b.is_finite() && s.is_finite()) {
                        return Err(Error::NonFiniteIterate { index, iteration });
                    }
                    z1.push(h * b);
                    z2.push(h * s);
                }
                Ok((CoefficientVector::new(z1), CoefficientVector::new(z2)))
            };

        let mut x = vec![x0; m];
        let mut prev_residual = f64::INFINITY;
        let mut damped = false;
        for iteration in 1..=opts.max_iter {
            let (z1, z2) = images(&x, iteration)?;
            let d1 = assemble_h_diagonal(&self.k1, &z1, self.p.matrix())?;
            let d2 = assemble_h_diagonal(&self.k2, &z2, ps.matrix())?;
            let candidate = collocation_from_diagonals(&d1, &d2, x0);

            let lambda = if damped { opts.damping } else { 1.0 };
            let mut residual = 0.0f64;
            for (index, (xj, cj)) in x.iter_mut().zip(&candidate).enumerate() {
                let next = *xj + lambda * (cj - *xj);
                if !next.is_finite() {
                    return Err(Error::NonFiniteIterate { index, iteration });
                }
                residual = residual.max((next - *xj).abs());
                *xj = next;
            }

            if residual <= opts.tol {
                let (z1, z2) = images(&x, iteration)?;
                return Ok(SolveResult {
                    z1,
                    z2,
                    x_colloc: x,
                    iterations: iteration,
                    residual,
                });
            }
            if residual > prev_residual {
                damped = true;
            }
            prev_residual = residual;
        }
        Err(Error::NonConvergence {
            iterations: opts.max_iter,
            residual: prev_residual,
        })
    }
}

/// Solves `problem` on `path` at resolution `cfg`.
pub fn solve(
    problem: &ProblemSpec,
    path: &BrownianPath,
    cfg: &BasisConfig,
    opts: &SolverOptions,
) -> Result<SolveResult> {
    CollocationSystem::new(problem, cfg)?.solve(path, opts)
}

/// Block-constant reconstruction `x_m(t) = x_colloc[⌊t/h⌋]`.
pub fn reconstruct(result: &SolveResult, t: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&t) {
        return Err(Error::TimeOutOfRange(t));
    }
    let m = result.m();
    let block = ((t * m as f64).floor() as usize).min(m - 1);
    Ok(result.x_colloc[block])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::{sample_path, sample_trial_path};
    use crate::problem::{
        builtin_example, builtin_example_with_amplitude, exponential_growth, Kernel,
    };
    use crate::walsh::{project_constant_kernel, project_kernel};
    use std::sync::Arc;

    fn cfg(m: usize) -> BasisConfig {
        BasisConfig::with_resolution(m).unwrap()
    }

    #[test]
    fn assemble_h_examples() {
        let c = cfg(4);
        let k = project_constant_kernel(2.0, &c);
        let p = integration_matrix(&c);
        let zero = assemble_h(&k, &CoefficientVector::zeros(4), p.matrix()).unwrap();
        assert_eq!(zero, Matrix::zeros(4, 4));

        // m = 1, h = 1: K = [[c]], M = [[1/2]] gives [[c z / 2]]
        let c1 = cfg(1);
        let (cval, z) = (3.0, 0.7);
        let h = assemble_h(
            &project_constant_kernel(cval, &c1),
            &CoefficientVector::new(vec![z]),
            integration_matrix(&c1).matrix(),
        )
        .unwrap();
        assert!((h[(0, 0)] - cval * z / 2.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_shortcut_matches_full_product() {
        let c = cfg(8);
        let k = project_kernel(|s, t| (s - 2.0 * t).cos() + s * t, &c).unwrap();
        let z = CoefficientVector::new((0..8).map(|i| (i as f64 * 0.7).sin() / 8.0).collect());
        let path = sample_path(&c, 17);
        for mat in [
            integration_matrix(&c).matrix().clone(),
            stochastic_matrix(&path, &c).unwrap().matrix().clone(),
        ] {
            let full = assemble_h(&k, &z, &mat).unwrap();
            let diag = assemble_h_diagonal(&k, &z, &mat).unwrap();
            for j in 0..8 {
                assert!((full[(j, j)] - diag[j]).abs() < 1e-15);
                // expanded definition
                let direct: f64 = 8.0
                    * (0..8)
                        .map(|i| k.get(i, j) * z.values()[i] * mat[(i, j)])
                        .sum::<f64>();
                assert!((direct - diag[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn assemble_h_dimension_mismatch() {
        let c = cfg(4);
        let k = project_constant_kernel(1.0, &c);
        let err = assemble_h(
            &k,
            &CoefficientVector::zeros(2),
            integration_matrix(&c).matrix(),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn collocation_values_examples() {
        let z = Matrix::zeros(3, 3);
        assert_eq!(collocation_values(&z, &z, 0.4).unwrap(), vec![0.4; 3]);
        let h1 = Matrix::from_rows(&[&[0.25]]);
        let h2 = Matrix::from_rows(&[&[-0.5]]);
        assert_eq!(collocation_values(&h1, &h2, 1.0).unwrap(), vec![0.75]);
    }

    /// Implicit midpoint-rectangle recursion for x' = x, x(0) = 1.
    fn rectangle_recursion(m: usize) -> Vec<f64> {
        let h = 1.0 / m as f64;
        let mut x: Vec<f64> = Vec::with_capacity(m);
        for _ in 0..m {
            let acc: f64 = 1.0 + x.iter().map(|v| h * v).sum::<f64>();
            x.push(acc / (1.0 - 0.5 * h));
        }
        x
    }

    #[test]
    fn deterministic_linear_case_reproduces_rectangle_recursion() {
        let c = cfg(4);
        let problem = exponential_growth();
        let r = solve(
            &problem,
            &BrownianPath::zero(&c),
            &c,
            &SolverOptions::default(),
        )
        .unwrap();
        for (a, b) in r.x_colloc.iter().zip(rectangle_recursion(4)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_reduction_tracks_exponential() {
        let c = cfg(32);
        let r = solve(
            &exponential_growth(),
            &sample_path(&c, 1),
            &c,
            &SolverOptions::default(),
        )
        .unwrap();
        let err = r
            .x_colloc
            .iter()
            .zip(c.midpoints())
            .map(|(x, t)| (x - t.exp()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 0.05, "sup error {err}");
    }

    #[test]
    fn trivial_fixed_points() {
        let c = cfg(16);
        let opts = SolverOptions::default();
        let r = solve(
            &builtin_example(1).unwrap(),
            &BrownianPath::zero(&c),
            &c,
            &opts,
        )
        .unwrap();
        assert!(r.x_colloc.iter().all(|x| x.abs() <= opts.tol));

        let flat = builtin_example_with_amplitude(2, 0.0).unwrap();
        let r = solve(&flat, &sample_path(&c, 4), &c, &opts).unwrap();
        assert!(r.x_colloc.iter().all(|x| (x - 0.1).abs() <= opts.tol));
    }

    #[test]
    fn converged_result_is_self_consistent() {
        let c = cfg(32);
        for id in [1, 2] {
            let p = builtin_example(id).unwrap();
            let path = sample_trial_path(&c, 8, id as u64);
            let r = solve(&p, &path, &c, &SolverOptions::default()).unwrap();
            assert!(r.residual <= 1e-12);
            for j in 0..32 {
                assert!((r.z1.block_value(j) - (p.beta)(r.x_colloc[j])).abs() < 1e-12);
                assert!((r.z2.block_value(j) - (p.sigma)(r.x_colloc[j])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn causality_under_future_perturbation() {
        let c = cfg(16);
        let p = builtin_example(2).unwrap();
        let path = sample_path(&c, 21);
        let base = solve(&p, &path, &c, &SolverOptions::default()).unwrap();
        let cut = 7;
        // change every path value strictly after block `cut`
        let mut values = path.values().to_vec();
        for v in values.iter_mut().skip(2 * cut + 2) {
            *v += 0.5;
        }
        let perturbed = BrownianPath::from_values(&c, values).unwrap();
        let other = solve(&p, &perturbed, &c, &SolverOptions::default()).unwrap();
        assert_eq!(&base.x_colloc[..=cut], &other.x_colloc[..=cut]);
        assert_ne!(base.x_colloc[cut + 1], other.x_colloc[cut + 1]);
    }

    #[test]
    fn non_finite_iterates_are_reported() {
        let c = cfg(8);
        let mut p = exponential_growth();
        p.beta = Arc::new(|x: f64| if x > 1.05 { f64::NAN } else { x });
        let err = solve(&p, &BrownianPath::zero(&c), &c, &SolverOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIterate { .. }));
    }

    #[test]
    fn non_convergence_is_reported() {
        let c = cfg(4);
        let mut p = exponential_growth();
        // diagonal coupling 50 h / 2 > 1 makes substitution diverge
        p.k1 = Kernel::Constant(50.0);
        let opts = SolverOptions {
            max_iter: 15,
            ..SolverOptions::default()
        };
        match solve(&p, &BrownianPath::zero(&c), &c, &opts) {
            Err(Error::NonConvergence {
                iterations,
                residual,
            }) => {
                assert_eq!(iterations, 15);
                assert!(residual > opts.tol);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn path_grid_must_match() {
        let p = builtin_example(1).unwrap();
        let path = sample_path(&cfg(8), 1);
        assert!(solve(&p, &path, &cfg(16), &SolverOptions::default()).is_err());
    }

    #[test]
    fn reconstruct_is_block_constant() {
        let c = cfg(8);
        let p = builtin_example(2).unwrap();
        let r = solve(&p, &sample_path(&c, 2), &c, &SolverOptions::default()).unwrap();
        for (j, &t) in c.midpoints().iter().enumerate() {
            assert_eq!(reconstruct(&r, t).unwrap(), r.x_colloc[j]);
            assert_eq!(reconstruct(&r, j as f64 * c.h()).unwrap(), r.x_colloc[j]);
        }
        assert_eq!(reconstruct(&r, 0.0).unwrap(), r.x_colloc[0]);
        assert!(reconstruct(&r, 1.0).is_err());
        assert!(reconstruct(&r, -1e-9).is_err());
    }
}
