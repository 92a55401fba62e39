//! Walsh-function operational-matrix collocation for nonlinear stochastic
//! Volterra integral equations
//!
//! ```text
//! x(t) = x0 + ∫_0^t k1(s,t) β(x(s)) ds + ∫_0^t k2(s,t) σ(x(s)) dB(s),   t ∈ [0, 1)
//! ```
//!
//! The unknown and the nonlinear images `β(x)`, `σ(x)` are expanded in the
//! first `m = 2^k` Walsh functions (equivalently, block pulse functions), both
//! integrals become operational matrices, and the resulting algebraic system
//! is collocated at the block midpoints and solved by fixed-point iteration.
//!
//! Modules, bottom up:
//!
//! * [`walsh`]: Rademacher/Walsh functions, `T_W`, block-integral projections.
//! * [`operational`]: integration matrices `P`, `P_S` and their Walsh forms.
//! * [`brownian`]: seeded Brownian paths on the half-step grid.
//! * [`solver`]: assembly, collocation and the fixed-point solve.
//! * [`oracle`]: Euler–Maruyama reference driven by the same path.
//! * [`experiment`]: Monte Carlo error statistics and convergence orders.
//! * [`problem`], [`problem_file`], [`expr`]: problem definitions.

pub mod brownian;
pub mod error;
pub mod experiment;
pub mod expr;
pub mod matrix;
pub mod operational;
pub mod oracle;
pub mod problem;
pub mod problem_file;
mod quadrature;
pub mod solver;
pub mod walsh;

pub use brownian::{sample_path, sample_trial_path, BrownianPath};
pub use error::{Error, Result};
pub use experiment::{
    coefficient_error_norm, convergence_study, error_at, monte_carlo, ConvergenceReport,
    ErrorStats, MonteCarloReport, PathAnchor, REPORT_TIMES,
};
pub use matrix::Matrix;
pub use operational::{
    diag_extract, diag_lift, integration_matrix, stochastic_matrix, walsh_domain,
    IntegrationMatrix, StochasticMatrix,
};
pub use oracle::{euler_maruyama, OracleResult};
pub use problem::{builtin_example, builtin_example_with_amplitude, Kernel, ProblemSpec};
pub use problem_file::{parse_problem, parse_problem_file};
pub use solver::{reconstruct, solve, CollocationSystem, SolveResult, SolverOptions};
pub use walsh::{
    build_walsh_matrix, project_function, project_kernel, rademacher, walsh, BasisConfig,
    CoefficientVector, KernelMatrix, WalshMatrix,
};
