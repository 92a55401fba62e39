//! Monte Carlo error statistics and convergence-order estimation.
//!
//! Trial `i` (1-based) of an experiment runs on the path
//! `sample_trial_path(cfg, base_seed, i)`, so results depend only on
//! `(base_seed, n, cfg)` and trials run in parallel without affecting the
//! aggregated numbers.

use rayon::prelude::*;

use crate::brownian::{sample_trial_path, BrownianPath};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::solver::{reconstruct, CollocationSystem, SolveResult, SolverOptions};
use crate::walsh::{BasisConfig, CoefficientVector, WalshMatrix};

/// Report times of the error tables.
pub const REPORT_TIMES: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// Normal quantile for a two-sided 95% interval.
pub const Z_95: f64 = 1.96;

/// RMS errors below this are treated as exact when estimating an order.
pub const ERROR_FLOOR: f64 = 1e-11;

/// Where the Brownian value fed to the exact solution is read for a report
/// time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathAnchor {
    /// Collocation time of the block containing `t`, the point the
    /// block-constant reconstruction represents.
    #[default]
    BlockMidpoint,
    /// Largest half-step grid time not exceeding `t`.
    GridFloor,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStats {
    pub t: f64,
    pub mean: f64,
    pub sd: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub n: usize,
}

impl ErrorStats {
    /// Mean, sample standard deviation (`n - 1` denominator) and normal 95%
    /// interval of `samples`.
    pub fn from_samples(t: f64, samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(Error::InsufficientTrials {
                effective: n,
                requested: n,
            });
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sd = var.sqrt();
        let half = Z_95 * sd / (n as f64).sqrt();
        Ok(Self {
            t,
            mean,
            sd,
            ci_lower: mean - half,
            ci_upper: mean + half,
            n,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub stats: Vec<ErrorStats>,
    pub requested: usize,
    pub n_effective: usize,
    pub failures: usize,
    /// Trial index and error of each excluded trial.
    pub failed_trials: Vec<(u64, Error)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub resolutions: Vec<usize>,
    pub rms_errors: Vec<f64>,
    /// Least-squares slope of `log(rms)` against `log(h)`; `None` when the
    /// errors are already at round-off level.
    pub estimated_order: Option<f64>,
    pub n_effective: Vec<usize>,
    pub failures: Vec<usize>,
}

fn anchor_index(cfg_m: usize, t: f64, anchor: PathAnchor) -> usize {
    let m = cfg_m as f64;
    match anchor {
        // half-step index 2j + 1 of the midpoint of block j
        PathAnchor::BlockMidpoint => 2 * ((t * m).floor() as usize).min(cfg_m - 1) + 1,
        PathAnchor::GridFloor => ((t * 2.0 * m).floor() as usize).min(2 * cfg_m),
    }
}

/// `|exact(t, B) - x_m(t)|` with `B` read at the block midpoint of `t`.
pub fn error_at(
    result: &SolveResult,
    problem: &ProblemSpec,
    path: &BrownianPath,
    t: f64,
) -> Result<f64> {
    error_at_with(result, problem, path, t, PathAnchor::BlockMidpoint)
}

pub fn error_at_with(
    result: &SolveResult,
    problem: &ProblemSpec,
    path: &BrownianPath,
    t: f64,
    anchor: PathAnchor,
) -> Result<f64> {
    let approx = reconstruct(result, t)?;
    if path.m() != result.m() {
        return Err(Error::DimensionMismatch {
            expected: result.m(),
            actual: path.m(),
        });
    }
    let b = path.at_half_step(anchor_index(result.m(), t, anchor));
    Ok((problem.exact_value(t, b)? - approx).abs())
}

/// Walsh coefficients `T_W F` of a block-integral vector `F`.
pub fn walsh_coefficients(f: &CoefficientVector, tw: &WalshMatrix) -> Result<Vec<f64>> {
    tw.mul_vec(f.values())
}

/// `max_i |x_i - y_i|`.
pub fn coefficient_error_norm(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Infinity norm between the Walsh coefficients of the exact solution
/// (sampled at the collocation times) and of the solved collocation values.
pub fn solution_coefficient_error(
    result: &SolveResult,
    problem: &ProblemSpec,
    path: &BrownianPath,
    cfg: &BasisConfig,
    tw: &WalshMatrix,
) -> Result<f64> {
    let exact_blocks = cfg
        .midpoints()
        .iter()
        .enumerate()
        .map(|(j, &t)| problem.exact_value(t, path.at_half_step(2 * j + 1)))
        .collect::<Result<Vec<_>>>()?;
    let exact = walsh_coefficients(&CoefficientVector::from_block_values(&exact_blocks), tw)?;
    let approx = walsh_coefficients(&CoefficientVector::from_block_values(&result.x_colloc), tw)?;
    coefficient_error_norm(&exact, &approx)
}

/// Per-trial errors at the report times, and the excluded trials.
type TrialOutcomes = (Vec<Vec<f64>>, Vec<(u64, Error)>);

fn is_trial_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::NonConvergence { .. } | Error::NonFiniteIterate { .. }
    )
}

/// Runs `n` trials and returns the per-trial errors at `report_times` together
/// with the failed trials.
fn run_trials(
    problem: &ProblemSpec,
    cfg: &BasisConfig,
    n: usize,
    base_seed: u64,
    report_times: &[f64],
    opts: &SolverOptions,
) -> Result<TrialOutcomes> {
    if problem.exact.is_none() {
        return Err(Error::MissingExactSolution(problem.label.clone()));
    }
    let system = CollocationSystem::new(problem, cfg)?;
    let outcomes: Vec<(u64, Result<Vec<f64>>)> = (1..=n as u64)
        .into_par_iter()
        .map(|trial| {
            let path = sample_trial_path(cfg, base_seed, trial);
            let outcome = system.solve(&path, opts).and_then(|r| {
                report_times
                    .iter()
                    .map(|&t| error_at(&r, problem, &path, t))
                    .collect()
            });
            (trial, outcome)
        })
        .collect();

    let mut errors = Vec::with_capacity(n);
    let mut failed = Vec::new();
    for (trial, outcome) in outcomes {
        match outcome {
            Ok(e) => errors.push(e),
            Err(e) if is_trial_failure(&e) => failed.push((trial, e)),
            Err(e) => return Err(e),
        }
    }
    Ok((errors, failed))
}

pub fn monte_carlo(
    problem: &ProblemSpec,
    cfg: &BasisConfig,
    n: usize,
    base_seed: u64,
    report_times: &[f64],
) -> Result<MonteCarloReport> {
    monte_carlo_with(
        problem,
        cfg,
        n,
        base_seed,
        report_times,
        &SolverOptions::default(),
    )
}

pub fn monte_carlo_with(
    problem: &ProblemSpec,
    cfg: &BasisConfig,
    n: usize,
    base_seed: u64,
    report_times: &[f64],
    opts: &SolverOptions,
) -> Result<MonteCarloReport> {
    if n < 2 {
        return Err(Error::InsufficientTrials {
            effective: n,
            requested: n,
        });
    }
    let (errors, failed_trials) = run_trials(problem, cfg, n, base_seed, report_times, opts)?;
    if errors.len() < 2 {
        return Err(Error::InsufficientTrials {
            effective: errors.len(),
            requested: n,
        });
    }
    let stats = report_times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let column: Vec<f64> = errors.iter().map(|row| row[k]).collect();
            ErrorStats::from_samples(t, &column)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonteCarloReport {
        stats,
        requested: n,
        n_effective: errors.len(),
        failures: failed_trials.len(),
        failed_trials,
    })
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Order estimate from RMS errors at resolutions `ms`; `None` if any error is
/// below [`ERROR_FLOOR`].
pub fn estimate_order(ms: &[usize], rms: &[f64]) -> Option<f64> {
    if rms.iter().any(|&e| e.is_nan() || e <= ERROR_FLOOR) {
        return None;
    }
    let log_h: Vec<f64> = ms.iter().map(|&m| (1.0 / m as f64).ln()).collect();
    let log_e: Vec<f64> = rms.iter().map(|e| e.ln()).collect();
    Some(least_squares_slope(&log_h, &log_e))
}

/// RMS of the errors over `n` trials and the [`REPORT_TIMES`], together with
/// the number of successful and failed trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RmsError {
    pub rms: f64,
    pub n_effective: usize,
    pub failures: usize,
}

pub fn rms_error(
    problem: &ProblemSpec,
    cfg: &BasisConfig,
    n: usize,
    base_seed: u64,
) -> Result<RmsError> {
    let (errors, failed) = run_trials(
        problem,
        cfg,
        n,
        base_seed,
        &REPORT_TIMES,
        &SolverOptions::default(),
    )?;
    if errors.is_empty() {
        return Err(Error::InsufficientTrials {
            effective: 0,
            requested: n,
        });
    }
    let count = (errors.len() * REPORT_TIMES.len()) as f64;
    let ms = errors.iter().flatten().map(|e| e * e).sum::<f64>() / count;
    Ok(RmsError {
        rms: ms.sqrt(),
        n_effective: errors.len(),
        failures: failed.len(),
    })
}

pub fn convergence_study(
    problem: &ProblemSpec,
    resolutions: &[usize],
    n: usize,
    base_seed: u64,
) -> Result<ConvergenceReport> {
    if resolutions.len() < 3 {
        return Err(Error::InvalidArgument(
            "convergence study needs at least 3 resolutions".into(),
        ));
    }
    if !resolutions.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidArgument(
            "resolutions must be strictly increasing".into(),
        ));
    }
    let mut rms_errors = Vec::with_capacity(resolutions.len());
    let mut n_effective = Vec::with_capacity(resolutions.len());
    let mut failures = Vec::with_capacity(resolutions.len());
    for &m in resolutions {
        let r = rms_error(problem, &BasisConfig::with_resolution(m)?, n, base_seed)?;
        rms_errors.push(r.rms);
        n_effective.push(r.n_effective);
        failures.push(r.failures);
    }
    Ok(ConvergenceReport {
        estimated_order: estimate_order(resolutions, &rms_errors),
        resolutions: resolutions.to_vec(),
        rms_errors,
        n_effective,
        failures,
    })
}
