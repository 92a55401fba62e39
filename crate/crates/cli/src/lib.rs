//! Command-line front end: Monte Carlo error tables, convergence studies and
//! matrix/path dumps, all written as CSV.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use walsh_svie::experiment::{solution_coefficient_error, REPORT_TIMES};
use walsh_svie::oracle::euler_maruyama;
use walsh_svie::{
    build_walsh_matrix, builtin_example, convergence_study, integration_matrix, monte_carlo,
    parse_problem_file, sample_trial_path, stochastic_matrix, walsh_domain, BasisConfig,
    CollocationSystem, Matrix, ProblemSpec, SolverOptions,
};

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "WALSH_SVIE_SEED";
pub const MIN_M: usize = 2;
pub const MAX_M: usize = 4096;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] walsh_svie::Error),
    #[error("{context}: {source}")]
    Context {
        context: String,
        source: walsh_svie::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

trait WithContext<T> {
    fn context(self, f: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> WithContext<T> for walsh_svie::Result<T> {
    fn context(self, f: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|source| CliError::Context {
            context: f(),
            source,
        })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "walsh-svie",
    version,
    about = "Walsh collocation for stochastic Volterra integral equations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo error table plus the solution on the first path
    Run(RunArgs),
    /// RMS error against resolution and the fitted order
    Converge(ConvergeArgs),
    /// Dump T_W, P, P_S and their Walsh-domain forms
    Matrices(MatricesArgs),
    /// Dump sampled Brownian paths
    Paths(PathsArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ProblemArgs {
    /// Built-in example (1 or 2)
    #[arg(long)]
    pub example: Option<u32>,
    /// Problem definition file
    #[arg(long, value_name = "FILE")]
    pub problem: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, default_value_t = 16, value_parser = parse_resolution)]
    pub m: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Add an Euler–Maruyama column to the solution CSV
    #[arg(long)]
    pub oracle: bool,
    /// Write every trial path as CSV
    #[arg(long)]
    pub dump_paths: bool,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128", value_parser = parse_resolution)]
    pub resolutions: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct MatricesArgs {
    #[arg(long, default_value_t = 4, value_parser = parse_resolution)]
    pub m: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct PathsArgs {
    #[arg(long, default_value_t = 16, value_parser = parse_resolution)]
    pub m: usize,
    /// Number of paths (trials 1..=count)
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

pub fn parse_resolution(s: &str) -> Result<usize, String> {
    let m: usize = s.trim().parse().map_err(|e| format!("{e}"))?;
    if !m.is_power_of_two() || !(MIN_M..=MAX_M).contains(&m) {
        return Err(format!(
            "m must be a power of two in [{MIN_M}, {MAX_M}], got {m}"
        ));
    }
    Ok(m)
}

/// CSV float format: 9 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.8e}")
}

fn load_problem(args: &ProblemArgs) -> Result<ProblemSpec, CliError> {
    match (&args.problem, args.example) {
        (Some(path), _) => Ok(parse_problem_file(path)?),
        (None, Some(id)) => Ok(builtin_example(id)?),
        (None, None) => unreachable!("clap enforces one problem source"),
    }
}

/// File-name-safe version of a problem label.
fn file_stem(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if s.is_empty() {
        "problem".into()
    } else {
        s
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn matrix_csv(m: &Matrix) -> String {
    let mut s = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&x| fmt_f64(x)).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn path_csv(path: &walsh_svie::BrownianPath) -> String {
    let mut s = String::from("t,B\n");
    for (t, b) in path.times().zip(path.values()) {
        writeln!(s, "{},{}", fmt_f64(t), fmt_f64(*b)).unwrap();
    }
    s
}

/// Runs a parsed command, writing files under its output directory and a
/// human-readable summary to `out`. Returns the files written.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    match &cli.command {
        Command::Run(args) => run(args, out),
        Command::Converge(args) => converge(args, out),
        Command::Matrices(args) => matrices(args, out),
        Command::Paths(args) => paths(args, out),
    }
}

fn run(args: &RunArgs, out: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let problem = load_problem(&args.problem)?;
    let cfg = BasisConfig::with_resolution(args.m)?;
    let seed = args.common.seed;
    let dir = &args.common.out;
    create_dir(dir)?;
    let stem = format!("{}_m{}", file_stem(&problem.label), args.m);
    let mut written = Vec::new();

    if problem.has_exact() {
        let report = monte_carlo(&problem, &cfg, args.trials, seed, &REPORT_TIMES)
            .context(|| format!("{} trials at m = {}", args.trials, args.m))?;
        let mut csv = String::from("t,mean,sd,ci_lower,ci_upper,n_effective,failures\n");
        for s in &report.stats {
            writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                fmt_f64(s.t),
                fmt_f64(s.mean),
                fmt_f64(s.sd),
                fmt_f64(s.ci_lower),
                fmt_f64(s.ci_upper),
                report.n_effective,
                report.failures
            )
            .unwrap();
        }
        let path = dir.join(format!("{stem}_stats.csv"));
        write_file(&path, &csv)?;
        written.push(path);
        emit(
            out,
            &format!(
                "{} m={} n={} seed={}\n",
                problem.label, args.m, args.trials, seed
            ),
        )?;
        emit(out, &csv)?;
        for (trial, e) in &report.failed_trials {
            emit(out, &format!("trial {trial} excluded: {e}\n"))?;
        }
    } else {
        emit(
            out,
            &format!(
                "{}: no exact solution, error table skipped\n",
                problem.label
            ),
        )?;
    }

    let system = CollocationSystem::new(&problem, &cfg)?;
    let opts = SolverOptions::default();
    let tw = build_walsh_matrix(&cfg);
    let mut coef_csv = String::from("trial,coef_error_inf\n");
    let mut solution = None;
    let mut last_failure = None;
    for trial in 1..=args.trials as u64 {
        let path = sample_trial_path(&cfg, seed, trial);
        let result = match system.solve(&path, &opts) {
            Ok(r) => r,
            Err(
                e @ (walsh_svie::Error::NonConvergence { .. }
                | walsh_svie::Error::NonFiniteIterate { .. }),
            ) => {
                last_failure = Some((trial, e));
                continue;
            }
            Err(e) => {
                return Err(CliError::Context {
                    context: format!("trial {trial}"),
                    source: e,
                })
            }
        };
        if problem.has_exact() {
            let e = solution_coefficient_error(&result, &problem, &path, &cfg, &tw)
                .context(|| format!("trial {trial}"))?;
            writeln!(coef_csv, "{trial},{}", fmt_f64(e)).unwrap();
        }
        if args.dump_paths {
            let pdir = dir.join(format!("{stem}_paths"));
            create_dir(&pdir)?;
            let p = pdir.join(format!("trial_{trial:04}.csv"));
            write_file(&p, &path_csv(&path))?;
            written.push(p);
        }
        if solution.is_none() {
            solution = Some((trial, path, result));
        }
        if !problem.has_exact() && !args.dump_paths {
            break;
        }
    }

    if problem.has_exact() {
        let p = dir.join(format!("{stem}_coefficients.csv"));
        write_file(&p, &coef_csv)?;
        written.push(p);
    }

    if solution.is_none() {
        if let Some((trial, e)) = last_failure {
            return Err(CliError::Context {
                context: format!("no trial solved; trial {trial}"),
                source: e,
            });
        }
    }
    if let Some((trial, path, result)) = solution {
        let em = if args.oracle {
            Some(
                euler_maruyama(&problem, &path, &cfg)
                    .context(|| format!("oracle, trial {trial}"))?,
            )
        } else {
            None
        };
        let mut header = vec!["t_j", "x_m"];
        if problem.has_exact() {
            header.push("exact");
        }
        if em.is_some() {
            header.push("em_oracle");
        }
        let mut csv = header.join(",");
        csv.push('\n');
        for (j, &t) in cfg.midpoints().iter().enumerate() {
            let mut row = vec![fmt_f64(t), fmt_f64(result.x_colloc[j])];
            if problem.has_exact() {
                row.push(fmt_f64(
                    problem.exact_value(t, path.at_half_step(2 * j + 1))?,
                ));
            }
            if let Some(em) = &em {
                row.push(fmt_f64(em.midpoint_values[j]));
            }
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        let p = dir.join(format!("{stem}_solution.csv"));
        write_file(&p, &csv)?;
        written.push(p);
        emit(
            out,
            &format!(
                "solution on trial {trial}: {} iterations\n",
                result.iterations
            ),
        )?;
    }
    Ok(written)
}

fn converge(args: &ConvergeArgs, out: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let problem = load_problem(&args.problem)?;
    create_dir(&args.common.out)?;
    let report = convergence_study(&problem, &args.resolutions, args.trials, args.common.seed)
        .context(|| format!("convergence study over m = {:?}", args.resolutions))?;
    let mut csv = String::from("m,h,rms_error,n_effective,failures\n");
    for (i, &m) in report.resolutions.iter().enumerate() {
        writeln!(
            csv,
            "{m},{},{},{},{}",
            fmt_f64(1.0 / m as f64),
            fmt_f64(report.rms_errors[i]),
            report.n_effective[i],
            report.failures[i]
        )
        .unwrap();
    }
    let order = report
        .estimated_order
        .map(fmt_f64)
        .unwrap_or_else(|| "undefined".into());
    let stem = file_stem(&problem.label);
    let table = args.common.out.join(format!("{stem}_converge.csv"));
    let order_file = args.common.out.join(format!("{stem}_order.csv"));
    write_file(&table, &csv)?;
    write_file(&order_file, &format!("estimated_order\n{order}\n"))?;
    emit(out, &csv)?;
    emit(out, &format!("estimated order: {order}\n"))?;
    Ok(vec![table, order_file])
}

fn matrices(args: &MatricesArgs, out: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let cfg = BasisConfig::with_resolution(args.m)?;
    let path = sample_trial_path(&cfg, args.common.seed, 1);
    let tw = build_walsh_matrix(&cfg);
    let p = integration_matrix(&cfg);
    let ps = stochastic_matrix(&path, &cfg)?;
    let lambda = walsh_domain(p.matrix(), &tw)?;
    let lambda_s = walsh_domain(ps.matrix(), &tw)?;

    let mut tw_csv = String::new();
    for i in 0..tw.m() {
        let row: Vec<String> = tw.row(i).iter().map(|v| v.to_string()).collect();
        tw_csv.push_str(&row.join(","));
        tw_csv.push('\n');
    }
    let blocks = [
        ("tw", tw_csv),
        ("p", matrix_csv(p.matrix())),
        ("ps", matrix_csv(ps.matrix())),
        ("lambda", matrix_csv(&lambda)),
        ("lambda_s", matrix_csv(&lambda_s)),
    ];
    create_dir(&args.common.out)?;
    let mut written = Vec::new();
    for (name, csv) in &blocks {
        let f = args.common.out.join(format!("m{}_{name}.csv", args.m));
        write_file(&f, csv)?;
        written.push(f);
        emit(out, &format!("# {name}\n{csv}"))?;
    }
    Ok(written)
}

fn paths(args: &PathsArgs, out: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let cfg = BasisConfig::with_resolution(args.m)?;
    create_dir(&args.common.out)?;
    let mut written = Vec::new();
    for trial in 1..=args.count {
        let path = sample_trial_path(&cfg, args.common.seed, trial);
        let f = args
            .common
            .out
            .join(format!("path_m{}_trial_{trial:04}.csv", args.m));
        write_file(&f, &path_csv(&path))?;
        written.push(f);
    }
    emit(
        out,
        &format!(
            "wrote {} path(s) to {}\n",
            args.count,
            args.common.out.display()
        ),
    )?;
    Ok(written)
}
