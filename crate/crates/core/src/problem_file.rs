//! Plain-text problem files.
//!
//! ```text
//! # comments start with '#'
//! label = my-problem        # optional, free text
//! x0    = 0.1               # constant expression
//! k1    = -(1/30)^2         # expression in s, t
//! k2    = 1/30              # expression in s, t
//! beta  = x*(1 - x^2)       # expression in x
//! sigma = 1 - x^2           # expression in x
//! exact = tanh(B/30 + atanh(0.1))   # optional, expression in t, B
//! ```
//!
//! Kernels without variables are stored as constants so that projection takes
//! the exact path.

use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::problem::{Kernel, ProblemSpec};

const KEYS: [&str; 7] = ["label", "x0", "k1", "k2", "beta", "sigma", "exact"];

pub fn parse_problem_file(path: impl AsRef<Path>) -> Result<ProblemSpec> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path)
        .map_err(|e| Error::ProblemFile(format!("{}: {e}", path.display())))?;
    let mut spec = parse_problem(&src)?;
    if spec.label.is_empty() {
        spec.label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "problem".into());
    }
    Ok(spec)
}

pub fn parse_problem(src: &str) -> Result<ProblemSpec> {
    let mut entries: [Option<(usize, usize, &str)>; 7] = [None; 7];
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let eq = line.find('=').ok_or_else(|| {
            Error::ProblemFile(format!("line {line_no}: expected 'key = expression'"))
        })?;
        let key = line[..eq].trim();
        let value = &line[eq + 1..];
        let slot = KEYS
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| Error::ProblemFile(format!("line {line_no}: unknown key '{key}'")))?;
        if entries[slot].is_some() {
            return Err(Error::ProblemFile(format!(
                "line {line_no}: duplicate key '{key}'"
            )));
        }
        // 1-based column of the first character after '='
        let column = line[..eq].chars().count() + 2;
        entries[slot] = Some((line_no, column, value));
    }

    let required = |slot: usize| {
        entries[slot].ok_or_else(|| Error::ProblemFile(format!("missing key '{}'", KEYS[slot])))
    };
    let parse = |(line, column, src): (usize, usize, &str), vars: &[&str]| {
        Expr::parse_at(src, vars, line, column).map_err(Error::from)
    };

    let label = entries[0]
        .map(|(_, _, v)| v.trim().to_string())
        .unwrap_or_default();

    let x0_expr = parse(required(1)?, &[])?;
    if !x0_expr.is_constant() {
        return Err(Error::ProblemFile(
            "x0 must be a constant expression".into(),
        ));
    }
    let x0 = x0_expr.eval(&[]);

    let kernel = |slot: usize| -> Result<Kernel> {
        let e = parse(required(slot)?, &["s", "t"])?;
        Ok(if e.is_constant() {
            Kernel::Constant(e.eval(&[]))
        } else {
            Kernel::function(move |s, t| e.eval(&[s, t]))
        })
    };
    let k1 = kernel(2)?;
    let k2 = kernel(3)?;

    let scalar = |slot: usize| -> Result<Arc<dyn Fn(f64) -> f64 + Send + Sync>> {
        let e = parse(required(slot)?, &["x"])?;
        Ok(Arc::new(move |x| e.eval(&[x])))
    };
    let beta = scalar(4)?;
    let sigma = scalar(5)?;

    let exact = match entries[6] {
        Some(entry) => {
            let e = parse(entry, &["t", "B"])?;
            Some(Arc::new(move |t: f64, b: f64| e.eval(&[t, b])) as crate::problem::ExactFn)
        }
        None => None,
    };

    Ok(ProblemSpec {
        label,
        x0,
        k1,
        k2,
        beta,
        sigma,
        exact,
    })
}
