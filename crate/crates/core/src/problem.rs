//! Problem definitions for
//! `x(t) = x0 + ∫_0^t k1(s,t) β(x(s)) ds + ∫_0^t k2(s,t) σ(x(s)) dB(s)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{pow, sech};
use crate::walsh::{project_constant_kernel, project_kernel, BasisConfig, KernelMatrix};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
/// Exact solution as a function of `(t, B(t))`.
pub type ExactFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Default noise amplitude of the built-in examples.
pub const DEFAULT_AMPLITUDE: f64 = 1.0 / 30.0;

#[derive(Clone)]
pub enum Kernel {
    Constant(f64),
    Function(KernelFn),
}

impl Kernel {
    pub fn function(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Kernel::Function(Arc::new(f))
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        match self {
            Kernel::Constant(c) => *c,
            Kernel::Function(f) => f(s, t),
        }
    }

    /// Block-integral matrix; constant kernels take the exact `c h²` path.
    pub fn project(&self, cfg: &BasisConfig) -> Result<KernelMatrix> {
        match self {
            Kernel::Constant(c) => Ok(project_constant_kernel(*c, cfg)),
            Kernel::Function(f) => project_kernel(|s, t| f(s, t), cfg),
        }
    }
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Constant(c) => write!(f, "Constant({c})"),
            Kernel::Function(_) => write!(f, "Function(..)"),
        }
    }
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub label: String,
    pub x0: f64,
    pub k1: Kernel,
    pub k2: Kernel,
    pub beta: ScalarFn,
    pub sigma: ScalarFn,
    pub exact: Option<ExactFn>,
}

impl ProblemSpec {
    pub fn exact_value(&self, t: f64, b: f64) -> Result<f64> {
        self.exact
            .as_ref()
            .map(|f| f(t, b))
            .ok_or_else(|| Error::MissingExactSolution(self.label.clone()))
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("label", &self.label)
            .field("x0", &self.x0)
            .field("k1", &self.k1)
            .field("k2", &self.k2)
            .field("exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

/// Built-in example `id` (1 or 2) with amplitude `a = 1/30`.
pub fn builtin_example(id: u32) -> Result<ProblemSpec> {
    builtin_example_with_amplitude(id, DEFAULT_AMPLITUDE)
}

/// Built-in example with a custom amplitude `a`.
///
/// * 1: `x0 = 0`, `k1 = -a²/2`, `β = tanh(x) sech²(x)`, `k2 = a`, `σ = sech(x)`,
///   exact `asinh(a B(t) + sinh(x0))`.
/// * 2: `x0 = 0.1`, `k1 = -a²`, `β = x (1 - x²)`, `k2 = a`, `σ = 1 - x²`,
///   exact `tanh(a B(t) + atanh(x0))`.
///
/// The closures perform the same floating-point operations as the problem
/// file text returned by [`builtin_source`], so both forms solve identically.
pub fn builtin_example_with_amplitude(id: u32, a: f64) -> Result<ProblemSpec> {
    match id {
        1 => {
            let x0 = 0.0;
            Ok(ProblemSpec {
                label: "example1".into(),
                x0,
                k1: Kernel::Constant(-a * a / 2.0),
                k2: Kernel::Constant(a),
                beta: Arc::new(|x: f64| x.tanh() * pow(sech(x), 2.0)),
                sigma: Arc::new(sech),
                exact: Some(Arc::new(move |_t, b| (a * b + x0.sinh()).asinh())),
            })
        }
        2 => {
            let x0 = 0.1;
            Ok(ProblemSpec {
                label: "example2".into(),
                x0,
                k1: Kernel::Constant(-a * a),
                k2: Kernel::Constant(a),
                beta: Arc::new(|x: f64| x * (1.0 - pow(x, 2.0))),
                sigma: Arc::new(|x: f64| 1.0 - pow(x, 2.0)),
                exact: Some(Arc::new(move |_t, b| (a * b + x0.atanh()).tanh())),
            })
        }
        other => Err(Error::UnknownExample(other)),
    }
}

/// Problem-file text equivalent to [`builtin_example_with_amplitude`].
pub fn builtin_source(id: u32, a: f64) -> Result<String> {
    match id {
        1 => Ok(format!(
            "label = example1\n\
             x0 = 0\n\
             k1 = {k1:?}\n\
             k2 = {a:?}\n\
             beta = tanh(x)*sech(x)^2\n\
             sigma = sech(x)\n\
             exact = asinh({a:?}*B + sinh(0))\n",
            k1 = -a * a / 2.0,
        )),
        2 => Ok(format!(
            "label = example2\n\
             x0 = 0.1\n\
             k1 = {k1:?}\n\
             k2 = {a:?}\n\
             beta = x*(1 - x^2)\n\
             sigma = 1 - x^2\n\
             exact = tanh({a:?}*B + atanh(0.1))\n",
            k1 = -a * a,
        )),
        other => Err(Error::UnknownExample(other)),
    }
}

/// Deterministic test problem `x(t) = 1 + ∫_0^t x(s) ds` with solution `e^t`.
pub fn exponential_growth() -> ProblemSpec {
    ProblemSpec {
        label: "exponential".into(),
        x0: 1.0,
        k1: Kernel::Constant(1.0),
        k2: Kernel::Constant(0.0),
        beta: Arc::new(|x| x),
        sigma: Arc::new(|_| 0.0),
        exact: Some(Arc::new(|t, _| t.exp())),
    }
}
