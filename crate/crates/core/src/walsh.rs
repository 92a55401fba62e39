//! Rademacher and Walsh functions, the Walsh matrix `T_W`, and block-integral
//! projections of univariate functions and bivariate kernels.
//!
//! All functions live on the half-open unit interval `[0, 1)`, split into
//! `m = 2^k` blocks `[ih, (i+1)h)` with `h = 1/m`. Walsh functions are indexed
//! in Paley order: `w_n` is the product of the Rademacher functions `r_k`
//! selected by the set bits of `n` (bit `k - 1` selects `r_k`).
//!
//! Coefficient vectors use the block-integral convention: entry `i` holds
//! `∫_{ih}^{(i+1)h} f(s) ds`, so the represented value on block `i` is
//! `m * values[i]`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::quadrature::{gauss_legendre_5, gauss_legendre_5x5};

/// Largest supported exponent; `m = 2^24` blocks is far beyond any dense use.
pub const MAX_EXPONENT: u32 = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct BasisConfig {
    k: u32,
    m: usize,
    h: f64,
    midpoints: Vec<f64>,
}

impl BasisConfig {
    pub fn new(k: u32) -> Result<Self> {
        if k > MAX_EXPONENT {
            return Err(Error::InvalidResolution(usize::MAX));
        }
        let m = 1usize << k;
        let h = 1.0 / m as f64;
        let two_m = (2 * m) as f64;
        let midpoints = (0..m).map(|j| (2 * j + 1) as f64 / two_m).collect();
        Ok(Self { k, m, h, midpoints })
    }

    /// Builds the configuration for resolution `m`, which must be a power of two.
    pub fn with_resolution(m: usize) -> Result<Self> {
        if m == 0 || !m.is_power_of_two() || m.trailing_zeros() > MAX_EXPONENT {
            return Err(Error::InvalidResolution(m));
        }
        Self::new(m.trailing_zeros())
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Collocation times `t_j = (2j + 1) / (2m)`.
    pub fn midpoints(&self) -> &[f64] {
        &self.midpoints
    }

    /// Index of the block `[ih, (i+1)h)` containing `t`.
    pub fn block_of(&self, t: f64) -> Result<usize> {
        check_unit(t)?;
        // t * m is exact for power-of-two m.
        Ok(((t * self.m as f64).floor() as usize).min(self.m - 1))
    }
}

fn check_unit(t: f64) -> Result<()> {
    if (0.0..1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::TimeOutOfRange(t))
    }
}

/// Rademacher function `r_i(t)`: `1` for `i = 0`, otherwise `sgn(sin(2^i π t))`.
///
/// The sign is read off the dyadic position of `t`: with `u = 2^i t`, the sine
/// vanishes when `u` is an integer and is positive exactly when `⌊u⌋` is even.
/// Scaling by a power of two is exact in binary floating point.
pub fn rademacher(i: u32, t: f64) -> Result<i8> {
    check_unit(t)?;
    if i == 0 {
        return Ok(1);
    }
    // Every finite f64 is a dyadic rational with at most 1074 fractional bits.
    if i >= 1075 {
        return Ok(0);
    }
    let lo = i / 2;
    let u = t * 2f64.powi(lo as i32) * 2f64.powi((i - lo) as i32);
    if u.fract() == 0.0 {
        return Ok(0);
    }
    Ok(if u.floor() % 2.0 == 0.0 { 1 } else { -1 })
}

/// Walsh function `w_n(t)` in Paley order.
///
/// Fails with [`Error::InvalidArgument`] when `t` sits on a breakpoint of one of
/// the selected Rademacher factors, where the product is not `±1`.
pub fn walsh(n: u64, t: f64) -> Result<i8> {
    check_unit(t)?;
    let mut sign = 1i8;
    let mut bits = n;
    let mut k = 1u32;
    while bits != 0 {
        if bits & 1 == 1 {
            match rademacher(k, t)? {
                0 => {
                    return Err(Error::InvalidArgument(format!(
                        "t = {t} is a breakpoint of w_{n}"
                    )))
                }
                r => sign *= r,
            }
        }
        bits >>= 1;
        k += 1;
    }
    Ok(sign)
}

/// The `m x m` matrix of Walsh values at block midpoints, `c_ij = w_i(t_j)`.
#[derive(Clone, PartialEq, Eq)]
pub struct WalshMatrix {
    m: usize,
    entries: Vec<i8>,
}

impl WalshMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.m..(i + 1) * self.m]
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.m, self.m, |i, j| f64::from(self.get(i, j)))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.m).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `T_W * T_W` in exact integer arithmetic.
    pub fn square(&self) -> Vec<i64> {
        let m = self.m;
        let mut out = vec![0i64; m * m];
        for i in 0..m {
            let row = self.row(i);
            for j in 0..m {
                out[i * m + j] = row
                    .iter()
                    .enumerate()
                    .map(|(l, &a)| i64::from(a) * i64::from(self.get(l, j)))
                    .sum();
            }
        }
        out
    }

    /// `T_W v`.
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                actual: v.len(),
            });
        }
        Ok((0..self.m)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(&s, x)| f64::from(s) * x)
                    .sum()
            })
            .collect())
    }
}

impl std::fmt::Debug for WalshMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "WalshMatrix {}x{} [", self.m, self.m)?;
        for i in 0..self.m {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

pub fn build_walsh_matrix(cfg: &BasisConfig) -> WalshMatrix {
    let m = cfg.m();
    let mut entries = Vec::with_capacity(m * m);
    for i in 0..m {
        for &t in cfg.midpoints() {
            // Midpoints avoid every breakpoint of w_i for i < m.
            entries.push(walsh(i as u64, t).expect("midpoint is not a breakpoint"));
        }
    }
    WalshMatrix { m, entries }
}

/// Vector `W(t) = [w_0(t), ..., w_{m-1}(t)]`.
pub fn walsh_vector(m: usize, t: f64) -> Result<Vec<i8>> {
    (0..m as u64).map(|n| walsh(n, t)).collect()
}

/// Block integrals of a function on the `m`-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            values: vec![0.0; m],
        }
    }

    /// Coefficients of a function whose block values are `block_values`.
    pub fn from_block_values(block_values: &[f64]) -> Self {
        let h = 1.0 / block_values.len() as f64;
        Self {
            values: block_values.iter().map(|v| v * h).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Represented value on block `i`, `m * values[i]`.
    pub fn block_value(&self, i: usize) -> f64 {
        self.m() as f64 * self.values[i]
    }

    pub fn block_values(&self) -> Vec<f64> {
        (0..self.m()).map(|i| self.block_value(i)).collect()
    }

    /// Walsh-domain reconstruction `F^T T_W W(t)`.
    pub fn walsh_evaluate(&self, tw: &WalshMatrix, t: f64) -> Result<f64> {
        let w = walsh_vector(self.m(), t)?;
        let tw_w: Vec<f64> = tw.mul_vec(&w.iter().map(|&s| f64::from(s)).collect::<Vec<_>>())?;
        Ok(self.values.iter().zip(&tw_w).map(|(f, x)| f * x).sum())
    }
}

/// Double block integrals of a kernel, `entries[(i, j)] = ∬ k(s, t)` over
/// block `i` in `s` and block `j` in `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    entries: Matrix,
}

impl KernelMatrix {
    pub fn new(entries: Matrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.rows(),
                actual: entries.cols(),
            });
        }
        Ok(Self { entries })
    }

    pub fn m(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }
}

/// Block integrals of `f` by one 5-point Gauss–Legendre panel per block.
pub fn project_function(f: impl Fn(f64) -> f64, cfg: &BasisConfig) -> Result<CoefficientVector> {
    let h = cfg.h();
    let values = (0..cfg.m())
        .map(|i| {
            let a = i as f64 * h;
            let v = gauss_legendre_5(a, a + h, &f);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite {
                    what: "function projection",
                })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefficientVector { values })
}

/// Double block integrals of `k` by a 5x5 tensor Gauss–Legendre rule per block.
pub fn project_kernel(k: impl Fn(f64, f64) -> f64, cfg: &BasisConfig) -> Result<KernelMatrix> {
    let m = cfg.m();
    let h = cfg.h();
    let mut entries = Matrix::zeros(m, m);
    for i in 0..m {
        let s0 = i as f64 * h;
        for j in 0..m {
            let t0 = j as f64 * h;
            let v = gauss_legendre_5x5((s0, s0 + h), (t0, t0 + h), &k);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "kernel projection",
                });
            }
            entries[(i, j)] = v;
        }
    }
    Ok(KernelMatrix { entries })
}

/// Exact projection of the constant kernel `k ≡ c`: every entry is `c h²`.
pub fn project_constant_kernel(c: f64, cfg: &BasisConfig) -> KernelMatrix {
    let v = c * cfg.h() * cfg.h();
    KernelMatrix {
        entries: Matrix::from_fn(cfg.m(), cfg.m(), |_, _| v),
    }
}
