//! Seeded Brownian paths on the half-step grid `{j h / 2 : j = 0 ..= 2m}`.
//!
//! Paths come from a ChaCha8 stream cipher keyed by `seed`, with the Monte
//! Carlo trial index selecting the ChaCha stream. A path is therefore a pure
//! function of `(m, seed, trial)` and trials can be generated in any order or
//! in parallel. Increments are drawn with the ziggurat sampler from
//! `rand_distr::StandardNormal` and scaled by `sqrt(h / 2)`.
//!
//! Paths at different resolutions are independent draws; refining `m` with
//! the same seed does not refine the same path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::walsh::BasisConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    half_step: f64,
    values: Vec<f64>,
    seed: u64,
    trial: u64,
}

impl BrownianPath {
    /// Wraps explicit samples `values[j] = B(j h / 2)`. `values[0]` must be zero
    /// and there must be an odd number (`2m + 1`) of samples.
    pub fn from_values(cfg: &BasisConfig, values: Vec<f64>) -> Result<Self> {
        let expected = 2 * cfg.m() + 1;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        if values[0] != 0.0 {
            return Err(Error::InvalidArgument(
                "Brownian path must start at 0".into(),
            ));
        }
        Ok(Self {
            half_step: 0.5 * cfg.h(),
            values,
            seed: 0,
            trial: 0,
        })
    }

    pub fn zero(cfg: &BasisConfig) -> Self {
        Self {
            half_step: 0.5 * cfg.h(),
            values: vec![0.0; 2 * cfg.m() + 1],
            seed: 0,
            trial: 0,
        }
    }

    pub fn half_step(&self) -> f64 {
        self.half_step
    }

    /// Resolution `m` of the basis this path was sampled for.
    pub fn m(&self) -> usize {
        (self.values.len() - 1) / 2
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }

    /// `B(j h / 2)`.
    pub fn at_half_step(&self, j: usize) -> f64 {
        self.values[j]
    }

    /// `B(t)` for a half-step grid time `t`; no interpolation.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        let j = t / self.half_step;
        if !(j >= 0.0 && j.fract() == 0.0 && (j as usize) < self.values.len()) {
            return Err(Error::OffGrid {
                t,
                half_step: self.half_step,
            });
        }
        Ok(self.values[j as usize])
    }

    /// Sample times `j h / 2`.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |j| j as f64 * self.half_step)
    }

    pub fn matches(&self, cfg: &BasisConfig) -> Result<()> {
        let expected = 2 * cfg.m() + 1;
        if self.values.len() != expected || self.half_step != 0.5 * cfg.h() {
            return Err(Error::DimensionMismatch {
                expected,
                actual: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Path for `seed` on stream 0.
pub fn sample_path(cfg: &BasisConfig, seed: u64) -> BrownianPath {
    sample_trial_path(cfg, seed, 0)
}

/// Path for Monte Carlo trial `trial` under `seed`.
pub fn sample_trial_path(cfg: &BasisConfig, seed: u64, trial: u64) -> BrownianPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let half_step = 0.5 * cfg.h();
    let scale = half_step.sqrt();
    let mut values = Vec::with_capacity(2 * cfg.m() + 1);
    let mut b = 0.0;
    values.push(b);
    for _ in 0..2 * cfg.m() {
        let z: f64 = rng.sample(StandardNormal);
        b += scale * z;
        values.push(b);
    }
    BrownianPath {
        half_step,
        values,
        seed,
        trial,
    }
}
