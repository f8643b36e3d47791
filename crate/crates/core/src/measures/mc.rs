//! Seeded, batch-order-independent Monte Carlo accumulation.
//!
//! Samples are drawn in fixed-size chunks; chunk `k` uses its own ChaCha
//! stream derived from `(seed, k)`. Chunk statistics are merged in chunk
//! order, so the result depends only on `(seed, sample_count)` and never on
//! how chunks were scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::log_gamma;

pub(crate) const CHUNK: usize = 4096;

/// Sample budget and seed for an estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McParams {
    pub sample_count: usize,
    pub seed: u64,
    /// Chunks handed to a worker at a time. Affects scheduling only.
    pub batch: usize,
}

impl McParams {
    pub fn new(sample_count: usize, seed: u64) -> Self {
        Self {
            sample_count,
            seed,
            batch: 4,
        }
    }

    pub fn with_batch(mut self, batch: usize) -> Self {
        self.batch = batch;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 || self.batch == 0 {
            return Err(Error::InvalidInput("sample_count and batch must be positive".into()));
        }
        Ok(())
    }

    pub fn is_acceptance_grade(&self) -> bool {
        self.sample_count >= 1000
    }
}

/// A Monte Carlo estimate, reported as `value ± std_error`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            samples: 0,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            std_error: self.std_error * factor.abs(),
            samples: self.samples,
        }
    }

    /// `|value - target| <= k * std_error` (plus a tiny absolute slack for exact estimates).
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error + 1e-12 * target.abs().max(1.0)
    }
}

impl std::fmt::Display for Estimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ± {}", self.value, self.std_error)
    }
}

/// Running mean / second central moment (Welford), mergeable.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }

    pub fn std_error_of_mean(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt()
    }

    pub fn estimate(&self) -> Estimate {
        Estimate {
            value: self.mean,
            std_error: self.std_error_of_mean(),
            samples: self.count as usize,
        }
    }
}

pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Mean of `draw` over `mc.sample_count` seeded draws.
pub(crate) fn sample_mean<F>(mc: &McParams, draw: F) -> Result<Moments>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    mc.validate()?;
    let chunks = mc.sample_count.div_ceil(CHUNK);
    let per_chunk: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .with_min_len(mc.batch)
        .map(|k| {
            let mut rng = chunk_rng(mc.seed, k as u64);
            let len = CHUNK.min(mc.sample_count - k * CHUNK);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(draw(&mut rng));
            }
            m
        })
        .collect();
    Ok(per_chunk.into_iter().fold(Moments::default(), Moments::merge))
}

pub(crate) fn gaussian_vector<R: Rng>(rng: &mut R, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
}

/// Uniform point on the unit sphere (normalized Gaussian).
pub fn sphere_point<R: Rng>(rng: &mut R, out: &mut [f64]) {
    loop {
        gaussian_vector(rng, out);
        let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-300 {
            out.iter_mut().for_each(|v| *v /= norm);
            return;
        }
    }
}

/// Importance proposal on `R^n`: an equal mixture of the standard Gaussian and
/// a multivariate Student t with 3 degrees of freedom, both scaled by `scale`.
/// The t component keeps the weights of exponentially decaying integrands bounded.
#[derive(Clone, Copy, Debug)]
pub(crate) struct MixtureProposal {
    dim: usize,
    scale: f64,
    ln_t_norm: f64,
}

impl MixtureProposal {
    const NU: f64 = 3.0;

    pub fn new(dim: usize, scale: f64) -> Self {
        let (n, nu) = (dim as f64, Self::NU);
        let ln_t_norm = log_gamma(0.5 * (nu + n)) - log_gamma(0.5 * nu) - 0.5 * n * (nu * std::f64::consts::PI).ln();
        Self { dim, scale, ln_t_norm }
    }

    /// Draws into `out` and returns the log-density of the draw.
    pub fn draw<R: Rng>(&self, rng: &mut R, out: &mut [f64]) -> f64 {
        gaussian_vector(rng, out);
        if rng.random::<bool>() {
            let w: f64 = rng.sample(ChiSquared::new(Self::NU).expect("positive degrees of freedom"));
            let f = (Self::NU / w).sqrt();
            out.iter_mut().for_each(|v| *v *= f);
        }
        out.iter_mut().for_each(|v| *v *= self.scale);
        self.ln_density(out)
    }

    pub fn ln_density(&self, x: &[f64]) -> f64 {
        let n = self.dim as f64;
        let r2 = x.iter().map(|v| v * v).sum::<f64>() / (self.scale * self.scale);
        let ln_gauss = -0.5 * r2 - 0.5 * n * (2.0 * std::f64::consts::PI).ln();
        let ln_t = self.ln_t_norm - 0.5 * (Self::NU + n) * (1.0 + r2 / Self::NU).ln();
        let hi = ln_gauss.max(ln_t);
        hi + (0.5 * ((ln_gauss - hi).exp() + (ln_t - hi).exp())).ln() - n * self.scale.ln()
    }
}
