//! Seeded synthetic generators used as ground truth.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with `seed_from_u64`.
//! Uniforms are `rng.gen::<f64>()` (53-bit, `[0, 1)`); normals use the
//! Box–Muller transform, consuming two uniforms per pair of variates;
//! exponentials use inversion `-ln(1 - u) / λ`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ingest::{Tick, TickSeries};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Box–Muller standard normal stream.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: seeded_rng(seed),
            spare: None,
        }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - u lies in (0, 1], so the log is finite
        let u1: f64 = 1.0 - self.rng.gen::<f64>();
        let u2: f64 = self.rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// One exponential draw by inversion.
pub fn sample_exponential<R: Rng>(rng: &mut R, lambda: f64) -> f64 {
    let u: f64 = rng.gen::<f64>();
    -(1.0 - u).ln() / lambda
}

#[derive(Debug, Clone, PartialEq)]
pub struct GbmParams {
    pub s0: f64,
    /// Log drift per step.
    pub mu: f64,
    /// Log volatility per step.
    pub sigma: f64,
    pub n_steps: usize,
    pub seed: u64,
}

impl Default for GbmParams {
    fn default() -> Self {
        Self {
            s0: 100.0,
            mu: 0.0,
            sigma: 1e-4,
            n_steps: 100_000,
            seed: 7,
        }
    }
}

/// `S[t+1] = S[t] * exp(mu + sigma * Z[t])`, one tick per second.
///
/// Returns `n_steps + 1` ticks including the initial price.
pub fn generate_gbm(params: &GbmParams) -> Result<TickSeries> {
    if !(params.s0 > 0.0) || !params.s0.is_finite() {
        return Err(Error::InvalidArgument(format!("s0 must be positive, got {}", params.s0)));
    }
    if !(params.sigma >= 0.0) || !params.mu.is_finite() || !params.sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "invalid drift/volatility: mu={}, sigma={}",
            params.mu, params.sigma
        )));
    }
    if params.n_steps == 0 {
        return Err(Error::InvalidArgument("n_steps must be at least 1".into()));
    }
    let mut normals = NormalStream::new(params.seed);
    let mut ticks = Vec::with_capacity(params.n_steps + 1);
    let mut price = params.s0;
    ticks.push(Tick { timestamp: 0, price });
    for t in 1..=params.n_steps {
        let z = normals.next_normal();
        price *= (params.mu + params.sigma * z).exp();
        ticks.push(Tick {
            timestamp: t as i64 * 1000,
            price,
        });
    }
    TickSeries::new(ticks)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenewalStreamParams {
    pub lambda: f64,
    pub n_cycles: usize,
    pub seed: u64,
}

/// Normalized overshoot lengths `x ~ Exp(λ)` and their counts `K = floor(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalStream {
    pub lengths: Vec<f64>,
    pub counts: Vec<u64>,
}

impl RenewalStream {
    /// Every cycle contributes one Dc and K overshoots.
    pub fn event_counts(&self) -> (u64, u64) {
        (self.counts.len() as u64, self.counts.iter().sum())
    }
}

pub fn generate_renewal_lengths(params: &RenewalStreamParams) -> Result<RenewalStream> {
    if !(params.lambda > 0.0) || !params.lambda.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lambda must be positive, got {}",
            params.lambda
        )));
    }
    let mut rng = seeded_rng(params.seed);
    let lengths: Vec<f64> = (0..params.n_cycles)
        .map(|_| sample_exponential(&mut rng, params.lambda))
        .collect();
    let counts = lengths.iter().map(|x| x.floor() as u64).collect();
    Ok(RenewalStream { lengths, counts })
}
