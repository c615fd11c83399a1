//! Event-level simulation of the pointer measurement.
//!
//! Each run draws a pointer reading `x` from the marginal
//! `<psi|E_x|psi> = q p_n(x-1) + (1-q) p_n(x)` with `q = <psi|Pi|psi>` — a
//! two-component Gaussian mixture whose components have variance
//! `sigma^2 / 2`, *not* `sigma^2` (`p_n(x)` is proportional to
//! `exp(-x^2/sigma^2)`) — and then passes post-selection with probability
//! `|<phi|M_x|psi>|^2 / <psi|E_x|psi>`.
//!
//! Reproducibility contract: the generator is ChaCha12 with explicit 64-bit
//! seeding, uniform doubles come from `Rng::gen::<f64>()`, and standard
//! normals use the Marsaglia polar method (first component only). The same
//! `(scenario, n, seed)` triple always yields a bitwise-identical batch.
//! Shard `i` of a sharded run reseeds with `splitmix`-style golden-ratio
//! offsets, so shards can be generated in any order, or in parallel, and
//! merged by index.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::pointer::Scenario;

/// One measurement event: pointer reading and post-selection outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRecord {
    pub x: f64,
    pub passed: bool,
}

/// A reproducible batch of measurement events.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    seed: u64,
    records: Vec<SampleRecord>,
}

impl SampleBatch {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[SampleRecord] {
        &self.records
    }

    /// Writes the batch as CSV with columns `x,passed`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,passed")?;
        for r in &self.records {
            writeln!(out, "{},{}", r.x, r.passed)?;
        }
        Ok(())
    }
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n_effective: usize,
}

/// Standard normal via the Marsaglia polar method, first component only.
fn standard_normal(rng: &mut ChaCha12Rng) -> f64 {
    loop {
        let u = 2.0 * rng.gen::<f64>() - 1.0;
        let v = 2.0 * rng.gen::<f64>() - 1.0;
        let s = u * u + v * v;
        if s > 0.0 && s < 1.0 {
            return u * (-2.0 * s.ln() / s).sqrt();
        }
    }
}

/// Derived seed for shard `shard` of a run seeded with `seed`.
fn shard_seed(seed: u64, shard: u64) -> u64 {
    seed.wrapping_add(shard.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn sample_into(
    scenario: &Scenario,
    n: usize,
    rng: &mut ChaCha12Rng,
    records: &mut Vec<SampleRecord>,
) {
    let sigma = scenario.sigma();
    let q = scenario
        .pi()
        .expectation(scenario.psi())
        .expect("matching dimensions")
        .re
        .clamp(0.0, 1.0);
    let component_sd = sigma / std::f64::consts::SQRT_2;
    for _ in 0..n {
        let shifted = rng.gen::<f64>() < q;
        let x = standard_normal(rng) * component_sd + if shifted { 1.0 } else { 0.0 };
        let numerator = scenario.post_selected_amplitude(x).norm_sqr();
        let denominator =
            q * scenario.noise_density(x - 1.0) + (1.0 - q) * scenario.noise_density(x);
        let pass_probability = if denominator > 0.0 {
            numerator / denominator
        } else {
            0.0
        };
        let passed = rng.gen::<f64>() < pass_probability;
        records.push(SampleRecord { x, passed });
    }
}

/// Draws `n` measurement events; identical inputs give identical batches.
pub fn sample(scenario: &Scenario, n: usize, seed: u64) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "sample count must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n);
    sample_into(scenario, n, &mut rng, &mut records);
    Ok(SampleBatch { seed, records })
}

/// Like [`sample`], split across `shards` independently seeded sub-batches
/// merged in shard order. The result does not depend on how the shards are
/// scheduled, only on `(scenario, n, seed, shards)`.
pub fn sample_sharded(
    scenario: &Scenario,
    n: usize,
    seed: u64,
    shards: usize,
) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "sample count must be at least 1".into(),
        ));
    }
    if shards == 0 {
        return Err(Error::InvalidInput("shard count must be at least 1".into()));
    }
    let mut records = Vec::with_capacity(n);
    let per_shard = n / shards;
    let remainder = n % shards;
    for shard in 0..shards {
        let count = per_shard + usize::from(shard < remainder);
        if count == 0 {
            continue;
        }
        let mut rng = ChaCha12Rng::seed_from_u64(shard_seed(seed, shard as u64));
        sample_into(scenario, count, &mut rng, &mut records);
    }
    Ok(SampleBatch { seed, records })
}

/// Standard error of a binomial proportion with `k` successes in `n` trials.
/// Uses the Anscombe-adjusted proportion `(k + 1/2) / (n + 1)` inside the
/// square root so the error stays positive at the boundaries k = 0 and k = n.
fn binomial_std_error(k: usize, n: usize) -> f64 {
    let adjusted = (k as f64 + 0.5) / (n as f64 + 1.0);
    (adjusted * (1.0 - adjusted) / n as f64).sqrt()
}

/// Estimates `p_-`: the fraction of events with `x < 0` that passed
/// post-selection, normalized by the exact `p_phi` of the scenario.
pub fn estimate_p_minus(batch: &SampleBatch, scenario: &Scenario) -> Result<Estimate> {
    if batch.is_empty() {
        return Err(Error::InvalidInput("batch is empty".into()));
    }
    let n = batch.len();
    let k = batch
        .records
        .iter()
        .filter(|r| r.x < 0.0 && r.passed)
        .count();
    let p_phi = scenario.p_phi();
    Ok(Estimate {
        value: (k as f64 / n as f64) / p_phi,
        std_error: binomial_std_error(k, n) / p_phi,
        n_effective: n,
    })
}

/// The footnote variant: negative-reading fraction among post-selected
/// events only, a true conditional probability.
pub fn estimate_p_minus_conditional(batch: &SampleBatch) -> Result<Estimate> {
    if batch.is_empty() {
        return Err(Error::InvalidInput("batch is empty".into()));
    }
    let passed = batch.records.iter().filter(|r| r.passed).count();
    if passed == 0 {
        return Err(Error::InvalidInput(
            "no post-selected events in batch".into(),
        ));
    }
    let k = batch
        .records
        .iter()
        .filter(|r| r.x < 0.0 && r.passed)
        .count();
    Ok(Estimate {
        value: k as f64 / passed as f64,
        std_error: binomial_std_error(k, passed),
        n_effective: passed,
    })
}

/// Empirical post-selection pass rate; converges to `<psi|S|psi>`.
pub fn estimate_pass_rate(batch: &SampleBatch) -> Result<Estimate> {
    if batch.is_empty() {
        return Err(Error::InvalidInput("batch is empty".into()));
    }
    let n = batch.len();
    let k = batch.records.iter().filter(|r| r.passed).count();
    Ok(Estimate {
        value: k as f64 / n as f64,
        std_error: binomial_std_error(k, n),
        n_effective: n,
    })
}
