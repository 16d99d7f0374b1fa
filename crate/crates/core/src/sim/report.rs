use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_slopes, FitResult};
use super::noise::{worst_case_noise, NoiseSource, NoisyInput};
use super::trial::{Sampler, SimMode, MAX_TESTS};
use crate::error::{Error, Result};
use crate::spectral::{Strategy, StrategyKind};

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// `count` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// 40 infidelities log-spaced in `[0.02, 0.5]`.
pub fn default_eps_grid() -> Vec<f64> {
    log_grid(0.02, 0.5, 40)
}

/// 100 confidence parameters evenly spaced in `[0.01, 0.2]`.
pub fn table_deltas() -> Vec<f64> {
    linear_grid(0.01, 0.2, 100)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub eps: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Trials per infidelity.
    pub m: usize,
    pub seed: u64,
    pub mode: SimMode,
    pub max_tests: u64,
}

impl SimConfig {
    pub fn new(eps: Vec<f64>, deltas: Vec<f64>, m: usize, seed: u64) -> Self {
        Self {
            eps,
            deltas,
            m,
            seed,
            mode: SimMode::Bernoulli,
            max_tests: MAX_TESTS,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.m < 100 {
            return Err(Error::domain(format!("need at least 100 trials, got {}", self.m)));
        }
        if self.eps.is_empty() || self.deltas.is_empty() {
            return Err(Error::domain("empty infidelity or confidence grid"));
        }
        if let Some(e) = self.eps.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::domain(format!("infidelity {e} outside (0,1]")));
        }
        for &d in &self.deltas {
            if !(d > 0.0 && d < 1.0) || threshold_rank(d, self.m) == 0 {
                return Err(Error::domain(format!(
                    "δ = {d} with M = {} leaves no order statistic ⌊δM⌋ ≥ 1",
                    self.m
                )));
            }
        }
        Ok(())
    }
}

fn threshold_rank(delta: f64, m: usize) -> usize {
    // tolerate δM landing a hair below an integer
    (delta * m as f64 + 1e-9).floor() as usize
}

/// Pass counts and order statistics of a simulated experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub strategy: StrategyKind,
    pub seed: u64,
    pub m: usize,
    pub mode: SimMode,
    pub lambda2: f64,
    pub nu: f64,
    pub noise: NoiseSource,
    pub eps: Vec<f64>,
    pub deltas: Vec<f64>,
    /// `⟨ψ′|Ω|ψ′⟩` per infidelity.
    pub pass_probability: Vec<f64>,
    /// `⟨ψ′|Ω_j|ψ′⟩` per infidelity and test; depends on the noise vector chosen.
    pub test_pass_probability: Vec<Vec<f64>>,
    /// Trials per infidelity that reached the test cap.
    pub capped: Vec<u64>,
    /// `N_{⌊δM⌋}` of the descending pass counts, per infidelity and δ.
    pub thresholds: Vec<Vec<u64>>,
    /// Slope fit of the thresholds, when the grids have at least two points each.
    pub fit: Option<FitResult>,
    /// Pass counts per infidelity, in trial order.
    pub samples: Vec<Vec<u64>>,
}

/// Runs the experiment: for every infidelity, `M` independent trials on the
/// worst-case noisy input.
///
/// Trial `t` at infidelity index `e` draws from the ChaCha8 stream
/// `(e << 32) | t` of `seed`, so results do not depend on scheduling.
pub fn simulate(s: &Strategy, config: &SimConfig) -> Result<SimulationReport> {
    config.validate()?;
    let noise = worst_case_noise(s)?;
    let mut samples = Vec::with_capacity(config.eps.len());
    let mut capped = Vec::with_capacity(config.eps.len());
    let mut pass_probability = Vec::with_capacity(config.eps.len());
    let mut test_pass_probability = Vec::with_capacity(config.eps.len());
    for (e, &eps) in config.eps.iter().enumerate() {
        let input = NoisyInput::new(s.target(), &noise.tau, eps)?;
        let sampler = Sampler::new(s, &input.psi_prime, config.mode)?.with_cap(config.max_tests);
        pass_probability.push(s.operator().expectation(&input.psi_prime)?);
        test_pass_probability.push(sampler.pass_probabilities().to_vec());
        let outcomes = (0..config.m as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(((e as u64) << 32) | t);
                sampler.run(&mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        capped.push(outcomes.iter().filter(|o| o.capped).count() as u64);
        samples.push(outcomes.iter().map(|o| o.passes).collect::<Vec<u64>>());
    }
    let thresholds: Vec<Vec<u64>> = samples
        .iter()
        .map(|row| thresholds_of(row, &config.deltas))
        .collect();
    let fit = if config.eps.len() >= 2 && config.deltas.len() >= 2 {
        Some(fit_slopes(&config.eps, &config.deltas, &thresholds)?)
    } else {
        None
    };
    Ok(SimulationReport {
        strategy: s.kind(),
        seed: config.seed,
        m: config.m,
        mode: config.mode,
        lambda2: noise.lambda2,
        nu: noise.nu,
        noise: noise.source,
        eps: config.eps.clone(),
        deltas: config.deltas.clone(),
        pass_probability,
        test_pass_probability,
        capped,
        thresholds,
        fit,
        samples,
    })
}

/// `N_{⌊δM⌋}` (1-based) of `counts` sorted in decreasing order, for each δ.
pub fn thresholds_of(counts: &[u64], deltas: &[f64]) -> Vec<u64> {
    let mut sorted = counts.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    deltas
        .iter()
        .map(|&d| sorted[threshold_rank(d, counts.len()).max(1) - 1])
        .collect()
}

/// One `(ε, δ, N)` row of the threshold table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub eps: f64,
    pub delta: f64,
    pub n: u64,
}

impl SimulationReport {
    pub fn threshold_rows(&self) -> Vec<ThresholdRow> {
        let mut rows = Vec::new();
        for (e, &eps) in self.eps.iter().enumerate() {
            for (d, &delta) in self.deltas.iter().enumerate() {
                rows.push(ThresholdRow {
                    eps,
                    delta,
                    n: self.thresholds[e][d],
                });
            }
        }
        rows
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write_thresholds_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for row in self.threshold_rows() {
            out.serialize(row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// `(1/ε, N_i)` points, `per_eps` trials per infidelity spread evenly over the run.
    pub fn write_scatter_csv<W: Write>(&self, w: W, per_eps: usize) -> Result<()> {
        #[derive(Serialize)]
        struct Point {
            inv_eps: f64,
            passes: u64,
        }
        let mut out = csv::Writer::from_writer(w);
        for (e, &eps) in self.eps.iter().enumerate() {
            let row = &self.samples[e];
            let take = per_eps.min(row.len()).max(1);
            for i in 0..take {
                out.serialize(Point {
                    inv_eps: 1.0 / eps,
                    passes: row[i * row.len() / take],
                })?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

pub fn read_thresholds_csv<R: Read>(r: R) -> Result<Vec<ThresholdRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}
