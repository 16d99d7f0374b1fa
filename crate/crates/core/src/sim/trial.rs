use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::Ket;
use crate::ops::{execute_branch_procedure, AdaptiveTest};
use crate::spectral::Strategy;

/// Largest number of tests run in one trial before giving up.
pub const MAX_TESTS: u64 = 10_000_000;

/// How a single test outcome is drawn.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimMode {
    /// Pass with probability `⟨ψ′|Ω_j|ψ′⟩`.
    #[default]
    Bernoulli,
    /// Sample every measurement outcome through the branch tree.
    Procedure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    /// Tests passed before the first failure.
    pub passes: u64,
    /// The trial hit the test cap without failing; the input behaves like the target.
    pub capped: bool,
}

/// Precomputed test-selection and pass data for one input state.
#[derive(Debug, Clone)]
pub struct Sampler {
    cumulative: Vec<f64>,
    pass: Vec<f64>,
    procedures: Vec<Option<AdaptiveTest>>,
    input: Ket,
    mode: SimMode,
    cap: u64,
}

impl Sampler {
    pub fn new(s: &Strategy, input: &Ket, mode: SimMode) -> Result<Self> {
        if input.n() != s.n() {
            return Err(Error::domain("input and strategy act on different registers"));
        }
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(s.tests().len());
        let mut pass = Vec::with_capacity(s.tests().len());
        for t in s.tests() {
            acc += t.weight;
            cumulative.push(acc);
            pass.push(t.operator.pass_probability(input)?.clamp(0.0, 1.0));
        }
        // guard the last bucket against rounding in the running sum
        if let Some(last) = cumulative.last_mut() {
            *last = f64::INFINITY;
        }
        Ok(Self {
            cumulative,
            pass,
            procedures: s.tests().iter().map(|t| t.procedure.clone()).collect(),
            input: input.clone(),
            mode,
            cap: MAX_TESTS,
        })
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    /// `⟨ψ′|Ω_j|ψ′⟩` for each test.
    pub fn pass_probabilities(&self) -> &[f64] {
        &self.pass
    }

    /// Draws a test index according to the weights.
    pub fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cumulative.partition_point(|&c| c <= u)
    }

    /// Runs one randomly chosen test.
    pub fn step<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<bool> {
        let j = self.pick(rng);
        match (self.mode, &self.procedures[j]) {
            (SimMode::Procedure, Some(tree)) => {
                Ok(execute_branch_procedure(tree, &self.input, rng)?.passed)
            }
            _ => Ok(rng.random::<f64>() < self.pass[j]),
        }
    }

    /// Runs tests until the first failure.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TrialOutcome> {
        let mut passes = 0;
        while passes < self.cap {
            if !self.step(rng)? {
                return Ok(TrialOutcome {
                    passes,
                    capped: false,
                });
            }
            passes += 1;
        }
        Ok(TrialOutcome {
            passes,
            capped: true,
        })
    }
}

/// One trial: random tests on `input` until the first failure.
pub fn run_protocol_once<R: Rng + ?Sized>(
    s: &Strategy,
    input: &Ket,
    mode: SimMode,
    rng: &mut R,
) -> Result<TrialOutcome> {
    Sampler::new(s, input, mode)?.run(rng)
}
