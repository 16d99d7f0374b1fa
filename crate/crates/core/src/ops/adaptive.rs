//! Two-step adaptive tests as executable branch trees.
//!
//! The first stage measures every qubit except the pair `(i, j)` in the Z
//! basis. The number of excitations seen selects an [`Arm`]; arms are grouped
//! into [`Branch`]es that share one second-stage setting on the pair. The
//! operator form is
//!
//! ```text
//! Ω = Σ_a M_a ⊗ N_a,    M_a ⊗ N_a = Σ_{arm ∈ a} Z̄^{w(arm)}_{i,j} ⊗ P(setting_a, accept(arm))
//! ```
//!
//! where `P(setting, accept)` projects onto the accepted product
//! eigenvectors of the pair setting. Excitation counts not covered by any arm
//! fail without a second stage.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::operator::{SparseMatrix, TestOperator};
use super::pauli::{eigenvector, embed_conditioned, product_projector, Axis};
use crate::error::{Error, Result};
use crate::hilbert::{full_mask, Ket, PRUNE_THRESHOLD};

/// Second-stage instructions for one first-stage excitation count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arm {
    pub excitations: usize,
    /// Accepted `(bit_i, bit_j)` outcomes in the branch setting.
    pub accept: Vec<[u8; 2]>,
}

impl Arm {
    pub fn new(excitations: usize, accept: &[[u8; 2]]) -> Self {
        let accept: BTreeSet<[u8; 2]> = accept.iter().copied().collect();
        Self {
            excitations,
            accept: accept.into_iter().collect(),
        }
    }

    /// Accepts all four pair outcomes.
    pub fn accept_all(excitations: usize) -> Self {
        Self::new(excitations, &ALL_OUTCOMES)
    }

    pub fn accepts(&self, outcome: [u8; 2]) -> bool {
        self.accept.contains(&outcome)
    }
}

pub(crate) const ALL_OUTCOMES: [[u8; 2]; 4] = [[0, 0], [0, 1], [1, 0], [1, 1]];

/// Arms sharing one second-stage measurement setting on the pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub setting: [Axis; 2],
    pub arms: Vec<Arm>,
}

impl Branch {
    pub fn new(setting: [Axis; 2], arms: Vec<Arm>) -> Self {
        Self { setting, arms }
    }

    fn is_trivial(&self) -> bool {
        self.arms.iter().all(|a| a.accept.is_empty())
    }
}

/// A two-step adaptive test on pair `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptiveTest {
    n: usize,
    pair: (usize, usize),
    branches: Vec<Branch>,
}

impl AdaptiveTest {
    pub fn new(n: usize, pair: (usize, usize), branches: Vec<Branch>) -> Result<Self> {
        let (i, j) = pair;
        if i == j || i >= n || j >= n {
            return Err(Error::domain(format!("invalid pair ({i},{j}) on {n} qubits")));
        }
        let mut seen = BTreeSet::new();
        for arm in branches.iter().flat_map(|b| &b.arms) {
            if arm.excitations + 2 > n {
                return Err(Error::domain(format!(
                    "arm expects {} excitations among {} first-stage qubits",
                    arm.excitations,
                    n - 2
                )));
            }
            if !seen.insert(arm.excitations) {
                return Err(Error::domain(format!(
                    "first-stage outcome class with {} excitations selects two arms",
                    arm.excitations
                )));
            }
            if arm.accept.iter().flatten().any(|&b| b > 1) {
                return Err(Error::domain("outcome bits must be 0 or 1"));
            }
        }
        Ok(Self { n, pair, branches })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pair(&self) -> (usize, usize) {
        self.pair
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    /// Qubits measured in the first stage, ascending.
    pub fn first_stage(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| q != self.pair.0 && q != self.pair.1)
            .collect()
    }

    /// α: the number of branches with a nontrivial second-stage test.
    pub fn branch_number(&self) -> usize {
        self.branches.iter().filter(|b| !b.is_trivial()).count()
    }

    /// Canonical setting label of a branch: one axis letter per qubit, qubit 0 first.
    pub fn setting_label(&self, branch: usize) -> String {
        let b = &self.branches[branch];
        (0..self.n)
            .map(|q| {
                if q == self.pair.0 {
                    b.setting[0]
                } else if q == self.pair.1 {
                    b.setting[1]
                } else {
                    Axis::Z
                }
                .to_string()
            })
            .collect()
    }

    pub(crate) fn arm_matrix(&self, setting: [Axis; 2], arm: &Arm) -> SparseMatrix {
        let accepted: Vec<Vec<u8>> = arm.accept.iter().map(|o| o.to_vec()).collect();
        let local = product_projector(&setting, &accepted);
        let w = arm.excitations;
        embed_conditioned(self.n, &[self.pair.0, self.pair.1], &local, |x| x == w)
    }

    /// `M_a ⊗ N_a` for branch `a`.
    pub fn branch_matrix(&self, branch: usize) -> SparseMatrix {
        let b = &self.branches[branch];
        let mut m = SparseMatrix::zero(self.n);
        for arm in &b.arms {
            m = m
                .add_scaled(1.0, &self.arm_matrix(b.setting, arm))
                .expect("same register");
        }
        m
    }

    /// `M_a ⊗ 1`: the first-stage projector of branch `a` with identity on the pair.
    pub fn first_stage_matrix(&self, branch: usize) -> SparseMatrix {
        let b = &self.branches[branch];
        let mut m = SparseMatrix::zero(self.n);
        for arm in &b.arms {
            m = m
                .add_scaled(1.0, &self.arm_matrix(b.setting, &Arm::accept_all(arm.excitations)))
                .expect("same register");
        }
        m
    }

    /// `Σ_a M_a ⊗ N_a` as a sparse matrix.
    pub fn matrix(&self) -> SparseMatrix {
        let mut m = SparseMatrix::zero(self.n);
        for a in 0..self.branches.len() {
            m = m.add_scaled(1.0, &self.branch_matrix(a)).expect("same register");
        }
        m
    }

    /// Operator form of the test.
    pub fn operator(&self) -> Result<TestOperator> {
        TestOperator::new(self.matrix())
    }

    /// The same test conjugated by `X^{⊗n}`: excitation counts are
    /// complemented, and Z and Y outcomes flip while X outcomes are unchanged.
    pub fn conjugate_by_flip(&self) -> AdaptiveTest {
        let first = self.n - 2;
        let flip = |axis: Axis, b: u8| if axis == Axis::X { b } else { 1 - b };
        let branches = self
            .branches
            .iter()
            .map(|b| Branch {
                setting: b.setting,
                arms: b
                    .arms
                    .iter()
                    .map(|arm| {
                        let accept: Vec<[u8; 2]> = arm
                            .accept
                            .iter()
                            .map(|o| [flip(b.setting[0], o[0]), flip(b.setting[1], o[1])])
                            .collect();
                        Arm::new(first - arm.excitations, &accept)
                    })
                    .collect(),
            })
            .collect();
        AdaptiveTest {
            n: self.n,
            pair: self.pair,
            branches,
        }
    }
}

/// Everything observed in one run of an adaptive test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub pair: (usize, usize),
    /// `(qubit, outcome)` for every first-stage qubit.
    pub first_stage: Vec<(usize, u8)>,
    pub excitations: usize,
    /// Selected branch, `None` if the outcome class has no arm.
    pub branch: Option<usize>,
    pub setting: Option<[Axis; 2]>,
    pub second_stage: Option<[u8; 2]>,
    pub passed: bool,
}

impl fmt::Display for Transcript {
    // Qubits are printed 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.pair;
        writeln!(f, "pair: ({}, {})", i + 1, j + 1)?;
        let outcomes: Vec<String> = self
            .first_stage
            .iter()
            .map(|(q, b)| format!("Z{}={}", q + 1, b))
            .collect();
        writeln!(f, "first stage: {} ({} excitations)", outcomes.join(" "), self.excitations)?;
        match (self.branch, self.setting, self.second_stage) {
            (Some(b), Some(s), Some(o)) => writeln!(
                f,
                "branch {}: {}{} on ({}, {}) -> {}{}",
                b + 1,
                s[0],
                s[1],
                i + 1,
                j + 1,
                o[0],
                o[1]
            )?,
            _ => writeln!(f, "no branch for this outcome class")?,
        }
        write!(f, "result: {}", if self.passed { "pass" } else { "fail" })
    }
}

/// Runs `test` once on `state`, sampling every outcome from the Born rule.
///
/// The pass probability over the random stream equals `⟨state|Ω|state⟩` for
/// the test's operator form.
pub fn execute_branch_procedure<R: Rng + ?Sized>(
    test: &AdaptiveTest,
    state: &Ket,
    rng: &mut R,
) -> Result<Transcript> {
    if state.n() != test.n {
        return Err(Error::domain(format!(
            "{}-qubit state given to a {}-qubit test",
            state.n(),
            test.n
        )));
    }
    let (i, j) = test.pair;
    let pair_mask = (1u64 << i) | (1u64 << j);
    let others = full_mask(test.n) & !pair_mask;

    // First stage: marginal distribution of the first-stage Z outcomes.
    let mut marginal: BTreeMap<u64, f64> = BTreeMap::new();
    for (label, a) in state.iter() {
        *marginal.entry(label & others).or_insert(0.0) += a.norm_sqr();
    }
    let total: f64 = marginal.values().sum();
    if total < PRUNE_THRESHOLD {
        return Err(Error::domain("cannot measure the zero vector"));
    }
    let pattern = sample_key(&marginal, total, rng);
    let p_pattern = marginal[&pattern];

    // Collapse onto the observed pattern; what remains is a pair state.
    let mut pair_state = [Complex64::new(0.0, 0.0); 4];
    for (idx, amp) in pair_state.iter_mut().enumerate() {
        let label = pattern | (((idx >> 1) as u64) << i) | (((idx & 1) as u64) << j);
        let a = state.amplitude(label) / p_pattern.sqrt();
        if a.norm() >= PRUNE_THRESHOLD {
            *amp = a;
        }
    }

    let first_stage: Vec<(usize, u8)> = test
        .first_stage()
        .into_iter()
        .map(|q| (q, ((pattern >> q) & 1) as u8))
        .collect();
    let excitations = pattern.count_ones() as usize;
    let mut transcript = Transcript {
        pair: test.pair,
        first_stage,
        excitations,
        branch: None,
        setting: None,
        second_stage: None,
        passed: false,
    };

    let found = test.branches.iter().enumerate().find_map(|(b, branch)| {
        branch
            .arms
            .iter()
            .find(|arm| arm.excitations == excitations)
            .map(|arm| (b, branch.setting, arm))
    });
    let Some((b, setting, arm)) = found else {
        return Ok(transcript);
    };

    // Second stage in the branch setting.
    let mut probs: BTreeMap<u64, f64> = BTreeMap::new();
    for (o, outcome) in ALL_OUTCOMES.iter().enumerate() {
        let e0 = eigenvector(setting[0], outcome[0]);
        let e1 = eigenvector(setting[1], outcome[1]);
        let overlap: Complex64 = (0..4)
            .map(|idx| (e0[idx >> 1] * e1[idx & 1]).conj() * pair_state[idx])
            .sum();
        let p = overlap.norm_sqr();
        if p >= PRUNE_THRESHOLD * PRUNE_THRESHOLD {
            probs.insert(o as u64, p);
        }
    }
    let norm: f64 = probs.values().sum();
    let outcome = ALL_OUTCOMES[sample_key(&probs, norm, rng) as usize];

    transcript.branch = Some(b);
    transcript.setting = Some(setting);
    transcript.second_stage = Some(outcome);
    transcript.passed = arm.accepts(outcome);
    Ok(transcript)
}

/// Draws a key with probability proportional to its weight. Keys with zero
/// weight are never returned.
fn sample_key<R: Rng + ?Sized>(weights: &BTreeMap<u64, f64>, total: f64, rng: &mut R) -> u64 {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (&k, &w) in weights {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = k;
        if u < acc {
            return k;
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> AdaptiveTest {
        AdaptiveTest::new(
            3,
            (0, 1),
            vec![
                Branch::new([Axis::Z, Axis::Z], vec![Arm::new(1, &[[0, 0]])]),
                Branch::new([Axis::X, Axis::X], vec![Arm::new(0, &[[0, 0], [1, 1]])]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn overlapping_arms_are_rejected() {
        let err = AdaptiveTest::new(
            4,
            (0, 1),
            vec![
                Branch::new([Axis::Z, Axis::Z], vec![Arm::new(1, &[[0, 0]])]),
                Branch::new([Axis::X, Axis::X], vec![Arm::new(1, &[[0, 0]])]),
            ],
        );
        assert!(err.is_err());
        assert!(AdaptiveTest::new(3, (1, 1), vec![]).is_err());
        assert!(AdaptiveTest::new(
            3,
            (0, 1),
            vec![Branch::new([Axis::Z, Axis::Z], vec![Arm::new(2, &[[0, 0]])])]
        )
        .is_err());
    }

    #[test]
    fn setting_labels_are_per_qubit() {
        let t = toy();
        assert_eq!(t.setting_label(0), "ZZZ");
        assert_eq!(t.setting_label(1), "XXZ");
        assert_eq!(t.first_stage(), vec![2]);
    }

    #[test]
    fn branch_first_stage_projectors_are_disjoint() {
        let t = toy();
        let m0 = t.first_stage_matrix(0);
        let m1 = t.first_stage_matrix(1);
        assert_eq!(m0.matmul(&m1).unwrap().nnz(), 0);
    }

    #[test]
    fn operator_is_sum_of_branches() {
        let t = toy();
        let sum = t.branch_matrix(0).add_scaled(1.0, &t.branch_matrix(1)).unwrap();
        assert_eq!(t.matrix(), sum);
    }

    #[test]
    fn flip_conjugation_matches_matrix_conjugation() {
        let t = toy();
        let flipped = t.conjugate_by_flip();
        let by_matrix = t.matrix().permute(|u| !u & 0b111);
        assert!(flipped.matrix().max_abs_diff(&by_matrix).unwrap() < 1e-15);
        assert_eq!(flipped.conjugate_by_flip(), t);
    }

    #[test]
    fn transcript_is_reproducible() {
        let t = toy();
        let state = crate::hilbert::w_state(3).unwrap();
        let a = execute_branch_procedure(&t, &state, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = execute_branch_procedure(&t, &state, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        assert!(a.passed);
        let shown = a.to_string();
        assert!(shown.contains("pair: (1, 2)"));
        assert!(shown.ends_with("result: pass"));
    }

    #[test]
    fn uncovered_outcome_class_fails() {
        let t = toy();
        let state = Ket::from_amplitudes(3, [(0b100, Complex64::new(1.0, 0.0))]).unwrap();
        // qubit 2 excited selects the ZZ arm, pair |00⟩ passes
        let run = execute_branch_procedure(&t, &state, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(run.passed);
        let t2 = AdaptiveTest::new(
            3,
            (0, 1),
            vec![Branch::new([Axis::X, Axis::X], vec![Arm::new(0, &[[0, 0], [1, 1]])])],
        )
        .unwrap();
        let run = execute_branch_procedure(&t2, &state, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert!(!run.passed);
        assert_eq!(run.branch, None);
    }
}
