//! The W, Dicke and Bell tests, in branch-tree and operator form.

use std::collections::BTreeMap;

use super::adaptive::{AdaptiveTest, Arm, Branch};
use super::operator::{SparseMatrix, TestOperator};
use super::pauli::{sector_projector, Axis};
use crate::error::{Error, Result};
use crate::hilbert::{full_mask, Ket};

const ZZ: [Axis; 2] = [Axis::Z, Axis::Z];
const XX: [Axis; 2] = [Axis::X, Axis::X];
const YY: [Axis; 2] = [Axis::Y, Axis::Y];

const EQUAL: [[u8; 2]; 2] = [[0, 0], [1, 1]];
const ODD: [[u8; 2]; 2] = [[0, 1], [1, 0]];

/// `Some(k − d)` when it is a valid first-stage excitation count on `n` qubits.
fn shifted(k: usize, d: usize, n: usize) -> Option<usize> {
    k.checked_sub(d).filter(|&w| w + 2 <= n)
}

fn check_pair(i: usize, j: usize, n: usize) -> Result<()> {
    if i == j || i >= n || j >= n {
        return Err(Error::domain(format!("invalid pair ({i},{j}) on {n} qubits")));
    }
    Ok(())
}

/// Adaptive test for `k` excitations, dropping the arms whose excitation
/// count is out of range. At `k = 1` this is the W test.
fn adaptive_tree(i: usize, j: usize, k: usize, n: usize) -> Result<AdaptiveTest> {
    let mut branches = Vec::new();
    if let Some(w) = shifted(k, 0, n) {
        branches.push(Branch::new(ZZ, vec![Arm::new(w, &[[0, 0]])]));
    }
    if let Some(w) = shifted(k, 2, n) {
        branches.push(Branch::new(ZZ, vec![Arm::new(w, &[[1, 1]])]));
    }
    if let Some(w) = shifted(k, 1, n) {
        branches.push(Branch::new(XX, vec![Arm::new(w, &EQUAL)]));
    }
    AdaptiveTest::new(n, (i, j), branches)
}

/// `Ω→_{i,j}` for `|W_n⟩`.
///
/// One excitation among the other parties: both measure Z and pass on
/// `00`. No excitation: both measure X and pass when the outcomes agree.
/// Anything else fails.
pub fn w_adaptive_test(i: usize, j: usize, n: usize) -> Result<AdaptiveTest> {
    if n < 3 {
        return Err(Error::domain(format!("W test needs n ≥ 3, got {n}")));
    }
    check_pair(i, j, n)?;
    adaptive_tree(i, j, 1, n)
}

/// `Ω→_{i,j}` for `|D_n^k⟩`, `2 ≤ k ≤ n−2`, with three branches:
/// `k` excitations → ZZ pass on `00`, `k−2` → ZZ pass on `11`,
/// `k−1` → XX pass on equal outcomes.
pub fn dicke_adaptive_test(i: usize, j: usize, k: usize, n: usize) -> Result<AdaptiveTest> {
    if n < 4 || k < 2 || k + 2 > n {
        return Err(Error::domain(format!(
            "Dicke test needs n ≥ 4 and 2 ≤ k ≤ n−2, got n={n}, k={k}"
        )));
    }
    check_pair(i, j, n)?;
    adaptive_tree(i, j, k, n)
}

/// Single-branch tree for `Z^k`: ZZ on the pair, accepting the outcomes that
/// complete exactly `k` excitations.
fn sector_tree(i: usize, j: usize, k: usize, n: usize) -> Result<AdaptiveTest> {
    let mut arms = Vec::new();
    if let Some(w) = shifted(k, 0, n) {
        arms.push(Arm::new(w, &[[0, 0]]));
    }
    if let Some(w) = shifted(k, 1, n) {
        arms.push(Arm::new(w, &ODD));
    }
    if let Some(w) = shifted(k, 2, n) {
        arms.push(Arm::new(w, &[[1, 1]]));
    }
    AdaptiveTest::new(n, (i, j), vec![Branch::new(ZZ, arms)])
}

/// Single-branch tree for `Ω_{i,j} = Z̄^{k−1}(XX)⁺ + (Z̄^k + Z̄^{k−2})·1`.
fn pair_tree(i: usize, j: usize, k: usize, n: usize) -> Result<AdaptiveTest> {
    let mut arms = Vec::new();
    if let Some(w) = shifted(k, 1, n) {
        arms.push(Arm::new(w, &EQUAL));
    }
    for d in [0, 2] {
        if let Some(w) = shifted(k, d, n) {
            arms.push(Arm::accept_all(w));
        }
    }
    AdaptiveTest::new(n, (i, j), vec![Branch::new(XX, arms)])
}

/// `(Z^k, Ω_{i,j})` as executable single-branch trees.
pub fn nonadaptive_trees(
    i: usize,
    j: usize,
    k: usize,
    n: usize,
) -> Result<(AdaptiveTest, AdaptiveTest)> {
    if n < 3 || k == 0 || k + 1 > n {
        return Err(Error::domain(format!("no nonadaptive tests for n={n}, k={k}")));
    }
    check_pair(i, j, n)?;
    Ok((sector_tree(i, j, k, n)?, pair_tree(i, j, k, n)?))
}

/// `(Z¹, Ω_{i,j})` for `|W_n⟩`. `Z¹` is the projector onto weight-1 labels
/// and does not depend on the pair.
pub fn w_nonadaptive_tests(i: usize, j: usize, n: usize) -> Result<(TestOperator, TestOperator)> {
    if n < 3 {
        return Err(Error::domain(format!("W test needs n ≥ 3, got {n}")));
    }
    let (_, pair) = nonadaptive_trees(i, j, 1, n)?;
    Ok((sector_projector(1, n)?, pair.operator()?))
}

/// `(Z^k, Ω_{i,j})` for `|D_n^k⟩`, `2 ≤ k ≤ n−2`.
pub fn dicke_nonadaptive_tests(
    i: usize,
    j: usize,
    k: usize,
    n: usize,
) -> Result<(TestOperator, TestOperator)> {
    if n < 4 || k < 2 || k + 2 > n {
        return Err(Error::domain(format!(
            "Dicke test needs n ≥ 4 and 2 ≤ k ≤ n−2, got n={n}, k={k}"
        )));
    }
    let (_, pair) = nonadaptive_trees(i, j, k, n)?;
    Ok((sector_projector(k, n)?, pair.operator()?))
}

/// The two-qubit Bell tests `(XX)⁺`, `(YY)⁺`, `(ZZ)⁻` as trees.
pub fn bell_tests() -> [AdaptiveTest; 3] {
    let single = |setting, accept: &[[u8; 2]]| {
        AdaptiveTest::new(2, (0, 1), vec![Branch::new(setting, vec![Arm::new(0, accept)])])
            .expect("valid two-qubit test")
    };
    [single(XX, &EQUAL), single(YY, &EQUAL), single(ZZ, &ODD)]
}

/// Merges branches whose `classify` labels agree: their arms are pooled into
/// one branch with the shared setting. Branch order follows first appearance.
pub fn merge_branches<F>(t: &AdaptiveTest, classify: F) -> Result<AdaptiveTest>
where
    F: Fn(&AdaptiveTest, usize) -> String,
{
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Branch> = BTreeMap::new();
    for (a, branch) in t.branches().iter().enumerate() {
        let label = classify(t, a);
        match groups.get_mut(&label) {
            Some(merged) => {
                if merged.setting != branch.setting {
                    return Err(Error::domain(format!(
                        "branches labelled {label} use settings {:?} and {:?}",
                        merged.setting, branch.setting
                    )));
                }
                merged.arms.extend(branch.arms.iter().cloned());
            }
            None => {
                order.push(label.clone());
                groups.insert(label, branch.clone());
            }
        }
    }
    let branches = order.iter().map(|l| groups[l].clone()).collect();
    AdaptiveTest::new(t.n(), t.pair(), branches)
}

/// [`merge_branches`] keyed by the canonical setting label.
pub fn merge_by_setting(t: &AdaptiveTest) -> Result<AdaptiveTest> {
    merge_branches(t, |t, a| t.setting_label(a))
}

/// `X^{⊗n}` as a basis permutation: every label is complemented.
///
/// It maps `|D_n^k⟩` to `|D_n^{n−k}⟩` and is its own inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalFlip {
    n: usize,
}

impl LocalFlip {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn label(&self, u: u64) -> u64 {
        !u & full_mask(self.n)
    }

    pub fn ket(&self, ket: &Ket) -> Ket {
        ket.permute(|u| self.label(u))
    }

    /// `X^{⊗n} · m · X^{⊗n}`.
    pub fn conjugate(&self, m: &SparseMatrix) -> SparseMatrix {
        m.permute(|u| self.label(u))
    }
}
