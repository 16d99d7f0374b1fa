//! Turning two-step adaptive strategies into nonadaptive ones.
//!
//! Every nontrivial branch `a` of an adaptive test becomes its own
//! nonadaptive test: all parties measure with branch `a`'s setting (Z on the
//! first stage), pass on branch `a`'s accepted outcomes, and on first-stage
//! outcome classes that belong to another branch `b` pass on
//!
//! * every outcome ([`ConversionMode::Literal`]), giving
//!   `Ω̃_a = M_a ⊗ N_a + Σ_{b≠a} M_b ⊗ 1`, or
//! * the outcomes the target can produce there ([`ConversionMode::TargetAware`]).
//!
//! The target-aware test is dominated by the literal one and still fixes the
//! target, so both satisfy `ν(Ω̃) ≥ ν(Ω)/α` where `α` is the largest branch
//! number. The target-aware form reproduces the nonadaptive W and Dicke
//! protocols exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::Ket;
use crate::ops::{merge_by_setting, AdaptiveTest, Arm, Branch, SparseMatrix, TestOperator, ALL_OUTCOMES};
use crate::spectral::{
    rationalize, spectral_gap, Fraction, Mode, Strategy, StrategyKind, WeightedTest,
};

/// How outcome classes of other branches are treated by a converted test.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConversionMode {
    /// Pass unconditionally.
    Literal,
    /// Pass on the outcomes the target state can produce.
    #[default]
    TargetAware,
}

/// Outcome probability below which the target is said not to produce it.
const NEVER: f64 = 1e-12;

/// Indices of branches with at least one accepted outcome.
fn nontrivial(t: &AdaptiveTest) -> Vec<usize> {
    (0..t.branches().len())
        .filter(|&a| t.branches()[a].arms.iter().any(|arm| !arm.accept.is_empty()))
        .collect()
}

/// The converted tests of `t` as single-branch trees, one per nontrivial branch.
pub fn convert_tree(t: &AdaptiveTest, target: &Ket, mode: ConversionMode) -> Result<Vec<AdaptiveTest>> {
    if target.n() != t.n() {
        return Err(Error::domain("target and test act on different registers"));
    }
    let live = nontrivial(t);
    let mut out = Vec::with_capacity(live.len());
    for &a in &live {
        let own = &t.branches()[a];
        let mut arms = own.arms.clone();
        for &b in live.iter().filter(|&&b| b != a) {
            for arm in &t.branches()[b].arms {
                let outside = match mode {
                    ConversionMode::Literal => Arm::accept_all(arm.excitations),
                    ConversionMode::TargetAware => {
                        let mut produced = Vec::new();
                        for o in ALL_OUTCOMES {
                            let p = t
                                .arm_matrix(own.setting, &Arm::new(arm.excitations, &[o]))
                                .expectation(target)?;
                            if p > NEVER {
                                produced.push(o);
                            }
                        }
                        Arm::new(arm.excitations, &produced)
                    }
                };
                arms.push(outside);
            }
        }
        out.push(AdaptiveTest::new(t.n(), t.pair(), vec![Branch::new(own.setting, arms)])?);
    }
    Ok(out)
}

/// `Ω̃_{a}` for every nontrivial branch `a` of `t`.
pub fn convert_test(t: &AdaptiveTest, target: &Ket, mode: ConversionMode) -> Result<Vec<TestOperator>> {
    convert_tree(t, target, mode)?
        .iter()
        .map(AdaptiveTest::operator)
        .collect()
}

/// Branch trees of all tests, merged by setting if asked.
fn trees(s: &Strategy, merge: bool) -> Result<Vec<(f64, AdaptiveTest)>> {
    s.tests()
        .iter()
        .enumerate()
        .map(|(j, t)| {
            let tree = t
                .procedure
                .as_ref()
                .ok_or_else(|| Error::domain(format!("test {j} has no branch tree")))?;
            let tree = if merge { merge_by_setting(tree)? } else { tree.clone() };
            Ok((t.weight, tree))
        })
        .collect()
}

/// Outcome of [`convert_strategy`].
#[derive(Debug, Clone)]
pub struct ConversionResult {
    pub input: StrategyKind,
    pub output: Strategy,
    pub mode: ConversionMode,
    pub merged: bool,
    /// Largest branch number before merging.
    pub alpha_in: usize,
    /// Largest branch number of the trees that were converted.
    pub alpha: usize,
    pub gap_in: f64,
    pub gap_out: f64,
    /// `ν(Ω̃) ≥ ν(Ω)/α − 1e-10`.
    pub guarantee_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversionSummary {
    pub input: StrategyKind,
    pub mode: ConversionMode,
    pub merged: bool,
    pub alpha_in: usize,
    pub alpha: usize,
    pub gap_in: Option<Fraction>,
    pub gap_out: Option<Fraction>,
    pub gap_in_decimal: f64,
    pub gap_out_decimal: f64,
    pub guarantee_ok: bool,
}

impl ConversionResult {
    pub fn summary(&self) -> ConversionSummary {
        ConversionSummary {
            input: self.input,
            mode: self.mode,
            merged: self.merged,
            alpha_in: self.alpha_in,
            alpha: self.alpha,
            gap_in: rationalize(self.gap_in).map(Fraction::from),
            gap_out: rationalize(self.gap_out).map(Fraction::from),
            gap_in_decimal: self.gap_in,
            gap_out_decimal: self.gap_out,
            guarantee_ok: self.guarantee_ok,
        }
    }
}

/// `Ω̃ = Σ_j Σ_a (μ_j/α_j) Ω̃_{a|j}`, with both gaps and the guarantee check.
pub fn convert_strategy(s: &Strategy, merge: bool, mode: ConversionMode) -> Result<ConversionResult> {
    let alpha_in = trees(s, false)?
        .iter()
        .map(|(_, t)| t.branch_number())
        .max()
        .unwrap_or(0);
    let input_trees = trees(s, merge)?;
    let mut tests = Vec::new();
    let mut alpha = 0;
    for (mu, tree) in &input_trees {
        let converted = convert_tree(tree, s.target(), mode)?;
        let alpha_j = converted.len();
        alpha = alpha.max(alpha_j);
        for t in converted {
            tests.push(WeightedTest::from_tree(mu / alpha_j as f64, t)?);
        }
    }
    let kind = StrategyKind {
        mode: Mode::Nonadaptive,
        ..s.kind()
    };
    let output = Strategy::new(s.target().clone(), tests, kind)?;
    let gap_in = spectral_gap(s)?.nu;
    let gap_out = spectral_gap(&output)?.nu;
    Ok(ConversionResult {
        input: s.kind(),
        output,
        mode,
        merged: merge,
        alpha_in,
        alpha,
        gap_in,
        gap_out,
        guarantee_ok: gap_out >= gap_in / alpha as f64 - 1e-10,
    })
}

/// `Ω′ = Σ_j μ_j(1 − 1/α_j)(Σ_a M_a ⊗ 1) + Σ_j μ_j(1/α_j − 1/α) Σ_a M_a ⊗ N_a`.
///
/// With literal conversion `Ω̃ = Ω/α + Ω′` and `Ω′ ≤ (1 − 1/α)·1`.
pub fn slack_operator(s: &Strategy, merge: bool) -> Result<SparseMatrix> {
    let trees = trees(s, merge)?;
    let alpha = trees
        .iter()
        .map(|(_, t)| t.branch_number())
        .max()
        .unwrap_or(1) as f64;
    let mut slack = SparseMatrix::zero(s.n());
    for (mu, t) in &trees {
        let alpha_j = t.branch_number() as f64;
        for a in nontrivial(t) {
            slack = slack.add_scaled(mu * (1.0 - 1.0 / alpha_j), &t.first_stage_matrix(a))?;
            slack = slack.add_scaled(mu * (1.0 / alpha_j - 1.0 / alpha), &t.branch_matrix(a))?;
        }
    }
    Ok(slack)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::w_state;
    use crate::ops::{dicke_adaptive_test, nonadaptive_trees, w_adaptive_test};
    use crate::hilbert::dicke_state;
    use crate::spectral::{assemble_dicke_strategy, assemble_w_strategy};

    #[test]
    fn w_test_converts_to_sector_and_pair_tests() {
        let n = 5;
        let t = w_adaptive_test(1, 3, n).unwrap();
        let ops = convert_test(&t, &w_state(n).unwrap(), ConversionMode::TargetAware).unwrap();
        let (z1, omega) = nonadaptive_trees(1, 3, 1, n).unwrap();
        assert_eq!(ops.len(), 2);
        assert!(ops[0].matrix().max_abs_diff(&z1.matrix()).unwrap() < 1e-14);
        assert!(ops[1].matrix().max_abs_diff(&omega.matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn literal_tests_fix_the_target_and_dominate() {
        let (n, k) = (5, 2);
        let d = dicke_state(n, k).unwrap();
        let t = dicke_adaptive_test(0, 4, k, n).unwrap();
        let lit = convert_test(&t, &d, ConversionMode::Literal).unwrap();
        let aware = convert_test(&t, &d, ConversionMode::TargetAware).unwrap();
        assert_eq!(lit.len(), 3);
        for (l, a) in lit.iter().zip(&aware) {
            assert!(l.fixed_point_residual(&d).unwrap() < 1e-12);
            assert!(a.fixed_point_residual(&d).unwrap() < 1e-12);
            // difference of a projector and its sub-projector is a projector
            let diff = TestOperator::new(l.matrix().add_scaled(-1.0, a.matrix()).unwrap()).unwrap();
            assert!(diff.is_projector());
        }
    }

    #[test]
    fn single_branch_test_is_unchanged() {
        let (_, omega) = nonadaptive_trees(0, 1, 1, 4).unwrap();
        let out = convert_tree(&omega, &w_state(4).unwrap(), ConversionMode::Literal).unwrap();
        assert_eq!(out, vec![omega]);
    }

    #[test]
    fn w4_conversion_halves_the_gap() {
        let s = assemble_w_strategy(4, Mode::Adaptive).unwrap();
        let r = convert_strategy(&s, false, ConversionMode::TargetAware).unwrap();
        assert_eq!(r.alpha, 2);
        assert!((r.gap_in - 1.0 / 3.0).abs() < 1e-10);
        assert!((r.gap_out - 1.0 / 6.0).abs() < 1e-10);
        assert!(r.guarantee_ok);
        let json = serde_json::to_string(&r.summary()).unwrap();
        assert!(json.contains("\"gap_out\":{\"num\":1,\"den\":6}"));
    }

    #[test]
    fn slack_identity_and_bound() {
        let s = assemble_dicke_strategy(5, 2, Mode::Adaptive).unwrap();
        let r = convert_strategy(&s, false, ConversionMode::Literal).unwrap();
        let slack = slack_operator(&s, false).unwrap();
        let rebuilt = s.operator().scale(1.0 / r.alpha as f64).add_scaled(1.0, &slack).unwrap();
        assert!(rebuilt.max_abs_diff(r.output.operator()).unwrap() < 1e-12);
        let top = crate::spectral::block_eigensystem(&slack).unwrap().spectrum()[0].0;
        assert!(top <= 1.0 - 1.0 / 3.0 + 1e-12);
    }

    #[test]
    fn strategies_without_trees_are_rejected() {
        let s = crate::spectral::global_strategy(&w_state(3).unwrap()).unwrap();
        assert!(convert_strategy(&s, false, ConversionMode::Literal).is_err());
    }
}
