use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{bell_psi_plus, binom, dicke_state, w_state, Ket};
use crate::ops::{
    bell_tests, dicke_adaptive_test, nonadaptive_trees, w_adaptive_test, AdaptiveTest, LocalFlip,
    SparseMatrix, TestOperator,
};

/// Which protocol a strategy implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `|ψ⁺⟩` with the three settings XX, YY, ZZ.
    Bell3,
    /// `|ψ⁺⟩` with XX and ZZ only.
    Bell2,
    W,
    Dicke,
    /// The projector onto the target, `ν = 1`.
    Global,
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Bell3 => "bell3",
            Family::Bell2 => "bell2",
            Family::W => "W",
            Family::Dicke => "D",
            Family::Global => "global",
            Family::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bell3" => Ok(Family::Bell3),
            "bell2" => Ok(Family::Bell2),
            "W" | "w" => Ok(Family::W),
            "D" | "d" | "dicke" => Ok(Family::Dicke),
            "global" => Ok(Family::Global),
            _ => Err(Error::domain(format!("unknown family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Adaptive,
    Nonadaptive,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Adaptive => "adaptive",
            Mode::Nonadaptive => "nonadaptive",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(Mode::Adaptive),
            "nonadaptive" => Ok(Mode::Nonadaptive),
            _ => Err(Error::domain(format!("unknown mode {s:?}"))),
        }
    }
}

/// Identifies a strategy for reports and closed-form lookups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategyKind {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub mode: Mode,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::W => write!(f, "W{} {}", self.n, self.mode),
            Family::Dicke => write!(f, "D{}^{} {}", self.n, self.k, self.mode),
            _ => write!(f, "{} (n={})", self.family, self.n),
        }
    }
}

/// One test of a strategy with its probability `μ_j`. `procedure` holds the
/// branch tree when the test can be executed step by step.
#[derive(Debug, Clone)]
pub struct WeightedTest {
    pub weight: f64,
    pub operator: TestOperator,
    pub procedure: Option<AdaptiveTest>,
}

impl WeightedTest {
    pub fn from_tree(weight: f64, tree: AdaptiveTest) -> Result<Self> {
        Ok(Self {
            weight,
            operator: tree.operator()?,
            procedure: Some(tree),
        })
    }
}

/// A verification strategy `Ω = Σ_j μ_j Ω_j` with its target state.
#[derive(Debug, Clone)]
pub struct Strategy {
    target: Ket,
    tests: Vec<WeightedTest>,
    operator: SparseMatrix,
    kind: StrategyKind,
}

impl Strategy {
    /// Checks that the weights form a probability distribution and that
    /// every test, and hence `Ω`, fixes the target.
    pub fn new(target: Ket, tests: Vec<WeightedTest>, kind: StrategyKind) -> Result<Self> {
        if tests.is_empty() {
            return Err(Error::domain("a strategy needs at least one test"));
        }
        let n = target.n();
        let mut total = 0.0;
        let mut operator = SparseMatrix::zero(n);
        for (j, t) in tests.iter().enumerate() {
            if !(t.weight > 0.0) {
                return Err(Error::domain(format!("test {j} has weight {}", t.weight)));
            }
            if t.operator.n() != n {
                return Err(Error::domain(format!(
                    "test {j} acts on {} qubits, target on {n}",
                    t.operator.n()
                )));
            }
            total += t.weight;
            operator = operator.add_scaled(t.weight, t.operator.matrix())?;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("weights sum to {total}, not 1")));
        }
        let residual = operator.apply(&target)?.distance(&target)?;
        if residual > 1e-10 {
            return Err(Error::numeric(format!(
                "strategy does not fix its target (residual {residual:.3e})"
            )));
        }
        Ok(Self {
            target,
            tests,
            operator,
            kind,
        })
    }

    pub fn target(&self) -> &Ket {
        &self.target
    }

    pub fn tests(&self) -> &[WeightedTest] {
        &self.tests
    }

    pub fn operator(&self) -> &SparseMatrix {
        &self.operator
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.target.n()
    }

    /// Branch number of the protocol: the largest branch number of its
    /// tests, or `None` if some test has no branch tree.
    pub fn branch_number(&self) -> Option<usize> {
        self.tests
            .iter()
            .map(|t| t.procedure.as_ref().map(AdaptiveTest::branch_number))
            .try_fold(0, |acc, a| a.map(|a| acc.max(a)))
    }
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect()
}

/// Tests of the nonadaptive protocol: `½ Z^k` plus `1/(2·C(n,2))` on each `Ω_{i,j}`.
fn nonadaptive_tests(k: usize, n: usize) -> Result<Vec<WeightedTest>> {
    let pairs = pairs(n);
    let share = 0.5 / pairs.len() as f64;
    let (sector, _) = nonadaptive_trees(0, 1, k, n)?;
    let mut tests = vec![WeightedTest::from_tree(0.5, sector)?];
    for &(i, j) in &pairs {
        let (_, pair) = nonadaptive_trees(i, j, k, n)?;
        tests.push(WeightedTest::from_tree(share, pair)?);
    }
    Ok(tests)
}

fn adaptive_tests(
    n: usize,
    make: impl Fn(usize, usize) -> Result<AdaptiveTest>,
) -> Result<Vec<WeightedTest>> {
    let pairs = pairs(n);
    let mu = 1.0 / pairs.len() as f64;
    pairs
        .iter()
        .map(|&(i, j)| WeightedTest::from_tree(mu, make(i, j)?))
        .collect()
}

/// `Ω_W = (1/C(n,2)) Σ_{i<j} Ω→_{i,j}` or `Ω̃_W = ½Z¹ + (1/(2C(n,2))) Σ_{i<j} Ω_{i,j}`.
pub fn assemble_w_strategy(n: usize, mode: Mode) -> Result<Strategy> {
    if n < 3 {
        return Err(Error::domain(format!("W strategies need n ≥ 3, got {n}")));
    }
    let tests = match mode {
        Mode::Adaptive => adaptive_tests(n, |i, j| w_adaptive_test(i, j, n))?,
        Mode::Nonadaptive => nonadaptive_tests(1, n)?,
    };
    let kind = StrategyKind {
        family: Family::W,
        n,
        k: 1,
        mode,
    };
    Strategy::new(w_state(n)?, tests, kind)
}

/// Strategy for `|D_n^k⟩`, `n ≥ 3`, `1 ≤ k ≤ n−1`. `k = 1` is the W strategy;
/// `k = n−1` is the W strategy conjugated by `X^{⊗n}`.
pub fn assemble_dicke_strategy(n: usize, k: usize, mode: Mode) -> Result<Strategy> {
    if n < 3 || k == 0 || k >= n {
        return Err(Error::domain(format!(
            "Dicke strategies need n ≥ 3 and 1 ≤ k ≤ n−1, got n={n}, k={k}"
        )));
    }
    let kind = StrategyKind {
        family: Family::Dicke,
        n,
        k,
        mode,
    };
    if k == 1 {
        let w = assemble_w_strategy(n, mode)?;
        return Strategy::new(w.target, w.tests, kind);
    }
    if k == n - 1 {
        let w = assemble_w_strategy(n, mode)?;
        let flip = LocalFlip::new(n);
        let tests = w
            .tests
            .iter()
            .map(|t| {
                let tree = t.procedure.as_ref().expect("built-in tests carry trees");
                WeightedTest::from_tree(t.weight, tree.conjugate_by_flip())
            })
            .collect::<Result<Vec<_>>>()?;
        return Strategy::new(flip.ket(&w.target), tests, kind);
    }
    let tests = match mode {
        Mode::Adaptive => adaptive_tests(n, |i, j| dicke_adaptive_test(i, j, k, n))?,
        Mode::Nonadaptive => nonadaptive_tests(k, n)?,
    };
    Strategy::new(dicke_state(n, k)?, tests, kind)
}

/// `(Ω_Bell, Ω_{W₂})`: `⅓[(XX)⁺ + (YY)⁺ + (ZZ)⁻]` and `½[(XX)⁺ + (ZZ)⁻]`.
pub fn bell_strategies() -> Result<(Strategy, Strategy)> {
    let [xx, yy, zz] = bell_tests();
    let kind = |family| StrategyKind {
        family,
        n: 2,
        k: 1,
        mode: Mode::Nonadaptive,
    };
    let third = 1.0 / 3.0;
    let bell3 = Strategy::new(
        bell_psi_plus(),
        vec![
            WeightedTest::from_tree(third, xx.clone())?,
            WeightedTest::from_tree(third, yy)?,
            WeightedTest::from_tree(1.0 - 2.0 * third, zz.clone())?,
        ],
        kind(Family::Bell3),
    )?;
    let bell2 = Strategy::new(
        bell_psi_plus(),
        vec![
            WeightedTest::from_tree(0.5, xx)?,
            WeightedTest::from_tree(0.5, zz)?,
        ],
        kind(Family::Bell2),
    )?;
    Ok((bell3, bell2))
}

/// The single test `|ψ⟩⟨ψ|`.
pub fn global_strategy(target: &Ket) -> Result<Strategy> {
    let kind = StrategyKind {
        family: Family::Global,
        n: target.n(),
        k: target.iter().next().map_or(0, |(u, _)| u.count_ones() as usize),
        mode: Mode::Nonadaptive,
    };
    let test = WeightedTest {
        weight: 1.0,
        operator: TestOperator::new(SparseMatrix::outer(target))?,
        procedure: None,
    };
    Strategy::new(target.clone(), vec![test], kind)
}

/// Any built-in strategy by name. `k` is ignored for W and Bell families.
pub fn built_in(family: Family, n: usize, k: usize, mode: Mode) -> Result<Strategy> {
    match family {
        Family::W => assemble_w_strategy(n, mode),
        Family::Dicke => assemble_dicke_strategy(n, k, mode),
        Family::Bell3 => Ok(bell_strategies()?.0),
        Family::Bell2 => Ok(bell_strategies()?.1),
        Family::Global => global_strategy(&dicke_state(n, k)?),
        Family::Custom => Err(Error::domain("custom strategies are built with Strategy::new")),
    }
}

/// Number of tests in the built-in strategy, without building it.
pub fn built_in_test_count(family: Family, n: usize, mode: Mode) -> Result<u64> {
    Ok(match (family, mode) {
        (Family::W | Family::Dicke, Mode::Adaptive) => binom(n as i64, 2)?,
        (Family::W | Family::Dicke, Mode::Nonadaptive) => binom(n as i64, 2)? + 1,
        (Family::Bell3, _) => 3,
        (Family::Bell2, _) => 2,
        _ => 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::dicke_state;

    #[test]
    fn w_weights_and_sizes() {
        let s = assemble_w_strategy(4, Mode::Adaptive).unwrap();
        assert_eq!(s.tests().len(), 6);
        assert!(s.tests().iter().all(|t| (t.weight - 1.0 / 6.0).abs() < 1e-15));
        assert_eq!(s.branch_number(), Some(2));
        let s = assemble_w_strategy(5, Mode::Nonadaptive).unwrap();
        assert_eq!(s.tests().len() as u64, built_in_test_count(Family::W, 5, Mode::Nonadaptive).unwrap());
        let total: f64 = s.tests().iter().map(|t| t.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(s.tests()[0].weight, 0.5);
        assert_eq!(s.branch_number(), Some(1));
    }

    #[test]
    fn w3_operator_has_six_terms() {
        // Ω_W3 = ⅓ Σ over three pairs of Z̄¹(Z⁺Z⁺) + Z̄⁰(XX)⁺: the diagonal
        // carries ⅓ on each weight-1 label from its one Z⁺Z⁺ term, plus ½·⅓
        // from (XX)⁺ where the remaining qubit is 0 and the pair is odd.
        let s = assemble_w_strategy(3, Mode::Adaptive).unwrap();
        let op = s.operator();
        for u in [0b001u64, 0b010, 0b100] {
            assert!((op.get(u, u).re - (1.0 / 3.0 + 2.0 * 0.5 / 3.0)).abs() < 1e-14);
        }
        assert!((op.get(0b001, 0b010).re - 1.0 / 6.0).abs() < 1e-14);
        assert!((op.get(0, 0b011).re - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn dicke_routes_edge_excitations() {
        let s = assemble_dicke_strategy(5, 4, Mode::Adaptive).unwrap();
        assert_eq!(s.target(), &dicke_state(5, 4).unwrap());
        let flipped = LocalFlip::new(5).conjugate(assemble_w_strategy(5, Mode::Adaptive).unwrap().operator());
        assert!(s.operator().max_abs_diff(&flipped).unwrap() < 1e-15);
        let s = assemble_dicke_strategy(5, 1, Mode::Nonadaptive).unwrap();
        assert_eq!(s.kind().family, Family::Dicke);
        assert!(assemble_dicke_strategy(5, 0, Mode::Adaptive).is_err());
        assert!(assemble_dicke_strategy(2, 1, Mode::Adaptive).is_err());
        let flipped_w3 = assemble_dicke_strategy(3, 2, Mode::Nonadaptive).unwrap();
        assert!((crate::spectral::spectral_gap(&flipped_w3).unwrap().nu - 0.25).abs() < 1e-12);
    }

    #[test]
    fn invalid_weights_are_rejected() {
        let target = w_state(3).unwrap();
        let test = |w| WeightedTest {
            weight: w,
            operator: TestOperator::new(SparseMatrix::outer(&target)).unwrap(),
            procedure: None,
        };
        let kind = StrategyKind {
            family: Family::Custom,
            n: 3,
            k: 1,
            mode: Mode::Nonadaptive,
        };
        assert!(Strategy::new(target.clone(), vec![test(0.5)], kind).is_err());
        assert!(Strategy::new(target.clone(), vec![test(1.5), test(-0.5)], kind).is_err());
        assert!(Strategy::new(target.clone(), vec![test(1.0)], kind).is_ok());
    }

    #[test]
    fn target_must_be_fixed() {
        let kind = StrategyKind {
            family: Family::Custom,
            n: 3,
            k: 1,
            mode: Mode::Adaptive,
        };
        let w = assemble_w_strategy(3, Mode::Adaptive).unwrap();
        let err = Strategy::new(dicke_state(3, 2).unwrap(), w.tests().to_vec(), kind);
        assert!(matches!(err, Err(Error::Numeric(_))));
    }

    #[test]
    fn family_and_mode_parse() {
        assert_eq!("D".parse::<Family>().unwrap(), Family::Dicke);
        assert_eq!("bell3".parse::<Family>().unwrap(), Family::Bell3);
        assert!("X".parse::<Family>().is_err());
        assert_eq!("nonadaptive".parse::<Mode>().unwrap(), Mode::Nonadaptive);
    }
}
