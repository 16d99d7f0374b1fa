use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::eigen::{block_eigensystem, dense_eigensystem, same_cluster, Eigensystem, Method};
use super::strategy::{Family, Mode, Strategy, StrategyKind};
use crate::error::{Error, Result};
use crate::hilbert::{basis_ket, Ket};

/// At most this many vectors of the second eigenspace are kept in a report.
pub const MAX_REPORTED_VECTORS: usize = 64;

/// Exact fraction in JSON form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

impl From<Ratio<i64>> for Fraction {
    fn from(r: Ratio<i64>) -> Self {
        Self {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl From<Fraction> for Ratio<i64> {
    fn from(f: Fraction) -> Self {
        Ratio::new(f.num, f.den)
    }
}

/// The simplest fraction with denominator at most `10⁴` lying within `1e-10`
/// of `x`, found from the continued-fraction convergents.
pub fn rationalize(x: f64) -> Option<Ratio<i64>> {
    const MAX_DEN: i64 = 10_000;
    const TOL: f64 = 1e-10;
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e12 {
            return None;
        }
        let a = a as i64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > MAX_DEN {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() < TOL {
            return Some(Ratio::new(h1, k1));
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// Second-largest eigenvalue data of a strategy.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub kind: StrategyKind,
    pub lambda1: f64,
    pub lambda2: f64,
    pub nu: f64,
    /// Multiplicity of `λ₂`, counting eigenvectors orthogonal to the target.
    pub multiplicity2: u64,
    /// Orthonormal vectors of the `λ₂` eigenspace orthogonal to the target,
    /// at most [`MAX_REPORTED_VECTORS`] of them.
    pub eigvecs2: Vec<Ket>,
    pub method: Method,
}

/// JSON form of a [`SpectralReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub mode: Mode,
    pub lambda2: Option<Fraction>,
    pub nu: Option<Fraction>,
    pub lambda2_decimal: f64,
    pub nu_decimal: f64,
    pub multiplicity: u64,
    pub method: Method,
}

impl SpectralReport {
    pub fn lambda2_exact(&self) -> Option<Ratio<i64>> {
        rationalize(self.lambda2)
    }

    pub fn nu_exact(&self) -> Option<Ratio<i64>> {
        self.lambda2_exact().map(|l| Ratio::from_integer(1) - l)
    }

    pub fn summary(&self) -> GapSummary {
        GapSummary {
            family: self.kind.family,
            n: self.kind.n,
            k: self.kind.k,
            mode: self.kind.mode,
            lambda2: self.lambda2_exact().map(Fraction::from),
            nu: self.nu_exact().map(Fraction::from),
            lambda2_decimal: self.lambda2,
            nu_decimal: self.nu,
            multiplicity: self.multiplicity2,
            method: self.method,
        }
    }
}

/// `λ₂` and `ν = 1 − λ₂` of `Ω` through its coupled blocks.
pub fn spectral_gap(s: &Strategy) -> Result<SpectralReport> {
    report(s, &block_eigensystem(s.operator())?)
}

/// Same as [`spectral_gap`] with one dense eigensolve (`n ≤ 12`).
pub fn spectral_gap_dense(s: &Strategy) -> Result<SpectralReport> {
    report(s, &dense_eigensystem(s.operator())?)
}

fn report(s: &Strategy, sys: &Eigensystem) -> Result<SpectralReport> {
    let target = s.target();
    let mut pairs = sys.sorted();
    let Some(top) = pairs.first().copied() else {
        return Err(Error::numeric("operator has no nonzero entries"));
    };
    let lambda1 = top.value;
    // Drop the eigenvector that carries the target.
    let mut best = (0, -1.0);
    for (idx, r) in pairs.iter().enumerate() {
        if !same_cluster(r.value, lambda1) {
            break;
        }
        let overlap = target.inner(&sys.vector(*r)?)?.norm();
        if overlap > best.1 {
            best = (idx, overlap);
        }
    }
    pairs.remove(best.0);

    let explicit_top = pairs.first().map(|r| r.value);
    let lambda2 = match (explicit_top, sys.implicit_zeros > 0) {
        (Some(v), true) => v.max(0.0),
        (Some(v), false) => v,
        (None, _) => 0.0,
    };
    let cluster: Vec<_> = pairs
        .iter()
        .copied()
        .filter(|r| same_cluster(r.value, lambda2))
        .collect();
    let zeros_in_cluster = same_cluster(0.0, lambda2);
    let multiplicity2 =
        cluster.len() as u64 + if zeros_in_cluster { sys.implicit_zeros } else { 0 };

    let mut eigvecs2: Vec<Ket> = Vec::new();
    for r in cluster.iter().take(MAX_REPORTED_VECTORS) {
        push_orthonormal(&mut eigvecs2, target, sys.vector(*r)?)?;
    }
    if zeros_in_cluster && eigvecs2.len() < MAX_REPORTED_VECTORS && sys.implicit_zeros > 0 {
        let covered: std::collections::HashSet<u64> =
            sys.blocks.iter().flat_map(|b| b.labels.iter().copied()).collect();
        let free = (0u64..1u64 << sys.n).filter(|u| !covered.contains(u));
        for u in free.take(MAX_REPORTED_VECTORS - eigvecs2.len()) {
            eigvecs2.push(basis_ket(sys.n, u)?);
        }
    }

    Ok(SpectralReport {
        kind: s.kind(),
        lambda1,
        lambda2,
        nu: 1.0 - lambda2,
        multiplicity2,
        eigvecs2,
        method: sys.method,
    })
}

/// Gram–Schmidt step against the target and the vectors kept so far.
fn push_orthonormal(kept: &mut Vec<Ket>, target: &Ket, v: Ket) -> Result<()> {
    let mut v = v.add_scaled(-target.inner(&v)?, target)?;
    for u in kept.iter() {
        v = v.add_scaled(-u.inner(&v)?, u)?;
    }
    if v.norm() > 1e-6 {
        kept.push(v.normalize()?);
    }
    Ok(())
}
