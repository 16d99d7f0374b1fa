//! Check that the singlet-pair vectors `|ψ⁻⟩_{i,j} ⊗ |D_{n−2}^{k−1}⟩` span the
//! second eigenspace of a W or Dicke strategy.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::strategy::{Family, Mode, Strategy};
use crate::error::{Error, Result};
use crate::hilbert::{dicke_state, singlet_pair_state, Ket};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub pair: (usize, usize),
    /// `⟨φ|Ω|φ⟩`.
    pub rayleigh: f64,
    /// `‖Ω|φ⟩ − λ|φ⟩‖` for the expected eigenvalue `λ`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenspaceCheck {
    /// `1 − 1/(n−1)` for adaptive strategies, `1 − 1/(2(n−1))` for nonadaptive.
    pub expected: f64,
    pub pairs: Vec<PairCheck>,
    pub gram_rank: usize,
    pub passed: bool,
}

/// `|φ_{ij}⟩` for every pair `i < j`.
pub fn singlet_pair_vectors(n: usize, k: usize) -> Result<Vec<((usize, usize), Ket)>> {
    if n < 3 || k == 0 || k >= n {
        return Err(Error::domain(format!("no singlet-pair vectors for n={n}, k={k}")));
    }
    let rest = dicke_state(n - 2, k - 1)?;
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(((i, j), singlet_pair_state(i, j, &rest)?));
        }
    }
    Ok(out)
}

/// Rank of the Gram matrix of `vectors`, counting eigenvalues above `1e-9`.
pub fn gram_rank(vectors: &[Ket]) -> Result<usize> {
    let m = vectors.len();
    let mut g = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for a in 0..m {
        for b in 0..m {
            g[(a, b)] = vectors[a].inner(&vectors[b])?;
        }
    }
    let eig = SymmetricEigen::new(g);
    Ok(eig.eigenvalues.iter().filter(|&&v| v > 1e-9).count())
}

/// Confirms that each `|φ_{ij}⟩` is an eigenvector of `Ω` with the expected
/// second eigenvalue and that together they span `n−1` dimensions.
pub fn verify_second_eigenspace(s: &Strategy) -> Result<EigenspaceCheck> {
    let kind = s.kind();
    let (n, k) = (kind.n, kind.k);
    if !matches!(kind.family, Family::W | Family::Dicke) || n < 4 {
        return Err(Error::domain(format!(
            "second-eigenspace check needs a W or Dicke strategy with n ≥ 4, got {kind}"
        )));
    }
    let expected = match kind.mode {
        Mode::Adaptive => 1.0 - 1.0 / (n as f64 - 1.0),
        Mode::Nonadaptive => 1.0 - 1.0 / (2.0 * (n as f64 - 1.0)),
    };
    let vectors = singlet_pair_vectors(n, k)?;
    let mut pairs = Vec::with_capacity(vectors.len());
    for (pair, phi) in &vectors {
        let omega_phi = s.operator().apply(phi)?;
        let rayleigh = phi.inner(&omega_phi)?.re;
        let residual = omega_phi.distance(&phi.scale(Complex64::new(expected, 0.0)))?;
        pairs.push(PairCheck {
            pair: *pair,
            rayleigh,
            residual,
        });
    }
    let kets: Vec<Ket> = vectors.into_iter().map(|(_, v)| v).collect();
    let gram_rank = gram_rank(&kets)?;
    let passed = gram_rank == n - 1
        && pairs
            .iter()
            .all(|p| p.residual < 1e-9 && (p.rayleigh - expected).abs() < 1e-10);
    Ok(EigenspaceCheck {
        expected,
        pairs,
        gram_rank,
        passed,
    })
}
