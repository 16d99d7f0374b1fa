use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{dicke_state, singlet_pair_state, Ket};
use crate::spectral::{spectral_gap, Family, Strategy};

/// `|ψ′⟩ = √(1−ε)|ψ⟩ + √ε|τ⟩` with `τ` a unit vector orthogonal to `ψ`.
#[derive(Debug, Clone)]
pub struct NoisyInput {
    pub target: Ket,
    pub tau: Ket,
    pub eps: f64,
    pub psi_prime: Ket,
}

impl NoisyInput {
    pub fn new(target: &Ket, tau: &Ket, eps: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::domain(format!("infidelity {eps} outside [0,1]")));
        }
        if (tau.norm() - 1.0).abs() > 1e-12 || target.inner(tau)?.norm() > 1e-10 {
            return Err(Error::domain("noise must be a unit vector orthogonal to the target"));
        }
        let psi_prime = target
            .scale(Complex64::new((1.0 - eps).sqrt(), 0.0))
            .add_scaled(Complex64::new(eps.sqrt(), 0.0), tau)?;
        Ok(Self {
            target: target.clone(),
            tau: tau.clone(),
            eps,
            psi_prime,
        })
    }

    /// `|⟨ψ|ψ′⟩|²`.
    pub fn fidelity(&self) -> Result<f64> {
        Ok(self.target.inner(&self.psi_prime)?.norm_sqr())
    }
}

/// Where the worst-case noise vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseSource {
    /// `|ψ⁻⟩_{1,2} ⊗ |D_{n−2}^{k−1}⟩`.
    SingletPair,
    /// First vector of the second eigenspace returned by the eigensolver.
    Eigensolver,
}

#[derive(Debug, Clone)]
pub struct WorstCaseNoise {
    pub tau: Ket,
    pub lambda2: f64,
    pub nu: f64,
    pub source: NoiseSource,
}

/// A deterministic unit vector in the `λ₂` eigenspace of `Ω`, orthogonal to
/// the target.
///
/// W and Dicke strategies use the singlet-pair vector on the first two
/// qubits when it lies in that eigenspace (it does not for `n = 3`).
/// Otherwise the eigensolver's first vector is used.
pub fn worst_case_noise(s: &Strategy) -> Result<WorstCaseNoise> {
    let report = spectral_gap(s)?;
    if report.nu >= 1.0 - 1e-12 {
        return Err(Error::domain(format!(
            "{} has ν = 1: there is no second eigenspace to draw noise from",
            s.kind()
        )));
    }
    let kind = s.kind();
    if matches!(kind.family, Family::W | Family::Dicke) && kind.n >= 3 && kind.k >= 1 {
        let rest = dicke_state(kind.n - 2, kind.k - 1)?;
        let phi = singlet_pair_state(0, 1, &rest)?;
        let residual = s
            .operator()
            .apply(&phi)?
            .distance(&phi.scale(Complex64::new(report.lambda2, 0.0)))?;
        if residual < 1e-9 && s.target().inner(&phi)?.norm() < 1e-12 {
            return Ok(WorstCaseNoise {
                tau: phi,
                lambda2: report.lambda2,
                nu: report.nu,
                source: NoiseSource::SingletPair,
            });
        }
    }
    let tau = report
        .eigvecs2
        .first()
        .cloned()
        .ok_or_else(|| Error::numeric("eigensolver returned no second eigenvector"))?;
    Ok(WorstCaseNoise {
        tau,
        lambda2: report.lambda2,
        nu: report.nu,
        source: NoiseSource::Eigensolver,
    })
}
