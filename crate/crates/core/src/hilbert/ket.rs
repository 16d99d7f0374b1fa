use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes with modulus below this are dropped after arithmetic.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// Sparse complex vector over the computational basis of `n` qubits.
///
/// States produced by the constructors in this crate are normalized;
/// intermediate results of [`Ket::add_scaled`] and [`Ket::scale`] need not be.
/// Amplitudes are kept in a `BTreeMap`, so iteration order (and therefore any
/// floating-point reduction over a ket) is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ket {
    n: usize,
    amps: BTreeMap<u64, Complex64>,
}

impl Ket {
    /// The zero vector.
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            amps: BTreeMap::new(),
        }
    }

    /// Builds an unnormalized vector; repeated labels are summed.
    pub fn from_amplitudes(
        n: usize,
        amps: impl IntoIterator<Item = (u64, Complex64)>,
    ) -> Result<Self> {
        let mut out = Self::zero(n);
        for (label, a) in amps {
            if n < 64 && label >> n != 0 {
                return Err(Error::domain(format!("label {label} outside {n} qubits")));
            }
            *out.amps.entry(label).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        out.prune();
        Ok(out)
    }

    /// Builds a normalized state from (possibly unnormalized) amplitudes.
    pub fn normalized_from(
        n: usize,
        amps: impl IntoIterator<Item = (u64, Complex64)>,
    ) -> Result<Self> {
        Self::from_amplitudes(n, amps)?.normalize()
    }

    pub(crate) fn from_map_unchecked(n: usize, amps: BTreeMap<u64, Complex64>) -> Self {
        let mut out = Self { n, amps };
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitude(&self, label: u64) -> Complex64 {
        self.amps
            .get(&label)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Nonzero amplitudes in increasing label order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.amps.iter().map(|(&l, &a)| (l, a))
    }

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn check_same_n(&self, other: &Ket) -> Result<()> {
        if self.n != other.n {
            return Err(Error::domain(format!(
                "qubit counts differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        self.check_same_n(other)?;
        let (small, large, conj_small) = if self.amps.len() <= other.amps.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (label, a) in small.iter() {
            if let Some(b) = large.amps.get(&label) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    pub fn normalize(&self) -> Result<Ket> {
        let norm = self.norm();
        if norm < PRUNE_THRESHOLD {
            return Err(Error::domain("cannot normalize the zero vector"));
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Ket {
        let amps = self.amps.iter().map(|(&l, &a)| (l, a * c)).collect();
        Ket::from_map_unchecked(self.n, amps)
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: Complex64, other: &Ket) -> Result<Ket> {
        self.check_same_n(other)?;
        let mut amps = self.amps.clone();
        for (label, b) in other.iter() {
            *amps.entry(label).or_insert(Complex64::new(0.0, 0.0)) += c * b;
        }
        Ok(Ket::from_map_unchecked(self.n, amps))
    }

    /// Relabels basis states through a bijection on labels.
    pub fn permute(&self, f: impl Fn(u64) -> u64) -> Ket {
        let amps = self.amps.iter().map(|(&l, &a)| (f(l), a)).collect();
        Ket::from_map_unchecked(self.n, amps)
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Ket) -> Result<f64> {
        Ok(self.add_scaled(Complex64::new(-1.0, 0.0), other)?.norm())
    }
}
