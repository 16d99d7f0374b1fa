use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest register size handled by exact combinatorics and basis labels.
pub const MAX_QUBITS: usize = 64;

/// Exact binomial coefficient `C(n, k)`.
///
/// Negative `k` and `k > n` give zero, so that `C(n, -1) = 0` can be used
/// directly in multiplicity formulas. Fails for `n > 64`.
pub fn binom(n: i64, k: i64) -> Result<u64> {
    if n < 0 || n as usize > MAX_QUBITS {
        return Err(Error::Overflow(format!(
            "binom({n}, {k}): n must lie in 0..={MAX_QUBITS}"
        )));
    }
    if k < 0 || k > n {
        return Ok(0);
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        acc = acc
            .checked_mul(n - i)
            .ok_or_else(|| Error::Overflow(format!("binom({n}, {k})")))?
            / (i + 1);
    }
    u64::try_from(acc).map_err(|_| Error::Overflow(format!("binom({n}, {k}) exceeds u64")))
}

/// A computational-basis label of an `n`-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisState {
    bits: u64,
    n: u8,
    weight: u8,
}

impl BasisState {
    pub fn new(bits: u64, n: usize) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::domain(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        if n < MAX_QUBITS && bits >> n != 0 {
            return Err(Error::domain(format!(
                "label {bits:#b} does not fit in {n} qubits"
            )));
        }
        Ok(Self {
            bits,
            n: n as u8,
            weight: bits.count_ones() as u8,
        })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Hamming weight, the number of excitations.
    pub fn weight(&self) -> usize {
        self.weight as usize
    }

    pub fn bit(&self, qubit: usize) -> u8 {
        ((self.bits >> qubit) & 1) as u8
    }
}

/// `B_{n,k}`: all `n`-bit labels of Hamming weight `k`, in increasing numeric order.
///
/// Ranks follow the combinatorial number system, which enumerates
/// fixed-weight labels in exactly that order, so no lookup table is kept.
#[derive(Debug, Clone)]
pub struct WeightSector {
    n: usize,
    k: usize,
    members: Vec<u64>,
}

impl WeightSector {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n > MAX_QUBITS || k > n {
            return Err(Error::domain(format!("no weight sector B_({n},{k})")));
        }
        let size = binom(n as i64, k as i64)?;
        let size = usize::try_from(size)
            .map_err(|_| Error::TooLarge(format!("sector B_({n},{k}) has {size} members")))?;
        let mut members = Vec::with_capacity(size);
        if k == 0 {
            members.push(0);
        } else {
            // Gosper's hack walks the fixed-weight labels in increasing order.
            let mut v: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
            loop {
                members.push(v);
                if members.len() == size {
                    break;
                }
                let c = v & v.wrapping_neg();
                let r = v + c;
                v = (((r ^ v) >> 2) / c) | r;
            }
        }
        Ok(Self { n, k, members })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    /// Position of `label` in the sector, or `None` if it is not a member.
    pub fn rank(&self, label: u64) -> Option<usize> {
        if label.count_ones() as usize != self.k || (self.n < 64 && label >> self.n != 0) {
            return None;
        }
        let mut rank = 0u64;
        let mut rest = label;
        let mut t = 1i64;
        while rest != 0 {
            let pos = rest.trailing_zeros() as i64;
            rank += binom(pos, t).ok()?;
            rest &= rest - 1;
            t += 1;
        }
        Some(rank as usize)
    }

    pub fn unrank(&self, index: usize) -> Option<u64> {
        self.members.get(index).copied()
    }
}

/// Spreads the low bits of `bits` over the set positions of `mask`, lowest first.
pub(crate) fn deposit_bits(bits: u64, mask: u64) -> u64 {
    let mut out = 0;
    let mut m = mask;
    let mut b = bits;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if b & 1 == 1 {
            out |= low;
        }
        b >>= 1;
        m &= m - 1;
    }
    out
}

/// Gathers the bits of `label` at the set positions of `mask` into the low bits.
pub(crate) fn extract_bits(label: u64, mask: u64) -> u64 {
    let mut out = 0;
    let mut m = mask;
    let mut shift = 0;
    while m != 0 {
        let low = m & m.wrapping_neg();
        if label & low != 0 {
            out |= 1 << shift;
        }
        shift += 1;
        m &= m - 1;
    }
    out
}

/// Mask with the low `n` bits set.
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
