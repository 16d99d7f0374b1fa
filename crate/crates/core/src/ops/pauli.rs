//! Pauli projectors and their embedding into an `n`-qubit register.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{SparseMatrix, TestOperator};
use crate::error::{Error, Result};
use crate::hilbert::{extract_bits, full_mask};

/// Pauli measurement axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        };
        f.write_str(s)
    }
}

/// Eigenvalue sign of a Pauli projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Outcome bit: `0` for eigenvalue +1, `1` for −1.
    pub fn outcome(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }
}

/// Eigenvector of `axis` for outcome `bit` (eigenvalue `(−1)^bit`), in the
/// `(|0⟩, |1⟩)` basis.
pub fn eigenvector(axis: Axis, bit: u8) -> [Complex64; 2] {
    let h = FRAC_1_SQRT_2;
    let s = if bit == 0 { 1.0 } else { -1.0 };
    match axis {
        Axis::Z if bit == 0 => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        Axis::Z => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        Axis::X => [Complex64::new(h, 0.0), Complex64::new(s * h, 0.0)],
        Axis::Y => [Complex64::new(h, 0.0), Complex64::new(0.0, s * h)],
    }
}

/// Dense local operator on `m` qubits; row/column index packs the local
/// bits with the first listed qubit as the most significant bit.
pub(crate) type Local = Vec<Vec<Complex64>>;

/// Projector onto the span of product eigenvectors of `axes` for each
/// accepted outcome tuple.
pub(crate) fn product_projector(axes: &[Axis], accepted: &[Vec<u8>]) -> Local {
    let m = axes.len();
    let dim = 1usize << m;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for outcome in accepted {
        // |e⟩ = ⊗_q e(axis_q, outcome_q)
        let mut vec = vec![Complex64::new(1.0, 0.0); dim];
        for (idx, v) in vec.iter_mut().enumerate() {
            for q in 0..m {
                let local_bit = (idx >> (m - 1 - q)) & 1;
                *v *= eigenvector(axes[q], outcome[q])[local_bit];
            }
        }
        for r in 0..dim {
            for c in 0..dim {
                out[r][c] += vec[r] * vec[c].conj();
            }
        }
    }
    out
}

/// Embeds `local` on `qubits`, tensored with a diagonal condition on the
/// remaining qubits: the factor is applied only where `keep(excitations among
/// the other qubits)` holds, and zero elsewhere.
pub(crate) fn embed_conditioned(
    n: usize,
    qubits: &[usize],
    local: &Local,
    keep: impl Fn(usize) -> bool,
) -> SparseMatrix {
    let m = qubits.len();
    let local_mask: u64 = qubits.iter().map(|&q| 1u64 << q).sum();
    let others = full_mask(n) & !local_mask;
    let mut entries = Vec::new();
    for label in 0..(1u64 << n) {
        if !keep((label & others).count_ones() as usize) {
            continue;
        }
        let col_local = local_index(label, qubits);
        let base = label & others;
        for row_local in 0..(1usize << m) {
            let v = local[row_local][col_local];
            if v.norm() == 0.0 {
                continue;
            }
            let mut row = base;
            for (q, &qubit) in qubits.iter().enumerate() {
                if (row_local >> (m - 1 - q)) & 1 == 1 {
                    row |= 1 << qubit;
                }
            }
            entries.push(((row, label), v));
        }
    }
    SparseMatrix::from_entries(n, entries)
}

fn local_index(label: u64, qubits: &[usize]) -> usize {
    let m = qubits.len();
    qubits
        .iter()
        .enumerate()
        .map(|(q, &qubit)| (((label >> qubit) & 1) as usize) << (m - 1 - q))
        .sum()
}

/// Excitation count on the qubits other than `i` and `j`.
pub(crate) fn other_weight(label: u64, n: usize, i: usize, j: usize) -> usize {
    let others = full_mask(n) & !(1 << i) & !(1 << j);
    extract_bits(label, others).count_ones() as usize
}

fn check_qubit(q: usize, n: usize) -> Result<()> {
    if q >= n {
        return Err(Error::domain(format!("qubit {q} outside {n}-qubit register")));
    }
    Ok(())
}

fn check_pair(i: usize, j: usize, n: usize) -> Result<()> {
    check_qubit(i, n)?;
    check_qubit(j, n)?;
    if i == j {
        return Err(Error::domain(format!("pair ({i},{j}) repeats a qubit")));
    }
    Ok(())
}

/// Single-qubit Pauli projector `A^±` on `qubit`, identity elsewhere.
pub fn pauli_projector(axis: Axis, sign: Sign, qubit: usize, n: usize) -> Result<TestOperator> {
    check_qubit(qubit, n)?;
    let local = product_projector(&[axis], &[vec![sign.outcome()]]);
    TestOperator::new(embed_conditioned(n, &[qubit], &local, |_| true))
}

/// `(AA)^±` on qubits `i, j`: the projector onto the ±1 eigenspace of the
/// two-qubit product `A_i A_j`, identity elsewhere.
pub fn pair_projector(axis: Axis, sign: Sign, i: usize, j: usize, n: usize) -> Result<TestOperator> {
    check_pair(i, j, n)?;
    let accepted: Vec<Vec<u8>> = [[0u8, 0], [0, 1], [1, 0], [1, 1]]
        .into_iter()
        .filter(|o| (o[0] ^ o[1]) == sign.outcome())
        .map(|o| o.to_vec())
        .collect();
    let local = product_projector(&[axis, axis], &accepted);
    TestOperator::new(embed_conditioned(n, &[i, j], &local, |_| true))
}

/// `Z̄^k_{i,j}`: diagonal projector onto labels with exactly `k`
/// excitations among the qubits other than `i` and `j`.
pub fn weight_projector(i: usize, j: usize, k: usize, n: usize) -> Result<TestOperator> {
    check_pair(i, j, n)?;
    if k + 2 > n {
        return Err(Error::domain(format!(
            "{k} excitations among {} remaining qubits",
            n - 2
        )));
    }
    let diag = (0..1u64 << n)
        .filter(|&u| other_weight(u, n, i, j) == k)
        .map(|u| (u, 1.0));
    TestOperator::new(SparseMatrix::diagonal(n, diag))
}

/// `Z^k = Σ_{u ∈ B_{n,k}} |u⟩⟨u|`.
pub fn sector_projector(k: usize, n: usize) -> Result<TestOperator> {
    if k > n {
        return Err(Error::domain(format!("no weight-{k} sector on {n} qubits")));
    }
    let sector = crate::hilbert::WeightSector::new(n, k)?;
    TestOperator::new(SparseMatrix::diagonal(
        n,
        sector.members().iter().map(|&u| (u, 1.0)),
    ))
}
