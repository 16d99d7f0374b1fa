//! The two blocks `M₁` and `M₂` of `n(n−1)·Ω_D`.
//!
//! `M₁` lives on `B_{n,k}`: `[n(n−1) − k(n−k)]·1 + A` with `A` the Johnson
//! graph adjacency. `M₂` lives on `B_{n,k−1} ∪ B_{n,k+1}`: diagonal
//! `(n−k)(n−k+1)/2` on `B_{n,k−1}`, `k(k+1)/2` on `B_{n,k+1}`, and `1`
//! between strings that differ on exactly two positions.

use num_complex::Complex64;

use super::closed_form::m2_top_value;
use crate::error::{Error, Result};
use crate::hilbert::{binom, dicke_state, Ket, WeightSector};
use crate::ops::SparseMatrix;

fn check(n: usize, k: usize) -> Result<()> {
    if n < 4 || k < 2 || k + 2 > n {
        return Err(Error::domain(format!(
            "block decomposition needs n ≥ 4 and 2 ≤ k ≤ n−2, got n={n}, k={k}"
        )));
    }
    Ok(())
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Adjacency of `J(n,k)` on the labels of `B_{n,k}`.
pub fn johnson_adjacency(n: usize, k: usize) -> Result<SparseMatrix> {
    let sector = WeightSector::new(n, k)?;
    let mut entries = Vec::new();
    for &u in sector.members() {
        for &v in sector.members() {
            if (u ^ v).count_ones() == 2 {
                entries.push(((u, v), one()));
            }
        }
    }
    Ok(SparseMatrix::from_entries(n, entries))
}

pub fn m1_matrix(n: usize, k: usize) -> Result<SparseMatrix> {
    check(n, k)?;
    let shift = (n * (n - 1) - k * (n - k)) as f64;
    let sector = WeightSector::new(n, k)?;
    let diag = SparseMatrix::diagonal(n, sector.members().iter().map(|&u| (u, shift)));
    diag.add_scaled(1.0, &johnson_adjacency(n, k)?)
}

pub fn m2_matrix(n: usize, k: usize) -> Result<SparseMatrix> {
    check(n, k)?;
    let low = WeightSector::new(n, k - 1)?;
    let high = WeightSector::new(n, k + 1)?;
    let low_diag = ((n - k) * (n - k + 1) / 2) as f64;
    let high_diag = (k * (k + 1) / 2) as f64;
    let mut entries = Vec::new();
    for &u in low.members() {
        entries.push(((u, u), Complex64::new(low_diag, 0.0)));
    }
    for &v in high.members() {
        entries.push(((v, v), Complex64::new(high_diag, 0.0)));
    }
    for &u in low.members() {
        for &v in high.members() {
            if (u ^ v).count_ones() == 2 {
                entries.push(((u, v), one()));
                entries.push(((v, u), one()));
            }
        }
    }
    Ok(SparseMatrix::from_entries(n, entries))
}

/// Top eigenpair of `M₂`: `n(n+1)/2 + k(k−n)` with eigenvector
/// `N[√C(n,k+1)|D_n^{k−1}⟩ + √C(n,k−1)|D_n^{k+1}⟩]`.
pub fn m2_top_eigen(n: usize, k: usize) -> Result<(i64, Ket)> {
    check(n, k)?;
    let a = (binom(n as i64, k as i64 + 1)? as f64).sqrt();
    let b = (binom(n as i64, k as i64 - 1)? as f64).sqrt();
    let low = dicke_state(n, k - 1)?.scale(Complex64::new(a, 0.0));
    let v = low
        .add_scaled(Complex64::new(b, 0.0), &dicke_state(n, k + 1)?)?
        .normalize()?;
    Ok((m2_top_value(n, k), v))
}
