use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Ket, PRUNE_THRESHOLD};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Sparse complex matrix over the `2ⁿ` computational basis, keyed by
/// `(row label, column label)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    entries: BTreeMap<(u64, u64), Complex64>,
}

impl SparseMatrix {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: BTreeMap::new(),
        }
    }

    /// Diagonal matrix with the given `(label, value)` entries.
    pub fn diagonal(n: usize, diag: impl IntoIterator<Item = (u64, f64)>) -> Self {
        let mut m = Self::zero(n);
        for (label, v) in diag {
            m.add_entry(label, label, Complex64::new(v, 0.0));
        }
        m.prune();
        m
    }

    pub fn from_entries(
        n: usize,
        entries: impl IntoIterator<Item = ((u64, u64), Complex64)>,
    ) -> Self {
        let mut m = Self::zero(n);
        for ((r, c), v) in entries {
            m.add_entry(r, c, v);
        }
        m.prune();
        m
    }

    /// `|ket⟩⟨ket|`.
    pub fn outer(ket: &Ket) -> Self {
        let mut m = Self::zero(ket.n());
        for (r, a) in ket.iter() {
            for (c, b) in ket.iter() {
                m.add_entry(r, c, a * b.conj());
            }
        }
        m.prune();
        m
    }

    pub(crate) fn add_entry(&mut self, row: u64, col: u64, v: Complex64) {
        *self.entries.entry((row, col)).or_insert(ZERO) += v;
    }

    fn prune(&mut self) {
        self.entries.retain(|_, v| v.norm() >= PRUNE_THRESHOLD);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: u64, col: u64) -> Complex64 {
        self.entries.get(&(row, col)).copied().unwrap_or(ZERO)
    }

    /// Nonzero entries in row-major label order.
    pub fn iter(&self) -> impl Iterator<Item = ((u64, u64), Complex64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// Labels of all rows that carry a nonzero entry.
    pub fn support(&self) -> Vec<u64> {
        let mut rows: Vec<u64> = self.entries.keys().map(|&(r, _)| r).collect();
        rows.dedup();
        rows
    }

    fn check_same_n(&self, other: &SparseMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::domain(format!(
                "operator sizes differ: {} vs {} qubits",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn scale(&self, c: f64) -> SparseMatrix {
        let mut m = Self {
            n: self.n,
            entries: self.entries.iter().map(|(&k, &v)| (k, v * c)).collect(),
        };
        m.prune();
        m
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: f64, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_same_n(other)?;
        let mut m = self.clone();
        for (&(r, col), &v) in &other.entries {
            m.add_entry(r, col, v * c);
        }
        m.prune();
        Ok(m)
    }

    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.check_same_n(other)?;
        let mut rows: BTreeMap<u64, Vec<(u64, Complex64)>> = BTreeMap::new();
        for (&(r, c), &v) in &other.entries {
            rows.entry(r).or_default().push((c, v));
        }
        let mut out = SparseMatrix::zero(self.n);
        for (&(r, mid), &a) in &self.entries {
            if let Some(row) = rows.get(&mid) {
                for &(c, b) in row {
                    out.add_entry(r, c, a * b);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn adjoint(&self) -> SparseMatrix {
        Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), &v)| ((c, r), v.conj()))
                .collect(),
        }
    }

    /// `self · |ket⟩`.
    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        if ket.n() != self.n {
            return Err(Error::domain(format!(
                "operator on {} qubits applied to a {}-qubit ket",
                self.n,
                ket.n()
            )));
        }
        let mut out: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (&(r, c), &v) in &self.entries {
            let a = ket.amplitude(c);
            if a != ZERO {
                *out.entry(r).or_insert(ZERO) += v * a;
            }
        }
        Ket::from_amplitudes(self.n, out)
    }

    /// `⟨ket|self|ket⟩`, real part.
    pub fn expectation(&self, ket: &Ket) -> Result<f64> {
        Ok(ket.inner(&self.apply(ket)?)?.re)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &SparseMatrix) -> Result<f64> {
        Ok(self
            .add_scaled(-1.0, other)?
            .entries
            .values()
            .map(|v| v.norm())
            .fold(0.0, f64::max))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.entries
            .iter()
            .all(|(&(r, c), &v)| (v - self.get(c, r).conj()).norm() <= tol)
    }

    /// Whether every entry has a vanishing imaginary part.
    pub fn is_real(&self) -> bool {
        self.entries.values().all(|v| v.im.abs() < PRUNE_THRESHOLD)
    }

    /// `P · self · P⁻¹` for the basis permutation `label ↦ f(label)`.
    pub fn permute(&self, f: impl Fn(u64) -> u64) -> SparseMatrix {
        Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), &v)| ((f(r), f(c)), v))
                .collect(),
        }
    }

    /// Dense copy restricted to the given labels (rows and columns in that order).
    pub fn restrict(&self, labels: &[u64]) -> DMatrix<Complex64> {
        let index: BTreeMap<u64, usize> =
            labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut m = DMatrix::from_element(labels.len(), labels.len(), ZERO);
        for (&(r, c), &v) in &self.entries {
            if let (Some(&i), Some(&j)) = (index.get(&r), index.get(&c)) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Full dense copy; refuses more than 12 qubits.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n > 12 {
            return Err(Error::TooLarge(format!(
                "dense {0}-qubit operator (2^{0} × 2^{0})",
                self.n
            )));
        }
        let labels: Vec<u64> = (0..1u64 << self.n).collect();
        Ok(self.restrict(&labels))
    }

    pub fn to_triplets(&self) -> SparseTriplets {
        SparseTriplets {
            n: self.n,
            entries: self
                .entries
                .iter()
                .map(|(&(r, c), &v)| (r, c, v.re, v.im))
                .collect(),
        }
    }

    pub fn from_triplets(t: &SparseTriplets) -> SparseMatrix {
        Self::from_entries(
            t.n,
            t.entries
                .iter()
                .map(|&(r, c, re, im)| ((r, c), Complex64::new(re, im))),
        )
    }
}

/// JSON form of an operator: `{"n": .., "entries": [[row, col, re, im], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseTriplets {
    pub n: usize,
    pub entries: Vec<(u64, u64, f64, f64)>,
}

/// A test `{Ω, 1 − Ω}`: a Hermitian operator with `0 ≤ Ω ≤ 1`.
///
/// Hermiticity is checked on construction. `is_projector` certifies
/// `Ω² = Ω` to within `1e-10`. The spectral bound is not checked here since
/// it needs an eigensolve; the test suites cover it for every built-in test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestOperator {
    matrix: SparseMatrix,
    is_projector: bool,
}

impl TestOperator {
    pub fn new(matrix: SparseMatrix) -> Result<Self> {
        if !matrix.is_hermitian(1e-12) {
            return Err(Error::numeric("test operator is not Hermitian"));
        }
        let square = matrix.matmul(&matrix)?;
        let is_projector = square.max_abs_diff(&matrix)? < 1e-10;
        Ok(Self {
            matrix,
            is_projector,
        })
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SparseMatrix {
        self.matrix
    }

    pub fn is_projector(&self) -> bool {
        self.is_projector
    }

    /// Pass probability `⟨ψ|Ω|ψ⟩` of a normalized state.
    pub fn pass_probability(&self, ket: &Ket) -> Result<f64> {
        self.matrix.expectation(ket)
    }

    /// `‖Ω|ψ⟩ − |ψ⟩‖`.
    pub fn fixed_point_residual(&self, ket: &Ket) -> Result<f64> {
        self.matrix.apply(ket)?.distance(ket)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.matrix.to_triplets())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let t: SparseTriplets = serde_json::from_str(s)?;
        Self::new(SparseMatrix::from_triplets(&t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::w_state;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn outer_product_of_normalized_state_is_projector() {
        let w = w_state(3).unwrap();
        let op = TestOperator::new(SparseMatrix::outer(&w)).unwrap();
        assert!(op.is_projector());
        assert!(op.fixed_point_residual(&w).unwrap() < 1e-14);
        assert!((op.pass_probability(&w).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let m = SparseMatrix::from_entries(1, [((0, 1), c(1.0))]);
        assert!(matches!(TestOperator::new(m), Err(Error::Numeric(_))));
    }

    #[test]
    fn matmul_and_adjoint() {
        let sigma_y = SparseMatrix::from_entries(
            1,
            [((0, 1), Complex64::new(0.0, -1.0)), ((1, 0), Complex64::new(0.0, 1.0))],
        );
        assert!(sigma_y.is_hermitian(0.0));
        assert!(!sigma_y.is_real());
        let sq = sigma_y.matmul(&sigma_y).unwrap();
        assert_eq!(sq, SparseMatrix::diagonal(1, [(0, 1.0), (1, 1.0)]));
        assert_eq!(sigma_y.adjoint(), sigma_y);
    }

    #[test]
    fn json_triplets_round_trip() {
        let m = SparseMatrix::from_entries(
            2,
            [((0, 0), c(0.5)), ((0, 3), c(0.5)), ((3, 0), c(0.5)), ((3, 3), c(0.5))],
        );
        let op = TestOperator::new(m).unwrap();
        let json = op.to_json().unwrap();
        assert!(json.starts_with("{\"n\":2,\"entries\":[[0,0,0.5,0.0]"));
        assert_eq!(TestOperator::from_json(&json).unwrap(), op);
    }

    #[test]
    fn dense_refuses_large_registers() {
        assert!(matches!(
            SparseMatrix::zero(13).to_dense(),
            Err(Error::TooLarge(_))
        ));
    }
}
