//! Hermitian eigensolves of sparse operators, block by block.
//!
//! Two labels share a block when they are linked through a chain of nonzero
//! off-diagonal entries. Each block is diagonalized densely and every label
//! without any entry contributes an exact zero eigenvalue.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::Ket;
use crate::ops::SparseMatrix;

/// Largest block handed to the dense solver.
pub const MAX_BLOCK: usize = 4096;

/// Relative tolerance for grouping eigenvalues into one cluster.
pub const CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dense,
    SectorBlock,
}

#[derive(Debug, Clone)]
pub struct Block {
    pub labels: Vec<u64>,
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `labels`.
    pub vectors: DMatrix<Complex64>,
}

/// All eigenpairs of an `n`-qubit operator.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub n: usize,
    pub blocks: Vec<Block>,
    /// Labels outside every block; each is an eigenvector with eigenvalue 0.
    pub implicit_zeros: u64,
    pub method: Method,
}

/// One eigenpair, addressed by block and column.
#[derive(Debug, Clone, Copy)]
pub struct EigenRef {
    pub value: f64,
    pub block: usize,
    pub column: usize,
}

impl Eigensystem {
    /// Every explicitly computed eigenpair, largest eigenvalue first.
    pub fn sorted(&self) -> Vec<EigenRef> {
        let mut all: Vec<EigenRef> = self
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(b, blk)| {
                blk.values.iter().enumerate().map(move |(c, &v)| EigenRef {
                    value: v,
                    block: b,
                    column: c,
                })
            })
            .collect();
        all.sort_by(|a, b| b.value.total_cmp(&a.value).then(a.block.cmp(&b.block)));
        all
    }

    pub fn vector(&self, r: EigenRef) -> Result<Ket> {
        let blk = &self.blocks[r.block];
        Ket::from_amplitudes(
            self.n,
            blk.labels
                .iter()
                .zip(blk.vectors.column(r.column).iter())
                .map(|(&u, &a)| (u, a)),
        )
    }

    /// Distinct eigenvalues with multiplicities, largest first, including
    /// the implicit zeros.
    pub fn spectrum(&self) -> Vec<(f64, u64)> {
        let mut values: Vec<(f64, u64)> = self
            .blocks
            .iter()
            .flat_map(|b| b.values.iter().map(|&v| (v, 1)))
            .collect();
        if self.implicit_zeros > 0 {
            values.push((0.0, self.implicit_zeros));
        }
        values.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut out: Vec<(f64, u64, f64)> = Vec::new();
        for (v, m) in values {
            match out.last_mut() {
                Some((rep, count, sum)) if same_cluster(*rep, v) => {
                    *sum += v * m as f64;
                    *count += m;
                    // the representative is the cluster mean
                    *rep = *sum / *count as f64;
                }
                _ => out.push((v, m, v * m as f64)),
            }
        }
        out.into_iter().map(|(v, m, _)| (v, m)).collect()
    }
}

pub(crate) fn same_cluster(a: f64, b: f64) -> bool {
    (a - b).abs() <= CLUSTER_TOL * a.abs().max(b.abs()).max(1.0)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Groups the labels of `m`'s nonzero entries into coupled blocks.
pub fn coupled_blocks(m: &SparseMatrix) -> Vec<Vec<u64>> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut labels = Vec::new();
    for ((r, c), _) in m.iter() {
        for u in [r, c] {
            index.entry(u).or_insert_with(|| {
                labels.push(u);
                labels.len() - 1
            });
        }
    }
    let mut parent: Vec<usize> = (0..labels.len()).collect();
    for ((r, c), _) in m.iter() {
        if r != c {
            let (a, b) = (find(&mut parent, index[&r]), find(&mut parent, index[&c]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: HashMap<usize, Vec<u64>> = HashMap::new();
    for (i, &u) in labels.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(u);
    }
    let mut blocks: Vec<Vec<u64>> = groups
        .into_values()
        .map(|mut g| {
            g.sort_unstable();
            g
        })
        .collect();
    blocks.sort_unstable_by_key(|g| g[0]);
    blocks
}

fn solve_block(m: &SparseMatrix, labels: Vec<u64>) -> Block {
    let dense = m.restrict(&labels);
    if m.is_real() {
        let real = dense.map(|c| c.re);
        let eig = SymmetricEigen::new(real);
        Block {
            labels,
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        }
    } else {
        let eig = SymmetricEigen::new(dense);
        Block {
            labels,
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }
}

/// Eigensystem of a Hermitian operator through its coupled blocks.
pub fn block_eigensystem(m: &SparseMatrix) -> Result<Eigensystem> {
    let groups = coupled_blocks(m);
    if let Some(big) = groups.iter().find(|g| g.len() > MAX_BLOCK) {
        return Err(Error::TooLarge(format!(
            "coupled block of {} basis states exceeds {MAX_BLOCK}",
            big.len()
        )));
    }
    let covered: u64 = groups.iter().map(|g| g.len() as u64).sum();
    let blocks = groups.into_iter().map(|g| solve_block(m, g)).collect();
    Ok(Eigensystem {
        n: m.n(),
        blocks,
        implicit_zeros: total_dim(m.n())? - covered,
        method: Method::SectorBlock,
    })
}

/// Eigensystem from one dense eigensolve over the whole space (`n ≤ 12`).
pub fn dense_eigensystem(m: &SparseMatrix) -> Result<Eigensystem> {
    if m.n() > 12 {
        return Err(Error::TooLarge(format!("dense eigensolve on {} qubits", m.n())));
    }
    let labels: Vec<u64> = (0..1u64 << m.n()).collect();
    Ok(Eigensystem {
        n: m.n(),
        blocks: vec![solve_block(m, labels)],
        implicit_zeros: 0,
        method: Method::Dense,
    })
}

fn total_dim(n: usize) -> Result<u64> {
    if n >= 64 {
        return Err(Error::TooLarge(format!("{n}-qubit register")));
    }
    Ok(1u64 << n)
}
