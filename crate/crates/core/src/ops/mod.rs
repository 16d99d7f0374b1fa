//! Pauli projectors, test operators and the executable adaptive tests.

mod adaptive;
mod operator;
mod pauli;
mod protocols;

pub use adaptive::{execute_branch_procedure, AdaptiveTest, Arm, Branch, Transcript};
pub(crate) use adaptive::ALL_OUTCOMES;
pub use operator::{SparseMatrix, SparseTriplets, TestOperator};
pub use pauli::{
    eigenvector, pair_projector, pauli_projector, sector_projector, weight_projector, Axis, Sign,
};
pub use protocols::{
    bell_tests, dicke_adaptive_test, dicke_nonadaptive_tests, merge_branches, merge_by_setting,
    nonadaptive_trees, w_adaptive_test, w_nonadaptive_tests, LocalFlip,
};
