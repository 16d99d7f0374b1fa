//! Verification strategies, their spectral gaps and the resulting sample counts.

mod closed_form;
mod eigen;
mod eigenspace;
mod gap;
mod johnson;
mod sample;
mod strategy;

pub use closed_form::{
    closed_form_gap, full_spectrum_w, johnson_spectrum, m1_second_value, m2_top_value,
};
pub use eigen::{
    block_eigensystem, coupled_blocks, dense_eigensystem, Block, EigenRef, Eigensystem, Method,
    CLUSTER_TOL, MAX_BLOCK,
};
pub use eigenspace::{
    gram_rank, singlet_pair_vectors, verify_second_eigenspace, EigenspaceCheck, PairCheck,
};
pub use gap::{
    rationalize, spectral_gap, spectral_gap_dense, Fraction, GapSummary, SpectralReport,
    MAX_REPORTED_VECTORS,
};
pub use johnson::{johnson_adjacency, m1_matrix, m2_matrix, m2_top_eigen};
pub use sample::{pass_probability_bound, required_tests, worst_case_pass_probability, SampleCount};
pub use strategy::{
    assemble_dicke_strategy, assemble_w_strategy, bell_strategies, built_in, built_in_test_count,
    global_strategy, Family, Mode, Strategy, StrategyKind, WeightedTest,
};
