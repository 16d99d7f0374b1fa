//! Simulated verification experiments on a worst-case noisy source.

mod fit;
mod noise;
mod report;
mod table;
mod trial;

pub use fit::{fit_inverse_gap, fit_slopes, FitResult};
pub use noise::{worst_case_noise, NoiseSource, NoisyInput, WorstCaseNoise};
pub use report::{
    default_eps_grid, linear_grid, log_grid, read_thresholds_csv, simulate, table_deltas,
    thresholds_of, SimConfig, SimulationReport, ThresholdRow,
};
pub use table::{state_label, table_one, table_row, TableRow, TABLE_STATES};
pub use trial::{run_protocol_once, Sampler, SimMode, TrialOutcome, MAX_TESTS};
