use serde::{Deserialize, Serialize};

use super::fit::fit_inverse_gap;
use super::report::{default_eps_grid, simulate, table_deltas, SimConfig};
use crate::error::Result;
use crate::spectral::{built_in, closed_form_gap, Family, Mode};

/// The fourteen `(family, n, k)` states of the published simulation table.
pub const TABLE_STATES: [(Family, usize, usize); 14] = [
    (Family::W, 3, 1),
    (Family::W, 4, 1),
    (Family::W, 5, 1),
    (Family::W, 6, 1),
    (Family::W, 7, 1),
    (Family::W, 8, 1),
    (Family::Dicke, 4, 2),
    (Family::Dicke, 5, 2),
    (Family::Dicke, 6, 2),
    (Family::Dicke, 6, 3),
    (Family::Dicke, 7, 2),
    (Family::Dicke, 7, 3),
    (Family::Dicke, 8, 2),
    (Family::Dicke, 8, 4),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub state: String,
    pub mode: Mode,
    pub fitted: f64,
    pub stddev: f64,
    pub theory: f64,
}

pub fn state_label(family: Family, n: usize, k: usize) -> String {
    match family {
        Family::W => format!("W_{n}"),
        Family::Dicke => format!("D_{n}^{k}"),
        other => format!("{other}_{n}"),
    }
}

/// Simulates one strategy over the default ε grid and the 100 table δ
/// values, and fits `1/ν`.
pub fn table_row(family: Family, n: usize, k: usize, mode: Mode, m: usize, seed: u64) -> Result<TableRow> {
    let s = built_in(family, n, k, mode)?;
    let report = simulate(&s, &SimConfig::new(default_eps_grid(), table_deltas(), m, seed))?;
    let fit = fit_inverse_gap(&report)?;
    let nu = closed_form_gap(family, mode, n, k)?;
    Ok(TableRow {
        state: state_label(family, n, k),
        mode,
        fitted: fit.estimate,
        stddev: fit.stddev,
        theory: *nu.denom() as f64 / *nu.numer() as f64,
    })
}

/// All 28 rows, adaptive then nonadaptive for each state. Row `r` uses seed
/// `seed + r`.
pub fn table_one(m: usize, seed: u64) -> Result<Vec<TableRow>> {
    let mut rows = Vec::with_capacity(2 * TABLE_STATES.len());
    for (i, &(family, n, k)) in TABLE_STATES.iter().enumerate() {
        for (j, mode) in [Mode::Adaptive, Mode::Nonadaptive].into_iter().enumerate() {
            let row_seed = seed.wrapping_add((2 * i + j) as u64);
            rows.push(table_row(family, n, k, mode, m, row_seed)?);
        }
    }
    Ok(rows)
}
