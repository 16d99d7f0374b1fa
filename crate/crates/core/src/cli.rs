//! Command-line front end. `main` only calls [`run`].

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::convert::{convert_strategy, ConversionMode};
use crate::error::{Error, Result};
use crate::ops::execute_branch_procedure;
use crate::sim::{
    default_eps_grid, log_grid, simulate, table_one, worst_case_noise, NoisyInput, Sampler,
    SimConfig, SimMode, MAX_TESTS,
};
use crate::spectral::{
    built_in, closed_form_gap, required_tests, spectral_gap, Family, Fraction, Mode,
};

#[derive(Debug, Parser)]
#[command(name = "dicke-verify", version, about = "Verification of W and Dicke states with local measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral gap of a built-in strategy.
    Gap {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        output: Output,
    },
    /// Fitted 1/ν for the fourteen tabulated states, both modes.
    Table {
        /// Trials per infidelity.
        #[arg(long = "M", alias = "m", default_value_t = 10_000)]
        m: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Tests needed by the adaptive, nonadaptive and global protocols.
    Compare {
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Excitations; 1 selects the W state.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Comma-separated infidelities [default: 25 points log-spaced in 0.001..0.1].
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        /// Report ⌈ln δ⁻¹ / ln(1−νε)⁻¹⌉ instead of ν⁻¹ε⁻¹ ln δ⁻¹.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Turn the adaptive strategy into a nonadaptive one.
    Convert {
        #[command(flatten)]
        target: Target,
        /// Merge branches with equal settings before converting.
        #[arg(long)]
        merge: bool,
        /// Let other branches' outcome classes pass unconditionally.
        #[arg(long)]
        literal: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Simulate the verification experiment on the worst-case noisy input.
    Simulate {
        #[command(flatten)]
        target: Target,
        /// Comma-separated infidelities [default: 40 points log-spaced in 0.02..0.5].
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        /// Comma-separated confidence parameters.
        #[arg(long, value_delimiter = ',', default_value = "0.01,0.05,0.1,0.2")]
        delta: Vec<f64>,
        #[arg(long = "M", alias = "m", default_value_t = 10_000)]
        m: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = SimModeArg::Bernoulli)]
        sim_mode: SimModeArg,
        #[arg(long, default_value_t = MAX_TESTS)]
        max_tests: u64,
        /// Also write (1/ε, N_i) scatter points to this CSV file.
        #[arg(long)]
        scatter: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        scatter_points: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Run one randomly chosen test on the noisy input and print the transcript.
    Procedure {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Args)]
pub struct Target {
    /// bell3, bell2, W or D.
    #[arg(long)]
    pub family: Family,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value = "adaptive")]
    pub mode: Mode,
}

impl Target {
    fn resolve(&self) -> Result<(Family, usize, usize, Mode)> {
        let need_n = || {
            self.n
                .ok_or_else(|| Error::Domain(format!("--n is required for family {}", self.family)))
        };
        match self.family {
            Family::Bell3 | Family::Bell2 => Ok((self.family, 2, 1, Mode::Nonadaptive)),
            Family::W => Ok((Family::W, need_n()?, 1, self.mode)),
            Family::Dicke => {
                let k = self
                    .k
                    .ok_or_else(|| Error::Domain("--k is required for family D".into()))?;
                Ok((Family::Dicke, need_n()?, k, self.mode))
            }
            other => Err(Error::Domain(format!("family {other} is not available here"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    /// Human-readable text (procedure transcripts).
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimModeArg {
    Bernoulli,
    Procedure,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Output {
    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

/// Process exit code for an error: 2 for invalid input, 3 for numeric failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::TooLarge(_) | Error::Overflow(_) => 2,
        Error::Numeric(_) => 3,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
    }
}

fn seed_or_entropy(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::rng().random();
        eprintln!("seed: {s}");
        s
    })
}

fn frac(f: Option<Fraction>) -> String {
    f.map_or_else(|| "-".to_string(), |f| f.to_string())
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn write_csv<T: Serialize>(w: &mut dyn Write, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gap { target, output } => cmd_gap(&target, &output),
        Command::Table { m, seed, output } => cmd_table(m, seed, &output),
        Command::Compare {
            n,
            k,
            delta,
            eps,
            exact,
            output,
        } => cmd_compare(n, k, delta, eps, exact, &output),
        Command::Convert {
            target,
            merge,
            literal,
            output,
        } => cmd_convert(&target, merge, literal, &output),
        Command::Simulate {
            target,
            eps,
            delta,
            m,
            seed,
            sim_mode,
            max_tests,
            scatter,
            scatter_points,
            output,
        } => {
            let (family, n, k, mode) = target.resolve()?;
            let s = built_in(family, n, k, mode)?;
            let mut config = SimConfig::new(
                if eps.is_empty() { default_eps_grid() } else { eps },
                delta,
                m,
                seed_or_entropy(seed),
            );
            config.mode = match sim_mode {
                SimModeArg::Bernoulli => SimMode::Bernoulli,
                SimModeArg::Procedure => SimMode::Procedure,
            };
            config.max_tests = max_tests;
            let report = simulate(&s, &config)?;
            if let Some(fit) = &report.fit {
                eprintln!(
                    "fitted 1/nu = {:.4} (sd {:.4}), theory {:.4}",
                    fit.estimate,
                    fit.stddev,
                    1.0 / report.nu
                );
            }
            let capped: u64 = report.capped.iter().sum();
            if capped > 0 {
                eprintln!("warning: {capped} trials reached the test cap (target-like input)");
            }
            if let Some(path) = scatter {
                report.write_scatter_csv(File::create(path)?, scatter_points)?;
            }
            let mut w = output.writer()?;
            match output.format_or(Format::Json) {
                Format::Csv => report.write_thresholds_csv(&mut w)?,
                _ => {
                    w.write_all(report.to_json()?.as_bytes())?;
                    writeln!(w)?;
                }
            }
            Ok(w.flush()?)
        }
        Command::Procedure {
            target,
            eps,
            seed,
            output,
        } => cmd_procedure(&target, eps, seed, &output),
    }
}

fn cmd_gap(target: &Target, output: &Output) -> Result<()> {
    let (family, n, k, mode) = target.resolve()?;
    let summary = spectral_gap(&built_in(family, n, k, mode)?)?.summary();
    let mut w = output.writer()?;
    match output.format_or(Format::Json) {
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                family: String,
                n: usize,
                k: usize,
                mode: Mode,
                lambda2: String,
                nu: String,
                lambda2_decimal: f64,
                nu_decimal: f64,
                multiplicity: u64,
            }
            write_csv(
                &mut w,
                &[Row {
                    family: summary.family.to_string(),
                    n: summary.n,
                    k: summary.k,
                    mode: summary.mode,
                    lambda2: frac(summary.lambda2),
                    nu: frac(summary.nu),
                    lambda2_decimal: summary.lambda2_decimal,
                    nu_decimal: summary.nu_decimal,
                    multiplicity: summary.multiplicity,
                }],
            )?;
        }
        Format::Text => writeln!(
            w,
            "nu = {} ({:.10}), lambda2 = {} ({:.10}), multiplicity {}",
            frac(summary.nu),
            summary.nu_decimal,
            frac(summary.lambda2),
            summary.lambda2_decimal,
            summary.multiplicity
        )?,
        Format::Json => write_json(&mut w, &summary)?,
    }
    Ok(w.flush()?)
}

fn cmd_table(m: usize, seed: Option<u64>, output: &Output) -> Result<()> {
    let rows = table_one(m, seed_or_entropy(seed))?;
    let mut w = output.writer()?;
    match output.format_or(Format::Csv) {
        Format::Json => write_json(&mut w, &rows)?,
        _ => write_csv(&mut w, &rows)?,
    }
    Ok(w.flush()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct CompareRow {
    pub eps: f64,
    #[serde(rename = "N_adaptive")]
    pub adaptive: f64,
    #[serde(rename = "N_nonadaptive")]
    pub nonadaptive: f64,
    #[serde(rename = "N_global")]
    pub global: f64,
}

/// Rows of the test-count comparison for `|D_n^k⟩` (`k = 1` is `|W_n⟩`).
pub fn compare_rows(n: usize, k: usize, delta: f64, eps: &[f64], exact: bool) -> Result<Vec<CompareRow>> {
    let family = if k == 1 { Family::W } else { Family::Dicke };
    let nu = |mode| -> Result<f64> {
        let q = closed_form_gap(family, mode, n, k)?;
        Ok(*q.numer() as f64 / *q.denom() as f64)
    };
    let (nu_a, nu_na) = (nu(Mode::Adaptive)?, nu(Mode::Nonadaptive)?);
    let count = |nu: f64, e: f64| -> Result<f64> {
        let c = required_tests(nu, e, delta)?;
        Ok(if exact { c.exact as f64 } else { c.approx })
    };
    eps.iter()
        .map(|&e| {
            Ok(CompareRow {
                eps: e,
                adaptive: count(nu_a, e)?,
                nonadaptive: count(nu_na, e)?,
                global: count(1.0, e)?,
            })
        })
        .collect()
}

fn cmd_compare(n: usize, k: usize, delta: f64, eps: Vec<f64>, exact: bool, output: &Output) -> Result<()> {
    let eps = if eps.is_empty() { log_grid(0.001, 0.1, 25) } else { eps };
    let rows = compare_rows(n, k, delta, &eps, exact)?;
    let mut w = output.writer()?;
    match output.format_or(Format::Csv) {
        Format::Json => write_json(&mut w, &rows)?,
        _ => write_csv(&mut w, &rows)?,
    }
    Ok(w.flush()?)
}

fn cmd_convert(target: &Target, merge: bool, literal: bool, output: &Output) -> Result<()> {
    let (family, n, k, _) = target.resolve()?;
    let s = built_in(family, n, k, Mode::Adaptive)?;
    let mode = if literal { ConversionMode::Literal } else { ConversionMode::TargetAware };
    let summary = convert_strategy(&s, merge, mode)?.summary();
    let mut w = output.writer()?;
    match output.format_or(Format::Json) {
        Format::Json => write_json(&mut w, &summary)?,
        _ => {
            #[derive(Serialize)]
            struct Row {
                state: String,
                merged: bool,
                alpha_in: usize,
                alpha: usize,
                gap_in: String,
                gap_out: String,
                gap_in_decimal: f64,
                gap_out_decimal: f64,
                guarantee_ok: bool,
            }
            write_csv(
                &mut w,
                &[Row {
                    state: crate::sim::state_label(family, n, k),
                    merged: summary.merged,
                    alpha_in: summary.alpha_in,
                    alpha: summary.alpha,
                    gap_in: frac(summary.gap_in),
                    gap_out: frac(summary.gap_out),
                    gap_in_decimal: summary.gap_in_decimal,
                    gap_out_decimal: summary.gap_out_decimal,
                    guarantee_ok: summary.guarantee_ok,
                }],
            )?;
        }
    }
    Ok(w.flush()?)
}

fn cmd_procedure(target: &Target, eps: f64, seed: Option<u64>, output: &Output) -> Result<()> {
    let (family, n, k, mode) = target.resolve()?;
    let s = built_in(family, n, k, mode)?;
    let input = if eps > 0.0 {
        let noise = worst_case_noise(&s)?;
        NoisyInput::new(s.target(), &noise.tau, eps)?.psi_prime
    } else {
        s.target().clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed_or_entropy(seed));
    let j = Sampler::new(&s, &input, SimMode::Procedure)?.pick(&mut rng);
    let tree = s.tests()[j]
        .procedure
        .as_ref()
        .ok_or_else(|| Error::Domain("selected test has no measurement procedure".into()))?;
    let transcript = execute_branch_procedure(tree, &input, &mut rng)?;
    let mut w = output.writer()?;
    match output.format_or(Format::Text) {
        Format::Json => write_json(&mut w, &transcript)?,
        _ => {
            writeln!(w, "test: {} of {}", j + 1, s.tests().len())?;
            writeln!(w, "{transcript}")?;
        }
    }
    Ok(w.flush()?)
}
