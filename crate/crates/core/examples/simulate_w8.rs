//! Adaptive W₈ verification experiment at four confidence levels.

use dicke_verify::sim::{default_eps_grid, simulate, SimConfig};
use dicke_verify::spectral::{assemble_w_strategy, Mode};

fn main() -> dicke_verify::Result<()> {
    let s = assemble_w_strategy(8, Mode::Adaptive)?;
    let deltas = vec![0.01, 0.05, 0.1, 0.2];
    let report = simulate(&s, &SimConfig::new(default_eps_grid(), deltas.clone(), 10_000, 7))?;
    println!("1/eps     {}", deltas.iter().map(|d| format!("d={d:<6}")).collect::<String>());
    for (e, eps) in report.eps.iter().enumerate().step_by(5) {
        let cols: String = report.thresholds[e].iter().map(|n| format!("{n:<8}")).collect();
        println!("{:<9.2} {cols}", 1.0 / eps);
    }
    if let Some(fit) = &report.fit {
        println!("N ~ {:.4}(+-{:.4}) ln(1/delta)/eps", fit.estimate, fit.stddev);
    }
    report.write_scatter_csv(std::io::sink(), 500)?;
    Ok(())
}
