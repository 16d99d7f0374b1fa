//! Gaps and the full spectrum of the W-state strategies for small n.

use dicke_verify::spectral::{assemble_w_strategy, block_eigensystem, full_spectrum_w, spectral_gap, Mode};

fn main() -> dicke_verify::Result<()> {
    println!("n  adaptive  nonadaptive");
    for n in 3..=8 {
        let a = spectral_gap(&assemble_w_strategy(n, Mode::Adaptive)?)?;
        let na = spectral_gap(&assemble_w_strategy(n, Mode::Nonadaptive)?)?;
        println!(
            "{n}  {:<8}  {}",
            a.summary().nu.map_or("-".into(), |f| f.to_string()),
            na.summary().nu.map_or("-".into(), |f| f.to_string())
        );
    }

    let n = 5;
    let numeric = block_eigensystem(assemble_w_strategy(n, Mode::Adaptive)?.operator())?;
    println!("\nspectrum of the adaptive W_{n} strategy (numeric vs closed form)");
    for ((value, mult), (exact, m)) in numeric.spectrum().into_iter().zip(full_spectrum_w(n)?) {
        println!("{value:>10.6} x{mult:<3} {exact} x{m}");
    }
    Ok(())
}
