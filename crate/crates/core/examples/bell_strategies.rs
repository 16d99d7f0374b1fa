//! Spectral gaps of the two-qubit Bell strategies.

use dicke_verify::spectral::{bell_strategies, spectral_gap};

fn main() -> dicke_verify::Result<()> {
    let (three, two) = bell_strategies()?;
    for s in [&three, &two] {
        let g = spectral_gap(s)?.summary();
        println!(
            "{:<6} tests={} nu={} ({:.6})",
            s.kind().family,
            s.tests().len(),
            g.nu.map_or("-".into(), |f| f.to_string()),
            g.nu_decimal
        );
    }
    Ok(())
}
