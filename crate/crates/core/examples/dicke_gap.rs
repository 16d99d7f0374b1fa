//! Dicke-state gaps from the eigensolver next to the closed form.

use dicke_verify::spectral::{assemble_dicke_strategy, closed_form_gap, spectral_gap, Family, Mode};

fn main() -> dicke_verify::Result<()> {
    for n in 4..=9 {
        for k in 2..=n / 2 {
            for mode in [Mode::Adaptive, Mode::Nonadaptive] {
                let s = assemble_dicke_strategy(n, k, mode)?;
                let r = spectral_gap(&s)?;
                println!(
                    "D_{n}^{k} {mode:<11} nu={:<6} closed form {}  ({} tests)",
                    r.summary().nu.map_or("-".into(), |f| f.to_string()),
                    closed_form_gap(Family::Dicke, mode, n, k)?,
                    s.tests().len()
                );
            }
        }
    }
    Ok(())
}
