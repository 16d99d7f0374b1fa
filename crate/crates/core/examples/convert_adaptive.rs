//! Converting adaptive strategies into nonadaptive ones.

use dicke_verify::convert::{convert_strategy, ConversionMode};
use dicke_verify::spectral::{assemble_dicke_strategy, assemble_w_strategy, Mode};

fn main() -> dicke_verify::Result<()> {
    let cases = [
        (assemble_w_strategy(3, Mode::Adaptive)?, false),
        (assemble_w_strategy(6, Mode::Adaptive)?, false),
        (assemble_dicke_strategy(6, 3, Mode::Adaptive)?, false),
        (assemble_dicke_strategy(6, 3, Mode::Adaptive)?, true),
    ];
    for (s, merge) in &cases {
        for mode in [ConversionMode::TargetAware, ConversionMode::Literal] {
            let r = convert_strategy(s, *merge, mode)?;
            println!(
                "{:<18} merge={:<5} {:?}: alpha {}->{}  nu {:.5} -> {:.5}  bound ok: {}",
                s.kind().to_string(),
                merge,
                mode,
                r.alpha_in,
                r.alpha,
                r.gap_in,
                r.gap_out,
                r.guarantee_ok
            );
        }
    }
    Ok(())
}
