//! Tests needed at 95% confidence for |W₁₀⟩ and |D₁₀⁵⟩.

use dicke_verify::cli::compare_rows;
use dicke_verify::sim::log_grid;

fn main() -> dicke_verify::Result<()> {
    for k in [1, 5] {
        println!("n=10 k={k}");
        println!("{:>8} {:>10} {:>12} {:>8}", "eps", "adaptive", "nonadaptive", "global");
        for r in compare_rows(10, k, 0.05, &log_grid(0.001, 0.1, 5), true)? {
            println!("{:>8.4} {:>10} {:>12} {:>8}", r.eps, r.adaptive, r.nonadaptive, r.global);
        }
    }
    Ok(())
}
