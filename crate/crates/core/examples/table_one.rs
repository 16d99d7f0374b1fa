//! Fitted 1/ν for the tabulated W and Dicke states. Pass a trial count to
//! override the default of 10 000.

use dicke_verify::sim::table_one;

fn main() -> dicke_verify::Result<()> {
    let m = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(10_000);
    println!("{:<7} {:<12} {:>9} {:>8} {:>6}", "state", "mode", "fitted", "sd", "theory");
    for row in table_one(m, 2024)? {
        println!(
            "{:<7} {:<12} {:>9.4} {:>8.4} {:>6}",
            row.state,
            row.mode.to_string(),
            row.fitted,
            row.stddev,
            row.theory
        );
    }
    Ok(())
}
