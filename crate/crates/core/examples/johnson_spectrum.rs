//! Johnson-graph spectrum and the top eigenpair of M₂.

use dicke_verify::spectral::{
    block_eigensystem, johnson_adjacency, johnson_spectrum, m2_top_eigen, m2_top_value,
};

fn main() -> dicke_verify::Result<()> {
    let (n, k) = (6, 3);
    println!("J({n},{k}) spectrum, closed form vs eigensolver:");
    for (value, mult) in johnson_spectrum(n, k)? {
        println!("  {value:>3} x{mult}");
    }
    // labels outside the weight-k sector add 2^n - C(n,k) zeros
    for (value, mult) in block_eigensystem(&johnson_adjacency(n, k)?)?.spectrum() {
        println!("  {value:>6.3} x{mult}");
    }
    for (n, k) in [(4, 2), (6, 2), (8, 4)] {
        let (top, vector) = m2_top_eigen(n, k)?;
        println!(
            "M2 for n={n} k={k}: top eigenvalue {top} (formula {}), support {}",
            m2_top_value(n, k),
            vector.support_len()
        );
    }
    Ok(())
}
