//! Runs the adaptive Dicke test a few times on a noisy input and prints the transcripts.

use dicke_verify::ops::{dicke_adaptive_test, execute_branch_procedure};
use dicke_verify::sim::{worst_case_noise, NoisyInput};
use dicke_verify::spectral::{assemble_dicke_strategy, Mode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dicke_verify::Result<()> {
    let (n, k) = (5, 2);
    let s = assemble_dicke_strategy(n, k, Mode::Adaptive)?;
    let noise = worst_case_noise(&s)?;
    let input = NoisyInput::new(s.target(), &noise.tau, 0.3)?;
    let test = dicke_adaptive_test(0, 1, k, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..4 {
        println!("{}\n", execute_branch_procedure(&test, &input.psi_prime, &mut rng)?);
    }
    Ok(())
}
