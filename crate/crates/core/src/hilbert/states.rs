use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::basis::{binom, deposit_bits, full_mask, WeightSector};
use super::ket::Ket;
use crate::error::{Error, Result};

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The basis state `|label⟩`.
pub fn basis_ket(n: usize, label: u64) -> Result<Ket> {
    Ket::from_amplitudes(n, [(label, real(1.0))])
}

/// `|D_n^k⟩`: uniform superposition over all labels of weight `k`.
pub fn dicke_state(n: usize, k: usize) -> Result<Ket> {
    if n == 0 || k > n {
        return Err(Error::domain(format!("no Dicke state D_{n}^{k}")));
    }
    let sector = WeightSector::new(n, k)?;
    let amp = 1.0 / (binom(n as i64, k as i64)? as f64).sqrt();
    Ket::from_amplitudes(n, sector.members().iter().map(|&u| (u, real(amp))))
}

/// `|W_n⟩ = |D_n^1⟩`.
pub fn w_state(n: usize) -> Result<Ket> {
    dicke_state(n, 1)
}

/// `|ψ⁺⟩ = (|01⟩ + |10⟩)/√2` on two qubits.
pub fn bell_psi_plus() -> Ket {
    Ket::from_map_unchecked(2, [(0b01, real(FRAC_1_SQRT_2)), (0b10, real(FRAC_1_SQRT_2))].into())
}

/// `|ψ⁻⟩ = (|01⟩ − |10⟩)/√2`, with the first tensor factor on qubit 0.
pub fn bell_psi_minus() -> Ket {
    // |0⟩_0|1⟩_1 is label 0b10.
    Ket::from_map_unchecked(2, [(0b10, real(FRAC_1_SQRT_2)), (0b01, real(-FRAC_1_SQRT_2))].into())
}

/// `|φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell_phi_plus() -> Ket {
    Ket::from_map_unchecked(2, [(0b00, real(FRAC_1_SQRT_2)), (0b11, real(FRAC_1_SQRT_2))].into())
}

/// `|ψ⁻⟩_{i,j} ⊗ |rest⟩`.
///
/// The singlet `(|0⟩_i|1⟩_j − |1⟩_i|0⟩_j)/√2` sits on qubits `i` and `j`; the
/// qubits of `rest` fill the remaining positions in ascending order.
pub fn singlet_pair_state(i: usize, j: usize, rest: &Ket) -> Result<Ket> {
    let n = rest.n() + 2;
    if i == j || i >= n || j >= n {
        return Err(Error::domain(format!(
            "invalid pair ({i},{j}) for {n} qubits"
        )));
    }
    let others = full_mask(n) & !(1 << i) & !(1 << j);
    let h = real(FRAC_1_SQRT_2);
    let mut amps = Vec::with_capacity(2 * rest.support_len());
    for (label, a) in rest.iter() {
        let base = deposit_bits(label, others);
        amps.push((base | (1 << j), a * h));
        amps.push((base | (1 << i), -a * h));
    }
    Ket::from_amplitudes(n, amps)
}
