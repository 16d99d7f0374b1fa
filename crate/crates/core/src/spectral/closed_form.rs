//! Exact spectral data of the built-in strategies.

use num_rational::Ratio;

use super::strategy::{Family, Mode};
use crate::error::{Error, Result};
use crate::hilbert::binom;

type Q = Ratio<i64>;

fn q(num: i64, den: i64) -> Q {
    Ratio::new(num, den)
}

/// `min{1/(n−1), ½ − (k(k−n)+n)/(n(n−1))}`, the adaptive gap for `k`
/// excitations. At `k = 1` and `k = n−1` it reduces to the W expression
/// `min{1/(n−1), ½ − 1/(n(n−1))}`.
fn adaptive_gap(n: i64, k: i64) -> Q {
    let a = q(1, n - 1);
    let b = q(1, 2) - q(k * (k - n) + n, n * (n - 1));
    a.min(b)
}

/// Exact spectral gap `ν` of a built-in strategy.
///
/// `k` is read only for the Dicke family. W needs `n ≥ 3`; Dicke needs
/// `n ≥ 3` and `1 ≤ k ≤ n−1`.
pub fn closed_form_gap(family: Family, mode: Mode, n: usize, k: usize) -> Result<Q> {
    let (ni, ki) = (n as i64, k as i64);
    match family {
        Family::Bell3 => Ok(q(2, 3)),
        Family::Bell2 => Ok(q(1, 2)),
        Family::Global => Ok(q(1, 1)),
        Family::W if n >= 3 => Ok(match (mode, n) {
            (Mode::Adaptive, _) => adaptive_gap(ni, 1),
            (Mode::Nonadaptive, 3) => q(1, 4),
            (Mode::Nonadaptive, _) => adaptive_gap(ni, 1) / 2,
        }),
        Family::Dicke if n >= 3 && k >= 1 && k < n => Ok(match (mode, n) {
            (Mode::Adaptive, _) => adaptive_gap(ni, ki),
            (Mode::Nonadaptive, 3) => q(1, 4),
            (Mode::Nonadaptive, _) => adaptive_gap(ni, ki) / 2,
        }),
        _ => Err(Error::domain(format!(
            "no closed form for {family} {mode} with n={n}, k={k}"
        ))),
    }
}

/// Eigenvalues of the adaptive W operator with multiplicities, largest first:
/// `1, 1−1/(n−1), ½+1/(n(n−1)), 1/(n(n−1)), 0` with multiplicities
/// `1, n−1, 1, n(n−1)/2 − 1, 2ⁿ − (n²+n)/2`.
pub fn full_spectrum_w(n: usize) -> Result<Vec<(Q, u64)>> {
    if !(3..=62).contains(&n) {
        return Err(Error::domain(format!("W spectrum needs 3 ≤ n ≤ 62, got {n}")));
    }
    let ni = n as i64;
    let nu = n as u64;
    let pairs = nu * (nu - 1) / 2;
    let mut spectrum = vec![
        (q(1, 1), 1),
        (q(1, 1) - q(1, ni - 1), nu - 1),
        (q(1, 2) + q(1, ni * (ni - 1)), 1),
        (q(1, ni * (ni - 1)), pairs - 1),
        (q(0, 1), (1u64 << n) - (nu * nu + nu) / 2),
    ];
    spectrum.retain(|&(_, m)| m > 0);
    spectrum.sort_by(|a, b| b.0.cmp(&a.0));
    Ok(spectrum)
}

/// Adjacency spectrum of the Johnson graph `J(n,k)`: eigenvalue
/// `(k−j)(n−k−j) − j` with multiplicity `C(n,j) − C(n,j−1)` for
/// `j = 0, …, min(k, n−k)`.
pub fn johnson_spectrum(n: usize, k: usize) -> Result<Vec<(i64, u64)>> {
    if k > n {
        return Err(Error::domain(format!("J({n},{k}) needs k ≤ n")));
    }
    let (ni, ki) = (n as i64, k as i64);
    (0..=ki.min(ni - ki))
        .map(|j| {
            let value = (ki - j) * (ni - ki - j) - j;
            let mult = binom(ni, j)? - binom(ni, j - 1)?;
            Ok((value, mult))
        })
        .collect()
}

/// `λ₁(M₂) = n(n+1)/2 + k(k−n)`.
pub fn m2_top_value(n: usize, k: usize) -> i64 {
    let (n, k) = (n as i64, k as i64);
    n * (n + 1) / 2 + k * (k - n)
}

/// `λ₂(M₁) = n(n−2)`.
pub fn m1_second_value(n: usize) -> i64 {
    let n = n as i64;
    n * (n - 2)
}
