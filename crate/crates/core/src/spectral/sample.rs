use serde::{Deserialize, Serialize};

use super::gap::spectral_gap;
use super::strategy::Strategy;
use crate::error::{Error, Result};

/// `1 − ν·ε`: the largest pass probability of a state with infidelity `ε`.
pub fn pass_probability_bound(nu: f64, eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) || !(0.0..=1.0).contains(&nu) {
        return Err(Error::domain(format!("need ν, ε in [0,1], got ν={nu}, ε={eps}")));
    }
    Ok(1.0 - nu * eps)
}

/// [`pass_probability_bound`] with the strategy's computed gap.
pub fn worst_case_pass_probability(s: &Strategy, eps: f64) -> Result<f64> {
    pass_probability_bound(spectral_gap(s)?.nu, eps)
}

/// Number of tests to reach confidence `1 − δ` at infidelity `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleCount {
    /// `⌈ln δ⁻¹ / ln[(1 − νε)⁻¹]⌉`, or 1 when `νε ≥ 1`.
    pub exact: u64,
    /// `ν⁻¹ ε⁻¹ ln δ⁻¹`, unrounded.
    pub approx: f64,
    /// Set when `νε ≥ 1`: one failed test already rules out the source.
    pub degenerate: bool,
}

pub fn required_tests(nu: f64, eps: f64, delta: f64) -> Result<SampleCount> {
    let open = |x: f64| x > 0.0 && x < 1.0;
    if !(nu > 0.0 && nu <= 1.0) || !open(eps) || !open(delta) {
        return Err(Error::domain(format!(
            "need 0 < ν ≤ 1 and 0 < ε, δ < 1, got ν={nu}, ε={eps}, δ={delta}"
        )));
    }
    let log_inv_delta = -delta.ln();
    let approx = log_inv_delta / (nu * eps);
    if nu * eps >= 1.0 {
        return Ok(SampleCount {
            exact: 1,
            approx,
            degenerate: true,
        });
    }
    // −ln(1 − x) without cancellation for small x
    let per_test = -(-nu * eps).ln_1p();
    let exact = (log_inv_delta / per_test).ceil();
    Ok(SampleCount {
        exact: exact as u64,
        approx,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{assemble_w_strategy, Mode};

    #[test]
    fn bound_values() {
        let s = assemble_w_strategy(3, Mode::Adaptive).unwrap();
        assert!((worst_case_pass_probability(&s, 0.3).unwrap() - 0.9).abs() < 1e-12);
        assert_eq!(worst_case_pass_probability(&s, 0.0).unwrap(), 1.0);
        assert!((pass_probability_bound(1.0, 0.25).unwrap() - 0.75).abs() < 1e-15);
        assert!(pass_probability_bound(1.0, 1.5).is_err());
    }

    #[test]
    fn third_gap_count() {
        let c = required_tests(1.0 / 3.0, 0.01, 0.05).unwrap();
        assert_eq!(c.exact, 898);
        assert!((c.approx - 898.72).abs() < 0.01);
    }

    #[test]
    fn degenerate_and_invalid() {
        let c = required_tests(1.0, 0.999, 0.5).unwrap();
        assert!(!c.degenerate);
        assert_eq!(c.exact, 1);
        assert!(required_tests(0.0, 0.1, 0.1).is_err());
        assert!(required_tests(0.5, 0.0, 0.1).is_err());
        assert!(required_tests(0.5, 0.1, 1.0).is_err());
    }
}
