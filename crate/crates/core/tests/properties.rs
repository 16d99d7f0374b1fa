use num_complex::Complex64;
use proptest::prelude::*;

use dicke_verify::convert::{convert_strategy, slack_operator, ConversionMode};
use dicke_verify::hilbert::{dicke_state, Ket};
use dicke_verify::ops::{dicke_adaptive_test, merge_by_setting, LocalFlip};
use dicke_verify::spectral::{
    assemble_dicke_strategy, assemble_w_strategy, block_eigensystem, dense_eigensystem,
    rationalize, required_tests, spectral_gap, spectral_gap_dense, Mode, Strategy as Protocol,
};

fn strategy(n: usize, k: usize, adaptive: bool) -> Protocol {
    let mode = if adaptive { Mode::Adaptive } else { Mode::Nonadaptive };
    if k == 1 {
        assemble_w_strategy(n, mode).unwrap()
    } else {
        assemble_dicke_strategy(n, k, mode).unwrap()
    }
}

/// `(n, k)` with `3 ≤ n ≤ 7` and `1 ≤ k ≤ n − 1`.
fn n_and_k() -> impl Strategy<Value = (usize, usize)> {
    (3usize..=7).prop_flat_map(|n| (Just(n), 1..n))
}

fn ket(n: usize) -> impl Strategy<Value = Ket> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n).prop_filter_map("zero vector", move |v| {
        Ket::normalized_from(n, v.into_iter().enumerate().map(|(u, (re, im))| (u as u64, Complex64::new(re, im)))).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tests_are_projectors_fixing_the_target((n, k) in n_and_k(), adaptive in any::<bool>()) {
        let s = strategy(n, k, adaptive);
        let weights: f64 = s.tests().iter().map(|t| t.weight).sum();
        prop_assert!((weights - 1.0).abs() < 1e-12);
        for t in s.tests() {
            prop_assert!(t.operator.is_projector());
            prop_assert!(t.operator.fixed_point_residual(s.target()).unwrap() < 1e-12);
        }
        prop_assert!(s.operator().is_hermitian(1e-12));
    }

    #[test]
    fn spectrum_lies_in_unit_interval((n, k) in n_and_k(), adaptive in any::<bool>()) {
        let s = strategy(n, k, adaptive);
        let spectrum = block_eigensystem(s.operator()).unwrap().spectrum();
        prop_assert!((spectrum[0].0 - 1.0).abs() < 1e-10);
        prop_assert_eq!(spectrum[0].1, 1);
        prop_assert!(spectrum.iter().all(|&(v, _)| v > -1e-10 && v < 1.0 + 1e-10));
        let total: u64 = spectrum.iter().map(|&(_, m)| m).sum();
        prop_assert_eq!(total, 1u64 << n);
    }

    #[test]
    fn block_and_dense_solvers_agree((n, k) in n_and_k(), adaptive in any::<bool>()) {
        let s = strategy(n, k, adaptive);
        let a = spectral_gap(&s).unwrap();
        let b = spectral_gap_dense(&s).unwrap();
        prop_assert!((a.lambda2 - b.lambda2).abs() < 1e-10);
        prop_assert_eq!(a.multiplicity2, b.multiplicity2);
        let sa = block_eigensystem(s.operator()).unwrap().spectrum();
        let sb = dense_eigensystem(s.operator()).unwrap().spectrum();
        prop_assert_eq!(sa.len(), sb.len());
        for ((va, ma), (vb, mb)) in sa.iter().zip(&sb) {
            prop_assert!((va - vb).abs() < 1e-9);
            prop_assert_eq!(ma, mb);
        }
    }

    #[test]
    fn pass_probability_is_bounded_by_fidelity(psi in ket(4), adaptive in any::<bool>()) {
        // ⟨ψ|Ω|ψ⟩ ≤ 1 − ν(1 − F)
        let s = strategy(4, 2, adaptive);
        let nu = spectral_gap(&s).unwrap().nu;
        let fidelity = s.target().inner(&psi).unwrap().norm_sqr();
        let pass = s.operator().expectation(&psi).unwrap();
        prop_assert!(pass <= 1.0 - nu * (1.0 - fidelity) + 1e-10);
    }

    #[test]
    fn flip_maps_dicke_sectors(n in 3usize..=7, k in 0usize..=7) {
        prop_assume!(k <= n);
        let flip = LocalFlip::new(n);
        let d = dicke_state(n, k).unwrap();
        let flipped = flip.ket(&d);
        prop_assert!(flipped.distance(&dicke_state(n, n - k).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn merging_keeps_the_operator((n, k) in (4usize..=7).prop_flat_map(|n| (Just(n), 2..n - 1)), i in 0usize..7, j in 0usize..7) {
        prop_assume!(i < j && j < n);
        let t = dicke_adaptive_test(i, j, k, n).unwrap();
        let merged = merge_by_setting(&t).unwrap();
        prop_assert_eq!(merged.branch_number(), 2);
        prop_assert!(t.matrix().max_abs_diff(&merged.matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn conversion_guarantee_and_slack((n, k) in (3usize..=6).prop_flat_map(|n| (Just(n), 1..n)), merge in any::<bool>(), literal in any::<bool>()) {
        let s = strategy(n, k, true);
        let mode = if literal { ConversionMode::Literal } else { ConversionMode::TargetAware };
        let r = convert_strategy(&s, merge, mode).unwrap();
        prop_assert!(r.guarantee_ok);
        prop_assert!(r.gap_out >= r.gap_in / r.alpha as f64 - 1e-10);
        let slack = slack_operator(&s, merge).unwrap();
        let top = block_eigensystem(&slack).unwrap().spectrum()[0].0;
        prop_assert!(top <= 1.0 - 1.0 / r.alpha as f64 + 1e-10);
    }

    #[test]
    fn rationalize_recovers_small_fractions(p in 0i64..200, q in 1i64..200) {
        let r = rationalize(p as f64 / q as f64).unwrap();
        prop_assert_eq!(r, num_rational::Ratio::new(p, q));
    }

    #[test]
    fn required_tests_is_monotone(nu in 0.01f64..1.0, eps in 0.001f64..0.5, delta in 0.001f64..0.5) {
        let c = required_tests(nu, eps, delta).unwrap();
        prop_assume!(!c.degenerate);
        prop_assert!(c.exact as f64 <= c.approx + 1.0);
        let harder = required_tests(nu, eps / 2.0, delta).unwrap();
        prop_assert!(harder.exact >= c.exact);
        // (1 − νε)^N ≤ δ < (1 − νε)^(N−1)
        let log_p = (-nu * eps).ln_1p();
        prop_assert!(c.exact as f64 * log_p <= delta.ln() + 1e-9);
        prop_assert!((c.exact as f64 - 1.0) * log_p > delta.ln() - 1e-9);
    }
}
