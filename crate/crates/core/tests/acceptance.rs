//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dicke_verify::cli::compare_rows;
use dicke_verify::convert::{convert_strategy, ConversionMode};
use dicke_verify::hilbert::Ket;
use dicke_verify::ops::{execute_branch_procedure, pair_projector, pauli_projector, Axis, Sign, SparseMatrix};
use dicke_verify::sim::{table_one, worst_case_noise, NoisyInput, Sampler, SimMode};
use dicke_verify::spectral::{
    assemble_dicke_strategy, assemble_w_strategy, bell_strategies, block_eigensystem,
    dense_eigensystem, johnson_spectrum, m1_matrix, m2_matrix, m2_top_eigen, required_tests,
    spectral_gap, Mode, Strategy,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn gap_matches(s: &Strategy, num: i64, den: i64) -> Result<(), String> {
    let nu = spectral_gap(s).map_err(e2s)?.nu;
    let want = num as f64 / den as f64;
    ensure((nu - want).abs() < 1e-10, || format!("{}: nu = {nu}, want {num}/{den}", s.kind()))
}

fn criterion_1() -> Check {
    let (bell3, bell2) = bell_strategies().map_err(e2s)?;
    gap_matches(&bell3, 2, 3)?;
    gap_matches(&bell2, 1, 2)?;
    gap_matches(&assemble_w_strategy(3, Mode::Adaptive).map_err(e2s)?, 1, 3)?;
    gap_matches(&assemble_w_strategy(3, Mode::Nonadaptive).map_err(e2s)?, 1, 4)?;
    let mut count = 4;
    for n in 4..=10i64 {
        gap_matches(&assemble_w_strategy(n as usize, Mode::Adaptive).map_err(e2s)?, 1, n - 1)?;
        gap_matches(&assemble_w_strategy(n as usize, Mode::Nonadaptive).map_err(e2s)?, 1, 2 * (n - 1))?;
        count += 2;
    }
    for n in 4..=8i64 {
        for k in 2..=(n - 2) as usize {
            let n_ = n as usize;
            gap_matches(&assemble_dicke_strategy(n_, k, Mode::Adaptive).map_err(e2s)?, 1, n - 1)?;
            gap_matches(&assemble_dicke_strategy(n_, k, Mode::Nonadaptive).map_err(e2s)?, 1, 2 * (n - 1))?;
            count += 2;
        }
    }
    Ok(format!("{count} strategies match their rational gaps within 1e-10"))
}

fn criterion_2() -> Check {
    for n in 3..=8u64 {
        let nf = n as f64;
        let pairs = n * (n - 1) / 2;
        let mut expected: Vec<(f64, u64)> = vec![
            (1.0, 1),
            (1.0 - 1.0 / (nf - 1.0), n - 1),
            (0.5 + 1.0 / (nf * (nf - 1.0)), 1),
            (1.0 / (nf * (nf - 1.0)), pairs - 1),
            (0.0, (1 << n) - (n * n + n) / 2),
        ];
        expected.sort_by(|a, b| b.0.total_cmp(&a.0));
        let s = assemble_w_strategy(n as usize, Mode::Adaptive).map_err(e2s)?;
        let numeric = block_eigensystem(s.operator()).map_err(e2s)?.spectrum();
        ensure(numeric.len() == expected.len(), || format!("n={n}: {numeric:?} vs {expected:?}"))?;
        for ((v, m), (ev, em)) in numeric.iter().zip(&expected) {
            ensure((v - ev).abs() < 1e-9 && m == em, || {
                format!("n={n}: got {v} x{m}, want {ev} x{em}")
            })?;
        }
    }
    Ok("W spectra for n = 3..8 match all five eigenvalues and multiplicities".into())
}

fn criterion_3() -> Check {
    let n = 4;
    // 1-based qubit labels as written in the explicit operator
    let z = |q: usize, sign: Sign| pauli_projector(Axis::Z, sign, q - 1, n).unwrap().into_matrix();
    let xx = |a: usize, b: usize| pair_projector(Axis::X, Sign::Plus, a - 1, b - 1, n).unwrap().into_matrix();
    let prod = |ms: &[SparseMatrix]| {
        ms[1..].iter().fold(ms[0].clone(), |acc, m| acc.matmul(m).unwrap())
    };
    use Sign::{Minus as M, Plus as P};
    let mut terms = Vec::new();
    // (a, b) is the XX pair, (c, d) the other two qubits in the order written
    for (a, b, c, d) in [(2, 1, 4, 3), (3, 1, 4, 2), (4, 1, 3, 2), (3, 2, 4, 1), (4, 2, 3, 1), (4, 3, 2, 1)] {
        terms.push(prod(&[z(c, M), z(d, P), xx(a, b)]));
        terms.push(prod(&[z(c, P), z(d, M), xx(a, b)]));
        terms.push(prod(&[z(c, M), z(d, M), z(a, P), z(b, P)]));
        terms.push(prod(&[z(c, P), z(d, P), z(a, M), z(b, M)]));
    }
    let explicit = terms
        .iter()
        .fold(SparseMatrix::zero(n), |acc, t| acc.add_scaled(1.0 / 6.0, t).unwrap());
    let assembled = assemble_dicke_strategy(4, 2, Mode::Adaptive).map_err(e2s)?;
    let diff = assembled.operator().max_abs_diff(&explicit).map_err(e2s)?;
    ensure(terms.len() == 24 && diff < 1e-12, || format!("max |difference| = {diff:e}"))?;
    Ok(format!("24-term operator equals the assembled strategy, max |difference| = {diff:.1e}"))
}

fn criterion_4() -> Check {
    let mut cases = 0;
    for n in 4..=8usize {
        for k in 2..=n - 2 {
            let (ni, ki) = (n as i64, k as i64);
            // second Johnson eigenvalue shifted by the diagonal of M₁
            let johnson = johnson_spectrum(n, k).map_err(e2s)?;
            let shift = ni * (ni - 1) - ki * (ni - ki);
            let second = shift + johnson[1].0;
            ensure(second == ni * (ni - 2), || format!("n={n} k={k}: λ₂(M₁) = {second}"))?;
            let m1 = block_eigensystem(&m1_matrix(n, k).map_err(e2s)?).map_err(e2s)?.spectrum();
            ensure((m1[1].0 - (ni * (ni - 2)) as f64).abs() < 1e-9, || {
                format!("n={n} k={k}: numeric λ₂(M₁) = {}", m1[1].0)
            })?;

            let m2 = m2_matrix(n, k).map_err(e2s)?;
            let spectrum = dense_eigensystem(&m2).map_err(e2s)?.spectrum();
            let want = (ni * (ni + 1) / 2 + ki * (ki - ni)) as f64;
            ensure((spectrum[0].0 - want).abs() < 1e-9 && spectrum[0].1 == 1, || {
                format!("n={n} k={k}: top of M₂ = {:?}, want {want} simple", spectrum[0])
            })?;
            let (_, v) = m2_top_eigen(n, k).map_err(e2s)?;
            let residual = m2
                .apply(&v)
                .map_err(e2s)?
                .distance(&v.scale(Complex64::new(want, 0.0)))
                .map_err(e2s)?;
            ensure(residual < 1e-9, || format!("n={n} k={k}: eigenvector residual {residual:e}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (n,k) pairs: λ₂(M₁) = n(n−2), simple λ₁(M₂) and its eigenvector check out"))
}

fn criterion_5() -> Check {
    let tol = 1e-10;
    let mut cases = 0;
    for n in 3..=8usize {
        let s = assemble_w_strategy(n, Mode::Adaptive).map_err(e2s)?;
        let r = convert_strategy(&s, false, ConversionMode::TargetAware).map_err(e2s)?;
        ensure(r.alpha == 2 && r.gap_out >= r.gap_in / 2.0 - tol, || format!("W{n}: {:?}", r.summary()))?;
        let ratio = if n == 3 { 0.75 } else { 0.5 };
        ensure((r.gap_out - ratio * r.gap_in).abs() < tol, || {
            format!("W{n}: gap {} -> {}", r.gap_in, r.gap_out)
        })?;
        let nonadaptive = assemble_w_strategy(n, Mode::Nonadaptive).map_err(e2s)?;
        let diff = r.output.operator().max_abs_diff(nonadaptive.operator()).map_err(e2s)?;
        ensure(diff < 1e-12, || format!("W{n}: converted operator differs by {diff:e}"))?;
        cases += 1;
    }
    for n in 4..=8usize {
        for k in 2..=n - 2 {
            let s = assemble_dicke_strategy(n, k, Mode::Adaptive).map_err(e2s)?;
            let plain = convert_strategy(&s, false, ConversionMode::TargetAware).map_err(e2s)?;
            ensure(plain.alpha == 3 && plain.gap_out >= plain.gap_in / 3.0 - tol, || {
                format!("D{n}^{k} unmerged: {:?}", plain.summary())
            })?;
            let merged = convert_strategy(&s, true, ConversionMode::TargetAware).map_err(e2s)?;
            ensure(merged.alpha == 2 && (merged.gap_out - merged.gap_in / 2.0).abs() < tol, || {
                format!("D{n}^{k} merged: {:?}", merged.summary())
            })?;
            let eq19 = assemble_dicke_strategy(n, k, Mode::Nonadaptive).map_err(e2s)?;
            let diff = merged.output.operator().max_abs_diff(eq19.operator()).map_err(e2s)?;
            ensure(diff < 1e-12, || format!("D{n}^{k}: merged conversion differs by {diff:e}"))?;
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} strategies: bound ν/α holds (α = 2 W, 3 D, 2 merged D), halving for n ≥ 4, 3/4 for W3, merged D equals its nonadaptive assembly"
    ))
}

fn criterion_6() -> Check {
    let rows = table_one(10_000, 20_190_101).map_err(e2s)?;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for r in &rows {
        let rel = (r.fitted - r.theory).abs() / r.theory;
        worst = worst.max(rel);
        if rel > 0.03 {
            bad.push(format!("{} {}: {:.4} vs {}", r.state, r.mode, r.fitted, r.theory));
        }
    }
    ensure(rows.len() == 28 && bad.is_empty(), || bad.join("; "))?;
    Ok(format!("28 fits within 3% of theory, largest deviation {:.2}%", 100.0 * worst))
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> Ket {
    let amps = (0..1u64 << n).map(|u| (u, Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)));
    Ket::normalized_from(n, amps).unwrap()
}

/// `|freq − p| ≤ 5·SE` with `SE = √(p(1−p)/N)`; exact agreement when `p ∈ {0, 1}`.
fn within_5se(hits: u64, samples: u64, p: f64) -> bool {
    let p = p.clamp(0.0, 1.0);
    let freq = hits as f64 / samples as f64;
    let se = (p * (1.0 - p) / samples as f64).sqrt();
    (freq - p).abs() <= 5.0 * se + 1e-9
}

fn criterion_7() -> Check {
    const SAMPLES: u64 = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut checked = 0;
    for (n, k) in [(4, 1), (4, 2), (6, 3)] {
        for mode in [Mode::Adaptive, Mode::Nonadaptive] {
            let s = if k == 1 {
                assemble_w_strategy(n, mode)
            } else {
                assemble_dicke_strategy(n, k, mode)
            }
            .map_err(e2s)?;
            let noise = worst_case_noise(&s).map_err(e2s)?;
            let noisy = NoisyInput::new(s.target(), &noise.tau, 0.3).map_err(e2s)?.psi_prime;
            for input in [noisy, random_state(n, &mut rng)] {
                for (j, t) in s.tests().iter().enumerate() {
                    let tree = t.procedure.as_ref().ok_or("test without procedure")?;
                    let p = t.operator.pass_probability(&input).map_err(e2s)?;
                    let mut hits = 0;
                    for _ in 0..SAMPLES {
                        hits += execute_branch_procedure(tree, &input, &mut rng).map_err(e2s)?.passed as u64;
                    }
                    ensure(within_5se(hits, SAMPLES, p), || {
                        format!("n={n} k={k} {mode} test {j}: {hits}/{SAMPLES} vs p = {p}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} (test, input) pairs agree within 5 standard errors at 10^5 samples"))
}

fn criterion_8() -> Check {
    const SAMPLES: u64 = 100_000;
    let mut strategies: Vec<(Strategy, f64)> = Vec::new();
    let (bell3, bell2) = bell_strategies().map_err(e2s)?;
    strategies.push((bell3, 2.0 / 3.0));
    strategies.push((bell2, 0.5));
    for n in 3..=8usize {
        let a = if n == 3 { 1.0 / 3.0 } else { 1.0 / (n as f64 - 1.0) };
        let na = if n == 3 { 0.25 } else { a / 2.0 };
        strategies.push((assemble_w_strategy(n, Mode::Adaptive).map_err(e2s)?, a));
        strategies.push((assemble_w_strategy(n, Mode::Nonadaptive).map_err(e2s)?, na));
    }
    for n in 4..=8usize {
        for k in 2..=n - 2 {
            let a = 1.0 / (n as f64 - 1.0);
            strategies.push((assemble_dicke_strategy(n, k, Mode::Adaptive).map_err(e2s)?, a));
            strategies.push((assemble_dicke_strategy(n, k, Mode::Nonadaptive).map_err(e2s)?, a / 2.0));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    for (s, nu) in &strategies {
        let noise = worst_case_noise(s).map_err(e2s)?;
        for eps in [0.1, 0.3] {
            let input = NoisyInput::new(s.target(), &noise.tau, eps).map_err(e2s)?;
            let sampler = Sampler::new(s, &input.psi_prime, SimMode::Bernoulli).map_err(e2s)?;
            let mut hits = 0;
            for _ in 0..SAMPLES {
                hits += sampler.step(&mut rng).map_err(e2s)? as u64;
            }
            let p = 1.0 - nu * eps;
            ensure(within_5se(hits, SAMPLES, p), || {
                format!("{} eps={eps}: {hits}/{SAMPLES} vs 1 − νε = {p}", s.kind())
            })?;
        }
    }
    Ok(format!(
        "{} strategies x 2 infidelities match 1 − νε within 5 standard errors",
        strategies.len()
    ))
}

fn criterion_9() -> Check {
    let got = required_tests(1.0 / 3.0, 0.01, 0.05).map_err(e2s)?.exact;
    // smallest N with (1 − νε)^N ≤ δ, by repeated multiplication
    let mut oracle = 0u64;
    let mut survive = 1.0f64;
    while survive > 0.05 {
        survive *= 1.0 - 0.01 / 3.0;
        oracle += 1;
    }
    ensure(got == 898 && oracle == 898, || format!("required_tests = {got}, oracle = {oracle}"))?;
    for k in [1, 5] {
        let eps: Vec<f64> = (1..=20).map(|i| 0.005 * i as f64).collect();
        for r in compare_rows(10, k, 0.05, &eps, false).map_err(e2s)? {
            let ok = r.global < r.adaptive
                && r.adaptive < r.nonadaptive
                && (r.adaptive / r.global - 9.0).abs() < 1e-9
                && (r.nonadaptive / r.global - 18.0).abs() < 1e-9;
            ensure(ok, || format!("k={k}: {r:?}"))?;
        }
    }
    Ok("N(1/3, 0.01, 0.05) = 898; N_global < 9·N_global = N_adaptive < 18·N_global = N_nonadaptive".into())
}

fn criterion_10() -> Check {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_dicke-verify"))
            .args(["simulate", "--family", "W", "--n", "8", "--M", "10000", "--seed", "7", "--format", "json"])
            .output()
            .map_err(e2s)
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success() && b.status.success(), || {
        String::from_utf8_lossy(&a.stderr).into_owned()
    })?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || "outputs differ".into())?;
    Ok(format!("two runs with seed 7 gave identical {} byte JSON", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("closed-form gaps", criterion_1),
        ("W spectrum", criterion_2),
        ("explicit D_4^2 operator", criterion_3),
        ("Johnson and M2 blocks", criterion_4),
        ("adaptive to nonadaptive conversion", criterion_5),
        ("simulation table", criterion_6),
        ("branch sampler vs Born rule", criterion_7),
        ("worst-case pass probability", criterion_8),
        ("sample counts", criterion_9),
        ("seeded determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {:>2} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
