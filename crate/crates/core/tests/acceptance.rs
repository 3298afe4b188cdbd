//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line and then
//! asserts the same verdict.

use std::time::{Duration, Instant};

use fsketch_core::analysis::{self, approx_eq, RateRegime};
use fsketch_core::codes::LinearCode;
use fsketch_core::experiment::{
    self, BudgetConfig, ComplexityConfig, ConcentrationConfig, CorrectnessConfig,
    FalseAcceptConfig, LshConfig,
};
use fsketch_core::sketch::{validate_params, SketchParams};
use fsketch_core::{BitString, CodeSpec, Rational, SeededRng};

fn verdict(criterion: u32, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {criterion}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn r(a: u64, b: u64) -> Rational {
    Rational::new(a, b)
}

#[test]
fn criterion_1_rv_distance_mean() {
    let start = Instant::now();
    let out = experiment::lsh(&LshConfig {
        k_star: 16,
        distance: 4,
        n: 512,
        trials: 10_000,
        seed: 2024,
    })
    .unwrap();
    let elapsed = start.elapsed();
    let sigma = (512.0f64 * 0.25 * 0.75).sqrt();
    let band = 3.0 * sigma / 100.0;
    let mean = out.summary.statistic;
    let pass = out.summary.reference == 128.0
        && (mean - 128.0).abs() <= band
        && elapsed < Duration::from_secs(5);
    verdict(
        1,
        pass,
        &format!(
            "mean RV distance {mean:.4} vs 128 (band {band:.4}), {:.2?}",
            elapsed
        ),
    );
}

#[test]
fn criterion_2_concentration() {
    let start = Instant::now();
    let out = experiment::concentration(&ConcentrationConfig {
        k_star: 16,
        lengths: vec![128, 512],
        distances: vec![2, 4, 6, 8],
        eps: r(1, 8),
        trials: 100_000,
        seed: 7,
    })
    .unwrap();
    let elapsed = start.elapsed();
    let worst = out
        .rows
        .iter()
        .map(|row| format!("{:.2e}/{:.2e}<= {:.2e}", row.value, row.aux, row.reference))
        .collect::<Vec<_>>()
        .join(" ");
    let pass = out.summary.pass && elapsed < Duration::from_secs(60);
    verdict(
        2,
        pass,
        &format!("tail frequencies {worst}, {:.2?}", elapsed),
    );
}

#[test]
fn criterion_3_round_trip_success() {
    let start = Instant::now();
    let base = CorrectnessConfig {
        inner: CodeSpec::Bch { m: 4, t: 2 },
        outer: CodeSpec::Bch { m: 5, t: 3 },
        eps_ss: r(1, 14),
        max_offset: 2,
        max_weight: None,
        trials: 1000,
        seed: 31,
    };
    let one = experiment::correctness(&base).unwrap();
    let three = experiment::correctness(&CorrectnessConfig {
        outer: CodeSpec::Random { n: 31, k: 18 },
        ..base
    })
    .unwrap();
    let elapsed = start.elapsed();
    let pass = one.summary.pass
        && three.summary.pass
        && one.summary.reference == 0.5
        && three.summary.reference == 0.875
        && elapsed < Duration::from_secs(120);
    verdict(
        3,
        pass,
        &format!(
            "success {:.3} (floor 0.5, prefix 1) and {:.3} (floor 0.875, prefix 3), {:.2?}",
            one.summary.statistic, three.summary.statistic, elapsed
        ),
    );
}

#[test]
fn criterion_4_false_accept_rate() {
    let mut parts = Vec::new();
    let mut pass = true;
    for prefix_len in [1, 3, 6] {
        let out = experiment::false_accept(&FalseAcceptConfig {
            k_star: 16,
            n: 64,
            prefix_len,
            trials: 100,
            iterations_per_trial: 100,
            seed: 99 + prefix_len as u64,
        })
        .unwrap();
        pass &= out.summary.pass;
        parts.push(format!(
            "k-n*={prefix_len}: {:.4} vs {:.4}",
            out.summary.statistic, out.summary.reference
        ));
    }
    verdict(4, pass, &parts.join(", "));
}

#[test]
fn criterion_5_iteration_counts() {
    let out = experiment::complexity(&ComplexityConfig {
        k_stars: vec![8, 12, 16],
        eps_recs: vec![r(1, 8), r(1, 4), r(1, 2)],
        trials: 4,
        seed: 5,
    })
    .unwrap();
    // Independent oracle: C(k, j) by Pascal's rule.
    let mut pascal = vec![vec![1u64]];
    for k in 1..=16usize {
        let prev = &pascal[k - 1];
        let row: Vec<u64> = (0..=k)
            .map(|j| {
                if j == 0 || j == k {
                    1
                } else {
                    prev[j - 1] + prev[j]
                }
            })
            .collect();
        pascal.push(row);
    }
    let mut pass = out.summary.pass;
    let mut cells = Vec::new();
    for (cell, rows) in out.rows.chunks(4).enumerate() {
        let k = [8usize, 12, 16][cell / 3];
        let (num, den) = [(1usize, 8usize), (1, 4), (1, 2)][cell % 3];
        let expected = pascal[k][k * num / den];
        let max = rows.iter().map(|row| row.value as u64).max().unwrap();
        let h = analysis::h2(num as f64 / den as f64).unwrap();
        pass &= max == expected && (expected as f64).log2() <= k as f64 * h + 1e-9;
        cells.push(format!("k*={k},eps={num}/{den}: {max}={expected}"));
    }
    verdict(5, pass, &cells.join(" "));
}

/// Standard BCH generator polynomials from octal tables.
const GENERATORS: [(usize, usize, usize, u64); 3] =
    [(7, 4, 1, 0o13), (15, 7, 2, 0o721), (31, 16, 3, 0o107657)];

fn cyclic_codewords(n: usize, k: usize, g: u64) -> Vec<u64> {
    (0..1u64 << k)
        .map(|m| {
            let mut c = 0u64;
            for i in 0..k {
                if m >> i & 1 == 1 {
                    c ^= g << i;
                }
            }
            debug_assert!(c >> n == 0);
            c
        })
        .collect()
}

fn to_mask(b: &BitString) -> u64 {
    b.iter()
        .enumerate()
        .fold(0, |acc, (i, bit)| acc | (bit as u64) << i)
}

fn from_mask(mask: u64, n: usize) -> BitString {
    BitString::from_positions(n, (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1)).unwrap()
}

#[test]
fn criterion_6_decoder_matches_bruteforce() {
    use rand::Rng;
    use rayon::prelude::*;
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for (m, &(n, k, t, g)) in (3u32..).zip(GENERATORS.iter()) {
        let code = LinearCode::bch(m, t).unwrap();
        assert_eq!((code.n(), code.k()), (n, k));
        let codewords = cyclic_codewords(n, k, g);
        let inputs: Vec<u64> = if n == 7 {
            (0..128).collect()
        } else {
            let mut rng = SeededRng::new(600 + m as u64);
            (0..10_000)
                .map(|_| rng.gen::<u64>() & ((1u64 << n) - 1))
                .collect()
        };
        mismatches += inputs
            .par_iter()
            .filter(|&&x| {
                let (best, dist) = codewords
                    .iter()
                    .map(|&c| (c, (c ^ x).count_ones() as usize))
                    .min_by_key(|&(_, d)| d)
                    .unwrap();
                let oracle = (dist <= t).then_some(best);
                let got = code.decode(&from_mask(x, n)).unwrap().map(|c| to_mask(&c));
                got != oracle
            })
            .count();
        checked += inputs.len();
    }
    verdict(
        6,
        mismatches == 0,
        &format!("{mismatches} mismatches over {checked} inputs"),
    );
}

#[test]
fn criterion_7_bound_identities() {
    let mut pass = true;
    let mut notes = Vec::new();

    // 1 − h2(1/(2k*)) < 1 at the smallest admissible rate.
    for k_star in 1..=64usize {
        let eps = r(1, 2 * k_star as u64);
        let b = analysis::rate_bounds(k_star, k_star + 1, k_star, eps, eps).unwrap();
        let x = 1.0 / (2.0 * k_star as f64);
        let closed = 1.0 + x * x.log2() + (1.0 - x) * (1.0 - x).log2();
        pass &= approx_eq(b.shannon_ub, closed) && b.shannon_ub < 1.0;
    }
    notes.push("shannon bound < 1 for k*=1..64");

    // ⌊k*/2⌋ worst-case tolerance at ε_ss = ξ = 1/4.
    for k_star in 1..=64usize {
        let th = analysis::thresholds(k_star, 100, r(1, 4), r(1, 4)).unwrap();
        pass &= th.t_plus == (k_star / 2) as u64 && th.t_plus == (2 * k_star / 4) as u64;
    }
    notes.push("t_plus = floor(k*/2)");

    // exp(−1) < 1/2 at n = 2k*², ε = 1/(2k*), k − n* = 1.
    for k_star in 1..=32usize {
        let n = 2 * k_star * k_star;
        let eps = r(1, 2 * k_star as u64);
        let h = analysis::hoeffding_bound(n, eps);
        let half = analysis::false_accept_rate(k_star + 1, k_star).unwrap();
        pass &= approx_eq(h, (-1f64).exp()) && h < half && half == 0.5;
        pass &= analysis::residual_entropy_bound(n, eps, k_star + 1, k_star)
            .unwrap()
            .floor
            == 1;
        let params = SketchParams {
            k_star,
            n_star: k_star,
            k: k_star + 1,
            n,
            eps_ss: eps,
        };
        pass &= validate_params(&params, None).concentration_ok;
    }
    notes.push("exp(-1) < 1/2 at n = 2k*^2");

    let c = analysis::efficiency_bound_check(16, r(1, 2), 32, 16).unwrap();
    pass &= c.holds && c.lhs == 16.0 && c.rhs == 16;
    let c = analysis::efficiency_bound_check(7, r(1, 7), 16, 15).unwrap();
    pass &= !c.holds && approx_eq(c.lhs, 7.0 * analysis::h2(1.0 / 7.0).unwrap());
    let b = analysis::rate_bounds(16, 20, 16, r(1, 16), r(1, 8)).unwrap();
    pass &= b.regime == RateRegime::AboveShannon && b.rate == r(3, 4);
    notes.push("efficiency boundary and regime report");

    verdict(7, pass, &notes.join("; "));
}

#[test]
fn criterion_8_budget_and_sketch_length() {
    let out = experiment::budget(&BudgetConfig {
        cases: experiment::default_budget_cases(),
        trials: 200,
        seed: 8,
    })
    .unwrap();
    let covered = out.rows.iter().all(|row| row.aux == 1.0);
    let lengths = experiment::sketch_length_report(&[8, 10, 12], r(1, 8)).unwrap();
    let table = lengths
        .iter()
        .map(|s| format!("k*={} -> n={}", s.k_star, s.n))
        .collect::<Vec<_>>()
        .join(", ");
    for s in &lengths {
        println!(
            "sketch length: k*={} prefix={} n={}",
            s.k_star, s.prefix_len, s.n
        );
    }
    let exponential = lengths.iter().all(|s| {
        let floor = 2f64.powf(s.k_star as f64 * analysis::h2(0.25).unwrap()) - 1.0;
        s.n as f64 >= floor
    });
    let pass = out.summary.pass
        && covered
        && exponential
        && lengths.iter().map(|s| s.n).eq([127, 511, 1023]);
    verdict(
        8,
        pass,
        &format!(
            "max iterations/(n+1) = {:.3} over {} runs; {table}",
            out.summary.statistic,
            out.rows.len()
        ),
    );
}
