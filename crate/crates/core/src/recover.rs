//! Recovery by enumerating candidate error vectors.
//!
//! For each `e'` of the chosen weight, in lexicographic support order, the
//! candidate `w'⊕e'` is pushed through the sketch in reverse: outer decode,
//! zero-prefix check on the outer message, then inner decode. The first
//! candidate that passes all three wins.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::analysis;
use crate::bits::BitString;
use crate::codes::LinearCode;
use crate::combinatorics::{binomial_u64, Supports};
use crate::error::{Error, Result};
use crate::lsh::omega;
use crate::rational::{floor_mul, Rational};
use crate::sketch::Sketch;

/// Every length-`k_star` vector of the given weight, lexicographic by support.
pub fn enumerate_errors(k_star: usize, weight: usize) -> Result<impl Iterator<Item = BitString>> {
    if weight > k_star {
        return Err(Error::param(format!(
            "error weight {weight} exceeds k* = {k_star}"
        )));
    }
    Ok(Supports::new(k_star, weight).map(move |s| {
        let mut e = BitString::zeros(k_star);
        for i in s {
            e.set_bit(i, true);
        }
        e
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RecoveryOutcome {
    Recovered(BitString),
    Failure,
}

impl RecoveryOutcome {
    pub fn recovered(&self) -> Option<&BitString> {
        match self {
            RecoveryOutcome::Recovered(w) => Some(w),
            RecoveryOutcome::Failure => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RecoveryReport {
    pub outcome: RecoveryOutcome,
    pub iterations_used: u64,
    pub accepted_weight: Option<usize>,
    /// Candidates whose outer word had no codeword within `t`.
    pub first_decode_failures: u64,
    /// Candidates that passed the prefix check but failed inner decoding.
    pub second_decode_failures: u64,
    /// Accepted candidates whose output differs from the known secret. Only
    /// set by the ground-truth entry points; at most one per report.
    pub false_accepts_observed: u64,
}

impl RecoveryReport {
    fn empty() -> Self {
        Self {
            outcome: RecoveryOutcome::Failure,
            iterations_used: 0,
            accepted_weight: None,
            first_decode_failures: 0,
            second_decode_failures: 0,
            false_accepts_observed: 0,
        }
    }

    pub fn is_success(&self) -> bool {
        matches!(self.outcome, RecoveryOutcome::Recovered(_))
    }

    /// Marks a wrong recovery against the known secret.
    pub fn with_ground_truth(mut self, truth: &BitString) -> Self {
        self.false_accepts_observed = match &self.outcome {
            RecoveryOutcome::Recovered(w) if w != truth => 1,
            _ => 0,
        };
        self
    }

    pub const CSV_HEADER: &'static str =
        "outcome,iterations_used,accepted_weight,false_accepts,wall_ms";

    /// `outcome,iterations_used,accepted_weight,false_accepts,wall_ms`.
    pub fn csv_row(&self, wall_ms: u128) -> String {
        let outcome = match &self.outcome {
            RecoveryOutcome::Recovered(w) => w.to_string(),
            RecoveryOutcome::Failure => "FAIL".to_string(),
        };
        let weight = self
            .accepted_weight
            .map(|w| w.to_string())
            .unwrap_or_default();
        format!(
            "{outcome},{},{weight},{},{wall_ms}",
            self.iterations_used, self.false_accepts_observed
        )
    }
}

impl fmt::Display for RecoveryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            RecoveryOutcome::Recovered(w) => write!(f, "recovered {w}")?,
            RecoveryOutcome::Failure => write!(f, "FAIL")?,
        }
        write!(
            f,
            " (iterations {}, accepted weight {}, outer decode failures {}, inner decode failures {})",
            self.iterations_used,
            self.accepted_weight.map_or("-".to_string(), |w| w.to_string()),
            self.first_decode_failures,
            self.second_decode_failures
        )
    }
}

/// Outcome of pushing one candidate through the reverse pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Attempt {
    OuterDecodeFailed,
    PrefixRejected,
    InnerDecodeFailed,
    Accepted(BitString),
}

/// Precomputed per-sketch state shared by every candidate.
pub struct Recoverer<'a> {
    sketch: &'a Sketch,
    inner: &'a LinearCode,
    outer: &'a LinearCode,
    w_prime: &'a BitString,
    // ss ⊕ Ω(w'), and Ω of each unit vector; Ω is linear so
    // ss ⊕ Ω(w'⊕e') is the base XOR the columns of supp(e').
    base: BitString,
    unit_omegas: Vec<BitString>,
}

impl<'a> Recoverer<'a> {
    pub fn new(
        sketch: &'a Sketch,
        w_prime: &'a BitString,
        inner: &'a LinearCode,
        outer: &'a LinearCode,
    ) -> Result<Self> {
        let p = &sketch.params;
        p.check_codes(inner, outer)?;
        if w_prime.len() != p.k_star {
            return Err(Error::dim("noisy secret length", p.k_star, w_prime.len()));
        }
        if sketch.ss.len() != p.n {
            return Err(Error::dim("sketch length", p.n, sketch.ss.len()));
        }
        if p.n_star >= p.k {
            return Err(Error::param("sketch needs k > n*"));
        }
        let base = sketch.ss.xor(&omega(w_prime, &sketch.index)?)?;
        let unit_omegas = (0..p.k_star)
            .map(|i| {
                let mut unit = BitString::zeros(p.k_star);
                unit.set_bit(i, true);
                omega(&unit, &sketch.index)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            sketch,
            inner,
            outer,
            w_prime,
            base,
            unit_omegas,
        })
    }

    /// Tries the error vector with the given 0-based support.
    pub fn attempt(&self, support: &[usize]) -> Attempt {
        let p = &self.sketch.params;
        let mut c_prime = self.base.clone();
        let mut w_cand = self.w_prime.clone();
        for &i in support {
            c_prime
                .xor_assign(&self.unit_omegas[i])
                .expect("sketch length");
            w_cand.toggle_bit(i);
        }
        let Some(c) = self.outer.decode(&c_prime).expect("sketch length") else {
            return Attempt::OuterDecodeFailed;
        };
        let v_star = self
            .outer
            .invert_message(&c)
            .expect("decoder returns codewords");
        if !v_star.prefix(p.prefix_len()).is_zero() {
            return Attempt::PrefixRejected;
        }
        let v_syn = v_star.suffix(p.n_star);
        let c_star_noisy = v_syn
            .xor(&w_cand.zero_pad_prefix(p.n_star - p.k_star))
            .expect("inner length");
        match self.inner.decode(&c_star_noisy).expect("inner length") {
            Some(c_star) => Attempt::Accepted(
                self.inner
                    .invert_message(&c_star)
                    .expect("decoder returns codewords"),
            ),
            None => Attempt::InnerDecodeFailed,
        }
    }

    fn run_weight(&self, weight: usize, report: &mut RecoveryReport) -> Option<BitString> {
        let mut supports = Supports::new(self.sketch.params.k_star, weight);
        while let Some(support) = supports.advance() {
            report.iterations_used += 1;
            match self.attempt(support) {
                Attempt::OuterDecodeFailed => report.first_decode_failures += 1,
                Attempt::PrefixRejected => {}
                Attempt::InnerDecodeFailed => report.second_decode_failures += 1,
                Attempt::Accepted(w) => return Some(w),
            }
        }
        None
    }
}

fn check_eps_rec(k_star: usize, eps_rec: Rational) -> Result<usize> {
    let lo = Rational::new(1, 2 * k_star.max(1) as u64);
    if eps_rec < lo || eps_rec > Rational::new(1, 2) {
        return Err(Error::param(format!(
            "eps_rec = {eps_rec} outside [{lo}, 1/2]"
        )));
    }
    Ok(floor_mul(k_star, eps_rec))
}

fn assert_iteration_bound(k_star: usize, weight: usize, iterations: u64) {
    let count = binomial_u64(k_star as u64, weight as u64).unwrap_or(u64::MAX);
    assert!(
        iterations <= count,
        "iterations {iterations} exceed C({k_star}, {weight})"
    );
    if 2 * weight <= k_star {
        let bound =
            k_star as f64 * analysis::h2(weight as f64 / k_star as f64).unwrap_or(f64::INFINITY);
        assert!(
            analysis::approx_le((count as f64).log2(), bound),
            "C({k_star}, {weight}) exceeds the entropy bound"
        );
    }
}

/// Enumerates every `e'` of weight `⌊k*·eps_rec⌋` and stops at the first acceptance.
pub fn recover_fixed(
    sketch: &Sketch,
    w_prime: &BitString,
    eps_rec: Rational,
    inner: &LinearCode,
    outer: &LinearCode,
) -> Result<RecoveryReport> {
    let weight = check_eps_rec(sketch.params.k_star, eps_rec)?;
    recover_weight(sketch, w_prime, weight, inner, outer)
}

/// [`recover_fixed`] with the weight given directly.
pub fn recover_weight(
    sketch: &Sketch,
    w_prime: &BitString,
    weight: usize,
    inner: &LinearCode,
    outer: &LinearCode,
) -> Result<RecoveryReport> {
    let k_star = sketch.params.k_star;
    if weight > k_star {
        return Err(Error::param(format!(
            "error weight {weight} exceeds k* = {k_star}"
        )));
    }
    let rec = Recoverer::new(sketch, w_prime, inner, outer)?;
    let mut report = RecoveryReport::empty();
    if let Some(w) = rec.run_weight(weight, &mut report) {
        report.outcome = RecoveryOutcome::Recovered(w);
        report.accepted_weight = Some(weight);
    }
    assert_iteration_bound(k_star, weight, report.iterations_used);
    Ok(report)
}

/// Tries weights `0, 1, …, max_weight` in turn; counters accumulate.
pub fn recover_sweep(
    sketch: &Sketch,
    w_prime: &BitString,
    inner: &LinearCode,
    outer: &LinearCode,
    max_weight: usize,
) -> Result<RecoveryReport> {
    let k_star = sketch.params.k_star;
    if max_weight > k_star / 2 {
        return Err(Error::param(format!(
            "max weight {max_weight} exceeds floor(k*/2) = {}",
            k_star / 2
        )));
    }
    let rec = Recoverer::new(sketch, w_prime, inner, outer)?;
    let mut report = RecoveryReport::empty();
    let mut budget = 0u64;
    for weight in 0..=max_weight {
        budget += binomial_u64(k_star as u64, weight as u64).unwrap_or(u64::MAX);
        if let Some(w) = rec.run_weight(weight, &mut report) {
            report.outcome = RecoveryOutcome::Recovered(w);
            report.accepted_weight = Some(weight);
            break;
        }
    }
    assert!(report.iterations_used <= budget);
    Ok(report)
}

/// Parallel [`recover_fixed`]. The enumeration is split into contiguous rank
/// chunks; the lowest accepting rank wins, so the report equals the
/// sequential one field for field.
pub fn recover_fixed_parallel(
    sketch: &Sketch,
    w_prime: &BitString,
    eps_rec: Rational,
    inner: &LinearCode,
    outer: &LinearCode,
) -> Result<RecoveryReport> {
    let k_star = sketch.params.k_star;
    let weight = check_eps_rec(k_star, eps_rec)?;
    let rec = Recoverer::new(sketch, w_prime, inner, outer)?;
    let total = binomial_u64(k_star as u64, weight as u64)
        .ok_or_else(|| Error::Capacity(format!("C({k_star}, {weight}) overflows u64")))?;
    let chunks = (rayon::current_num_threads() as u64 * 4).clamp(1, total.max(1));
    let chunk_len = total.div_ceil(chunks);
    let best = AtomicU64::new(u64::MAX);

    struct Chunk {
        accepted: Option<(u64, BitString)>,
        iterations: u64,
        first_failures: u64,
        second_failures: u64,
    }

    let results: Vec<Chunk> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * chunk_len;
            let end = (start + chunk_len).min(total);
            let mut out = Chunk {
                accepted: None,
                iterations: 0,
                first_failures: 0,
                second_failures: 0,
            };
            let mut supports = Supports::from_rank(k_star, weight, start);
            let mut rank = start;
            while rank < end {
                if rank > best.load(Ordering::Relaxed) {
                    break;
                }
                let support = supports.advance().expect("rank below total");
                out.iterations += 1;
                match rec.attempt(support) {
                    Attempt::OuterDecodeFailed => out.first_failures += 1,
                    Attempt::PrefixRejected => {}
                    Attempt::InnerDecodeFailed => out.second_failures += 1,
                    Attempt::Accepted(w) => {
                        best.fetch_min(rank, Ordering::Relaxed);
                        out.accepted = Some((rank, w));
                        break;
                    }
                }
                rank += 1;
            }
            out
        })
        .collect();

    // Chunks before the winning one never stop early, so summing them in
    // order reproduces the sequential counters exactly.
    let mut report = RecoveryReport::empty();
    for chunk in results {
        report.iterations_used += chunk.iterations;
        report.first_decode_failures += chunk.first_failures;
        report.second_decode_failures += chunk.second_failures;
        if let Some((_, w)) = chunk.accepted {
            report.outcome = RecoveryOutcome::Recovered(w);
            report.accepted_weight = Some(weight);
            break;
        }
    }
    assert_iteration_bound(k_star, weight, report.iterations_used);
    Ok(report)
}

/// Runs `f` and returns its result with elapsed wall time in milliseconds.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, u128) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_millis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsh::gen_index_vector;
    use crate::rng::SeededRng;
    use crate::sketch::Sketcher;

    fn r(a: u64, b: u64) -> Rational {
        Rational::new(a, b)
    }

    fn setup(seed: u64, eps_ss: Rational) -> (Sketcher, Sketch, BitString, BitString) {
        let s = Sketcher::new(
            LinearCode::bch(4, 2).unwrap(),
            LinearCode::bch(5, 3).unwrap(),
            eps_ss,
        )
        .unwrap();
        let mut rng = SeededRng::new(seed);
        let w = BitString::random(7, &mut rng);
        let index = gen_index_vector(7, 31, &mut rng).unwrap();
        let (sk, trace) = s.sketch_with_trace(&w, &index, &mut rng).unwrap();
        (s, sk, w, trace.w_e)
    }

    #[test]
    fn enumeration_examples() {
        let v: Vec<String> = enumerate_errors(4, 0)
            .unwrap()
            .map(|e| e.to_string())
            .collect();
        assert_eq!(v, vec!["0000"]);
        let v: Vec<String> = enumerate_errors(4, 1)
            .unwrap()
            .map(|e| e.to_string())
            .collect();
        assert_eq!(v, vec!["1000", "0100", "0010", "0001"]);
        let all: std::collections::HashSet<_> = enumerate_errors(16, 4).unwrap().collect();
        assert_eq!(all.len(), 1820);
        assert!(enumerate_errors(4, 5).is_err());
    }

    #[test]
    fn noiseless_recovers_in_one_iteration() {
        let (s, sk, w, _) = setup(11, r(1, 14));
        let rep = recover_fixed(&sk, &w, r(1, 14), s.inner(), s.outer()).unwrap();
        assert_eq!(rep.outcome, RecoveryOutcome::Recovered(w.clone()));
        assert_eq!(rep.iterations_used, 1);
        assert_eq!(rep.accepted_weight, Some(0));
        let rep = recover_sweep(&sk, &w, s.inner(), s.outer(), 3).unwrap();
        assert_eq!(rep.accepted_weight, Some(0));
    }

    #[test]
    fn distance_one_recovers_within_seven_iterations() {
        for seed in 0..20 {
            let (s, sk, w, _) = setup(seed, r(1, 14));
            let mut w_prime = w.clone();
            w_prime.flip(1 + seed as usize % 7);
            let rep = recover_fixed(&sk, &w_prime, r(1, 7), s.inner(), s.outer()).unwrap();
            assert!(rep.iterations_used <= 7);
            // Brute-force oracle: the first candidate in order that passes every stage.
            let rec = Recoverer::new(&sk, &w_prime, s.inner(), s.outer()).unwrap();
            let expected =
                Supports::new(7, 1)
                    .enumerate()
                    .find_map(|(i, supp)| match rec.attempt(&supp) {
                        Attempt::Accepted(x) => Some((i as u64 + 1, x)),
                        _ => None,
                    });
            match expected {
                Some((iters, x)) => {
                    assert_eq!(rep.outcome, RecoveryOutcome::Recovered(x));
                    assert_eq!(rep.iterations_used, iters);
                }
                None => assert_eq!(rep.outcome, RecoveryOutcome::Failure),
            }
        }
    }

    #[test]
    fn exact_cancellation_always_passes_prefix_check() {
        // e' equal to the true disagreement gives φ' = φ, so the outer word is
        // an exact codeword and every stage must succeed.
        for seed in 0..30 {
            let (s, sk, w, w_e) = setup(seed, r(1, 7));
            let mut rng = SeededRng::new(seed + 1000);
            let w_prime = w_e.xor(&BitString::random(7, &mut rng)).unwrap();
            let diff = w_prime.xor(&w_e).unwrap();
            let support: Vec<usize> = diff.one_indices().collect();
            let rec = Recoverer::new(&sk, &w_prime, s.inner(), s.outer()).unwrap();
            assert_eq!(rec.attempt(&support), Attempt::Accepted(w));
        }
    }

    #[test]
    fn sweep_absorbs_inner_radius() {
        let mut ok = 0;
        for seed in 0..40 {
            let (s, sk, w, w_e) = setup(seed, r(1, 14));
            let mut w_prime = w_e.clone();
            w_prime.flip(1);
            w_prime.flip(4);
            let rep = recover_sweep(&sk, &w_prime, s.inner(), s.outer(), 2).unwrap();
            assert!(rep.is_success());
            if rep.outcome == RecoveryOutcome::Recovered(w) {
                ok += 1;
            }
        }
        assert!(ok >= 20, "{ok}");
    }

    #[test]
    fn sweep_rejects_large_weight() {
        let (s, sk, w, _) = setup(1, r(1, 14));
        assert!(recover_sweep(&sk, &w, s.inner(), s.outer(), 4).is_err());
    }

    #[test]
    fn eps_rec_range_and_dimensions() {
        let (s, sk, w, _) = setup(2, r(1, 14));
        assert!(recover_fixed(&sk, &w, r(1, 15), s.inner(), s.outer()).is_err());
        assert!(recover_fixed(&sk, &w, r(3, 5), s.inner(), s.outer()).is_err());
        assert!(matches!(
            recover_fixed(&sk, &BitString::zeros(6), r(1, 7), s.inner(), s.outer()),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            recover_fixed(&sk, &w, r(1, 7), s.outer(), s.inner()),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn deterministic_reports() {
        let (s, sk, w, _) = setup(3, r(1, 7));
        let mut w_prime = w.clone();
        w_prime.flip(2);
        w_prime.flip(5);
        let a = recover_fixed(&sk, &w_prime, r(2, 7), s.inner(), s.outer()).unwrap();
        let b = recover_fixed(&sk, &w_prime, r(2, 7), s.inner(), s.outer()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parallel_matches_sequential() {
        for seed in 0..40 {
            let (s, sk, w, _) = setup(seed, r(1, 7));
            let mut rng = SeededRng::new(seed + 77);
            let w_prime = w.xor(&BitString::random(7, &mut rng)).unwrap();
            for eps in [r(1, 7), r(2, 7), r(3, 7)] {
                let seq = recover_fixed(&sk, &w_prime, eps, s.inner(), s.outer()).unwrap();
                let par = recover_fixed_parallel(&sk, &w_prime, eps, s.inner(), s.outer()).unwrap();
                assert_eq!(seq, par, "seed {seed} eps {eps}");
            }
        }
    }

    #[test]
    fn soundness_of_accepted_candidate() {
        let (mut replayed, mut detoured) = (0, 0);
        for seed in 0..60 {
            let (s, sk, w, w_e) = setup(seed, r(1, 7));
            let mut w_prime = w.clone();
            w_prime.flip(3);
            let rep = recover_sweep(&sk, &w_prime, s.inner(), s.outer(), 3).unwrap();
            if rep.outcome.recovered() != Some(&w) {
                continue;
            }
            let weight = rep.accepted_weight.unwrap();
            let rec = Recoverer::new(&sk, &w_prime, s.inner(), s.outer()).unwrap();
            let support = Supports::new(7, weight)
                .find(|supp| matches!(rec.attempt(supp), Attempt::Accepted(_)))
                .unwrap();
            let mut w_cand = w_prime.clone();
            for &i in &support {
                w_cand.toggle_bit(i);
            }
            let c_prime = sk.ss.xor(&omega(&w_cand, &sk.index).unwrap()).unwrap();
            // Replay the sketch tail from the recovered secret.
            let v_syn = s
                .inner()
                .encode(&w)
                .unwrap()
                .xor(&w_e.zero_pad_prefix(8))
                .unwrap();
            let c = s.outer().encode(&v_syn.zero_pad_prefix(1)).unwrap();
            if crate::bits::hamming_distance(&c, &c_prime).unwrap() <= 3 {
                replayed += 1;
            } else {
                // Otherwise the decoder reached a different zero-prefix
                // codeword and the inner code absorbed the difference.
                let other = s.outer().decode(&c_prime).unwrap().unwrap();
                assert_ne!(other, c);
                let v = s.outer().invert_message(&other).unwrap();
                assert!(v.prefix(1).is_zero());
                let noisy = v.suffix(15).xor(&w_cand.zero_pad_prefix(8)).unwrap();
                assert_eq!(
                    s.inner().decode(&noisy).unwrap(),
                    Some(s.inner().encode(&w).unwrap())
                );
                detoured += 1;
            }
        }
        assert!(
            replayed > 4 * detoured,
            "replayed {replayed}, detoured {detoured}"
        );
    }

    #[test]
    fn csv_row_layout() {
        let (s, sk, w, _) = setup(4, r(1, 14));
        let rep = recover_fixed(&sk, &w, r(1, 14), s.inner(), s.outer())
            .unwrap()
            .with_ground_truth(&w);
        assert_eq!(rep.csv_row(12), format!("{w},1,0,0,12"));
        let fail = RecoveryReport::empty();
        assert_eq!(fail.csv_row(0), "FAIL,0,,0,0");
    }
}
