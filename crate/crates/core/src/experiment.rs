//! Seeded Monte-Carlo harnesses.
//!
//! Every experiment is a pure function of its config. Trial `i` draws from
//! `SeededRng::new(seed ^ i)`, trials run on the rayon pool, and rows come
//! back ordered by trial index, so output is identical across runs and
//! thread counts.

use std::fmt;

use rayon::prelude::*;
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::analysis::{self, approx_le};
use crate::bits::BitString;
use crate::codes::{CodeSpec, LinearCode};
use crate::combinatorics::{binomial_u64, Supports};
use crate::error::{Error, Result};
use crate::lsh::{gen_index_vector, omega};
use crate::rational::{floor_mul, Rational};
use crate::recover::{recover_fixed, recover_sweep};
use crate::rng::SeededRng;
use crate::sketch::{streams, Sketcher};

/// Extra stream for the offset applied to the noisy reading.
const OFFSET_STREAM: u64 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Lsh,
    Concentration,
    Correctness,
    FalseAccept,
    Complexity,
    Budget,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Lsh => "lsh",
            ExperimentKind::Concentration => "concentration",
            ExperimentKind::Correctness => "correctness",
            ExperimentKind::FalseAccept => "false_accept",
            ExperimentKind::Complexity => "complexity",
            ExperimentKind::Budget => "budget",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One output row. Column meaning depends on the experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub trial: u64,
    pub trial_seed: u64,
    pub value: f64,
    pub aux: f64,
    pub reference: f64,
    pub verdict: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub statistic: f64,
    pub reference: f64,
    pub tolerance: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutput {
    pub kind: ExperimentKind,
    /// Space-separated `key=value` pairs that reproduce the run.
    pub config: String,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl ExperimentOutput {
    pub fn failed_rows(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.verdict == Some(false))
    }
}

fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed ^ trial
}

fn require_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    Ok(())
}

/// Secret and noisy reading at an exact distance.
fn pair_at_distance(
    k_star: usize,
    distance: usize,
    rng: &mut SeededRng,
) -> Result<(BitString, BitString)> {
    if distance > k_star {
        return Err(Error::param(format!(
            "distance {distance} exceeds k* = {k_star}"
        )));
    }
    let w = BitString::random(k_star, rng);
    let mut w_prime = w.clone();
    for i in rand::seq::index::sample(rng, k_star, distance) {
        w_prime.toggle_bit(i);
    }
    Ok((w, w_prime))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LshConfig {
    pub k_star: usize,
    pub distance: usize,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Resilient-vector distance over fresh index vectors. Passes when the mean
/// is within `3σ/√trials` of `n·d/k*`.
pub fn lsh(cfg: &LshConfig) -> Result<ExperimentOutput> {
    require_trials(cfg.trials)?;
    let (w, w_prime) = pair_at_distance(cfg.k_star, cfg.distance, &mut SeededRng::new(cfg.seed))?;
    let diff = w.xor(&w_prime)?;
    let p = cfg.distance as f64 / cfg.k_star as f64;
    let reference = cfg.n as f64 * p;
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(cfg.seed, trial);
            let index = gen_index_vector(cfg.k_star, cfg.n, &mut SeededRng::new(seed))?;
            let d = omega(&diff, &index)?.weight() as f64;
            Ok(Row {
                trial,
                trial_seed: seed,
                value: d,
                aux: d - reference,
                reference,
                verdict: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = rows.iter().map(|r| r.value).sum::<f64>() / cfg.trials as f64;
    let sigma = (cfg.n as f64 * p * (1.0 - p)).sqrt();
    let band = 3.0 * sigma / (cfg.trials as f64).sqrt();
    Ok(ExperimentOutput {
        kind: ExperimentKind::Lsh,
        config: format!(
            "kind=lsh k_star={} distance={} n={} trials={} seed={}",
            cfg.k_star, cfg.distance, cfg.n, cfg.trials, cfg.seed
        ),
        rows,
        summary: Summary {
            statistic: mean,
            reference,
            tolerance: format!("|mean - ref| <= 3 sigma/sqrt(T) = {band:.6}"),
            pass: (mean - reference).abs() <= band,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConcentrationConfig {
    pub k_star: usize,
    pub lengths: Vec<usize>,
    pub distances: Vec<usize>,
    pub eps: Rational,
    pub trials: u64,
    pub seed: u64,
}

/// Tail frequencies of the resilient-vector distance around its mean.
///
/// One row per `(n, d)` cell: `value` is the frequency of distance
/// `<= n(ξ−ε)`, `aux` the frequency of distance `>= n(ξ+ε)` with
/// `ξ = d/k*`, and `reference` is `exp(−2nε²)`. A cell passes when both
/// frequencies are at most the reference plus two binomial standard errors.
pub fn concentration(cfg: &ConcentrationConfig) -> Result<ExperimentOutput> {
    require_trials(cfg.trials)?;
    let mut rows = Vec::new();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut cell = 0u64;
    for &n in &cfg.lengths {
        for &d in &cfg.distances {
            let xi = Rational::new(d as u64, cfg.k_star as u64);
            let th = analysis::thresholds(cfg.k_star, n, xi, cfg.eps)?;
            let (w, w_prime) =
                pair_at_distance(cfg.k_star, d, &mut SeededRng::new(cfg.seed ^ (cell << 40)))?;
            let diff = w.xor(&w_prime)?;
            let base = cell * cfg.trials;
            let (low, high) = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let index = gen_index_vector(
                        cfg.k_star,
                        n,
                        &mut SeededRng::new(trial_seed(cfg.seed, base + t)),
                    )
                    .expect("validated dimensions");
                    let x = Rational::from_integer(
                        omega(&diff, &index).expect("validated dimensions").weight() as u64,
                    );
                    ((x <= th.t_max) as u64, (x >= th.t_min) as u64)
                })
                .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
            let bound = analysis::hoeffding_bound(n, cfg.eps);
            let se = (bound * (1.0 - bound) / cfg.trials as f64).sqrt();
            let (lo_f, hi_f) = (
                low as f64 / cfg.trials as f64,
                high as f64 / cfg.trials as f64,
            );
            let limit = bound + 2.0 * se;
            worst_excess = worst_excess.max(lo_f.max(hi_f) - limit);
            rows.push(Row {
                trial: cell,
                trial_seed: trial_seed(cfg.seed, base),
                value: lo_f,
                aux: hi_f,
                reference: bound,
                verdict: Some(lo_f <= limit && hi_f <= limit),
            });
            cell += 1;
        }
    }
    let pass = rows.iter().all(|r| r.verdict == Some(true));
    Ok(ExperimentOutput {
        kind: ExperimentKind::Concentration,
        config: format!(
            "kind=concentration k_star={} lengths={} distances={} eps={} trials={} seed={}",
            cfg.k_star,
            join(&cfg.lengths),
            join(&cfg.distances),
            cfg.eps,
            cfg.trials,
            cfg.seed
        ),
        rows,
        summary: Summary {
            statistic: worst_excess,
            reference: 0.0,
            tolerance: "max over cells of freq - (bound + 2 SE) <= 0".to_string(),
            pass,
        },
    })
}

fn join(xs: &[usize]) -> String {
    xs.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorrectnessConfig {
    pub inner: CodeSpec,
    pub outer: CodeSpec,
    pub eps_ss: Rational,
    /// Largest `‖w_e ⊕ w'‖`; each trial draws an offset weight in `0..=max_offset`.
    pub max_offset: usize,
    /// Sweep cap; `None` means `⌊k*/2⌋`.
    pub max_weight: Option<usize>,
    pub trials: u64,
    pub seed: u64,
}

/// Seeded round trips. `value` is 1 when the exact secret comes back, `aux`
/// the iterations used, `reference` the floor `1 − 2^{−(k−n*)}`. Passes
/// unless a one-sided binomial test at the 1% level rejects
/// "success rate >= floor".
pub fn correctness(cfg: &CorrectnessConfig) -> Result<ExperimentOutput> {
    require_trials(cfg.trials)?;
    let master = SeededRng::new(cfg.seed);
    let inner = cfg.inner.build(&mut master.derive(streams::INNER_CODE))?;
    let outer = cfg.outer.build(&mut master.derive(streams::OUTER_CODE))?;
    let sketcher = Sketcher::new(inner, outer, cfg.eps_ss)?;
    let p = *sketcher.params();
    let max_weight = cfg.max_weight.unwrap_or(p.k_star / 2);
    if cfg.max_offset > p.k_star {
        return Err(Error::param("offset exceeds k*"));
    }
    let floor = 1.0 - analysis::false_accept_rate(p.k, p.n_star)?;
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(cfg.seed, trial);
            let rng = SeededRng::new(seed);
            let w = BitString::random(p.k_star, &mut rng.derive(streams::SECRET));
            let index = gen_index_vector(p.k_star, p.n, &mut rng.derive(streams::INDEX_VECTOR))?;
            let (sk, trace) =
                sketcher.sketch_with_trace(&w, &index, &mut rng.derive(streams::ERROR))?;
            let mut off_rng = rng.derive(OFFSET_STREAM);
            let weight = rand::Rng::gen_range(&mut off_rng, 0..=cfg.max_offset);
            let mut w_prime = trace.w_e.clone();
            for i in rand::seq::index::sample(&mut off_rng, p.k_star, weight) {
                w_prime.toggle_bit(i);
            }
            let report = recover_sweep(
                &sk,
                &w_prime,
                sketcher.inner(),
                sketcher.outer(),
                max_weight,
            )?
            .with_ground_truth(&w);
            let ok = report.outcome.recovered() == Some(&w);
            Ok(Row {
                trial,
                trial_seed: seed,
                value: ok as u8 as f64,
                aux: report.iterations_used as f64,
                reference: floor,
                verdict: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let successes = rows.iter().filter(|r| r.value == 1.0).count() as u64;
    let p_value = binomial_lower_tail(successes, cfg.trials, floor);
    Ok(ExperimentOutput {
        kind: ExperimentKind::Correctness,
        config: format!(
            "kind=correctness inner={} outer={} eps_ss={} max_offset={} max_weight={} trials={} seed={}",
            cfg.inner, cfg.outer, cfg.eps_ss, cfg.max_offset, max_weight, cfg.trials, cfg.seed
        ),
        rows,
        summary: Summary {
            statistic: successes as f64 / cfg.trials as f64,
            reference: floor,
            tolerance: format!("one-sided binomial test at 99%: P(X <= {successes}) = {p_value:.3e} >= 0.01"),
            pass: p_value >= 0.01,
        },
    })
}

/// `P(X <= successes)` for `X ~ Bin(trials, p)`.
pub fn binomial_lower_tail(successes: u64, trials: u64, p: f64) -> f64 {
    match Binomial::new(p, trials) {
        Ok(dist) => dist.cdf(successes),
        Err(_) => f64::NAN,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FalseAcceptConfig {
    pub k_star: usize,
    pub n: usize,
    /// `k − n*`.
    pub prefix_len: usize,
    /// Fresh code pairs.
    pub trials: u64,
    /// Decoy candidates per code pair, taken from the weight-2 enumeration.
    pub iterations_per_trial: u64,
    pub seed: u64,
}

/// Zero-prefix acceptance rate of decoy candidates against random outer
/// codes. `t = 0` random codes almost never decode a decoy, so the outer
/// message is read off an information set instead. Per-trial `value` is the
/// acceptance count, `aux` the candidates tried. Passes when the pooled rate
/// is within a factor of two of `2^{−(k−n*)}`.
pub fn false_accept(cfg: &FalseAcceptConfig) -> Result<ExperimentOutput> {
    require_trials(cfg.trials)?;
    let k_star = cfg.k_star;
    let k = k_star + cfg.prefix_len;
    let available = binomial_u64(k_star as u64, 2).unwrap_or(u64::MAX);
    if cfg.iterations_per_trial > available {
        return Err(Error::param(format!(
            "only {available} weight-2 candidates exist for k* = {k_star}"
        )));
    }
    let reference = analysis::false_accept_rate(k, k_star)?;
    let eps_ss = Rational::new(1, 2 * k_star as u64);
    let rows = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(cfg.seed, trial);
            let rng = SeededRng::new(seed);
            let inner = LinearCode::random(k_star, k_star, &mut rng.derive(streams::INNER_CODE))?;
            let outer = LinearCode::random(cfg.n, k, &mut rng.derive(streams::OUTER_CODE))?;
            let sketcher = Sketcher::new(inner, outer, eps_ss)?;
            let mut secret_rng = rng.derive(streams::SECRET);
            let w = BitString::random(k_star, &mut secret_rng);
            let decoy = BitString::random(k_star, &mut secret_rng);
            let index = gen_index_vector(k_star, cfg.n, &mut rng.derive(streams::INDEX_VECTOR))?;
            let sk = sketcher.sketch(&w, &index, &mut rng.derive(streams::ERROR))?;
            let mut accepted = 0u64;
            for support in Supports::new(k_star, 2).take(cfg.iterations_per_trial as usize) {
                let mut cand = decoy.clone();
                for i in support {
                    cand.toggle_bit(i);
                }
                let c_prime = sk.ss.xor(&omega(&cand, &sk.index)?)?;
                let msg = sketcher.outer().information_set_message(&c_prime);
                accepted += msg.prefix(cfg.prefix_len).is_zero() as u64;
            }
            Ok(Row {
                trial,
                trial_seed: seed,
                value: accepted as f64,
                aux: cfg.iterations_per_trial as f64,
                reference,
                verdict: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let accepted: f64 = rows.iter().map(|r| r.value).sum();
    let total = (cfg.trials * cfg.iterations_per_trial) as f64;
    let rate = accepted / total;
    Ok(ExperimentOutput {
        kind: ExperimentKind::FalseAccept,
        config: format!(
            "kind=false_accept k_star={} n={} prefix_len={} trials={} iterations_per_trial={} seed={}",
            k_star, cfg.n, cfg.prefix_len, cfg.trials, cfg.iterations_per_trial, cfg.seed
        ),
        rows,
        summary: Summary {
            statistic: rate,
            reference,
            tolerance: format!("ref/2 <= rate <= 2 ref over {total} candidates"),
            pass: rate >= reference / 2.0 && rate <= 2.0 * reference,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexityConfig {
    pub k_stars: Vec<usize>,
    pub eps_recs: Vec<Rational>,
    pub trials: u64,
    pub seed: u64,
}

/// Iteration counts of fixed-weight recovery against decoy readings, which
/// exhaust the enumeration. One row per trial and grid cell: `value` is the
/// iteration count, `reference` is `C(k*, ⌊k*ε⌋)`, `aux` is `k*·h2(ε)`. A
/// cell passes when its maximum equals the reference and
/// `log2(reference) <= aux`.
pub fn complexity(cfg: &ComplexityConfig) -> Result<ExperimentOutput> {
    require_trials(cfg.trials)?;
    let mut rows = Vec::new();
    let mut cell = 0u64;
    let mut all_pass = true;
    let mut worst_ratio = 0.0f64;
    for &k_star in &cfg.k_stars {
        for &eps in &cfg.eps_recs {
            let weight = floor_mul(k_star, eps);
            let count = binomial_u64(k_star as u64, weight as u64)
                .ok_or_else(|| Error::Capacity("enumeration too large".into()))?;
            let log2_bound = analysis::support_size(k_star, eps)?.log2_bound;
            let base = cell * cfg.trials;
            let mut cell_rows = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = trial_seed(cfg.seed, base + t);
                    let rng = SeededRng::new(seed);
                    let inner =
                        LinearCode::random(k_star, k_star, &mut rng.derive(streams::INNER_CODE))?;
                    let outer = LinearCode::random(
                        4 * k_star,
                        2 * k_star,
                        &mut rng.derive(streams::OUTER_CODE),
                    )?;
                    let sketcher =
                        Sketcher::new(inner, outer, Rational::new(1, 2 * k_star as u64))?;
                    let mut secret_rng = rng.derive(streams::SECRET);
                    let w = BitString::random(k_star, &mut secret_rng);
                    let decoy = BitString::random(k_star, &mut secret_rng);
                    let index = gen_index_vector(
                        k_star,
                        4 * k_star,
                        &mut rng.derive(streams::INDEX_VECTOR),
                    )?;
                    let sk = sketcher.sketch(&w, &index, &mut rng.derive(streams::ERROR))?;
                    let report =
                        recover_fixed(&sk, &decoy, eps, sketcher.inner(), sketcher.outer())?;
                    Ok(Row {
                        trial: base + t,
                        trial_seed: seed,
                        value: report.iterations_used as f64,
                        aux: log2_bound,
                        reference: count as f64,
                        verdict: None,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let max = cell_rows.iter().map(|r| r.value as u64).max().unwrap_or(0);
            let ok = max == count && approx_le((count as f64).log2(), log2_bound);
            all_pass &= ok;
            worst_ratio = worst_ratio.max((count as f64).log2() - log2_bound);
            for row in &mut cell_rows {
                row.verdict = Some(row.value as u64 <= count);
            }
            if let Some(last) = cell_rows.last_mut() {
                last.verdict = Some(ok);
            }
            rows.extend(cell_rows);
            cell += 1;
        }
    }
    Ok(ExperimentOutput {
        kind: ExperimentKind::Complexity,
        config: format!(
            "kind=complexity k_stars={} eps_recs={} trials={} seed={}",
            join(&cfg.k_stars),
            cfg.eps_recs
                .iter()
                .map(Rational::to_string)
                .collect::<Vec<_>>()
                .join(","),
            cfg.trials,
            cfg.seed
        ),
        rows,
        summary: Summary {
            statistic: worst_ratio,
            reference: 0.0,
            tolerance:
                "max iterations == C(k*, floor(k* eps)) and log2 C <= k* h2(eps) in every cell"
                    .to_string(),
            pass: all_pass,
        },
    })
}

/// A configuration where the outer BCH code has `n + 1 = 2^{k−n*}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetCase {
    pub inner: CodeSpec,
    pub outer: CodeSpec,
    pub eps_ss: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetConfig {
    pub cases: Vec<BudgetCase>,
    pub trials: u64,
    pub seed: u64,
}

/// Iterations of fixed-weight recovery at `ε_rec = 2ε_ss` against honest and
/// decoy readings. `value` is iterations, `reference` is `n + 1`, `aux` is 1
/// when the case satisfies the budget predicate. Rows fail when the
/// predicate holds and iterations exceed `n + 1`.
pub fn budget(cfg: &BudgetConfig) -> Result<ExperimentOutput> {
    require_trials(cfg.trials)?;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (case_idx, case) in cfg.cases.iter().enumerate() {
        let master = SeededRng::new(cfg.seed ^ ((case_idx as u64) << 40));
        let inner = case.inner.build(&mut master.derive(streams::INNER_CODE))?;
        let outer = case.outer.build(&mut master.derive(streams::OUTER_CODE))?;
        let sketcher = Sketcher::new(inner, outer, case.eps_ss)?;
        let p = *sketcher.params();
        let covered = analysis::bch_budget_covers(p.k_star, p.eps_ss, p.k, p.n_star, p.n)?;
        let eps_rec = p.eps_ss * 2;
        let base = case_idx as u64 * cfg.trials;
        let case_rows = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.seed, base + t);
                let rng = SeededRng::new(seed);
                let mut secret_rng = rng.derive(streams::SECRET);
                let w = BitString::random(p.k_star, &mut secret_rng);
                // Even trials use a decoy, odd trials a reading at distance 1.
                let w_prime = if t % 2 == 0 {
                    BitString::random(p.k_star, &mut secret_rng)
                } else {
                    let mut x = w.clone();
                    x.toggle_bit(rand::Rng::gen_range(&mut secret_rng, 0..p.k_star));
                    x
                };
                let index =
                    gen_index_vector(p.k_star, p.n, &mut rng.derive(streams::INDEX_VECTOR))?;
                let sk = sketcher.sketch(&w, &index, &mut rng.derive(streams::ERROR))?;
                let report =
                    recover_fixed(&sk, &w_prime, eps_rec, sketcher.inner(), sketcher.outer())?;
                let iterations = report.iterations_used as f64;
                let limit = (p.n + 1) as f64;
                Ok(Row {
                    trial: base + t,
                    trial_seed: seed,
                    value: iterations,
                    aux: covered as u8 as f64,
                    reference: limit,
                    verdict: Some(!covered || iterations <= limit),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        for r in &case_rows {
            worst = worst.max(r.value / r.reference);
        }
        rows.extend(case_rows);
    }
    let pass = rows.iter().all(|r| r.verdict == Some(true));
    let cases = cfg
        .cases
        .iter()
        .map(|c| format!("{}/{}/{}", c.inner, c.outer, c.eps_ss))
        .collect::<Vec<_>>()
        .join(",");
    Ok(ExperimentOutput {
        kind: ExperimentKind::Budget,
        config: format!(
            "kind=budget cases={cases} trials={} seed={}",
            cfg.trials, cfg.seed
        ),
        rows,
        summary: Summary {
            statistic: worst,
            reference: 1.0,
            tolerance: "iterations <= n + 1 whenever the budget predicate holds".to_string(),
            pass,
        },
    })
}

/// Sketch length forced by a BCH outer code whose prefix budget covers the
/// doubled error rate, for each `k*`.
pub fn sketch_length_report(
    k_stars: &[usize],
    eps_ss: Rational,
) -> Result<Vec<analysis::SketchLength>> {
    k_stars
        .iter()
        .map(|&k| analysis::min_bch_sketch_length(k, eps_ss))
        .collect()
}

/// The cases used by default for the budget experiment.
pub fn default_budget_cases() -> Vec<BudgetCase> {
    vec![
        BudgetCase {
            inner: CodeSpec::Bch { m: 3, t: 1 },
            outer: CodeSpec::Bch { m: 4, t: 1 },
            eps_ss: Rational::new(1, 4),
        },
        BudgetCase {
            inner: CodeSpec::Random { n: 21, k: 8 },
            outer: CodeSpec::Bch { m: 5, t: 1 },
            eps_ss: Rational::new(1, 16),
        },
        BudgetCase {
            inner: CodeSpec::Random { n: 51, k: 10 },
            outer: CodeSpec::Bch { m: 6, t: 1 },
            eps_ss: Rational::new(1, 16),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: u64, b: u64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn lsh_is_reproducible_and_centered() {
        let cfg = LshConfig {
            k_star: 16,
            distance: 4,
            n: 128,
            trials: 2000,
            seed: 3,
        };
        let a = lsh(&cfg).unwrap();
        let b = lsh(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.summary.pass, "{:?}", a.summary);
        assert_eq!(a.rows.len(), 2000);
        assert!(a.rows.windows(2).all(|w| w[0].trial < w[1].trial));
        assert_eq!(a.rows[5].trial_seed, 3 ^ 5);
    }

    #[test]
    fn binomial_tail() {
        assert!((binomial_lower_tail(5, 10, 0.5) - 0.623046875).abs() < 1e-12);
        assert!(binomial_lower_tail(10, 10, 0.5) > 0.999);
        assert!(binomial_lower_tail(0, 1000, 0.5) < 1e-12);
    }

    #[test]
    fn small_correctness_run() {
        let cfg = CorrectnessConfig {
            inner: CodeSpec::Bch { m: 4, t: 2 },
            outer: CodeSpec::Bch { m: 5, t: 3 },
            eps_ss: r(1, 14),
            max_offset: 2,
            max_weight: None,
            trials: 100,
            seed: 1,
        };
        let out = correctness(&cfg).unwrap();
        assert_eq!(out.rows.len(), 100);
        assert_eq!(out.summary.reference, 0.5);
        assert_eq!(out, correctness(&cfg).unwrap());
    }

    #[test]
    fn complexity_cell_counts() {
        let cfg = ComplexityConfig {
            k_stars: vec![8],
            eps_recs: vec![r(1, 4)],
            trials: 3,
            seed: 2,
        };
        let out = complexity(&cfg).unwrap();
        assert!(out.summary.pass);
        assert!(out.rows.iter().all(|row| row.reference == 28.0));
    }

    #[test]
    fn sketch_lengths() {
        let lens: Vec<u128> = sketch_length_report(&[8, 10, 12], r(1, 8))
            .unwrap()
            .iter()
            .map(|s| s.n)
            .collect();
        assert_eq!(lens, vec![127, 511, 1023]);
    }

    #[test]
    fn rejects_zero_trials() {
        assert!(lsh(&LshConfig {
            k_star: 4,
            distance: 1,
            n: 8,
            trials: 0,
            seed: 0
        })
        .is_err());
    }
}
