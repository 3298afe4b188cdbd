//! Closed-form bound calculators.
//!
//! Counts and thresholds are exact. Floats appear only where a value needs
//! `exp` or `log`; comparisons involving them use [`REL_TOL`].

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::rational::{floor_mul, to_f64, Rational};

/// Relative tolerance for float comparisons.
pub const REL_TOL: f64 = 1e-12;

/// `a <= b` up to [`REL_TOL`].
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * a.abs().max(b.abs()).max(1.0)
}

pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Binary entropy in bits, with `h2(0) = h2(1) = 0`.
pub fn h2(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("h2 needs 0 <= x <= 1, got {x}")));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(x) + term(1.0 - x))
}

pub fn h2_rational(x: Rational) -> Result<f64> {
    if x > Rational::from_integer(1) {
        return Err(Error::Domain(format!("h2 needs 0 <= x <= 1, got {x}")));
    }
    h2(to_f64(x))
}

/// `exp(−2nε²)`.
pub fn hoeffding_bound(n: usize, eps: Rational) -> f64 {
    (-2.0 * n as f64 * to_f64(eps).powi(2)).exp()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportSize {
    pub weight: usize,
    /// `C(k*, ⌊k*·ε⌋)`.
    pub exact: BigUint,
    /// `k*·h2(ε)`, the base-2 log of the entropy bound.
    pub log2_bound: f64,
}

impl SupportSize {
    pub fn exact_log2(&self) -> f64 {
        big_log2(&self.exact)
    }

    pub fn within_bound(&self) -> bool {
        approx_le(self.exact_log2(), self.log2_bound)
    }
}

pub fn support_size(k_star: usize, eps: Rational) -> Result<SupportSize> {
    if eps > Rational::new(1, 2) {
        return Err(Error::Domain(format!(
            "support size needs 0 <= eps <= 1/2, got {eps}"
        )));
    }
    let weight = floor_mul(k_star, eps);
    Ok(SupportSize {
        weight,
        exact: binomial(k_star as u64, weight as u64),
        log2_bound: k_star as f64 * h2_rational(eps)?,
    })
}

fn big_log2(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::INFINITY, f64::log2);
    }
    let shift = bits - 64;
    (x >> shift).to_f64().map_or(f64::INFINITY, f64::log2) + shift as f64
}

/// Tolerance thresholds for a given `ξ`.
///
/// `ξ` is read either as a tolerance rate `t/n` over resilient vectors or as
/// an observed error rate `‖w_e⊕w'‖/k*` over secrets; both readings share
/// these formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thresholds {
    pub xi: Rational,
    pub t_max: Rational,
    pub t_min: Rational,
    pub t_plus_prime: Rational,
    pub t_minus_prime: Rational,
    pub t_plus: u64,
    pub t_minus: u64,
}

pub fn thresholds(k_star: usize, n: usize, xi: Rational, eps_ss: Rational) -> Result<Thresholds> {
    if eps_ss > xi || xi > Rational::new(1, 2) {
        return Err(Error::param(format!(
            "thresholds need 0 <= eps_ss <= xi <= 1/2, got eps_ss={eps_ss}, xi={xi}"
        )));
    }
    let n = Rational::from_integer(n as u64);
    let k = Rational::from_integer(k_star as u64);
    let t_plus_prime = (xi + eps_ss) * k;
    let t_minus_prime = (xi - eps_ss) * k;
    Ok(Thresholds {
        xi,
        t_max: n * (xi - eps_ss),
        t_min: n * (xi + eps_ss),
        t_plus_prime,
        t_minus_prime,
        t_plus: t_plus_prime.to_integer(),
        t_minus: t_minus_prime.to_integer(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfficiencyCheck {
    pub holds: bool,
    /// `k*·h2(ε_rec)`.
    pub lhs: f64,
    /// `k − n*`.
    pub rhs: u64,
}

/// Whether the recovery search space `2^{k*·h2(ε_rec)}` fits inside the
/// zero-prefix budget `2^{k−n*}`.
pub fn efficiency_bound_check(
    k_star: usize,
    eps_rec: Rational,
    k: usize,
    n_star: usize,
) -> Result<EfficiencyCheck> {
    let rhs = prefix_len(k, n_star)? as u64;
    let lhs = k_star as f64 * h2_rational(eps_rec)?;
    Ok(EfficiencyCheck {
        holds: approx_le(lhs, rhs as f64),
        lhs,
        rhs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateRegime {
    /// `gv_lb <= R <= shannon_ub`.
    Within,
    AboveShannon,
    BelowGv,
    /// Both bounds violated, only possible when `gv_lb > shannon_ub`.
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateBounds {
    /// `1 − (k−n*)/k*`, exact.
    pub rate: Rational,
    /// `1 − h2(ε_rec)`.
    pub shannon_ub: f64,
    /// `1 − h2(2ε_ss)`.
    pub gv_lb: f64,
    pub regime: RateRegime,
}

pub fn rate_bounds(
    k_star: usize,
    k: usize,
    n_star: usize,
    eps_ss: Rational,
    eps_rec: Rational,
) -> Result<RateBounds> {
    let leak = prefix_len(k, n_star)?;
    if leak > k_star {
        return Err(Error::param(format!(
            "rate bounds need 1 <= k - n* <= k*, got {leak} > {k_star}"
        )));
    }
    let rate = Rational::from_integer(1) - Rational::new(leak as u64, k_star as u64);
    let shannon_ub = 1.0 - h2_rational(eps_rec)?;
    let gv_lb = 1.0 - h2_rational(eps_ss * 2)?;
    let r = to_f64(rate);
    let regime = match (approx_le(r, shannon_ub), approx_le(gv_lb, r)) {
        (true, true) => RateRegime::Within,
        (false, true) => RateRegime::AboveShannon,
        (true, false) => RateRegime::BelowGv,
        (false, false) => RateRegime::Outside,
    };
    Ok(RateBounds {
        rate,
        shannon_ub,
        gv_lb,
        regime,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidualEntropy {
    /// `⌊2n·ε²·log2(e)⌋ = ⌊log2(1/exp(−2nε²))⌋`.
    pub floor: u64,
    /// Whether `exp(−2nε²) <= 2^{−(k−n*)}`; when it holds, `floor >= k−n*`.
    pub concentration_holds: bool,
}

pub fn residual_entropy_bound(
    n: usize,
    eps_ss: Rational,
    k: usize,
    n_star: usize,
) -> Result<ResidualEntropy> {
    let leak = prefix_len(k, n_star)?;
    let exponent = 2.0 * n as f64 * to_f64(eps_ss).powi(2);
    let floor = (exponent * std::f64::consts::LOG2_E + REL_TOL).floor() as u64;
    let concentration_holds = concentration_holds(n, eps_ss, leak);
    debug_assert!(!concentration_holds || floor >= leak as u64);
    Ok(ResidualEntropy {
        floor,
        concentration_holds,
    })
}

/// `2^{−(k−n*)}`.
pub fn false_accept_rate(k: usize, n_star: usize) -> Result<f64> {
    Ok(0.5f64.powi(prefix_len(k, n_star)? as i32))
}

/// `exp(−2nε²) <= 2^{−m}`, compared in the log domain.
pub fn concentration_holds(n: usize, eps: Rational, m: usize) -> bool {
    let lhs = 2.0 * n as f64 * to_f64(eps).powi(2);
    approx_le(m as f64 * std::f64::consts::LN_2, lhs)
}

/// Smallest `n` with `exp(−2nε²) <= 2^{−m}`, by doubling then bisection.
pub fn min_n_for_concentration(m: usize, eps: Rational) -> Result<usize> {
    if eps.numer() == &0 {
        return Err(Error::param("concentration needs eps > 0"));
    }
    let mut hi = 1usize;
    while !concentration_holds(hi, eps, m) {
        hi = hi
            .checked_mul(2)
            .ok_or_else(|| Error::Capacity("sketch length overflow".into()))?;
    }
    let mut lo = 0usize;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if concentration_holds(mid, eps, m) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `⌈m·ln2 / (2ε²)⌉`.
pub fn min_n_for_concentration_closed_form(m: usize, eps: Rational) -> usize {
    let value = m as f64 * std::f64::consts::LN_2 / (2.0 * to_f64(eps).powi(2));
    (value * (1.0 - REL_TOL)).ceil().max(1.0) as usize
}

/// Outer BCH length forced when the zero-prefix budget `2^{k−n*}` must cover
/// `2^{k*·h2(2ε)}` candidates: `m' = ⌈k*·h2(2ε)⌉`, `n = 2^{m'} − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SketchLength {
    pub k_star: usize,
    pub prefix_len: u32,
    pub n: u128,
}

pub fn min_bch_sketch_length(k_star: usize, eps_ss: Rational) -> Result<SketchLength> {
    let bits = k_star as f64 * h2_rational(eps_ss * 2)?;
    let prefix_len = (bits * (1.0 - REL_TOL)).ceil().max(1.0) as u32;
    if prefix_len >= 128 {
        return Err(Error::Capacity(format!(
            "2^{prefix_len} does not fit in 128 bits"
        )));
    }
    Ok(SketchLength {
        k_star,
        prefix_len,
        n: (1u128 << prefix_len) - 1,
    })
}

/// Whether a BCH outer code of length `n = 2^{k−n*} − 1` has a zero-prefix
/// budget covering `2^{k*·h2(2ε_ss)}` candidates.
pub fn bch_budget_covers(
    k_star: usize,
    eps_ss: Rational,
    k: usize,
    n_star: usize,
    n: usize,
) -> Result<bool> {
    let leak = prefix_len(k, n_star)?;
    if leak >= 64 || (1u64 << leak) != n as u64 + 1 {
        return Ok(false);
    }
    Ok(approx_le(
        k_star as f64 * h2_rational(eps_ss * 2)?,
        leak as f64,
    ))
}

fn prefix_len(k: usize, n_star: usize) -> Result<usize> {
    if k <= n_star {
        return Err(Error::param(format!("need k > n*, got k={k}, n*={n_star}")));
    }
    Ok(k - n_star)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: u64, b: u64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn h2_examples() {
        assert_eq!(h2(0.5).unwrap(), 1.0);
        assert_eq!(h2(0.0).unwrap(), 0.0);
        assert_eq!(h2(1.0).unwrap(), 0.0);
        assert!(approx_eq(h2(0.25).unwrap(), 0.811_278_124_459_132_9));
        assert!(matches!(h2(1.5), Err(Error::Domain(_))));
        assert!(h2(-0.1).is_err());
    }

    #[test]
    fn hoeffding_examples() {
        let k = 16usize;
        assert!(approx_eq(
            hoeffding_bound(2 * k * k, r(1, 2 * k as u64)),
            (-1f64).exp()
        ));
        assert_eq!(hoeffding_bound(100, r(0, 1)), 1.0);
        assert!(approx_eq(hoeffding_bound(512, r(1, 8)), (-16f64).exp()));
    }

    #[test]
    fn support_examples() {
        let s = support_size(16, r(1, 4)).unwrap();
        assert_eq!(s.exact, BigUint::from(1820u32));
        assert!((s.log2_bound - 12.98).abs() < 0.01);
        assert!(s.within_bound());
        assert_eq!(support_size(9, r(0, 1)).unwrap().exact, BigUint::from(1u32));
        let s = support_size(8, r(1, 2)).unwrap();
        assert_eq!(s.exact, BigUint::from(70u32));
        assert_eq!(s.log2_bound, 8.0);
        assert!(support_size(8, r(3, 4)).is_err());
    }

    #[test]
    fn threshold_examples() {
        let t = thresholds(16, 64, r(1, 4), r(1, 8)).unwrap();
        assert_eq!(t.t_max, r(8, 1));
        assert_eq!(t.t_min, r(24, 1));
        assert_eq!(t.t_plus_prime, r(6, 1));
        assert_eq!(t.t_minus_prime, r(2, 1));
        let t = thresholds(16, 64, r(1, 8), r(1, 8)).unwrap();
        assert_eq!(t.t_max, r(0, 1));
        assert_eq!(t.t_minus_prime, r(0, 1));
        for k in 1..40usize {
            let t = thresholds(k, 10, r(1, 4), r(1, 4)).unwrap();
            assert_eq!(t.t_plus, (k / 2) as u64);
        }
        assert!(thresholds(16, 64, r(1, 8), r(1, 4)).is_err());
    }

    #[test]
    fn efficiency_examples() {
        let c = efficiency_bound_check(7, r(1, 7), 16, 15).unwrap();
        assert!(!c.holds);
        assert!((c.lhs - 4.14).abs() < 0.01);
        assert_eq!(c.rhs, 1);
        assert!(efficiency_bound_check(5, r(0, 1), 3, 2).unwrap().holds);
        let c = efficiency_bound_check(16, r(1, 2), 32, 16).unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs, 16.0);
    }

    #[test]
    fn rate_examples() {
        let b = rate_bounds(16, 32, 16, r(1, 16), r(1, 8)).unwrap();
        assert_eq!(b.rate, r(0, 1));
        let b = rate_bounds(16, 20, 16, r(1, 16), r(1, 8)).unwrap();
        assert_eq!(b.rate, r(3, 4));
        assert!((b.shannon_ub - 0.4564).abs() < 1e-4);
        assert_eq!(b.regime, RateRegime::AboveShannon);
        assert!(rate_bounds(4, 10, 5, r(1, 8), r(1, 8)).is_err());
        assert!(rate_bounds(4, 5, 5, r(1, 8), r(1, 8)).is_err());
    }

    #[test]
    fn residual_examples() {
        let k = 7usize;
        let e = residual_entropy_bound(2 * k * k, r(1, 2 * k as u64), 16, 15).unwrap();
        assert_eq!(e.floor, 1);
        assert!(e.concentration_holds);
        assert_eq!(
            residual_entropy_bound(100, r(0, 1), 16, 15).unwrap().floor,
            0
        );
        let e = residual_entropy_bound(512, r(1, 8), 20, 16).unwrap();
        assert_eq!(e.floor, 23);
        assert!(e.concentration_holds);
    }

    #[test]
    fn false_accept_examples() {
        assert_eq!(false_accept_rate(16, 15).unwrap(), 0.5);
        assert_eq!(false_accept_rate(18, 15).unwrap(), 0.125);
        assert_eq!(false_accept_rate(25, 15).unwrap(), 1.0 / 1024.0);
        assert!(false_accept_rate(15, 15).is_err());
    }

    #[test]
    fn min_n_search_matches_closed_form() {
        for m in 1..=12 {
            for (a, b) in [(1, 8), (1, 14), (1, 4), (1, 32), (3, 40)] {
                let eps = r(a, b);
                let n = min_n_for_concentration(m, eps).unwrap();
                assert_eq!(
                    n,
                    min_n_for_concentration_closed_form(m, eps),
                    "m={m} eps={eps}"
                );
                assert!(concentration_holds(n, eps, m));
                assert!(n == 1 || !concentration_holds(n - 1, eps, m));
            }
        }
    }

    #[test]
    fn bch_sketch_lengths() {
        let lens: Vec<u128> = [8, 10, 12]
            .iter()
            .map(|&k| min_bch_sketch_length(k, r(1, 8)).unwrap().n)
            .collect();
        assert_eq!(lens, vec![127, 511, 1023]);
        assert!(bch_budget_covers(8, r(1, 16), 26, 21, 31).unwrap());
        assert!(!bch_budget_covers(8, r(1, 16), 26, 21, 63).unwrap());
    }

    proptest::proptest! {
        #[test]
        fn h2_symmetric(x in 0.0f64..=1.0) {
            proptest::prop_assert!((h2(x).unwrap() - h2(1.0 - x).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn threshold_ordering(k in 1usize..64, n in 1usize..2048, a in 0u64..=32, b in 0u64..=32) {
            let (lo, hi) = (a.min(b), a.max(b));
            let t = thresholds(k, n, r(hi, 64), r(lo, 64)).unwrap();
            let nxi = r(hi, 64) * Rational::from_integer(n as u64);
            proptest::prop_assert!(t.t_max <= nxi && nxi <= t.t_min);
            proptest::prop_assert!(t.t_minus <= t.t_plus);
        }

        #[test]
        fn doubled_support_within_entropy_bound(k in 1usize..200, num in 1u64..=64) {
            let eps = r(num, 256);
            let s = support_size(k, eps * 2).unwrap();
            proptest::prop_assert!(s.within_bound());
        }
    }
}
