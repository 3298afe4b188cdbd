//! Exact rates such as `ε_ss = 1/14`.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<u64>;

/// `⌊k · r⌋` computed exactly.
pub fn floor_mul(k: usize, r: Rational) -> usize {
    ((k as u128 * *r.numer() as u128) / *r.denom() as u128) as usize
}

pub fn to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `a/b`, a plain integer, or a finite decimal like `0.3`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::format(format!("cannot parse {s:?} as a rational"));
    if let Some((a, b)) = s.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(Error::format(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let num = frac.parse::<u64>().map_err(|_| bad())?;
        let whole = int
            .checked_mul(den)
            .and_then(|x| x.checked_add(num))
            .ok_or_else(bad)?;
        return Ok(Rational::new(whole, den));
    }
    let a: u64 = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(a))
}
