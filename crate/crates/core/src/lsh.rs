//! Bit-sampling hash: public index vectors and the resilient-vector map.
//!
//! `Ω(w, N)` reads bit `N(i)` of `w` for each `i`, so two inputs at distance
//! `d` disagree at each sampled position with probability exactly `d / k*`.

use std::fmt;

use rand::Rng;

use crate::bits::{hamming_distance, BitString};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::rng::SeededRng;

/// `N ∈ [k*]^n`, stored 1-based. Repeats are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexVector {
    indices: Vec<u32>,
    source_len: usize,
}

impl IndexVector {
    pub fn new(indices: Vec<u32>, source_len: usize) -> Result<Self> {
        if source_len == 0 {
            return Err(Error::param("index vector source length must be positive"));
        }
        if indices.is_empty() {
            return Err(Error::param("index vector must be non-empty"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i as usize > source_len) {
            return Err(Error::param(format!(
                "index {bad} outside 1..={source_len}"
            )));
        }
        Ok(Self {
            indices,
            source_len,
        })
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    /// `k*`, the length of the strings this vector samples from.
    pub fn source_len(&self) -> usize {
        self.source_len
    }

    /// `n`, the resilient-vector length.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Parses one line of comma-separated 1-based indices.
    pub fn parse_line(line: &str, source_len: usize) -> Result<Self> {
        let indices = line
            .trim()
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::format(format!("bad index {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices, source_len)
    }
}

impl fmt::Display for IndexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, idx) in self.indices.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{idx}")?;
        }
        Ok(())
    }
}

/// `n` i.i.d. uniform draws from `1..=k_star`.
pub fn gen_index_vector(k_star: usize, n: usize, rng: &mut SeededRng) -> Result<IndexVector> {
    if k_star == 0 || n == 0 {
        return Err(Error::param(format!(
            "index vector needs k* >= 1 and n >= 1, got k*={k_star}, n={n}"
        )));
    }
    if k_star > u32::MAX as usize {
        return Err(Error::param("k* does not fit in a 32-bit index"));
    }
    let hi = k_star as u32;
    let indices = (0..n).map(|_| rng.gen_range(1..=hi)).collect();
    IndexVector::new(indices, k_star)
}

/// The resilient vector `φ` with `φ[i] = w[N[i]]`.
pub fn omega(w: &BitString, index: &IndexVector) -> Result<BitString> {
    if w.len() != index.source_len {
        return Err(Error::dim("omega input length", index.source_len, w.len()));
    }
    let mut phi = BitString::zeros(index.len());
    for (i, &src) in index.indices.iter().enumerate() {
        if w.bit(src as usize - 1) {
            phi.set_bit(i, true);
        }
    }
    Ok(phi)
}

/// Collision probability of one sampled bit: `1 − ‖w⊕w'‖ / k*`.
pub fn similarity(w: &BitString, w_prime: &BitString) -> Result<Rational> {
    let d = hamming_distance(w, w_prime)? as u64;
    let k = w.len() as u64;
    if k == 0 {
        return Err(Error::param("similarity of empty strings is undefined"));
    }
    Ok(Rational::new(k - d, k))
}

/// `E‖Ω(w,N) ⊕ Ω(w',N)‖ = n · ‖w⊕w'‖ / k*` under uniform `N`.
pub fn expected_rv_distance(w: &BitString, w_prime: &BitString, n: usize) -> Result<Rational> {
    let d = hamming_distance(w, w_prime)? as u64;
    if w.is_empty() || n == 0 {
        return Err(Error::param("expected distance needs k* >= 1 and n >= 1"));
    }
    Ok(Rational::new(n as u64 * d, w.len() as u64))
}

/// Sample mean and standard deviation of `‖Ω(w,N) ⊕ Ω(w',N)‖` over `trials`
/// fresh index vectors drawn from `rng`.
pub fn empirical_rv_distance(
    w: &BitString,
    w_prime: &BitString,
    n: usize,
    trials: usize,
    rng: &mut SeededRng,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    let diff = w.xor(w_prime)?;
    let mut stats = RunningStats::default();
    for _ in 0..trials {
        let index = gen_index_vector(w.len(), n, rng)?;
        // Ω is GF(2)-linear, so Ω(w)⊕Ω(w') = Ω(w⊕w').
        let delta = omega(&diff, &index)?;
        stats.push(delta.weight() as f64);
    }
    Ok((stats.mean(), stats.stddev()))
}

/// Welford accumulator; merges are exact for mean and variance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / total as f64;
        self.m2 +=
            other.m2 + delta * delta * (self.count as f64 * other.count as f64) / total as f64;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample standard deviation; zero for fewer than two points.
    pub fn stddev(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).sqrt()
        }
    }
}
