//! Fixed-weight supports in lexicographic order, and binomial coefficients.

use num_bigint::BigUint;

/// `C(n, k)` exactly.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, k)` when it fits in a `u64`.
pub fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Advances a sorted 0-based support in `0..n` to its lexicographic
/// successor. Returns `false` once the last support has been passed.
pub fn next_support(support: &mut [usize], n: usize) -> bool {
    let k = support.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if support[i] < n - k + i {
            support[i] += 1;
            for j in i + 1..k {
                support[j] = support[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The support with lexicographic rank `rank` among all `k`-subsets of
/// `0..n`. `rank` must be below `C(n, k)`.
pub fn unrank_support(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = 0usize;
    for slot in 0..k {
        loop {
            let remaining = k - slot - 1;
            let block = binomial_u64((n - x - 1) as u64, remaining as u64).unwrap_or(u64::MAX);
            if rank < block {
                break;
            }
            rank -= block;
            x += 1;
        }
        out.push(x);
        x += 1;
    }
    out
}

/// Iterator over all `k`-subsets of `0..n` in lexicographic order.
#[derive(Clone, Debug)]
pub struct Supports {
    n: usize,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl Supports {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (0..k).collect(),
            started: false,
            done: k > n,
        }
    }

    /// Starts at lexicographic rank `rank`.
    pub fn from_rank(n: usize, k: usize, rank: u64) -> Self {
        let total = binomial_u64(n as u64, k as u64).unwrap_or(u64::MAX);
        Self {
            n,
            current: if rank < total {
                unrank_support(n, k, rank)
            } else {
                Vec::new()
            },
            started: false,
            done: k > n || rank >= total,
        }
    }

    /// Lending-style advance that avoids an allocation per support.
    pub fn advance(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.started {
            if !next_support(&mut self.current, self.n) {
                self.done = true;
                return None;
            }
        } else {
            self.started = true;
        }
        Some(&self.current)
    }
}

impl Iterator for Supports {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.advance().map(<[usize]>::to_vec)
    }
}
