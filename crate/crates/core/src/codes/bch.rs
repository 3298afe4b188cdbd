//! Narrow-sense primitive BCH generator polynomials over GF(2^m).
//!
//! Polynomials are packed into a `u64` with bit `i` holding the coefficient
//! of `x^i`; `m <= 6` keeps every generator below degree 64.

use crate::error::{Error, Result};

/// Supported extension degrees and their primitive polynomials.
const PRIMITIVE: [(u32, u32); 4] = [
    (3, 0b1011),     // x^3 + x + 1
    (4, 0b1_0011),   // x^4 + x + 1
    (5, 0b10_0101),  // x^5 + x^2 + 1
    (6, 0b100_0011), // x^6 + x + 1
];

struct Field {
    order: usize, // 2^m - 1
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Field {
    fn new(m: u32) -> Result<Self> {
        let (_, poly) = PRIMITIVE
            .iter()
            .find(|(deg, _)| *deg == m)
            .ok_or_else(|| Error::param(format!("BCH extension degree m'={m} not in 3..=6")))?;
        let order = (1usize << m) - 1;
        let mut exp = vec![0u32; 2 * order];
        let mut log = vec![0u32; order + 1];
        let mut x = 1u32;
        for (i, slot) in exp.iter_mut().take(order).enumerate() {
            *slot = x;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Ok(Self { order, exp, log })
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    fn alpha_pow(&self, i: usize) -> u32 {
        self.exp[i % self.order]
    }
}

/// Minimal polynomial of `α^i`, from its cyclotomic coset.
fn minimal_polynomial(field: &Field, coset: &[usize]) -> u64 {
    // Product of (x + α^j) with coefficients in GF(2^m), lowest degree first.
    let mut poly: Vec<u32> = vec![1];
    for &j in coset {
        let root = field.alpha_pow(j);
        let mut next = vec![0u32; poly.len() + 1];
        for (d, &c) in poly.iter().enumerate() {
            next[d + 1] ^= c;
            next[d] ^= field.mul(c, root);
        }
        poly = next;
    }
    poly.iter().enumerate().fold(0u64, |acc, (d, &c)| {
        debug_assert!(c <= 1, "minimal polynomial has a non-binary coefficient");
        acc | ((c as u64) << d)
    })
}

fn cyclotomic_coset(i: usize, order: usize) -> Vec<usize> {
    let mut coset = vec![i % order];
    let mut j = (2 * i) % order;
    while j != i % order {
        coset.push(j);
        j = (2 * j) % order;
    }
    coset
}

fn poly_mul(a: u64, b: u64) -> u64 {
    let mut out = 0u64;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 == 1 {
            out ^= a << shift;
        }
        b >>= 1;
        shift += 1;
    }
    out
}

pub fn degree(p: u64) -> usize {
    63 - p.leading_zeros() as usize
}

/// Generator of the `t`-error-correcting BCH code of length `2^m − 1`:
/// the lcm of the minimal polynomials of `α, α^2, …, α^{2t}`.
pub fn generator_polynomial(m: u32, t: usize) -> Result<u64> {
    if t == 0 || t >= 1usize << (m.saturating_sub(1)) {
        return Err(Error::param(format!(
            "BCH needs 1 <= t < 2^(m'-1); got m'={m}, t={t}"
        )));
    }
    let field = Field::new(m)?;
    let mut seen = vec![false; field.order];
    let mut g = 1u64;
    for i in 1..=2 * t {
        let i = i % field.order;
        if seen[i] {
            continue;
        }
        let coset = cyclotomic_coset(i, field.order);
        for &j in &coset {
            seen[j] = true;
        }
        g = poly_mul(g, minimal_polynomial(&field, &coset));
    }
    Ok(g)
}
