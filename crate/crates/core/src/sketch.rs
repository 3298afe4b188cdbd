//! Sketch generation and the binary sketch file.
//!
//! Pipeline for a secret `w` of length `k*`:
//!
//! ```text
//! c*    = C_in(w)
//! w_e   = w ⊕ e                      ‖e‖ = ⌊k*·ε_ss⌋
//! v_syn = c* ⊕ (0^{n*−k*} ∥ w_e)
//! v*    = 0^{k−n*} ∥ v_syn
//! ss    = C_out(v*) ⊕ Ω(w_e, N)
//! ```

use std::fmt;

use rand::seq::index::sample;

use crate::analysis;
use crate::bits::BitString;
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::lsh::{omega, IndexVector};
use crate::rational::{floor_mul, Rational};
use crate::rng::{SeededRng, RNG_ALGO_ID};

/// Stream ids used when a whole sketch is derived from one seed.
pub mod streams {
    pub const INNER_CODE: u64 = 1;
    pub const OUTER_CODE: u64 = 2;
    pub const INDEX_VECTOR: u64 = 3;
    pub const ERROR: u64 = 4;
    pub const SECRET: u64 = 5;
}

const MAGIC: &[u8; 4] = b"FSKT";
const FORMAT_VERSION: u16 = 1;

/// Dimensions of a sketch: inner `[n*, k*]`, outer `[n, k]`, and `ε_ss`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SketchParams {
    pub k_star: usize,
    pub n_star: usize,
    pub k: usize,
    pub n: usize,
    pub eps_ss: Rational,
}

impl SketchParams {
    pub fn from_codes(inner: &LinearCode, outer: &LinearCode, eps_ss: Rational) -> Self {
        Self {
            k_star: inner.k(),
            n_star: inner.n(),
            k: outer.k(),
            n: outer.n(),
            eps_ss,
        }
    }

    /// `k − n*`, the number of zero bits prefixed to the syndrome vector.
    pub fn prefix_len(&self) -> usize {
        self.k.saturating_sub(self.n_star)
    }

    /// `⌊k*·ε_ss⌋`.
    pub fn error_weight(&self) -> usize {
        floor_mul(self.k_star, self.eps_ss)
    }

    /// Lower end of the admissible error-rate range, `1/(2k*)`.
    pub fn min_eps(&self) -> Rational {
        Rational::new(1, 2 * self.k_star.max(1) as u64)
    }

    /// Errors unless the pair of codes matches these dimensions.
    pub fn check_codes(&self, inner: &LinearCode, outer: &LinearCode) -> Result<()> {
        let got = (inner.k(), inner.n(), outer.k(), outer.n());
        if got != (self.k_star, self.n_star, self.k, self.n) {
            return Err(Error::param(format!(
                "codes [{}, {}] / [{}, {}] do not match sketch parameters [{}, {}] / [{}, {}]",
                got.1, got.0, got.3, got.2, self.n_star, self.k_star, self.n, self.k
            )));
        }
        Ok(())
    }
}

/// Result of [`validate_params`]. Only `violations` are fatal.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamReport {
    pub violations: Vec<String>,
    /// `exp(−2n·ε_ss²) <= 2^{−(k−n*)}`.
    pub concentration_ok: bool,
    /// `k*·h2(ε_rec) <= k − n*`.
    pub efficiency_ok: bool,
    pub eps_rec: Rational,
}

impl ParamReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ParamReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            writeln!(f, "ordering and range checks: ok")?;
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        writeln!(
            f,
            "concentration exp(-2n eps^2) <= 2^-(k-n*): {}",
            self.concentration_ok
        )?;
        write!(
            f,
            "efficiency k* h2(eps_rec={}) <= k-n*: {}",
            self.eps_rec, self.efficiency_ok
        )
    }
}

/// Checks `k* <= n* < k <= n` and `1/(2k*) <= ε_ss <= 1/4`, and evaluates
/// the two advisory predicates. `eps_rec` defaults to `2·ε_ss`.
pub fn validate_params(params: &SketchParams, eps_rec: Option<Rational>) -> ParamReport {
    let p = params;
    let mut violations = Vec::new();
    if p.k_star == 0 {
        violations.push("k* must be positive".to_string());
    }
    if p.k_star > p.n_star {
        violations.push(format!("k* <= n* fails: {} > {}", p.k_star, p.n_star));
    }
    if p.n_star >= p.k {
        violations.push(format!(
            "n* < k fails: {} >= {} (need k - n* >= 1)",
            p.n_star, p.k
        ));
    }
    if p.k > p.n {
        violations.push(format!("k <= n fails: {} > {}", p.k, p.n));
    }
    if p.k_star > 0 && (p.eps_ss < p.min_eps() || p.eps_ss > Rational::new(1, 4)) {
        violations.push(format!(
            "eps_ss = {} outside [{}, 1/4]",
            p.eps_ss,
            p.min_eps()
        ));
    }
    let eps_rec = eps_rec.unwrap_or(p.eps_ss * 2);
    let leak = p.prefix_len();
    let concentration_ok = leak >= 1 && analysis::concentration_holds(p.n, p.eps_ss, leak);
    let efficiency_ok = leak >= 1
        && analysis::efficiency_bound_check(p.k_star, eps_rec, p.k, p.n_star)
            .map(|c| c.holds)
            .unwrap_or(false);
    ParamReport {
        violations,
        concentration_ok,
        efficiency_ok,
        eps_rec,
    }
}

/// Uniform vector of length `k_star` and weight exactly `⌊k_star·eps⌋`.
pub fn sample_error(k_star: usize, eps: Rational, rng: &mut SeededRng) -> Result<BitString> {
    if eps > Rational::new(1, 2) {
        return Err(Error::param(format!("error rate {eps} outside [0, 1/2]")));
    }
    let weight = floor_mul(k_star, eps);
    let mut e = BitString::zeros(k_star);
    for i in sample(rng, k_star, weight) {
        e.set_bit(i, true);
    }
    Ok(e)
}

/// Published helper data. The sampled error `e` is deliberately absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sketch {
    pub ss: BitString,
    pub params: SketchParams,
    pub index: IndexVector,
    pub rng_algo_id: String,
}

/// Every intermediate value of one sketch computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SketchTrace {
    pub e: BitString,
    pub w_e: BitString,
    pub c_star: BitString,
    pub v_syn: BitString,
    pub v_star: BitString,
    pub c: BitString,
    pub phi: BitString,
}

/// Sketch generator bound to an inner and outer code.
#[derive(Debug)]
pub struct Sketcher {
    inner: LinearCode,
    outer: LinearCode,
    params: SketchParams,
}

impl Sketcher {
    /// Fails with a parameter error listing every violated ordering or range check.
    pub fn new(inner: LinearCode, outer: LinearCode, eps_ss: Rational) -> Result<Self> {
        let params = SketchParams::from_codes(&inner, &outer, eps_ss);
        let report = validate_params(&params, None);
        if !report.is_valid() {
            return Err(Error::param(report.violations.join("; ")));
        }
        Ok(Self {
            inner,
            outer,
            params,
        })
    }

    pub fn params(&self) -> &SketchParams {
        &self.params
    }

    pub fn inner(&self) -> &LinearCode {
        &self.inner
    }

    pub fn outer(&self) -> &LinearCode {
        &self.outer
    }

    pub fn into_codes(self) -> (LinearCode, LinearCode) {
        (self.inner, self.outer)
    }

    pub fn sketch(
        &self,
        w: &BitString,
        index: &IndexVector,
        rng: &mut SeededRng,
    ) -> Result<Sketch> {
        self.sketch_with_trace(w, index, rng).map(|(sk, _)| sk)
    }

    pub fn sketch_with_trace(
        &self,
        w: &BitString,
        index: &IndexVector,
        rng: &mut SeededRng,
    ) -> Result<(Sketch, SketchTrace)> {
        let p = &self.params;
        if w.len() != p.k_star {
            return Err(Error::dim("secret length", p.k_star, w.len()));
        }
        if index.len() != p.n || index.source_len() != p.k_star {
            return Err(Error::param(format!(
                "index vector of length {} over [{}] does not match n={}, k*={}",
                index.len(),
                index.source_len(),
                p.n,
                p.k_star
            )));
        }
        let e = sample_error(p.k_star, p.eps_ss, rng)?;
        let w_e = w.xor(&e)?;
        let c_star = self.inner.encode(w)?;
        let v_syn = c_star.xor(&w_e.zero_pad_prefix(p.n_star - p.k_star))?;
        let v_star = v_syn.zero_pad_prefix(p.prefix_len());
        let c = self.outer.encode(&v_star)?;
        let phi = omega(&w_e, index)?;
        let ss = c.xor(&phi)?;
        let sketch = Sketch {
            ss,
            params: *p,
            index: index.clone(),
            rng_algo_id: RNG_ALGO_ID.to_string(),
        };
        let trace = SketchTrace {
            e,
            w_e,
            c_star,
            v_syn,
            v_star,
            c,
            phi,
        };
        Ok((sketch, trace))
    }
}

/// A sketch together with the codes needed to recover from it.
#[derive(Debug)]
pub struct SketchFile {
    pub sketch: Sketch,
    pub inner: LinearCode,
    pub outer: LinearCode,
}

impl SketchFile {
    /// Little-endian binary encoding.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let sk = &self.sketch;
        let p = &sk.params;
        p.check_codes(&self.inner, &self.outer)?;
        let u32_of = |x: u64, what: &str| {
            u32::try_from(x).map_err(|_| Error::format(format!("{what} does not fit in u32")))
        };
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        for (x, what) in [(p.k_star, "k*"), (p.n_star, "n*"), (p.k, "k"), (p.n, "n")] {
            out.extend_from_slice(&u32_of(x as u64, what)?.to_le_bytes());
        }
        out.extend_from_slice(&u32_of(*p.eps_ss.numer(), "eps numerator")?.to_le_bytes());
        out.extend_from_slice(&u32_of(*p.eps_ss.denom(), "eps denominator")?.to_le_bytes());
        let id = sk.rng_algo_id.as_bytes();
        let id_len = u16::try_from(id.len()).map_err(|_| Error::format("rng id too long"))?;
        out.extend_from_slice(&id_len.to_le_bytes());
        out.extend_from_slice(id);
        for code in [&self.inner, &self.outer] {
            let text = code.to_text();
            out.extend_from_slice(
                &u32_of(text.len() as u64, "code descriptor length")?.to_le_bytes(),
            );
            out.extend_from_slice(text.as_bytes());
        }
        for &i in sk.index.indices() {
            let i = u16::try_from(i).map_err(|_| Error::format("index does not fit in u16"))?;
            out.extend_from_slice(&i.to_le_bytes());
        }
        out.extend_from_slice(&sk.ss.to_bytes());
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MAGIC {
            return Err(Error::format("bad magic: not a sketch file"));
        }
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(Error::format(format!(
                "unsupported sketch version {version}"
            )));
        }
        let k_star = r.u32()? as usize;
        let n_star = r.u32()? as usize;
        let k = r.u32()? as usize;
        let n = r.u32()? as usize;
        let num = r.u32()? as u64;
        let den = r.u32()? as u64;
        if den == 0 {
            return Err(Error::format("zero eps denominator"));
        }
        let id_len = r.u16()? as usize;
        let rng_algo_id = String::from_utf8(r.take(id_len)?.to_vec())
            .map_err(|_| Error::format("rng id is not UTF-8"))?;
        let mut codes = Vec::with_capacity(2);
        for _ in 0..2 {
            let len = r.u32()? as usize;
            let text = std::str::from_utf8(r.take(len)?)
                .map_err(|_| Error::format("code descriptor is not UTF-8"))?;
            codes.push(LinearCode::from_text(text)?);
        }
        let outer = codes.pop().expect("two codes");
        let inner = codes.pop().expect("two codes");
        let params = SketchParams {
            k_star,
            n_star,
            k,
            n,
            eps_ss: Rational::new(num, den),
        };
        params.check_codes(&inner, &outer)?;
        let indices = (0..n)
            .map(|_| r.u16().map(u32::from))
            .collect::<Result<Vec<_>>>()?;
        let index = IndexVector::new(indices, k_star)?;
        let ss = BitString::from_bytes(r.take(n.div_ceil(8))?, n)?;
        if r.pos != bytes.len() {
            return Err(Error::format("trailing bytes after sketch"));
        }
        Ok(Self {
            sketch: Sketch {
                ss,
                params,
                index,
                rng_algo_id,
            },
            inner,
            outer,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::format("sketch file is truncated"))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(
            self.take(2)?.try_into().expect("2 bytes"),
        ))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(
            self.take(4)?.try_into().expect("4 bytes"),
        ))
    }
}
