//! Binary linear codes with bounded-distance syndrome decoding.
//!
//! A [`LinearCode`] is fixed at construction: generator `G` (n×k, stored by
//! columns), a parity-check `H` ((n−k)×n) spanning the dual, an information
//! set for message inversion, and a table from syndrome to the unique
//! coset leader of weight `<= t`. Syndromes missing from the table are
//! decode failures.

mod bch;
pub mod matrix;

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use crate::bits::BitString;
use crate::combinatorics::{binomial_u64, Supports};
use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Upper bound on stored coset leaders.
pub const MAX_TABLE_ENTRIES: u64 = 1 << 22;

/// Enumeration guard for [`LinearCode::min_distance_bruteforce`].
pub const MAX_BRUTEFORCE_DIM: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodeKind {
    /// Narrow-sense primitive BCH code over GF(2^m).
    Bch { m: u32 },
    /// Uniformly random full-rank generator drawn from `seed`.
    Random { seed: u64 },
}

pub struct LinearCode {
    kind: CodeKind,
    n: usize,
    k: usize,
    t: usize,
    columns: Vec<BitString>,
    parity_rows: Vec<BitString>,
    info_set: Vec<usize>,
    info_inverse: Vec<BitString>,
    decode_table: HashMap<BitString, BitString>,
    min_distance: OnceLock<Option<usize>>,
}

impl LinearCode {
    /// `[2^m − 1, k]` BCH code correcting `t` errors, `m ∈ 3..=6`.
    pub fn bch(m: u32, t: usize) -> Result<Self> {
        let g = bch::generator_polynomial(m, t)?;
        let n = (1usize << m) - 1;
        let k = n - bch::degree(g);
        let columns = (0..k)
            .map(|shift| {
                let mut col = BitString::zeros(n);
                let mut rest = g;
                while rest != 0 {
                    let i = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    col.set_bit(i + shift, true);
                }
                col
            })
            .collect();
        Self::build(CodeKind::Bch { m }, n, k, t, columns)
    }

    /// Random `[n, k]` code with `t = 0`. Resamples until `G` has rank `k`.
    pub fn random(n: usize, k: usize, rng: &mut SeededRng) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::param(format!(
                "random code needs 1 <= k <= n, got n={n}, k={k}"
            )));
        }
        let seed = rng.seed();
        loop {
            let columns: Vec<BitString> = (0..k).map(|_| BitString::random(n, rng)).collect();
            if matrix::rank(&columns) == k {
                return Self::build(CodeKind::Random { seed }, n, k, 0, columns);
            }
        }
    }

    /// Rebuilds a code from the rows of its generator matrix.
    pub fn from_generator_rows(kind: CodeKind, rows: &[BitString], t: usize) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, BitString::len);
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(Error::Construction(
                "generator rows must share a positive width".into(),
            ));
        }
        let columns = matrix::transpose(rows, k);
        Self::build(kind, n, k, t, columns)
    }

    fn build(
        kind: CodeKind,
        n: usize,
        k: usize,
        t: usize,
        columns: Vec<BitString>,
    ) -> Result<Self> {
        if matrix::rank(&columns) != k {
            return Err(Error::Construction(format!(
                "generator of [{n},{k}] code is rank deficient"
            )));
        }
        let parity_rows = matrix::kernel_basis(&columns, n);
        if parity_rows.len() != n - k {
            return Err(Error::Construction(
                "parity-check matrix has the wrong rank".into(),
            ));
        }
        for h in &parity_rows {
            if columns.iter().any(|c| h.dot(c)) {
                return Err(Error::Construction("H·G is nonzero".into()));
            }
        }

        // Information set: pivot columns of Gᵀ are k independent rows of G.
        let (_, info_set) = matrix::rref(&columns);
        let restricted: Vec<BitString> = info_set
            .iter()
            .map(|&row| {
                let mut r = BitString::zeros(k);
                for (j, col) in columns.iter().enumerate() {
                    if col.bit(row) {
                        r.set_bit(j, true);
                    }
                }
                r
            })
            .collect();
        let info_inverse = matrix::inverse(&restricted)
            .ok_or_else(|| Error::Construction("information set is singular".into()))?;

        let mut code = Self {
            kind,
            n,
            k,
            t,
            columns,
            parity_rows,
            info_set,
            info_inverse,
            decode_table: HashMap::new(),
            min_distance: OnceLock::new(),
        };
        code.decode_table = code.build_decode_table()?;
        Ok(code)
    }

    fn build_decode_table(&self) -> Result<HashMap<BitString, BitString>> {
        let entries = (0..=self.t).try_fold(0u64, |acc, w| {
            binomial_u64(self.n as u64, w as u64).and_then(|c| acc.checked_add(c))
        });
        match entries {
            Some(e) if e <= MAX_TABLE_ENTRIES => {}
            _ => {
                return Err(Error::Capacity(format!(
                    "decode table for n={}, t={} exceeds {MAX_TABLE_ENTRIES} coset leaders",
                    self.n, self.t
                )))
            }
        }
        let h_columns = matrix::transpose(&self.parity_rows, self.n);
        let mut table = HashMap::new();
        for weight in 0..=self.t {
            let mut supports = Supports::new(self.n, weight);
            while let Some(support) = supports.advance() {
                let mut syn = BitString::zeros(self.n - self.k);
                for &i in support {
                    syn.xor_assign(&h_columns[i]).expect("syndrome width");
                }
                if table.contains_key(&syn) {
                    return Err(Error::Construction(format!(
                        "two error patterns of weight <= {} share a syndrome; t exceeds the code's radius",
                        self.t
                    )));
                }
                let mut leader = BitString::zeros(self.n);
                for &i in support {
                    leader.set_bit(i, true);
                }
                table.insert(syn, leader);
            }
        }
        Ok(table)
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    /// Blocklength.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Decoding radius.
    pub fn t(&self) -> usize {
        self.t
    }

    /// Rows of `G`, each of width `k`.
    pub fn generator_rows(&self) -> Vec<BitString> {
        matrix::transpose(&self.columns, self.n)
    }

    /// Column `j` (1-based) of `G`, i.e. the codeword of the `j`-th unit message.
    pub fn generator_column(&self, j: usize) -> &BitString {
        &self.columns[j - 1]
    }

    pub fn parity_check_rows(&self) -> &[BitString] {
        &self.parity_rows
    }

    pub fn decode_table_len(&self) -> usize {
        self.decode_table.len()
    }

    /// `G · msg`.
    pub fn encode(&self, msg: &BitString) -> Result<BitString> {
        if msg.len() != self.k {
            return Err(Error::dim("message length", self.k, msg.len()));
        }
        let mut c = BitString::zeros(self.n);
        for j in msg.one_indices() {
            c.xor_assign(&self.columns[j]).expect("column width");
        }
        Ok(c)
    }

    /// `H · word`.
    pub fn syndrome(&self, word: &BitString) -> Result<BitString> {
        if word.len() != self.n {
            return Err(Error::dim("word length", self.n, word.len()));
        }
        let mut s = BitString::zeros(self.n - self.k);
        for (i, h) in self.parity_rows.iter().enumerate() {
            if h.dot(word) {
                s.set_bit(i, true);
            }
        }
        Ok(s)
    }

    pub fn is_codeword(&self, word: &BitString) -> Result<bool> {
        Ok(self.syndrome(word)?.is_zero())
    }

    /// The unique codeword within distance `t`, or `None`.
    pub fn decode(&self, word: &BitString) -> Result<Option<BitString>> {
        let syn = self.syndrome(word)?;
        Ok(self.decode_table.get(&syn).map(|leader| {
            let mut c = word.clone();
            c.xor_assign(leader).expect("leader width");
            c
        }))
    }

    /// The message `m` with `encode(m) == codeword`.
    pub fn invert_message(&self, codeword: &BitString) -> Result<BitString> {
        if !self.is_codeword(codeword)? {
            return Err(Error::Inversion);
        }
        Ok(self.information_set_message(codeword))
    }

    /// Solves `G·m = word` on the information set only, ignoring the other
    /// `n − k` coordinates. Equals [`Self::invert_message`] on codewords and
    /// returns a message for every word otherwise.
    pub fn information_set_message(&self, word: &BitString) -> BitString {
        assert_eq!(word.len(), self.n, "word length");
        let mut restricted = BitString::zeros(self.k);
        for (r, &row) in self.info_set.iter().enumerate() {
            if word.bit(row) {
                restricted.set_bit(r, true);
            }
        }
        matrix::mul_vec(&self.info_inverse, &restricted)
    }

    /// Exact minimum distance by enumerating all `2^k` codewords.
    pub fn min_distance_bruteforce(&self) -> Result<usize> {
        if self.k > MAX_BRUTEFORCE_DIM {
            return Err(Error::Capacity(format!(
                "brute-force distance needs k <= {MAX_BRUTEFORCE_DIM}, got {}",
                self.k
            )));
        }
        // Gray-code walk: one column XOR per step.
        let mut c = BitString::zeros(self.n);
        let mut best = usize::MAX;
        for step in 1u64..(1u64 << self.k) {
            let j = step.trailing_zeros() as usize;
            c.xor_assign(&self.columns[j]).expect("column width");
            best = best.min(c.weight());
        }
        Ok(best)
    }

    /// Cached minimum distance; `None` when `k` is too large to enumerate.
    pub fn min_distance(&self) -> Option<usize> {
        *self
            .min_distance
            .get_or_init(|| self.min_distance_bruteforce().ok())
    }

    /// Text serialization: a header line and the row-major hex dump of `G`.
    pub fn to_text(&self) -> String {
        let (kind, param) = match self.kind {
            CodeKind::Bch { m } => ("bch", m as u64),
            CodeKind::Random { seed } => ("random", seed),
        };
        let mut out = format!(
            "code kind={kind} n={} k={} t={} param={param}\n",
            self.n, self.k, self.t
        );
        for row in self.generator_rows() {
            for byte in row.to_bytes() {
                out.push_str(&format!("{byte:02x}"));
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`Self::to_text`] output, rebuilding `H` and the decode table.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::format("empty code descriptor"))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("code") {
            return Err(Error::format("code descriptor must start with 'code'"));
        }
        let mut kind = None;
        let (mut n, mut k, mut t, mut param) = (None, None, None, None);
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::format(format!("bad header field {field:?}")))?;
            let num = || {
                value
                    .parse::<u64>()
                    .map_err(|_| Error::format(format!("bad value in {field:?}")))
            };
            match key {
                "kind" => kind = Some(value.to_string()),
                "n" => n = Some(num()? as usize),
                "k" => k = Some(num()? as usize),
                "t" => t = Some(num()? as usize),
                "param" => param = Some(num()?),
                _ => return Err(Error::format(format!("unknown header field {key:?}"))),
            }
        }
        let missing = |name| Error::format(format!("code descriptor lacks {name}"));
        let (n, k, t, param) = (
            n.ok_or_else(|| missing("n"))?,
            k.ok_or_else(|| missing("k"))?,
            t.ok_or_else(|| missing("t"))?,
            param.ok_or_else(|| missing("param"))?,
        );
        let rows = lines
            .take(n)
            .map(|line| parse_hex_row(line.trim(), k))
            .collect::<Result<Vec<_>>>()?;
        if rows.len() != n {
            return Err(Error::dim("generator row count", n, rows.len()));
        }
        let code = match kind.as_deref() {
            Some("bch") => {
                let m = u32::try_from(param).map_err(|_| Error::format("bad BCH degree"))?;
                let code = Self::bch(m, t)?;
                if code.n != n || code.k != k || code.generator_rows() != rows {
                    return Err(Error::format(
                        "BCH descriptor does not match its generator dump",
                    ));
                }
                code
            }
            Some("random") => {
                if t != 0 {
                    return Err(Error::format("random codes carry t = 0"));
                }
                Self::from_generator_rows(CodeKind::Random { seed: param }, &rows, 0)?
            }
            other => return Err(Error::format(format!("unknown code kind {other:?}"))),
        };
        Ok(code)
    }
}

fn parse_hex_row(line: &str, width: usize) -> Result<BitString> {
    if line.len() != 2 * width.div_ceil(8) {
        return Err(Error::format(format!(
            "generator row {line:?} has the wrong width"
        )));
    }
    let bytes = (0..line.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&line[i..i + 2], 16)
                .map_err(|_| Error::format(format!("bad hex in generator row {line:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    BitString::from_bytes(&bytes, width)
}

/// Textual code choice: `m':t` for BCH, `random:n:k` for a random code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodeSpec {
    Bch { m: u32, t: usize },
    Random { n: usize, k: usize },
}

impl CodeSpec {
    /// Random codes draw their generator from `rng`; BCH codes ignore it.
    pub fn build(&self, rng: &mut SeededRng) -> Result<LinearCode> {
        match *self {
            CodeSpec::Bch { m, t } => LinearCode::bch(m, t),
            CodeSpec::Random { n, k } => LinearCode::random(n, k, rng),
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSpec::Bch { m, t } => write!(f, "{m}:{t}"),
            CodeSpec::Random { n, k } => write!(f, "random:{n}:{k}"),
        }
    }
}

impl std::str::FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |x: &str| {
            x.parse::<usize>()
                .map_err(|_| Error::format(format!("bad number {x:?} in code spec {s:?}")))
        };
        match parts.as_slice() {
            ["random", n, k] => Ok(CodeSpec::Random {
                n: num(n)?,
                k: num(k)?,
            }),
            [m, t] => Ok(CodeSpec::Bch {
                m: num(m)? as u32,
                t: num(t)?,
            }),
            _ => Err(Error::format(format!(
                "code spec {s:?} is neither m':t nor random:n:k"
            ))),
        }
    }
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinearCode")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("k", &self.k)
            .field("t", &self.t)
            .finish_non_exhaustive()
    }
}

impl fmt::Display for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CodeKind::Bch { m } => write!(f, "BCH(m'={m}) [{}, {}, t={}]", self.n, self.k, self.t),
            CodeKind::Random { .. } => write!(f, "random [{}, {}, t={}]", self.n, self.k, self.t),
        }
    }
}
