//! Dense GF(2) linear algebra over rows of `BitString`.

use crate::bits::BitString;

/// Reduced row echelon form. Returns the nonzero reduced rows and, for
/// each, its pivot column (0-based), in increasing pivot order.
pub fn rref(rows: &[BitString]) -> (Vec<BitString>, Vec<usize>) {
    let mut m: Vec<BitString> = rows.to_vec();
    let ncols = m.first().map_or(0, BitString::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i].bit(col)) else {
            continue;
        };
        m.swap(r, p);
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row.bit(col) {
                row.xor_assign(&pivot_row).expect("rows share a length");
            }
        }
        pivots.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[BitString]) -> usize {
    rref(rows).1.len()
}

/// Basis of `{x : row · x = 0 for every row}`.
pub fn kernel_basis(rows: &[BitString], ncols: usize) -> Vec<BitString> {
    let (reduced, pivots) = rref(rows);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = BitString::zeros(ncols);
            v.set_bit(free, true);
            for (row, &p) in reduced.iter().zip(&pivots) {
                if row.bit(free) {
                    v.set_bit(p, true);
                }
            }
            v
        })
        .collect()
}

/// Inverse of a square matrix given by rows, or `None` if singular.
pub fn inverse(rows: &[BitString]) -> Option<Vec<BitString>> {
    let k = rows.len();
    if rows.iter().any(|r| r.len() != k) {
        return None;
    }
    let mut aug: Vec<BitString> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut unit = BitString::zeros(k);
            unit.set_bit(i, true);
            r.concat(&unit)
        })
        .collect();
    for col in 0..k {
        let p = (col..k).find(|&i| aug[i].bit(col))?;
        aug.swap(col, p);
        let pivot_row = aug[col].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != col && row.bit(col) {
                row.xor_assign(&pivot_row).expect("rows share a length");
            }
        }
    }
    Some(aug.into_iter().map(|r| r.suffix(k)).collect())
}

/// `M · x` where `M` is given by rows.
pub fn mul_vec(rows: &[BitString], x: &BitString) -> BitString {
    let mut out = BitString::zeros(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.dot(x) {
            out.set_bit(i, true);
        }
    }
    out
}

/// Transpose of a matrix given by rows of length `ncols`.
pub fn transpose(rows: &[BitString], ncols: usize) -> Vec<BitString> {
    let mut out = vec![BitString::zeros(rows.len()); ncols];
    for (i, row) in rows.iter().enumerate() {
        for j in row.one_indices() {
            out[j].set_bit(i, true);
        }
    }
    out
}
