//! Iterating K lists jointly so that every cross-list pair shares a tuple.
//!
//! [`parallel_iterate`] is the linear rule: tuple `(j, l)` takes element
//! `j·k + l mod L′` from list `k`. Two lists `k₁ ≠ k₂` meet every pair once
//! provided `k₁ − k₂` is invertible mod `L′`, which [`pad_length`] ensures.
//!
//! [`pairwise_cover`] picks the smallest of three strength-2 covering
//! arrays (the linear rule, a Bose orthogonal array, a greedy
//! in-parameter-order array). Bins of very different sizes or many small
//! bins make the linear rule wasteful, since `L′` must exceed `K − 1`.

use crate::error::{invalid, Result};

/// The linear-rule tuples for `k_lists` lists padded to `padded_length`.
///
/// `None` marks a padding slot (an index beyond that list's real length).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleSchedule {
    pub k_lists: usize,
    pub padded_length: usize,
    pub tuples: Vec<Vec<Option<usize>>>,
}

/// Smallest prime factor of `n`; `None` for `n ≤ 1`.
pub fn smallest_prime_factor(n: usize) -> Option<usize> {
    if n < 2 {
        return None;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return Some(d);
        }
        d += 1;
    }
    Some(n)
}

/// Smallest `L′ ≥ l` for which the linear rule over `k` lists is a pair
/// cover: every difference `1..k` must be a unit mod `L′`.
pub fn pad_length(l: usize, k: usize) -> usize {
    let mut n = l.max(1);
    loop {
        match smallest_prime_factor(n) {
            None => return n,
            Some(p) if p >= k => return n,
            _ => n += 1,
        }
    }
}

/// Linear-rule tuples over lists of the given lengths.
///
/// Lists shorter than the longest are padded. Tuples that are padding in
/// every slot are dropped.
pub fn parallel_iterate(lengths: &[usize]) -> Result<TupleSchedule> {
    let k = lengths.len();
    if k < 2 {
        return Err(invalid(format!("parallel_iterate needs at least two lists, got {k}")));
    }
    let l = lengths.iter().copied().max().unwrap_or(0);
    if l == 0 {
        return Err(invalid("parallel_iterate needs non-empty lists"));
    }
    let lp = pad_length(l, k);
    let mut tuples = Vec::with_capacity(lp * lp);
    for j in 0..lp {
        for off in 0..lp {
            let t: Vec<Option<usize>> = lengths
                .iter()
                .enumerate()
                .map(|(list, &len)| {
                    let idx = (j * list + off) % lp;
                    (idx < len).then_some(idx)
                })
                .collect();
            if t.iter().any(Option::is_some) {
                tuples.push(t);
            }
        }
    }
    Ok(TupleSchedule { k_lists: k, padded_length: lp, tuples })
}

/// Rows over columns with the given alphabet sizes such that for any two
/// columns and any pair of values some row carries both. `None` entries are
/// free: the row covers nothing through them.
///
/// Rows covering fewer than two columns are omitted. With one column the
/// result is one row per value.
pub fn pairwise_cover(alphabets: &[usize]) -> Result<Vec<Vec<Option<usize>>>> {
    if alphabets.is_empty() || alphabets.contains(&0) {
        return Err(invalid(format!("pairwise_cover needs non-empty alphabets, got {alphabets:?}")));
    }
    if alphabets.len() == 1 {
        return Ok((0..alphabets[0]).map(|v| vec![Some(v)]).collect());
    }
    let mut best = parallel_iterate(alphabets)?.tuples;
    if alphabets.len() > 2 {
        for candidate in [bose_array(alphabets), Some(greedy_array(alphabets))].into_iter().flatten() {
            if candidate.len() < best.len() {
                best = candidate;
            }
        }
    }
    best.retain(|r| r.iter().filter(|v| v.is_some()).count() >= 2);
    Ok(best)
}

/// Bose construction `OA(q², q+1, q, 2)` truncated to the alphabets, using
/// the smallest field order `q` (prime or power of two) that fits.
fn bose_array(alphabets: &[usize]) -> Option<Vec<Vec<Option<usize>>>> {
    let k = alphabets.len();
    let need = alphabets.iter().copied().max()?.max(k.saturating_sub(1)).max(2);
    let field = (need..).take(4096).find_map(Field::new)?;
    let q = field.order();
    let mut rows = Vec::with_capacity(q * q);
    for a in 0..q {
        for b in 0..q {
            let row: Vec<Option<usize>> = (0..k)
                .map(|c| {
                    let v = if c < q { field.add(field.mul(a, c), b) } else { a };
                    (v < alphabets[c]).then_some(v)
                })
                .collect();
            rows.push(row);
        }
    }
    Some(rows)
}

enum Field {
    Prime(usize),
    /// GF(2^m) with the given reduction polynomial.
    Binary { order: usize, poly: usize },
}

impl Field {
    fn new(q: usize) -> Option<Self> {
        const POLYS: [usize; 11] = [0, 0b11, 0b111, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10000011, 0x11B, 0x211, 0x409];
        if smallest_prime_factor(q) == Some(q) {
            return Some(Field::Prime(q));
        }
        if q.is_power_of_two() {
            let m = q.trailing_zeros() as usize;
            return POLYS.get(m).map(|&poly| Field::Binary { order: q, poly });
        }
        None
    }

    fn order(&self) -> usize {
        match self {
            Field::Prime(p) => *p,
            Field::Binary { order, .. } => *order,
        }
    }

    fn add(&self, a: usize, b: usize) -> usize {
        match self {
            Field::Prime(p) => (a + b) % p,
            Field::Binary { .. } => a ^ b,
        }
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        match self {
            Field::Prime(p) => a * b % p,
            Field::Binary { order, poly } => {
                let (mut a, mut b, mut out) = (a, b, 0);
                while b > 0 {
                    if b & 1 == 1 {
                        out ^= a;
                    }
                    b >>= 1;
                    a <<= 1;
                    if a & order != 0 {
                        a ^= poly;
                    }
                }
                out
            }
        }
    }
}

/// In-parameter-order greedy covering array. Columns are processed from the
/// largest alphabet down; each new column first extends existing rows
/// greedily, then adds rows for pairs still missing.
fn greedy_array(alphabets: &[usize]) -> Vec<Vec<Option<usize>>> {
    let k = alphabets.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| alphabets[b].cmp(&alphabets[a]));
    let sizes: Vec<usize> = order.iter().map(|&c| alphabets[c]).collect();

    let mut rows: Vec<Vec<Option<usize>>> = Vec::new();
    for u in 0..sizes[0] {
        for v in 0..sizes[1] {
            let mut r = vec![None; k];
            r[0] = Some(u);
            r[1] = Some(v);
            rows.push(r);
        }
    }
    for c in 2..k {
        let ac = sizes[c];
        // uncovered[j][u * ac + v]
        let mut uncovered: Vec<Vec<bool>> = (0..c).map(|j| vec![true; sizes[j] * ac]).collect();
        for row in rows.iter_mut() {
            let mut best = (0usize, 0usize);
            for v in 0..ac {
                let gain = (0..c)
                    .filter(|&j| matches!(row[j], Some(u) if uncovered[j][u * ac + v]))
                    .count();
                if gain > best.0 {
                    best = (gain, v);
                }
            }
            if best.0 == 0 {
                continue;
            }
            let v = best.1;
            row[c] = Some(v);
            for j in 0..c {
                if let Some(u) = row[j] {
                    uncovered[j][u * ac + v] = false;
                }
            }
        }
        for j in 0..c {
            for u in 0..sizes[j] {
                for v in 0..ac {
                    if !uncovered[j][u * ac + v] {
                        continue;
                    }
                    let slot = rows.iter().position(|r| {
                        r[j].is_none() && (r[c] == Some(v) || r[c].is_none())
                    });
                    match slot {
                        Some(i) => {
                            rows[i][j] = Some(u);
                            rows[i][c] = Some(v);
                        }
                        None => {
                            let mut r = vec![None; k];
                            r[j] = Some(u);
                            r[c] = Some(v);
                            rows.push(r);
                        }
                    }
                    uncovered[j][u * ac + v] = false;
                }
            }
        }
    }
    rows.into_iter()
        .map(|r| {
            let mut out = vec![None; k];
            for (pos, &col) in order.iter().enumerate() {
                out[col] = r[pos];
            }
            out
        })
        .collect()
}
