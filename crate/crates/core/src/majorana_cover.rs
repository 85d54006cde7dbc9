//! Pairing covers for fermionic reduced density matrices.
//!
//! A pairing (perfect matching of the `2N` Majorana modes) makes every
//! product of its pairs simultaneously measurable. [`pairing_cliques_1rdm`]
//! returns `2N − 1` pairings containing every mode pair, and
//! [`four_majorana_cover`] returns about `(10/3)N²` pairings such that every
//! set of four modes is the union of two pairs of one pairing.
//!
//! The four-mode construction works on block positions padded to a power of
//! two. For the smallest aligned block holding a quadruple, either two
//! modes sit in each half (case 1) or one half holds a single mode (case 2).

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::algebra::MajoranaMonomial;
use crate::error::{invalid, validation, Result};
use crate::schedule::Provenance;

/// A perfect matching of the `2N` Majorana modes.
///
/// Pairs are stored as `(i, j)` with `i < j`, sorted by `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    n_fermions: usize,
    pairs: Vec<(usize, usize)>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl Pairing {
    pub fn new(n_fermions: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let mut pairs: Vec<(usize, usize)> = pairs.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        pairs.sort_unstable();
        if pairs.len() != n_fermions {
            return Err(validation(format!(
                "a pairing of {} modes needs {n_fermions} pairs, got {}",
                2 * n_fermions,
                pairs.len()
            )));
        }
        let mut seen = vec![false; 2 * n_fermions];
        for &(a, b) in &pairs {
            for m in [a, b] {
                if m >= 2 * n_fermions || seen[m] || a == b {
                    return Err(validation(format!("not a perfect matching: {pairs:?}")));
                }
                seen[m] = true;
            }
        }
        Ok(Pairing { n_fermions, pairs, provenance: Provenance::default() })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn n_fermions(&self) -> usize {
        self.n_fermions
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Partner of each mode, indexed by mode.
    pub fn partners(&self) -> Vec<usize> {
        let mut out = vec![0; 2 * self.n_fermions];
        for &(a, b) in &self.pairs {
            out[a] = b;
            out[b] = a;
        }
        out
    }

    pub fn contains_pair(&self, a: usize, b: usize) -> bool {
        self.pairs.binary_search(&(a.min(b), a.max(b))).is_ok()
    }
}

/// The aligned block `B^n_m = [m·2^n, (m+1)·2^n)` of mode positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub n: usize,
    pub m: usize,
}

impl Block {
    pub fn range(&self) -> std::ops::Range<usize> {
        (self.m << self.n)..((self.m + 1) << self.n)
    }

    /// Blocks of level `n` tiling `0..len`; the last one may be cut short.
    pub fn tiling(n: usize, len: usize) -> Vec<Block> {
        (0..len.div_ceil(1 << n)).map(|m| Block { n, m }).collect()
    }
}

/// Rounds of a round-robin tournament on `items`: every two items meet in
/// exactly one round. Even counts give `len − 1` perfect matchings, odd
/// counts `len` matchings each leaving one item out. Power-of-two counts
/// use the XOR rounds `i ↔ i ⊕ r`.
pub fn one_factorization(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let n = items.len();
    if n < 2 {
        return Vec::new();
    }
    if n.is_power_of_two() {
        return (1..n)
            .map(|r| {
                (0..n)
                    .filter(|&i| i < i ^ r)
                    .map(|i| (items[i], items[i ^ r]))
                    .collect()
            })
            .collect();
    }
    // Circle method: slot `m - 1` stays put (a bye when n is odd).
    let m = n + n % 2;
    let ring = m - 1;
    (0..ring)
        .map(|r| {
            let mut slots = vec![(r, m - 1)];
            slots.extend((1..m / 2).map(|i| ((r + i) % ring, (r + ring - i) % ring)));
            let mut round: Vec<(usize, usize)> = slots
                .into_iter()
                .filter(|&(a, b)| a < n && b < n)
                .map(|(a, b)| (items[a].min(items[b]), items[a].max(items[b])))
                .collect();
            round.sort_unstable();
            round
        })
        .collect()
}

/// `2N − 1` pairings containing every pair of the `2N` modes.
pub fn pairing_cliques_1rdm(n_fermions: usize) -> Result<Vec<Pairing>> {
    if n_fermions == 0 {
        return Err(invalid("the 1-RDM cover needs at least one fermion"));
    }
    let modes = 2 * n_fermions;
    if !n_fermions.is_power_of_two() {
        let all: Vec<usize> = (0..modes).collect();
        return one_factorization(&all)
            .into_iter()
            .enumerate()
            .map(|(r, pairs)| {
                Ok(Pairing::new(n_fermions, pairs)?.with_provenance(Provenance::new("round-robin", &[("round", r)])))
            })
            .collect();
    }
    let mut out = Vec::with_capacity(modes - 1);
    let levels = modes.trailing_zeros() as usize;
    for n in 0..levels {
        let half = 1 << n;
        for a in 0..half {
            let mut pairs = Vec::with_capacity(n_fermions);
            for m in 0..modes / (2 * half) {
                for i in 0..half {
                    pairs.push((m * 2 * half + i, (2 * m + 1) * half + (i + a) % half));
                }
            }
            out.push(Pairing::new(n_fermions, pairs)?.with_provenance(Provenance::new("binary", &[("a", a), ("n", n)])));
        }
    }
    Ok(out)
}

/// A matching on a subset of modes together with its construction labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMatching {
    pub pairs: Vec<(usize, usize)>,
    pub provenance: Provenance,
}

/// Matchings on `modes` such that every four of them form two pairs of one
/// matching. Pairs are reported as mode values `(min, max)`, sorted.
///
/// The modes are split by a balanced binary tree (lower half gets the extra
/// element). For power-of-two counts the depth-`d` nodes are the aligned
/// blocks of size `2^{L-d}`. Matchings may be partial when node sizes are
/// odd; ones whose pairs all appear in another matching are dropped.
pub fn quad_cover(modes: &[usize]) -> Vec<PartialMatching> {
    let s = modes.len();
    if s < 4 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut seen: HashSet<Vec<(usize, usize)>> = HashSet::new();
    let mut emit = |mut pairs: Vec<(usize, usize)>, prov: Provenance| {
        for pr in pairs.iter_mut() {
            *pr = (pr.0.min(pr.1), pr.0.max(pr.1));
        }
        pairs.sort_unstable();
        if pairs.len() >= 2 && seen.insert(pairs.clone()) {
            out.push(PartialMatching { pairs, provenance: prov });
        }
    };

    let mut depth = 0;
    let mut nodes: Vec<&[usize]> = vec![modes];
    while nodes.iter().any(|n| n.len() >= 3) {
        let halves: Vec<[&[usize]; 2]> = nodes
            .iter()
            .map(|n| {
                let (lo, hi) = n.split_at(n.len().div_ceil(2));
                [lo, hi]
            })
            .collect();
        let rounds: Vec<[Vec<Vec<(usize, usize)>>; 2]> =
            halves.iter().map(|[lo, hi]| [one_factorization(lo), one_factorization(hi)]).collect();
        let max_rounds = |side: usize| rounds.iter().map(|r| r[side].len()).max().unwrap_or(0);

        // Case 1: two modes in each half of the smallest node.
        for t0 in 0..max_rounds(0) {
            for t1 in 0..max_rounds(1) {
                let mut pairs = Vec::with_capacity(s / 2);
                for r in &rounds {
                    pairs.extend(r[0].get(t0).into_iter().flatten());
                    pairs.extend(r[1].get(t1).into_iter().flatten());
                }
                emit(pairs, Provenance::new("quad-split", &[("depth", depth), ("t0", t0), ("t1", t1)]));
            }
        }

        // Case 2: three modes inside node B0, split 1 + 2 across its halves,
        // and the fourth in another node B1 of the same depth. The lone
        // mode's half is cross-paired with a half of B1 under a cyclic
        // shift; the remaining halves pair internally.
        let n_nodes = nodes.len();
        let max_half = halves.iter().map(|h| h[0].len()).max().unwrap_or(0);
        let max_inner = max_rounds(0).max(max_rounds(1));
        for r in 1..n_nodes.next_power_of_two() {
            let node_pairs: Vec<(usize, usize)> =
                (0..n_nodes).filter(|&i| i < i ^ r && (i ^ r) < n_nodes).map(|i| (i, i ^ r)).collect();
            if node_pairs.is_empty() {
                continue;
            }
            for a0 in 0..2 {
                for a1 in 0..2 {
                    for shift in 0..max_half {
                        for t in 0..max_inner {
                            let mut pairs = Vec::with_capacity(s / 2);
                            for &(b0, b1) in &node_pairs {
                                let (q0, q1) = (halves[b0][a0], halves[b1][a1]);
                                let m = q0.len().max(q1.len());
                                pairs.extend(
                                    q0.iter()
                                        .enumerate()
                                        .filter_map(|(x, &y)| q1.get((x + shift) % m).map(|&z| (y, z))),
                                );
                                pairs.extend(rounds[b0][1 - a0].get(t).into_iter().flatten());
                                pairs.extend(rounds[b1][1 - a1].get(t).into_iter().flatten());
                            }
                            emit(
                                pairs,
                                Provenance::new(
                                    "quad-cross",
                                    &[("a0", a0), ("a1", a1), ("depth", depth), ("round", r), ("shift", shift), ("t", t)],
                                ),
                            );
                        }
                    }
                }
            }
        }

        nodes = halves.into_iter().flatten().collect();
        depth += 1;
    }
    if s.is_power_of_two() {
        out
    } else {
        drop_dominated(out)
    }
}

/// Remove matchings whose pair set is contained in another kept matching.
fn drop_dominated(items: Vec<PartialMatching>) -> Vec<PartialMatching> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(items[i].pairs.len()));
    let mut by_pair: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut keep = vec![false; items.len()];
    for &i in &order {
        let pairs = &items[i].pairs;
        let dominated = by_pair.get(&pairs[0]).is_some_and(|cands| {
            cands.iter().any(|&j| pairs.iter().all(|pr| items[j].pairs.binary_search(pr).is_ok()))
        });
        if !dominated {
            keep[i] = true;
            for &pr in pairs {
                by_pair.entry(pr).or_default().push(i);
            }
        }
    }
    items.into_iter().zip(keep).filter_map(|(m, k)| k.then_some(m)).collect()
}

/// Extend a partial matching to a perfect one by pairing the unused modes
/// in increasing order.
pub fn complete_matching(n_fermions: usize, pairs: &[(usize, usize)]) -> Result<Vec<(usize, usize)>> {
    let mut used = vec![false; 2 * n_fermions];
    for &(a, b) in pairs {
        for m in [a, b] {
            if m >= used.len() || used[m] {
                return Err(validation(format!("pairs do not form a matching: {pairs:?}")));
            }
            used[m] = true;
        }
    }
    let rest: Vec<usize> = (0..2 * n_fermions).filter(|&m| !used[m]).collect();
    let mut out = pairs.to_vec();
    out.extend(rest.chunks(2).map(|c| (c[0], c[1])));
    Ok(out)
}

/// Pairings such that every four modes are covered by two pairs of one
/// pairing.
pub fn four_majorana_cover(n_fermions: usize) -> Result<Vec<Pairing>> {
    if n_fermions < 2 {
        return Err(invalid(format!("the 2-RDM cover needs N ≥ 2, got {n_fermions}")));
    }
    let modes: Vec<usize> = (0..2 * n_fermions).collect();
    complete_all(n_fermions, quad_cover(&modes))
}

/// Complete partial matchings to pairings, dropping repeats.
pub(crate) fn complete_all(n_fermions: usize, parts: Vec<PartialMatching>) -> Result<Vec<Pairing>> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(parts.len());
    for part in parts {
        let p = Pairing::new(n_fermions, complete_matching(n_fermions, &part.pairs)?)?;
        if seen.insert(p.pairs.clone()) {
            out.push(p.with_provenance(part.provenance));
        }
    }
    Ok(out)
}

/// All `C(N, k)` products of `k` pairs `iγ_aγ_b` of the pairing.
pub fn clique_operators(p: &Pairing, k: usize) -> Result<Vec<MajoranaMonomial>> {
    let n = p.pairs.len();
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 ≤ k ≤ {n}, got {k}")));
    }
    let singles: Vec<MajoranaMonomial> = p
        .pairs
        .iter()
        .map(|&(a, b)| MajoranaMonomial::pair(a, b))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let m = idx.iter().fold(MajoranaMonomial::identity(), |acc, &i| acc.multiply(&singles[i]));
        out.push(m);
        // Next k-combination in lexicographic order.
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else { break };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
    Ok(out)
}

/// Whether some pairing holds two pairs whose union is `quad`.
pub fn covers_quadruple(family: &[Pairing], quad: [usize; 4]) -> Result<bool> {
    let mut q = quad;
    q.sort_unstable();
    if q.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid(format!("quadruple has repeated modes: {quad:?}")));
    }
    Ok(family.iter().any(|p| {
        let Ok(i) = p.pairs.binary_search_by(|&(a, _)| a.cmp(&q[0])) else { return false };
        let partner = p.pairs[i].1;
        let rest: Vec<usize> = q[1..].iter().copied().filter(|&m| m != partner).collect();
        rest.len() == 2 && p.contains_pair(rest[0], rest[1])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_pairs_covered(n: usize, family: &[Pairing]) -> bool {
        (0..2 * n).all(|a| (a + 1..2 * n).all(|b| family.iter().any(|p| p.contains_pair(a, b))))
    }

    fn all_quads_covered(n: usize, family: &[Pairing]) -> bool {
        let m = 2 * n;
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    for d in c + 1..m {
                        if !covers_quadruple(family, [a, b, c, d]).unwrap() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn pairing_validation() {
        assert!(Pairing::new(2, vec![(0, 1), (2, 3)]).is_ok());
        assert!(Pairing::new(2, vec![(0, 1), (1, 3)]).is_err());
        assert!(Pairing::new(2, vec![(0, 1)]).is_err());
        assert!(Pairing::new(2, vec![(0, 1), (2, 4)]).is_err());
        let p = Pairing::new(2, vec![(3, 1), (2, 0)]).unwrap();
        assert_eq!(p.pairs(), &[(0, 2), (1, 3)]);
    }

    #[test]
    fn one_factorizations_cover_every_pair_once() {
        for n in 2..=13 {
            let items: Vec<usize> = (0..n).map(|i| 3 * i + 1).collect();
            let rounds = one_factorization(&items);
            assert_eq!(rounds.len(), if n % 2 == 0 { n - 1 } else { n });
            let mut count = HashMap::new();
            for r in &rounds {
                let mut used = HashSet::new();
                for &(a, b) in r {
                    assert!(used.insert(a) && used.insert(b));
                    *count.entry((a, b)).or_insert(0) += 1;
                }
                assert_eq!(r.len(), n / 2);
            }
            assert_eq!(count.len(), n * (n - 1) / 2);
            assert!(count.values().all(|&c| c == 1));
        }
    }

    #[test]
    fn one_rdm_small_cases() {
        let f = pairing_cliques_1rdm(1).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].pairs(), &[(0, 1)]);
        for n in 1..=12 {
            let f = pairing_cliques_1rdm(n).unwrap();
            assert_eq!(f.len(), 2 * n - 1, "N = {n}");
            assert!(all_pairs_covered(n, &f), "N = {n}");
        }
        assert!(pairing_cliques_1rdm(0).is_err());
    }

    #[test]
    fn binary_labels() {
        let f = pairing_cliques_1rdm(2).unwrap();
        // n = 0 pairs neighbours.
        assert_eq!(f[0].pairs(), &[(0, 1), (2, 3)]);
        assert_eq!(f[0].provenance.labels["n"], 0);
    }

    #[test]
    fn two_rdm_power_of_two_counts() {
        assert_eq!(four_majorana_cover(2).unwrap().len(), 1);
        assert_eq!(four_majorana_cover(4).unwrap().len(), 17);
        assert_eq!(four_majorana_cover(8).unwrap().len(), 127);
        assert!(four_majorana_cover(1).is_err());
    }

    #[test]
    fn two_rdm_small_coverage() {
        for n in 2..=9 {
            let f = four_majorana_cover(n).unwrap();
            assert!(all_quads_covered(n, &f), "N = {n}");
        }
    }

    #[test]
    fn covers_quadruple_examples() {
        let f = vec![Pairing::new(4, vec![(0, 1), (2, 3), (4, 5), (6, 7)]).unwrap()];
        assert!(covers_quadruple(&f, [0, 1, 2, 3]).unwrap());
        assert!(covers_quadruple(&f, [3, 2, 7, 6]).unwrap());
        assert!(!covers_quadruple(&f, [0, 2, 4, 6]).unwrap());
        assert!(covers_quadruple(&f, [0, 0, 1, 2]).is_err());
        assert!(!all_quads_covered(4, &pairing_cliques_1rdm(4).unwrap()));
    }

    #[test]
    fn clique_operators_sizes_and_commutation() {
        let p = Pairing::new(2, vec![(0, 1), (2, 3)]).unwrap();
        let ops = clique_operators(&p, 2).unwrap();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0].modes(), &[0, 1, 2, 3]);
        assert!(ops[0].is_hermitian());
        let p = Pairing::new(4, vec![(0, 5), (1, 2), (3, 7), (4, 6)]).unwrap();
        let ops = clique_operators(&p, 2).unwrap();
        assert_eq!(ops.len(), 6);
        for a in &ops {
            assert!(a.is_hermitian());
            for b in &ops {
                assert!(a.commutes_with(b));
            }
        }
        assert!(clique_operators(&p, 0).is_err());
        assert!(clique_operators(&p, 5).is_err());
    }

    #[test]
    fn completion() {
        assert_eq!(complete_matching(3, &[(1, 4)]).unwrap(), vec![(1, 4), (0, 2), (3, 5)]);
        assert!(complete_matching(2, &[(0, 1), (1, 2)]).is_err());
    }

    #[test]
    fn blocks_tile() {
        let t = Block::tiling(2, 10);
        assert_eq!(t.len(), 3);
        assert_eq!(t[1].range(), 4..8);
    }
}
