//! Covers restricted to symmetry-conserving 4-Majorana operators.
//!
//! Each mode gets a label whose bit `i` records whether its Jordan–Wigner
//! image anticommutes with symmetry `S_i`. A monomial's label is the XOR of
//! its modes' labels, and only label-zero quadruples need covering. Those
//! come in three shapes:
//!
//! * all four modes in one bin: per-bin quadruple covers, run side by side;
//! * two modes in each of two bins: one internal pair per bin, chosen so
//!   every two bins see every combination of their 1-factorization rounds;
//! * four distinct bins `s, s⊕β, s⊕α, s⊕α⊕β`: two cross-bin pairs for the
//!   same `β`. Of the three splittings of such a quadruple one has `β₀ = 0`,
//!   so only those `β` are generated.

use std::collections::{BTreeMap, HashSet};

use crate::algebra::{jw_single, MajoranaMonomial, PauliString};
use crate::error::{invalid, validation, Error, Result};
use crate::majorana_cover::{complete_all, one_factorization, quad_cover, PartialMatching, Pairing};
use crate::schedule::Provenance;
use crate::tuple_iter::pairwise_cover;

/// Mutually commuting Hermitian Pauli symmetries on the JW qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetrySet {
    operators: Vec<PauliString>,
}

impl SymmetrySet {
    pub fn new(operators: Vec<PauliString>) -> Result<Self> {
        if operators.len() > 16 {
            return Err(invalid("at most 16 symmetries are supported"));
        }
        for (i, s) in operators.iter().enumerate() {
            if !s.is_hermitian() {
                return Err(validation(format!("symmetry {s} is not Hermitian")));
            }
            for t in &operators[..i] {
                if !s.commutes_with(t)? {
                    return Err(validation(format!("symmetries {t} and {s} do not commute")));
                }
            }
        }
        Ok(SymmetrySet { operators })
    }

    pub fn empty() -> Self {
        SymmetrySet { operators: Vec::new() }
    }

    pub fn operators(&self) -> &[PauliString] {
        &self.operators
    }

    pub fn n_sym(&self) -> usize {
        self.operators.len()
    }
}

/// Commutation signature; bit `i` set iff the operator anticommutes with `S_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BinLabel(pub u32);

impl BinLabel {
    pub fn bits(&self, n_sym: usize) -> Vec<u8> {
        (0..n_sym).map(|i| ((self.0 >> i) & 1) as u8).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

/// The label of every mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bins {
    pub n_sym: usize,
    labels: Vec<BinLabel>,
}

impl Bins {
    pub fn from_labels(n_sym: usize, labels: Vec<BinLabel>) -> Result<Self> {
        if labels.iter().any(|l| (l.0 >> n_sym) != 0) {
            return Err(invalid(format!("labels exceed {n_sym} bits")));
        }
        Ok(Bins { n_sym, labels })
    }

    /// Synthetic balanced bins: mode `j` gets label `j mod 2^n_sym`.
    pub fn balanced(n_fermions: usize, n_sym: usize) -> Result<Self> {
        if n_sym > 16 {
            return Err(invalid("at most 16 symmetries are supported"));
        }
        let labels = (0..2 * n_fermions).map(|j| BinLabel((j % (1 << n_sym)) as u32)).collect();
        Ok(Bins { n_sym, labels })
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, mode: usize) -> BinLabel {
        self.labels[mode]
    }

    /// Non-empty bins in label order.
    pub fn groups(&self) -> BTreeMap<BinLabel, Vec<usize>> {
        let mut out: BTreeMap<BinLabel, Vec<usize>> = BTreeMap::new();
        for (m, &l) in self.labels.iter().enumerate() {
            out.entry(l).or_default().push(m);
        }
        out
    }
}

/// Label every mode by its commutation with the symmetries.
pub fn bin_majoranas(n_fermions: usize, syms: &SymmetrySet) -> Result<Bins> {
    for s in syms.operators() {
        if s.n_qubits() != n_fermions {
            return Err(Error::Dimension { expected: n_fermions, found: s.n_qubits() });
        }
    }
    let mut labels = Vec::with_capacity(2 * n_fermions);
    for mode in 0..2 * n_fermions {
        let img = jw_single(mode, n_fermions)?;
        let mut bits = 0u32;
        for (i, s) in syms.operators().iter().enumerate() {
            if !img.commutes_with(s)? {
                bits |= 1 << i;
            }
        }
        labels.push(BinLabel(bits));
    }
    Ok(Bins { n_sym: syms.n_sym(), labels })
}

/// XOR of the labels of the monomial's modes.
pub fn monomial_label(m: &MajoranaMonomial, bins: &Bins) -> BinLabel {
    BinLabel(m.modes().iter().fold(0, |acc, &j| acc ^ bins.label(j).0))
}

/// Pairings covering every label-zero quadruple for the given symmetries.
pub fn symmetry_cover(n_fermions: usize, syms: &SymmetrySet) -> Result<Vec<Pairing>> {
    let bins = bin_majoranas(n_fermions, syms)?;
    symmetry_cover_bins(n_fermions, &bins)
}

/// [`symmetry_cover`] for explicit bins.
pub fn symmetry_cover_bins(n_fermions: usize, bins: &Bins) -> Result<Vec<Pairing>> {
    if n_fermions < 2 {
        return Err(invalid(format!("the 2-RDM cover needs N ≥ 2, got {n_fermions}")));
    }
    if bins.n_modes() != 2 * n_fermions {
        return Err(Error::Dimension { expected: 2 * n_fermions, found: bins.n_modes() });
    }
    let groups = bins.groups();
    let mut rows: Vec<PartialMatching> = Vec::new();

    // All four modes in one bin.
    let per_bin: Vec<Vec<PartialMatching>> = groups.values().map(|modes| quad_cover(modes)).collect();
    let contributing = per_bin.iter().filter(|c| !c.is_empty()).count();
    let depth = per_bin.iter().map(Vec::len).max().unwrap_or(0);
    for i in 0..depth {
        let mut pairs = Vec::new();
        let mut provenance = Provenance::new("bin-internal", &[("row", i)]);
        for c in per_bin.iter().filter_map(|c| c.get(i)) {
            pairs.extend_from_slice(&c.pairs);
            if contributing == 1 {
                provenance = c.provenance.clone();
            }
        }
        rows.push(PartialMatching { pairs, provenance });
    }

    // Two modes in each of two bins.
    let internal: Vec<Vec<Vec<(usize, usize)>>> = groups
        .values()
        .filter(|m| m.len() >= 2)
        .map(|m| one_factorization(m))
        .collect();
    if internal.len() >= 2 {
        let alphabets: Vec<usize> = internal.iter().map(Vec::len).collect();
        for (i, choice) in pairwise_cover(&alphabets)?.into_iter().enumerate() {
            let mut pairs = Vec::new();
            for (col, v) in choice.iter().enumerate() {
                if let Some(v) = v {
                    pairs.extend_from_slice(&internal[col][*v]);
                }
            }
            rows.push(PartialMatching { pairs, provenance: Provenance::new("bin-pairs", &[("beta", 0), ("row", i)]) });
        }
    }

    // Four distinct bins: cross pairs (s, s⊕β) for each β with β₀ = 0.
    let empty = Vec::new();
    for beta in (2..1u32 << bins.n_sym).step_by(2) {
        let columns: Vec<(&Vec<usize>, &Vec<usize>)> = groups
            .iter()
            .filter(|(s, _)| s.0 < s.0 ^ beta)
            .map(|(s, m)| (m, groups.get(&BinLabel(s.0 ^ beta)).unwrap_or(&empty)))
            .filter(|(_, other)| !other.is_empty())
            .collect();
        if columns.len() < 2 {
            continue;
        }
        let alphabets: Vec<usize> = columns.iter().map(|(a, b)| a.len().max(b.len())).collect();
        for (i, choice) in pairwise_cover(&alphabets)?.into_iter().enumerate() {
            let mut pairs = Vec::new();
            for (col, shift) in choice.iter().enumerate() {
                let Some(shift) = shift else { continue };
                let (a, b) = columns[col];
                let m = alphabets[col];
                pairs.extend(a.iter().enumerate().filter_map(|(x, &y)| b.get((x + shift) % m).map(|&z| (y.min(z), y.max(z)))));
            }
            rows.push(PartialMatching {
                pairs,
                provenance: Provenance::new("bin-cross", &[("beta", beta as usize), ("row", i)]),
            });
        }
    }

    let mut seen = HashSet::new();
    rows.retain(|r| r.pairs.len() >= 2 && {
        let mut key = r.pairs.clone();
        key.sort_unstable();
        seen.insert(key)
    });
    for r in rows.iter_mut() {
        r.pairs.sort_unstable();
    }
    complete_all(n_fermions, rows)
}

/// Leading-order count `N²(10/3·4^{−n} + 2^{1−n})`.
pub fn predicted_count(n_fermions: usize, n_sym: usize) -> f64 {
    let n = n_fermions as f64;
    n * n * (10.0 / 3.0 * 4f64.powi(-(n_sym as i32)) + 2f64.powi(1 - n_sym as i32))
}
