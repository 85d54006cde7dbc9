//! Pauli-word families containing every k-qubit Pauli operator.
//!
//! A word assigns one measurement basis per qubit. The families are built
//! from binary partitions of the qubit indices: level `n` splits the qubits
//! by their `n`-th binary digit. For k = 2 every pair of qubits is split by
//! some level, which gives `6⌈log N⌉ + 3` words after removing repeats. For
//! larger k the partitions are refined recursively inside the contiguous
//! blocks left unsplit by higher levels.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{PauliLetter, PauliString};
use crate::error::{invalid, Error, Result};

const BASES: [PauliLetter; 3] = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

/// `⌈log₂ n⌉`, with `ceil_log2(1) == 0`.
pub fn ceil_log2(n: usize) -> usize {
    assert!(n > 0, "ceil_log2 of zero");
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// One measurement basis letter per qubit, drawn from `{X, Y, Z}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord(Vec<PauliLetter>);

impl PauliWord {
    pub fn new(letters: Vec<PauliLetter>) -> Result<Self> {
        if letters.contains(&PauliLetter::I) {
            return Err(invalid("a Pauli word has no identity letters"));
        }
        Ok(PauliWord(letters))
    }

    pub fn uniform(n_qubits: usize, letter: PauliLetter) -> Self {
        PauliWord(vec![letter; n_qubits])
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.0
    }

    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn to_pauli(&self) -> PauliString {
        PauliString::from_letters(&self.0)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| match PauliLetter::from_char(c) {
                Some(l) if l != PauliLetter::I => Ok(l),
                _ => Err(invalid(format!("bad word letter {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliWord(letters))
    }
}

impl Serialize for PauliWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The two parts `S_{n,0}`, `S_{n,1}` of the level-`n` binary partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryPartition {
    pub n_qubits: usize,
    pub level: usize,
    pub parts: [Vec<usize>; 2],
}

impl BinaryPartition {
    pub fn part_of(&self, qubit: usize) -> usize {
        (qubit >> self.level) & 1
    }
}

/// Split `0..n_qubits` by binary digit `level`.
pub fn binary_partition(n_qubits: usize, level: usize) -> Result<BinaryPartition> {
    if n_qubits < 2 || level >= ceil_log2(n_qubits) {
        return Err(invalid(format!(
            "level {level} out of range for {n_qubits} qubits"
        )));
    }
    let mut parts = [Vec::new(), Vec::new()];
    for q in 0..n_qubits {
        parts[(q >> level) & 1].push(q);
    }
    Ok(BinaryPartition { n_qubits, level, parts })
}

/// The `6⌈log N⌉ + 3` words containing every 2-qubit operator.
pub fn qubit_words_k2(n_qubits: usize) -> Result<Vec<PauliWord>> {
    if n_qubits < 2 {
        return Err(invalid(format!(
            "k = 2 needs at least two qubits, got {n_qubits}"
        )));
    }
    let mut out = Dedup::default();
    for level in 0..ceil_log2(n_qubits) {
        let part = binary_partition(n_qubits, level)?;
        for &a in &BASES {
            for &b in &BASES {
                if a == b {
                    continue;
                }
                let pick = [a, b];
                out.push(PauliWord(
                    (0..n_qubits).map(|q| pick[part.part_of(q)]).collect(),
                ));
            }
        }
    }
    for &a in &BASES {
        out.push(PauliWord::uniform(n_qubits, a));
    }
    Ok(out.words)
}

/// Words containing every k-qubit operator on `n_qubits` qubits.
pub fn qubit_words_k(n_qubits: usize, k: usize) -> Result<Vec<PauliWord>> {
    if k == 0 || k > n_qubits {
        return Err(invalid(format!("need 1 ≤ k ≤ N, got k = {k}, N = {n_qubits}")));
    }
    match k {
        1 => Ok(BASES.iter().map(|&l| PauliWord::uniform(n_qubits, l)).collect()),
        2 => qubit_words_k2(n_qubits),
        _ => {
            let levels = ceil_log2(n_qubits);
            let mut families = ColoringFamilies::default();
            let colorings = families.get(k, levels);
            let mut out = Dedup::default();
            let mut assignment = vec![0usize; k];
            for c in colorings.iter() {
                let colors: Vec<usize> = (0..n_qubits).map(|q| c.color(q)).collect();
                assignment.iter_mut().for_each(|a| *a = 0);
                loop {
                    out.push(PauliWord(colors.iter().map(|&col| BASES[assignment[col]]).collect()));
                    if !advance(&mut assignment, 3) {
                        break;
                    }
                }
            }
            Ok(out.words)
        }
    }
}

/// Odometer increment over `base^len`; false once it wraps.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Whether every non-identity letter of `p` matches `w` on that qubit.
pub fn word_contains(w: &PauliWord, p: &PauliString) -> bool {
    if w.n_qubits() != p.n_qubits() {
        return false;
    }
    (0..w.n_qubits()).all(|q| {
        let l = p.letter(q);
        l == PauliLetter::I || l == w.0[q]
    })
}

#[derive(Default)]
struct Dedup {
    seen: HashSet<PauliWord>,
    words: Vec<PauliWord>,
}

impl Dedup {
    fn push(&mut self, w: PauliWord) {
        if self.seen.insert(w.clone()) {
            self.words.push(w);
        }
    }
}

/// A map from qubit index to one of `k` colours that only reads binary
/// digits below the level it was built for.
#[derive(Debug, Clone)]
enum Coloring {
    Uniform,
    /// Digit `level` chooses the half; the lower half uses colours
    /// `0..offset` via `lower`, the upper half `offset..` via `upper`.
    Split {
        level: usize,
        offset: usize,
        lower: Box<Coloring>,
        upper: Box<Coloring>,
    },
}

impl Coloring {
    fn color(&self, q: usize) -> usize {
        match self {
            Coloring::Uniform => 0,
            Coloring::Split { level, offset, lower, upper } => {
                if (q >> level) & 1 == 0 {
                    lower.color(q)
                } else {
                    offset + upper.color(q)
                }
            }
        }
    }
}

/// Memoized families `F(a, n)`: colourings of blocks of `2^n` indices such
/// that every `a`-subset of a block receives `a` distinct colours.
#[derive(Default)]
struct ColoringFamilies {
    memo: std::collections::HashMap<(usize, usize), std::rc::Rc<Vec<Coloring>>>,
}

impl ColoringFamilies {
    fn get(&mut self, a: usize, levels: usize) -> std::rc::Rc<Vec<Coloring>> {
        if let Some(f) = self.memo.get(&(a, levels)) {
            return f.clone();
        }
        let mut fam = Vec::new();
        if a == 1 {
            fam.push(Coloring::Uniform);
        } else {
            // The highest digit splitting the subset is `level`; its two
            // sides need b and a - b colours inside blocks of 2^level.
            for level in 0..levels {
                for b in 1..a {
                    let lower = self.get(b, level);
                    let upper = self.get(a - b, level);
                    for lo in lower.iter() {
                        for up in upper.iter() {
                            fam.push(Coloring::Split {
                                level,
                                offset: b,
                                lower: Box::new(lo.clone()),
                                upper: Box::new(up.clone()),
                            });
                        }
                    }
                }
            }
        }
        let fam = std::rc::Rc::new(fam);
        self.memo.insert((a, levels), fam.clone());
        fam
    }
}
