use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    /// Symplectic bits `(x, z)`; `Y` is `(1, 1)` and carries no hidden phase.
    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }
}

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// An n-qubit Pauli operator `i^phase · σ_0 ⊗ … ⊗ σ_{n-1}` in symplectic form.
///
/// Letters are stored as `(x, z)` bit pairs with `Y = (1, 1)`, so the letter
/// part is always Hermitian and the operator is Hermitian iff `phase` is even.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        let w = words_for(n_qubits);
        PauliString {
            n_qubits,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    /// A single letter on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, letter: PauliLetter) -> Result<Self> {
        let mut p = Self::identity(n_qubits);
        p.set_letter(qubit, letter)?;
        Ok(p)
    }

    pub fn from_letters(letters: &[PauliLetter]) -> Self {
        let mut p = Self::identity(letters.len());
        for (q, &l) in letters.iter().enumerate() {
            p.put(q, l);
        }
        p
    }

    /// Build from sparse `(qubit, letter)` entries.
    pub fn from_sparse(n_qubits: usize, entries: &[(usize, PauliLetter)]) -> Result<Self> {
        let mut p = Self::identity(n_qubits);
        for &(q, l) in entries {
            p.set_letter(q, l)?;
        }
        Ok(p)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Power of `i` multiplying the letter part, in `0..4`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    /// Multiply the operator by `i^k`.
    pub fn times_i_pow(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) % 4;
        self
    }

    pub fn negated(self) -> Self {
        self.times_i_pow(2)
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// Sign of a Hermitian operator: `+1` for phase 0, `-1` for phase 2.
    pub fn sign(&self) -> Option<i8> {
        match self.phase {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn letter(&self, qubit: usize) -> PauliLetter {
        let (w, b) = (qubit / WORD, qubit % WORD);
        PauliLetter::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn letters(&self) -> Vec<PauliLetter> {
        (0..self.n_qubits).map(|q| self.letter(q)).collect()
    }

    pub fn set_letter(&mut self, qubit: usize, letter: PauliLetter) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: qubit + 1,
            });
        }
        self.put(qubit, letter);
        Ok(())
    }

    fn put(&mut self, qubit: usize, letter: PauliLetter) {
        let (w, b) = (qubit / WORD, qubit % WORD);
        let (xb, zb) = letter.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// True when every letter is `I` (the phase is ignored).
    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits)
            .filter(|&q| self.letter(q) != PauliLetter::I)
            .collect()
    }

    /// The letter part with phase reset to zero.
    pub fn unsigned(&self) -> Self {
        self.clone().with_phase(0)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Dimension {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Whether `self` and `other` commute, from the symplectic inner product.
    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        self.check_same(other)?;
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= (self.x[i] & other.z[i]).count_ones() ^ (self.z[i] & other.x[i]).count_ones();
        }
        Ok(parity & 1 == 0)
    }

    /// Exact product `self · other` with the phase tracked mod 4.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        // With σ(x,z) = i^{xz} X^x Z^z, moving Z^{z1} past X^{x2} costs (-1)^{z1·x2}.
        let mut e: u32 = self.phase as u32 + other.phase as u32;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.x.len());
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[i], self.z[i], other.x[i], other.z[i]);
            let (xo, zo) = (x1 ^ x2, z1 ^ z2);
            e += (x1 & z1).count_ones() + (x2 & z2).count_ones() + 2 * (z1 & x2).count_ones();
            e += 4 * 64 - (xo & zo).count_ones();
            x.push(xo);
            z.push(zo);
        }
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x,
            z,
            phase: (e % 4) as u8,
        })
    }

    /// Letters at the given qubits, in order.
    pub fn restricted_to(&self, qubits: &[usize]) -> Vec<PauliLetter> {
        qubits.iter().map(|&q| self.letter(q)).collect()
    }
}

/// Free-function form of [`PauliString::commutes_with`].
pub fn pauli_commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.commutes_with(q)
}

/// Free-function form of [`PauliString::multiply`].
pub fn pauli_multiply(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    p.multiply(q)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != 0 {
            write!(f, "i^{}·", self.phase)?;
        }
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `XYZI`, optionally prefixed by `i^k·` (or `i^k*`), or by a
    /// bare sign `+`/`-`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(rest) = s.strip_prefix("i^") {
            let sep = rest
                .find(['·', '*'])
                .ok_or_else(|| invalid(format!("missing phase separator in {s:?}")))?;
            let k: u8 = rest[..sep]
                .parse()
                .map_err(|_| invalid(format!("bad phase exponent in {s:?}")))?;
            let sep_len = rest[sep..].chars().next().map(char::len_utf8).unwrap_or(1);
            (k % 4, &rest[sep + sep_len..])
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else {
            (0, s)
        };
        let letters = body
            .chars()
            .map(|c| PauliLetter::from_char(c).ok_or_else(|| invalid(format!("bad Pauli letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_letters(&letters).with_phase(phase))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("XI").commutes_with(&p("ZI")).unwrap());
        assert!(p("XX").commutes_with(&p("ZZ")).unwrap());
        for q in ["XY", "ZZ", "YI", "IX"] {
            assert!(p("II").commutes_with(&p(q)).unwrap());
        }
    }

    #[test]
    fn mismatched_lengths_are_dimension_errors() {
        assert!(matches!(p("X").commutes_with(&p("XX")), Err(Error::Dimension { .. })));
        assert!(matches!(p("X").multiply(&p("XX")), Err(Error::Dimension { .. })));
    }

    #[test]
    fn single_qubit_table() {
        assert_eq!(p("X").multiply(&p("Y")).unwrap(), p("i^1·Z"));
        assert_eq!(p("Y").multiply(&p("X")).unwrap(), p("i^3·Z"));
        assert_eq!(p("Z").multiply(&p("X")).unwrap(), p("i^1·Y"));
        assert_eq!(p("Y").multiply(&p("Z")).unwrap(), p("i^1·X"));
        for l in ["X", "Y", "Z", "I"] {
            assert_eq!(p(l).multiply(&p(l)).unwrap(), p("I"));
        }
    }

    #[test]
    fn display_round_trip() {
        for s in ["XYZI", "i^1·ZZ", "i^2·Y", "i^3·IXI"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("-XZ"), p("i^2·XZ"));
        assert_eq!(p("i^1*XZ"), p("i^1·XZ"));
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn wide_strings_cross_word_boundaries() {
        let n = 130;
        let a = PauliString::single(n, 127, PauliLetter::X).unwrap();
        let b = PauliString::single(n, 127, PauliLetter::Z).unwrap();
        let c = PauliString::single(n, 3, PauliLetter::Z).unwrap();
        assert!(!a.commutes_with(&b).unwrap());
        assert!(a.commutes_with(&c).unwrap());
        let ab = a.multiply(&b).unwrap();
        assert_eq!(ab.letter(127), PauliLetter::Y);
        assert_eq!(ab.phase(), 3);
        assert_eq!(ab.weight(), 1);
    }
}
