use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A product of distinct Majorana operators `i^phase · γ_{m_0} γ_{m_1} …`
/// with strictly increasing mode indices.
///
/// `γ_i² = 1` is applied on construction, so no index repeats. Measurable
/// (Hermitian) operators carry whatever power of `i` Hermiticity needs; the
/// pair operator `iγ_aγ_b` is the basic example.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MajoranaMonomial {
    modes: Vec<usize>,
    phase: u8,
}

/// Sort `seq` into increasing order, cancelling equal neighbours, and return
/// the number of transpositions performed (mod 2 is the sign).
fn normal_order(seq: &mut Vec<usize>) -> usize {
    let mut swaps = 0;
    // Insertion sort keeps the transposition count exact.
    for i in 1..seq.len() {
        let mut j = i;
        while j > 0 && seq[j - 1] > seq[j] {
            seq.swap(j - 1, j);
            swaps += 1;
            j -= 1;
        }
    }
    let mut out: Vec<usize> = Vec::with_capacity(seq.len());
    for &m in seq.iter() {
        if out.last() == Some(&m) {
            out.pop();
        } else {
            out.push(m);
        }
    }
    *seq = out;
    swaps
}

impl MajoranaMonomial {
    /// The identity (empty product).
    pub fn identity() -> Self {
        MajoranaMonomial { modes: Vec::new(), phase: 0 }
    }

    /// The product `γ_{seq[0]} γ_{seq[1]} …` in the given order, normal ordered.
    pub fn product(seq: &[usize]) -> Self {
        let mut modes = seq.to_vec();
        let swaps = normal_order(&mut modes);
        MajoranaMonomial {
            modes,
            phase: if swaps % 2 == 1 { 2 } else { 0 },
        }
    }

    /// Build from strictly increasing modes and an explicit power of `i`.
    pub fn from_sorted(modes: Vec<usize>, phase: u8) -> Result<Self> {
        if modes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid(format!("modes must be strictly increasing: {modes:?}")));
        }
        Ok(MajoranaMonomial { modes, phase: phase % 4 })
    }

    /// The Hermitian operator on the given distinct modes, with the least
    /// power of `i` that makes it Hermitian.
    pub fn hermitian(modes: &[usize]) -> Result<Self> {
        let mut sorted = modes.to_vec();
        sorted.sort_unstable();
        let m = Self::from_sorted(sorted, 0)?;
        let d = m.degree();
        Ok(m.times_i_pow(((d * d.saturating_sub(1) / 2) % 2) as u8))
    }

    /// The pair operator `iγ_aγ_b`, normal ordered.
    pub fn pair(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(invalid(format!("pair needs two distinct modes, got ({a}, {b})")));
        }
        Ok(Self::product(&[a, b]).times_i_pow(1))
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn degree(&self) -> usize {
        self.modes.len()
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn times_i_pow(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) % 4;
        self
    }

    pub fn negated(self) -> Self {
        self.times_i_pow(2)
    }

    /// The same modes with phase reset to zero.
    pub fn unsigned(&self) -> Self {
        MajoranaMonomial { modes: self.modes.clone(), phase: 0 }
    }

    pub fn is_hermitian(&self) -> bool {
        let d = self.degree();
        (self.phase as usize) % 2 == (d * d.saturating_sub(1) / 2) % 2
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.modes.last().copied()
    }

    /// Exact product `self · other`.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut seq = self.modes.clone();
        seq.extend_from_slice(&other.modes);
        let swaps = normal_order(&mut seq);
        let phase = self.phase + other.phase + if swaps % 2 == 1 { 2 } else { 0 };
        MajoranaMonomial { modes: seq, phase: phase % 4 }
    }

    /// Two monomials commute iff `deg(a)·deg(b) − |a ∩ b|` is even.
    pub fn commutes_with(&self, other: &Self) -> bool {
        let shared = count_shared(&self.modes, &other.modes);
        (self.degree() * other.degree() + shared) % 2 == 0
    }
}

fn count_shared(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Free-function form of [`MajoranaMonomial::commutes_with`].
pub fn majorana_commutes(a: &MajoranaMonomial, b: &MajoranaMonomial) -> bool {
    a.commutes_with(b)
}

impl fmt::Display for MajoranaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.phase {
            0 => {}
            1 => write!(f, "i·")?,
            2 => write!(f, "-")?,
            _ => write!(f, "-i·")?,
        }
        if self.modes.is_empty() {
            return write!(f, "1");
        }
        for m in &self.modes {
            write!(f, "γ{m}")?;
        }
        Ok(())
    }
}

impl FromStr for MajoranaMonomial {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form: `γ0γ3`, optionally
    /// prefixed by `i·`, `-` or `-i·`; `1` is the identity.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (phase, body) = if let Some(r) = s.strip_prefix("-i·") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("i·") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s)
        };
        if body == "1" {
            return Ok(Self::identity().times_i_pow(phase));
        }
        let rest = body
            .strip_prefix('γ')
            .ok_or_else(|| invalid(format!("expected γ-modes in {s:?}")))?;
        let modes = rest
            .split('γ')
            .map(|m| m.parse::<usize>().map_err(|_| invalid(format!("bad mode {m:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_sorted(modes, phase)
    }
}
