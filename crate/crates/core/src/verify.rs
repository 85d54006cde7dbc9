//! Independent oracles: coverage checks, Clifford conjugation, dense
//! state-vector simulation, brute-force anticommuting cliques, a sampling
//! estimator and the closed-form counts the covers are compared against.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{PauliLetter, PauliString};
use crate::circuits::{parity_preserved, AntiCommutingSet, MeasurementCircuit, Readout, ReadoutOperator};
use crate::error::{invalid, Error, Result};
use crate::majorana_cover::{clique_operators, Pairing};
use crate::schedule::{word_operators, Payload, Schedule, Scheme};
use crate::qubit_cover::{ceil_log2, PauliWord};
use crate::symmetry_cover::{Bins, SymmetrySet};

/// At most this many missing operators are listed in a report.
const MISSING_LIMIT: usize = 64;
const DENSE_MAX_QUBITS: usize = 12;

/// How exhaustively a coverage check runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    /// Exhaustive inside the desk-scale regime, sampled outside it.
    Auto,
    Exhaustive,
    Sampled(usize),
}

const AUTO_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverReport {
    pub covered: bool,
    /// Whether every target was enumerated.
    pub exhaustive: bool,
    pub checked: u64,
    pub missing_count: u64,
    pub missing: Vec<String>,
}

impl CoverReport {
    fn new(exhaustive: bool) -> Self {
        CoverReport { covered: true, exhaustive, checked: 0, missing_count: 0, missing: Vec::new() }
    }

    fn miss(&mut self, what: impl FnOnce() -> String) {
        self.covered = false;
        self.missing_count += 1;
        if self.missing.len() < MISSING_LIMIT {
            self.missing.push(what());
        }
    }

    fn merge(mut self, other: CoverReport) -> Self {
        self.covered &= other.covered;
        self.checked += other.checked;
        self.missing_count += other.missing_count;
        for m in other.missing {
            if self.missing.len() < MISSING_LIMIT {
                self.missing.push(m);
            }
        }
        self
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

const LETTERS: [PauliLetter; 3] = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

fn letter_index(l: PauliLetter) -> usize {
    match l {
        PauliLetter::X => 0,
        PauliLetter::Y => 1,
        _ => 2,
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else { break };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
    out
}

fn sparse_pauli(n: usize, qubits: &[usize], code: usize) -> String {
    let mut letters = vec![PauliLetter::I; n];
    let mut c = code;
    for &q in qubits.iter().rev() {
        letters[q] = LETTERS[c % 3];
        c /= 3;
    }
    PauliString::from_letters(&letters).to_string()
}

/// Check that every `k`-qubit Pauli operator on `n_qubits` qubits is
/// contained in some word.
pub fn check_cover_qubit(words: &[PauliWord], n_qubits: usize, k: usize, mode: CheckMode) -> Result<CoverReport> {
    if k == 0 || k > n_qubits {
        return Err(invalid(format!("need 1 ≤ k ≤ N, got k = {k}, N = {n_qubits}")));
    }
    if let Some(w) = words.iter().find(|w| w.n_qubits() != n_qubits) {
        return Err(Error::Dimension { expected: n_qubits, found: w.n_qubits() });
    }
    let in_regime = (n_qubits <= 16 && k <= 3) || (n_qubits <= 8 && k <= 4);
    let samples = match mode {
        CheckMode::Exhaustive => None,
        CheckMode::Auto if in_regime => None,
        CheckMode::Auto => Some(AUTO_SAMPLES),
        CheckMode::Sampled(s) => Some(s),
    };
    let words_letters: Vec<&[PauliLetter]> = words.iter().map(|w| w.letters()).collect();
    let code_of = |w: &[PauliLetter], qs: &[usize]| qs.iter().fold(0usize, |acc, &q| acc * 3 + letter_index(w[q]));
    match samples {
        None => {
            let total = 3usize.pow(k as u32);
            Ok(subsets(n_qubits, k)
                .into_par_iter()
                .map(|qs| {
                    let mut seen = vec![false; total];
                    for w in &words_letters {
                        seen[code_of(w, &qs)] = true;
                    }
                    let mut r = CoverReport::new(true);
                    r.checked = total as u64;
                    for (code, &s) in seen.iter().enumerate() {
                        if !s {
                            r.miss(|| sparse_pauli(n_qubits, &qs, code));
                        }
                    }
                    r
                })
                .reduce(|| CoverReport::new(true), CoverReport::merge))
        }
        Some(count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x7a11);
            let mut r = CoverReport::new(false);
            for _ in 0..count {
                let mut qs = sample(&mut rng, n_qubits, k).into_vec();
                qs.sort_unstable();
                let code = rng.gen_range(0..3usize.pow(k as u32));
                r.checked += 1;
                if !words_letters.iter().any(|w| code_of(w, &qs) == code) {
                    r.miss(|| sparse_pauli(n_qubits, &qs, code));
                }
            }
            Ok(r)
        }
    }
}

/// Rank of `a < b < c < d` in the combinatorial number system.
fn quad_index(q: [usize; 4]) -> usize {
    (binomial(q[0] as u64, 1) + binomial(q[1] as u64, 2) + binomial(q[2] as u64, 3) + binomial(q[3] as u64, 4)) as usize
}

/// Check that the pairings contain every pair (`k = 1`) or every quadruple
/// (`k = 2`) of the `2N` modes. With `bins`, only label-zero quadruples are
/// required.
pub fn check_cover_majorana(
    family: &[Pairing],
    n_fermions: usize,
    k: usize,
    bins: Option<&Bins>,
    mode: CheckMode,
) -> Result<CoverReport> {
    if let Some(p) = family.iter().find(|p| p.n_fermions() != n_fermions) {
        return Err(Error::Dimension { expected: n_fermions, found: p.n_fermions() });
    }
    let m = 2 * n_fermions;
    let wanted = |modes: &[usize]| bins.is_none_or(|b| modes.iter().fold(0, |acc, &j| acc ^ b.label(j).0) == 0);
    match k {
        1 => {
            let mut seen = vec![false; m * m];
            for p in family {
                for &(a, b) in p.pairs() {
                    seen[a * m + b] = true;
                }
            }
            let mut r = CoverReport::new(true);
            for a in 0..m {
                for b in a + 1..m {
                    if wanted(&[a, b]) {
                        r.checked += 1;
                        if !seen[a * m + b] {
                            r.miss(|| format!("γ{a}γ{b}"));
                        }
                    }
                }
            }
            Ok(r)
        }
        2 => {
            let sampled = match mode {
                CheckMode::Exhaustive => None,
                CheckMode::Auto if n_fermions <= 16 => None,
                CheckMode::Auto => Some(AUTO_SAMPLES),
                CheckMode::Sampled(s) => Some(s),
            };
            let total = binomial(m as u64, 4) as usize;
            let seen: Vec<bool> = family
                .par_iter()
                .fold(
                    || vec![false; total],
                    |mut acc, p| {
                        let pairs = p.pairs();
                        for (i, &(a, b)) in pairs.iter().enumerate() {
                            for &(c, d) in &pairs[i + 1..] {
                                let mut q = [a, b, c, d];
                                q.sort_unstable();
                                acc[quad_index(q)] = true;
                            }
                        }
                        acc
                    },
                )
                .reduce(
                    || vec![false; total],
                    |mut a, b| {
                        a.iter_mut().zip(b).for_each(|(x, y)| *x |= y);
                        a
                    },
                );
            let mut r = CoverReport::new(sampled.is_none());
            let check = |q: [usize; 4], r: &mut CoverReport| {
                if wanted(&q) {
                    r.checked += 1;
                    if !seen[quad_index(q)] {
                        r.miss(|| format!("γ{}γ{}γ{}γ{}", q[0], q[1], q[2], q[3]));
                    }
                }
            };
            match sampled {
                None => {
                    for d in 3..m {
                        for c in 2..d {
                            for b in 1..c {
                                for a in 0..b {
                                    check([a, b, c, d], &mut r);
                                }
                            }
                        }
                    }
                }
                Some(count) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(0x7a12);
                    for _ in 0..count {
                        let mut q = [0usize; 4];
                        q.copy_from_slice(&sample(&mut rng, m, 4).into_vec());
                        q.sort_unstable();
                        check(q, &mut r);
                    }
                }
            }
            Ok(r)
        }
        _ => Err(invalid(format!("Majorana coverage checks support k ∈ {{1, 2}}, got {k}"))),
    }
}

/// Exact `C† p C` for a circuit of Clifford gates.
pub fn clifford_conjugate(c: &MeasurementCircuit, p: &PauliString) -> Result<PauliString> {
    if p.n_qubits() != c.n_qubits {
        return Err(Error::Dimension { expected: c.n_qubits, found: p.n_qubits() });
    }
    let mut out = p.clone();
    for g in c.gates.iter().rev() {
        let (q, phi) = g.generator(c.n_qubits)?;
        let quarter = phi / FRAC_PI_2;
        let k = quarter.round();
        if (quarter - k).abs() > 1e-9 {
            return Err(Error::UnsupportedGate(format!("{g:?} is not Clifford")));
        }
        if out.commutes_with(&q)? {
            continue;
        }
        // G†PG = P·(cos φ − i sin φ Q)
        out = match (k as i64).rem_euclid(4) {
            0 => out,
            1 => out.multiply(&q)?.times_i_pow(3),
            2 => out.negated(),
            _ => out.multiply(&q)?.times_i_pow(1),
        };
    }
    Ok(out)
}

/// A normalized pure state on up to 12 qubits; qubit `q` is bit `q` of the
/// basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_dense(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() {
            return Err(invalid("amplitude count must be a power of two"));
        }
        check_dense(n_qubits)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("state norm {norm} is not 1")));
        }
        Ok(DenseState { n_qubits, amps })
    }

    /// Haar-like random state from Gaussian amplitudes.
    pub fn random<R: Rng>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_dense(n_qubits)?;
        let mut amps: Vec<Complex64> = (0..1usize << n_qubits)
            .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(DenseState { n_qubits, amps })
    }

    /// [`DenseState::random`] from a ChaCha stream reserved for states, so
    /// the same seed can also drive sampling without correlation.
    pub fn random_seeded(n_qubits: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        Self::random(n_qubits, &mut rng)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `P|ψ⟩`.
    pub fn apply_pauli(&self, p: &PauliString) -> Result<Vec<Complex64>> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, found: p.n_qubits() });
        }
        let x = p.x_words().first().copied().unwrap_or(0) as usize;
        let z = p.z_words().first().copied().unwrap_or(0) as usize;
        let n_y = (x & z).count_ones() as u8;
        let base = i_pow(p.phase() + n_y);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let s = if (b & z).count_ones() % 2 == 1 { -base } else { base };
            out[b ^ x] += s * a;
        }
        Ok(out)
    }

    /// `⟨ψ|P|ψ⟩`, real part (exact for Hermitian `P`).
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        let pp = self.apply_pauli(p)?;
        Ok(self.amps.iter().zip(&pp).map(|(a, b)| (a.conj() * b).re).sum())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn check_dense(n: usize) -> Result<()> {
    if n > DENSE_MAX_QUBITS {
        return Err(Error::Dimension { expected: DENSE_MAX_QUBITS, found: n });
    }
    Ok(())
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box–Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Apply every gate's exact unitary `exp(−iφ/2 Q) = cos(φ/2) − i sin(φ/2) Q`.
pub fn dense_simulate(c: &MeasurementCircuit, s: &DenseState) -> Result<DenseState> {
    check_dense(c.n_qubits)?;
    if s.n_qubits != c.n_qubits {
        return Err(Error::Dimension { expected: c.n_qubits, found: s.n_qubits });
    }
    let mut state = s.clone();
    for g in &c.gates {
        let (q, phi) = g.generator(c.n_qubits)?;
        let qpsi = state.apply_pauli(&q)?;
        let (cs, sn) = ((phi / 2.0).cos(), (phi / 2.0).sin());
        let minus_i_sin = Complex64::new(0.0, -sn);
        for (a, b) in state.amps.iter_mut().zip(qpsi) {
            *a = *a * cs + minus_i_sin * b;
        }
    }
    Ok(state)
}

/// Largest set of pairwise anticommuting Pauli operators on `n ≤ 3` qubits.
///
/// Any non-identity Pauli is Clifford-equivalent to `Z_0`, so the search
/// fixes it as the first member.
pub fn max_anticommuting_clique(n_qubits: usize) -> Result<usize> {
    if n_qubits == 0 || n_qubits > 3 {
        return Err(invalid(format!("brute-force regime is 1 ≤ n ≤ 3, got {n_qubits}")));
    }
    let all: Vec<PauliString> = (1..1usize << (2 * n_qubits))
        .map(|code| {
            let letters: Vec<PauliLetter> = (0..n_qubits)
                .map(|q| PauliLetter::from_bits((code >> (2 * q)) & 1 == 1, (code >> (2 * q + 1)) & 1 == 1))
                .collect();
            PauliString::from_letters(&letters)
        })
        .collect();
    let first = PauliString::single(n_qubits, 0, PauliLetter::Z)?;
    let cands: Vec<usize> = (0..all.len()).filter(|&i| !all[i].commutes_with(&first).unwrap()).collect();
    let anti: Vec<Vec<bool>> = cands
        .iter()
        .map(|&i| cands.iter().map(|&j| i != j && !all[i].commutes_with(&all[j]).unwrap()).collect())
        .collect();
    fn grow(anti: &[Vec<bool>], pool: Vec<usize>, size: usize, best: &mut usize) {
        if size + pool.len() <= *best {
            return;
        }
        if pool.is_empty() {
            *best = size;
            return;
        }
        for (pos, &v) in pool.iter().enumerate() {
            let next: Vec<usize> = pool[pos + 1..].iter().copied().filter(|&u| anti[v][u]).collect();
            grow(anti, next, size + 1, best);
        }
    }
    let mut best = 0;
    grow(&anti, (0..cands.len()).collect(), 0, &mut best);
    Ok(best + 1)
}

/// The state to sample from.
#[derive(Debug, Clone)]
pub enum SampleState {
    /// Every measurement outcome is uniformly random.
    MaximallyMixed { n_qubits: usize },
    Dense(DenseState),
}

/// Aggregated estimate of one operator over all cliques containing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub operator: String,
    pub mean: f64,
    pub shots: usize,
    /// Sample variance of single-shot values divided by `shots`.
    pub variance_of_mean: f64,
}

/// Sample every circuit `shots` times and average each observable.
///
/// Each entry pairs a circuit with the observables read from its outcomes.
/// Estimates are keyed by the observable's operator string, in sorted order.
pub fn sample_estimate(
    state: &SampleState,
    cliques: &[(MeasurementCircuit, Vec<Readout>)],
    shots: usize,
    seed: u64,
) -> Result<Vec<Estimate>> {
    let outcomes: Vec<Vec<u64>> = cliques
        .par_iter()
        .enumerate()
        .map(|(i, (c, _))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            sample_outcomes(state, c, shots, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut acc: BTreeMap<String, (f64, f64, usize)> = BTreeMap::new();
    for ((_, observables), shots_out) in cliques.iter().zip(&outcomes) {
        for o in observables {
            let mask = o.qubits.iter().fold(0u64, |m, &q| m | (1 << q));
            let key = operator_key(&o.operator);
            let e = acc.entry(key).or_insert((0.0, 0.0, 0));
            for &bits in shots_out {
                let parity = (bits & mask).count_ones() % 2;
                let v = o.scale * f64::from(o.sign) * if parity == 1 { -1.0 } else { 1.0 };
                e.0 += v;
                e.1 += v * v;
                e.2 += 1;
            }
        }
    }
    Ok(acc
        .into_iter()
        .map(|(operator, (s, s2, m))| {
            let mean = s / m as f64;
            let var = if m > 1 { (s2 - m as f64 * mean * mean) / (m - 1) as f64 } else { 0.0 };
            Estimate { operator, mean, shots: m, variance_of_mean: var.max(0.0) / m as f64 }
        })
        .collect())
}

pub fn operator_key(op: &ReadoutOperator) -> String {
    match op {
        ReadoutOperator::Pauli(p) => p.to_string(),
        ReadoutOperator::Majorana(m) => m.to_string(),
    }
}

fn sample_outcomes<R: Rng>(state: &SampleState, c: &MeasurementCircuit, shots: usize, rng: &mut R) -> Result<Vec<u64>> {
    match state {
        SampleState::MaximallyMixed { n_qubits } => {
            if *n_qubits != c.n_qubits || *n_qubits > 64 {
                return Err(Error::Dimension { expected: c.n_qubits, found: *n_qubits });
            }
            let mask = if *n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
            Ok((0..shots).map(|_| rng.gen::<u64>() & mask).collect())
        }
        SampleState::Dense(s) => {
            let out = dense_simulate(c, s)?;
            let mut cdf = Vec::with_capacity(out.amps.len());
            let mut run = 0.0;
            for p in out.probabilities() {
                run += p;
                cdf.push(run);
            }
            Ok((0..shots)
                .map(|_| {
                    let u: f64 = rng.gen::<f64>() * run;
                    cdf.partition_point(|&x| x <= u).min(cdf.len() - 1) as u64
                })
                .collect())
        }
    }
}

/// Exact value of a dense expectation for a readout target.
pub fn exact_expectation(s: &DenseState, op: &ReadoutOperator) -> Result<f64> {
    match op {
        ReadoutOperator::Pauli(p) => s.expectation(p),
        ReadoutOperator::Majorana(m) => s.expectation(&crate::algebra::jw_map(m, s.n_qubits)?),
    }
}

/// One closed-form count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub formula: &'static str,
    pub n: usize,
    pub k: usize,
    pub n_sym: usize,
    pub value: f64,
    /// The integer used for comparisons (ceiling of `value` where fractional).
    pub integer: Option<u128>,
}

/// `⌈4/3·N² − 8/3·N + 1⌉` and its raw value.
pub fn rdm2_lower_bound(n: usize) -> (u128, f64) {
    let raw = (4 * n * n) as f64 / 3.0 - (8 * n) as f64 / 3.0 + 1.0;
    // 4N² − 8N + 3 over 3, rounded up in integers.
    let num = (4 * n * n + 3) as i128 - (8 * n) as i128;
    (num.max(0).div_euclid(3) as u128 + u128::from(num.rem_euclid(3) != 0), raw)
}

/// All formulas at `(N, k, n_sym)`.
pub fn bound_values(n: usize, k: usize, n_sym: usize) -> Vec<BoundReport> {
    let nn = n as u64;
    let rep = |formula, value: f64, integer| BoundReport { formula, n, k, n_sym, value, integer };
    let (lo2, raw2) = rdm2_lower_bound(n);
    let pair_size = binomial(nn, k as u64);
    let ratio = binomial(2 * nn, 2 * k as u64) as f64 / pair_size.max(1) as f64;
    let mut out = vec![
        rep("rdm1-lower", (2 * n).saturating_sub(1) as f64, Some((2 * n).saturating_sub(1) as u128)),
        rep("rdm2-lower", raw2, Some(lo2)),
        rep("pairing-clique-size", pair_size as f64, Some(pair_size)),
        rep("majorana-k-lower", ratio, Some(ratio.ceil() as u128)),
        rep("anticommuting-max", (2 * n + 1) as f64, Some((2 * n + 1) as u128)),
        rep("symmetry-leading", crate::symmetry_cover::predicted_count(n, n_sym), None),
    ];
    if n >= 2 {
        let q = 6 * ceil_log2(n) + 3;
        out.push(rep("qubit-k2", q as f64, Some(q as u128)));
    }
    out
}

/// One named invariant of a schedule check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub skipped: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub passed: bool,
    pub scheme: &'static str,
    pub n: usize,
    pub k: usize,
    pub cliques: usize,
    pub checks: Vec<CheckResult>,
    pub coverage: Option<CoverReport>,
}

fn result(name: &'static str, outcome: std::result::Result<String, String>) -> CheckResult {
    match outcome {
        Ok(detail) => CheckResult { name, passed: true, skipped: false, detail },
        Err(detail) => CheckResult { name, passed: false, skipped: false, detail },
    }
}

fn skipped(name: &'static str, detail: &str) -> CheckResult {
    CheckResult { name, passed: true, skipped: true, detail: detail.to_string() }
}

/// Run every applicable oracle on a schedule: coverage, commutation inside
/// cliques, and (when circuits are attached) readout correctness, native
/// depth and gate-count bounds, and parity preservation.
pub fn check_schedule(s: &Schedule, mode: CheckMode) -> Result<ScheduleReport> {
    let n = s.n;
    let mut checks = Vec::new();
    let mut coverage = None;

    let words: Vec<PauliWord> = s
        .cliques
        .iter()
        .filter_map(|c| match &c.payload {
            Payload::QubitWord(w) => Some(w.clone()),
            _ => None,
        })
        .collect();
    let family: Vec<Pairing> = s
        .cliques
        .iter()
        .filter_map(|c| match &c.payload {
            Payload::MajoranaPairing(p) => Some(p.clone()),
            _ => None,
        })
        .collect();
    let sets: Vec<&AntiCommutingSet> = s
        .cliques
        .iter()
        .filter_map(|c| match &c.payload {
            Payload::AntiCommutingSet(a) => Some(a),
            _ => None,
        })
        .collect();
    let expected_kind = match s.scheme {
        Scheme::Qubit => "qubit-word",
        Scheme::Majorana | Scheme::Symmetry => "majorana-pairing",
        Scheme::Anticommuting => "anticommuting-set",
    };
    let stray = s.cliques.iter().filter(|c| c.payload.kind() != expected_kind).count();
    checks.push(result(
        "clique-kinds",
        if stray == 0 { Ok(format!("all {expected_kind}")) } else { Err(format!("{stray} cliques of another kind")) },
    ));

    match s.scheme {
        Scheme::Qubit => {
            let r = check_cover_qubit(&words, n, s.k, mode)?;
            checks.push(cover_result(&r));
            coverage = Some(r);
        }
        Scheme::Majorana | Scheme::Symmetry => {
            let bins = match (&s.bins, s.symmetries.is_empty()) {
                (Some(b), _) => Some(b.clone()),
                (None, false) => Some(crate::symmetry_cover::bin_majoranas(n, &SymmetrySet::new(s.symmetries.clone())?)?),
                (None, true) => None,
            };
            let r = check_cover_majorana(&family, n, s.k, bins.as_ref(), mode)?;
            checks.push(cover_result(&r));
            coverage = Some(r);
        }
        Scheme::Anticommuting => checks.push(result("partition", anticommuting_partition(&sets, n))),
    }

    let commutation: std::result::Result<usize, String> = s
        .cliques
        .par_iter()
        .enumerate()
        .map(|(i, c)| clique_commutation(s, c).map_err(|e| format!("clique {i}: {e}")))
        .try_reduce(|| 0, |a, b| Ok(a + b));
    checks.push(result("commutation", commutation.map(|pairs| format!("{pairs} operator pairs checked"))));

    if s.cliques.iter().any(|c| c.circuit.is_none()) {
        checks.push(skipped("circuits", "not every clique has a circuit attached"));
    } else if !s.cliques.is_empty() {
        let outcome: std::result::Result<(), String> = s
            .cliques
            .par_iter()
            .enumerate()
            .map(|(i, c)| check_clique_circuit(s, c, i as u64).map_err(|e| format!("clique {i}: {e}")))
            .collect();
        checks.push(result("circuits", outcome.map(|_| format!("{} circuits checked", s.cliques.len()))));
        if s.scheme.is_fermionic() {
            let bad = s.cliques.iter().filter(|c| !parity_preserved(c.circuit.as_ref().unwrap())).count();
            checks.push(result(
                "parity",
                if bad == 0 { Ok("every gate commutes with the parity".into()) } else { Err(format!("{bad} circuits break parity")) },
            ));
        }
    }
    Ok(ScheduleReport {
        passed: checks.iter().all(|c| c.passed),
        scheme: s.scheme.name(),
        n,
        k: s.k,
        cliques: s.cliques.len(),
        checks,
        coverage,
    })
}

fn cover_result(r: &CoverReport) -> CheckResult {
    let how = if r.exhaustive { "exhaustive" } else { "sampled" };
    result(
        "coverage",
        if r.covered {
            Ok(format!("{how}: {} targets covered", r.checked))
        } else {
            Err(format!("{how}: {} of {} targets missing, e.g. {:?}", r.missing_count, r.checked, r.missing.first()))
        },
    )
}

fn anticommuting_partition(sets: &[&AntiCommutingSet], n: usize) -> std::result::Result<String, String> {
    let m = 2 * n;
    let mut count = vec![0u32; binomial(m as u64, 4) as usize];
    for set in sets {
        if set.len() > 2 * n + 1 {
            return Err(format!("a set of {} terms exceeds 2N+1 = {}", set.len(), 2 * n + 1));
        }
        for t in &set.terms {
            let md = t.modes();
            if md.len() != 4 || md[3] >= m {
                return Err(format!("term {t} is not a degree-4 monomial on {m} modes"));
            }
            count[quad_index([md[0], md[1], md[2], md[3]])] += 1;
        }
    }
    let missing = count.iter().filter(|&&c| c == 0).count();
    let repeated = count.iter().filter(|&&c| c > 1).count();
    if missing + repeated == 0 {
        Ok(format!("{} monomials, each in exactly one of {} sets", count.len(), sets.len()))
    } else {
        Err(format!("{missing} monomials missing, {repeated} repeated"))
    }
}

fn clique_commutation(s: &Schedule, c: &crate::schedule::Clique) -> std::result::Result<usize, String> {
    let e = |e: Error| e.to_string();
    match &c.payload {
        Payload::QubitWord(w) => {
            let ops = word_operators(w, s.k).map_err(e)?;
            for (i, a) in ops.iter().enumerate() {
                for b in &ops[..i] {
                    if !a.commutes_with(b).map_err(e)? {
                        return Err(format!("{a} and {b} anticommute"));
                    }
                }
            }
            Ok(ops.len() * ops.len().saturating_sub(1) / 2)
        }
        Payload::MajoranaPairing(p) => {
            let ops = clique_operators(p, s.k).map_err(e)?;
            if ops.len() as u128 != binomial(s.n as u64, s.k as u64) {
                return Err(format!("clique has {} operators, expected C(N, k)", ops.len()));
            }
            for (i, a) in ops.iter().enumerate() {
                for b in &ops[..i] {
                    if !a.commutes_with(b) {
                        return Err(format!("{a} and {b} anticommute"));
                    }
                }
            }
            Ok(ops.len() * ops.len().saturating_sub(1) / 2)
        }
        Payload::AntiCommutingSet(a) => {
            for (i, x) in a.terms.iter().enumerate() {
                for y in &a.terms[..i] {
                    if x.commutes_with(y) {
                        return Err(format!("{x} and {y} commute"));
                    }
                }
            }
            Ok(a.len() * a.len().saturating_sub(1) / 2)
        }
    }
}

fn z_string(n: usize, qubits: &[usize]) -> Result<PauliString> {
    PauliString::from_sparse(n, &qubits.iter().map(|&q| (q, PauliLetter::Z)).collect::<Vec<_>>())
}

fn readout_target(op: &ReadoutOperator, n: usize) -> Result<PauliString> {
    match op {
        ReadoutOperator::Pauli(p) => Ok(p.clone()),
        ReadoutOperator::Majorana(m) => crate::algebra::jw_map(m, n),
    }
}

fn check_clique_circuit(s: &Schedule, clique: &crate::schedule::Clique, salt: u64) -> std::result::Result<(), String> {
    let e = |e: Error| e.to_string();
    let n = s.n;
    let c = clique.circuit.as_ref().expect("circuit attached");
    if c.n_qubits != n {
        return Err(format!("circuit on {} qubits, schedule on {n}", c.n_qubits));
    }
    match &clique.payload {
        Payload::QubitWord(_) | Payload::MajoranaPairing(_) => {
            let expected = match &clique.payload {
                Payload::MajoranaPairing(p) => p.pairs().len(),
                _ => n,
            };
            if c.readout.len() != expected {
                return Err(format!("{} readouts, expected {expected}", c.readout.len()));
            }
            if let Payload::MajoranaPairing(p) = &clique.payload {
                let declared: Vec<(usize, usize)> = c
                    .readout
                    .iter()
                    .filter_map(|r| match &r.operator {
                        ReadoutOperator::Majorana(m) if m.degree() == 2 => Some((m.modes()[0], m.modes()[1])),
                        _ => None,
                    })
                    .collect();
                if declared.iter().any(|&(a, b)| !p.contains_pair(a, b)) || declared.len() != p.pairs().len() {
                    return Err("readouts do not match the pairing".into());
                }
                let (depth, gates) = (c.depth().map_err(e)?, c.gate_count());
                if depth > 3 * n || gates > 3 * n * n {
                    return Err(format!("native depth {depth} / gates {gates} exceed 3N / 3N²"));
                }
            }
            for r in &c.readout {
                let pulled = clifford_conjugate(c, &z_string(n, &r.qubits).map_err(e)?).map_err(e)?;
                let mut target = readout_target(&r.operator, n).map_err(e)?;
                if r.sign < 0 {
                    target = target.negated();
                }
                if pulled != target {
                    return Err(format!("Z on {:?} pulls back to {pulled}, readout declares {target}", r.qubits));
                }
            }
            Ok(())
        }
        Payload::AntiCommutingSet(set) => {
            if n > DENSE_MAX_QUBITS {
                return Ok(());
            }
            let [r] = c.readout.as_slice() else {
                return Err(format!("expected one readout, found {}", c.readout.len()));
            };
            let z = z_string(n, &r.qubits).map_err(e)?;
            let terms: Vec<PauliString> =
                set.terms.iter().map(|t| crate::algebra::jw_map(t, n)).collect::<Result<_>>().map_err(e)?;
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ salt);
            for _ in 0..3 {
                let psi = DenseState::random(n, &mut rng).map_err(e)?;
                let lhs: f64 = terms
                    .iter()
                    .zip(&set.coeffs)
                    .map(|(t, &w)| psi.expectation(t).map(|v| w * v))
                    .sum::<Result<f64>>()
                    .map_err(e)?;
                let out = dense_simulate(c, &psi).map_err(e)?;
                let rhs = r.scale * f64::from(r.sign) * out.expectation(&z).map_err(e)?;
                if (lhs - rhs).abs() > 1e-10 {
                    return Err(format!("rotated readout gives {rhs}, direct expectation {lhs}"));
                }
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{swap_network, Gate};
    use crate::majorana_cover::{four_majorana_cover, pairing_cliques_1rdm};
    use crate::qubit_cover::qubit_words_k2;

    #[test]
    fn qubit_checks() {
        let r = check_cover_qubit(&qubit_words_k2(8).unwrap(), 8, 2, CheckMode::Auto).unwrap();
        assert!(r.covered && r.exhaustive);
        assert_eq!(r.checked, 28 * 9);
        let uniform: Vec<PauliWord> = ["XXXX", "YYYY", "ZZZZ"].iter().map(|s| s.parse().unwrap()).collect();
        let r = check_cover_qubit(&uniform, 4, 2, CheckMode::Auto).unwrap();
        assert!(!r.covered);
        assert!(r.missing.contains(&"XZII".to_string()));
        assert!(check_cover_qubit(&uniform, 4, 1, CheckMode::Auto).unwrap().covered);
        let r = check_cover_qubit(&qubit_words_k2(40).unwrap(), 40, 3, CheckMode::Auto).unwrap();
        assert!(!r.exhaustive);
    }

    #[test]
    fn majorana_checks() {
        assert!(check_cover_majorana(&pairing_cliques_1rdm(8).unwrap(), 8, 1, None, CheckMode::Auto).unwrap().covered);
        assert!(check_cover_majorana(&four_majorana_cover(8).unwrap(), 8, 2, None, CheckMode::Auto).unwrap().covered);
        let single = vec![Pairing::new(3, vec![(0, 1), (2, 3), (4, 5)]).unwrap()];
        let r = check_cover_majorana(&single, 3, 1, None, CheckMode::Auto).unwrap();
        assert!(!r.covered && !r.missing.is_empty());
        assert_eq!(binomial(16, 4), 1820);
    }

    #[test]
    fn quad_index_is_a_bijection() {
        let m = 9;
        let mut seen = vec![false; binomial(m as u64, 4) as usize];
        for d in 3..m {
            for c in 2..d {
                for b in 1..c {
                    for a in 0..b {
                        let i = quad_index([a, b, c, d]);
                        assert!(!seen[i]);
                        seen[i] = true;
                    }
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn conjugation_examples() {
        let z0: PauliString = "ZI".parse().unwrap();
        let empty = MeasurementCircuit::new(2);
        assert_eq!(clifford_conjugate(&empty, &z0).unwrap(), z0);
        let mut c = MeasurementCircuit::new(2);
        c.gates.push(Gate::MajoranaSwap { i: 0, j: 1 });
        assert_eq!(clifford_conjugate(&c, &z0).unwrap(), z0);
        c.gates.push(Gate::MajoranaRotation { a: 0, b: 1, angle: 0.3 });
        assert!(matches!(clifford_conjugate(&c, &z0), Err(Error::UnsupportedGate(_))));
    }

    #[test]
    fn basis_rotations_read_their_letter() {
        for (l, s) in [(PauliLetter::X, "X"), (PauliLetter::Y, "Y"), (PauliLetter::Z, "Z")] {
            let mut c = MeasurementCircuit::new(1);
            c.gates.push(Gate::BasisRotationLocal { qubit: 0, letter: l });
            assert_eq!(clifford_conjugate(&c, &"Z".parse().unwrap()).unwrap(), s.parse().unwrap());
        }
    }

    #[test]
    fn dense_examples() {
        let zero = DenseState::zero(1).unwrap();
        let mut c = MeasurementCircuit::new(1);
        assert_eq!(dense_simulate(&c, &zero).unwrap(), zero);
        c.gates.push(Gate::MajoranaSwap { i: 0, j: 1 });
        let out = dense_simulate(&c, &zero).unwrap();
        let expected = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
        assert!((out.amplitudes()[0] - expected).norm() < 1e-14);
        assert!(DenseState::zero(13).is_err());
    }

    // Oracle agreement: Clifford conjugation equals U†PU computed densely.
    #[test]
    fn clifford_and_dense_agree() {
        let p = Pairing::new(3, vec![(0, 5), (1, 3), (2, 4)]).unwrap();
        let c = swap_network(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = DenseState::random(3, &mut rng).unwrap();
        let out = dense_simulate(&c, &psi).unwrap();
        for code in 0..64usize {
            let letters: Vec<PauliLetter> =
                (0..3).map(|q| PauliLetter::from_bits((code >> (2 * q)) & 1 == 1, (code >> (2 * q + 1)) & 1 == 1)).collect();
            let pauli = PauliString::from_letters(&letters);
            let pulled = clifford_conjugate(&c, &pauli).unwrap();
            let lhs = out.expectation(&pauli).unwrap();
            let rhs = psi.expectation(&pulled).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "{pauli}");
        }
    }

    #[test]
    fn anticommuting_maximum() {
        assert_eq!(max_anticommuting_clique(1).unwrap(), 3);
        assert_eq!(max_anticommuting_clique(2).unwrap(), 5);
        assert!(max_anticommuting_clique(4).is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(rdm2_lower_bound(8).0, 65);
        assert_eq!(rdm2_lower_bound(2).0, 1);
        assert_eq!(rdm2_lower_bound(3).0, 5);
        let b = bound_values(8, 1, 0);
        let get = |f: &str| b.iter().find(|r| r.formula == f).unwrap().clone();
        assert_eq!(get("rdm1-lower").integer, Some(15));
        assert_eq!(get("qubit-k2").integer, Some(21));
        assert_eq!(get("anticommuting-max").integer, Some(17));
        assert_eq!(get("pairing-clique-size").integer, Some(8));
        let b = bound_values(16, 2, 2);
        let s = b.iter().find(|r| r.formula == "symmetry-leading").unwrap();
        assert!((s.value - 181.333_333).abs() < 1e-3);
    }

    #[test]
    fn zero_state_pair_estimate_is_exact() {
        let p = Pairing::new(2, vec![(0, 1), (2, 3)]).unwrap();
        let c = swap_network(&p).unwrap();
        let obs = c.readout.clone();
        let est = sample_estimate(&SampleState::Dense(DenseState::zero(2).unwrap()), &[(c, obs)], 100, 1).unwrap();
        assert!(est.iter().all(|e| e.mean == 1.0 && e.shots == 100));
    }

    #[test]
    fn schedule_checks() {
        for mut s in [
            Schedule::majorana(5, 2).unwrap(),
            Schedule::majorana(6, 1).unwrap(),
            Schedule::qubit(6, 2).unwrap(),
            Schedule::anticommuting(4, 5).unwrap(),
            Schedule::symmetry_bins(6, Bins::balanced(6, 2).unwrap()).unwrap(),
        ] {
            let r = check_schedule(&s, CheckMode::Exhaustive).unwrap();
            assert!(r.passed, "{r:?}");
            assert!(r.checks.iter().any(|c| c.name == "circuits" && c.skipped));
            s.attach_circuits().unwrap();
            let r = check_schedule(&s, CheckMode::Exhaustive).unwrap();
            assert!(r.passed && r.checks.iter().all(|c| !c.skipped), "{r:?}");
        }
    }

    #[test]
    fn schedule_check_catches_tampering() {
        let mut s = Schedule::majorana(4, 2).unwrap();
        s.cliques.pop();
        assert!(!check_schedule(&s, CheckMode::Exhaustive).unwrap().passed);
        let mut s = Schedule::majorana(3, 1).unwrap();
        s.attach_circuits().unwrap();
        let c = s.cliques.iter_mut().find(|c| c.circuit.as_ref().unwrap().gate_count() > 0).unwrap();
        c.circuit.as_mut().unwrap().readout[0].sign *= -1;
        let r = check_schedule(&s, CheckMode::Exhaustive).unwrap();
        assert!(!r.passed);
        assert!(r.checks.iter().any(|c| c.name == "circuits" && !c.passed));
    }
}
