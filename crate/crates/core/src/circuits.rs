//! Jordan–Wigner measurement circuits.
//!
//! Gate conventions: `MajoranaRotation { a, b, angle }` is the unitary
//! `exp((angle/2)·γ_aγ_b)`, so `MajoranaSwap { i, j }` is the rotation by
//! `π/2`, i.e. `e^{(π/4)γ_iγ_j}`, which maps `γ_i ↦ γ_j`, `γ_j ↦ −γ_i` under
//! conjugation. `BasisRotationLocal { qubit, letter }` rotates so that a
//! later `Z` measurement on `qubit` reads `letter`.
//!
//! A circuit `C = G_T ⋯ G_1` is applied to the prepared state; measuring `Z`
//! strings afterwards measures `C† Z C` on the original state.

use std::f64::consts::FRAC_PI_2;

use crate::algebra::{jw_map, MajoranaMonomial, PauliLetter, PauliString};
use crate::error::{invalid, validation, Error, Result};
use crate::majorana_cover::{complete_matching, Pairing};
use crate::qubit_cover::PauliWord;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    MajoranaSwap { i: usize, j: usize },
    MajoranaRotation { a: usize, b: usize, angle: f64 },
    BasisRotationLocal { qubit: usize, letter: PauliLetter },
}

impl Gate {
    /// `(Q, φ)` with the gate equal to `exp(−iφ/2 · Q)` for an unsigned
    /// Pauli `Q` on `n_qubits` qubits.
    pub fn generator(&self, n_qubits: usize) -> Result<(PauliString, f64)> {
        match *self {
            Gate::MajoranaSwap { i, j } => Gate::MajoranaRotation { a: i, b: j, angle: FRAC_PI_2 }.generator(n_qubits),
            Gate::MajoranaRotation { a, b, angle } => {
                if a == b {
                    return Err(invalid(format!("rotation needs two distinct modes, got {a}")));
                }
                let img = jw_map(&MajoranaMonomial::product(&[a, b]), n_qubits)?;
                // γ_aγ_b = i^e·Q with e odd.
                let phi = if img.phase() == 1 { -angle } else { angle };
                Ok((img.unsigned(), phi))
            }
            Gate::BasisRotationLocal { qubit, letter } => {
                let (q, phi) = match letter {
                    PauliLetter::X => (PauliLetter::Y, -FRAC_PI_2),
                    PauliLetter::Y => (PauliLetter::X, FRAC_PI_2),
                    PauliLetter::Z => (PauliLetter::I, 0.0),
                    PauliLetter::I => return Err(invalid("basis rotation to the identity")),
                };
                Ok((PauliString::single(n_qubits, qubit, q)?, phi))
            }
        }
    }

    /// Qubits the gate acts on non-trivially.
    pub fn qubits(&self, n_qubits: usize) -> Result<Vec<usize>> {
        Ok(self.generator(n_qubits)?.0.support())
    }

    pub fn modes(&self) -> Vec<usize> {
        match *self {
            Gate::MajoranaSwap { i, j } => vec![i, j],
            Gate::MajoranaRotation { a, b, .. } => vec![a, b],
            Gate::BasisRotationLocal { .. } => Vec::new(),
        }
    }
}

/// What a readout record estimates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReadoutOperator {
    Pauli(PauliString),
    Majorana(MajoranaMonomial),
}

/// `⟨operator⟩ = sign · ⟨∏_{q ∈ qubits} Z_q⟩` after the circuit; the
/// measured observable is `scale · operator`.
#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    pub qubits: Vec<usize>,
    pub operator: ReadoutOperator,
    pub sign: i8,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementCircuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub readout: Vec<Readout>,
}

impl MeasurementCircuit {
    pub fn new(n_qubits: usize) -> Self {
        MeasurementCircuit { n_qubits, gates: Vec::new(), readout: Vec::new() }
    }

    /// ASAP layer index (1-based) of each gate by qubit support.
    pub fn layers(&self) -> Result<Vec<usize>> {
        let mut last = vec![0usize; self.n_qubits];
        let mut out = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let qs = g.qubits(self.n_qubits)?;
            let layer = qs.iter().map(|&q| last[q]).max().unwrap_or(0) + 1;
            for q in qs {
                last[q] = layer;
            }
            out.push(layer);
        }
        Ok(out)
    }

    pub fn depth(&self) -> Result<usize> {
        Ok(self.layers()?.into_iter().max().unwrap_or(0))
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }
}

/// Route every pair of `p` onto a qubit with odd-even transposition of
/// Majorana swaps. Pair `t` (ordered by smaller member) ends on modes
/// `(2t, 2t + 1)`, so qubit `t` reads `±iγ_aγ_b`.
pub fn swap_network(p: &Pairing) -> Result<MeasurementCircuit> {
    let n = p.n_fermions();
    let mut dest = vec![0usize; 2 * n];
    for (t, &(a, b)) in p.pairs().iter().enumerate() {
        dest[a] = 2 * t;
        dest[b] = 2 * t + 1;
    }
    let mut c = MeasurementCircuit::new(n);
    // labels[pos] = (mode, sign): C†γ_pos C = sign·γ_mode.
    let mut labels: Vec<(usize, i8)> = (0..2 * n).map(|m| (m, 1)).collect();
    for phase in 0..2 * n {
        for i in (phase % 2..2 * n - 1).step_by(2) {
            if dest[labels[i].0] > dest[labels[i + 1].0] {
                c.gates.push(Gate::MajoranaSwap { i, j: i + 1 });
                let (lo, hi) = (labels[i], labels[i + 1]);
                labels[i] = hi;
                labels[i + 1] = (lo.0, -lo.1);
            }
        }
    }
    for (t, &(a, b)) in p.pairs().iter().enumerate() {
        let ((m1, s1), (m2, s2)) = (labels[2 * t], labels[2 * t + 1]);
        debug_assert_eq!((m1.min(m2), m1.max(m2)), (a, b));
        let order = if m1 > m2 { -1 } else { 1 };
        c.readout.push(Readout {
            qubits: vec![t],
            operator: ReadoutOperator::Majorana(MajoranaMonomial::pair(a, b)?),
            sign: s1 * s2 * order,
            scale: 1.0,
        });
    }
    Ok(c)
}

/// Basis changes reading every letter of the word on its qubit.
pub fn word_circuit(word: &PauliWord) -> MeasurementCircuit {
    let n = word.n_qubits();
    let mut c = MeasurementCircuit::new(n);
    for (q, &l) in word.letters().iter().enumerate() {
        if l != PauliLetter::Z {
            c.gates.push(Gate::BasisRotationLocal { qubit: q, letter: l });
        }
        let target = PauliString::single(n, q, l).expect("qubit in range");
        c.readout.push(Readout {
            qubits: vec![q],
            operator: ReadoutOperator::Pauli(target),
            sign: 1,
            scale: 1.0,
        });
    }
    c
}

/// Products of `k` single-qubit readouts: for a pairing circuit these are
/// the clique's `2k`-Majorana operators, for a word circuit its `k`-local
/// Pauli operators. Operators are reported in Hermitian normal form.
pub fn product_observables(c: &MeasurementCircuit, k: usize) -> Result<Vec<Readout>> {
    let singles: Vec<&Readout> = c.readout.iter().filter(|r| r.qubits.len() == 1).collect();
    let n = singles.len();
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 ≤ k ≤ {n}, got {k}")));
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let chosen: Vec<&Readout> = idx.iter().map(|&i| singles[i]).collect();
        let mut sign: i8 = chosen.iter().map(|r| r.sign).product();
        let operator = match &chosen[0].operator {
            ReadoutOperator::Majorana(_) => {
                let mut prod = MajoranaMonomial::identity();
                for r in &chosen {
                    let ReadoutOperator::Majorana(m) = &r.operator else {
                        return Err(validation("mixed readout kinds"));
                    };
                    prod = prod.multiply(m);
                }
                let h = MajoranaMonomial::hermitian(prod.modes())?;
                if h.phase() != prod.phase() {
                    sign = -sign;
                }
                ReadoutOperator::Majorana(h)
            }
            ReadoutOperator::Pauli(first) => {
                let mut prod = PauliString::identity(first.n_qubits());
                for r in &chosen {
                    let ReadoutOperator::Pauli(p) = &r.operator else {
                        return Err(validation("mixed readout kinds"));
                    };
                    prod = prod.multiply(p)?;
                }
                ReadoutOperator::Pauli(prod)
            }
        };
        out.push(Readout {
            qubits: chosen.iter().map(|r| r.qubits[0]).collect(),
            operator,
            sign,
            scale: 1.0,
        });
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else { break };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
    Ok(out)
}

/// Whether every gate generator commutes with the fermion parity `∏ Z_i`.
pub fn parity_preserved(c: &MeasurementCircuit) -> bool {
    let parity = PauliString::from_letters(&vec![PauliLetter::Z; c.n_qubits]);
    c.gates.iter().all(|g| match g.generator(c.n_qubits) {
        Ok((q, _)) => q.commutes_with(&parity).unwrap_or(false),
        Err(_) => false,
    })
}

/// Pairwise anticommuting Hermitian Majorana monomials with real weights.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiCommutingSet {
    pub terms: Vec<MajoranaMonomial>,
    pub coeffs: Vec<f64>,
}

impl AntiCommutingSet {
    pub fn new(terms: Vec<MajoranaMonomial>, coeffs: Vec<f64>) -> Result<Self> {
        if terms.len() != coeffs.len() {
            return Err(Error::Dimension { expected: terms.len(), found: coeffs.len() });
        }
        for (i, t) in terms.iter().enumerate() {
            if !t.is_hermitian() {
                return Err(validation(format!("term {t} is not Hermitian")));
            }
            for u in &terms[..i] {
                if t.commutes_with(u) {
                    return Err(validation(format!("terms {u} and {t} commute")));
                }
            }
        }
        Ok(AntiCommutingSet { terms, coeffs })
    }

    /// Unit weights.
    pub fn uniform(terms: Vec<MajoranaMonomial>) -> Result<Self> {
        let c = vec![1.0; terms.len()];
        Self::new(terms, c)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// A rotation network and its readout.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationNetwork {
    /// Rotations followed by the swap network reading `p_final`.
    pub circuit: MeasurementCircuit,
    /// Number of leading gates that are elimination rotations.
    pub rotation_gates: usize,
    /// Elimination layers: rotations on disjoint term pairs share a layer.
    pub rotation_depth: usize,
    pub p_final: MajoranaMonomial,
    /// `√(Σc²)`.
    pub scale: f64,
}

/// Circuit mapping `O = Σ c_i P_i` to `√(Σc²)·P_final` for one surviving
/// term, eliminating from both ends towards the middle.
///
/// Consecutive nonzero terms must differ in exactly one mode on each side
/// so that each rotation is a two-Majorana gate.
pub fn rotation_network(s: &AntiCommutingSet, n_fermions: usize) -> Result<RotationNetwork> {
    let kept: Vec<(MajoranaMonomial, f64)> = s
        .terms
        .iter()
        .cloned()
        .zip(s.coeffs.iter().copied())
        .filter(|&(_, c)| c != 0.0)
        .collect();
    if kept.is_empty() {
        return Err(invalid("all coefficients are zero"));
    }
    for (t, _) in &kept {
        if t.degree() % 2 == 1 {
            return Err(validation(format!("odd-degree term {t} has no Z-string readout")));
        }
        if t.max_mode().is_some_and(|m| m >= 2 * n_fermions) {
            return Err(Error::Dimension { expected: 2 * n_fermions, found: t.max_mode().unwrap() + 1 });
        }
    }
    let l = kept.len();
    let survivor = (l - 1) / 2;
    let mut coeff: Vec<f64> = kept.iter().map(|&(_, c)| c).collect();

    // Elimination steps (from, into), interleaved top/bottom per layer.
    let top: Vec<(usize, usize)> = (0..survivor).map(|t| (t, t + 1)).collect();
    let bottom: Vec<(usize, usize)> = (survivor + 1..l).rev().map(|t| (t, t - 1)).collect();
    let mut steps = Vec::with_capacity(l - 1);
    for t in 0..top.len().max(bottom.len()) {
        steps.extend(top.get(t));
        steps.extend(bottom.get(t));
    }

    let mut c = MeasurementCircuit::new(n_fermions);
    for &(i, j) in &steps {
        let (pi, pj) = (&kept[i].0, &kept[j].0);
        let prod = pi.multiply(pj);
        if prod.degree() != 2 {
            return Err(validation(format!("terms {pi} and {pj} differ in more than one mode each")));
        }
        // V = exp((φ/2)·P_iP_j): V†(aP_i + bP_j)V = (a cos φ − b sin φ)P_i + (a sin φ + b cos φ)P_j.
        let (a, b) = (coeff[i], coeff[j]);
        let phi = a.atan2(b);
        coeff[i] = 0.0;
        coeff[j] = a.hypot(b);
        // P_iP_j = κ·γ_xγ_y with κ = ±1; the state-side gate is V†.
        let kappa = if prod.phase() == 0 { 1.0 } else { -1.0 };
        let (x, y) = (prod.modes()[0], prod.modes()[1]);
        c.gates.push(Gate::MajoranaRotation { a: x, b: y, angle: -kappa * phi });
    }
    let rotation_gates = c.gates.len();
    let mut last = vec![0usize; l];
    let mut rotation_depth = 0;
    for &(i, j) in &steps {
        let layer = last[i].max(last[j]) + 1;
        last[i] = layer;
        last[j] = layer;
        rotation_depth = rotation_depth.max(layer);
    }
    let (p_final, c_final) = (kept[survivor].0.clone(), coeff[survivor]);
    let scale = c_final.abs();
    let outer_sign: i8 = if c_final < 0.0 { -1 } else { 1 };

    // Pair the surviving term's modes consecutively and route them.
    let modes = p_final.modes();
    let pairs: Vec<(usize, usize)> = modes.chunks(2).map(|w| (w[0], w[1])).collect();
    let pairing = Pairing::new(n_fermions, complete_matching(n_fermions, &pairs)?)?;
    let net = swap_network(&pairing)?;
    c.gates.extend(net.gates);

    let mut prod_pairs = MajoranaMonomial::identity();
    let mut qubits = Vec::new();
    let mut sign = outer_sign;
    for &(x, y) in &pairs {
        let t = pairing.pairs().iter().position(|&pr| pr == (x, y)).expect("pair in pairing");
        prod_pairs = prod_pairs.multiply(&MajoranaMonomial::pair(x, y)?);
        qubits.push(t);
        sign *= net.readout[t].sign;
    }
    // p_final = ± ∏ iγ_xγ_y
    if prod_pairs.phase() != p_final.phase() {
        sign = -sign;
    }
    qubits.sort_unstable();
    c.readout.push(Readout {
        qubits,
        operator: ReadoutOperator::Majorana(p_final.clone()),
        sign,
        scale,
    });
    Ok(RotationNetwork { circuit: c, rotation_gates, rotation_depth, p_final, scale })
}

/// Partition all degree-4 monomials into anticommuting sets of size ≤ ω.
///
/// `γ_aγ_bγ_cγ_d` (a < b < c < d) joins the family of `(b, c, d)`, whose
/// members share three modes and so pairwise anticommute; families are
/// chunked by ω in order of `a`.
pub fn anticommuting_groups(n_fermions: usize, omega: usize) -> Result<Vec<AntiCommutingSet>> {
    let m = 2 * n_fermions;
    if n_fermions < 2 || omega == 0 || omega > m - 3 {
        return Err(invalid(format!("ω must lie in 1..={} for N = {n_fermions}, got {omega}", m.saturating_sub(3))));
    }
    let mut out = Vec::new();
    for b in 1..m {
        for cc in b + 1..m {
            for d in cc + 1..m {
                let family: Vec<MajoranaMonomial> = (0..b)
                    .map(|a| MajoranaMonomial::hermitian(&[a, b, cc, d]))
                    .collect::<Result<_>>()?;
                for chunk in family.chunks(omega) {
                    out.push(AntiCommutingSet::uniform(chunk.to_vec())?);
                }
            }
        }
    }
    Ok(out)
}
