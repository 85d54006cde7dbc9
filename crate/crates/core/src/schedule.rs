//! Schedules: ordered cliques with optional circuits, and their JSON form.
//!
//! The wire format is format version `"1"`. Keys are written in sorted
//! order, angles and scales as `{:.16e}` decimal strings, so equal
//! schedules serialize to equal bytes. Clique operators are derived from
//! payloads and only written in expanded mode.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{MajoranaMonomial, PauliLetter, PauliString};
use crate::circuits::{
    rotation_network, swap_network, word_circuit, AntiCommutingSet, Gate, MeasurementCircuit, Readout,
    ReadoutOperator,
};
use crate::error::{invalid, validation, Error, Result};
use crate::majorana_cover::{clique_operators, four_majorana_cover, pairing_cliques_1rdm, Pairing};
use crate::qubit_cover::{qubit_words_k, PauliWord};
use crate::symmetry_cover::{bin_majoranas, symmetry_cover_bins, BinLabel, Bins, SymmetrySet};

pub const FORMAT_VERSION: &str = "1";

/// Construction labels attached to a generated clique, e.g. the level and
/// offset `(n, a)` of a binary pairing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub labels: BTreeMap<String, usize>,
    pub tag: String,
}

impl Provenance {
    pub fn new(tag: &str, labels: &[(&str, usize)]) -> Self {
        Provenance {
            tag: tag.to_string(),
            labels: labels.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Qubit,
    Majorana,
    Symmetry,
    Anticommuting,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Qubit => "qubit",
            Scheme::Majorana => "majorana",
            Scheme::Symmetry => "symmetry",
            Scheme::Anticommuting => "anticommuting",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Scheme::Qubit, Scheme::Majorana, Scheme::Symmetry, Scheme::Anticommuting]
            .into_iter()
            .find(|x| x.name() == s)
    }

    /// Whether the register is counted in fermions rather than qubits.
    pub fn is_fermionic(self) -> bool {
        self != Scheme::Qubit
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    QubitWord(PauliWord),
    MajoranaPairing(Pairing),
    AntiCommutingSet(AntiCommutingSet),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::QubitWord(_) => "qubit-word",
            Payload::MajoranaPairing(_) => "majorana-pairing",
            Payload::AntiCommutingSet(_) => "anticommuting-set",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clique {
    pub payload: Payload,
    pub provenance: Provenance,
    pub circuit: Option<MeasurementCircuit>,
}

impl Clique {
    fn new(payload: Payload, provenance: Provenance) -> Self {
        Clique { payload, provenance, circuit: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub scheme: Scheme,
    /// Qubits for the qubit scheme, fermions otherwise.
    pub n: usize,
    pub k: usize,
    pub omega: Option<usize>,
    pub symmetries: Vec<PauliString>,
    /// Mode labels the symmetry cover was built for.
    pub bins: Option<Bins>,
    pub cliques: Vec<Clique>,
}

impl Schedule {
    /// Words containing every `k`-qubit operator.
    pub fn qubit(n_qubits: usize, k: usize) -> Result<Self> {
        let cliques = qubit_words_k(n_qubits, k)?
            .into_iter()
            .map(|w| Clique::new(Payload::QubitWord(w), Provenance::default()))
            .collect();
        Ok(Self::bare(Scheme::Qubit, n_qubits, k, cliques))
    }

    /// Pairings covering the fermionic 1-RDM (`k = 1`) or 2-RDM (`k = 2`).
    pub fn majorana(n_fermions: usize, k: usize) -> Result<Self> {
        let family = match k {
            1 => pairing_cliques_1rdm(n_fermions)?,
            2 => four_majorana_cover(n_fermions)?,
            _ => return Err(invalid(format!("Majorana covers support k ∈ {{1, 2}}, got {k}"))),
        };
        Ok(Self::bare(Scheme::Majorana, n_fermions, k, pairings(family)))
    }

    /// 2-RDM pairings restricted to symmetry-conserving quadruples.
    pub fn symmetry(n_fermions: usize, syms: &SymmetrySet) -> Result<Self> {
        let bins = bin_majoranas(n_fermions, syms)?;
        let mut s = Self::symmetry_bins(n_fermions, bins)?;
        s.symmetries = syms.operators().to_vec();
        Ok(s)
    }

    pub fn symmetry_bins(n_fermions: usize, bins: Bins) -> Result<Self> {
        let family = symmetry_cover_bins(n_fermions, &bins)?;
        let mut s = Self::bare(Scheme::Symmetry, n_fermions, 2, pairings(family));
        s.bins = Some(bins);
        Ok(s)
    }

    /// Degree-4 monomials partitioned into anticommuting sets of size ≤ ω.
    pub fn anticommuting(n_fermions: usize, omega: usize) -> Result<Self> {
        let sets = crate::circuits::anticommuting_groups(n_fermions, omega)?;
        let cliques = sets
            .into_iter()
            .map(|s| Clique::new(Payload::AntiCommutingSet(s), Provenance::default()))
            .collect();
        let mut s = Self::bare(Scheme::Anticommuting, n_fermions, 2, cliques);
        s.omega = Some(omega);
        Ok(s)
    }

    fn bare(scheme: Scheme, n: usize, k: usize, cliques: Vec<Clique>) -> Self {
        Schedule { scheme, n, k, omega: None, symmetries: Vec::new(), bins: None, cliques }
    }

    /// Qubits the circuits act on (one per fermion under Jordan–Wigner).
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Synthesize the circuit of every clique, in parallel.
    pub fn attach_circuits(&mut self) -> Result<()> {
        let n = self.n;
        let circuits: Vec<MeasurementCircuit> =
            self.cliques.par_iter().map(|c| circuit_for(&c.payload, n)).collect::<Result<_>>()?;
        for (c, circ) in self.cliques.iter_mut().zip(circuits) {
            c.circuit = Some(circ);
        }
        Ok(())
    }

    /// The operators a clique estimates.
    pub fn operators(&self, clique: &Clique) -> Result<Vec<String>> {
        Ok(match &clique.payload {
            Payload::QubitWord(w) => word_operators(w, self.k)?.iter().map(ToString::to_string).collect(),
            Payload::MajoranaPairing(p) => clique_operators(p, self.k)?.iter().map(ToString::to_string).collect(),
            Payload::AntiCommutingSet(s) => s.terms.iter().map(ToString::to_string).collect(),
        })
    }

    /// The readouts sampled for a clique with an attached circuit: all
    /// products of up to `k` single-qubit readouts for words and pairings
    /// (the lower orders belong to the `k`-RDM too), the rotated linear
    /// combination for anticommuting sets.
    pub fn observables(&self, clique: &Clique) -> Result<Vec<Readout>> {
        let c = clique.circuit.as_ref().ok_or_else(|| invalid("clique has no circuit attached"))?;
        match clique.payload {
            Payload::AntiCommutingSet(_) => Ok(c.readout.clone()),
            _ => {
                let mut out = Vec::new();
                for order in 1..=self.k.min(c.readout.len()) {
                    out.extend(crate::circuits::product_observables(c, order)?);
                }
                Ok(out)
            }
        }
    }

    pub fn to_json(&self, expanded: bool) -> Result<String> {
        let wire = self.to_wire(expanded)?;
        let mut out = serde_json::to_string_pretty(&wire).map_err(|e| validation(e.to_string()))?;
        out.push('\n');
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: WireSchedule = serde_json::from_str(text).map_err(|e| parse_error(text, &e))?;
        Self::from_wire(wire)
    }

    fn to_wire(&self, expanded: bool) -> Result<WireSchedule> {
        let cliques = self
            .cliques
            .iter()
            .map(|c| {
                Ok(WireClique {
                    circuit: c.circuit.as_ref().map(circuit_to_wire).transpose()?,
                    kind: c.payload.kind().to_string(),
                    operators: if expanded { Some(self.operators(c)?) } else { None },
                    payload: payload_to_wire(&c.payload),
                    provenance: c.provenance.clone(),
                })
            })
            .collect::<Result<_>>()?;
        let (n_fermions, n_qubits) = if self.scheme.is_fermionic() { (Some(self.n), None) } else { (None, Some(self.n)) };
        Ok(WireSchedule {
            bin_labels: self.bins.as_ref().map(|b| (0..b.n_modes()).map(|m| b.label(m).0).collect()),
            cliques,
            format_version: FORMAT_VERSION.to_string(),
            k: self.k,
            n_fermions,
            n_qubits,
            n_sym: self.bins.as_ref().map(|b| b.n_sym),
            omega: self.omega,
            scheme: self.scheme.name().to_string(),
            symmetries: self.symmetries.iter().map(ToString::to_string).collect(),
        })
    }

    fn from_wire(w: WireSchedule) -> Result<Self> {
        if w.format_version != FORMAT_VERSION {
            return Err(Error::Version { expected: FORMAT_VERSION.to_string(), found: w.format_version });
        }
        let scheme = Scheme::parse(&w.scheme).ok_or_else(|| validation(format!("unknown scheme {:?}", w.scheme)))?;
        let n = match (scheme.is_fermionic(), w.n_fermions, w.n_qubits) {
            (true, Some(n), None) | (false, None, Some(n)) => n,
            _ => return Err(validation(format!("scheme {:?} needs exactly its own register size", w.scheme))),
        };
        let symmetries = w.symmetries.iter().map(|s| s.parse()).collect::<Result<Vec<PauliString>>>()?;
        let bins = match (w.bin_labels, w.n_sym) {
            (Some(labels), Some(n_sym)) => {
                if labels.len() != 2 * n {
                    return Err(Error::Dimension { expected: 2 * n, found: labels.len() });
                }
                Some(Bins::from_labels(n_sym, labels.into_iter().map(BinLabel).collect())?)
            }
            (None, None) => None,
            _ => return Err(validation("bin_labels and n_sym must appear together")),
        };
        let cliques = w
            .cliques
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                clique_from_wire(c, n).map_err(|e| match e {
                    Error::Validation(m) => validation(format!("clique {i}: {m}")),
                    other => other,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Schedule { scheme, n, k: w.k, omega: w.omega, symmetries, bins, cliques })
    }
}

fn pairings(family: Vec<Pairing>) -> Vec<Clique> {
    family
        .into_iter()
        .map(|p| {
            let prov = p.provenance.clone();
            Clique::new(Payload::MajoranaPairing(p), prov)
        })
        .collect()
}

/// The synthesized circuit for one payload on `n` qubits.
pub fn circuit_for(payload: &Payload, n: usize) -> Result<MeasurementCircuit> {
    match payload {
        Payload::QubitWord(w) => Ok(word_circuit(w)),
        Payload::MajoranaPairing(p) => swap_network(p),
        Payload::AntiCommutingSet(s) => Ok(rotation_network(s, n)?.circuit),
    }
}

/// The `k`-local Pauli operators contained in a word.
pub fn word_operators(w: &PauliWord, k: usize) -> Result<Vec<PauliString>> {
    let n = w.n_qubits();
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 ≤ k ≤ {n}, got {k}")));
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let entries: Vec<(usize, PauliLetter)> = idx.iter().map(|&q| (q, w.letters()[q])).collect();
        out.push(PauliString::from_sparse(n, &entries)?);
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else { break };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
    Ok(out)
}

fn parse_error(text: &str, e: &serde_json::Error) -> Error {
    let (line, column) = (e.line(), e.column());
    let offset = if e.is_eof() {
        text.len()
    } else if line == 0 {
        0
    } else {
        let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
        (start + column.saturating_sub(1)).min(text.len())
    };
    Error::Parse { offset, line, column, message: e.to_string() }
}

// Wire records. Field order is alphabetical so the output keys are sorted.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireSchedule {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bin_labels: Option<Vec<u32>>,
    cliques: Vec<WireClique>,
    format_version: String,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_fermions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_sym: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega: Option<usize>,
    scheme: String,
    #[serde(default)]
    symmetries: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireClique {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    circuit: Option<WireCircuit>,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    operators: Option<Vec<String>>,
    payload: Value,
    #[serde(default)]
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireCircuit {
    gates: Vec<WireGate>,
    n_qubits: usize,
    readout: Vec<WireReadout>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireGate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<String>,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    letter: Option<String>,
    modes: Vec<usize>,
    /// The Jordan–Wigner realization's support.
    qubits: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireReadout {
    operator: String,
    qubits: Vec<usize>,
    scale: String,
    sign: i8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireAntiCommuting {
    coeffs: Vec<String>,
    terms: Vec<String>,
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_float(s: &str) -> Result<f64> {
    s.parse().map_err(|_| validation(format!("bad decimal {s:?}")))
}

fn payload_to_wire(p: &Payload) -> Value {
    match p {
        Payload::QubitWord(w) => Value::String(w.to_string()),
        Payload::MajoranaPairing(p) => serde_json::json!(p.pairs()),
        Payload::AntiCommutingSet(s) => serde_json::to_value(WireAntiCommuting {
            coeffs: s.coeffs.iter().map(|&c| format_float(c)).collect(),
            terms: s.terms.iter().map(ToString::to_string).collect(),
        })
        .expect("plain record"),
    }
}

fn clique_from_wire(c: WireClique, n: usize) -> Result<Clique> {
    let bad = |e: serde_json::Error| validation(format!("malformed {} payload: {e}", c.kind));
    let payload = match c.kind.as_str() {
        "qubit-word" => {
            let s: String = serde_json::from_value(c.payload.clone()).map_err(bad)?;
            let w: PauliWord = s.parse()?;
            if w.n_qubits() != n {
                return Err(Error::Dimension { expected: n, found: w.n_qubits() });
            }
            Payload::QubitWord(w)
        }
        "majorana-pairing" => {
            let pairs: Vec<(usize, usize)> = serde_json::from_value(c.payload.clone()).map_err(bad)?;
            Payload::MajoranaPairing(Pairing::new(n, pairs)?.with_provenance(c.provenance.clone()))
        }
        "anticommuting-set" => {
            let w: WireAntiCommuting = serde_json::from_value(c.payload.clone()).map_err(bad)?;
            let terms = w.terms.iter().map(|t| t.parse()).collect::<Result<Vec<MajoranaMonomial>>>()?;
            if let Some(m) = terms.iter().filter_map(MajoranaMonomial::max_mode).find(|&m| m >= 2 * n) {
                return Err(Error::Dimension { expected: 2 * n, found: m + 1 });
            }
            let coeffs = w.coeffs.iter().map(|s| parse_float(s)).collect::<Result<Vec<_>>>()?;
            Payload::AntiCommutingSet(AntiCommutingSet::new(terms, coeffs)?)
        }
        other => return Err(validation(format!("unknown clique kind {other:?}"))),
    };
    let circuit = c.circuit.map(|w| circuit_from_wire(w, n)).transpose()?;
    Ok(Clique { payload, provenance: c.provenance, circuit })
}

fn circuit_to_wire(c: &MeasurementCircuit) -> Result<WireCircuit> {
    let gates = c
        .gates
        .iter()
        .map(|g| {
            let qubits = g.qubits(c.n_qubits)?;
            Ok(match *g {
                Gate::MajoranaSwap { i, j } => {
                    WireGate { angle: None, kind: "majorana-swap".into(), letter: None, modes: vec![i, j], qubits }
                }
                Gate::MajoranaRotation { a, b, angle } => WireGate {
                    angle: Some(format_float(angle)),
                    kind: "majorana-rotation".into(),
                    letter: None,
                    modes: vec![a, b],
                    qubits,
                },
                Gate::BasisRotationLocal { qubit, letter } => WireGate {
                    angle: None,
                    kind: "basis-rotation".into(),
                    letter: Some(letter.as_char().to_string()),
                    modes: Vec::new(),
                    qubits: vec![qubit],
                },
            })
        })
        .collect::<Result<_>>()?;
    let readout = c
        .readout
        .iter()
        .map(|r| WireReadout {
            operator: match &r.operator {
                ReadoutOperator::Pauli(p) => p.to_string(),
                ReadoutOperator::Majorana(m) => m.to_string(),
            },
            qubits: r.qubits.clone(),
            scale: format_float(r.scale),
            sign: r.sign,
        })
        .collect();
    Ok(WireCircuit { gates, n_qubits: c.n_qubits, readout })
}

fn circuit_from_wire(w: WireCircuit, n: usize) -> Result<MeasurementCircuit> {
    if w.n_qubits != n {
        return Err(Error::Dimension { expected: n, found: w.n_qubits });
    }
    let mut c = MeasurementCircuit::new(n);
    for g in w.gates {
        let gate = match (g.kind.as_str(), g.modes.as_slice()) {
            ("majorana-swap", &[i, j]) => Gate::MajoranaSwap { i, j },
            ("majorana-rotation", &[a, b]) => {
                let angle = parse_float(g.angle.as_deref().ok_or_else(|| validation("rotation without angle"))?)?;
                Gate::MajoranaRotation { a, b, angle }
            }
            ("basis-rotation", &[]) => {
                let letter = g
                    .letter
                    .as_deref()
                    .and_then(|s| s.chars().next())
                    .and_then(PauliLetter::from_char)
                    .ok_or_else(|| validation("basis rotation without letter"))?;
                let &[qubit] = g.qubits.as_slice() else {
                    return Err(validation("basis rotation needs one qubit"));
                };
                Gate::BasisRotationLocal { qubit, letter }
            }
            (kind, modes) => return Err(validation(format!("bad gate record {kind:?} on modes {modes:?}"))),
        };
        if gate.modes().iter().any(|&m| m >= 2 * n) {
            return Err(validation(format!("gate {gate:?} exceeds {n} qubits")));
        }
        if gate.qubits(n)? != g.qubits && !matches!(gate, Gate::BasisRotationLocal { letter: PauliLetter::Z, .. }) {
            return Err(validation(format!("gate {gate:?} does not act on qubits {:?}", g.qubits)));
        }
        c.gates.push(gate);
    }
    for r in w.readout {
        let operator = if r.operator.contains('γ') || r.operator.ends_with('1') {
            ReadoutOperator::Majorana(r.operator.parse()?)
        } else {
            ReadoutOperator::Pauli(r.operator.parse()?)
        };
        if r.qubits.iter().any(|&q| q >= n) {
            return Err(validation(format!("readout qubits {:?} exceed {n}", r.qubits)));
        }
        if r.sign != 1 && r.sign != -1 {
            return Err(validation(format!("readout sign must be ±1, got {}", r.sign)));
        }
        c.readout.push(Readout { qubits: r.qubits, operator, sign: r.sign, scale: parse_float(&r.scale)? });
    }
    Ok(c)
}
