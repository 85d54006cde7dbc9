//! Acceptance suite. Each test prints one `[PASS]`/`[FAIL]` line for its
//! criterion and then asserts.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tomosched::algebra::{jw_map, MajoranaMonomial, PauliLetter, PauliString};
use tomosched::circuits::{
    anticommuting_groups, parity_preserved, rotation_network, swap_network, AntiCommutingSet, ReadoutOperator,
};
use tomosched::majorana_cover::{clique_operators, four_majorana_cover, pairing_cliques_1rdm};
use tomosched::qubit_cover::{qubit_words_k, qubit_words_k2};
use tomosched::schedule::Schedule;
use tomosched::symmetry_cover::{symmetry_cover_bins, Bins};
use tomosched::tuple_iter::{pad_length, parallel_iterate};
use tomosched::verify::{
    binomial, check_cover_majorana, check_cover_qubit, clifford_conjugate, dense_simulate, max_anticommuting_clique,
    rdm2_lower_bound, sample_estimate, CheckMode, DenseState, SampleState,
};

fn report(criterion: u32, ok: bool, detail: impl AsRef<str>) {
    let tag = if ok { "PASS" } else { "FAIL" };
    // Written to the raw handle so the line shows even when output is captured.
    let line = format!("[{tag}] criterion {criterion}: {}\n", detail.as_ref());
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(ok, "criterion {criterion} failed: {}", detail.as_ref());
}

fn log2_ceil(n: usize) -> usize {
    let mut l = 0;
    while (1usize << l) < n {
        l += 1;
    }
    l
}

#[test]
fn criterion_01_qubit_k2_count_and_coverage() {
    let t = Instant::now();
    let mut ok = true;
    let mut counts = Vec::new();
    for n in [2usize, 4, 8, 16, 32, 64] {
        let words = qubit_words_k2(n).unwrap();
        ok &= words.len() == 6 * log2_ceil(n) + 3;
        counts.push(format!("{n}:{}", words.len()));
        if n <= 16 {
            let r = check_cover_qubit(&words, n, 2, CheckMode::Exhaustive).unwrap();
            ok &= r.covered && r.exhaustive;
        }
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(10);
    report(1, ok, format!("counts {} equal 6⌈log N⌉+3, exhaustive coverage N ≤ 16, {elapsed:.2?}", counts.join(" ")));
}

#[test]
fn criterion_02_qubit_k3() {
    let t = Instant::now();
    let mut ok = true;
    for n in [8usize, 16] {
        let r = check_cover_qubit(&qubit_words_k(n, 3).unwrap(), n, 3, CheckMode::Exhaustive).unwrap();
        ok &= r.covered && r.exhaustive;
    }
    let ns = [8usize, 16, 32, 64, 128, 256];
    let ratios: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let l = log2_ceil(n) as f64;
            qubit_words_k(n, 3).unwrap().len() as f64 / (l * l)
        })
        .collect();
    // c is the smallest constant bounding every measured count; log² growth
    // means the ratio settles rather than growing with N.
    let c = ratios.iter().cloned().fold(0.0, f64::max);
    let settling = ratios.windows(3).all(|w| w[2] - w[1] <= w[1] - w[0] + 1e-9);
    ok &= settling && ratios[ratios.len() - 1] <= 1.25 * ratios[0];
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    let shown: Vec<String> = ns.iter().zip(&ratios).map(|(n, r)| format!("{n}:{r:.2}")).collect();
    report(2, ok, format!("exhaustive k=3 at N=8,16; count/⌈log N⌉² = {}; fitted c = {c:.2}; {elapsed:.2?}", shown.join(" ")));
}

#[test]
fn criterion_03_one_rdm() {
    let t = Instant::now();
    let mut ok = true;
    for n in [2usize, 4, 8, 16, 32] {
        let family = pairing_cliques_1rdm(n).unwrap();
        ok &= family.len() == 2 * n - 1;
        let r = check_cover_majorana(&family, n, 1, None, CheckMode::Exhaustive).unwrap();
        ok &= r.covered && r.exhaustive && r.checked as u128 == binomial(2 * n as u64, 2);
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(5);
    report(3, ok, format!("2N−1 pairings for N = 2..32, equal to the lower bound, all pairs covered, {elapsed:.2?}"));
}

#[test]
fn criterion_04_two_rdm() {
    let t = Instant::now();
    let mut ok = true;
    for n in [2usize, 4, 8, 16] {
        let r = check_cover_majorana(&four_majorana_cover(n).unwrap(), n, 2, None, CheckMode::Exhaustive).unwrap();
        ok &= r.covered && r.exhaustive;
    }
    let exhaustive = t.elapsed();
    let mut worst = (0usize, 0.0f64);
    for n in 2usize..=64 {
        let count = four_majorana_cover(n).unwrap().len();
        let lower = rdm2_lower_bound(n).0 as usize;
        let nf = n as f64;
        let upper = 10.0 / 3.0 * nf * nf + 20.0 * nf * nf.log2();
        ok &= count >= lower && (count as f64) <= upper;
        let r = count as f64 / upper;
        if r > worst.1 {
            worst = (n, r);
        }
    }
    ok &= exhaustive < Duration::from_secs(120);
    report(
        4,
        ok,
        format!(
            "exhaustive quadruple coverage N ∈ {{2,4,8,16}} in {exhaustive:.2?}; counts within bounds for N = 2..64 (closest to the upper envelope: N={} at {:.3})",
            worst.0, worst.1
        ),
    );
}

fn double_factorial_even(m: u128) -> u128 {
    (1..=m).filter(|x| x % 2 == 0).product::<u128>().max(1)
}

#[test]
fn criterion_05_clique_size_optimality() {
    let mut ok = true;
    let mut checked = 0;
    for n in 2usize..=10 {
        let l = 2 * n as u128;
        // l!! / ((l − 4)!! · 4!!) over even factors only.
        let bound = double_factorial_even(l) / (double_factorial_even(l - 4) * double_factorial_even(4));
        for p in four_majorana_cover(n).unwrap() {
            let ops = clique_operators(&p, 2).unwrap();
            ok &= ops.len() as u128 == bound && bound == binomial(n as u64, 2);
            ok &= ops.iter().enumerate().all(|(i, a)| ops[..i].iter().all(|b| a.commutes_with(b)));
            checked += 1;
        }
    }
    report(5, ok, format!("{checked} pairings: every k=2 clique has exactly C(N,2) commuting operators, the maximum"));
}

#[test]
fn criterion_06_anticommuting_maximum() {
    let t = Instant::now();
    let found: Vec<usize> = (1..=3).map(|n| max_anticommuting_clique(n).unwrap()).collect();
    let elapsed = t.elapsed();
    let ok = found == [3, 5, 7] && elapsed < Duration::from_secs(300);
    report(6, ok, format!("brute-force maxima for n = 1,2,3 qubits: {found:?} (2n+1), {elapsed:.2?}"));
}

#[test]
fn criterion_07_swap_networks() {
    let mut ok = true;
    let mut circuits = 0;
    for n in 2usize..=5 {
        for p in four_majorana_cover(n).unwrap().iter().chain(&pairing_cliques_1rdm(n).unwrap()) {
            let c = swap_network(p).unwrap();
            ok &= c.depth().unwrap() <= 3 * n && c.gate_count() <= 3 * n * n && parity_preserved(&c);
            for r in &c.readout {
                let z = PauliString::single(n, r.qubits[0], PauliLetter::Z).unwrap();
                let ReadoutOperator::Majorana(m) = &r.operator else { panic!("pairing readouts are Majorana") };
                ok &= m.degree() == 2 && p.contains_pair(m.modes()[0], m.modes()[1]);
                let mut want = jw_map(m, n).unwrap();
                if r.sign < 0 {
                    want = want.negated();
                }
                ok &= clifford_conjugate(&c, &z).unwrap() == want;
            }
            circuits += 1;
        }
    }
    report(7, ok, format!("{circuits} swap networks N = 2..5: readouts exact, depth ≤ 3N, gates ≤ 3N², parity preserved"));
}

#[test]
fn criterion_08_rotation_networks() {
    let n = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(0x08);
    let families: Vec<AntiCommutingSet> = anticommuting_groups(n, 2 * n - 3).unwrap();
    let mut worst = 0.0f64;
    let mut sizes = BTreeMap::new();
    for _ in 0..50 {
        let l = rng.gen_range(1..=5usize);
        let fitting: Vec<&AntiCommutingSet> = families.iter().filter(|f| f.len() >= l).collect();
        let fam = fitting.choose(&mut rng).unwrap();
        let mut terms = fam.terms.clone();
        terms.shuffle(&mut rng);
        terms.truncate(l);
        terms.sort();
        let coeffs: Vec<f64> = (0..l).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let set = AntiCommutingSet::new(terms, coeffs).unwrap();
        *sizes.entry(l).or_insert(0) += 1;
        let net = rotation_network(&set, n).unwrap();
        let r = &net.circuit.readout[0];
        let z = PauliString::from_sparse(n, &r.qubits.iter().map(|&q| (q, PauliLetter::Z)).collect::<Vec<_>>()).unwrap();
        let norm = set.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        for _ in 0..5 {
            let psi = DenseState::random(n, &mut rng).unwrap();
            let direct: f64 = set
                .terms
                .iter()
                .zip(&set.coeffs)
                .map(|(t, c)| c * psi.expectation(&jw_map(t, n).unwrap()).unwrap())
                .sum();
            let after = dense_simulate(&net.circuit, &psi).unwrap();
            let rotated = norm * f64::from(r.sign) * after.expectation(&z).unwrap();
            worst = worst.max((direct - rotated).abs());
        }
    }
    report(8, worst < 1e-10, format!("50 instances at N=4 (L: {sizes:?}), max |⟨O⟩ − √(Σc²)⟨P_final⟩| = {worst:.1e}"));
}

#[test]
fn criterion_09_anticommuting_grouping() {
    let (n, omega) = (4usize, 5usize);
    let sets = anticommuting_groups(n, omega).unwrap();
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut ok = true;
    for s in &sets {
        ok &= s.len() <= omega && s.len() <= 2 * n + 1;
        for (i, a) in s.terms.iter().enumerate() {
            ok &= a.degree() == 4 && s.terms[..i].iter().all(|b| !a.commutes_with(b));
            *seen.entry(a.modes().to_vec()).or_insert(0) += 1;
        }
    }
    ok &= seen.len() == 70 && seen.values().all(|&c| c == 1);
    let c = sets.len() as f64 * omega as f64 / (n as f64).powi(4);
    report(9, ok, format!("{} sets partition all 70 quadruples, pairwise anticommuting; count = {c:.3}·N⁴/ω", sets.len()));
}

#[test]
fn criterion_10_parallel_iterate() {
    let mut ok = true;
    for k in 2usize..=5 {
        for l in 1usize..=20 {
            let s = parallel_iterate(&vec![l; k]).unwrap();
            for a in 0..k {
                for b in a + 1..k {
                    let mut hit = vec![false; l * l];
                    for t in &s.tuples {
                        if let (Some(x), Some(y)) = (t[a], t[b]) {
                            hit[x * l + y] = true;
                        }
                    }
                    ok &= hit.iter().all(|&h| h);
                }
            }
        }
    }
    let mut worst = (0usize, 0usize, 0.0f64);
    for k in 2usize..=5 {
        for l in 2usize..=10_000 {
            let over = (pad_length(l, k) - l) as f64;
            let allowed = 2.0 * (l as f64).log2() + k as f64;
            ok &= over <= allowed;
            if over / allowed > worst.2 {
                worst = (k, l, over / allowed);
            }
        }
    }
    report(
        10,
        ok,
        format!(
            "all cross pairs met for K ≤ 5, L ≤ 20; padding within 2·log₂L + K up to L = 10⁴ (tightest K={} L={} at {:.2} of the allowance)",
            worst.0, worst.1, worst.2
        ),
    );
}

#[test]
fn criterion_11_symmetry_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig1.csv");
    let code = tomosched_cli::run([
        "tomosched", "stats", "--scheme", "symmetry", "--n-min", "16", "--n-max", "64", "--sym-count", "0..4", "--csv",
        csv.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let mut ok = code == 0 && lines.next() == Some("n,n_sym,scheme,measured_count,predicted_count,ratio");
    let mut ratios: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (n, n_sym): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let measured: f64 = f[3].parse().unwrap();
        // Recompute the prediction here rather than trusting the CSV.
        let nf = n as f64;
        let predicted = nf * nf * (10.0 / 3.0 * 4f64.powi(-(n_sym as i32)) + 2f64.powi(1 - n_sym as i32));
        ok &= (f[4].parse::<f64>().unwrap() - predicted).abs() < 1e-3;
        ratios.insert((n, n_sym), measured / predicted);
    }
    ok &= ratios.len() == 15 && ratios.values().all(|r| (0.5..=2.0).contains(r));
    for s in 0..=4 {
        ok &= (ratios[&(64, s)] - 1.0).abs() <= (ratios[&(16, s)] - 1.0).abs();
    }
    for n in 2usize..=8 {
        for s in 0..=2 {
            let bins = Bins::balanced(n, s).unwrap();
            let r = check_cover_majorana(&symmetry_cover_bins(n, &bins).unwrap(), n, 2, Some(&bins), CheckMode::Exhaustive)
                .unwrap();
            ok &= r.covered && r.exhaustive;
        }
    }
    let shown: Vec<String> = (0..=4)
        .map(|s| format!("n_sym {s}: {:.2}/{:.2}/{:.2}", ratios[&(16, s)], ratios[&(32, s)], ratios[&(64, s)]))
        .collect();
    report(11, ok, format!("ratios at N=16/32/64 {}; label-zero coverage exhaustive N ≤ 8, n_sym ≤ 2", shown.join("; ")));
}

#[test]
fn criterion_12_variance_bound() {
    let mut s = Schedule::majorana(4, 2).unwrap();
    s.attach_circuits().unwrap();
    let cliques: Vec<_> = s
        .cliques
        .iter()
        .map(|c| (c.circuit.clone().unwrap(), s.observables(c).unwrap()))
        .collect();
    let shots = 4096;
    let reps = 256u64;
    let state = SampleState::MaximallyMixed { n_qubits: 4 };
    // Per operator: M_i and the bit means of each repetition.
    let mut bits: BTreeMap<String, (usize, Vec<f64>)> = BTreeMap::new();
    for seed in 0..reps {
        for e in sample_estimate(&state, &cliques, shots, 1000 + seed).unwrap() {
            let entry = bits.entry(e.operator).or_insert((e.shots, Vec::new()));
            entry.1.push((1.0 - e.mean) / 2.0);
        }
    }
    let mut ok = bits.len() == 70 + 28;
    let (mut lo, mut hi) = (f64::MAX, 0.0f64);
    for (m_i, means) in bits.values() {
        let r = means.len() as f64;
        let avg = means.iter().sum::<f64>() / r;
        let var = means.iter().map(|x| (x - avg).powi(2)).sum::<f64>() / (r - 1.0);
        let ratio = var / (1.0 / (4.0 * *m_i as f64));
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        // Each single-run mean sits within 5σ of 1/2.
        let sigma = (1.0 / (4.0 * *m_i as f64)).sqrt();
        ok &= means.iter().all(|x| (x - 0.5).abs() <= 5.0 * sigma);
    }
    ok &= lo >= 0.5 && hi <= 2.0;
    report(
        12,
        ok,
        format!("{} operators, M = {shots} per clique, {reps} repetitions: Var(mean)·4M_i ∈ [{lo:.3}, {hi:.3}]", bits.len()),
    );
}

#[test]
fn criterion_13_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let path = |f: &str| dir.path().join(f).to_str().unwrap().to_string();
    let seed = 2024u64;
    let shots = 100_000usize;
    let codes = [
        tomosched_cli::run(["tomosched", "majorana-cover", "--n", "4", "--k", "2", "-o", &path("s.json")]),
        tomosched_cli::run(["tomosched", "circuits", "--from", &path("s.json"), "-o", &path("c.json")]),
        tomosched_cli::run(["tomosched", "verify", "--schedule", &path("c.json"), "--exhaustive", "-o", &path("v.json")]),
        tomosched_cli::run([
            "tomosched", "sample", "--schedule", &path("c.json"), "--state", "random", "--seed", &seed.to_string(),
            "--shots", &shots.to_string(), "-o", &path("e.json"),
        ]),
    ];
    let mut ok = codes == [0; 4];
    let out: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path("e.json")).unwrap()).unwrap();
    let psi = DenseState::random_seeded(4, seed).unwrap();
    let mut worst = 0.0f64;
    let mut count = 0;
    for e in out["estimates"].as_array().unwrap() {
        let op: MajoranaMonomial = e["operator"].as_str().unwrap().parse().unwrap();
        let exact = psi.expectation(&jw_map(&op, 4).unwrap()).unwrap();
        let m_i = e["shots"].as_u64().unwrap() as f64;
        let z = (e["mean"].as_f64().unwrap() - exact).abs() * m_i.sqrt();
        worst = worst.max(z);
        ok &= z <= 5.0;
        count += 1;
    }
    ok &= count == 70 + 28;
    report(
        13,
        ok,
        format!("pipeline exit codes {codes:?}; {count} 2-RDM elements recovered, worst deviation {worst:.2}σ (σ = 1/√M_i)"),
    );
}
