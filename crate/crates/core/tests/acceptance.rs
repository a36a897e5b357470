//! Acceptance checks, one test per criterion. Each test writes a single
//! `criterion N <name>: PASS|FAIL ...` line straight to stderr, so the
//! lines show up even when libtest captures output.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nmcodex::auth::{forgery_probability, pairwise_deficit, perm_apply, perm_invert, MacParams, PermFamily, PermKey};
use nmcodex::bits::BitString;
use nmcodex::codecs::{Nmc2a, Nmc3c, Nmre, SplitCodec};
use nmcodex::extractors::{lhl_bound, uniformity_scan, SeededExtractorSpec};
use nmcodex::harness::{extraction_report, nmre_tamper_report, privacy_distance, ClassicalTamper, Prob};
use nmcodex::nmext::{profile, Pipeline};
use nmcodex::quantum::twirl::{
    conjugated_pauli_average, one_design_average, one_design_target, purified_twirl_residual, twirl_residual, TwirlGroup,
};
use nmcodex::quantum::{
    all_paulis, canonical_purification, fidelity_pure, random_density, random_pure, sc_enumerate, sc_order,
    trace_norm_distance, transitivity_counts, CMatrix, DenseState, Part, PauliOp, Qnmc,
};
use nmcodex::rate::{asymptotic_rate, profile_rate, Affine, RateFormula, Scheme, Q};
use nmcodex::Error;

#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if ok {
            self.notes.push(what.into());
        } else {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }

    fn finish(self) -> (bool, String) {
        if self.failures.is_empty() {
            (true, self.notes.join("; "))
        } else {
            (false, format!("failed: {}; passed: {}", self.failures.join("; "), self.notes.join("; ")))
        }
    }
}

fn panic_text(e: &(dyn std::any::Any + Send)) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "panic".into())
}

/// Criteria run one at a time so each budget measures only its own work.
static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(id: u32, name: &str, budget_secs: u64, body: impl FnOnce() -> (bool, String)) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    let within = elapsed < Duration::from_secs(budget_secs);
    let (ok, mut detail) = match outcome {
        Ok((ok, d)) => (ok && within, d),
        Err(e) => (false, format!("panicked: {}", panic_text(e.as_ref()))),
    };
    if !within {
        detail.push_str("; over budget");
    }
    let verdict = if ok { "PASS" } else { "FAIL" };
    let line = format!(
        "criterion {id} {name}: {verdict} [{:.1}s of {budget_secs}s] {detail}\n",
        elapsed.as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "{}", line.trim_end());
}

fn codec_roundtrip_failures(codec: &dyn SplitCodec) -> u64 {
    let mut bad = 0;
    for m in 0..1u64 << codec.message_len() {
        for r in 0..1u64 << codec.randomness_len() {
            if codec.decode_split(&codec.encode_split(m, r)) != Some(m) {
                bad += 1;
            }
        }
    }
    bad
}

fn purified_pair(rng: &mut ChaCha8Rng, m: usize) -> DenseState {
    random_pure(rng, 2 * m, vec![(Part::Purification, m), (Part::Message, m)])
}

#[test]
fn criterion_1_correctness() {
    criterion(1, "correctness", 300, || {
        let mut c = Checks::default();
        for name in ["XS", "S"] {
            let p = profile(name).unwrap();
            let nmre = Nmre::new(p.clone(), Pipeline::Full);
            nmre.extractor().table().unwrap();
            let bad = BitString::all(p.randomness_len())
                .filter(|r| {
                    let out = nmre.encode(r).unwrap();
                    nmre.decode(&out.x, &out.y).unwrap() != out.message
                })
                .count();
            c.check(bad == 0, format!("nmre {name} {bad} bad of 2^{}", p.randomness_len()));

            let c3 = Nmc3c::new(p.clone(), Pipeline::Full).unwrap();
            c3.extractor().table().unwrap();
            let bad = codec_roundtrip_failures(&c3);
            c.check(bad == 0, format!("nmc3c {name} {bad} bad of 2^{}", c3.message_len() + c3.randomness_len()));

            match Nmc2a::new(p.clone(), Pipeline::Full) {
                Ok(c2) => {
                    c2.extractor().table().unwrap();
                    let bad = codec_roundtrip_failures(&c2);
                    c.check(bad == 0, format!("nmc2a {name} {bad} bad of 2^{}", c2.message_len() + c2.randomness_len()));
                }
                Err(Error::Incompatible { .. }) => c.note(format!("nmc2a {name} incompatible (odd output length)")),
                Err(e) => c.check(false, format!("nmc2a {name}: {e}")),
            }
        }

        let q = Qnmc::new(profile("S").unwrap(), Pipeline::Full).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut states: Vec<DenseState> = (0..2).map(|i| DenseState::basis(1, i).unwrap()).collect();
        for _ in 0..20 {
            states.push(canonical_purification(&random_density(&mut rng, 1)).unwrap());
            states.push(purified_pair(&mut rng, 1));
        }
        let worst = states.iter().map(|s| q.min_roundtrip_fidelity(s).unwrap()).fold(f64::INFINITY, f64::min);
        let mut direct = f64::INFINITY;
        for s in &states[2..6] {
            for _ in 0..16 {
                let r = BitString::from_u64(rng.gen_range(0..1u64 << 19), 19);
                let back = q.decode(&q.encode(s, &r).unwrap()).unwrap();
                direct = direct.min(fidelity_pure(s, back.density().matrix()));
            }
        }
        c.check(worst >= 1.0 - 1e-9 && direct >= 1.0 - 1e-9, format!("qnmc S min fidelity {worst:.12}, sampled {direct:.12}"));
        c.finish()
    });
}

fn q(a: i64, b: i64) -> Q {
    Q::new(a, b)
}

fn literal(n0: Q, n1: Q, d0: Q, d1: Q) -> RateFormula {
    RateFormula::new(Affine::new(n0, n1), Affine::new(d0, d1)).unwrap()
}

#[test]
fn criterion_2_rate_identities() {
    criterion(2, "rate identities", 10, || {
        let mut c = Checks::default();
        let table = [
            (Scheme::Nmre, literal(q(1, 2), q(-1, 1), q(1, 1), q(1, 1)), 2),
            (Scheme::Nmc3c, literal(q(1, 2), q(-11, 10), q(3, 2), q(-1, 20)), 3),
            (Scheme::Nmc2a, literal(q(1, 4), q(-1, 2), q(5, 4), q(1, 2)), 5),
            (Scheme::Qnmc, literal(q(1, 10), q(-1, 5), q(11, 10), q(4, 5)), 11),
        ];
        for (scheme, expected, inv_limit) in table {
            let f = asymptotic_rate(scheme);
            c.check(f == expected, format!("{} rate {f}", scheme.name()));
            c.check(f.limit().unwrap() == q(1, inv_limit), format!("{} limit 1/{inv_limit}", scheme.name()));
            let over = f.overhead().unwrap();
            c.check(over.limit().unwrap() == q(0, 1), format!("{} overhead -> 0", scheme.name()));
            for delta in [q(1, 100), q(3, 14), q(3, 16)] {
                let lhs = f.eval(delta).unwrap();
                let rhs = Q::from_integer(1) / (Q::from_integer(inv_limit) + over.eval(delta).unwrap());
                if lhs != rhs {
                    c.check(false, format!("{} rate != 1/({inv_limit} + d') at {delta}", scheme.name()));
                }
            }
        }
        let nmre = asymptotic_rate(Scheme::Nmre);
        for name in ["XS", "S", "M"] {
            let p = profile(name).unwrap();
            let delta = q(p.y_len() as i64, p.n() as i64);
            let exact = profile_rate(Scheme::Nmre, &p).unwrap().rate();
            let exact = q(*exact.numer() as i64, *exact.denom() as i64);
            c.check(exact == nmre.eval(delta).unwrap(), format!("nmre {name} rate {exact} at delta {delta}"));
            for scheme in [Scheme::Nmc3c, Scheme::Nmc2a, Scheme::Qnmc] {
                if let Ok(r) = profile_rate(scheme, &p) {
                    c.check(r.overhead() >= q(0, 1), format!("{} {name} overhead {}", scheme.name(), r.overhead()));
                }
            }
        }
        c.finish()
    });
}

#[test]
fn criterion_3_mac_security() {
    criterion(3, "mac security", 10, || {
        let mut c = Checks::default();
        let p = MacParams::new(8, 4).unwrap();
        let measured = forgery_probability(&p).unwrap();
        let oracle = common::forgery_by_enumeration(&p);
        c.check(measured == oracle, format!("exact {measured}, enumeration {oracle}"));
        c.check(measured <= Ratio::new(1, 8), format!("{measured} <= 1/8"));
        c.check(p.forgery_bound() == Ratio::new(1, 8), format!("bound {}", p.forgery_bound()));
        c.finish()
    });
}

#[test]
fn criterion_4_permutations() {
    criterion(4, "pairwise permutations", 10, || {
        let mut c = Checks::default();
        let m = 3;
        let nonzero: Vec<PermKey> =
            (1..8u32).flat_map(|a| (0..8u32).map(move |b| PermKey::new(m, a, b).unwrap())).collect();
        for (family, keys) in [(PermFamily::Remapped, common::remapped_keys(m)), (PermFamily::NonzeroA, nonzero)] {
            let d = pairwise_deficit(m, family).unwrap().overall;
            let oracle = common::deficit_by_enumeration(m, &keys);
            c.check(d == oracle && d <= Ratio::new(1, 8), format!("{family:?} deficit {d} (enumeration {oracle})"));
        }
        let mut broken = Vec::new();
        for m in 1..=8 {
            let keys = common::remapped_keys(m);
            let all: Vec<BitString> = BitString::all(m).collect();
            let ok = keys.iter().all(|k| {
                let mut seen = vec![false; 1 << m];
                all.iter().all(|mu| {
                    let v = perm_apply(k, mu).unwrap();
                    !std::mem::replace(&mut seen[v.to_u64() as usize], true) && perm_invert(k, &v).unwrap() == *mu
                })
            });
            if !ok {
                broken.push(m);
            }
        }
        c.check(broken.is_empty(), format!("bijective for m = 1..8 over all keys (broken {broken:?})"));
        c.finish()
    });
}

/// Flat sources of min-entropy `k` on `n` bits: the low subcube, the subcube
/// on the leading bits, and `random` seeded random subsets.
fn source_families(n: usize, k: usize, random: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
    let size = 1u64 << k;
    let mut fams = vec![(0..size).collect::<Vec<_>>(), (0..size).map(|v| v << (n - k)).collect()];
    for _ in 0..random {
        let mut all: Vec<u64> = (0..1u64 << n).collect();
        for i in 0..size as usize {
            let j = rng.gen_range(i..all.len());
            all.swap(i, j);
        }
        all.truncate(size as usize);
        fams.push(all);
    }
    fams
}

fn subsets(universe: u64, size: usize) -> Vec<Vec<u64>> {
    fn go(start: u64, universe: u64, left: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=universe - left as u64 {
            cur.push(v);
            go(v + 1, universe, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, universe, size, &mut Vec::new(), &mut out);
    out
}

#[test]
fn criterion_5_extractor_bound() {
    criterion(5, "extractor bound", 120, || {
        let mut c = Checks::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut worst_slack = f64::INFINITY;
        let mut worst_oracle_gap = 0f64;
        let mut violations = Vec::new();
        let mut sources = 0usize;
        let mut run = |n: usize, m: usize, k: usize, support: &[u64], cross: bool| {
            let spec = SeededExtractorSpec::toeplitz(n, m, k);
            let p = 1.0 / support.len() as f64;
            let src: Vec<(BitString, f64)> = support.iter().map(|&x| (BitString::from_u64(x, n), p)).collect();
            let d = uniformity_scan(&spec, &src).unwrap();
            let bound = lhl_bound(m, k);
            worst_slack = worst_slack.min(bound - d);
            if d > bound + 1e-12 {
                violations.push(format!("n={n} m={m} k={k} d={d} bound={bound}"));
            }
            if cross {
                let exact = common::lhl_distance(n, m, support);
                let exact = *exact.numer() as f64 / *exact.denom() as f64;
                worst_oracle_gap = worst_oracle_gap.max((exact - d).abs());
            }
            sources += 1;
        };
        // every flat source at n = 4
        for k in 1..=4 {
            for s in subsets(16, 1 << k) {
                for m in [1, 2] {
                    run(4, m, k, &s, k <= 2);
                }
            }
        }
        // every pair at n = 8, plus structured and random families
        for s in subsets(256, 2) {
            run(8, 1, 1, &s, false);
        }
        for k in 1..=8 {
            for s in source_families(8, k, 3, &mut rng) {
                for m in [1, 3] {
                    run(8, m, k, &s, true);
                }
            }
        }
        for k in 1..=12 {
            for s in source_families(12, k, 1, &mut rng) {
                for m in [1, 3] {
                    run(12, m, k, &s, false);
                }
            }
        }
        c.check(violations.is_empty(), format!("{sources} sources within bound, min slack {worst_slack:.3e} {violations:?}"));
        c.check(worst_oracle_gap <= 1e-12, format!("matrix oracle gap {worst_oracle_gap:.1e}"));
        c.finish()
    });
}

fn c64(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(d^2 (rho_Ahat (x) I/d) - rho) / (d^2 - 1)` built with an explicit partial trace.
fn mixed_channel_oracle(rho: &CMatrix, m: usize) -> CMatrix {
    let d = 1usize << m;
    let hat = DMatrix::from_fn(d, d, |i, j| (0..d).map(|k| rho[(i * d + k, j * d + k)]).sum::<Complex64>());
    let prod = hat.kronecker(&(CMatrix::identity(d, d) / c64(d as f64)));
    let d2 = (d * d) as f64;
    (prod * c64(d2) - rho) / c64(d2 - 1.0)
}

fn dist(a: &CMatrix, b: &CMatrix) -> f64 {
    trace_norm_distance(a, b)
}

#[test]
fn criterion_6_twirl_identities() {
    criterion(6, "twirl identities", 120, || {
        let mut c = Checks::default();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for m in [1, 2] {
            let paulis = all_paulis(m).unwrap();
            let pick_distinct = |rng: &mut ChaCha8Rng| loop {
                let (a, b) = (paulis[rng.gen_range(0..paulis.len())], paulis[rng.gen_range(0..paulis.len())]);
                if a != b {
                    return (a, b);
                }
            };
            let mut worst = [0f64; 8];
            for _ in 0..100 {
                let rho = random_density(&mut rng, m);
                let (p1, p2) = pick_distinct(&mut rng);
                worst[0] = worst[0].max(twirl_residual(rho.matrix(), &p1, &p2, TwirlGroup::Pauli).unwrap());
                worst[1] = worst[1].max(twirl_residual(rho.matrix(), &p1, &p2, TwirlGroup::Sc).unwrap());
                let psi = purified_pair(&mut rng, m);
                worst[2] = worst[2].max(purified_twirl_residual(&psi, &p1, &p2).unwrap());

                let rho_ab = random_density(&mut rng, 2 * m);
                let target = one_design_target(rho_ab.matrix(), m);
                for (slot, group) in [(3, TwirlGroup::Pauli), (4, TwirlGroup::Sc)] {
                    let avg = one_design_average(rho_ab.matrix(), m, group).unwrap();
                    worst[slot] = worst[slot].max(dist(&avg, &target));
                }

                let canon = canonical_purification(&random_density(&mut rng, m)).unwrap();
                let full = canon.density().into_matrix();
                let zero = CMatrix::zeros(full.nrows(), full.ncols());
                let unequal = conjugated_pauli_average(&canon, &p1, &p2).unwrap();
                worst[5] = worst[5].max(dist(&unequal, &zero));
                let id = PauliOp::identity(m).unwrap();
                worst[6] = worst[6].max(dist(&conjugated_pauli_average(&canon, &id, &id).unwrap(), &full));
                let p = paulis[rng.gen_range(1..paulis.len())];
                let same = conjugated_pauli_average(&canon, &p, &p).unwrap();
                worst[7] = worst[7].max(dist(&same, &mixed_channel_oracle(&full, m)));
            }
            let names = ["pauli", "sc", "purified", "1-design pauli", "1-design sc", "P!=Q", "P=Q=I", "P=Q!=I"];
            for (name, w) in names.iter().zip(worst) {
                c.check(w <= 1e-10, format!("m={m} {name} {w:.1e}"));
            }
        }
        for (m, order) in [(1, 24), (2, 960)] {
            let n = sc_enumerate(m).unwrap().len();
            c.check(n == order && sc_order(m) == order, format!("|SC_{m}| = {n}"));
        }
        // transitivity recounted from the matrices
        for (m, expect) in [(1usize, 8usize), (2, 64)] {
            let group = sc_enumerate(m).unwrap();
            let paulis = all_paulis(m).unwrap();
            let mut counts = Vec::new();
            for p in &paulis[1..] {
                for qp in &paulis[1..] {
                    let (pm, qm) = (p.matrix(), qp.matrix());
                    let hits = group
                        .iter()
                        .filter(|g| {
                            let conj = g.adjoint_matrix() * &pm * g.matrix();
                            (&conj - &qm).norm() < 1e-9 || (&conj + &qm).norm() < 1e-9
                        })
                        .count();
                    counts.push(hits);
                }
            }
            let library = transitivity_counts(m).unwrap();
            let agree = library.len() == counts.len() && library.iter().all(|(_, n)| *n == expect);
            c.check(
                counts.iter().all(|&n| n == expect) && agree,
                format!("m={m} transitivity count {expect} for all {} pairs", counts.len()),
            );
        }
        c.finish()
    });
}

#[test]
fn criterion_7_quantum_tamper() {
    criterion(7, "quantum tamper decomposition", 60, || {
        let mut c = Checks::default();
        let code = Qnmc::new(profile("S").unwrap(), Pipeline::Full).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut states: Vec<DenseState> = (0..10).map(|_| purified_pair(&mut rng, 1)).collect();
        states.extend((0..10).map(|_| canonical_purification(&random_density(&mut rng, 1)).unwrap()));
        let mut worst_excess = f64::NEG_INFINITY;
        let mut bias = 0.0;
        for label in ["X", "Y", "Z"] {
            let pauli = PauliOp::from_label(label).unwrap();
            for s in &states {
                let r = code.pauli_tamper_experiment(s, &pauli).unwrap();
                let psi = s.density().into_matrix();
                let expect = &psi * c64(r.p) + mixed_channel_oracle(&psi, 1) * c64(1.0 - r.p);
                let half = 0.5 * dist(&r.output, &expect);
                bias = r.sampling_bias;
                worst_excess = worst_excess.max(half - (r.sampling_bias + 1e-8));
                if r.p != 0.0 {
                    c.check(false, format!("{label} identity weight {}", r.p));
                }
            }
        }
        c.check(worst_excess <= 0.0, format!("X/Y/Z within sampling bias {bias:.4} (worst margin {worst_excess:.3e})"));
        let id = PauliOp::identity(1).unwrap();
        let mut exact = true;
        let mut drift = 0f64;
        for s in &states {
            let r = code.pauli_tamper_experiment(s, &id).unwrap();
            exact &= r.p == 1.0;
            drift = drift.max(0.5 * dist(&r.output, &s.density().into_matrix()));
        }
        c.check(exact && drift <= 1e-8, format!("identity p = 1 exactly, output drift {drift:.1e}"));
        c.finish()
    });
}

const SUITE: [&str; 13] = [
    "identity",
    "x = constant:14:1234\ny = constant:3:a",
    "x = constant:14:0000\ny = constant:3:0",
    "x = bitflip:0",
    "x = bitflip:13",
    "y = bitflip:0",
    "y = bitflip:2",
    "x = xor:14:2a5c",
    "y = xor:3:6",
    "x = permute:13,12,11,10,9,8,7,6,5,4,3,2,1,0",
    "y = permute:2,0,1",
    "y = constant:3:2",
    "[seed 1/2]\nx = identity\n[seed 1/2]\nx = bitflip:5",
];

#[test]
fn criterion_8_monotonicity() {
    criterion(8, "non-malleability monotonicity", 600, || {
        let mut c = Checks::default();
        let p = profile("XS").unwrap();
        let full = Nmre::new(p.clone(), Pipeline::Full);
        let ablated = Nmre::new(p, Pipeline::AdviceAblated);
        full.extractor().table().unwrap();
        ablated.extractor().table().unwrap();
        let (mut worst_full, mut worst_ablated) = (0f64, 0f64);
        for (i, text) in SUITE.iter().enumerate() {
            let t = ClassicalTamper::parse(text, 2).unwrap();
            let rf = nmre_tamper_report(&full, &t).unwrap();
            let ra = nmre_tamper_report(&ablated, &t).unwrap();
            worst_full = worst_full.max(rf.worst.epsilon_star);
            worst_ablated = worst_ablated.max(ra.worst.epsilon_star);
            let certified = match i {
                0 => Some(rf.joint.support().all(|(m, m2)| m == m2)),
                1 | 2 => {
                    let outs: std::collections::BTreeSet<u64> = rf.joint.support().map(|&(_, m2)| m2).collect();
                    Some(outs.len() == 1)
                }
                _ => None,
            };
            if let Some(cert) = certified {
                c.check(
                    cert && rf.worst.epsilon_star == 0.0,
                    format!("spec {i} eps* {} (certificate {cert})", rf.worst.epsilon_star),
                );
            }
        }
        c.check(
            worst_full < worst_ablated,
            format!("suite worst eps* full {worst_full:.6} < ablated {worst_ablated:.6}"),
        );
        c.finish()
    });
}

#[test]
fn criterion_9_privacy() {
    criterion(9, "privacy", 300, || {
        let mut c = Checks::default();
        let code = Nmc3c::new(profile("XS").unwrap(), Pipeline::Full).unwrap();
        code.extractor().table().unwrap();
        let ext = extraction_report(code.extractor()).unwrap();
        let two = Prob::from_integer(2);
        let xy = privacy_distance(&code, &[0, 1]).unwrap();
        c.check(xy == Prob::from_integer(0), format!("{{X,Y}} {xy}"));
        for (subset, label, bound) in [
            (vec![2], "{Z}", ext.marginal),
            (vec![0, 2], "{X,Z}", ext.given_x),
            (vec![1, 2], "{Y,Z}", ext.given_y),
        ] {
            let d = privacy_distance(&code, &subset).unwrap();
            let f = |p: Prob| *p.numer() as f64 / *p.denom() as f64;
            c.check(d <= two * bound, format!("{label} {:.5} <= 2 x {:.5}", f(d), f(bound)));
        }
        let all = privacy_distance(&code, &[0, 1, 2]).unwrap();
        c.check(all == Prob::from_integer(1), format!("{{X,Y,Z}} {all}"));
        c.finish()
    });
}
