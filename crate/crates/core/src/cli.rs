//! Command-line front end: `nmcodex <scheme> <command> [options]`.

use std::io::{BufRead, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bits::BitString;
use crate::codecs::{format_decoded, Codeword2, Codeword3, Nmc2a, Nmc3c, Nmre, SplitCodec};
use crate::error::{Error, Result};
use crate::harness::report::{fmt_f64, Report};
use crate::harness::{
    code_tamper_report, extraction_report, nmre_tamper_report, prob_to_f64, privacy_distance, ClassicalTamper,
    SimulatorFit, SplitFn,
};
use crate::nmext::{two_nmext_trace, NmExtractor, ParameterProfile, Pipeline, Registry};
use crate::quantum::{
    canonical_purification, random_density, sc_enumerate, sc_order, DenseState, PauliOp, Qnmc, QnmcCodeword,
};
use crate::rate::{asymptotic_rate, profile_rate, Scheme, Q};

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_UNKNOWN_PROFILE: i32 = 2;
pub const EXIT_MALFORMED_HEX: i32 = 3;
pub const EXIT_INCOMPATIBLE: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Nmre,
    Nmc3c,
    Nmc2a,
    Qnmc,
    /// The bare extractor.
    Nmext,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CommandArg {
    Encode,
    Decode,
    Tamper,
    Audit,
    Bench,
    Eval,
}

#[derive(Clone, Debug, Parser)]
#[command(name = "nmcodex", version, about = "Split-state non-malleable codes and their tampering harness")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub scheme: SchemeArg,
    #[arg(value_enum)]
    pub command: CommandArg,
    #[arg(long, default_value = "XS")]
    pub profile: String,
    /// Seed of the deterministic randomness source.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Tamper spec: a file, or the spec text itself (e.g. `identity`).
    #[arg(long)]
    pub spec: Option<String>,
    /// First source as `len:hex`.
    #[arg(long)]
    pub x: Option<String>,
    /// Second source as `len:hex`.
    #[arg(long)]
    pub y: Option<String>,
    /// Read input from this file instead of stdin.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnknownProfile(_) => EXIT_UNKNOWN_PROFILE,
        Error::MalformedHex(_) => EXIT_MALFORMED_HEX,
        Error::Incompatible { .. } => EXIT_INCOMPATIBLE,
        _ => EXIT_FAILURE,
    }
}

fn incompatible(cfg: &RunConfig) -> Error {
    Error::Incompatible {
        scheme: format!("{:?}", cfg.scheme).to_lowercase(),
        what: format!("command `{:?}`", cfg.command).to_lowercase(),
    }
}

fn check_compatible(cfg: &RunConfig) -> Result<()> {
    use CommandArg::*;
    let ok = match cfg.scheme {
        SchemeArg::Nmext => matches!(cfg.command, Eval | Audit | Bench),
        _ => cfg.command != Eval,
    };
    if ok {
        Ok(())
    } else {
        Err(incompatible(cfg))
    }
}

/// Runs one command. Returns `Ok(false)` when an audit finds a violation.
pub fn run(cfg: &RunConfig, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<bool> {
    check_compatible(cfg)?;
    let profile = Registry::from_env()?.get(&cfg.profile)?;
    let mut text = String::new();
    let needs_input = matches!(cfg.command, CommandArg::Encode | CommandArg::Decode)
        && !(cfg.x.is_some() && cfg.y.is_some() && matches!(cfg.scheme, SchemeArg::Nmre));
    if needs_input {
        input.read_to_string(&mut text)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ok = match cfg.scheme {
        SchemeArg::Nmext => run_nmext(cfg, &profile, out)?,
        SchemeArg::Nmre => run_nmre(cfg, &profile, &text, &mut rng, out)?,
        SchemeArg::Nmc3c => {
            let codec = Nmc3c::new(profile.clone(), Pipeline::Full)?;
            prebuild(cfg, codec.extractor());
            run_code(cfg, &codec, &text, &mut rng, out)?
        }
        SchemeArg::Nmc2a => {
            let codec = Nmc2a::new(profile.clone(), Pipeline::Full)?;
            prebuild(cfg, codec.extractor());
            run_code(cfg, &codec, &text, &mut rng, out)?
        }
        SchemeArg::Qnmc => run_qnmc(cfg, &profile, &text, &mut rng, out)?,
    };
    Ok(ok)
}

/// Exhaustive commands evaluate every input; tabulate once up front.
fn prebuild(cfg: &RunConfig, ext: &NmExtractor) {
    if matches!(cfg.command, CommandArg::Tamper | CommandArg::Audit) {
        let _ = ext.table();
    }
}

fn lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines().map(str::trim).filter(|l| !l.is_empty())
}

fn hex_arg(v: &Option<String>, len: usize) -> Result<Option<BitString>> {
    match v {
        None => Ok(None),
        Some(s) => {
            let b = BitString::from_hex(s)?;
            if b.len() != len {
                return Err(Error::LengthMismatch { expected: len, actual: b.len() });
            }
            Ok(Some(b))
        }
    }
}

/// Encoder randomness: `--x`/`--y` when both are given, else drawn from the seed.
fn randomness(cfg: &RunConfig, p: &ParameterProfile, rng: &mut ChaCha8Rng) -> Result<BitString> {
    let x = hex_arg(&cfg.x, p.n())?;
    let y = hex_arg(&cfg.y, p.y_len())?;
    match (x, y) {
        (Some(x), Some(y)) => Ok(x.concat(&y)),
        (None, None) => {
            let bits = p.randomness_len();
            Ok(BitString::from_u64(rng.gen::<u64>() & ((1u64 << bits) - 1), bits))
        }
        _ => Err(Error::InvalidParameters("give both --x and --y, or neither".into())),
    }
}

fn read_spec(cfg: &RunConfig) -> Result<String> {
    let spec = cfg.spec.as_deref().ok_or_else(|| Error::InvalidParameters("tamper needs --spec".into()))?;
    let path = std::path::Path::new(spec);
    if path.is_file() {
        Ok(std::fs::read_to_string(path)?)
    } else {
        Ok(spec.to_string())
    }
}

fn profile_section(r: &mut Report, p: &ParameterProfile) {
    r.section("profile")
        .field("name", p.name())
        .field("n", p.n())
        .field("delta_n", p.y_len())
        .field("out_len", p.out_len())
        .field("advice_len", p.a());
}

fn fit_section(r: &mut Report, name: &str, fit: &SimulatorFit) {
    r.section(name).field("epsilon_star", fmt_f64(fit.epsilon_star)).field("p_star", fmt_f64(fit.p_star));
    let gamma: Vec<String> = fit
        .gamma_star
        .iter()
        .filter(|(_, w)| *w > 1e-12)
        .map(|(o, w)| format!("{}={}", outcome_text(o), fmt_f64(*w)))
        .collect();
    r.field("gamma_star", if gamma.is_empty() { "-".to_string() } else { gamma.join(" ") });
}

fn outcome_text(o: &Option<u64>) -> String {
    match o {
        Some(m) => m.to_string(),
        None => crate::codecs::BOT_TOKEN.to_string(),
    }
}

struct Audit {
    report: Report,
    ok: bool,
}

impl Audit {
    fn new(r: Report) -> Self {
        let mut report = r;
        report.section("checks");
        Self { report, ok: true }
    }

    fn check(&mut self, name: &str, pass: bool) {
        self.ok &= pass;
        self.report.field(name, if pass { "pass" } else { "FAIL" });
    }
}

fn rate_checks(a: &mut Audit, scheme: Scheme, p: &ParameterProfile) -> Result<()> {
    let r = profile_rate(scheme, p)?;
    let formula = asymptotic_rate(scheme);
    a.report.field("rate", r.rate()).field("rate_overhead", r.overhead()).field("rate_formula", formula);
    let limit = formula.limit()?;
    a.check("rate_limit_is_unit_fraction", *limit.numer() == 1);
    a.check("rate_overhead_nonnegative", r.overhead() >= Q::from_integer(0));
    if scheme == Scheme::Nmre {
        let delta = Q::new(p.y_len() as i64, p.n() as i64);
        let exact = Q::new(r.message_len as i64, r.codeword_len as i64);
        a.check("rate_matches_formula", formula.eval(delta)? == exact);
    }
    Ok(())
}

fn run_nmext(cfg: &RunConfig, p: &ParameterProfile, out: &mut dyn Write) -> Result<bool> {
    match cfg.command {
        CommandArg::Eval => {
            let x = hex_arg(&cfg.x, p.n())?.ok_or_else(|| Error::InvalidParameters("eval needs --x".into()))?;
            let y = hex_arg(&cfg.y, p.y_len())?.ok_or_else(|| Error::InvalidParameters("eval needs --y".into()))?;
            let t = two_nmext_trace(&x, &y, p)?;
            let mut r = Report::new();
            r.section("nmext")
                .field("advice", t.advice.g.to_hex())
                .field("advice_index", t.advice.r)
                .field("z0", t.z0.to_hex())
                .field("s", t.s.to_hex())
                .field("output", t.l.to_hex());
            write!(out, "{r}")?;
            Ok(true)
        }
        CommandArg::Bench => bench(p, out),
        CommandArg::Audit => {
            let mut r = Report::new();
            profile_section(&mut r, p);
            let full = NmExtractor::new(p.clone(), Pipeline::Full);
            let ablated = NmExtractor::new(p.clone(), Pipeline::AdviceAblated);
            let (ef, ea) = (extraction_report(&full)?, extraction_report(&ablated)?);
            for (name, e) in [("extraction_full", &ef), ("extraction_ablated", &ea)] {
                r.section(name)
                    .field("marginal", fmt_f64(prob_to_f64(&e.marginal)))
                    .field("given_x", fmt_f64(prob_to_f64(&e.given_x)))
                    .field("given_y", fmt_f64(prob_to_f64(&e.given_y)));
            }
            let mut a = Audit::new(r);
            let table = full.table()?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut agree = true;
            for _ in 0..256 {
                let idx = rng.gen_range(0..table.len() as u64);
                let (x, y) = (idx >> p.y_len(), idx & ((1 << p.y_len()) - 1));
                let t = two_nmext_trace(&BitString::from_u64(x, p.n()), &BitString::from_u64(y, p.y_len()), p)?;
                agree &= t.l.to_u64() == u64::from(table[idx as usize]) && t.advice.g.len() == p.a();
            }
            a.check("trace_matches_table", agree);
            a.check("output_in_range", table.iter().all(|&v| u64::from(v) >> p.out_len() == 0));
            write!(out, "{}", a.report)?;
            Ok(a.ok)
        }
        _ => Err(incompatible(cfg)),
    }
}

fn bench(p: &ParameterProfile, out: &mut dyn Write) -> Result<bool> {
    let yl = p.y_len();
    let bits = p.randomness_len();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let inputs: Vec<u64> = (0..1 << 14).map(|_| rng.gen::<u64>() & ((1u64 << bits) - 1)).collect();
    let start = Instant::now();
    let mut evals = 0u64;
    let mut sink = 0u64;
    while start.elapsed().as_secs_f64() < 0.25 {
        for &i in &inputs {
            sink = sink.wrapping_add(p.eval_int(i >> yl, i & ((1 << yl) - 1), Pipeline::Full));
        }
        evals += inputs.len() as u64;
    }
    let secs = start.elapsed().as_secs_f64();
    let mut r = Report::new();
    profile_section(&mut r, p);
    r.section("bench")
        .field("evaluations", evals)
        .field("seconds", fmt_f64(secs))
        .field("evals_per_second", format!("{:.0}", evals as f64 / secs))
        .field("checksum", sink);
    write!(out, "{r}")?;
    Ok(true)
}

fn run_nmre(cfg: &RunConfig, p: &ParameterProfile, text: &str, rng: &mut ChaCha8Rng, out: &mut dyn Write) -> Result<bool> {
    let nmre = Nmre::new(p.clone(), Pipeline::Full);
    prebuild(cfg, nmre.extractor());
    match cfg.command {
        CommandArg::Encode => {
            let count = lines(text).count().max(1);
            for _ in 0..count {
                let o = nmre.encode(&randomness(cfg, p, rng)?)?;
                writeln!(out, "{} {}", o.message.to_hex(), Codeword2 { x: o.x, yz: o.y })?;
            }
            Ok(true)
        }
        CommandArg::Decode => {
            if let (Some(x), Some(y)) = (hex_arg(&cfg.x, p.n())?, hex_arg(&cfg.y, p.y_len())?) {
                writeln!(out, "{}", nmre.decode(&x, &y)?.to_hex())?;
                return Ok(true);
            }
            // accepts encoder output lines `<message> <codeword>` as well
            for line in lines(text) {
                let c: Codeword2 = line.split_whitespace().last().unwrap_or(line).parse()?;
                writeln!(out, "{}", nmre.decode(&c.x, &c.yz)?.to_hex())?;
            }
            Ok(true)
        }
        CommandArg::Tamper => {
            let tamper = ClassicalTamper::parse(&read_spec(cfg)?, 2)?;
            let rep = nmre_tamper_report(&nmre, &tamper)?;
            let mut r = Report::new();
            profile_section(&mut r, p);
            r.section("tamper").field("scheme", "nmre").field("spec", tamper.to_text().trim().replace('\n', "; "));
            fit_section(&mut r, "fit_worst", &rep.worst);
            fit_section(&mut r, "fit_average", &rep.average);
            r.section("branches")
                .field("p_same", fmt_f64(prob_to_f64(&rep.p_same)))
                .field("same_branch_distance", fmt_f64(rep.same_branch_distance))
                .field("distinct_branch_distance", fmt_f64(rep.distinct_branch_distance))
                .field("branch_bound_lhs", fmt_f64(rep.branch_bound_lhs()));
            write!(out, "{r}")?;
            Ok(true)
        }
        CommandArg::Audit => {
            let mut r = Report::new();
            profile_section(&mut r, p);
            let mut a = Audit::new(r);
            let total = 1u64 << p.randomness_len();
            let yl = p.y_len();
            let roundtrip = (0..total).all(|i| {
                let rand = BitString::from_u64(i, p.randomness_len());
                nmre.encode(&rand).map(|o| nmre.decode_int(i >> yl, i & ((1 << yl) - 1)) == o.message.to_u64()).unwrap_or(false)
            });
            a.check("roundtrip_exhaustive", roundtrip);
            rate_checks(&mut a, Scheme::Nmre, p)?;
            let id = nmre_tamper_report(&nmre, &ClassicalTamper::identity(2))?;
            a.check("identity_epsilon_zero", id.worst.epsilon_star.abs() <= 1e-12 && prob_to_f64(&id.p_same) == 1.0);
            let c = ClassicalTamper::deterministic(vec![
                SplitFn::Constant(BitString::zeros(p.n())),
                SplitFn::Constant(BitString::zeros(yl)),
            ]);
            let cr = nmre_tamper_report(&nmre, &c)?;
            a.check("constant_epsilon_zero", cr.worst.epsilon_star.abs() <= 1e-12);
            write!(out, "{}", a.report)?;
            Ok(a.ok)
        }
        CommandArg::Bench => bench(p, out),
        CommandArg::Eval => Err(incompatible(cfg)),
    }
}

/// Parses a codeword line for either code.
fn parse_parts(codec: &dyn SplitCodec, line: &str) -> Result<Vec<BitString>> {
    let parts = if codec.split_lens().len() == 3 {
        let c: Codeword3 = line.parse()?;
        vec![c.x, c.y, c.z]
    } else {
        let c: Codeword2 = line.parse()?;
        vec![c.x, c.yz]
    };
    for (b, &len) in parts.iter().zip(&codec.split_lens()) {
        if b.len() != len {
            return Err(Error::LengthMismatch { expected: len, actual: b.len() });
        }
    }
    Ok(parts)
}

fn format_parts(lens: &[usize], parts: &[u64]) -> String {
    let mut s = lens.len().to_string();
    for (&l, &v) in lens.iter().zip(parts) {
        s.push(':');
        s.push_str(&BitString::from_u64(v, l).to_hex());
    }
    s
}

fn run_code(cfg: &RunConfig, codec: &dyn SplitCodec, text: &str, rng: &mut ChaCha8Rng, out: &mut dyn Write) -> Result<bool> {
    let p = &Registry::from_env()?.get(&cfg.profile)?;
    let lens = codec.split_lens();
    match cfg.command {
        CommandArg::Encode => {
            for line in lines(text) {
                let msg = BitString::from_hex(line)?;
                if msg.len() != codec.message_len() {
                    return Err(Error::LengthMismatch { expected: codec.message_len(), actual: msg.len() });
                }
                let rand = randomness(cfg, p, rng)?;
                writeln!(out, "{}", format_parts(&lens, &codec.encode_split(msg.to_u64(), rand.to_u64())))?;
            }
            Ok(true)
        }
        CommandArg::Decode => {
            for line in lines(text) {
                let parts: Vec<u64> = parse_parts(codec, line)?.iter().map(BitString::to_u64).collect();
                let m = codec.decode_split(&parts).map(|m| BitString::from_u64(m, codec.message_len()));
                writeln!(out, "{}", format_decoded(&m))?;
            }
            Ok(true)
        }
        CommandArg::Tamper => {
            let tamper = ClassicalTamper::parse(&read_spec(cfg)?, lens.len())?;
            let rep = code_tamper_report(codec, &tamper)?;
            let mut r = Report::new();
            profile_section(&mut r, p);
            r.section("tamper")
                .field("scheme", codec.scheme())
                .field("spec", tamper.to_text().trim().replace('\n', "; "));
            fit_section(&mut r, "fit_worst", &rep.worst);
            fit_section(&mut r, "fit_average", &rep.average);
            r.section("distributions");
            for (m, d) in &rep.per_message {
                let row: Vec<String> =
                    d.iter().map(|(o, pr)| format!("{}={}", outcome_text(o), fmt_f64(prob_to_f64(pr)))).collect();
                r.field(format!("m{m}"), row.join(" "));
            }
            write!(out, "{r}")?;
            Ok(true)
        }
        CommandArg::Audit => {
            let mut r = Report::new();
            profile_section(&mut r, p);
            let mut a = Audit::new(r);
            let rbits = codec.randomness_len();
            if rbits > crate::harness::MAX_RANDOMNESS_BITS {
                return Err(Error::SpaceTooLarge { bits: rbits, limit: crate::harness::MAX_RANDOMNESS_BITS });
            }
            let roundtrip = (0..1u64 << codec.message_len()).all(|m| {
                (0..1u64 << rbits).all(|rand| codec.decode_split(&codec.encode_split(m, rand)) == Some(m))
            });
            a.check("roundtrip_exhaustive", roundtrip);
            let scheme = Scheme::parse(codec.scheme())?;
            rate_checks(&mut a, scheme, p)?;
            let id = code_tamper_report(codec, &ClassicalTamper::identity(lens.len()))?;
            a.check("identity_epsilon_zero", id.worst.epsilon_star.abs() <= 1e-12);
            let fixed = codec.encode_split(0, 0);
            let c = ClassicalTamper::deterministic(
                lens.iter().zip(&fixed).map(|(&l, &v)| SplitFn::Constant(BitString::from_u64(v, l))).collect(),
            );
            let cr = code_tamper_report(codec, &c)?;
            a.check("constant_epsilon_zero", cr.worst.epsilon_star.abs() <= 1e-12);
            if lens.len() == 3 && codec.message_len() <= 8 {
                let xy = privacy_distance(codec, &[0, 1])?;
                a.report.field("privacy_xy", xy);
                a.check("privacy_xy_zero", xy == crate::harness::Prob::from_integer(0));
            }
            write!(out, "{}", a.report)?;
            Ok(a.ok)
        }
        CommandArg::Bench => bench(p, out),
        CommandArg::Eval => Err(incompatible(cfg)),
    }
}

fn codeword_json(c: &QnmcCodeword) -> Result<Value> {
    let z: Value = serde_json::from_str(&c.z.to_json()).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(json!({ "x": c.x.to_hex(), "y": c.y.to_hex(), "z": z }))
}

fn codeword_from_json(v: &Value) -> Result<QnmcCodeword> {
    let field = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("codeword is missing `{k}`")));
    let hex = |k: &str| -> Result<BitString> {
        BitString::from_hex(field(k)?.as_str().ok_or_else(|| Error::Parse(format!("`{k}` must be a string")))?)
    };
    Ok(QnmcCodeword { x: hex("x")?, y: hex("y")?, z: DenseState::from_json(&field("z")?.to_string())? })
}

fn run_qnmc(cfg: &RunConfig, p: &ParameterProfile, text: &str, rng: &mut ChaCha8Rng, out: &mut dyn Write) -> Result<bool> {
    let q = Qnmc::new(p.clone(), Pipeline::Full)?;
    match cfg.command {
        CommandArg::Encode => {
            for line in lines(text) {
                let state = DenseState::from_json(line)?;
                let c = q.encode(&state, &randomness(cfg, p, rng)?)?;
                writeln!(out, "{}", codeword_json(&c)?)?;
            }
            Ok(true)
        }
        CommandArg::Decode => {
            for line in lines(text) {
                let v: Value = serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
                writeln!(out, "{}", q.decode(&codeword_from_json(&v)?)?.to_json())?;
            }
            Ok(true)
        }
        CommandArg::Tamper => {
            let label = read_spec(cfg)?;
            let pauli: PauliOp = label.trim().parse()?;
            let state = canonical_purification(&random_density(rng, q.qubits()))?;
            let rep = q.pauli_tamper_experiment(&state, &pauli)?;
            let mut r = Report::new();
            profile_section(&mut r, p);
            r.section("tamper")
                .field("scheme", "qnmc")
                .field("pauli", pauli)
                .field("p", fmt_f64(rep.p))
                .field("distance_to_closed_form", fmt_f64(rep.distance))
                .field("distance_to_product_form", fmt_f64(rep.approx_distance))
                .field("sampling_bias", fmt_f64(rep.sampling_bias))
                .field("tolerance", fmt_f64(rep.tolerance()))
                .field("within_tolerance", rep.distance <= rep.tolerance());
            write!(out, "{r}")?;
            Ok(true)
        }
        CommandArg::Audit => {
            let mut r = Report::new();
            profile_section(&mut r, p);
            let m = q.qubits();
            r.section("subgroup").field("order", sc_order(m)).field("sampling_bias", fmt_f64(q.element_bias()?));
            let mut a = Audit::new(r);
            a.check("subgroup_order", sc_enumerate(m)?.len() == (1 << (5 * m)) - (1 << (3 * m)));
            let mut worst = f64::INFINITY;
            for i in 0..1usize << m {
                let basis = DenseState::basis(m, i)?;
                worst = worst.min(q.min_roundtrip_fidelity(&basis)?);
            }
            let mixed = canonical_purification(&random_density(rng, m))?;
            worst = worst.min(q.min_roundtrip_fidelity(&mixed)?);
            a.report.field("min_fidelity", fmt_f64(worst));
            a.check("roundtrip_fidelity", worst >= 1.0 - 1e-9);
            rate_checks(&mut a, Scheme::Qnmc, p)?;
            let id = q.tamper_experiment(&mixed, &[crate::quantum::CMatrix::identity(1 << m, 1 << m)])?;
            a.check("identity_p_one", (id.p - 1.0).abs() <= 1e-12 && id.distance <= 1e-8);
            let x = PauliOp::from_label(&"X".repeat(m))?;
            let xr = q.pauli_tamper_experiment(&mixed, &x)?;
            a.check("pauli_tamper_matches", xr.p.abs() <= 1e-12 && xr.distance <= xr.tolerance());
            write!(out, "{}", a.report)?;
            Ok(a.ok)
        }
        CommandArg::Bench => bench(p, out),
        CommandArg::Eval => Err(incompatible(cfg)),
    }
}

/// Parses arguments and runs, returning the process exit status.
pub fn main_with_args<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{e}");
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    let result = match &cfg.output {
        Some(path) => std::fs::File::create(path)
            .map_err(Error::from)
            .and_then(|mut f| with_input(&cfg, input, &mut f)),
        None => with_input(&cfg, input, out),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(err, "nmcodex: audit found violations");
            EXIT_FAILURE
        }
        Err(e) => {
            let _ = writeln!(err, "nmcodex: {e}");
            exit_code(&e)
        }
    }
}

fn with_input(cfg: &RunConfig, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<bool> {
    match &cfg.input {
        Some(path) => {
            let f = std::fs::File::open(path)?;
            run(cfg, &mut std::io::BufReader::new(f), out)
        }
        None => run(cfg, input, out),
    }
}
