use nmcodex::cli::{main_with_args, EXIT_INCOMPATIBLE, EXIT_MALFORMED_HEX, EXIT_UNKNOWN_PROFILE, EXIT_USAGE};
use nmcodex::harness::report::Report;
use nmcodex::quantum::{fidelity_pure, DenseState};

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str], stdin: &str) -> Run {
    let mut input = stdin.as_bytes();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("nmcodex").chain(args.iter().copied());
    let code = main_with_args(argv, &mut input, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["nmre", "encode", "--profile", "XXL"], "").code, EXIT_UNKNOWN_PROFILE);
    assert_eq!(run(&["nmre", "decode", "--x", "zz", "--y", "3:1"], "").code, EXIT_MALFORMED_HEX);
    assert_eq!(run(&["nmc2a", "encode", "--profile", "S"], "1:0\n").code, EXIT_INCOMPATIBLE);
    assert_eq!(run(&["nmc3c", "eval"], "").code, EXIT_INCOMPATIBLE);
    assert_eq!(run(&["bogus", "encode"], "").code, EXIT_USAGE);
    assert_eq!(run(&["--help"], "").code, 0);
    let r = run(&["nmre", "tamper", "--spec", "x = frobnicate"], "");
    assert_ne!(r.code, 0);
    assert!(r.err.starts_with("nmcodex: "), "{}", r.err);
}

#[test]
fn nmre_encode_then_decode() {
    let enc = run(&["nmre", "encode", "--seed", "9"], "-\n-\n-\n");
    assert_eq!(enc.code, 0);
    let lines: Vec<&str> = enc.out.lines().collect();
    assert_eq!(lines.len(), 3);
    let dec = run(&["nmre", "decode"], &enc.out);
    assert_eq!(dec.code, 0, "{}", dec.err);
    let expected: Vec<&str> = lines.iter().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(dec.out.lines().collect::<Vec<_>>(), expected);
}

#[test]
fn three_split_roundtrip_and_rejection() {
    let enc = run(&["nmc3c", "encode", "--seed", "4"], "2:0\n2:4\n2:8\n2:c\n");
    assert_eq!(enc.code, 0, "{}", enc.err);
    let dec = run(&["nmc3c", "decode"], &enc.out);
    assert_eq!(dec.out, "2:0\n2:4\n2:8\n2:c\n");

    // flip the last tag bit of the first codeword; hex is MSB-aligned
    let first = enc.out.lines().next().unwrap();
    let (head, hex) = first.rsplit_once(':').unwrap();
    let len: usize = head.rsplit_once(':').unwrap().1.parse().unwrap();
    let v = u64::from_str_radix(hex, 16).unwrap() ^ (1 << (4 * hex.len() - len));
    let flipped = format!("{head}:{v:0w$x}", w = hex.len());
    assert_eq!(run(&["nmc3c", "decode"], &flipped).out.trim(), "BOT");
}

#[test]
fn identity_tamper_has_zero_epsilon() {
    for scheme in ["nmre", "nmc3c", "nmc2a"] {
        let r = run(&[scheme, "tamper", "--spec", "identity"], "");
        assert_eq!(r.code, 0, "{scheme}: {}", r.err);
        let rep = Report::parse(&r.out).unwrap();
        let eps: f64 = rep.get("fit_worst", "epsilon_star").unwrap().parse().unwrap();
        assert_eq!(eps, 0.0, "{scheme}");
    }
}

#[test]
fn audits_pass_at_xs() {
    for scheme in ["nmext", "nmre", "nmc3c", "nmc2a"] {
        let r = run(&[scheme, "audit"], "");
        assert_eq!(r.code, 0, "{scheme}: {}{}", r.out, r.err);
        assert!(!r.out.contains(": fail"), "{}", r.out);
    }
}

#[test]
fn qnmc_roundtrip_through_json() {
    let states = [DenseState::basis(1, 0).unwrap(), DenseState::basis(1, 1).unwrap()];
    let input: String = states.iter().map(|s| s.to_json() + "\n").collect();
    let enc = run(&["qnmc", "encode", "--profile", "S", "--seed", "2"], &input);
    assert_eq!(enc.code, 0, "{}", enc.err);
    let dec = run(&["qnmc", "decode", "--profile", "S"], &enc.out);
    assert_eq!(dec.code, 0, "{}", dec.err);
    for (line, s) in dec.out.lines().zip(&states) {
        let back = DenseState::from_json(line).unwrap();
        assert!(fidelity_pure(s, back.density().matrix()) > 1.0 - 1e-9);
    }
    let audit = run(&["qnmc", "audit", "--profile", "S"], "");
    assert_eq!(audit.code, 0, "{}", audit.out);
    let tamper = run(&["qnmc", "tamper", "--profile", "S", "--spec", "X"], "");
    assert_eq!(tamper.code, 0, "{}", tamper.err);
}

#[test]
fn same_seed_same_output() {
    let a = run(&["nmc2a", "encode", "--seed", "77"], "2:4\n2:c\n");
    let b = run(&["nmc2a", "encode", "--seed", "77"], "2:4\n2:c\n");
    let c = run(&["nmc2a", "encode", "--seed", "78"], "2:4\n2:c\n");
    assert_eq!(a.out, b.out);
    assert_ne!(a.out, c.out);
}

#[test]
fn nmext_eval_reports_output() {
    let r = run(&["nmext", "eval", "--x", "14:1234", "--y", "3:a"], "");
    assert_eq!(r.code, 0, "{}", r.err);
    let rep = Report::parse(&r.out).unwrap();
    assert!(rep.get("nmext", "output").unwrap().starts_with("4:"));
}
