use proptest::prelude::*;
use wcflobdd::construct::{fold, unfold};
use wcflobdd::quantum::Gate;
use wcflobdd::{Complex64, Manager, Rational, Semifield};
use wcflobdd_cli::bench::{run_suite, BenchConfig, RowWriter, Status, Suite};
use wcflobdd_cli::circuit::{echo_circuit, parse_circuit};
use wcflobdd_cli::commands::{self, BinaryOp, Family};
use wcflobdd_cli::dump::{read_dump, write_dump};

fn q(x: i64) -> Rational {
    Rational::from_i64(x)
}

fn leaf() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(q(0)), Just(q(1)), Just(q(-1)), Just(q(2)), Just(Rational::from_ratio(-7, 3))]
}

proptest! {
    #[test]
    fn dump_round_trip_is_exact(leaves in prop::collection::vec(leaf(), 16)) {
        let mut mgr = Manager::<Rational>::new();
        let c = fold(&mut mgr, &leaves).unwrap();
        let text = write_dump(&mgr, &c);
        let again = read_dump(&mut mgr, &text).unwrap();
        prop_assert!(again.same(&c));
        let mut fresh = Manager::<Rational>::new();
        let d = read_dump(&mut fresh, &text).unwrap();
        prop_assert_eq!(unfold(&fresh, &d), leaves);
        prop_assert_eq!(write_dump(&fresh, &d), text);
    }
}

#[test]
fn float_and_complex_dumps_round_trip() {
    let mut mgr = Manager::<Complex64>::new();
    let leaves: Vec<Complex64> = (0..16).map(|i| Complex64::new(0.1 * i as f64, -1.0 / (i + 1) as f64)).collect();
    let c = fold(&mut mgr, &leaves).unwrap();
    let text = write_dump(&mgr, &c);
    let d = read_dump(&mut mgr, &text).unwrap();
    assert!(d.same(&c));
}

#[test]
fn dump_errors_carry_line_numbers() {
    let mut mgr = Manager::<Rational>::new();
    let bad = "wcflobdd-dump 1\ninstance rational\ng0 fork 2 1\ntop 1 g0 0,1\n";
    let e = read_dump(&mut mgr, bad).unwrap_err();
    assert_eq!(e.line, 3);
    let e = read_dump(&mut mgr, "wcflobdd-dump 1\ninstance float\ng0 fork 1 1\ntop 1 g0 0,1\n").unwrap_err();
    assert_eq!(e.line, 2);
    let e = read_dump(&mut mgr, "wcflobdd-dump 1\ninstance rational\ng0 fork 1 1\ng1 internal 1 1 a=g7 b=g0:1\n").unwrap_err();
    assert_eq!(e.line, 4);
}

#[test]
fn circuit_files() {
    let c = parse_circuit("# bell\nH 0\nCNOT 0 1\nCP 0.5 1 0\nX 1\n").unwrap();
    assert_eq!(c.qubits, 2);
    assert_eq!(c.gates, vec![Gate::H(0), Gate::Cnot(0, 1), Gate::Cp(0.5, 1, 0), Gate::X(1)]);
    assert_eq!(parse_circuit(&echo_circuit(&c)).unwrap().gates, c.gates);
    assert_eq!(parse_circuit("qubits 5\nH 1\n").unwrap().qubits, 5);
    for (text, line) in [
        ("H 0\nFOO 1\n", 2),
        ("H 0\n\nCNOT 1 1\n", 3),
        ("CP x 0 1\n", 1),
        ("qubits 2\nH 0\nX 2\n", 3),
        ("H 0 1\n", 1),
        ("H 0\nqubits 3\n", 2),
    ] {
        assert_eq!(parse_circuit(text).unwrap_err().line, line, "{text:?}");
    }
}

#[test]
fn command_examples() {
    let h = commands::make(Family::Hadamard, 1, wcflobdd::Instance::Real).unwrap();
    assert_eq!(commands::eval(&h, "11").unwrap(), "-0.7071067812\n");
    assert_eq!(commands::export(&h).unwrap().matches("subgraph cluster_").count(), 4);
    let e = commands::make(Family::Exp, 4, wcflobdd::Instance::Rational).unwrap();
    assert_eq!(commands::eval(&e, "1011").unwrap(), "2048\n");
    assert!(commands::eval(&e, "101").is_err());
    let z = commands::make(Family::Zero, 2, wcflobdd::Instance::Rational).unwrap();
    assert_eq!(commands::eval(&z, "0110").unwrap(), "0\n");
    assert!(commands::validate_dump(&e).unwrap().1);
    let hh = commands::op(BinaryOp::Matmul, &h, &h).unwrap();
    let i = commands::make(Family::Identity, 1, wcflobdd::Instance::Real).unwrap();
    let (hh_body, hh_top) = hh.trim_end().rsplit_once('\n').unwrap();
    let (i_body, i_top) = i.trim_end().rsplit_once('\n').unwrap();
    assert_eq!(hh_body, i_body);
    let factor = |t: &str| t.split_whitespace().nth(1).unwrap().parse::<f64>().unwrap();
    assert!((factor(hh_top) - factor(i_top)).abs() < 1e-12);
    let ee = commands::op(BinaryOp::Mul, &e, &e).unwrap();
    assert_eq!(commands::eval(&ee, "1011").unwrap(), "4194304\n");
    assert!(commands::op(BinaryOp::Add, &e, &h).is_err());
}

#[test]
fn fold_fixtures() {
    let m = commands::fold_fixture("1 2\n3 4\n", wcflobdd::Instance::Rational, true).unwrap();
    // Row bit first, then column bit.
    assert_eq!(commands::eval(&m, "01").unwrap(), "2\n");
    assert_eq!(commands::eval(&m, "10").unwrap(), "3\n");
    assert!(commands::fold_fixture("1 2 3\n", wcflobdd::Instance::Rational, false).is_err());
}

#[test]
fn run_and_sample_are_seeded() {
    let ghz = "qubits 2\nH 0\nCNOT 0 1\n";
    let a = commands::run(ghz, 10_000, 7).unwrap();
    assert_eq!(a, commands::run(ghz, 10_000, 7).unwrap());
    let hist: std::collections::BTreeMap<String, usize> = serde_json::from_str(&a).unwrap();
    assert!(hist.keys().all(|k| k == "00" || k == "11"));
    assert_eq!(hist.values().sum::<usize>(), 10_000);
    let e = commands::make(Family::Exp, 4, wcflobdd::Instance::Rational).unwrap();
    let s = commands::sample(&e, 3, 20).unwrap();
    assert_eq!(s, commands::sample(&e, 3, 20).unwrap());
    assert_eq!(s.lines().count(), 20);
    let neg = commands::fold_fixture("1 -1 0 2", wcflobdd::Instance::Rational, false).unwrap();
    assert!(commands::sample(&neg, 1, 1).is_err());
}

#[test]
fn report_formats_agree() {
    let cfg = BenchConfig {
        suite: Suite::Synthetic,
        params: Some(vec![1, 3]),
        instance: wcflobdd::Instance::Real,
        timeout: std::time::Duration::from_secs(60),
        seed: 0,
    };
    let mut csv_out = Vec::new();
    let mut json_out = Vec::new();
    {
        let mut c = RowWriter::csv(&mut csv_out).unwrap();
        let mut j = RowWriter::json(&mut json_out);
        run_suite(&cfg, |row| {
            c.write(row)?;
            j.write(row)
        })
        .unwrap();
    }
    let csv_text = String::from_utf8(csv_out).unwrap();
    let json_text = String::from_utf8(json_out).unwrap();
    let mut lines = csv_text.lines();
    assert_eq!(lines.next().unwrap(), "suite,bench,param,instance,time_s,groupings,vertices,edges,total,status");
    for (c, j) in lines.zip(json_text.lines()) {
        let j: serde_json::Value = serde_json::from_str(j).unwrap();
        let fields: Vec<&str> = c.split(',').collect();
        assert_eq!(fields[1], j["bench"]);
        assert_eq!(fields[2], j["param"].to_string());
        assert_eq!(fields[8], j["total"].as_u64().map(|t| t.to_string()).unwrap_or_default());
        assert_eq!(fields[9], j["status"]);
        let t: f64 = fields[4].parse().unwrap();
        assert!((t - j["time_s"].as_f64().unwrap()).abs() < 1e-6);
    }
    assert_eq!(json_text.lines().count(), 10);
}

#[test]
fn exhausted_budget_marks_timeouts() {
    let cfg = BenchConfig {
        suite: Suite::Separation,
        params: Some(vec![1, 2]),
        instance: wcflobdd::Instance::Rational,
        timeout: std::time::Duration::ZERO,
        seed: 0,
    };
    let rows = run_suite(&cfg, |_| Ok(())).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.status == Status::Timeout));
}
