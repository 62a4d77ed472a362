use std::path::PathBuf;
use std::process::{Command, Output};

use fpa_core::rational::parse_rational;
use serde_json::Value;

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn fpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpa"))
        .args(args)
        .env_remove("FPA_THREADS")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("not json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fpa-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Every string that looks like a fraction must parse as one.
fn check_rationals(v: &Value) {
    match v {
        Value::String(s) if s.contains('/') && !s.contains(' ') && !s.contains('\n') => {
            let (p, q) = s.split_once('/').unwrap();
            if p.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()) && q.chars().all(|c| c.is_ascii_digit()) {
                parse_rational(s).unwrap();
            }
        }
        Value::Array(xs) => xs.iter().for_each(check_rationals),
        Value::Object(m) => m.values().for_each(check_rationals),
        _ => {}
    }
}

#[test]
fn validate_reports_structure() {
    let out = fpa(&["validate", "--instance", &fixture("iid/two_by_two.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["verdict"], "valid");
    assert_eq!(r["is_iid"], true);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["seed"], 0);
}

#[test]
fn exact_pbne_fixture_verifies() {
    let out = fpa(&[
        "verify",
        "--instance",
        &fixture("iid/two_by_two.json"),
        "--profile",
        &fixture("profiles/two_by_two_pbne.json"),
        "--notion",
        "pbne",
        "--eps",
        "0/1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["holds"], true);
}

#[test]
fn failed_verification_exits_one() {
    let p = temp("bad.json");
    std::fs::write(&p, r#"{"kind": "pure", "strategies": [{"0": "0", "1": "1/2"}, {"0": "0", "1": "0"}]}"#).unwrap();
    let out = fpa(&[
        "verify",
        "--instance",
        &fixture("iid/two_by_two.json"),
        "--profile",
        p.to_str().unwrap(),
        "--notion",
        "pbne",
        "--eps",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["verdict"], "fail");
    assert_eq!(r["result"]["regret"], "1/8");
}

#[test]
fn input_errors_exit_two() {
    let out = fpa(&["validate", "--instance", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["verdict"], "error");
    let out = fpa(&["brute-pure", "--instance", &fixture("iid/two_by_two.json"), "--eps", "1/0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fpa(&["validate", "--unknown-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["verdict"], "error");
}

#[test]
fn exhausted_budget_exits_three() {
    let out = fpa(&[
        "solve-ce",
        "--instance",
        &fixture("iid/two_by_two.json"),
        "--method",
        "dynamics",
        "--eps",
        "0",
        "--rounds",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["verdict"], "budget-exhausted");
}

#[test]
fn nonexistence_pipeline_finds_nothing() {
    let inst = temp("nonexist.json");
    let out = fpa(&["gen", "--kind", "nonexist", "--m", "12", "--out-instance", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["threshold"], "1/72");
    let out = fpa(&["brute-pure", "--instance", inst.to_str().unwrap(), "--eps", "1/73"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["verdict"], "none");
    let out = fpa(&["brute-pure", "--instance", inst.to_str().unwrap(), "--eps", "1"]);
    assert_eq!(report(&out)["verdict"], "found");
}

#[test]
fn gadget_suites_pass() {
    for (suite, circuit) in [
        ("appendix-c", None),
        ("appendix-c", Some("circuits/sat.net")),
        ("appendix-c", Some("circuits/unsat.net")),
        ("appendix-d", None),
        ("appendix-d", Some("circuits/purify_loop.pc")),
    ] {
        let mut args = vec!["check-gadgets".to_string(), "--suite".into(), suite.into()];
        if let Some(c) = circuit {
            args.extend(["--circuit".to_string(), fixture(c)]);
        }
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = fpa(&args);
        let r = report(&out);
        assert_eq!(out.status.code(), Some(0), "{suite} {circuit:?}: {r}");
        assert_eq!(r["failures"], 0);
    }
}

#[test]
fn generated_circuit_instances_validate() {
    for (kind, extra) in [("circuit", "circuits/unsat.net"), ("purecircuit", "circuits/purify_loop.pc")] {
        let inst = temp(&format!("{kind}.json"));
        let out = fpa(&["gen", "--kind", kind, "--circuit", &fixture(extra), "--out-instance", inst.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let out = fpa(&["validate", "--instance", inst.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(report(&out)["is_ipv"], false);
    }
}

#[test]
fn utility_matches_brute_force() {
    let out = fpa(&[
        "utility",
        "--instance",
        &fixture("iid/two_by_two.json"),
        "--profile",
        &fixture("profiles/two_by_two_pbne.json"),
        "--brute",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["brute_force_agrees"], true);
    // value 1 against an opponent that always bids 0: bid 1/2 wins outright
    let row = &r["rows"][1];
    assert_eq!(row["value"], "1/1");
    assert_eq!(row["utilities"][1]["utility"], "1/2");
}

#[test]
fn transform_round_trip_and_shrink() {
    let c = temp("c.json");
    let out = fpa(&[
        "transform",
        "--instance",
        &fixture("iid/two_by_two.json"),
        "--dir",
        "d2c",
        "--delta",
        "1/4",
        "--out-instance",
        c.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = fpa(&["transform", "--instance", c.to_str().unwrap(), "--dir", "c2d", "--delta", "1/8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["delta_used"], "1/8");

    let out = fpa(&["shrink", "--instance", &fixture("iid/tenths.json"), "--m", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(parse_rational(r["hausdorff"].as_str().unwrap()).unwrap() <= parse_rational("1/4").unwrap());
}

#[test]
fn solvers_report_exact_results() {
    let out = fpa(&["solve-symmetric", "--instance", &fixture("iid/two_by_two.json"), "--eps", "1/100"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["max_regret"], "0/1");
    assert_eq!(r["monotone"], true);
    let out = fpa(&["solve-ce", "--instance", &fixture("iid/two_by_two.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["ce_regret"], "0/1");
}

#[test]
fn reports_are_deterministic_and_rational() {
    let inst = fixture("iid/three_bidders_binary.json");
    let runs: Vec<Output> = [None, Some("1"), Some("3")]
        .into_iter()
        .map(|t| {
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_fpa"));
            cmd.args(["solve-symmetric", "--instance", &inst, "--eps", "1/20", "--seed", "5"]);
            match t {
                Some(t) => cmd.env("FPA_THREADS", t),
                None => cmd.env_remove("FPA_THREADS"),
            };
            cmd.output().unwrap()
        })
        .collect();
    assert_eq!(runs[0].status.code(), Some(0));
    assert!(runs.windows(2).all(|w| w[0].stdout == w[1].stdout));
    let r = report(&runs[0]);
    assert_eq!(r["seed"], 5);
    check_rationals(&r);

    let out = temp("report.json");
    let o = fpa(&["--out", out.to_str().unwrap(), "check-gadgets", "--suite", "appendix-d"]);
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    check_rationals(&r);
}
