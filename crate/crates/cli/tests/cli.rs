use std::path::PathBuf;
use std::process::{Command, Output};

use qimp_core::qmath::{literal::parse_matrix, PartialDensityOp};
use qimp_core::state::{ClassicalState, Povd};
use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../programs").join(name)
}

fn qimp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qimp"))
        .args(args)
        .env_remove("QIMP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(name: &str) -> String {
    corpus(name).to_string_lossy().into_owned()
}

#[test]
fn run_sc_reaches_the_encoded_bits() {
    let o = qimp(&["run", &path("sc.qimp"), "--classical", "x0=1,x1=1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mu = Povd::from_json(&v["terminal"]).unwrap();
    assert_eq!(mu.len(), 1);
    let sigma = ClassicalState::from_pairs([("x0", 1), ("x1", 1), ("y0", 1), ("y1", 1)]);
    let rho = mu.get(&sigma).expect("entry 1111");
    assert!(rho.matrix().approx_eq(PartialDensityOp::basis(4, 3).matrix(), 1e-9));
    assert_eq!(v["residual_mass"].as_f64(), Some(0.0));
}

#[test]
fn run_text_output_lists_the_terminal_state() {
    let o = qimp(&["run", &path("sc.qimp"), "--classical", "x0=0,x1=1"]);
    let out = stdout(&o);
    // Zero-valued variables are implicit.
    assert!(out.contains("{x1=1, y1=1} -> "), "{out}");
    assert!(out.contains("residual mass: 0.000000"));
}

#[test]
fn diverging_run_reports_its_mass_as_residual() {
    let o = qimp(&["run", &path("diverge.qimp"), "--fuel", "100"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("residual mass: 1.000000"), "{out}");
    assert!(out.contains("ε"));
}

#[test]
fn run_on_empty_distribution_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("eps.json");
    std::fs::write(&f, r#"{"qubits": ["q0", "q1"], "entries": []}"#).unwrap();
    let o = qimp(&["run", &path("sc.qimp"), "--povd", f.to_str().unwrap(), "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(Povd::from_json(&v["terminal"]).unwrap().is_empty());
}

#[test]
fn trace_shows_the_expression_reductions() {
    let o = qimp(&["run", &path("abort.qimp"), "--trace"]);
    let out = stdout(&o);
    assert!(out.contains("~ 1 = 1"), "{out}");
    assert!(out.contains("(abort, {x=1}"));
}

#[test]
fn denote_matches_run_on_sc() {
    let o = qimp(&["denote", &path("sc.qimp"), &path("sc_10.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["converged"], Value::Bool(true));
    let den = Povd::from_json(&v["result"]).unwrap();

    let o = qimp(&["run", &path("sc.qimp"), "--povd", &path("sc_10.json"), "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ran = Povd::from_json(&v["terminal"]).unwrap();
    assert!(den.approx_eq(&ran, 1e-9));
}

#[test]
fn denote_of_abort_branch_loses_mass() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("zero.json");
    std::fs::write(&f, r#"{"qubits": ["q"], "entries": [{"cstate": {}, "rho": "[[1, 0], [0, 0]]"}]}"#).unwrap();
    let o = qimp(&["denote", &path("abort.qimp"), f.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mu = Povd::from_json(&v["result"]).unwrap();
    assert!((mu.total_mass() - 0.5).abs() < 1e-9);
}

#[test]
fn denote_of_while_true_is_empty_and_converged() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("q.json");
    std::fs::write(&f, r#"{"qubits": ["q"], "entries": [{"cstate": {}, "rho": "[[1, 0], [0, 0]]"}]}"#).unwrap();
    let o = qimp(&["denote", &path("diverge.qimp"), f.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["converged"], Value::Bool(true));
    assert!(Povd::from_json(&v["result"]).unwrap().is_empty());
}

#[test]
fn pc_simplify_prints_four_unit_measurements() {
    let o = qimp(&["pc", &path("sc.qimp"), &path("bell.qassn"), "--simplify", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ms = v["measurements"].as_array().unwrap();
    assert_eq!(ms.len(), 4);
    for m in ms {
        let ops = m.as_array().unwrap();
        assert_eq!(ops.len(), 4);
        for op in ops {
            let mat = parse_matrix(op["matrix"].as_str().unwrap()).unwrap();
            let nonzero: Vec<_> = mat.data().iter().filter(|z| z.norm() > 1e-9).collect();
            assert_eq!(nonzero.len(), 1);
            assert!((nonzero[0].re - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn pc_through_skip_is_verbatim() {
    let o = qimp(&["pc", &path("skip.qimp"), "box(x = 1) && E[1_{x = 1}] <= 1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "box(x = 1) && E[1_{x = 1}] <= 1.0");
}

#[test]
fn pc_rejects_loops_and_names_them() {
    let o = qimp(&["pc", &path("coin.qimp"), "box(true)"]);
    assert_eq!(o.status.code(), Some(64));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("while c = 0"), "{err}");
}

#[test]
fn check_sc_passes_on_the_canonical_witnesses() {
    let mut args = vec!["check".to_string(), path("sc.qhl")];
    for w in ["sc_00.json", "sc_01.json", "sc_10.json", "sc_11.json"] {
        args.push("--witness".into());
        args.push(path(w));
    }
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    let o = qimp(&args);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["overall"], "pass");
    assert_eq!(v["summary"]["pass"], 4);
}

#[test]
fn check_wrong_post_fails_with_counterexample() {
    let o = qimp(&["check", &path("sc_wrong.qhl"), "--witness", &path("sc_11.json")]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["overall"], "fail");
    let ce = &v["witnesses"][0]["counterexample"];
    let terminal = Povd::from_json(&ce["terminal"]).unwrap();
    let sigma = ClassicalState::from_pairs([("x0", 1), ("x1", 1), ("y0", 1), ("y1", 1)]);
    assert!(terminal.get(&sigma).is_some());
    Povd::from_json(&ce["witness"]).unwrap();
}

#[test]
fn check_without_witnesses_is_vacuous() {
    let o = qimp(&["check", &path("sc.qhl"), "--mode", "semantic"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["overall"], "vacuous");
}

#[test]
fn random_witnesses_follow_the_seed() {
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qimp"));
        c.args(["check", &path("sc.qhl"), "--random", "5", "--qubits", "2", "--mode", "semantic", "--seed", "7"]);
        match seed {
            Some(s) => c.env("QIMP_SEED", s),
            None => c.env_remove("QIMP_SEED"),
        };
        let o = c.output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["summary"]["pass"], 5);
        v
    };
    assert_eq!(run(None).to_string(), run(None).to_string());
    assert_eq!(run(Some("7")).to_string(), run(None).to_string());
}

#[test]
fn qubit_count_mismatch_is_a_usage_error() {
    let o = qimp(&["check", &path("sc.qhl"), "--random", "1", "--qubits", "3"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn indeterminate_only_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let prog = dir.path().join("p.qimp");
    std::fs::write(&prog, "qubits q;\nmain { H[q]; x := M[q] }\n").unwrap();
    // Only the split along x satisfies both sides, and without box
    // conjuncts nothing proposes it.
    let qhl = dir.path().join("t.qhl");
    std::fs::write(&qhl, "pre: true\nprog: p.qimp\npost: tr(E[1_{x = 0}]) = 0.5 && tr(E[1_{x = 1}]) = 0 (+) tr(E[1_{x = 1}]) = 0.5 && tr(E[1_{x = 0}]) = 0\n").unwrap();
    let w = dir.path().join("w.json");
    std::fs::write(&w, r#"{"qubits": ["q"], "entries": [{"cstate": {"x": 0}, "rho": "[[1, 0], [0, 0]]"}]}"#).unwrap();
    let o = qimp(&["check", qhl.to_str().unwrap(), "--witness", w.to_str().unwrap(), "--mode", "semantic"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["overall"], "indeterminate", "{v}");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.qimp");
    std::fs::write(&f, "qubits q;\nmain { x := }\n").unwrap();
    let o = qimp(&["parse", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(64));
    let o = qimp(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn parse_round_trips_the_corpus() {
    for name in ["sc.qimp", "coin.qimp", "abort.qimp", "diverge.qimp", "skip.qimp"] {
        let o = qimp(&["parse", &path(name)]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("again.qimp");
        std::fs::write(&f, stdout(&o)).unwrap();
        let again = qimp(&["parse", f.to_str().unwrap()]);
        assert_eq!(stdout(&again), stdout(&o), "{name}");
    }
    let o = qimp(&["parse", &path("bell.qassn")]);
    assert_eq!(stdout(&o).trim(), "box(x0 = y0 && x1 = y1)");
}
