use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qsg_cli::args::Cli;
use qsg_cli::{run, Report, EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
use qsg_core::io::{curve_to_jsonl, matrix_to_json, parse_matrix};
use qsg_core::HermitianMatrix;

use clap::Parser;

fn qsg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsg"))
        .args(args)
        .env_remove("QSG_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn pure_state_manifold_dimension() {
    let o = qsg(&["strata", "dim", "2", "1", "density"]);
    assert_eq!(o.status.code(), Some(EXIT_PASS));
    assert_eq!(stdout(&o).trim(), "2");
    assert_eq!(stdout(&qsg(&["strata", "dim", "4", "2", "cone"])).trim(), "12");
    assert_eq!(qsg(&["strata", "dim", "2", "3", "cone"]).status.code(), Some(EXIT_INPUT));
}

#[test]
fn malformed_inputs_exit_with_2_and_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"dim\": 2, \"re\": [[1, 0]");
    let o = qsg(&["entangle", "ppt", "--state", s(&broken)]);
    assert_eq!(o.status.code(), Some(EXIT_INPUT));
    assert!(stderr(&o).contains("broken.json"), "{}", stderr(&o));

    let skew = write(
        dir.path(),
        "skew.json",
        r#"{"dim":2,"re":[[1,2],[0,1]],"im":[[0,0],[0,0]]}"#,
    );
    let o = qsg(&["kahler", "verify", "--point", s(&skew)]);
    assert_eq!(o.status.code(), Some(EXIT_INPUT));
    assert!(stderr(&o).contains("not Hermitian"));

    let missing = dir.path().join("missing.json");
    assert_eq!(qsg(&["entangle", "ppt", "--state", s(&missing)]).status.code(), Some(EXIT_INPUT));
    assert_eq!(qsg(&["strata", "nope"]).status.code(), Some(EXIT_INPUT));
}

#[test]
fn dimension_mismatch_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(dir.path(), "two.json", &matrix_to_json(&HermitianMatrix::identity(2)));
    let three = write(dir.path(), "three.json", &matrix_to_json(&HermitianMatrix::identity(3)));
    let o = qsg(&["tensors", "eval", "--kind", "lambda", "--point", s(&two), "--a", s(&three), "--b", s(&two)]);
    assert_eq!(o.status.code(), Some(EXIT_INPUT));
    let o = qsg(&["entangle", "ppt", "--state", s(&three), "--n1", "2"]);
    assert_eq!(o.status.code(), Some(EXIT_INPUT));
}

#[test]
fn tensors_eval_prints_the_value() {
    let dir = tempfile::tempdir().unwrap();
    let xi = write(dir.path(), "xi.json", &matrix_to_json(&HermitianMatrix::diagonal(&[1.0, -1.0])));
    let id = write(dir.path(), "id.json", &matrix_to_json(&HermitianMatrix::identity(2)));
    let o = qsg(&["tensors", "eval", "--kind", "r", "--point", s(&xi), "--a", s(&id), "--b", s(&xi)]);
    assert_eq!(o.status.code(), Some(EXIT_PASS));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // R(xi)(I, xi) = <xi, 2 xi> = Tr(xi^2) = 2
    assert!((v["re"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(v["kind"], "r");
}

#[test]
fn tangency_reports_pass_and_failure() {
    let dir = tempfile::tempdir().unwrap();
    let good: Vec<(f64, HermitianMatrix)> = (0..7)
        .map(|i| {
            let t = 0.1 * i as f64;
            (t, HermitianMatrix::diagonal(&[1.0 + t, 0.0, 0.0]))
        })
        .collect();
    let path = write(dir.path(), "good.jsonl", &curve_to_jsonl(&good));
    let o = qsg(&["strata", "tangency", "--curve", s(&path)]);
    assert_eq!(o.status.code(), Some(EXIT_PASS), "{}", stderr(&o));

    // crosses the rank-one stratum transversally at t = 0
    let bad: Vec<(f64, HermitianMatrix)> = (0..7)
        .map(|i| {
            let t = 0.1 * (i as f64 - 3.0);
            (t, HermitianMatrix::diagonal(&[1.0, t]))
        })
        .collect();
    let path = write(dir.path(), "bad.jsonl", &curve_to_jsonl(&bad));
    let o = qsg(&["strata", "tangency", "--curve", s(&path)]);
    assert_eq!(o.status.code(), Some(EXIT_FAIL));
    assert!(stderr(&o).contains("tangency.max_residual"));

    let mut uneven = good.clone();
    uneven[3].0 += 0.01;
    let path = write(dir.path(), "uneven.jsonl", &curve_to_jsonl(&uneven));
    assert_eq!(qsg(&["strata", "tangency", "--curve", s(&path)]).status.code(), Some(EXIT_INPUT));
}

#[test]
fn chart_uses_one_based_indices() {
    let dir = tempfile::tempdir().unwrap();
    let base = write(dir.path(), "base.json", &matrix_to_json(&HermitianMatrix::diagonal(&[0.0, 1.0, 2.0])));
    let o = qsg(&["strata", "chart", "--base", s(&base), "--J", "2,3"]);
    assert_eq!(o.status.code(), Some(EXIT_PASS), "{}", stderr(&o));
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.data.unwrap()["k"], 2);
    // index 1 hits the zero diagonal entry: outside every chart domain
    let o = qsg(&["strata", "chart", "--base", s(&base), "--J", "1,3"]);
    assert_eq!(o.status.code(), Some(EXIT_INPUT));
    assert_eq!(qsg(&["strata", "chart", "--base", s(&base), "--J", "0"]).status.code(), Some(EXIT_INPUT));
}

#[test]
fn seed_comes_from_flag_or_environment() {
    let args = ["entangle", "sample-separable", "--n1", "2", "--n2", "2", "--terms", "3"];
    let default = stdout(&qsg(&args));
    let explicit = stdout(&qsg(&[&args[..], &["--seed", "0"]].concat()));
    assert_eq!(default, explicit);
    let env = Command::new(env!("CARGO_BIN_EXE_qsg"))
        .args(args)
        .env("QSG_SEED", "5")
        .output()
        .unwrap();
    let five = stdout(&qsg(&[&args[..], &["--seed", "5"]].concat()));
    assert_eq!(stdout(&env), five);
    assert_ne!(five, default);
    let rho = parse_matrix(&default).unwrap();
    assert!((rho.trace() - 1.0).abs() < 1e-12);
}

#[test]
fn sampled_separable_states_pass_ppt_and_bell_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sep.json");
    let o = qsg(&["entangle", "sample-separable", "--n1", "2", "--n2", "3", "--terms", "4", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(EXIT_PASS));
    let o = qsg(&["entangle", "ppt", "--state", s(&out), "--n1", "2", "--n2", "3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ppt"], true);

    let bell = write(dir.path(), "bell.json", &matrix_to_json(&qsg_cli::batteries::bell_state()));
    let v: serde_json::Value = serde_json::from_str(&stdout(&qsg(&["entangle", "ppt", "--state", s(&bell)]))).unwrap();
    assert_eq!(v["ppt"], false);
    assert!((v["min_eigenvalue"].as_f64().unwrap() + 0.5).abs() < 1e-12);

    let o = qsg(&["entangle", "estimate", "--state", s(&bell), "--n1", "2", "--n2", "2"]);
    assert_eq!(o.status.code(), Some(EXIT_PASS));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn kahler_verify_at_a_file_point() {
    let dir = tempfile::tempdir().unwrap();
    let xi = write(dir.path(), "xi.json", &matrix_to_json(&HermitianMatrix::diagonal(&[2.0, 0.5, -1.0])));
    let o = qsg(&["kahler", "verify", "--point", s(&xi), "--trials", "5"]);
    assert_eq!(o.status.code(), Some(EXIT_PASS), "{}", stdout(&o));
    let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r.check("kahler.j_squared").unwrap().pass);
    let names: Vec<_> = r.checks.iter().map(|c| c.name.clone()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn small_verify_all_is_deterministic_across_execution_modes() {
    let parse = |extra: &[&str]| {
        let base = ["qsg", "verify", "all", "--n", "3", "--trials", "2", "--restarts", "2", "--seed", "4"];
        Cli::parse_from([&base[..], extra].concat())
    };
    let a = run(&parse(&[])).unwrap();
    let b = run(&parse(&[])).unwrap();
    let c = run(&parse(&["--sequential"])).unwrap();
    assert_eq!(a.code, EXIT_PASS, "{}", a.output);
    let (ra, rb, rc) = (a.report.unwrap(), b.report.unwrap(), c.report.unwrap());
    assert_eq!(ra.without_duration(), rb.without_duration());
    assert_eq!(ra.checks, rc.checks);
}
