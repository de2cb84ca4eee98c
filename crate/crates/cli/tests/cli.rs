use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pmrsim"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn pmrsim")
}

fn ok_json(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn error_of(o: &Output) -> (String, i32) {
    let v: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(v["exit_code"].as_i64().unwrap() as i32, o.status.code().unwrap());
    (v["error"].as_str().unwrap().to_string(), o.status.code().unwrap())
}

const ONE_QUBIT: &str = r#"{"n_qubits":1,"terms":[{"pauli":"Z","coeff":[0.5,0]},{"pauli":"X","coeff":[0.3,0]}]}"#;

#[test]
fn decompose_one_qubit() {
    let d = TempDir::new().unwrap();
    let h = write(&d, "h.json", ONE_QUBIT);
    let v = ok_json(&["decompose", "--hamiltonian", s(&h)]);
    assert_eq!(v["m"], 1);
    assert_eq!(v["gamma_total"], 0.3);
}

#[test]
fn params_example() {
    let d = TempDir::new().unwrap();
    let h = write(
        &d,
        "h.json",
        r#"{"n_qubits":1,"terms":[{"pauli":"X","coeff":[2,0]},{"pauli":"Z","coeff":[0.5,0]}]}"#,
    );
    let v = ok_json(&["params", "--hamiltonian", s(&h), "--eps", "0.01", "--time", "10"]);
    assert_eq!(v["gamma"], 2.0);
    assert_eq!(v["delta_e"], 1.0);
    assert_eq!(v["r"], 29);
    assert_eq!(v["K"], 32);
    // Smallest order whose tail fits the per-step budget.
    let q = v["Q"].as_u64().unwrap() as usize;
    let x = 2.0 * 10.0 / 29.0;
    let tail = |q: usize| pmrsim::lcu::tail(q, x);
    let budget = 0.01 / 58.0;
    assert!(tail(q) <= budget && tail(q - 1) > budget);
}

#[test]
fn artifacts_round_trip_between_verbs() {
    let d = TempDir::new().unwrap();
    let h = write(&d, "h.json", ONE_QUBIT);
    let pmr = d.path().join("pmr.json");
    let params = d.path().join("params.json");
    let circ = d.path().join("step.txt");
    let st = write(&d, "psi.json", "[[0.6, 0.0], [0.0, 0.8]]");
    let out = d.path().join("out.json");
    assert!(run(&["decompose", "--hamiltonian", s(&h), "--out", s(&pmr)]).status.success());
    assert!(run(&["params", "--hamiltonian", s(&pmr), "--eps", "0.05", "--time", "1", "--out", s(&params)])
        .status
        .success());
    let summary = ok_json(&["compile", "--hamiltonian", s(&pmr), "--params", s(&params), "--out", s(&circ), "--qasm"]);
    let text = std::fs::read_to_string(&circ).unwrap();
    let parsed = pmrsim::circuit::from_text(&text).unwrap();
    assert_eq!(parsed.n_qubits as u64, summary["qubits"].as_u64().unwrap());
    assert!(std::fs::read_to_string(circ.with_extension("qasm")).unwrap().starts_with("OPENQASM 2.0;"));
    assert!(run(&["simulate", "--hamiltonian", s(&pmr), "--state", s(&st), "--eps", "0.05", "--time", "1", "--out", s(&out)])
        .status
        .success());
    // The simulate output is itself a valid state file.
    let again = ok_json(&["simulate", "--hamiltonian", s(&pmr), "--state", s(&out), "--eps", "0.05", "--time", "1"]);
    let norm: f64 = again["state"].as_array().unwrap().iter().map(|p| p[0].as_f64().unwrap().powi(2) + p[1].as_f64().unwrap().powi(2)).sum();
    assert!((norm - 1.0).abs() < 0.1);
}

#[test]
fn zero_time_returns_input_state() {
    let d = TempDir::new().unwrap();
    let h = write(&d, "h.json", ONE_QUBIT);
    let st = write(&d, "psi.json", "[[0.1, 0.7], [0.3, -0.2]]");
    let v = ok_json(&["simulate", "--hamiltonian", s(&h), "--state", s(&st), "--eps", "0.01", "--time", "0"]);
    let got: Vec<[f64; 2]> = serde_json::from_value(v["state"].clone()).unwrap();
    let want: Vec<[f64; 2]> = serde_json::from_str(&std::fs::read_to_string(&st).unwrap()).unwrap();
    let bits = |v: &[[f64; 2]]| v.iter().flatten().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&got), bits(&want));
}

#[test]
fn outputs_are_deterministic() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "ryd.json", r#"{"model":"rydberg","geometry":"clustered","omega":1,"delta":0.5,"c6":10,"seed":3}"#);
    let a = run(&["estimate", "--model", s(&m), "--sizes", "4,6,8,10", "--json"]);
    let b = run(&["estimate", "--model", s(&m), "--sizes", "4,6,8,10", "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["estimate", "--model", s(&m), "--sizes", "4,6,8,10", "--json", "--geometry", "chain"]);
    assert_ne!(a.stdout, c.stdout);
    let a = run(&["verify-dd", "--q-max", "2", "--instances", "5", "--seed", "9"]);
    let b = run(&["verify-dd", "--q-max", "2", "--instances", "5", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn estimate_table_and_json_file() {
    let d = TempDir::new().unwrap();
    let m = write(&d, "dip.json", r#"{"model":"dipolar","dims":1,"t_h":1,"u":2,"c_dd":0.5,"dipole":[0,0,1],"boundary":"periodic"}"#);
    let out = d.path().join("rep.json");
    let o = run(&["estimate", "--model", s(&m), "--sizes", "4,5,6,8", "--out", s(&out)]);
    assert!(o.status.success());
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.lines().next().unwrap().contains("M*Gamma*t"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["reports"][0]["M"], 8);
    assert!((v["slopes"]["pmr"]["slope"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn errors_are_json_with_distinct_codes() {
    let d = TempDir::new().unwrap();
    let h = write(&d, "h.json", ONE_QUBIT);
    let garbage = write(&d, "bad.json", "{ not json");
    let nonherm = write(&d, "nh.json", r#"{"n_qubits":1,"terms":[{"pauli":"X","coeff":[0,1]}]}"#);
    let big = write(&d, "big.json", r#"{"n_qubits":14,"terms":[{"pauli":"XIIIIIIIIIIIII","coeff":[1,0]}]}"#);
    let st = write(&d, "psi.json", "[[1, 0], [0, 0]]");
    let mut wide = vec!["[0,0]"; 1 << 13];
    wide[0] = "[1,0]";
    let st13 = write(&d, "psi13.json", &format!("[{}]", wide.join(",")));
    let h13 = write(&d, "h13.json", r#"{"n_qubits":13,"terms":[{"pauli":"XIIIIIIIIIIII","coeff":[1,0]}]}"#);

    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["params", "--hamiltonian", s(&h), "--eps", "1.5", "--time", "1"], "usage"),
        (vec!["params", "--hamiltonian", "/nonexistent/h.json", "--eps", "0.1", "--time", "1"], "io"),
        (vec!["params", "--hamiltonian", s(&garbage), "--eps", "0.1", "--time", "1"], "parse"),
        (vec!["decompose", "--hamiltonian", s(&nonherm)], "non_hermitian"),
        (vec!["simulate", "--hamiltonian", s(&h), "--state", s(&st), "--eps", "0.1", "--time", "1", "--dense-limit", "0"], "usage"),
        (vec!["simulate", "--hamiltonian", s(&big), "--state", s(&st), "--eps", "0.1", "--time", "1"], "contract"),
        (vec!["simulate", "--hamiltonian", s(&h13), "--state", s(&st13), "--eps", "0.1", "--time", "1"], "dense_limit"),
        (vec!["simulate", "--hamiltonian", s(&h), "--state", s(&st), "--eps", "0.1", "--time", "3", "--term-budget", "2"], "budget"),
    ];
    let mut seen = std::collections::BTreeMap::new();
    for (args, kind) in cases {
        let o = run(&args);
        assert!(!o.status.success(), "{args:?} succeeded");
        let (k, code) = error_of(&o);
        assert_eq!(k, kind, "{args:?}");
        if let Some(prev) = seen.insert(k.clone(), code) {
            assert_eq!(prev, code);
        }
    }
    let codes: std::collections::BTreeSet<_> = seen.values().collect();
    assert_eq!(codes.len(), seen.len());
}
