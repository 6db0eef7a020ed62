use std::path::PathBuf;
use std::process::Command;

use nonlocal_gates::cli;
use nonlocal_gates::synth::CorrectionTable;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("nlgate").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn golden_outputs() {
    let cases: [(&[&str], &str); 4] = [
        (&["table", "post3q:u3a"], "table_post3q_u3a.json"),
        (&["branches", "mid2q"], "branches_mid2q.txt"),
        (&["simulate", "post2q:cnot-ab", "--branch", "phi+,psi+"], "simulate_post2q_cnot_ab.txt"),
        (&["verify", "post2q:swap", "--states", "50", "--seed", "7", "--json"], "verify_post2q_swap.json"),
    ];
    for (args, file) in cases {
        let (code, out, err) = run(args);
        assert_eq!(code, 0, "{args:?}: {err}");
        assert_eq!(out, golden(file), "{args:?}");
    }
}

#[test]
fn table_entry_renders_in_printed_notation() {
    let (_, json, _) = run(&["table", "post3q:u3a"]);
    let table = CorrectionTable::from_json(&json).unwrap();
    assert_eq!(table.len(), 16);
    let (_, text, _) = run(&["table", "post3q:u3a", "--text"]);
    assert!(text.contains("σx ⊗ 1 ⊗ σx"), "{text}");
    let (_, oracle, _) = run(&["table", "post3q:u3a", "--method", "oracle"]);
    assert_eq!(oracle, json);
}

#[test]
fn branch_listing() {
    let (code, out, _) = run(&["branches", "mid2q"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 16);
    for l in lines {
        let p: f64 = l.split_whitespace().nth(1).unwrap().parse().unwrap();
        assert!((p - 0.0625).abs() < 1e-12);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate", "mid2q"]).0, 2);
    assert_eq!(run(&["verify", "post9q:u3a"]).0, 2);
    assert_eq!(run(&["verify", "post2q:AC"]).0, 2);
    assert_eq!(run(&["verify", "mid2q", "--states", "0"]).0, 2);
    assert_eq!(run(&["simulate", "mid2q", "--branch", "phi+"]).0, 2);
    assert_eq!(run(&["diff-paper", "mid2q"]).0, 2);
    assert_eq!(run(&["verify", "post2q:swap", "--states", "5"]).0, 0);
    // a negative tolerance cannot be met, so every check fails
    let (code, out, _) = run(&["verify", "post2q:swap", "--states", "1", "--tol=-1"]);
    assert_eq!(code, 1);
    assert!(out.ends_with("FAIL\n"));
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("diff-paper"));
}

#[test]
fn diff_verb_reports_readings() {
    let (code, out, _) = run(&["diff-paper", "post3q:u3b"]);
    assert_eq!(code, 0);
    assert!(out.contains("16 of 16 entries match"));
    assert!(out.contains("256/256"), "{out}");
    let (code, json, _) = run(&["diff-paper", "post2q:two-cnot", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["methods_agree"], true);
}

#[test]
fn out_flag_and_circuit_files() {
    let dir = tempfile::tempdir().unwrap();
    let circuit = dir.path().join("u3b.circ");
    std::fs::write(&circuit, "# CA then AB then BC\nscheme post3q\ncnot C A\ncnot A B\ncnot B C\n").unwrap();
    let out = dir.path().join("table.json");
    let (code, stdout, _) = run(&["table", circuit.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let (_, named, _) = run(&["table", "post3q:u3b"]);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), named);

    std::fs::write(&circuit, "scheme post3q\ncnot A\n").unwrap();
    assert_eq!(run(&["verify", circuit.to_str().unwrap()]).0, 2);
}

#[test]
fn binary_matches_library_entry_point() {
    let args = ["simulate", "post3q:u3a", "--seed", "3", "--json"];
    let output = Command::new(env!("CARGO_BIN_EXE_nlgate")).args(args).output().unwrap();
    assert!(output.status.success());
    assert_eq!(String::from_utf8(output.stdout).unwrap(), run(&args).1);
    let bad = Command::new(env!("CARGO_BIN_EXE_nlgate")).arg("nope").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
