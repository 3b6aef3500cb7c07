use std::process::Command;

use energy_flowshop::cli::{
    config_from_args, run_with, EXIT_CONTRACT, EXIT_IO, EXIT_OK, EXIT_USAGE,
};
use energy_flowshop::harness::{parse_front_csv, FRONT_CSV_HEADER};
use energy_flowshop::instance::{load_table3, Instance};
use energy_flowshop::objectives::evaluate;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("eflow").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

const QUICK: [&str; 4] = ["--pop", "20", "--gen", "5"];

#[test]
fn default_parameters() {
    let cfg = config_from_args(["eflow", "solve", "--instance", "table3"]).unwrap();
    assert_eq!(cfg.pop_size, 200);
    assert_eq!(cfg.generations, 50);
    assert_eq!(cfg.p_crossover, 0.6);
    assert_eq!(cfg.p_mutation, 0.05);
    assert!(cfg.ls_enabled);
}

#[test]
fn solve_front_re_evaluates() {
    let (code, out, err) = run(&[&QUICK[..], &["solve", "--instance", "table3"]].concat());
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out.lines().next(), Some(FRONT_CSV_HEADER));
    let inst = load_table3();
    let rows = parse_front_csv(&out).unwrap();
    assert!(!rows.is_empty());
    for row in rows {
        let obj = evaluate(&inst, &row.permutation().unwrap()).unwrap();
        assert_eq!(obj.flowtime, row.flowtime);
        assert!((obj.energy - row.energy_whr).abs() <= 1e-6 * obj.energy);
    }
}

#[test]
fn solve_is_reproducible_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let p = path.to_str().unwrap();
        let (code, _, err) = run(&[
            &QUICK[..],
            &["--seed", "4", "--out", p, "solve", "--instance", "table3"],
        ]
        .concat());
        assert_eq!(code, EXIT_OK, "{err}");
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(value.as_array().is_some_and(|v| !v.is_empty()));
}

#[test]
fn generate_then_solve_native_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.txt");
    let p = path.to_str().unwrap();
    let (code, _, _) = run(&[
        "--seed",
        "7",
        "--out",
        p,
        "generate",
        "--jobs",
        "6",
        "--machines",
        "3",
    ]);
    assert_eq!(code, EXIT_OK);
    let inst = Instance::from_native(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((inst.n_jobs(), inst.n_machines()), (6, 3));
    let (code, out, _) = run(&[&QUICK[..], &["solve", "--instance", p]].concat());
    assert_eq!(code, EXIT_OK);
    assert!(parse_front_csv(&out).is_ok());
}

#[test]
fn bench_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/tai20_5.txt");
    let records = dir.path().join("records.csv");
    let r = records.to_str().unwrap();
    let (code, _, err) = run(&[
        &QUICK[..],
        &["--out", r, "bench", "--instances", data, "--index", "1,2"],
    ]
    .concat());
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(dir.path().join("records_averages.csv").exists());
    let (code, out, _) = run(&["report", "--input", r]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("Ta20x5"));
}

#[test]
fn error_exit_codes() {
    assert_eq!(run(&["bench"]).0, EXIT_USAGE);
    assert_eq!(run(&["solve"]).0, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
    assert_eq!(run(&["solve", "--instance", "/no/such/file"]).0, EXIT_IO);
    assert_eq!(
        run(&["--pc", "1.5", "solve", "--instance", "table3"]).0,
        EXIT_CONTRACT
    );
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data/tai20_5.txt");
    assert_eq!(
        run(&["solve", "--instance", data, "--index", "42"]).0,
        EXIT_USAGE
    );
}

#[test]
fn binary_exit_status() {
    let status = Command::new(env!("CARGO_BIN_EXE_eflow"))
        .arg("bench")
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));
    let ok = Command::new(env!("CARGO_BIN_EXE_eflow"))
        .arg("--version")
        .output()
        .unwrap();
    assert!(ok.status.success());
}
