use std::process::Command as Process;

use algebraic_locality::cli::{parse_list, run, Command, Format, RunConfig, EXIT_CHECK, EXIT_DERIVATION, EXIT_INPUT};
use algebraic_locality::sim::CacheGeometry;

fn locality(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(env!("CARGO_BIN_EXE_locality"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn list_syntax() {
    assert_eq!(parse_list("16:48:8").unwrap(), [16, 24, 32, 40, 48]);
    assert_eq!(parse_list("3, 5,9").unwrap(), [3, 5, 9]);
    assert!(parse_list("1:2").is_err());
    assert!(parse_list("1:4:0").is_err());
    assert!(parse_list("a").is_err());
}

#[test]
fn analyze_json_is_deterministic() {
    let cfg = RunConfig::new(Command::Analyze, "matmul.aff").format(Format::Json);
    let a = run(&cfg);
    assert_eq!(a.exit_code, 0);
    assert_eq!(a, run(&cfg));
    let v: serde_json::Value = serde_json::from_str(&a.output).unwrap();
    assert_eq!(v["param"], "n");
    assert_eq!(v["accesses"]["text"], "4n^3");
    assert_eq!(v["data_size"]["text"], "3n^2/8");
    assert_eq!(v["domain"]["min_n"], 16);
    assert_eq!(v["ri_table"].as_array().unwrap().len(), 8);
    assert_eq!(v["cache_table"][8]["cache_size"]["text"], "3n^2/8");
    assert_eq!(v["invariance"]["pass"], true);
}

#[test]
fn analyze_table_lists_rows() {
    let r = run(&RunConfig::new(Command::Analyze, "traverse1d"));
    assert_eq!(r.exit_code, 0);
    assert!(r.output.contains("n - 7"), "{}", r.output);
    let r = run(&RunConfig::new(Command::Analyze, "traverse1d").format(Format::Csv));
    assert!(r.output.starts_with("row,"));
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(
        run(&RunConfig::new(Command::Analyze, "/nonexistent/zzz.aff")).exit_code,
        EXIT_INPUT
    );
    assert_eq!(run(&RunConfig::new(Command::Simulate, "matmul")).exit_code, EXIT_INPUT);
    assert_eq!(run(&RunConfig::new(Command::Analyze, "abacc")).exit_code, EXIT_INPUT);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.aff");
    std::fs::write(&bad, "for i = 0 to n { access A[i * i]; }").unwrap();
    let r = run(&RunConfig::new(Command::Check, &bad));
    assert_eq!(r.exit_code, EXIT_INPUT);
    assert!(r.warnings[0].contains("bad.aff"));
}

#[test]
fn underivable_program_exits_two() {
    assert_eq!(
        run(&RunConfig::new(Command::Analyze, "trmv")).exit_code,
        EXIT_DERIVATION
    );
}

#[test]
fn compare_threshold_sets_exit_code() {
    let mut cfg = RunConfig::new(Command::Compare, "matmul").bind("n", 32);
    cfg.sweep = vec![12, 48, 96];
    let r = run(&cfg);
    assert_eq!(r.exit_code, 0, "{}", r.output);
    let mut cfg = RunConfig::new(Command::Compare, "mvt").bind("n", 48);
    cfg.sweep = vec![48];
    cfg.threshold = 0.001;
    let r = run(&cfg);
    assert_eq!(r.exit_code, EXIT_CHECK);
    assert!(r.warnings.iter().any(|w| w.contains("moving cliff")));
}

#[test]
fn check_modes() {
    let r = run(&RunConfig::new(Command::Check, "matmul").bind("n", 16));
    assert_eq!(r.exit_code, 0);
    assert!(r.output.contains("96"));
    let r = run(&RunConfig::new(Command::Check, "matmul"));
    assert_eq!(r.exit_code, 0);
    assert!(r.output.contains("3n^2/8"));
}

#[test]
fn scale_evaluates_and_warns() {
    let mut cfg = RunConfig::new(Command::Scale, "matmul");
    cfg.eval = vec![64, 100];
    let r = run(&cfg);
    assert_eq!(r.exit_code, 0);
    assert!(r.output.contains("n^2/8 + 3n/8"));
    assert!(r.output.lines().any(|l| l.contains("536")));
    assert!(r.warnings.iter().any(|w| w.contains("n = 100")));
}

#[test]
fn simulate_sweep_csv() {
    let mut cfg = RunConfig::new(Command::Simulate, "matmul")
        .bind("n", 16)
        .format(Format::Csv);
    cfg.sweep = vec![8, 16];
    cfg.geometries = vec![CacheGeometry::parse("4:2:64", 8).unwrap()];
    let r = run(&cfg);
    assert_eq!(r.exit_code, 0);
    let lines: Vec<&str> = r.output.lines().collect();
    assert_eq!(lines[0], "geometry,capacity,accesses,misses,cold,miss_ratio");
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().any(|l| l.starts_with("full:16:64,16,16384,")));
}

#[test]
fn binary_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let trace = dir.path().join("t.csv");
    let (code, stdout, _) = locality(&[
        "simulate",
        "abacc",
        "--b",
        "1",
        "--geometry",
        "full:3:8",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
        "--dump-trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["results"][0]["misses"], 3);
    assert_eq!(v["data_blocks"], 3);
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 6);

    let (code, _, stderr) = locality(&["analyze", "--b", "x", "matmul"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(!stderr.is_empty());
    assert_eq!(locality(&["analyze", "trmv"]).0, EXIT_DERIVATION);
    assert_eq!(
        locality(&[
            "compare",
            "mvt",
            "--bind",
            "n=48",
            "--sweep",
            "48",
            "--threshold",
            "0.001"
        ])
        .0,
        EXIT_CHECK
    );
    assert_eq!(locality(&["--help"]).0, 0);
}
