use std::path::Path;
use std::process::{Command, Output};

fn eha(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eha")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const CONFIG: &str = r#"
name = "tiny"
realizations = 2
master_seed = 5

[model]
family = "tfim"
sites = 3
jz = -1.0
hx = 0.5

[ansatz]
family = "eha"
blocks = 1

[[schedule]]
step_size = 0.05
iterations = 15
"#;

#[test]
fn list_names_presets_and_suites() {
    let o = eha(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("hm8") && text.contains("hm12_compare") && text.contains("table2"), "{text}");
}

#[test]
fn exact_solves_presets_and_shorthands() {
    let o = eha(&["exact", "hm8"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ground_energy: -13.4997"), "{}", stdout(&o));
    let o = eha(&["exact", "hm:2"]);
    assert!(stdout(&o).contains("ground_energy: -3.0000000000"), "{}", stdout(&o));
    let o = eha(&["exact", "--solver", "lanczos", "tfim:6:-1:1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("solver: Lanczos"));
}

#[test]
fn exact_reads_pauli_files() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("h.txt");
    std::fs::write(&path, "1 X0 X1\n1 Y0 Y1\n1 Z0 Z1\n").unwrap();
    let o = eha(&["exact", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ground_energy: -3.0000000000"));
    std::fs::write(&path, "1.0 Z0\n0.25 X0 X0\n").unwrap();
    let o = eha(&["exact", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(eha(&["exact", "nonsense"]).status.code(), Some(2));
    assert_eq!(eha(&["run", "no_such_preset"]).status.code(), Some(2));
    assert_eq!(eha(&["suite", "no_such_suite"]).status.code(), Some(2));
}

fn run_config(dir: &Path, extra: &[&str]) -> Output {
    let cfg = dir.join("tiny.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let out = dir.join("out");
    let mut args = vec!["run", "-q", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    eha(&args)
}

#[test]
fn run_writes_traces_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config(tmp.path(), &["--seed", "9", "--workers", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = tmp.path().join("out");
    for f in ["trace_000.csv", "trace_001.csv", "summary.json", "config.toml"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let trace = std::fs::read_to_string(out.join("trace_000.csv")).unwrap();
    assert!(trace.starts_with("iter,energy,entropy,grad_norm\n"));
    assert_eq!(trace.lines().count(), 17);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["master_seed"], 9);
    assert_eq!(summary["all_checks_passed"], true);
}

#[test]
fn shots_flag_switches_to_sampling() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_config(tmp.path(), &["--shots", "200"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["shots"], 200);
    assert_eq!(summary["decisions"]["gradient_method"], "parameter_shift");
}

#[test]
fn report_lists_missing_presets_and_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let o = eha(&["report", "table2", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("missing: hm8"), "{}", stdout(&o));
}
