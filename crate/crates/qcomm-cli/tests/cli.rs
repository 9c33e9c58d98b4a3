use std::path::Path;
use std::process::{Command, Output};

use qcomm::instances::{from_toml, InstanceKind};
use qcomm_cli::report::parse_ledger_csv;
use qcomm_cli::run::Row;

fn qcomm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcomm")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ledger(p: &Path) -> Vec<Row> {
    parse_ledger_csv(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn instance_file(dir: &Path, name: &str, kind: &str, extra: &[&str]) -> std::path::PathBuf {
    let file = dir.join(name);
    let mut args = vec!["instance", kind, "--out", path(&file)];
    args.extend_from_slice(extra);
    let out = qcomm(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    file
}

#[test]
fn same_seed_gives_identical_instance_files() {
    let first = qcomm(&["instance", "coordinator-split", "--n", "8", "--r", "2", "--seed", "7"]);
    let second = qcomm(&["instance", "coordinator-split", "--n", "8", "--r", "2", "--seed", "7"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let other = qcomm(&["instance", "coordinator-split", "--n", "8", "--r", "2", "--seed", "8"]);
    assert_ne!(first.stdout, other.stdout);

    let inst = from_toml(&stdout(&first)).unwrap();
    assert_eq!(inst.kind, InstanceKind::CoordinatorSplit);
    assert_eq!(inst.party_count(), 2);
}

#[test]
fn unknown_kind_exits_with_usage_code() {
    let out = qcomm(&["instance", "tetrahedron"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("known kinds"));
}

#[test]
fn case1_on_identity_always_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instance_file(dir.path(), "id.toml", "identity", &["--n", "4"]);
    let csv = dir.path().join("ledger.csv");
    let out = qcomm(&["run", path(&inst), "--protocol", "case1", "--out", path(&csv)]);
    assert!(out.status.success());
    let rows = ledger(&csv);
    assert_eq!(rows.len(), 1);
    assert!((rows[0].success_prob - 1.0).abs() < 1e-12);
    assert!((rows[0].fidelity - 1.0).abs() < 1e-12);
}

#[test]
fn coordinator_run_is_accurate_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instance_file(dir.path(), "split.toml", "coordinator-split", &["--n", "8", "--r", "2", "--seed", "3"]);
    let csv = dir.path().join("ledger.csv");
    for _ in 0..2 {
        let out =
            qcomm(&["run", path(&inst), "--protocol", "coord", "--eps", "1e-3", "--seed", "3", "--out", path(&csv)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let rows = ledger(&csv);
    assert_eq!(rows.len(), 2);
    assert!(rows[0].qubits_sent > 0);
    assert!(rows[0].fidelity >= 1.0 - 1e-3);
    assert_eq!(rows[0], rows[1]);
}

#[test]
fn protocol_on_wrong_topology_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let inst = instance_file(dir.path(), "id.toml", "identity", &["--n", "4"]);
    let out = qcomm(&["run", path(&inst), "--protocol", "coord"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("coord") && err.contains("two-party"), "{err}");
}

#[test]
fn kappa_sweep_writes_monotone_ledger_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let svg = dir.path().join("sweep.svg");
    let out = qcomm(&[
        "sweep",
        "coordinator-split",
        "--grid",
        "kappa-target=2,4,8",
        "--protocol",
        "coord",
        "--n",
        "8",
        "--r",
        "2",
        "--out",
        path(&csv),
        "--plot",
        path(&svg),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = ledger(&csv);
    assert_eq!(rows.len(), 3);
    assert!(rows.windows(2).all(|w| w[0].qubits_sent < w[1].qubits_sent));
    assert!(std::fs::metadata(&svg).unwrap().len() > 0);
}

#[test]
fn classical_naive_bits_grow_with_n() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("naive.csv");
    let out = qcomm(&["sweep", "regression", "--grid", "n=8,16", "--protocol", "classical-naive", "--out", path(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = ledger(&csv);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].qubits_sent, 0);
    assert!(rows[1].bits_sent >= 2 * rows[0].bits_sent);
}

#[test]
fn empty_grid_is_a_usage_error() {
    let out = qcomm(&["sweep", "regression", "--protocol", "case1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = qcomm(&["sweep", "regression", "--protocol", "case1", "--grid", "n="]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_sits_below_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("qcomm.toml");
    std::fs::write(&config, "n = 5\nseed = 11\n").unwrap();
    let from_file = from_toml(&stdout(&qcomm(&["--config", path(&config), "instance", "regression"]))).unwrap();
    assert_eq!(from_file.b().len(), 5);
    let flagged =
        from_toml(&stdout(&qcomm(&["--config", path(&config), "instance", "regression", "--n", "6"]))).unwrap();
    assert_eq!(flagged.b().len(), 6);

    std::fs::write(&config, "colour = 3\n").unwrap();
    assert_eq!(qcomm(&["--config", path(&config), "instance", "identity"]).status.code(), Some(2));
}

#[test]
fn injected_fault_fails_only_its_check() {
    let out = qcomm(&["verify", "block-encoding,polynomials", "--inject", "perturbed-dilation"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("FAIL\t1\tblock-encoding")), "{text}");
    assert!(text.lines().any(|l| l.starts_with("PASS\t6\tpolynomials")), "{text}");
    assert!(text.ends_with("summary\tpassed=1\tfailed=1\n"));

    let clean = qcomm(&["verify", "1"]);
    assert!(clean.status.success());
}

#[test]
fn empty_suite_is_a_usage_error() {
    assert_eq!(qcomm(&["verify", " "]).status.code(), Some(2));
    assert_eq!(qcomm(&["verify", "nonsense"]).status.code(), Some(2));
}
