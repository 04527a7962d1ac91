use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gsa_core::space::{SpaceConfig, StateSpace};

fn gsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsa")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn enumerate_counts() {
    let o = gsa(&["enumerate", "--qubits", "4", "--layers", "1", "--constrained"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "56");
    let o = gsa(&["enumerate", "--qubits", "4", "--layers", "2", "--unconstrained"]);
    assert_eq!(stdout(&o).trim(), "321489");
    let o = gsa(&["enumerate", "--qubits", "4", "--layers", "3"]);
    let lib = StateSpace::new(SpaceConfig::new(4, 3)).unwrap().count_paths(true).unwrap();
    assert_eq!(stdout(&o).trim(), lib.to_string());
}

#[test]
fn enumerate_list_file() {
    let dir = tempfile::tempdir().unwrap();
    let list = dir.path().join("paths.txt");
    let o = gsa(&["enumerate", "--qubits", "4", "--layers", "1", "--list", path_str(&list)]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&list).unwrap().lines().count(), 56);
}

#[test]
fn exact_values() {
    let o = gsa(&["exact", "--builtin", "tfim:2:0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-1.00000000000");
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("z.txt");
    fs::write(&h, "# single Z\n1.0 Z\n").unwrap();
    let o = gsa(&["exact", "--hamiltonian", path_str(&h)]);
    assert_eq!(stdout(&o).trim(), "-1.00000000000");
}

#[test]
fn missing_file_is_runtime_failure_naming_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = gsa(&["run", "--method", "hea", "--hamiltonian", "/no/such/ham.txt", "--out", path_str(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/no/such/ham.txt"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(gsa(&["run", "--method", "bogus", "--out", "x"]).status.code(), Some(1));
    assert_eq!(gsa(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(gsa(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "[gsa]\nunknown_key = 1\n").unwrap();
    let o = gsa(&["run", "--builtin", "tfim:2", "--config", path_str(&cfg), "--out", path_str(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

fn hea_batch(out: &Path) -> String {
    let o = gsa(&["run", "--method", "hea", "--builtin", "tfim:4", "--seeds", "0,1", "--noise", "off", "--out", path_str(out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read_to_string(out.join("summary.csv")).unwrap()
}

#[test]
fn hea_batch_writes_records_and_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = hea_batch(a.path());
    assert_eq!(first, hea_batch(b.path()));
    for seed in [0, 1] {
        assert!(a.path().join(format!("record_seed{seed}.json")).exists());
        assert!(a.path().join(format!("trace_seed{seed}.csv")).exists());
    }
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines[0], "seed,final_energy,abs_error,quantum_cost");
    assert!(lines[3].starts_with("mean,"));
    assert!(lines[4].starts_with("best,"));
    assert!(lines[5].starts_with("mse,"));

    // summary MSE equals the mean squared per-seed error
    let errs: Vec<f64> = lines[1..3].iter().map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    let reported: f64 = lines[5].split(',').nth(2).unwrap().parse().unwrap();
    let want = errs.iter().map(|e| e * e).sum::<f64>() / 2.0;
    assert!((reported - want).abs() < 1e-10);

    let o = gsa(&["plotdata", "--records", path_str(a.path())]);
    assert!(o.status.success());
    let scatter = fs::read_to_string(a.path().join("scatter.csv")).unwrap();
    assert_eq!(scatter.lines().count(), 3);
    let finals: Vec<f64> = lines[1..3].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let mean_col: f64 = scatter.lines().nth(1).unwrap().split(',').nth(5).unwrap().parse().unwrap();
    assert!((mean_col - (finals[0] + finals[1]) / 2.0).abs() < 1e-10);
}

#[test]
fn plotdata_single_record_trace_length() {
    let dir = tempfile::tempdir().unwrap();
    let o = gsa(&["run", "--method", "hea", "--builtin", "tfim:2", "--seeds", "5", "--out", path_str(dir.path())]);
    assert!(o.status.success());
    let record = fs::read_to_string(dir.path().join("record_seed5.json")).unwrap();
    let r = gsa_core::driver::RunRecord::from_json(&record).unwrap();
    let out = dir.path().join("plots");
    let o = gsa(&["plotdata", "--records", path_str(dir.path()), "--out", path_str(&out)]);
    assert!(o.status.success());
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count() - 1, r.trace.len());
    let empty = tempfile::tempdir().unwrap();
    assert_eq!(gsa(&["plotdata", "--records", path_str(empty.path())]).status.code(), Some(2));
}

#[test]
fn small_gsa_and_meta_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.toml");
    fs::write(
        &cfg,
        "[gsa]\nlayers = 2\npopulation = 4\npool_samples = 4\ngenerations = 3\n\
         [rnd]\nsamples = 20\n[meta]\ntraining = [0.5, 1.5]\ngrid = [0.5, 1.0, 1.5]\nlayers = 2\n",
    )
    .unwrap();
    for method in ["gsa", "rnd", "meta-gsa", "meta-hea"] {
        let out = dir.path().join(method);
        let o = gsa(&["run", "--method", method, "--builtin", "tfim:2", "--config", path_str(&cfg), "--out", path_str(&out)]);
        assert!(o.status.success(), "{method}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join("summary.csv").exists());
        if method.starts_with("meta") {
            let prof = fs::read_to_string(out.join("profile_seed0.csv")).unwrap();
            assert_eq!(prof.lines().count(), 4);
        }
    }
}
