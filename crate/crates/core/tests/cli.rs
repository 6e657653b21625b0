use std::path::Path;
use std::process::{Command, Output};

use gauss_festoon::cli::{ReportBundle, RunConfig};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gauss-festoon")).args(args).output().expect("binary runs")
}

fn run_out(args: &[&str], out: &Path) -> Output {
    let mut a: Vec<&str> = args.to_vec();
    a.extend(["--out", out.to_str().unwrap()]);
    run(&a)
}

#[test]
fn simulate_minimal_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let args = ["simulate", "--dim", "2", "--n", "1000", "--reps", "10", "--seed", "7", "--workers", "1"];
    assert_eq!(run_out(&args, &a).status.code(), Some(0));
    let mut args2 = args;
    args2[10] = "3";
    assert_eq!(run_out(&args2, &b).status.code(), Some(0));
    let bundle = ReportBundle::read(&a).unwrap();
    let t = bundle.table("replicates").unwrap();
    assert_eq!(t.rows.len(), 10);
    // every row carries its grid coordinates
    for c in ["grid_index", "size", "replicate"] {
        assert!(t.column(c).is_some());
    }
    let csv_a = std::fs::read(a.join("replicates.csv")).unwrap();
    let csv_b = std::fs::read(b.join("replicates.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "worker count must not change the tables");
}

#[test]
fn invalid_configs_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_dim = run_out(&["simulate", "--dim", "1", "--n", "100", "--seed", "1"], dir.path());
    assert_eq!(bad_dim.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_dim.stderr).contains("--dim"));
    let no_seed = run_out(&["simulate", "--dim", "2", "--n", "100"], dir.path());
    assert_eq!(no_seed.status.code(), Some(2));
    let missing_beta = run_out(&["estimate", "--dim", "7", "--seed", "1", "--route", "direct"], dir.path());
    assert_eq!(missing_beta.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing_beta.stderr).contains("beta"));
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "dim = 2\nreps = \"ten\"\n").unwrap();
    let bad_file = run_out(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "1"], dir.path());
    assert_eq!(bad_file.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_file.stderr).contains("line 2"));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "dim = 3\nn = 500\nreps = 4\nseed = 11\n").unwrap();
    let out = dir.path().join("o");
    let r = run_out(&["simulate", "--config", cfg.to_str().unwrap(), "--reps", "6"], &out);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let b = ReportBundle::read(&out).unwrap();
    assert_eq!(b.table("replicates").unwrap().rows.len(), 6);
    assert_eq!(b.config.dim, Some(3));
    // The persisted config alone reproduces the run.
    let stored = dir.path().join("stored.toml");
    std::fs::write(&stored, RunConfig { out: None, ..b.config.clone() }.to_toml()).unwrap();
    let again = dir.path().join("again");
    assert_eq!(run_out(&["simulate", "--config", stored.to_str().unwrap()], &again).status.code(), Some(0));
    assert_eq!(std::fs::read(out.join("replicates.csv")).unwrap(), std::fs::read(again.join("replicates.csv")).unwrap());
}

#[test]
fn limit_model_faces_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lm");
    let r = run_out(
        &["limit-model", "--dim", "2", "--window-l", "10", "--hmax", "6", "--reps", "100", "--seed", "5", "--sensitivity"],
        &out,
    );
    assert!(matches!(r.status.code(), Some(0) | Some(4)));
    let b = ReportBundle::read(&out).unwrap();
    assert_eq!(b.table("ext_counts").unwrap().rows.len(), 100);
    assert_eq!(b.table("truncation_audit").unwrap().rows.len(), 100);
    let faces = b.table("festoon_faces").unwrap();
    let (g, c, v, h) = (
        faces.column("gradient_0").unwrap(),
        faces.column("intercept").unwrap(),
        faces.column("probe_v0").unwrap(),
        faces.column("probe_height").unwrap(),
    );
    assert!(!faces.rows.is_empty());
    for row in &faces.rows {
        let f = |i: usize| row[i].as_f64().unwrap();
        let height = f(g) * f(v) + f(c) - f(v) * f(v) / 2.0;
        assert_eq!(height, f(h), "face height must re-evaluate exactly");
    }
    assert!(b.table("shocks").is_some());
}

#[test]
fn estimate_routes() {
    let dir = tempfile::tempdir().unwrap();
    let direct = dir.path().join("direct");
    let r = run_out(&["estimate", "--dim", "2", "--route", "direct", "--grid", "1000,10000", "--reps", "40", "--seed", "2"], &direct);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let b = ReportBundle::read(&direct).unwrap();
    let report = b.constants.unwrap();
    assert!(report.entries.iter().all(|e| e.route == gauss_festoon::estimators::Route::Direct));
    assert!(b.tables.iter().any(|t| t.name == "expectation_gp"));

    let all = dir.path().join("all");
    let r = run_out(
        &["estimate", "--dim", "2", "--route", "all", "--grid", "1000,10000", "--reps", "30", "--window-l", "200", "--seed", "2"],
        &all,
    );
    assert!(matches!(r.status.code(), Some(0) | Some(4)), "{}", String::from_utf8_lossy(&r.stderr));
    let b = ReportBundle::read(&all).unwrap();
    let f0: Vec<_> = b
        .constants
        .as_ref()
        .unwrap()
        .entries
        .iter()
        .filter(|e| e.constant == gauss_festoon::estimators::Constant::FaceVariance(0))
        .collect();
    assert_eq!(f0.len(), 3);
    assert_eq!(b.table("overlaps").unwrap().rows.len(), 3);
}

#[test]
fn diagnostics_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    assert_eq!(run_out(&["diagnostics"], &empty).status.code(), Some(0));
    assert!(ReportBundle::read(&empty).unwrap().tables.is_empty());

    let diag = dir.path().join("diag");
    let r = run_out(&["diagnostics", "--diagnostics", "paralem,h-tail", "--reps", "20", "--seed", "9"], &diag);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let b = ReportBundle::read(&diag).unwrap();
    assert_eq!(b.table("paralem").unwrap().rows.len(), 5 * 3 * 2);
    assert!(b.table("h_tail").is_some());

    let rerendered = dir.path().join("re");
    let r = run(&["report", "--input", diag.to_str().unwrap(), "--out", rerendered.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&r.stdout).contains("table paralem"));
    for name in ["paralem.csv", "h_tail.csv", "paralem.schema.json"] {
        assert_eq!(std::fs::read(diag.join(name)).unwrap(), std::fs::read(rerendered.join(name)).unwrap());
    }
    let bad = run(&["diagnostics", "--diagnostics", "nope", "--seed", "1"]);
    assert_eq!(bad.status.code(), Some(2));
}
