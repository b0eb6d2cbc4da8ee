use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kicked_rotor::runner::{read_csv, KappaRow, ResonanceRow, RunManifest, SeriesRow};

fn qkr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkr")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SIMULATE: &str = r#"
experiment = "simulate"

[[cases]]
name = "fib"
p = 1
q = 3
kappa1 = 5.0
kappa2 = 10.0
steps = 300

[[cases]]
name = "rand"
p = 1
q = 1
kappa1 = 5.0
kappa2 = 10.0
steps = 200
sequence = { kind = "random", alpha = 0.5 }
"#;

#[test]
fn simulate_writes_series_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.toml", SIMULATE);
    let out = dir.path().join("out");
    let res = qkr(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let text = fs::read_to_string(out.join("fib/series.csv")).unwrap();
    assert!(text.starts_with("step,sigma,energy,m4,m6,norm_error\n"));
    let rows: Vec<SeriesRow> = read_csv(&out.join("rand/series.csv")).unwrap();
    assert_eq!(rows.last().unwrap().step, 200);

    let manifest: RunManifest = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.command, "simulate");
    assert_eq!(manifest.runs.len(), 2);
    assert!(manifest.runs.iter().all(|r| r.final_norm_drift.unwrap() < 1e-10));
    assert_eq!(manifest.runs[1].fits[0].observable, "sigma");
    // q = 1 is ballistic
    assert!((manifest.runs[1].fits[0].c - 1.0).abs() < 0.01);
}

#[test]
fn rerun_from_manifest_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sim.toml", SIMULATE);
    let first = dir.path().join("a");
    assert!(qkr(&["simulate", "--config", &cfg, "--out", first.to_str().unwrap(), "--seed", "5"]).status.success());
    let manifest = first.join("manifest.json");
    let second = dir.path().join("b");
    let res = qkr(&["simulate", "--config", manifest.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for case in ["fib", "rand"] {
        let a = fs::read(first.join(case).join("series.csv")).unwrap();
        let b = fs::read(second.join(case).join("series.csv")).unwrap();
        assert_eq!(a, b, "{case}");
    }
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad_pair = write_config(dir.path(), "a.toml", "[[cases]]\np = 2\nq = 4\nkappa1 = 1.0\nkappa2 = 2.0\n");
    let res = qkr(&["simulate", "--config", &bad_pair]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("cases[0]"));

    let unknown = write_config(dir.path(), "b.toml", "seeed = 3\n");
    assert_eq!(qkr(&["simulate", "--config", &unknown]).status.code(), Some(1));

    let anti = write_config(dir.path(), "c.toml", "[sweep_resonance]\nresonances = [[1, 3], [1, 2]]\n");
    let res = qkr(&["sweep-resonance", "--config", &anti]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("antiresonance"));

    let zero = write_config(dir.path(), "d.toml", "[sweep_kappa]\nkappas = [0.0]\n");
    assert_eq!(qkr(&["sweep-kappa", "--config", &zero]).status.code(), Some(1));

    assert_eq!(qkr(&["simulate"]).status.code(), Some(1));
    let missing = dir.path().join("nope.toml");
    assert_eq!(qkr(&["simulate", "--config", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{SIMULATE}\n[grid]\nmax_sites = 256\n");
    let cfg = write_config(dir.path(), "cap.toml", &text);
    let out = dir.path().join("out");
    let res = qkr(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2), "{}", String::from_utf8_lossy(&res.stderr));
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn sweeps_sort_rows_and_share_symmetric_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.toml",
        "[sweep_resonance]\nsteps = 400\nresonances = [[4, 5], [1, 1], [1, 5], [2, 3]]\n\
         [sweep_kappa]\nsteps = 300\nkappas = [2.0, -3.0]\n",
    );
    let out = dir.path().join("out");
    let o = out.to_str().unwrap();
    assert!(qkr(&["sweep-resonance", "--config", &cfg, "--out", o]).status.success());
    let rows: Vec<ResonanceRow> = read_csv(&out.join("c_vs_pq.csv")).unwrap();
    let keys: Vec<(i64, i64)> = rows.iter().map(|r| (r.p, r.q)).collect();
    assert_eq!(keys, vec![(1, 5), (2, 3), (4, 5), (1, 1)]);
    assert!((rows[0].c - rows[2].c).abs() < 1e-9);
    assert!((rows[3].c - 1.0).abs() < 0.01);
    assert_eq!((rows[0].n_lo, rows[0].n_hi), (40, 400));

    assert!(qkr(&["sweep-kappa", "--config", &cfg, "--out", o]).status.success());
    let rows: Vec<KappaRow> = read_csv(&out.join("c_vs_kappa.csv")).unwrap();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let mirror = rows
            .iter()
            .find(|m| m.kappa1 == -r.kappa1 && m.kappa2 == -r.kappa2)
            .unwrap();
        assert_eq!(r.c.to_bits(), mirror.c.to_bits());
        if r.kappa1 == r.kappa2 {
            assert!((r.c - 1.0).abs() < 0.01);
        }
    }
    assert!(rows.windows(2).all(|w| w[0].kappa1 <= w[1].kappa1));
}

#[test]
fn classical_command_writes_mean_p2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "[classical]\nk1 = 0.5\nk2 = 0.8\nparticles = 500\nsteps = 2000\n");
    let out = dir.path().join("out");
    let res = qkr(&["classical", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(out.join("classical.csv")).unwrap();
    assert!(text.starts_with("step,mean_p2\n"));
    assert!(text.trim_end().ends_with(|c: char| c.is_ascii_digit()));
}

#[test]
fn verify_fails_under_the_literal_phase() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let res = qkr(&["verify", "--out", out.to_str().unwrap(), "--convention", "literal-eq3"]);
    assert_eq!(res.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("verify.json")).unwrap()).unwrap();
    let failed: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| !c["passed"].as_bool().unwrap())
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["antiresonance_revival"]);
}

#[test]
fn bundled_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let config = kicked_rotor::runner::RunConfig::load(&path).unwrap();
        let kind = config.experiment.expect("bundled configs declare their experiment");
        config.validate(kind).unwrap();
    }
}
