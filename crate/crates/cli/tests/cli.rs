use std::fs;
use std::process::{Command, Output};

fn tecno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tecno")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_problems_names_the_registry() {
    let o = tecno(&["list-problems"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["advect-smooth", "burgers-smooth", "burgers-riemann-x"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn run_writes_ledger_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[problem]\nname = \"burgers-riemann-x(-1,1)\"\n[grid]\nnx = 16\nny = 4\n[solver]\nt_end = 0.1\nsnapshot_interval = 0.05\n[diagnostics]\nkruzkov_levels = [0.0]\n").unwrap();
    let out = dir.path().join("out");
    let o = tecno(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ledger = fs::read_to_string(out.join("ledger.csv")).unwrap();
    assert!(ledger.starts_with("step,time,dt,total_mass,total_entropy,dissipation_increment,cube_x,cube_y,pair_x,pair_y\n"));
    assert!(out.join("snap_0.csv").exists());
    let text = stdout(&o);
    assert!(text.contains("l1 error") && text.contains("[ok]"), "{text}");
}

#[test]
fn flags_override_the_file() {
    let o = tecno(&["run", "--problem", "advect-smooth", "--nx", "8", "--ny", "8", "--tend", "0.05", "--cfl", "0.3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("grid               8x8"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[solver]\nt_end = 0.1\nbogus = 3\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["run", "--config", bad.to_str().unwrap()],
        vec!["run", "--problem", "nope", "--nx", "8", "--ny", "8", "--tend", "0.1"],
        vec!["run", "--problem", "advect-smooth", "--nx", "8", "--ny", "8"],
        vec!["run", "--problem", "advect-smooth", "--nx", "8", "--ny", "8", "--tend", "0.1", "--cfl", "1.5"],
        vec!["study", "--problem", "advect-smooth", "--tend", "0.1"],
        vec!["run", "--config", "/nonexistent/file.toml"],
    ];
    for args in cases {
        assert_eq!(tecno(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn study_writes_convergence_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.toml");
    fs::write(&cfg, "[problem]\nname = \"advect-smooth\"\n[solver]\nt_end = 0.1\n[study]\nladder = [[8, 8], [16, 16]]\n").unwrap();
    let out = dir.path().join("out");
    let o = tecno(&["study", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let conv = fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert_eq!(conv.lines().count(), 3);
    assert!(out.join("16x16").join("ledger.csv").exists());
}

#[test]
fn verify_passes_and_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("v.toml");
    fs::write(&cfg, "[verify]\nsamples = 3000\n").unwrap();
    let a = tecno(&["verify", "--config", cfg.to_str().unwrap(), "--seed", "5"]);
    let b = tecno(&["verify", "--config", cfg.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.matches("[PASS]").count(), 4, "{text}");
}
