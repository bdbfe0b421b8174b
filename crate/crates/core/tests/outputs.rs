use std::fs;
use std::path::Path;

use tecno::config::FileConfig;
use tecno::output::{emit_outputs, CONVERGENCE_HEADER, LEDGER_HEADER, SNAPSHOT_HEADER};
use tecno::problems::problem_by_name;
use tecno::{run, run_study, SolverConfig};

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap()
}

#[test]
fn empty_run_writes_only_the_initial_row() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem_by_name::<f64>("advect-smooth").unwrap();
    let r = run(&SolverConfig::for_problem(&p, 0.5, 0.0).unwrap(), &p, 8, 8).unwrap();
    emit_outputs(&r, dir.path()).unwrap();
    let ledger = read(&dir.path().join("ledger.csv"));
    let lines: Vec<&str> = ledger.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], LEDGER_HEADER);
    assert!(lines[1].starts_with("0,0.0000000000000000e0,0.0000000000000000e0,"));
}

#[test]
fn snapshot_mass_matches_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let p = problem_by_name::<f64>("burgers-riemann-x(1,0)").unwrap();
    let mut cfg = SolverConfig::for_problem(&p, 0.5, 0.1).unwrap();
    cfg.snapshot_interval = Some(0.05);
    let r = run(&cfg, &p, 16, 8).unwrap();
    emit_outputs(&r, dir.path()).unwrap();

    let ledger = read(&dir.path().join("ledger.csv"));
    let mass_at = |step: usize| -> f64 {
        let line = ledger.lines().skip(1).find(|l| l.split(',').next() == Some(&step.to_string())).unwrap();
        line.split(',').nth(3).unwrap().parse().unwrap()
    };
    let (dx, dy) = (1.0 / 16.0, 1.0 / 8.0);
    assert!(r.snapshots.len() >= 3);
    for snap in &r.snapshots {
        let text = read(&dir.path().join(format!("snap_{}.csv", snap.step)));
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SNAPSHOT_HEADER));
        let values: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(values.len(), 128);
        assert_eq!(values, snap.u.values());
        let mass = values.iter().sum::<f64>() * dx * dy;
        assert!((mass - mass_at(snap.step)).abs() <= 1e-15, "step {}", snap.step);
    }
}

const STUDY: &str = r#"
[problem]
name = "burgers-smooth"
[solver]
t_end = 0.05
[study]
ladder = [[8, 8], [16, 16]]
emit_snapshots = true
"#;

fn study_into(dir: &Path) {
    let mut cfg = FileConfig::parse(STUDY).unwrap().study().unwrap();
    cfg.output_dir = Some(dir.to_path_buf());
    cfg.solver.snapshot_interval = Some(0.025);
    run_study(&cfg).unwrap();
}

#[test]
fn two_rung_study_layout() {
    let dir = tempfile::tempdir().unwrap();
    study_into(dir.path());
    let conv = read(&dir.path().join("convergence.csv"));
    let lines: Vec<&str> = conv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], CONVERGENCE_HEADER);
    assert!(lines[1].starts_with("8,8,") && lines[1].ends_with(','));
    assert!(lines[2].starts_with("16,16,") && !lines[2].ends_with(','));
    for rung in ["8x8", "16x16"] {
        assert!(dir.path().join(rung).join("ledger.csv").exists());
        assert!(dir.path().join(rung).join("snap_0.csv").exists());
    }
}

#[test]
fn identical_config_gives_identical_files() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    study_into(a.path());
    study_into(b.path());
    let mut names: Vec<_> = walk(a.path());
    names.sort();
    assert!(names.len() >= 5);
    for rel in names {
        assert_eq!(fs::read(a.path().join(&rel)).unwrap(), fs::read(b.path().join(&rel)).unwrap(), "{}", rel.display());
    }
}

fn walk(root: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    out
}
