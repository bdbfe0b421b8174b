//! Refinement studies: one run per rung of a resolution ladder, each scored
//! against the problem's exact solution.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::diagnostics::{l1_error, observed_order, ConvergenceRow};
use crate::error::{Result, TecnoError};
use crate::output::{emit_outputs, emit_run_files, write_convergence};
use crate::problems::ProblemSpec;
use crate::scalar::Scalar;
use crate::solver::{run, RunResult, SolverConfig};

#[derive(Clone, Debug)]
pub struct StudyConfig<T> {
    pub problem: ProblemSpec<T>,
    pub ladder: Vec<(usize, usize)>,
    /// Shared by every rung; `snapshot_interval` is honoured only when
    /// `emit_snapshots` is set.
    pub solver: SolverConfig<T>,
    pub output_dir: Option<PathBuf>,
    pub emit_snapshots: bool,
}

impl<T: Scalar> StudyConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| Err(TecnoError::InvalidParameter { name: "ladder", reason: reason.into() });
        if self.ladder.is_empty() {
            return bad("needs at least one rung");
        }
        if self.ladder.windows(2).any(|w| w[1].0 <= w[0].0 || w[1].1 <= w[0].1) {
            return bad("resolutions must increase strictly in both nx and ny");
        }
        self.solver.validate()?;
        // fail before any run if the oracle cannot score the end time
        self.problem.exact_at(self.solver.t_end).map(drop)?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct StudyResult<T> {
    pub rows: Vec<ConvergenceRow<T>>,
    pub runs: Vec<RunResult<T>>,
}

/// A study stopped by a failing rung. `completed` holds the rungs before it
/// and `partial` whatever the failing run produced.
#[derive(Debug)]
pub struct StudyFailure<T> {
    pub error: TecnoError,
    pub rung: Option<(usize, usize)>,
    pub completed: StudyResult<T>,
    pub partial: Option<Box<RunResult<T>>>,
}

impl<T: fmt::Debug> fmt::Display for StudyFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rung {
            Some((nx, ny)) => write!(f, "study failed at {nx}x{ny}: {}", self.error),
            None => write!(f, "study not started: {}", self.error),
        }
    }
}

impl<T: fmt::Debug> std::error::Error for StudyFailure<T> {}

/// Directory of one rung's files inside a study directory.
pub fn rung_dir(dir: &Path, nx: usize, ny: usize) -> PathBuf {
    dir.join(format!("{nx}x{ny}"))
}

/// Geometric-mean refinement factor between two resolutions.
fn refinement_ratio<T: Scalar>(coarse: (usize, usize), fine: (usize, usize)) -> T {
    let cells = |r: (usize, usize)| T::from_usize_lossy(r.0) * T::from_usize_lossy(r.1);
    (cells(fine) / cells(coarse)).sqrt()
}

/// Runs every rung in order. With an output directory, each rung's ledger
/// (and snapshots, if enabled) goes to `<dir>/<nx>x<ny>/` and the table to
/// `<dir>/convergence.csv`; on failure everything finished so far is still
/// written.
pub fn run_study<T: Scalar>(cfg: &StudyConfig<T>) -> Result<StudyResult<T>, StudyFailure<T>> {
    let empty = || StudyResult { rows: Vec::new(), runs: Vec::new() };
    cfg.validate().map_err(|error| StudyFailure { error, rung: None, completed: empty(), partial: None })?;
    let mut solver = cfg.solver.clone();
    if !cfg.emit_snapshots {
        solver.snapshot_interval = None;
    }
    let exact = cfg.problem.exact_at(solver.t_end).expect("validated");

    let mut done = empty();
    for &(nx, ny) in &cfg.ladder {
        let result = match run(&solver, &cfg.problem, nx, ny) {
            Ok(r) => r,
            Err(failure) => {
                let mut error = failure.error;
                if let (Some(dir), Some(p)) = (&cfg.output_dir, &failure.partial) {
                    let _ = emit_run_files(&p.ledger, &p.snapshots, &rung_dir(dir, nx, ny));
                    if let Err(e) = write_convergence(&done.rows, dir) {
                        error = e;
                    }
                }
                return Err(StudyFailure { error, rung: Some((nx, ny)), completed: done, partial: failure.partial });
            }
        };
        let err = l1_error(&result.final_state, &exact);
        let order = done.rows.last().and_then(|prev: &ConvergenceRow<T>| {
            observed_order(prev.l1_error, err, refinement_ratio((prev.nx, prev.ny), (nx, ny)))
        });
        if let Some(dir) = &cfg.output_dir {
            if let Err(error) = emit_outputs(&result, &rung_dir(dir, nx, ny)) {
                return Err(StudyFailure { error, rung: Some((nx, ny)), completed: done, partial: Some(Box::new(result)) });
            }
        }
        done.rows.push(ConvergenceRow { nx, ny, l1_error: err, observed_order: order });
        done.runs.push(result);
    }
    if let Some(dir) = &cfg.output_dir {
        if let Err(error) = write_convergence(&done.rows, dir) {
            return Err(StudyFailure { error, rung: None, completed: done, partial: None });
        }
    }
    Ok(done)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::problem_by_name;

    fn config(name: &str, ladder: Vec<(usize, usize)>, t_end: f64) -> StudyConfig<f64> {
        let problem = problem_by_name(name).unwrap();
        let solver = SolverConfig::for_problem(&problem, 0.5, t_end).unwrap();
        StudyConfig { problem, ladder, solver, output_dir: None, emit_snapshots: false }
    }

    #[test]
    fn single_rung_has_no_order() {
        let r = run_study(&config("advect-smooth", vec![(8, 8)], 0.05)).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].observed_order, None);
        assert!(r.rows[0].l1_error > 0.0);
    }

    #[test]
    fn two_rungs_report_an_order() {
        let r = run_study(&config("burgers-smooth", vec![(16, 16), (32, 32)], 0.05)).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows[1].observed_order.unwrap() > 1.0);
    }

    #[test]
    fn ladder_must_increase() {
        for ladder in [vec![], vec![(16, 16), (16, 32)], vec![(32, 32), (16, 16)]] {
            let e = run_study(&config("advect-smooth", ladder, 0.05)).unwrap_err();
            assert!(e.rung.is_none());
            assert!(matches!(e.error, TecnoError::InvalidParameter { name: "ladder", .. }));
        }
    }

    #[test]
    fn oracle_horizon_is_checked_up_front() {
        let e = run_study(&config("burgers-smooth", vec![(8, 8)], 0.5)).unwrap_err();
        assert!(matches!(e.error, TecnoError::NoOracle(_)));
    }

    #[test]
    fn ratio_is_geometric_mean() {
        assert_eq!(refinement_ratio::<f64>((16, 16), (32, 32)), 2.0);
        assert_eq!(refinement_ratio::<f64>((16, 8), (64, 32)), 4.0);
    }
}
