//! CSV emission. Every real is written with 17 significant digits so files
//! round-trip to the bit and reruns are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::diagnostics::{ConvergenceRow, EntropyLedger};
use crate::error::Result;
use crate::grid::GridFunction;
use crate::scalar::Scalar;
use crate::solver::{RunResult, Snapshot};

pub const LEDGER_HEADER: &str = "step,time,dt,total_mass,total_entropy,dissipation_increment,cube_x,cube_y,pair_x,pair_y";
pub const CONVERGENCE_HEADER: &str = "nx,ny,l1_error,observed_order";
pub const SNAPSHOT_HEADER: &str = "i,j,x,y,u";

/// `{:.16e}`: one leading digit plus 16 decimals.
pub fn real<T: Scalar>(v: T) -> String {
    format!("{v:.16e}")
}

pub fn ledger_csv<T: Scalar>(ledger: &EntropyLedger<T>) -> String {
    let mut s = String::from(LEDGER_HEADER);
    s.push('\n');
    for r in &ledger.rows {
        let reals = [r.time, r.dt, r.total_mass, r.total_entropy, r.dissipation_increment, r.cube_x, r.cube_y, r.pair_x, r.pair_y];
        let _ = write!(s, "{}", r.step);
        for v in reals {
            let _ = write!(s, ",{}", real(v));
        }
        s.push('\n');
    }
    s
}

pub fn convergence_csv<T: Scalar>(rows: &[ConvergenceRow<T>]) -> String {
    let mut s = String::from(CONVERGENCE_HEADER);
    s.push('\n');
    for r in rows {
        let order = r.observed_order.map(real).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{}", r.nx, r.ny, real(r.l1_error), order);
    }
    s
}

pub fn snapshot_csv<T: Scalar>(u: &GridFunction<T>) -> String {
    let grid = u.grid();
    let mut s = String::with_capacity(96 * grid.cell_count());
    s.push_str(SNAPSHOT_HEADER);
    s.push('\n');
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let _ = writeln!(s, "{i},{j},{},{},{}", real(grid.x_center(i)), real(grid.y_center(j)), real(u.get(i, j)));
        }
    }
    s
}

pub fn snapshot_file_name(step: usize) -> String {
    format!("snap_{step}.csv")
}

/// Writes `ledger.csv` and one `snap_<step>.csv` per snapshot into `dir`,
/// creating it if needed. Returns the paths written.
pub fn emit_outputs<T: Scalar>(result: &RunResult<T>, dir: &Path) -> Result<Vec<PathBuf>> {
    emit_run_files(&result.ledger, &result.snapshots, dir)
}

pub(crate) fn emit_run_files<T: Scalar>(ledger: &EntropyLedger<T>, snapshots: &[Snapshot<T>], dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = vec![write_file(dir.join("ledger.csv"), &ledger_csv(ledger))?];
    for snap in snapshots {
        written.push(write_file(dir.join(snapshot_file_name(snap.step)), &snapshot_csv(&snap.u))?);
    }
    Ok(written)
}

pub fn write_convergence<T: Scalar>(rows: &[ConvergenceRow<T>], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    write_file(dir.join("convergence.csv"), &convergence_csv(rows))
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::ConvergenceRow;

    #[test]
    fn reals_have_seventeen_significant_digits() {
        assert_eq!(real(0.1f64), "1.0000000000000001e-1");
        assert_eq!(real(-2.5f64), "-2.5000000000000000e0");
        for v in [0.1f64, 1.0 / 3.0, -7.123456789e-300, 6.02e23] {
            assert_eq!(real(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn convergence_order_blank_on_first_row() {
        let rows = [
            ConvergenceRow { nx: 8, ny: 8, l1_error: 0.1f64, observed_order: None },
            ConvergenceRow { nx: 16, ny: 16, l1_error: 0.025, observed_order: Some(2.0) },
        ];
        let csv = convergence_csv(&rows);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines, [CONVERGENCE_HEADER, "8,8,1.0000000000000001e-1,", "16,16,2.5000000000000001e-2,2.0000000000000000e0"]);
    }
}
