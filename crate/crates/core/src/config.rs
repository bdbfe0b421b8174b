//! TOML run configuration. Unknown sections and keys are rejected.
//!
//! ```toml
//! [problem]
//! name = "burgers-riemann-x(1,0)"   # see `problems::problem_by_name`
//!
//! [flux]                            # optional; replaces the problem's flux
//! name = "burgers"                  # "burgers" or "linear(a,b)"
//!
//! [grid]
//! nx = 128
//! ny = 128
//!
//! [solver]
//! cfl = 0.5                         # default 0.5
//! t_end = 0.25                      # required
//! d_low = 1e-3                      # optional, give both or neither;
//! d_high = 0.625                    #   default [1e-3, max|f'|/2]
//! linf_bound = 1.25                 # optional, default 1.25 max|u0|
//! snapshot_interval = 0.05          # optional
//!
//! [study]
//! ladder = [[32, 32], [64, 64], [128, 128]]
//! emit_snapshots = false
//!
//! [diagnostics]
//! kruzkov_levels = [-0.5, 0.0, 0.5] # smoothed Kruzkov residuals to track
//! kruzkov_delta = 1e-2
//!
//! [output]
//! dir = "out"
//!
//! [verify]
//! seed = 7
//! samples = 100000
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::entropy::{FluxSpec, DEFAULT_KRUZKOV_DELTA};
use crate::error::{Result, TecnoError};
use crate::flux::DiffusionBounds;
use crate::problems::{problem_by_name, ProblemSpec};
use crate::solver::{DiagnosticsConfig, SolverConfig};
use crate::study::StudyConfig;

pub const DEFAULT_CFL: f64 = 0.5;
pub const DEFAULT_SEED: u64 = 20240607;
pub const DEFAULT_SAMPLES: usize = 100_000;

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub name: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FluxSection {
    pub name: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub nx: Option<usize>,
    pub ny: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
    pub d_low: Option<f64>,
    pub d_high: Option<f64>,
    pub linf_bound: Option<f64>,
    pub snapshot_interval: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StudySection {
    pub ladder: Option<Vec<(usize, usize)>>,
    pub emit_snapshots: Option<bool>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSection {
    pub kruzkov_levels: Option<Vec<f64>>,
    pub kruzkov_delta: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
}

/// Parsed configuration file; every key is optional at this stage.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub problem: ProblemSection,
    #[serde(default)]
    pub flux: FluxSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub study: StudySection,
    #[serde(default)]
    pub diagnostics: DiagnosticsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub verify: VerifySection,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub problem: Option<String>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// A single run, fully resolved.
#[derive(Clone, Debug)]
pub struct RunPlan {
    pub problem: ProblemSpec<f64>,
    pub solver: SolverConfig<f64>,
    pub nx: usize,
    pub ny: usize,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifySettings {
    pub seed: u64,
    pub samples: usize,
}

fn config_err(msg: impl Into<String>) -> TecnoError {
    TecnoError::Config(msg.into())
}

fn require<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| config_err(format!("missing required key `{key}`")))
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn apply(mut self, o: &Overrides) -> Self {
        fn set<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                slot.clone_from(v);
            }
        }
        set(&mut self.problem.name, &o.problem);
        set(&mut self.grid.nx, &o.nx);
        set(&mut self.grid.ny, &o.ny);
        set(&mut self.solver.cfl, &o.cfl);
        set(&mut self.solver.t_end, &o.t_end);
        set(&mut self.output.dir, &o.out);
        set(&mut self.verify.seed, &o.seed);
        self
    }

    pub fn problem(&self) -> Result<ProblemSpec<f64>> {
        let problem = problem_by_name(&require(self.problem.name.clone(), "problem.name")?)?;
        Ok(match &self.flux.name {
            Some(name) => problem.with_flux(FluxSpec::from_name(name)?),
            None => problem,
        })
    }

    pub fn solver(&self, problem: &ProblemSpec<f64>) -> Result<SolverConfig<f64>> {
        let s = &self.solver;
        let bounds = match (s.d_low, s.d_high) {
            (None, None) => problem.default_bounds()?,
            (Some(lo), Some(hi)) => DiffusionBounds::new(lo, hi)?,
            _ => return Err(config_err("solver.d_low and solver.d_high must be given together")),
        };
        let d = &self.diagnostics;
        let config = SolverConfig {
            cfl: s.cfl.unwrap_or(DEFAULT_CFL),
            t_end: require(s.t_end, "solver.t_end")?,
            bounds,
            linf_bound: s.linf_bound.unwrap_or_else(|| problem.linf_bound()),
            snapshot_interval: s.snapshot_interval,
            diagnostics: DiagnosticsConfig {
                kruzkov_levels: d.kruzkov_levels.clone().unwrap_or_default(),
                kruzkov_delta: d.kruzkov_delta.unwrap_or(DEFAULT_KRUZKOV_DELTA),
            },
        };
        config.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(config)
    }

    pub fn run_plan(&self) -> Result<RunPlan> {
        let problem = self.problem()?;
        let solver = self.solver(&problem)?;
        let nx = require(self.grid.nx, "grid.nx")?;
        let ny = require(self.grid.ny, "grid.ny")?;
        problem.grid(nx, ny).map_err(|e| config_err(e.to_string()))?;
        Ok(RunPlan { problem, solver, nx, ny, out: self.output.dir.clone() })
    }

    pub fn study(&self) -> Result<StudyConfig<f64>> {
        let problem = self.problem()?;
        let solver = self.solver(&problem)?;
        let ladder = require(self.study.ladder.clone(), "study.ladder")?;
        let cfg = StudyConfig {
            problem,
            ladder,
            solver,
            output_dir: self.output.dir.clone(),
            emit_snapshots: self.study.emit_snapshots.unwrap_or(false),
        };
        cfg.validate().map_err(|e| match e {
            TecnoError::NoOracle(_) => e,
            other => config_err(other.to_string()),
        })?;
        Ok(cfg)
    }

    pub fn verify_settings(&self) -> VerifySettings {
        VerifySettings {
            seed: self.verify.seed.unwrap_or(DEFAULT_SEED),
            samples: self.verify.samples.unwrap_or(DEFAULT_SAMPLES),
        }
    }
}
