//! Second-order TECNO finite volume scheme for 2D scalar conservation laws
//! `u_t + f(u)_x + g(u)_y = 0`, with the diagnostics needed to check its
//! entropy stability and weak-BV estimates numerically.
//!
//! The numerical flux is `F = F~ - D <<u>>`: an entropy-conservative flux
//! for the square entropy, minus a bounded diffusion acting on the jump of
//! the ENO2 reconstruction. Time stepping is SSP-RK2.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below name the usual instantiation.
//!
//! ```
//! use tecno::{problem_by_name, run, SolverConfig};
//!
//! let problem = problem_by_name::<f64>("burgers-riemann-x(1,0)").unwrap();
//! let config = SolverConfig::for_problem(&problem, 0.5, 0.05).unwrap();
//! let result = run(&config, &problem, 32, 8).unwrap();
//! assert!(result.ledger.cumulative_dissipation() > 0.0);
//! ```

pub mod config;
pub mod diagnostics;
pub mod entropy;
pub mod error;
pub mod flux;
pub mod grid;
pub mod output;
pub mod problems;
pub mod quadrature;
pub mod reconstruct;
pub mod scalar;
pub mod solver;
pub mod study;
pub mod verify;

pub use diagnostics::{ConvergenceRow, EntropyLedger, LedgerRow, WeakBvReport};
pub use entropy::{EntropyPair, FluxComponent, FluxSpec};
pub use error::{Result, TecnoError};
pub use flux::DiffusionBounds;
pub use grid::{Axis, Boundary, Grid2D, GridFunction, InterfaceField};
pub use problems::{problem_by_name, registry, ProblemSpec};
pub use scalar::Scalar;
pub use solver::{run, RunFailure, RunResult, SolverConfig};
pub use study::{run_study, StudyConfig, StudyResult};

pub type Grid2DF64 = Grid2D<f64>;
pub type GridFunctionF64 = GridFunction<f64>;
pub type FluxSpecF64 = FluxSpec<f64>;
pub type EntropyPairF64 = EntropyPair<f64>;
pub type DiffusionBoundsF64 = DiffusionBounds<f64>;
pub type EntropyLedgerF64 = EntropyLedger<f64>;
pub type ProblemSpecF64 = ProblemSpec<f64>;
pub type SolverConfigF64 = SolverConfig<f64>;
pub type RunResultF64 = RunResult<f64>;
