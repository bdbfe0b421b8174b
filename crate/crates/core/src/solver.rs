//! Semi-discrete right-hand side, time-step control and SSP-RK2 evolution.

use std::fmt;

use crate::diagnostics::{check_dissipation, entropy_residual_rate, stage_rates, EntropyLedger, LedgerRow, ResidualTracker, StageRates};
use crate::entropy::{smoothed_kruzkov_pair, FluxSpec};
use crate::error::{Result, TecnoError};
use crate::flux::{assemble_tecno_flux, DiffusionBounds, NumericalFluxField};
use crate::grid::{interface_jump, project_initial_data, Axis, Grid2D, GridFunction, InterfaceField};
use crate::problems::ProblemSpec;
use crate::reconstruct::{eno2_recon_jump, ReconJump};
use crate::scalar::Scalar;

/// Everything computed during one right-hand-side evaluation.
#[derive(Clone, Debug)]
pub struct RhsEvaluation<T> {
    pub rate: GridFunction<T>,
    pub fluxes: NumericalFluxField<T>,
    jumps: [InterfaceField<T>; 2],
    recon: [ReconJump<T>; 2],
}

impl<T: Scalar> RhsEvaluation<T> {
    pub fn grid(&self) -> &Grid2D<T> {
        self.rate.grid()
    }

    /// `[[u]]` on the faces normal to `axis`.
    pub fn jump(&self, axis: Axis) -> &InterfaceField<T> {
        &self.jumps[axis as usize]
    }

    /// `<<u>>` on the faces normal to `axis`.
    pub fn recon_jump(&self, axis: Axis) -> &InterfaceField<T> {
        self.recon[axis as usize].field()
    }
}

/// Full right-hand-side evaluation, keeping the intermediate fields.
pub fn evaluate_rhs<T: Scalar>(u: &GridFunction<T>, spec: &FluxSpec<T>, bounds: &DiffusionBounds<T>) -> Result<RhsEvaluation<T>> {
    let rx = eno2_recon_jump(u, Axis::X)?;
    let ry = eno2_recon_jump(u, Axis::Y)?;
    let fluxes = assemble_tecno_flux(u, &rx, &ry, spec, bounds)?;
    let grid = *u.grid();
    let (dx, dy) = (grid.dx(), grid.dy());
    let (fx, fy) = (&fluxes.x.total, &fluxes.y.total);
    let mut rate = Vec::with_capacity(grid.cell_count());
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            rate.push(-(fx.get(i + 1, j) - fx.get(i, j)) / dx - (fy.get(i, j + 1) - fy.get(i, j)) / dy);
        }
    }
    if rate.iter().any(|r| !r.is_finite()) {
        return Err(TecnoError::NonFinite("rate"));
    }
    Ok(RhsEvaluation {
        rate: GridFunction::from_values(grid, rate, u.time())?,
        fluxes,
        jumps: [interface_jump(u, Axis::X)?, interface_jump(u, Axis::Y)?],
        recon: [rx, ry],
    })
}

/// `du/dt` for the TECNO scheme.
pub fn semidiscrete_rhs<T: Scalar>(u: &GridFunction<T>, spec: &FluxSpec<T>, bounds: &DiffusionBounds<T>) -> Result<GridFunction<T>> {
    Ok(evaluate_rhs(u, spec, bounds)?.rate)
}

/// `cfl / (max|f_x'|/dx + max|f_y'|/dy + 2 d_high (1/dx + 1/dy))`.
pub fn stable_timestep<T: Scalar>(u: &GridFunction<T>, spec: &FluxSpec<T>, bounds: &DiffusionBounds<T>, cfl: T) -> Result<T> {
    let grid = u.grid();
    let wave = |axis: Axis| {
        let comp = spec.component(axis);
        u.values().iter().fold(T::zero(), |m, &v| m.max(comp.df(v).abs()))
    };
    let (idx, idy) = (grid.dx().recip(), grid.dy().recip());
    let dt = cfl / (wave(Axis::X) * idx + wave(Axis::Y) * idy + T::two() * bounds.d_high() * (idx + idy));
    if !dt.is_finite() || dt <= T::zero() {
        return Err(TecnoError::InvalidParameter { name: "dt", reason: format!("time step {dt:?} is not positive and finite") });
    }
    Ok(dt)
}

/// Which extra diagnostics a run records.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsConfig<T> {
    /// Kruzkov levels `k` whose smoothed entropy residual is tracked.
    pub kruzkov_levels: Vec<T>,
    pub kruzkov_delta: T,
}

impl<T: Scalar> Default for DiagnosticsConfig<T> {
    fn default() -> Self {
        Self { kruzkov_levels: Vec::new(), kruzkov_delta: T::lit(crate::entropy::DEFAULT_KRUZKOV_DELTA) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub cfl: T,
    pub t_end: T,
    pub bounds: DiffusionBounds<T>,
    /// Assumed a-priori bound `M` on `|u|`; monitored, not enforced.
    pub linf_bound: T,
    /// Snapshot spacing in time; `None` disables snapshots.
    pub snapshot_interval: Option<T>,
    pub diagnostics: DiagnosticsConfig<T>,
}

impl<T: Scalar> SolverConfig<T> {
    /// Configuration using the problem's own `M` and diffusion bounds.
    pub fn for_problem(problem: &ProblemSpec<T>, cfl: T, t_end: T) -> Result<Self> {
        let config = Self {
            cfl,
            t_end,
            bounds: problem.default_bounds()?,
            linf_bound: problem.linf_bound(),
            snapshot_interval: None,
            diagnostics: DiagnosticsConfig::default(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: &str| Err(TecnoError::InvalidParameter { name, reason: reason.into() });
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            return bad("cfl", "must lie in (0, 1]");
        }
        if !(self.t_end >= T::zero()) || !self.t_end.is_finite() {
            return bad("t_end", "must be finite and non-negative");
        }
        if !(self.linf_bound > T::zero()) || !self.linf_bound.is_finite() {
            return bad("linf_bound", "must be positive and finite");
        }
        if let Some(s) = self.snapshot_interval {
            if !(s > T::zero()) {
                return bad("snapshot_interval", "must be positive");
            }
        }
        if !(self.diagnostics.kruzkov_delta > T::zero()) {
            return bad("kruzkov_delta", "must be positive");
        }
        Ok(())
    }
}

/// Evolving state of one run.
#[derive(Clone, Debug)]
pub struct SolverState<T> {
    pub u: GridFunction<T>,
    pub step_count: usize,
    pub ledger: EntropyLedger<T>,
}

impl<T: Scalar> SolverState<T> {
    pub fn new(u: GridFunction<T>, ledger: EntropyLedger<T>) -> Self {
        let mut state = Self { u, step_count: 0, ledger };
        state.ledger.record_initial(&state.u);
        state
    }

    pub fn time(&self) -> T {
        self.u.time()
    }
}

/// Everything needed to advance a state.
pub struct Stepper<'a, T> {
    pub spec: &'a FluxSpec<T>,
    pub bounds: &'a DiffusionBounds<T>,
}

impl<T: Scalar> Stepper<'_, T> {
    fn stage(&self, state: &mut SolverState<T>, u: &GridFunction<T>, weight: T) -> Result<(GridFunction<T>, StageRates<T>)> {
        let eval = evaluate_rhs(u, self.spec, self.bounds)?;
        let rates = stage_rates(u, &eval, self.spec);
        state.ledger.observe_stage(u, &rates, state.step_count + 1);
        for tracker in &mut state.ledger.residuals {
            let r = entropy_residual_rate(&tracker.pair, u, &eval);
            tracker.accumulate(&r, weight);
        }
        Ok((eval.rate, rates))
    }

    /// One Heun step of size `dt`, landing on `t_next` (normally `t + dt`;
    /// passed explicitly so the final step hits `t_end` exactly).
    pub fn ssprk2_step(&self, state: &mut SolverState<T>, dt: T, t_next: T) -> Result<()> {
        let half = T::half();
        let u0 = state.u.clone();
        let (k1, r1) = self.stage(state, &u0, dt * half)?;
        let stage: Vec<T> = u0.values().iter().zip(k1.values()).map(|(&u, &k)| u + dt * k).collect();
        let u1 = GridFunction::from_values(*u0.grid(), stage, u0.time() + dt)?;
        let (k2, r2) = self.stage(state, &u1, dt * half)?;
        let next: Vec<T> = u0
            .values()
            .iter()
            .zip(u1.values())
            .zip(k2.values())
            .map(|((&a, &b), &k)| half * a + half * (b + dt * k))
            .collect();
        state.u = GridFunction::from_values(*u0.grid(), next, t_next)?;
        state.step_count += 1;
        state.ledger.observe_linf(&state.u, state.step_count);

        let w = dt * half;
        state.ledger.rows.push(LedgerRow {
            step: state.step_count,
            time: t_next,
            dt,
            total_mass: state.u.total_mass(),
            total_entropy: crate::diagnostics::total_square_entropy(&state.u),
            dissipation_increment: check_dissipation(w * (r1.dissipation + r2.dissipation))?,
            cube_x: w * (r1.cube_x + r2.cube_x),
            cube_y: w * (r1.cube_y + r2.cube_y),
            pair_x: w * (r1.pair_x + r2.pair_x),
            pair_y: w * (r1.pair_y + r2.pair_y),
        });
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot<T> {
    pub step: usize,
    pub u: GridFunction<T>,
}

#[derive(Clone, Debug)]
pub struct RunResult<T> {
    pub final_state: GridFunction<T>,
    pub ledger: EntropyLedger<T>,
    pub snapshots: Vec<Snapshot<T>>,
    pub steps: usize,
}

/// A failed run, with everything computed up to the failure. `partial` is
/// absent when the run never started.
#[derive(Clone, Debug)]
pub struct RunFailure<T> {
    pub error: TecnoError,
    pub partial: Option<Box<RunResult<T>>>,
}

impl<T: fmt::Debug> fmt::Display for RunFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.partial {
            Some(p) => write!(f, "run failed after {} steps: {}", p.steps, self.error),
            None => write!(f, "run failed before the first step: {}", self.error),
        }
    }
}

impl<T: fmt::Debug> std::error::Error for RunFailure<T> {}

impl<T> From<RunFailure<T>> for TecnoError {
    fn from(f: RunFailure<T>) -> Self {
        f.error
    }
}

fn build_ledger<T: Scalar>(config: &SolverConfig<T>, spec: &FluxSpec<T>) -> Result<EntropyLedger<T>> {
    let mut trackers = Vec::new();
    for &k in &config.diagnostics.kruzkov_levels {
        let pair = smoothed_kruzkov_pair(spec, k, config.diagnostics.kruzkov_delta)?;
        trackers.push(ResidualTracker::new(pair, config.linf_bound, config.bounds.d_high())?);
    }
    Ok(EntropyLedger::new(config.linf_bound, trackers))
}

/// Evolves `problem` on an `nx` x `ny` grid from its projected initial data
/// to `config.t_end`.
pub fn run<T: Scalar>(config: &SolverConfig<T>, problem: &ProblemSpec<T>, nx: usize, ny: usize) -> Result<RunResult<T>, RunFailure<T>> {
    let setup = || -> Result<SolverState<T>> {
        config.validate()?;
        let grid = problem.grid(nx, ny)?;
        let u0 = project_initial_data(&grid, |x, y| problem.initial(x, y))?;
        Ok(SolverState::new(u0, build_ledger(config, &problem.flux)?))
    };
    let mut state = setup().map_err(|error| RunFailure { error, partial: None })?;

    let mut snapshots = Vec::new();
    let mut next_snapshot = config.snapshot_interval;
    if config.snapshot_interval.is_some() {
        snapshots.push(Snapshot { step: 0, u: state.u.clone() });
    }
    let stepper = Stepper { spec: &problem.flux, bounds: &config.bounds };

    let result = (|| -> Result<()> {
        while state.time() < config.t_end {
            let dt = stable_timestep(&state.u, &problem.flux, &config.bounds, config.cfl)?;
            let remaining = config.t_end - state.time();
            let (dt, t_next) = if dt >= remaining { (remaining, config.t_end) } else { (dt, state.time() + dt) };
            stepper.ssprk2_step(&mut state, dt, t_next)?;
            if let (Some(interval), Some(next)) = (config.snapshot_interval, next_snapshot.as_mut()) {
                if state.time() >= *next || state.time() >= config.t_end {
                    snapshots.push(Snapshot { step: state.step_count, u: state.u.clone() });
                    while *next <= state.time() {
                        *next += interval;
                    }
                }
            }
        }
        Ok(())
    })();

    let steps = state.step_count;
    let out = RunResult { final_state: state.u, ledger: state.ledger, snapshots, steps };
    match result {
        Ok(()) => Ok(out),
        Err(error) => Err(RunFailure { error, partial: Some(Box::new(out)) }),
    }
}
