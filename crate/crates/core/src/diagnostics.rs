//! Entropy bookkeeping for TECNO runs.
//!
//! Everything here is evaluated at the semi-discrete level, once per
//! right-hand-side evaluation, and integrated in time with the weights of the
//! time integrator (`dt / 2` per stage for SSP-RK2):
//!
//! * the square-entropy rate identity
//!   `sum u * rate * dx dy + boundary flux = -sum D <<u>> [[u]] |face|`,
//! * the dissipation `E = int sum D [[u]] <<u>> |face| dt`,
//! * the weak-BV sums `int sum |[[u]]|^3 |face| dt` and
//!   `int sum [[u]] <<u>> |face| dt`,
//! * entropy residual measures for arbitrary C^2 entropies, together with a
//!   computable upper bound in terms of the two weak-BV sums.

use crate::entropy::{square_entropy_pair, EntropyPair, FluxSpec};
use crate::error::{Result, TecnoError};
use crate::flux::ec_flux;
use crate::grid::{Axis, Boundary, Grid2D, GridFunction, InterfaceField};
use crate::scalar::{pairwise_sum, Scalar};
use crate::solver::RhsEvaluation;

/// Dissipation increments below this are treated as a sign-property breach.
pub const DISSIPATION_FLOOR: f64 = -1e-14;

/// Numerical entropy flux `Q = {v} F - {psi}` on one face.
pub fn discrete_entropy_flux<T: Scalar>(pair: &EntropyPair<T>, ul: T, ur: T, flux: T, axis: Axis) -> T {
    let v_avg = (pair.deta(ul) + pair.deta(ur)) * T::half();
    let psi_avg = (pair.psi(axis, ul) + pair.psi(axis, ur)) * T::half();
    v_avg * flux - psi_avg
}

fn face_values<T: Scalar>(u: &GridFunction<T>, axis: Axis, i: usize, j: usize) -> (T, T) {
    let (ii, jj) = (i as isize, j as isize);
    match axis {
        Axis::X => (u.get_ghosted(ii - 1, jj), u.get_ghosted(ii, jj)),
        Axis::Y => (u.get_ghosted(ii, jj - 1), u.get_ghosted(ii, jj)),
    }
}

/// `sum over counted faces of term(i, j) * |face|`.
fn face_sum<T: Scalar>(grid: &Grid2D<T>, field: &InterfaceField<T>, mut term: impl FnMut(usize, usize) -> T) -> T {
    let terms: Vec<T> = field.counted(grid).map(|(i, j, _)| term(i, j)).collect();
    pairwise_sum(&terms) * grid.face_length(field.axis())
}

/// Instantaneous rates from one right-hand-side evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageRates<T> {
    /// `sum u * rate * dx dy` plus the net square-entropy flux through
    /// outflow boundaries.
    pub entropy_rate: T,
    /// `sum D <<u>> [[u]] |face|`, both axes.
    pub dissipation: T,
    pub cube_x: T,
    pub cube_y: T,
    pub pair_x: T,
    pub pair_y: T,
}

impl<T: Scalar> StageRates<T> {
    /// `|entropy_rate + dissipation|`: the defect of the semi-discrete
    /// entropy identity.
    pub fn identity_defect(&self) -> T {
        (self.entropy_rate + self.dissipation).abs()
    }
}

/// `sum D <<u>> [[u]] |face|` over both axes.
pub fn dissipation_rate<T: Scalar>(eval: &RhsEvaluation<T>) -> T {
    let grid = eval.grid();
    Axis::BOTH
        .iter()
        .map(|&axis| {
            let (jump, recon, d) = (eval.jump(axis), eval.recon_jump(axis), &eval.fluxes.axis(axis).diffusion);
            face_sum(grid, jump, |i, j| d.get(i, j) * recon.get(i, j) * jump.get(i, j))
        })
        .fold(T::zero(), |a, b| a + b)
}

/// Dissipation added over `dt` when `eval` is held fixed. Negative values
/// beyond [`DISSIPATION_FLOOR`] mean the sign property has been violated.
pub fn dissipation_increment<T: Scalar>(eval: &RhsEvaluation<T>, dt: T) -> Result<T> {
    check_dissipation(dissipation_rate(eval) * dt)
}

pub(crate) fn check_dissipation<T: Scalar>(increment: T) -> Result<T> {
    if increment < T::lit(DISSIPATION_FLOOR) {
        return Err(TecnoError::SignPropertyBreach(increment.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(increment)
}

/// Net square-entropy flux leaving through outflow boundaries; zero on
/// periodic grids.
fn boundary_entropy_flux<T: Scalar>(u: &GridFunction<T>, eval: &RhsEvaluation<T>, spec: &FluxSpec<T>) -> T {
    let grid = u.grid();
    if grid.boundary() == Boundary::Periodic {
        return T::zero();
    }
    let pair = square_entropy_pair(spec);
    let mut terms = Vec::new();
    for axis in Axis::BOTH {
        let total = &eval.fluxes.axis(axis).total;
        let (cols, rows) = total.shape();
        let len = grid.face_length(axis);
        let faces: Vec<((usize, usize), (usize, usize))> = match axis {
            Axis::X => (0..rows).map(|j| ((0, j), (cols - 1, j))).collect(),
            Axis::Y => (0..cols).map(|i| ((i, 0), (i, rows - 1))).collect(),
        };
        for ((il, jl), (ir, jr)) in faces {
            let q = |i: usize, j: usize| {
                let (ul, ur) = face_values(u, axis, i, j);
                discrete_entropy_flux(&pair, ul, ur, total.get(i, j), axis)
            };
            terms.push((q(ir, jr) - q(il, jl)) * len);
        }
    }
    pairwise_sum(&terms)
}

/// Rates of every ledger quantity for one right-hand-side evaluation of `u`.
pub fn stage_rates<T: Scalar>(u: &GridFunction<T>, eval: &RhsEvaluation<T>, spec: &FluxSpec<T>) -> StageRates<T> {
    let grid = u.grid();
    let products: Vec<T> = u.values().iter().zip(eval.rate.values()).map(|(&a, &b)| a * b).collect();
    let entropy_rate = pairwise_sum(&products) * grid.cell_area() + boundary_entropy_flux(u, eval, spec);
    let cube = |axis| {
        let jump = eval.jump(axis);
        face_sum(grid, jump, |i, j| jump.get(i, j).abs().powi(3))
    };
    let pair = |axis| {
        let (jump, recon) = (eval.jump(axis), eval.recon_jump(axis));
        face_sum(grid, jump, |i, j| jump.get(i, j) * recon.get(i, j))
    };
    StageRates {
        entropy_rate,
        dissipation: dissipation_rate(eval),
        cube_x: cube(Axis::X),
        cube_y: cube(Axis::Y),
        pair_x: pair(Axis::X),
        pair_y: pair(Axis::Y),
    }
}

/// Entropy residual for a general pair, split as `r = r1 + r2` with
/// `r1 = [[v]] F~ - [[psi]]` and `r2 = -[[v]] D <<u>>`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ResidualRate<T> {
    /// `sum_cells |(r^x_{i+1/2} + r^x_{i-1/2}) dy / 2 + (r^y_{j+1/2} + r^y_{j-1/2}) dx / 2|`,
    /// the total variation of `d/dt eta(u) + div Q` at this instant.
    pub measure: T,
    /// `sum_faces |r1| |face|`.
    pub r1_abs: T,
    /// `sum_faces |r2| |face|`.
    pub r2_abs: T,
    /// `max_faces r2`; non-positive for the square entropy.
    pub r2_max: T,
}

/// Per-face residual pieces along one axis.
struct AxisResidual<T> {
    r1: InterfaceField<T>,
    r2: InterfaceField<T>,
}

fn axis_residual<T: Scalar>(
    pair: &EntropyPair<T>,
    u: &GridFunction<T>,
    eval: &RhsEvaluation<T>,
    v: &[T],
    psi: &[T],
    axis: Axis,
) -> AxisResidual<T> {
    let grid = u.grid();
    let comp = pair.flux().component(axis);
    let af = eval.fluxes.axis(axis);
    let recon = eval.recon_jump(axis);
    let mut r1 = InterfaceField::zeros(grid, axis);
    let mut r2 = InterfaceField::zeros(grid, axis);
    let (cols, rows) = r1.shape();
    let at = |i: isize, j: isize| {
        let gi = grid.resolve(i, grid.nx());
        let gj = grid.resolve(j, grid.ny());
        grid.index(gi, gj)
    };
    for j in 0..rows {
        for i in 0..cols {
            let (ii, jj) = (i as isize, j as isize);
            let (l, r) = match axis {
                Axis::X => (at(ii - 1, jj), at(ii, jj)),
                Axis::Y => (at(ii, jj - 1), at(ii, jj)),
            };
            let dv = v[r] - v[l];
            // F~ is recomputed rather than read from `af` so the split does
            // not depend on how the solver stored it
            let ft = ec_flux(u.values()[l], u.values()[r], comp);
            debug_assert!((ft - af.conservative.get(i, j)).abs() <= T::lit(1e-12) * (T::one() + ft.abs()));
            r1.set(i, j, dv * ft - (psi[r] - psi[l]));
            r2.set(i, j, -dv * af.diffusion.get(i, j) * recon.get(i, j));
        }
    }
    AxisResidual { r1, r2 }
}

/// Instantaneous entropy residual of `pair` for the evaluation `eval` of `u`.
pub fn entropy_residual_rate<T: Scalar>(pair: &EntropyPair<T>, u: &GridFunction<T>, eval: &RhsEvaluation<T>) -> ResidualRate<T> {
    let grid = u.grid();
    let v: Vec<T> = u.values().iter().map(|&w| pair.deta(w)).collect();
    let psi_x: Vec<T> = u.values().iter().map(|&w| pair.psi(Axis::X, w)).collect();
    let psi_y: Vec<T> = u.values().iter().map(|&w| pair.psi(Axis::Y, w)).collect();
    let rx = axis_residual(pair, u, eval, &v, &psi_x, Axis::X);
    let ry = axis_residual(pair, u, eval, &v, &psi_y, Axis::Y);

    let (dx, dy) = (grid.dx(), grid.dy());
    let mut cell_terms = Vec::with_capacity(grid.cell_count());
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let x = rx.r1.get(i, j) + rx.r2.get(i, j) + rx.r1.get(i + 1, j) + rx.r2.get(i + 1, j);
            let y = ry.r1.get(i, j) + ry.r2.get(i, j) + ry.r1.get(i, j + 1) + ry.r2.get(i, j + 1);
            cell_terms.push(((x * dy + y * dx) * T::half()).abs());
        }
    }
    let abs_sum = |f: &InterfaceField<T>| face_sum(grid, f, |i, j| f.get(i, j).abs());
    let r2_max = [&rx.r2, &ry.r2]
        .iter()
        .flat_map(|f| f.counted(grid).map(|(_, _, v)| v))
        .fold(T::neg_infinity(), T::max);
    ResidualRate {
        measure: pairwise_sum(&cell_terms),
        r1_abs: abs_sum(&rx.r1) + abs_sum(&ry.r1),
        r2_abs: abs_sum(&rx.r2) + abs_sum(&ry.r2),
        r2_max,
    }
}

/// Sampled bound `C1 >= |r1(a, b)| / |b - a|^3` over `a, b` in `[lo, hi]`,
/// with a 10% margin. Sample points are uniform on the range plus a cluster
/// resolving the curvature peak of smoothed Kruzkov entropies.
pub fn residual_cube_constant<T: Scalar>(pair: &EntropyPair<T>, lo: T, hi: T) -> T {
    let n = 256;
    let mut points: Vec<T> = (0..=n).map(|k| lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(n)).collect();
    if let crate::entropy::EntropyKind::SmoothedKruzkov { k, delta } = pair.kind() {
        let m = 160;
        for s in 0..=m {
            let p = k + delta * T::lit(16.0 * s as f64 / m as f64 - 8.0);
            if p >= lo && p <= hi {
                points.push(p);
            }
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite sample points"));
    points.dedup();
    let mut worst = T::zero();
    for axis in Axis::BOTH {
        let comp = pair.flux().component(axis);
        let v: Vec<T> = points.iter().map(|&p| pair.deta(p)).collect();
        let psi: Vec<T> = points.iter().map(|&p| pair.psi(axis, p)).collect();
        for a in 0..points.len() {
            for b in a + 1..points.len() {
                let jump = points[b] - points[a];
                let r1 = (v[b] - v[a]) * ec_flux(points[a], points[b], comp) - (psi[b] - psi[a]);
                worst = worst.max(r1.abs() / (jump * jump * jump));
            }
        }
    }
    worst * T::lit(1.1)
}

/// Running totals of an entropy residual measurement for one pair.
#[derive(Clone, Debug)]
pub struct ResidualTracker<T> {
    pub pair: EntropyPair<T>,
    /// Constant multiplying the cube sums in the bound.
    pub c1: T,
    /// `sup |eta''| * d_high`, multiplying the pair sums.
    pub c2: T,
    pub measure_total: T,
    pub r1_total: T,
    pub r2_total: T,
    /// Largest `r2` seen on any face at any stage.
    pub r2_max: T,
}

impl<T: Scalar> ResidualTracker<T> {
    /// Tracker for `pair` on data bounded by `linf_bound`, with diffusion
    /// coefficients at most `d_high`.
    pub fn new(pair: EntropyPair<T>, linf_bound: T, d_high: T) -> Result<Self> {
        let (lo, hi) = (-linf_bound, linf_bound);
        let curvature = pair.ddeta_sup(lo, hi);
        if !curvature.is_finite() {
            return Err(TecnoError::UnboundedEntropyCurvature {
                lo: lo.to_f64().unwrap_or(f64::NAN),
                hi: hi.to_f64().unwrap_or(f64::NAN),
            });
        }
        let c1 = residual_cube_constant(&pair, lo, hi);
        Ok(Self {
            pair,
            c1,
            c2: curvature * d_high,
            measure_total: T::zero(),
            r1_total: T::zero(),
            r2_total: T::zero(),
            r2_max: T::neg_infinity(),
        })
    }

    pub(crate) fn accumulate(&mut self, rate: &ResidualRate<T>, weight: T) {
        self.measure_total += rate.measure * weight;
        self.r1_total += rate.r1_abs * weight;
        self.r2_total += rate.r2_abs * weight;
        self.r2_max = self.r2_max.max(rate.r2_max);
    }
}

/// Accumulated residual measure against its bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualReport<T> {
    pub residual_measure_total: T,
    pub bound_rhs: T,
}

impl<T: Scalar> ResidualReport<T> {
    pub fn holds(&self) -> bool {
        self.residual_measure_total <= self.bound_rhs
    }
}

/// `C1 * cube_total + C2 * pair_total` against the accumulated measure.
pub fn entropy_residual<T: Scalar>(tracker: &ResidualTracker<T>, ledger: &EntropyLedger<T>) -> ResidualReport<T> {
    let bv = weak_bv_report(ledger);
    ResidualReport {
        residual_measure_total: tracker.measure_total,
        bound_rhs: tracker.c1 * bv.cube_total + tracker.c2 * bv.pair_total,
    }
}

/// One row of the ledger: the state after an accepted step, with the
/// increments accumulated over that step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LedgerRow<T> {
    pub step: usize,
    pub time: T,
    pub dt: T,
    pub total_mass: T,
    pub total_entropy: T,
    pub dissipation_increment: T,
    pub cube_x: T,
    pub cube_y: T,
    pub pair_x: T,
    pub pair_y: T,
}

/// A state whose sup norm exceeded the assumed bound `M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinfBreach<T> {
    pub step: usize,
    pub value: T,
}

/// Time series of entropy and weak-BV quantities for one run.
#[derive(Clone, Debug)]
pub struct EntropyLedger<T> {
    pub rows: Vec<LedgerRow<T>>,
    /// Largest `|sum u rate dxdy + boundary flux + dissipation|` over all
    /// right-hand-side evaluations.
    pub max_identity_defect: T,
    /// Largest value of `-dissipation` seen (must stay `<= 0`).
    pub max_entropy_production: T,
    pub rhs_evaluations: usize,
    /// `sup ||u||_inf` over every state the right-hand side was evaluated on.
    pub sup_linf: T,
    pub linf_bound: T,
    pub linf_breaches: Vec<LinfBreach<T>>,
    pub residuals: Vec<ResidualTracker<T>>,
}

impl<T: Scalar> EntropyLedger<T> {
    pub fn new(linf_bound: T, residuals: Vec<ResidualTracker<T>>) -> Self {
        Self {
            rows: Vec::new(),
            max_identity_defect: T::zero(),
            max_entropy_production: T::neg_infinity(),
            rhs_evaluations: 0,
            sup_linf: T::zero(),
            linf_bound,
            linf_breaches: Vec::new(),
            residuals,
        }
    }

    /// Appends the zero-increment row describing the initial state.
    pub fn record_initial(&mut self, u: &GridFunction<T>) {
        self.sup_linf = self.sup_linf.max(u.max_abs());
        self.rows.push(LedgerRow {
            step: 0,
            time: u.time(),
            dt: T::zero(),
            total_mass: u.total_mass(),
            total_entropy: total_square_entropy(u),
            dissipation_increment: T::zero(),
            cube_x: T::zero(),
            cube_y: T::zero(),
            pair_x: T::zero(),
            pair_y: T::zero(),
        });
    }

    pub(crate) fn observe_stage(&mut self, u: &GridFunction<T>, rates: &StageRates<T>, step: usize) {
        self.rhs_evaluations += 1;
        self.max_identity_defect = self.max_identity_defect.max(rates.identity_defect());
        self.max_entropy_production = self.max_entropy_production.max(-rates.dissipation);
        self.observe_linf(u, step);
    }

    pub(crate) fn observe_linf(&mut self, u: &GridFunction<T>, step: usize) {
        let sup = u.max_abs();
        self.sup_linf = self.sup_linf.max(sup);
        let tol = T::lit(1e-12) * self.linf_bound.max(T::one());
        if sup > self.linf_bound + tol && self.linf_breaches.last().is_none_or(|b| b.step != step) {
            self.linf_breaches.push(LinfBreach { step, value: sup });
        }
    }

    pub fn cumulative_dissipation(&self) -> T {
        self.rows.iter().map(|r| r.dissipation_increment).fold(T::zero(), |a, b| a + b)
    }

    pub fn initial(&self) -> Option<&LedgerRow<T>> {
        self.rows.first()
    }

    pub fn last(&self) -> Option<&LedgerRow<T>> {
        self.rows.last()
    }
}

/// `sum u^2 / 2 dx dy`.
pub fn total_square_entropy<T: Scalar>(u: &GridFunction<T>) -> T {
    let sq: Vec<T> = u.values().iter().map(|&v| v * v * T::half()).collect();
    pairwise_sum(&sq) * u.grid().cell_area()
}

/// Accumulated weak-BV sums of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakBvReport<T> {
    /// `int sum (|[[u]]|^3 dy + |[[u]]|^3 dx) dt`
    pub cube_total: T,
    /// `int sum ([[u]] <<u>> dy + [[u]] <<u>> dx) dt`
    pub pair_total: T,
    /// `sup ||u||_inf` over the run.
    pub sup_linf: T,
}

impl<T: Scalar> WeakBvReport<T> {
    /// `cube_total <= 2 sup|u| pair_total`.
    pub fn cube_bound_holds(&self) -> bool {
        self.cube_total <= T::two() * self.sup_linf * self.pair_total
    }
}

pub fn weak_bv_report<T: Scalar>(ledger: &EntropyLedger<T>) -> WeakBvReport<T> {
    let (mut cube, mut pair) = (T::zero(), T::zero());
    for r in &ledger.rows {
        cube += r.cube_x + r.cube_y;
        pair += r.pair_x + r.pair_y;
    }
    WeakBvReport { cube_total: cube, pair_total: pair, sup_linf: ledger.sup_linf }
}

/// One rung of a refinement study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow<T> {
    pub nx: usize,
    pub ny: usize,
    pub l1_error: T,
    /// Order relative to the previous (coarser) row.
    pub observed_order: Option<T>,
}

/// `sum |u_ij - avg_ij(exact)| dx dy`, with cell averages of `exact` taken by
/// the same 2x2 Gauss rule as the initial projection.
pub fn l1_error<T: Scalar>(u: &GridFunction<T>, exact: impl Fn(T, T) -> T) -> T {
    let grid = u.grid();
    let mut terms = Vec::with_capacity(grid.cell_count());
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            terms.push((u.get(i, j) - crate::grid::cell_average(grid, i, j, &exact)).abs());
        }
    }
    pairwise_sum(&terms) * grid.cell_area()
}

/// `log(coarse / fine) / log(ratio)`, or `None` when either error is not
/// positive or the ratio is not a refinement.
pub fn observed_order<T: Scalar>(coarse_err: T, fine_err: T, ratio: T) -> Option<T> {
    if !(coarse_err > T::zero()) || !(fine_err > T::zero()) || !(ratio > T::one()) {
        return None;
    }
    Some((coarse_err / fine_err).ln() / ratio.ln())
}
