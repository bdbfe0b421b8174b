//! Randomized property suites behind `tecno verify`. All sampling is driven
//! by a seeded ChaCha generator, so a seed reproduces a report exactly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::stage_rates;
use crate::entropy::{square_entropy_pair, FluxSpec};
use crate::flux::{ec_flux, DiffusionBounds};
use crate::grid::{Axis, Boundary, Grid2D, GridFunction};
use crate::reconstruct::{check_cube_inequality, check_sign_property};
use crate::solver::evaluate_rhs;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Every row of length `len` with entries in `values`.
pub fn exhaustive_rows(values: &[f64], len: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![Vec::new()];
    for _ in 0..len {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                values.iter().map(move |&v| {
                    let mut next = r.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    rows
}

fn uniform_row(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..=1.0)).collect()
}

/// ENO2 sign property and the bound `<<w>> / [[w]] <= 2` over all rows of
/// length 6 in `{-1, 0, 1}` plus `samples` uniform random rows.
pub fn sign_property_suite(rng: &mut ChaCha8Rng, samples: usize) -> CheckOutcome {
    let mut rows = exhaustive_rows(&[-1.0, 0.0, 1.0], 6);
    rows.extend((0..samples).map(|_| uniform_row(rng, 6)));
    let (mut violations, mut max_ratio) = (0, f64::NEG_INFINITY);
    for row in &rows {
        let r = check_sign_property(row);
        violations += r.violations;
        if let Some(m) = r.max_ratio {
            max_ratio = max_ratio.max(m);
        }
    }
    CheckOutcome {
        name: "sign property",
        passed: violations == 0 && max_ratio <= 2.0,
        cases: rows.len(),
        detail: format!("{violations} violations, max <<w>>/[[w]] = {max_ratio:.6}"),
    }
}

/// `sum |[[w]]|^3 <= 2 |w|_inf sum <<w>> [[w]]` on random compactly
/// supported rows of length 1 to 16.
pub fn cube_inequality_suite(rng: &mut ChaCha8Rng, samples: usize) -> CheckOutcome {
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let len = rng.gen_range(1..=16);
        let r = check_cube_inequality(&uniform_row(rng, len));
        if !r.holds() {
            violations += 1;
        }
        if r.rhs > 0.0 {
            worst = worst.max(r.lhs / r.rhs);
        }
    }
    CheckOutcome {
        name: "cube inequality",
        passed: violations == 0,
        cases: samples,
        detail: format!("{violations} violations, max lhs/rhs = {worst:.6}"),
    }
}

/// Tadmor's condition `[[u]] F~ = [[psi]]` for the square entropy on random
/// pairs in `[-2, 2]`, for Burgers and two linear fluxes.
pub fn tadmor_suite(rng: &mut ChaCha8Rng, samples: usize) -> CheckOutcome {
    let fluxes = [FluxSpec::burgers(), FluxSpec::linear(1.0, -0.5), FluxSpec::linear(-2.0, 3.0)];
    let (mut failures, mut worst) = (0, 0.0f64);
    for _ in 0..samples {
        let (ul, ur): (f64, f64) = (rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0));
        for spec in &fluxes {
            let pair = square_entropy_pair(spec);
            for axis in Axis::BOTH {
                let jump = ur - ul;
                let defect = (jump * ec_flux(ul, ur, spec.component(axis)) - (pair.psi(axis, ur) - pair.psi(axis, ul))).abs();
                let scaled = defect / (1.0 + jump.abs());
                worst = worst.max(scaled);
                if scaled > 1e-10 {
                    failures += 1;
                }
            }
        }
    }
    CheckOutcome {
        name: "Tadmor condition",
        passed: failures == 0,
        cases: samples * fluxes.len() * 2,
        detail: format!("{failures} failures, max defect/(1+|[[u]]|) = {worst:.3e}"),
    }
}

/// The semi-discrete square-entropy identity and the sign of the dissipation
/// on random fields, periodic and outflow, Burgers and linear fluxes.
pub fn entropy_rate_suite(rng: &mut ChaCha8Rng, samples: usize) -> CheckOutcome {
    let (mut failures, mut worst) = (0, 0.0f64);
    let fluxes = [FluxSpec::burgers(), FluxSpec::linear(1.0, -0.5)];
    for n in 0..samples {
        let boundary = if n % 2 == 0 { Boundary::Periodic } else { Boundary::Outflow };
        let (nx, ny) = (rng.gen_range(3..=16), rng.gen_range(3..=16));
        let grid = Grid2D::over_domain(nx, ny, (0.0, 1.0), (0.0, 1.0), boundary).expect("valid grid");
        let u = GridFunction::from_fn(grid, |_, _| rng.gen_range(-1.0..=1.0)).expect("finite");
        let spec = &fluxes[n % fluxes.len()];
        let bounds = DiffusionBounds::for_flux(spec, 1.25).expect("valid bounds");
        let ok = match evaluate_rhs(&u, spec, &bounds) {
            Ok(eval) => {
                let rates = stage_rates(&u, &eval, spec);
                worst = worst.max(rates.identity_defect());
                rates.identity_defect() <= 1e-10 && rates.dissipation >= 0.0
            }
            Err(_) => false,
        };
        if !ok {
            failures += 1;
        }
    }
    CheckOutcome {
        name: "entropy-rate identity",
        passed: failures == 0,
        cases: samples,
        detail: format!("{failures} failures, max |rate + dissipation| = {worst:.3e}"),
    }
}

/// Runs all four suites. `samples` sets the random row count; the Tadmor and
/// entropy-rate suites use a tenth and a hundredth of it.
pub fn run_property_suites(seed: u64, samples: usize) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    VerifyReport {
        checks: vec![
            sign_property_suite(&mut rng, samples),
            cube_inequality_suite(&mut rng, samples),
            tadmor_suite(&mut rng, (samples / 10).max(1)),
            entropy_rate_suite(&mut rng, (samples / 100).max(1)),
        ],
    }
}
