use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tecno::diagnostics::{l1_error, weak_bv_report};
use tecno::grid::{project_initial_data, Grid2D, GridFunction};
use tecno::problems::{advect_smooth, burgers_riemann_x, problem_by_name};
use tecno::solver::{Stepper, SolverState};
use tecno::{registry, run, Boundary, DiffusionBounds, EntropyLedger, FluxSpec, SolverConfig};

fn config(problem: &tecno::ProblemSpec<f64>, t_end: f64) -> SolverConfig<f64> {
    SolverConfig::for_problem(problem, 0.5, t_end).unwrap()
}

#[test]
fn advection_over_one_period_converges() {
    let p = advect_smooth(1.0, 1.0);
    let exact = p.exact_at(1.0).unwrap();
    let errors: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| l1_error(&run(&config(&p, 1.0), &p, n, n).unwrap().final_state, &exact))
        .collect();
    assert!(errors.windows(2).all(|w| w[1] < 0.5 * w[0]), "{errors:?}");
}

#[test]
fn suite_stays_within_the_assumed_bound() {
    let mut problems = registry::<f64>();
    problems.push(burgers_riemann_x(-1.0, 1.0));
    for p in problems {
        let r = run(&config(&p, 0.3), &p, 32, 32).unwrap();
        assert!(r.ledger.linf_breaches.is_empty(), "{}: sup {}", p.name, r.ledger.sup_linf);
        let bv = weak_bv_report(&r.ledger);
        assert!(bv.cube_total <= 2.0 * p.linf_bound() * bv.pair_total, "{}", p.name);
        assert!(r.ledger.max_identity_defect < 1e-12, "{}", p.name);
    }
}

#[test]
fn pair_total_respects_the_initial_entropy_budget() {
    let p = burgers_riemann_x(1.0, 0.0);
    for n in [32, 64] {
        let r = run(&config(&p, 0.25), &p, n, n).unwrap();
        let grid = r.final_state.grid();
        let u0 = project_initial_data(grid, |x, y| p.initial(x, y)).unwrap();
        let budget = 0.5 * u0.values().iter().map(|v| v * v).sum::<f64>() * grid.dx() * grid.dy();
        let pair = weak_bv_report(&r.ledger).pair_total;
        assert!(pair <= budget / p.default_bounds().unwrap().d_low(), "{n}");
    }
}

#[test]
fn dissipation_is_nonnegative_for_random_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..40 {
        let boundary = if case % 2 == 0 { Boundary::Periodic } else { Boundary::Outflow };
        let grid = Grid2D::over_domain(12, 9, (0.0, 1.0), (0.0, 1.0), boundary).unwrap();
        let u = GridFunction::from_fn(grid, |_, _| rng.gen_range(-1.0..1.0)).unwrap();
        let spec = if case % 4 < 2 { FluxSpec::burgers() } else { FluxSpec::linear(0.7, -1.2) };
        let bounds = DiffusionBounds::for_flux(&spec, 1.25).unwrap();
        let mut state = SolverState::new(u, EntropyLedger::new(1.25, Vec::new()));
        let stepper = Stepper { spec: &spec, bounds: &bounds };
        for _ in 0..5 {
            let dt = tecno::solver::stable_timestep(&state.u, &spec, &bounds, 0.5).unwrap();
            let t = state.time() + dt;
            stepper.ssprk2_step(&mut state, dt, t).unwrap();
        }
        assert!(state.ledger.rows.iter().all(|r| r.dissipation_increment >= 0.0));
        assert!(state.ledger.max_entropy_production <= 0.0);
    }
}

#[test]
fn square_entropy_decays_up_to_time_integration_slack() {
    let p = problem_by_name::<f64>("burgers-smooth").unwrap();
    let r = run(&config(&p, 0.4), &p, 48, 48).unwrap();
    for w in r.ledger.rows.windows(2) {
        let slack = 10.0 * w[1].dt.powi(3);
        assert!(w[1].total_entropy <= w[0].total_entropy + slack, "step {}", w[1].step);
    }
}

#[test]
fn reruns_are_bitwise_identical() {
    let p = burgers_riemann_x(1.0, -0.5);
    let a = run(&config(&p, 0.1), &p, 24, 16).unwrap();
    let b = run(&config(&p, 0.1), &p, 24, 16).unwrap();
    assert_eq!(a.final_state.values(), b.final_state.values());
    assert_eq!(a.ledger.rows, b.ledger.rows);
}

#[test]
fn single_precision_run_tracks_double() {
    let p64 = problem_by_name::<f64>("burgers-smooth").unwrap();
    let p32 = problem_by_name::<f32>("burgers-smooth").unwrap();
    let r64 = run(&SolverConfig::for_problem(&p64, 0.5, 0.1).unwrap(), &p64, 32, 32).unwrap();
    let r32 = run(&SolverConfig::for_problem(&p32, 0.5f32, 0.1).unwrap(), &p32, 32, 32).unwrap();
    assert_eq!(r32.final_state.time(), 0.1f32);
    let diff = r64
        .final_state
        .values()
        .iter()
        .zip(r32.final_state.values())
        .map(|(&a, &b)| (a - b as f64).abs())
        .fold(0.0, f64::max);
    assert!(diff < 1e-4, "{diff}");
    assert!(r32.ledger.rows.iter().all(|r| r.dissipation_increment >= 0.0));
}

#[test]
fn kruzkov_residuals_are_tracked_on_request() {
    let p = burgers_riemann_x(1.0, 0.0);
    let mut cfg = config(&p, 0.1);
    cfg.diagnostics.kruzkov_levels = vec![0.0, 0.5];
    let r = run(&cfg, &p, 32, 8).unwrap();
    assert_eq!(r.ledger.residuals.len(), 2);
    for t in &r.ledger.residuals {
        let rep = tecno::diagnostics::entropy_residual(t, &r.ledger);
        assert!(rep.residual_measure_total > 0.0 && rep.holds());
    }
}
