use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tecno::config::{FileConfig, Overrides};
use tecno::diagnostics::{entropy_residual, l1_error, weak_bv_report};
use tecno::output::{emit_outputs, real};
use tecno::problems::PROBLEM_NAMES;
use tecno::{registry, run, run_study, TecnoError};

const EXIT_VERIFY: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "tecno", version, about = "Second-order TECNO solver for 2D scalar conservation laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one problem and write ledger.csv (and snapshots).
    Run(Common),
    /// Refinement study over the configured ladder; writes convergence.csv.
    Study(Common),
    /// Randomized property suites: sign property, Tadmor condition, cube
    /// inequality, entropy-rate identity.
    Verify(Common),
    /// Print the registered problems.
    ListProblems,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    /// End time.
    #[arg(long)]
    tend: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomized property suites.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<FileConfig, TecnoError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Ok(file.apply(&Overrides {
            problem: self.problem.clone(),
            nx: self.nx,
            ny: self.ny,
            cfl: self.cfl,
            t_end: self.tend,
            out: self.out.clone(),
            seed: self.seed,
        }))
    }
}

enum Failure {
    Config(TecnoError),
    Verify(String),
}

impl From<TecnoError> for Failure {
    fn from(e: TecnoError) -> Self {
        Failure::Verify(e.to_string())
    }
}

fn config_failure(e: TecnoError) -> Failure {
    Failure::Config(e)
}

fn cmd_run(args: &Common) -> Result<(), Failure> {
    let plan = args.load().and_then(|c| c.run_plan()).map_err(config_failure)?;
    let outcome = run(&plan.solver, &plan.problem, plan.nx, plan.ny);
    let (result, error) = match outcome {
        Ok(r) => (r, None),
        Err(f) => match f.partial {
            Some(p) => (*p, Some(f.error)),
            None => return Err(Failure::Verify(f.error.to_string())),
        },
    };
    if let Some(dir) = &plan.out {
        emit_outputs(&result, dir)?;
        println!("wrote {}", dir.display());
    }
    let ledger = &result.ledger;
    let first = ledger.initial().expect("initial row");
    let last = ledger.last().expect("initial row");
    let bv = weak_bv_report(ledger);
    println!("problem            {} ({})", plan.problem.name, plan.problem.description);
    println!("grid               {}x{}", plan.nx, plan.ny);
    println!("steps              {}", result.steps);
    println!("time               {}", real(last.time));
    println!("mass drift         {}", real(last.total_mass - first.total_mass));
    println!("square entropy     {} -> {}", real(first.total_entropy), real(last.total_entropy));
    println!("dissipation E      {}", real(ledger.cumulative_dissipation()));
    println!("identity defect    {}", real(ledger.max_identity_defect));
    println!("cube_total         {}", real(bv.cube_total));
    println!("pair_total         {}", real(bv.pair_total));
    println!("sup |u|            {} (M = {})", real(ledger.sup_linf), real(ledger.linf_bound));
    if !ledger.linf_breaches.is_empty() {
        println!("L-inf breaches     {} (first at step {})", ledger.linf_breaches.len(), ledger.linf_breaches[0].step);
    }
    for tracker in &ledger.residuals {
        let r = entropy_residual(tracker, ledger);
        println!(
            "residual {:?}: measure {} bound {} [{}]",
            tracker.pair.kind(),
            real(r.residual_measure_total),
            real(r.bound_rhs),
            if r.holds() { "ok" } else { "EXCEEDED" }
        );
    }
    if let Ok(exact) = plan.problem.exact_at(last.time) {
        println!("l1 error           {}", real(l1_error(&result.final_state, exact)));
    }
    match error {
        Some(e) => Err(Failure::Verify(e.to_string())),
        None => Ok(()),
    }
}

fn cmd_study(args: &Common) -> Result<(), Failure> {
    let cfg = args.load().and_then(|c| c.study()).map_err(config_failure)?;
    let table = |rows: &[tecno::ConvergenceRow<f64>]| {
        println!("{:>6} {:>6} {:>24} {:>10}", "nx", "ny", "l1_error", "order");
        for r in rows {
            let order = r.observed_order.map(|o| format!("{o:.4}")).unwrap_or_default();
            println!("{:>6} {:>6} {:>24} {:>10}", r.nx, r.ny, real(r.l1_error), order);
        }
    };
    println!("study of {} to t = {}", cfg.problem.name, cfg.solver.t_end);
    match run_study(&cfg) {
        Ok(result) => {
            table(&result.rows);
            if let Some(dir) = &cfg.output_dir {
                println!("wrote {}", dir.display());
            }
            Ok(())
        }
        Err(f) => {
            table(&f.completed.rows);
            Err(Failure::Verify(f.to_string()))
        }
    }
}

fn cmd_verify(args: &Common) -> Result<(), Failure> {
    let settings = args.load().map_err(config_failure)?.verify_settings();
    println!("seed {} samples {}", settings.seed, settings.samples);
    let report = tecno::verify::run_property_suites(settings.seed, settings.samples);
    for c in &report.checks {
        println!("[{}] {} ({} cases): {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.cases, c.detail);
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verify("property check failed".into()))
    }
}

fn cmd_list() {
    for p in registry::<f64>() {
        println!("{:<20} {}", p.name, p.description);
    }
    println!();
    println!("accepted names: {}", PROBLEM_NAMES.join(", "));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Study(a) => cmd_study(a),
        Command::Verify(a) => cmd_verify(a),
        Command::ListProblems => {
            cmd_list();
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
