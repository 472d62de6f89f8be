use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use parking_ilu::bounds::BoundReport;
use parking_ilu::config::ConfigFile;
use parking_ilu::fidelity::simulation_fidelity;
use parking_ilu::harness::{
    brute_force_threshold, domain, estimator_mse_sweep, fit_log_growth, run_experiment, waiting_time_check,
};
use parking_ilu::output::{self, float};
use parking_ilu::simulate::{sample_path, RngStream};
use parking_ilu::{Error, Oracle, Result};

#[derive(Debug, Parser)]
#[command(name = "parking-ilu", version = concat!(env!("CARGO_PKG_VERSION"), " (", env!("PARKING_ILU_BUILD"), ")"))]
#[command(about = "Optimal and learned thresholds for the continuous-time parking problem")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Override a config key, e.g. `--set experiment.T=100`. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the intensity against the environment class.
    Validate { config: PathBuf },
    /// Print the optimal threshold as one CSV row.
    Solve { config: PathBuf },
    /// Simulate paths at the `[simulate]` threshold and write paths.csv.
    Simulate { config: PathBuf },
    /// Run the `[experiment]` and write regret, diagnostics and fit CSVs.
    Run { config: PathBuf },
    /// Estimator MSE sweep over `[mse]` and write mse.csv.
    Mse { config: PathBuf },
    /// Print the theoretical constants as labeled CSV.
    Bounds { config: PathBuf },
    /// Brute-force threshold search over `[brute]`; writes brute.csv.
    Brute { config: PathBuf },
    /// Statistical checks of the simulator against the Poisson law.
    Fidelity { config: PathBuf },
}

impl Command {
    fn config(&self) -> &Path {
        match self {
            Command::Validate { config }
            | Command::Solve { config }
            | Command::Simulate { config }
            | Command::Run { config }
            | Command::Mse { config }
            | Command::Bounds { config }
            | Command::Brute { config }
            | Command::Fidelity { config } => config,
        }
    }
}

fn validate(cfg: &ConfigFile) -> Result<()> {
    let report = cfg.model()?.validate();
    if report.passed() {
        output::print(&format!("pass ({})\n", report.method))?;
        return Ok(());
    }
    for v in &report.violations {
        eprintln!("fail ({}): {v}", report.method);
    }
    report.into_result()
}

fn oracle(cfg: &ConfigFile) -> Result<Oracle> {
    Oracle::new(cfg.model()?, cfg.tolerances()?)
}

fn simulate(cfg: &ConfigFile) -> Result<()> {
    let model = cfg.model()?;
    model.validate().into_result()?;
    let sim = cfg.simulate;
    let mut paths = Vec::new();
    for r in 0..sim.replications {
        for n in 0..sim.rounds {
            let stream = RngStream::new(cfg.experiment.seed, r, n).with_domain(domain::SIMULATE);
            paths.push((r, n, sample_path(&model, sim.threshold, &stream)?));
        }
    }
    let path = cfg.output_dir().join("paths.csv");
    output::write_paths(&path, &paths)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(cfg: &ConfigFile) -> Result<()> {
    let exp = cfg.experiment()?;
    let out = run_experiment(&exp)?;
    let dir = cfg.output_dir();
    output::write_regret(&dir.join("regret.csv"), &out)?;
    output::write_diagnostics(&dir.join("diagnostics.csv"), &out)?;
    if cfg.output.rounds {
        output::write_rounds(&dir.join("rounds.csv"), &out)?;
    }
    match fit_log_growth(&out.curve) {
        Ok(fit) => output::write_fit(&dir.join("fit.csv"), &fit)?,
        Err(e) => eprintln!("fit.csv skipped: {e}"),
    }
    let t = exp.rounds as usize;
    eprintln!(
        "policy {} T {} R {}: cumulative regret {} (se {})",
        exp.policy,
        exp.rounds,
        exp.replications,
        float(out.curve.cumulative[t]),
        float(out.curve.cumulative_se[t]),
    );
    match waiting_time_check(&out.diagnostics, exp.model.env()) {
        Ok(w) => eprintln!(
            "mean wait between full-information rounds {} (bound {}): {}",
            float(w.mean),
            float(w.bound),
            if w.passed { "pass" } else { "FAIL" }
        ),
        Err(e) => eprintln!("waiting-time check skipped: {e}"),
    }
    eprintln!("wrote CSVs to {}", dir.display());
    Ok(())
}

fn mse(cfg: &ConfigFile) -> Result<()> {
    let oracle = oracle(cfg)?;
    let rows = estimator_mse_sweep(&oracle, &cfg.mse.n_values, cfg.mse.replications, cfg.experiment.seed)?;
    let path = cfg.output_dir().join("mse.csv");
    output::write_mse(&path, &rows)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn brute(cfg: &ConfigFile) -> Result<()> {
    let model = cfg.model()?;
    let oracle = Oracle::new(model.clone(), cfg.tolerances()?)?;
    let r = brute_force_threshold(&model, cfg.brute.grid_step, cfg.brute.paths, cfg.experiment.seed)?;
    let path = cfg.output_dir().join("brute.csv");
    output::write_brute(&path, &r)?;
    let csv = output::csv_string(
        &["argmin", "refined", "cost", "se", "b_star"],
        [vec![
            float(r.argmin),
            float(r.refined),
            float(r.cost),
            float(r.standard_error),
            float(oracle.b_star()),
        ]],
    )?;
    output::print(&csv)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn fidelity(cfg: &ConfigFile) -> Result<()> {
    let model = cfg.model()?;
    model.validate().into_result()?;
    let report = simulation_fidelity(&model, 100_000, &[0.5, 1.0, 2.0], cfg.experiment.seed)?;
    output::print(&output::fidelity_csv(&report)?)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Error::Numerical("simulation fidelity checks failed".into()))
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let cfg = ConfigFile::load(cli.command.config(), &cli.overrides)?;
    match &cli.command {
        Command::Validate { .. } => validate(&cfg),
        Command::Solve { .. } => {
            let r = oracle(&cfg)?.result();
            output::print(&output::csv_string(&output::ORACLE_HEADER, [output::oracle_row(&r)])?)
        }
        Command::Simulate { .. } => simulate(&cfg),
        Command::Run { .. } => run(&cfg),
        Command::Mse { .. } => mse(&cfg),
        Command::Bounds { .. } => output::print(&output::bounds_csv(&BoundReport::new(&oracle(&cfg)?)?)?),
        Command::Brute { .. } => brute(&cfg),
        Command::Fidelity { .. } => fidelity(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.unwrap_or(0)).build();
    let result = match pool {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(e) => Err(Error::Config(format!("thread pool: {e}"))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
