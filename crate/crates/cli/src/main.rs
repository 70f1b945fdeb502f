//! `gravitation` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or validation error,
//! 3 numerical failure (non-convergence, singular solve, undefined Gini).

mod config;

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gravitation::dynamics::{
    describe_tv, empirical_distribution, run_with, RunConfig, StepMode, DEFAULT_BURN_IN,
};
use gravitation::experiments::{reproduce_figures, sweep, OutputKind, SweepSpec, MANIFEST_FILE};
use gravitation::exec::configure_threads;
use gravitation::inequality::{income_distribution, lorenz_gini};
use gravitation::kernel::{
    build_kernel_with, fixed_point_residual, solve_stationary, stationary_analytic_with,
    stationary_mean, Method, DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
use gravitation::{Execution, HalfRule, ModelParams};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

const DEFAULT_PERIODS: usize = 100_000;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn io(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn internal(e: impl Display) -> Self {
        CliError { code: 2, message: e.to_string() }
    }
}

impl From<gravitation::Error> for CliError {
    fn from(e: gravitation::Error) -> Self {
        let code = if e.is_io() {
            1
        } else if e.is_numerical() {
            3
        } else {
            2
        };
        CliError { code, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "gravitation",
    version,
    about = "Statistical-equilibrium division of labor: kernels, ergodic laws, simulation and inequality"
)]
struct Cli {
    /// Worker threads for sweeps, figures and other parallel work
    /// [default: number of logical cores]
    #[arg(long, global = true, env = "GRAVITATION_THREADS")]
    threads: Option<usize>,

    /// JSON object supplying any flag of the subcommand (key = flag name
    /// with `_` for `-`); flags on the command line take precedence
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the (N+1)×(N+1) transition matrix as CSV
    Kernel(KernelArgs),
    /// Solve for the ergodic distribution; writes CSV plus a JSON summary
    Stationary(StationaryArgs),
    /// Simulate a seeded trajectory and report its distance to the exact law
    Simulate(SimulateArgs),
    /// Sweep temperatures and write the requested outputs with a manifest
    Sweep(SweepArgs),
    /// Lorenz curve and Gini coefficient of ergodic income
    Inequality(InequalityArgs),
    /// Regenerate every figure with its CSVs and manifest
    Figures(FiguresArgs),
}

#[derive(Args, Serialize, Deserialize)]
struct ModelArgs {
    /// Number of producers N (at least 2)
    #[arg(long)]
    n: Option<u32>,
    /// Behavior scale T (> 0)
    #[arg(long)]
    temperature: Option<f64>,
    /// Payoff to the short side [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    payoff_short: Option<f64>,
    /// Payoff to the long side [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    payoff_long: Option<f64>,
    /// Corn-choice probability in the balanced state: half, low or high
    /// [default: half]
    #[arg(long)]
    half_rule: Option<HalfRule>,
}

impl ModelArgs {
    fn params(&self) -> CliResult<ModelParams> {
        let n = required(self.n, "n")?;
        let t = required(self.temperature, "temperature")?;
        Ok(ModelParams::new(n, t)?
            .with_payoffs(self.payoff_short.unwrap_or(1.0), self.payoff_long.unwrap_or(0.0))?)
    }

    fn half_rule(&self) -> HalfRule {
        self.half_rule.unwrap_or_default()
    }
}

#[derive(Args, Serialize, Deserialize)]
struct SolverArgs {
    /// Solver: power, eigen or analytic [default: analytic]
    #[arg(long)]
    method: Option<Method>,
    /// Power-iteration stopping tolerance on ‖πP − π‖₁ [default: 1e-12]
    #[arg(long)]
    tol: Option<f64>,
    /// Power-iteration cap [default: 100000]
    #[arg(long)]
    max_iters: Option<usize>,
}

impl SolverArgs {
    fn method(&self) -> Method {
        self.method.unwrap_or_default()
    }

    fn tol(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    fn max_iters(&self) -> usize {
        self.max_iters.unwrap_or(DEFAULT_MAX_ITERS)
    }
}

#[derive(Args, Serialize, Deserialize)]
struct KernelArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    /// Output CSV [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct StationaryArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    solver: SolverArgs,
    /// Output CSV; the summary goes next to it with a `.json` extension
    /// [default: CSV to standard output, summary to standard error]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    /// Periods to record, including the initial state [default: 100000]
    #[arg(long)]
    periods: Option<usize>,
    /// Leading periods excluded from the empirical distribution
    /// [default: 1000]
    #[arg(long)]
    burn_in: Option<usize>,
    /// Seed of the ChaCha20 generator [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Initial number of corn producers [default: N/2]
    #[arg(long)]
    initial: Option<u32>,
    /// Step sampler: binomial (one draw per period) or producers (one coin
    /// per producer) [default: binomial]
    #[arg(long)]
    mode: Option<StepMode>,
    /// Trajectory CSV; metadata goes next to it with a `.json` extension
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct SweepArgs {
    /// Number of producers N (at least 2)
    #[arg(long)]
    n: Option<u32>,
    /// Strictly increasing, comma-separated temperatures
    #[arg(long, value_delimiter = ',')]
    temperatures: Option<Vec<f64>>,
    /// Comma-separated subset of stationary, mean, choice_frequencies, gini
    #[arg(long, value_delimiter = ',')]
    outputs: Option<Vec<OutputKind>>,
    #[command(flatten)]
    #[serde(flatten)]
    solver: SolverArgs,
    /// Payoff to the short side [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    payoff_short: Option<f64>,
    /// Payoff to the long side [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    payoff_long: Option<f64>,
    /// Corn-choice probability in the balanced state [default: half]
    #[arg(long)]
    half_rule: Option<HalfRule>,
    /// Directory for the outputs and manifest.json
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct InequalityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    solver: SolverArgs,
    /// Lorenz-curve CSV; the summary goes next to it with a `.json`
    /// extension [default: summary to standard output only]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize, Deserialize)]
struct FiguresArgs {
    /// Directory for the figures, their CSVs and manifest.json
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn required<T>(value: Option<T>, key: &str) -> CliResult<T> {
    value.ok_or_else(|| {
        CliError::usage(format!(
            "missing --{} (flag or config key `{key}`)",
            key.replace('_', "-")
        ))
    })
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
}

/// Writes to `out`, or to standard output when no path is given.
fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn pretty(value: &Value) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(CliError::internal)?;
    text.push('\n');
    Ok(text)
}

fn cmd_kernel(args: KernelArgs) -> CliResult<()> {
    let params = args.model.params()?;
    let kernel = build_kernel_with(&params, args.model.half_rule())?;
    emit(args.out.as_deref(), &kernel.to_csv())
}

fn cmd_stationary(args: StationaryArgs) -> CliResult<()> {
    let params = args.model.params()?;
    let rule = args.model.half_rule();
    let method = args.solver.method();
    let pi = solve_stationary(&params, rule, method, args.solver.tol(), args.solver.max_iters())?;
    let summary = json!({
        "n_producers": params.n_producers,
        "temperature": params.temperature,
        "half_rule": rule,
        "method": method,
        "mean": stationary_mean(&pi),
        "residual": fixed_point_residual(&params, rule, &pi)?,
        "modes": pi.modes(),
    });
    let summary = pretty(&summary)?;
    match &args.out {
        Some(path) => {
            write_file(path, &pi.to_csv())?;
            write_file(&path.with_extension("json"), &summary)
        }
        None => {
            print!("{}", pi.to_csv());
            eprint!("{summary}");
            Ok(())
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    let params = args.model.params()?;
    let mut config = RunConfig::new(
        params,
        args.initial.unwrap_or(params.n_producers / 2),
        args.periods.unwrap_or(DEFAULT_PERIODS),
        args.burn_in.unwrap_or(DEFAULT_BURN_IN),
        args.seed.unwrap_or(0),
    );
    config.half_rule = args.model.half_rule();
    config.step_mode = args.mode.unwrap_or_default();
    config.validate()?;
    let traj = run_with(&config)?;
    if let Some(path) = &args.out {
        write_file(path, &traj.to_csv())?;
        write_file(&path.with_extension("json"), &(traj.metadata_json()? + "\n"))?;
    }
    let empirical = empirical_distribution(&traj)?;
    let exact = stationary_analytic_with(&params, config.half_rule)?;
    println!("{}", describe_tv(empirical.tv_distance(&exact)));
    Ok(())
}

fn cmd_sweep(args: SweepArgs, exec: Execution) -> CliResult<()> {
    let n = required(args.n, "n")?;
    let temperatures = required(args.temperatures, "temperatures")?;
    let outputs = required(args.outputs, "outputs")?;
    let out_dir = required(args.out_dir, "out_dir")?;
    let mut spec = SweepSpec::new(n, temperatures, outputs, args.solver.method(), out_dir);
    spec.payoff_short = args.payoff_short.unwrap_or(1.0);
    spec.payoff_long = args.payoff_long.unwrap_or(0.0);
    spec.half_rule = args.half_rule.unwrap_or_default();
    spec.tol = args.solver.tol();
    spec.max_iters = args.solver.max_iters();
    let manifest = sweep(&spec, exec)?;
    println!(
        "wrote {} artifact(s); manifest {}",
        manifest.artifacts.len(),
        spec.output_dir.join(MANIFEST_FILE).display()
    );
    if manifest.failures.is_empty() {
        Ok(())
    } else {
        for f in &manifest.failures {
            eprintln!("T = {}: {}", f.temperature, f.error);
        }
        Err(CliError {
            code: 3,
            message: format!("{} temperature(s) failed; see manifest", manifest.failures.len()),
        })
    }
}

fn cmd_inequality(args: InequalityArgs) -> CliResult<()> {
    let params = args.model.params()?;
    let rule = args.model.half_rule();
    let pi = solve_stationary(&params, rule, args.solver.method(), args.solver.tol(), args.solver.max_iters())?;
    let law = income_distribution(&params, &pi)?;
    let curve = lorenz_gini(law.p_win, law.payoff_short, law.payoff_long)?;
    let summary = curve.summary_json(law.p_win)? + "\n";
    if let Some(path) = &args.out {
        write_file(path, &curve.to_csv())?;
        write_file(&path.with_extension("json"), &summary)?;
    }
    print!("{summary}");
    Ok(())
}

fn cmd_figures(args: FiguresArgs, exec: Execution) -> CliResult<()> {
    let dir = required(args.out_dir, "out_dir")?;
    let manifest = reproduce_figures(&dir, exec)?;
    println!(
        "wrote {} artifact(s) ({} figures); manifest {}",
        manifest.artifacts.len(),
        manifest.artifacts_of_kind("svg").count(),
        dir.join(MANIFEST_FILE).display()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        configure_threads(threads).map_err(CliError::internal)?;
    }
    let file: Option<Map<String, Value>> = cli.config.as_deref().map(config::load).transpose()?;
    let file = file.as_ref();
    let exec = Execution::Parallel;
    match cli.command {
        Command::Kernel(a) => cmd_kernel(config::merge(a, file)?),
        Command::Stationary(a) => cmd_stationary(config::merge(a, file)?),
        Command::Simulate(a) => cmd_simulate(config::merge(a, file)?),
        Command::Sweep(a) => cmd_sweep(config::merge(a, file)?, exec),
        Command::Inequality(a) => cmd_inequality(config::merge(a, file)?),
        Command::Figures(a) => cmd_figures(config::merge(a, file)?, exec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
