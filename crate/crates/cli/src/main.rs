use clap::{Parser, Subcommand};
use pullback_cli::config::{ExperimentConfig, Overrides, Stage};
use pullback_cli::pipeline::{run_experiment, simulate, RunReport};
use pullback_cli::{exit_code_for, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Non-autonomous reaction-diffusion attractor toolkit.
#[derive(Parser)]
#[command(name = "pullback", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the convergence tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

/// CONFIG is a scenario name (linear-heat, cantor-showcase, custom) or a
/// path to a config file.
#[derive(Subcommand)]
enum Command {
    /// Run every stage the config asks for.
    Run { config: String },
    /// Integrate one trajectory and write it as CSV.
    Simulate { config: String },
    /// Absorbing-set, pullback-family, and uniform-attractor stages.
    Attractor { config: String },
    /// Box-counting dimension stages.
    Dimension { config: String },
    /// Closed-form dimension bounds from measured constants.
    Bounds { config: String },
    /// Structural verification checks only.
    Verify { config: String },
}

fn load(config: &str, overrides: &Overrides) -> Result<ExperimentConfig, CliError> {
    match config {
        "linear-heat" | "cantor-showcase" | "custom" => {
            ExperimentConfig::scenario(config, overrides)
        }
        path => ExperimentConfig::load(std::path::Path::new(path), overrides),
    }
}

fn print_report(report: &RunReport) {
    for stage in &report.stages {
        println!("stage {:<14} {}", stage.name, stage.status);
    }
    for check in &report.checks {
        println!(
            "check {:<26} {} (value {:.6e}, threshold {:.6e})",
            check.name,
            if check.pass { "pass" } else { "FAIL" },
            check.value,
            check.threshold,
        );
    }
    if let Some(bounds) = &report.bounds {
        println!("bound union-polynomial   {:.12}", bounds.union_polynomial);
        println!("bound union-exponential  {:.12}", bounds.union_exponential);
        println!("bound uniform-attractor  {:.12}", bounds.uniform);
        println!("bound exp-attractor      {:.12}", bounds.exp_attractor);
    }
    for dim in &report.dimensions {
        println!(
            "dim   {:<26} {:.6} (ci {:.6})",
            dim.target, dim.report.slope, dim.report.ci
        );
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut overrides = Overrides {
        seed: cli.seed,
        out: cli.out,
        tol: cli.tol,
        stages: None,
    };
    let (config, stages): (&str, Option<Vec<Stage>>) = match &cli.command {
        Command::Run { config } => (config, None),
        Command::Simulate { config } => (config, Some(Vec::new())),
        Command::Attractor { config } => (
            config,
            Some(vec![Stage::Absorb, Stage::Pullback, Stage::Uniform]),
        ),
        Command::Dimension { config } => (
            config,
            Some(vec![Stage::Absorb, Stage::Uniform, Stage::Dimension]),
        ),
        Command::Bounds { config } => (config, Some(vec![Stage::Absorb, Stage::Bounds])),
        Command::Verify { config } => (config, Some(vec![Stage::Verify])),
    };
    if let Some(stages) = stages {
        if !stages.is_empty() {
            overrides.stages = Some(stages);
        }
    }
    if let Command::Simulate { .. } = cli.command {
        let cfg = load(config, &overrides)?;
        let path = simulate(&cfg)?;
        println!("trajectory {}", path.display());
        return Ok(true);
    }
    let cfg = load(config, &overrides)?;
    let report = run_experiment(&cfg)?;
    print_report(&report);
    println!(
        "report {} ({})",
        cfg.out.join("report.json").display(),
        if report.all_pass { "all checks pass" } else { "CHECKS FAILED" },
    );
    Ok(report.all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(5),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
