//! Thin command-line front end: parses arguments, hands off to the
//! experiment registry in [`pptdisc::cli`], and maps outcomes to exit
//! codes (0 success, 1 verdict failure, 2 usage error, 3 solver
//! non-convergence).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pptdisc::cli::{self, Experiment, ExperimentConfig, Method, OutputFormat};
use pptdisc::Error;

#[derive(Parser)]
#[command(
    name = "pptdisc",
    about = "Desk-scale experiments on distinguishing entangled states under PPT measurements",
    version
)]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Duality-gap tolerance for the interior-point solver.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    /// Iteration cap for the interior-point solver.
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: json or table.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// List the available experiments.
    List,
    /// Trace bound and d+1 maximally entangled state indistinguishability.
    Theorem1 {
        /// Random operators sampled per dimension.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// No perfect PPT discrimination of the four ququad-ququad states.
    Theorem2 {
        /// Route: sdp, analytic, or both.
        #[arg(long, default_value = "both")]
        method: String,
        /// Also solve the family perturbed by a two-term state with this weight.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Comma-separated priors for the four states (default uniform).
        #[arg(long)]
        priors: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Teleportation-based discrimination that returns its catalyst.
    Catalysis {
        /// Which state to prepare (0..=3); all four when omitted.
        #[arg(long)]
        input: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Multi-copy decoding after converting the attached states.
    TensorPower {
        /// Two-term weight of the attached state.
        #[arg(long, default_value_t = 0.3)]
        delta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Two-receiver channel: one-shot bound and multi-shot exact decoding.
    Channel {
        #[arg(long, default_value_t = 0.3)]
        delta: f64,
        /// Channel uses to simulate.
        #[arg(long, default_value_t = 1)]
        shots: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep the largest Schmidt coefficient of the attached resource.
    Threshold {
        /// Comma-separated lambda0 grid (default 0.50..0.80 plus 2/3).
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve a semidefinite program from a JSON problem file.
    SdpSolve {
        /// Problem file in the crate's JSON schema.
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::OutOfRange(format!("bad number `{s}`: {e}")))
        })
        .collect()
}

fn build_config(command: Command) -> Result<ExperimentConfig, Error> {
    let (experiment, common) = match &command {
        Command::List => unreachable!("handled before config assembly"),
        Command::Theorem1 { common, .. } => (Experiment::Theorem1, common.clone()),
        Command::Theorem2 { common, .. } => (Experiment::Theorem2, common.clone()),
        Command::Catalysis { common, .. } => (Experiment::Catalysis, common.clone()),
        Command::TensorPower { common, .. } => (Experiment::TensorPower, common.clone()),
        Command::Channel { common, .. } => (Experiment::Channel, common.clone()),
        Command::Threshold { common, .. } => (Experiment::Threshold, common.clone()),
        Command::SdpSolve { common, .. } => (Experiment::SdpSolve, common.clone()),
    };
    let mut config = ExperimentConfig::new(experiment);
    config.tol = common.tol;
    config.max_iters = common.max_iters;
    config.out = common.out;
    config.format = common.format.parse::<OutputFormat>()?;
    match command {
        Command::List => unreachable!(),
        Command::Theorem1 { trials, .. } => config.trials = trials,
        Command::Theorem2 {
            method,
            epsilon,
            priors,
            ..
        } => {
            config.method = method.parse::<Method>()?;
            config.epsilon = epsilon;
            config.priors = priors.as_deref().map(parse_f64_list).transpose()?;
        }
        Command::Catalysis { input, .. } => config.input = input,
        Command::TensorPower { delta, .. } => config.delta = delta,
        Command::Channel { delta, shots, .. } => {
            config.delta = delta;
            config.shots = shots;
        }
        Command::Threshold { grid, .. } => {
            config.grid = grid.as_deref().map(parse_f64_list).transpose()?;
        }
        Command::SdpSolve { input, .. } => config.problem_path = Some(input),
    }
    Ok(config)
}

fn main() -> ExitCode {
    let args = CliArgs::parse();
    if let Command::List = args.command {
        for (name, description) in cli::list_experiments() {
            println!("{name:<14} {description}");
        }
        return ExitCode::SUCCESS;
    }
    let config = match build_config(args.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = cli::run(&config);
    let code = cli::exit_code(&outcome);
    match &outcome {
        Ok(report) => {
            let rendered = report.render(config.format);
            if let Some(path) = &config.out {
                if let Err(e) = std::fs::write(path, &rendered) {
                    eprintln!("error: writing report to {}: {e}", path.display());
                    return ExitCode::from(2);
                }
                println!(
                    "{}: {}; report written to {}",
                    report.experiment,
                    if report.ok { "ok" } else { "verdict failure" },
                    path.display()
                );
            } else {
                print!("{rendered}");
            }
            if let Some(v) = report.failing_verdict() {
                eprintln!("failed verdict: {}", v.name);
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
