use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fracq::experiment::{self, ExperimentConfig, RunError, FIELDS, IDENTITIES, SUITES};

#[derive(Parser)]
#[command(name = "fracq", version, about = "Residual checks for fractional Fueter-type integral identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config or a built-in suite.
    Run {
        /// JSON experiment config.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Built-in suite used when no config is given.
        #[arg(long, value_name = "NAME")]
        suite: Option<String>,
        /// CSV output path; the JSON summary goes next to it with a .json extension.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Seed for random placements and random fields; overrides the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Fill the elapsed_s column and the summary wall time.
        #[arg(long)]
        timings: bool,
    },
    /// Print the identity registry.
    ListIdentities,
    /// Print the field registry.
    ListFields,
}

fn load(config: Option<&Path>, suite: Option<&str>) -> Result<ExperimentConfig, RunError> {
    match (config, suite) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| RunError::Parse(format!("{}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)
        }
        (None, Some(name)) => ExperimentConfig::suite(name),
        (None, None) => Err(RunError::Parse("either --config or --suite is required".into())),
    }
}

fn run(
    config: Option<&Path>,
    suite: Option<&str>,
    out: Option<&Path>,
    jobs: usize,
    seed: Option<u64>,
    timings: bool,
) -> Result<i32, RunError> {
    let mut cfg = load(config, suite)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let prepared = cfg.prepare()?;
    let outcome = experiment::run(&prepared, jobs)?;
    let csv = experiment::to_csv(&outcome.reports, timings)?;
    let json = experiment::to_json(&prepared, &outcome, timings)?;
    let out = out.map(Path::to_path_buf).or_else(|| cfg.output.as_ref().map(PathBuf::from));
    match out {
        Some(path) => {
            let write = |p: &Path, text: &str| std::fs::write(p, text).map_err(|e| RunError::Output(format!("{}: {e}", p.display())));
            write(&path, &csv)?;
            write(&path.with_extension("json"), &json)?;
        }
        None => print!("{csv}"),
    }
    for c in outcome.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} N={} ({}) tolerance {:e}", c.identity_id, c.n, c.notes, c.tolerance);
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListIdentities => {
            for (id, about) in IDENTITIES {
                println!("{id:<20} {about}");
            }
            ExitCode::SUCCESS
        }
        Command::ListFields => {
            for (name, about) in FIELDS {
                println!("{name:<18} {about}");
            }
            println!("\nsuites: {}", SUITES.join(", "));
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            suite,
            out,
            jobs,
            seed,
            timings,
        } => match run(config.as_deref(), suite.as_deref(), out.as_deref(), jobs, seed, timings) {
            Ok(code) => ExitCode::from(code as u8),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
