use std::path::PathBuf;
use std::process::ExitCode;

use bigon::scenario::{self, Command, Options};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Numerical holonomy and gluing checks for 2-connections.
#[derive(Parser, Debug)]
#[command(name = "bigon", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the crossed-module axioms and sitting instants.
    Validate(Flags),
    /// Check the interchange law.
    Interchange(Flags),
    /// Path holonomy of the scenario's path.
    HolonomyPath(Flags),
    /// Surface holonomy of the scenario's bigon.
    HolonomySurface(Flags),
    /// Fake curvature and curvature 3-form of every chart.
    FakeCurvature(Flags),
    /// A-law, B-law and triple a-law on overlaps.
    Transitions(Flags),
    /// Triangle, tetrahedron and unit laws of Čech data.
    Cocycle(Flags),
    /// Enumerate Čech cocycles up to coboundary.
    Classify(Flags),
    /// Convergence of holonomy under grid refinement.
    Converge(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    #[arg(long, value_name = "FILE")]
    scenario: PathBuf,
    #[arg(long, default_value_t = scenario::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write the convergence table as CSV (converge only).
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

impl Cmd {
    fn split(self) -> (Command, Flags) {
        match self {
            Cmd::Validate(f) => (Command::Validate, f),
            Cmd::Interchange(f) => (Command::Interchange, f),
            Cmd::HolonomyPath(f) => (Command::HolonomyPath, f),
            Cmd::HolonomySurface(f) => (Command::HolonomySurface, f),
            Cmd::FakeCurvature(f) => (Command::FakeCurvature, f),
            Cmd::Transitions(f) => (Command::Transitions, f),
            Cmd::Cocycle(f) => (Command::Cocycle, f),
            Cmd::Classify(f) => (Command::Classify, f),
            Cmd::Converge(f) => (Command::Converge, f),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = cli.command.split();
    match execute(command, &flags) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command, flags: &Flags) -> Result<u8, String> {
    let sc = scenario::load_scenario(&flags.scenario).map_err(config_message)?;
    let options = Options {
        seed: Some(flags.seed),
        grid: flags.grid,
        samples: flags.samples,
    };
    let report = scenario::run(command, &sc, &options).map_err(config_message)?;
    let body = match flags.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &flags.out {
        Some(path) => std::fs::write(path, &body)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => print!("{body}"),
    }
    if let (Some(path), Some(table)) = (&flags.csv, &report.convergence) {
        std::fs::write(path, table.csv())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    eprintln!("wall time: {:.3} s", report.wall_time.as_secs_f64());
    Ok(report.exit_code() as u8)
}

fn config_message(e: bigon::Error) -> String {
    match e {
        bigon::Error::Config(m) => m,
        other => other.to_string(),
    }
}
