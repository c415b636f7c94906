use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jetcartan_cli::{
    builtin, list_identities, parse_config, run_scenario, scenario, tables_text, CliError, Overrides, Report,
};

#[derive(Parser)]
#[command(name = "jetcartan", version, about = "Torsion, curvature and identity checks on the 1-jet space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for sampling (and for random connections)
    #[arg(long)]
    seed: Option<u64>,
    /// Sample points per check
    #[arg(long)]
    points: Option<usize>,
    /// Absolute and relative tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Exit 0 even when printed Bianchi identities are suspect
    #[arg(long)]
    allow_suspect: bool,
    /// Write the JSON report here (`-` for stdout)
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in scenario
    Check {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Print torsion and curvature tables
    Tables {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        emit_symbolic: bool,
    },
    /// List every identity checked
    ListIdentities,
}

fn overrides(c: &Common, dim: Option<usize>) -> Overrides {
    Overrides { dim, seed: c.seed, points: c.points, tol: c.tol }
}

fn emit(report: &Report, common: &Common) -> Result<i32, CliError> {
    match &common.json {
        Some(p) if p.as_os_str() == "-" => print!("{}", report.to_json()),
        Some(p) => {
            std::fs::write(p, report.to_json())
                .map_err(|source| CliError::Io { path: p.display().to_string(), source })?;
            print!("{}", report.to_text());
        }
        None => print!("{}", report.to_text()),
    }
    Ok(report.exit_code(common.allow_suspect))
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { config, common } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|source| CliError::Io { path: config.display().to_string(), source })?;
            let mut c = parse_config(&text)?;
            scenario::apply(&mut c, &overrides(&common, None));
            emit(&run_scenario(&c)?, &common)
        }
        Command::Check { scenario, dim, common } => {
            let c = builtin(&scenario, &overrides(&common, dim))?;
            emit(&run_scenario(&c)?, &common)
        }
        Command::Tables { scenario, dim, emit_symbolic } => {
            let c = builtin(&scenario, &Overrides { dim, ..Default::default() })?;
            print!("{}", tables_text(&c, emit_symbolic)?);
            Ok(0)
        }
        Command::ListIdentities => {
            print!("{}", list_identities());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
