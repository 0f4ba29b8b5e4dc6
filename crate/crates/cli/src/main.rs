use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qrf_cli::error::CliResult;
use qrf_cli::suite::{counter_without_inverse, reference_counter, verify_suite_with};
use qrf_cli::{
    emit_report, run_scenario_with, CliError, Format, RunOptions, RunReport, ScenarioConfig, EXIT_CHECK_FAILED,
    EXIT_INTERNAL, EXIT_PASS,
};

#[derive(Parser)]
#[command(name = "qrf", version, about = "Quantum reference frame scenarios and property checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mutant {
    /// The counterpart relation with the inverse dropped.
    CounterWithoutInverse,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print its report.
    Run {
        scenario: PathBuf,
        /// Overrides the seed of seeded scenarios.
        #[arg(long, env = "QRF_SEED")]
        seed: Option<u64>,
        /// Directory for `<scenario>.json`; stdout if unset.
        #[arg(long, env = "QRF_OUT_DIR")]
        out_dir: Option<PathBuf>,
        /// Include wall-clock timings (the report is then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Run the property suite.
    Verify {
        #[arg(long, env = "QRF_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, env = "QRF_OUT_DIR")]
        out_dir: Option<PathBuf>,
        #[arg(long, value_enum, hide = true)]
        mutant: Option<Mutant>,
    },
    /// Convert a saved JSON report to JSON or CSV.
    Report {
        /// A report written by `run` or `verify`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        /// Output file; relative paths resolve against QRF_OUT_DIR when set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV only: emit a named report table instead of the check rows.
        #[arg(long)]
        table: Option<String>,
    },
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display().to_string(), e))?;
            }
            std::fs::write(p, text).map_err(|e| CliError::io(p.display().to_string(), e))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("stdout", e)),
    }
}

fn status(report: &RunReport) -> i32 {
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    }
}

fn execute(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Run { scenario, seed, out_dir, timings } => {
            let config = ScenarioConfig::from_json(&read(&scenario)?)?;
            let report = run_scenario_with(&config, RunOptions { seed_override: seed, timings })?;
            let path = out_dir.map(|d| d.join(format!("{}.json", report.scenario)));
            write_out(path.as_deref(), &emit_report(&report, Format::Json, None)?)?;
            Ok(status(&report))
        }
        Command::Verify { seed, cases, out_dir, mutant } => {
            let counter = match mutant {
                Some(Mutant::CounterWithoutInverse) => counter_without_inverse,
                None => reference_counter,
            };
            let report = verify_suite_with(seed, cases, counter)?;
            let path = out_dir.map(|d| d.join("verify.json"));
            write_out(path.as_deref(), &emit_report(&report, Format::Json, None)?)?;
            Ok(status(&report))
        }
        Command::Report { input, format, out, table } => {
            let report: RunReport = serde_json::from_str(&read(&input)?)
                .map_err(|e| CliError::validation(format!("{}: not a report: {e}", input.display())))?;
            if table.is_some() && matches!(format, OutFormat::Json) {
                return Err(CliError::validation("--table applies to csv output only"));
            }
            let out = out.map(|p| match std::env::var_os("QRF_OUT_DIR") {
                Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
                _ => p,
            });
            write_out(out.as_deref(), &emit_report(&report, format.into(), table.as_deref())?)?;
            Ok(EXIT_PASS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match std::panic::catch_unwind(|| execute(cli)) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("{}", e.to_document());
            e.exit_code()
        }
        Err(_) => EXIT_INTERNAL,
    };
    ExitCode::from(code as u8)
}
