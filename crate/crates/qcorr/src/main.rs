use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qcorr::config::RunConfig;
use qcorr::output::{run_artifacts, write_artifacts};
use qcorr::table::run_table;
use qcorr::validate::{run_validation, ValidateOptions};
use qcorr::{QcorrError, Result};

#[derive(Parser)]
#[command(
    name = "qcorr",
    version,
    about = "Correlation dynamics of two-qubit states under noisy channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one sweep and write trajectory.csv, crossings.json, verdict.json.
    Sweep {
        /// Path to a JSON run configuration.
        config: PathBuf,
        /// Directory the artifacts are written into.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the self-check suite and print its pass/fail table.
    Validate {
        /// Swap in the non-trace-preserving square-root dephasing kernel to
        /// demonstrate the completeness check failing.
        #[arg(long)]
        pd_sqrt_kernel: bool,
    },
    /// Run the ten summary scenarios and print one verdict line each.
    Table1 {
        /// Also write each row's artifacts under this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_thread_pool() {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit codes: 0 success, 1 I/O or failed validation, 2 configuration or
/// argument problems, 3 numerical failures.
fn exit_code(e: &QcorrError) -> ExitCode {
    match e {
        QcorrError::Config(_) | QcorrError::InvalidArgument(_) => ExitCode::from(2),
        QcorrError::Io(_) => ExitCode::from(1),
        _ => ExitCode::from(3),
    }
}

/// `QCORR_THREADS` caps the rayon pool; 0 or unset means automatic.
fn init_thread_pool() -> Result<()> {
    let Ok(raw) = std::env::var("QCORR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        QcorrError::Config(format!(
            "QCORR_THREADS must be a nonnegative integer, got `{raw}`"
        ))
    })?;
    if n == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| QcorrError::Config(format!("building thread pool: {e}")))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep { config, out } => cmd_sweep(&config, &out),
        Command::Validate { pd_sqrt_kernel } => cmd_validate(ValidateOptions { pd_sqrt_kernel }),
        Command::Table1 { out } => cmd_table1(out.as_deref()),
    }
}

fn cmd_sweep(config_path: &std::path::Path, out_dir: &std::path::Path) -> Result<ExitCode> {
    let cfg = RunConfig::load(config_path)?;
    let spec = cfg.to_spec()?;
    let artifacts = run_artifacts(&spec)?;
    write_artifacts(out_dir, &artifacts)?;
    println!(
        "verdict: {} ({} samples; wrote trajectory.csv, crossings.json, verdict.json to {})",
        artifacts.hierarchy.verdict.as_str(),
        artifacts.trajectory.points.len(),
        out_dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(opts: ValidateOptions) -> Result<ExitCode> {
    let report = run_validation(&opts)?;
    let width = report
        .checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(0);
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{:<width$}  {status}  {}", check.name, check.detail);
    }
    for line in &report.info {
        println!("info: {line}");
    }
    if report.all_passed() {
        println!("all {} checks passed", report.checks.len());
        Ok(ExitCode::SUCCESS)
    } else {
        let failed = report.failures();
        eprintln!("{} of {} checks failed:", failed.len(), report.checks.len());
        for check in failed {
            eprintln!("  {}: {}", check.name, check.detail);
        }
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_table1(out_dir: Option<&std::path::Path>) -> Result<ExitCode> {
    let entries = run_table()?;
    for entry in &entries {
        println!("{}", entry.line);
        if let Some(dir) = out_dir {
            write_artifacts(&dir.join(entry.name), &entry.artifacts)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
