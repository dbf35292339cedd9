//! Command dispatch and exit-code policy.
//!
//! Exit codes: 0 success, 2 config error, 3 solver error, 4 oracle-check
//! deviation exceeded. Every failure goes to standard error as a single
//! message starting with the machine-parsable prefix `ERROR <code>:`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::json;

use hotelling_core::{
    compare_paths, solve_discrete, solve_path, substitute_parameter, sweep as run_sweep,
    ExtractionPath, OracleError, SolverError,
};

use crate::config::{parse_config, ConfigError, OutputFormat, RunConfig};
use crate::emit::{emit_csv, emit_summary_json, emit_sweep_csv, emit_sweep_json};
use crate::svg::render_svg;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_DEVIATION: i32 = 4;

/// Largest sup-norm rate deviation (and objective gap) `oracle-check`
/// accepts before exiting with code 4.
pub const ORACLE_DEVIATION_LIMIT: f64 = 1e-3;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure { code: EXIT_CONFIG, message: message.into() }
    }

    pub fn solver(message: impl Into<String>) -> Self {
        Failure { code: EXIT_SOLVER, message: message.into() }
    }

    pub fn deviation(message: impl Into<String>) -> Self {
        Failure { code: EXIT_DEVIATION, message: message.into() }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::config(e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        Failure::solver(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            // Bad run arguments rather than numerical trouble.
            OracleError::TooFewBins(_) | OracleError::InvalidHorizon(_) => {
                Failure::config(e.to_string())
            }
            _ => Failure::solver(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::solver(format!("i/o failure: {e}"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hotelling",
    version,
    about = "Optimal depletion paths for an exhaustible stock under the Hotelling rule"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the configured scenario and write the requested outputs
    Solve {
        /// JSON run configuration
        config: PathBuf,
    },
    /// Run the comparative-statics sweep defined in the config's sweep block
    Sweep {
        /// JSON run configuration (must contain a sweep block)
        config: PathBuf,
    },
    /// Solve two configs and render a combined chart plus side-by-side summary
    Compare {
        config_a: PathBuf,
        config_b: PathBuf,
    },
    /// Cross-validate the continuous solver against the discrete transcription
    OracleCheck {
        /// JSON run configuration
        config: PathBuf,
        /// Number of transcription bins
        #[arg(long)]
        bins: usize,
        /// Transcription horizon (use at least twice the exhaustion time)
        #[arg(long)]
        horizon: f64,
    },
}

/// Parse arguments, dispatch, and reduce the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            eprintln!("ERROR {EXIT_CONFIG}: {e}");
            return EXIT_CONFIG;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("ERROR {}: {}", failure.code, failure.message);
            failure.code
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve { config } => cmd_solve(&config),
        Command::Sweep { config } => cmd_sweep(&config),
        Command::Compare { config_a, config_b } => cmd_compare(&config_a, &config_b),
        Command::OracleCheck { config, bins, horizon } => cmd_oracle_check(&config, bins, horizon),
    }
}

fn load(path: &Path) -> Result<(RunConfig, String), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
    let config = parse_config(&text)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".to_string());
    Ok((config, stem))
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir)?;
    let target = dir.join(name);
    fs::write(&target, contents)?;
    Ok(target)
}

fn cmd_solve(config_path: &Path) -> Result<(), Failure> {
    let (config, stem) = load(config_path)?;
    let path = solve_path(&config.scenario, &config.grid, config.lambda_tol)?;
    for format in &config.output.formats {
        match format {
            OutputFormat::Csv => {
                write_output(&config.output.dir, &format!("{stem}_path.csv"), &emit_csv(&path))?;
            }
            OutputFormat::Json => {
                write_output(
                    &config.output.dir,
                    &format!("{stem}_summary.json"),
                    &emit_summary_json(&path),
                )?;
            }
            OutputFormat::Svg => {
                write_output(
                    &config.output.dir,
                    &format!("{stem}_path.svg"),
                    &render_svg(&[&path])?,
                )?;
            }
        }
    }
    print!("{}", emit_summary_json(&path));
    Ok(())
}

fn cmd_sweep(config_path: &Path) -> Result<(), Failure> {
    let (config, stem) = load(config_path)?;
    let Some(sweep_spec) = &config.sweep else {
        return Err(Failure::config(format!(
            "config {} has no sweep block; `sweep` requires one",
            config_path.display()
        )));
    };
    let result = run_sweep(
        &config.scenario,
        sweep_spec.parameter,
        &sweep_spec.values,
        &config.grid,
    );
    for format in &config.output.formats {
        match format {
            OutputFormat::Csv => {
                write_output(
                    &config.output.dir,
                    &format!("{stem}_sweep.csv"),
                    &emit_sweep_csv(&result),
                )?;
            }
            OutputFormat::Json => {
                write_output(
                    &config.output.dir,
                    &format!("{stem}_sweep.json"),
                    &emit_sweep_json(&result),
                )?;
            }
            OutputFormat::Svg => {
                // Re-solve the successful rows to overlay their paths.
                let mut paths: Vec<ExtractionPath> = Vec::new();
                for row in &result.rows {
                    if row.outcome.is_ok() {
                        let scenario =
                            substitute_parameter(&config.scenario, sweep_spec.parameter, row.param)
                                .map_err(|e| Failure::solver(e.to_string()))?;
                        paths.push(solve_path(&scenario, &config.grid, config.lambda_tol)?);
                    }
                }
                if !paths.is_empty() {
                    let refs: Vec<&ExtractionPath> = paths.iter().collect();
                    write_output(
                        &config.output.dir,
                        &format!("{stem}_sweep.svg"),
                        &render_svg(&refs)?,
                    )?;
                }
            }
        }
    }
    print!("{}", emit_sweep_json(&result));
    Ok(())
}

fn cmd_compare(config_a: &Path, config_b: &Path) -> Result<(), Failure> {
    let (cfg_a, stem_a) = load(config_a)?;
    let (cfg_b, stem_b) = load(config_b)?;
    let path_a = solve_path(&cfg_a.scenario, &cfg_a.grid, cfg_a.lambda_tol)?;
    let path_b = solve_path(&cfg_b.scenario, &cfg_b.grid, cfg_b.lambda_tol)?;

    let combined = render_svg(&[&path_a, &path_b])?;
    write_output(&cfg_a.output.dir, &format!("{stem_a}_vs_{stem_b}.svg"), &combined)?;

    let summary_a: serde_json::Value =
        serde_json::from_str(&emit_summary_json(&path_a)).expect("own summary is valid JSON");
    let summary_b: serde_json::Value =
        serde_json::from_str(&emit_summary_json(&path_b)).expect("own summary is valid JSON");
    let side_by_side = json!({ "a": summary_a, "b": summary_b });
    println!(
        "{}",
        serde_json::to_string_pretty(&side_by_side).expect("summary serialization")
    );
    Ok(())
}

fn cmd_oracle_check(config_path: &Path, bins: usize, horizon: f64) -> Result<(), Failure> {
    let (config, _) = load(config_path)?;
    let continuous = solve_path(&config.scenario, &config.grid, config.lambda_tol)?;
    let discrete = solve_discrete(&config.scenario, bins, horizon)?;
    let deviation = compare_paths(&continuous, &discrete)?;
    println!(
        "sup_rate_deviation={} objective_gap={}",
        deviation.sup_rate, deviation.objective_gap
    );
    if deviation.sup_rate > ORACLE_DEVIATION_LIMIT
        || deviation.objective_gap > ORACLE_DEVIATION_LIMIT
    {
        return Err(Failure::deviation(format!(
            "oracle deviation exceeded: sup_rate_deviation={} objective_gap={} limit={}",
            deviation.sup_rate, deviation.objective_gap, ORACLE_DEVIATION_LIMIT
        )));
    }
    Ok(())
}
