use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ductflow::config::RunConfig;
use ductflow::profile::{compare, read_profile, write_profile};
use ductflow::sim;

#[derive(Parser)]
#[command(
    name = "ductflow",
    version,
    about = "Finite-volume solver for two-fluid compressible flow in variable cross-section ducts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured problem to its final time; writes profile.csv and
    /// steps.csv into the output directory.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (created if missing).
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the cell count from the config (mesh-refinement studies).
        #[arg(long)]
        cells: Option<usize>,
        /// Override the final time from the config.
        #[arg(long)]
        t_final: Option<f64>,
        /// Also drop a matplotlib script (plot.py) next to the CSV output.
        #[arg(long)]
        plot_script: bool,
    },
    /// Sample the closed-form solution of the configured two-state problem
    /// at a given time; writes exact.csv.
    Exact {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        time: f64,
        /// Number of sample points (default: the configured cell count).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Compare two profile CSVs column by column (relative L1/L2/Linf).
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Emit the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Check that the configured (stationary) flow is preserved over a
    /// number of steps; exits 3 when the drift exceeds the gate.
    WbCheck {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn dispatch(command: Command) -> ductflow::Result<ExitCode> {
    match command {
        Command::Run {
            config,
            out,
            cells,
            t_final,
            plot_script,
        } => {
            let mut cfg = RunConfig::from_file(&config)?;
            if let Some(n) = cells {
                cfg.n_cells = n;
            }
            if let Some(t) = t_final {
                cfg.t_final = t;
            }
            let output = sim::run(&cfg)?;
            sim::write_run_outputs(&out, &output, &cfg.eos, plot_script)?;
            println!(
                "{} cells, {} steps to t = {}; wrote {}",
                cfg.n_cells,
                output.reports.len(),
                output.state.time,
                out.join("profile.csv").display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Exact {
            config,
            time,
            samples,
            out,
        } => {
            let cfg = RunConfig::from_file(&config)?;
            let n = samples.unwrap_or(cfg.n_cells);
            let rows = sim::exact_rows(&cfg, time, n)?;
            std::fs::create_dir_all(&out).map_err(|source| ductflow::SimError::Io {
                path: out.display().to_string(),
                source,
            })?;
            let path = out.join("exact.csv");
            write_profile(&path, &rows)?;
            println!("{} samples at t = {time}; wrote {}", rows.len(), path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { a, b, json } => {
            let rows_a = read_profile(&a)?;
            let rows_b = read_profile(&b)?;
            let report = compare(&rows_a, &rows_b)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report)
                        .expect("report serialization cannot fail")
                );
            } else {
                println!("{}", report.summary());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::WbCheck { config, steps } => {
            let cfg = RunConfig::from_file(&config)?;
            let report = sim::wb_check(&cfg, steps)?;
            println!(
                "max relative drift {:.3e} over {} steps (gate {:.0e}): {}",
                report.max_drift,
                report.steps,
                sim::WB_DRIFT_TOL,
                if report.pass { "PASS" } else { "FAIL" }
            );
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
    }
}
