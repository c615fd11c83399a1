//! The `weakctx` command line.
//!
//! Every subcommand reads a JSON scenario file, optionally overrides its
//! pointer width with `--sigma`, and prints a machine-readable report:
//! JSON for single-shot analyses, CSV for the tabular `scan` output and for
//! raw `sample` batches. Identical invocations with identical files and
//! seeds produce byte-identical output.
//!
//! Exit codes: 0 success, 1 validation error (bad flags or files), 2
//! numerical failure (quadrature or LP).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::contextuality::sigma_scan;
use crate::error::{Error, Result};
use crate::montecarlo::sample;
use crate::pointer::{Scenario, TAIL_SIGMAS};
use crate::quad::QuadratureConfig;
use crate::report::{
    BoundReport, CheckReport, MeasureReport, SampleReport, WeakValueReport, XcheckReport,
};
use crate::scenario::ScenarioFile;

#[derive(Debug, Parser)]
#[command(
    name = "weakctx",
    about = "Gaussian-pointer weak measurements: weak values, disturbance, noncontextual bounds",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Path to a JSON scenario file.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Override the scenario's pointer width.
    #[arg(long)]
    pub sigma: Option<f64>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<(Scenario, Option<crate::hilbert::Operator>)> {
        ScenarioFile::from_path(&self.scenario)?.to_scenario(self.sigma)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weak values of the scenario observable, with anomaly report.
    Weakvalue {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Pointer-measurement analysis: Delta, p_d, E_d and S.
    Measure {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Check the four noncontextuality-breaking conditions with margins.
    Check {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Condition reports across a grid of pointer widths.
    Scan {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Comma-separated, strictly increasing pointer widths.
        #[arg(long, value_delimiter = ',', required = true)]
        sigma_grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
    },
    /// Maximal noncontextual p_- by linear programming, with certificate.
    Bound {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Number of pointer-axis bins in the discretization.
        #[arg(long, default_value_t = 200)]
        bins: usize,
        /// Integration window half-width in units of sigma.
        #[arg(long, default_value_t = TAIL_SIGMAS)]
        tail_sigmas: f64,
    },
    /// Monte Carlo event sampling and estimates.
    Sample {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Number of measurement events.
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        /// RNG seed; identical seeds reproduce batches bitwise.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// `json` for estimates, `csv` for the raw event batch.
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Cross-check every closed form against its defining integral.
    Xcheck {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Largest residual accepted before exiting with status 2.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Absolute tolerance per quadrature panel.
        #[arg(long, default_value_t = 1e-12)]
        quad_tol: f64,
        /// Integration window half-width in units of sigma.
        #[arg(long, default_value_t = TAIL_SIGMAS)]
        tail_sigmas: f64,
    },
}

fn print_json<T: serde::Serialize>(out: &mut impl Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidInput(format!("serialization: {e}")))?;
    writeln!(out, "{text}")?;
    Ok(())
}

/// Executes a parsed invocation, writing the report to `out`.
pub fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Weakvalue { scenario } => {
            let (s, observable) = scenario.load()?;
            print_json(out, &WeakValueReport::build(&s, observable.as_ref())?)
        }
        Command::Measure { scenario } => {
            let (s, _) = scenario.load()?;
            print_json(out, &MeasureReport::build(&s))
        }
        Command::Check { scenario } => {
            let (s, _) = scenario.load()?;
            print_json(out, &CheckReport::build(&s))
        }
        Command::Scan {
            scenario,
            sigma_grid,
            format,
        } => {
            let (s, _) = scenario.load()?;
            let result = sigma_scan(s.psi(), s.phi(), s.pi(), &sigma_grid)?;
            match format {
                OutputFormat::Json => print_json(out, &result),
                OutputFormat::Csv => {
                    writeln!(out, "sigma,p_minus,p_d,threshold,margin,all_hold")?;
                    for point in &result.points {
                        let r = &point.report;
                        writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            point.sigma, r.p_minus, r.p_d, r.threshold, r.margins[3], r.all_hold
                        )?;
                    }
                    Ok(())
                }
            }
        }
        Command::Bound {
            scenario,
            bins,
            tail_sigmas,
        } => {
            let (s, _) = scenario.load()?;
            print_json(out, &BoundReport::build(&s, bins, tail_sigmas)?)
        }
        Command::Sample {
            scenario,
            n,
            seed,
            format,
        } => {
            let (s, _) = scenario.load()?;
            let batch = sample(&s, n, seed)?;
            match format {
                OutputFormat::Json => print_json(out, &SampleReport::build(&s, &batch)?),
                OutputFormat::Csv => {
                    batch.write_csv(out)?;
                    Ok(())
                }
            }
        }
        Command::Xcheck {
            scenario,
            tol,
            quad_tol,
            tail_sigmas,
        } => {
            let (s, _) = scenario.load()?;
            let config = QuadratureConfig::default().with_tolerance(quad_tol);
            let report = XcheckReport::build(&s, &config, tail_sigmas, tol)?;
            print_json(out, &report)?;
            if report.pass {
                Ok(())
            } else {
                Err(Error::ResidualExceedsTolerance {
                    worst: report
                        .p_minus_residual
                        .max(report.s_quadrature_residual)
                        .max(report.s_decomposition_residual)
                        .max(report.povm_completeness_residual)
                        .max(report.abc_residuals[0])
                        .max(report.abc_residuals[1])
                        .max(report.abc_residuals[2]),
                    tolerance: report.tolerance,
                })
            }
        }
    }
}
