//! Thin command-line front end over the library's report functions.
//!
//! Exit codes: 0 success, 1 computation error (JSON on stderr), 2 usage
//! error.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use multiphase::estimation::{mle_experiment, MleExperimentConfig};
use multiphase::report::{
    bounds_csv, bounds_table, hb_cfi_csv, hb_cfi_sweep, hb_sweep_csv, hb_qcrb_sweep, mle_csv,
    parse_povm, parse_probe, povm_check, probe_search_report,
};
use multiphase::search::{PhaseSearchConfig, ProbeSearchConfig};
use multiphase::{Error, PhaseVector};

#[derive(Parser)]
#[command(
    name = "multiphase",
    about = "Bounds, sweeps, and experiments for simultaneous multi-phase estimation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Output {
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Output format for tabular results.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Strategy-comparison bounds over a range of phase counts.
    Bounds {
        /// Total photon number.
        #[arg(long = "N")]
        photons: u32,
        /// Phase count or range, e.g. `4` or `1:16`.
        #[arg(long, default_value = "1:16")]
        d: String,
        #[command(flatten)]
        output: Output,
    },
    /// Quantum bound of HB(n, d) versus the references, swept over n.
    HbSweep {
        /// Phase count.
        #[arg(long)]
        d: usize,
        /// Photons per input mode, value or range, e.g. `1:3`.
        #[arg(long, default_value = "1:3")]
        n: String,
        #[command(flatten)]
        output: Output,
    },
    /// Optimized detector information of HB(n, d), swept over d.
    HbCfi {
        /// Phase count or range, e.g. `2:3`.
        #[arg(long, default_value = "2:3")]
        d: String,
        /// Photons per input mode.
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Per-axis resolution of the phase seeding grid.
        #[arg(long, default_value_t = 8)]
        grid: usize,
        /// Local searches launched from the best grid points.
        #[arg(long, default_value_t = 4)]
        starts: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Verify that the projective sets saturate the quantum bound.
    PovmCheck {
        /// Phase count.
        #[arg(long)]
        d: usize,
        /// Total photon number.
        #[arg(long = "N", default_value_t = 2)]
        photons: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Numerical probe search over the full configuration space.
    Search {
        /// Phase count.
        #[arg(long)]
        d: usize,
        /// Total photon number.
        #[arg(long = "N")]
        photons: u32,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Monte-Carlo maximum-likelihood experiment against a measurement.
    Mle {
        /// Probe descriptor: `optimal:d=..,N=..[,alpha=..]`, `w:d=..,N=..`,
        /// `noon:N=..[,d=..,mode=..]`, or `hb:n=..,d=..`.
        #[arg(long)]
        probe: String,
        /// Measurement descriptor: `upsilon`, `pnrd:qft`, `pnrd:identity`.
        #[arg(long, default_value = "upsilon")]
        povm: String,
        /// True phases, comma separated; defaults to small offsets.
        #[arg(long)]
        theta: Option<String>,
        /// Trial ladder, comma separated.
        #[arg(long, default_value = "1000,10000,100000")]
        trials: String,
        #[arg(long, default_value_t = 200)]
        replications: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

enum CliError {
    /// Malformed argument values; exit code 2 like clap's own parse errors.
    Usage(String),
    Computation(Error),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Computation(err)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Computation(err)) => {
            let payload = serde_json::json!({ "error": err.to_string() });
            eprintln!("{payload}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(message)) => {
            let payload = serde_json::json!({ "error": message });
            eprintln!("{payload}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bounds { photons, d, output } => {
            let (lo, hi) = parse_range(&d)?;
            let rows = bounds_table(photons, lo, hi)?;
            Ok(emit(&output, || bounds_csv(&rows), &rows)?)
        }
        Command::HbSweep { d, n, output } => {
            let (lo, hi) = parse_range(&n)?;
            let rows = hb_qcrb_sweep(d, lo as u32, hi as u32)?;
            Ok(emit(&output, || hb_sweep_csv(&rows), &rows)?)
        }
        Command::HbCfi {
            d,
            n,
            grid,
            starts,
            output,
        } => {
            let (lo, hi) = parse_range(&d)?;
            let config = PhaseSearchConfig {
                grid_resolution: grid,
                starts,
                ..Default::default()
            };
            let rows = hb_cfi_sweep(lo, hi, n, &config)?;
            Ok(emit(&output, || hb_cfi_csv(&rows), &rows)?)
        }
        Command::PovmCheck { d, photons, output } => {
            let report = povm_check(d, photons)?;
            match output.format {
                Format::Csv => write_text(&output, format!("{report}\n"))?,
                Format::Json => write_text(&output, to_json(&report)?)?,
            }
            Ok(())
        }
        Command::Search {
            d,
            photons,
            restarts,
            seed,
            output,
        } => {
            let config = ProbeSearchConfig {
                restarts,
                seed,
                ..Default::default()
            };
            let report = probe_search_report(d, photons, &config)?;
            Ok(write_text(&output, to_json(&report)?)?)
        }
        Command::Mle {
            probe,
            povm,
            theta,
            trials,
            replications,
            seed,
            output,
        } => {
            let psi = parse_probe(&probe)?;
            let set = parse_povm(&povm, &psi)?;
            let theta_true = match theta {
                Some(text) => PhaseVector::new(parse_floats(&text)?)?,
                None => PhaseVector::new(
                    (0..psi.d()).map(|i| 0.2 / (i + 1) as f64).collect(),
                )?,
            };
            let config = MleExperimentConfig {
                trial_ladder: parse_ints(&trials)?,
                replications,
                seed,
            };
            let rows = mle_experiment(&psi, &theta_true, &set, &config)?;
            Ok(emit(&output, || mle_csv(psi.d(), &rows), &rows)?)
        }
    }
}

fn emit<T: serde::Serialize>(
    output: &Output,
    csv: impl FnOnce() -> String,
    rows: &[T],
) -> multiphase::Result<()> {
    match output.format {
        Format::Csv => write_text(output, csv()),
        Format::Json => write_text(output, to_json(rows)?),
    }
}

fn to_json<T: serde::Serialize + ?Sized>(value: &T) -> multiphase::Result<String> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))
}

fn write_text(output: &Output, text: String) -> multiphase::Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::InvalidArgument(format!("cannot write to stdout: {e}")))
        }
    }
}

/// `lo:hi` or a single value.
fn parse_range(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("bad range `{text}`, expected `lo:hi` or `v`"));
    match text.split_once(':') {
        Some((lo, hi)) => {
            let lo = lo.parse().map_err(|_| bad())?;
            let hi = hi.parse().map_err(|_| bad())?;
            Ok((lo, hi))
        }
        None => {
            let v = text.parse().map_err(|_| bad())?;
            Ok((v, v))
        }
    }
}

fn parse_floats(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad number `{p}`")))
        })
        .collect()
}

fn parse_ints(text: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("bad count `{p}`")))
        })
        .collect()
}
