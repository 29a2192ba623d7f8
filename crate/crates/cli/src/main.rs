//! `pim-sumrate`: batch experiments for PIM-assisted sum-rate maximization.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use pim_core::alternating::{PhaseWeighting, WaterfillMethod};
use pim_core::experiments::{
    aggregate, convergence_report, format_summary, run_experiment, write_convergence_csv, write_convergence_json, write_csv,
    write_json, ExperimentKind, ExperimentSpec, GroupKey,
};
use pim_core::phase_mm::MmMode;

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Experiment {
    #[value(name = "sweep_snr")]
    SweepSnr,
    #[value(name = "sweep_n")]
    SweepN,
    Convergence,
    Single,
}

impl From<Experiment> for ExperimentKind {
    fn from(e: Experiment) -> Self {
        match e {
            Experiment::SweepSnr => ExperimentKind::SweepSnr,
            Experiment::SweepN => ExperimentKind::SweepN,
            Experiment::Convergence => ExperimentKind::Convergence,
            Experiment::Single => ExperimentKind::Single,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Surrogate {
    Paper,
    Spectral,
    Auto,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Weighting {
    Weighted,
    #[value(name = "paper_literal")]
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Waterfill {
    Exact,
    Paper,
}

/// Run a seeded Monte Carlo experiment and write per-realization results.
#[derive(Debug, Parser)]
#[command(name = "pim-sumrate", version)]
struct Args {
    /// Experiment to run (overrides the config's `experiment`).
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Output file; defaults to the config's `output_path`, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, value_enum)]
    surrogate: Option<Surrogate>,
    #[arg(long, value_enum)]
    weighting: Option<Weighting>,
    #[arg(long, value_enum)]
    waterfill: Option<Waterfill>,
}

enum Failure {
    Config(String),
    Io(String),
}

fn load_spec(args: &Args) -> Result<ExperimentSpec, Failure> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", args.config.display())))?;
    let mut spec: ExperimentSpec =
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    spec.experiment = args.experiment.into();
    if let Some(seed) = args.seed {
        spec.master_seed = seed;
    }
    if let Some(r) = args.realizations {
        spec.realizations = r;
    }
    if let Some(s) = args.surrogate {
        spec.solver.surrogate = match s {
            Surrogate::Paper => MmMode::Paper,
            Surrogate::Spectral => MmMode::Spectral,
            Surrogate::Auto => MmMode::Auto,
        };
    }
    if let Some(w) = args.weighting {
        spec.solver.weighting = match w {
            Weighting::Weighted => PhaseWeighting::Weighted,
            Weighting::PaperLiteral => PhaseWeighting::PaperLiteral,
        };
    }
    if let Some(w) = args.waterfill {
        spec.solver.waterfill = match w {
            Waterfill::Exact => WaterfillMethod::Exact,
            Waterfill::Paper => WaterfillMethod::Paper,
        };
    }
    if let Some(out) = &args.out {
        spec.output_path = Some(out.clone());
    }
    spec.validate().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(spec)
}

fn sink(spec: &ExperimentSpec) -> Result<Box<dyn Write>, Failure> {
    match &spec.output_path {
        Some(path) => {
            let f = File::create(path).map_err(|e| Failure::Io(format!("cannot create {}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn run(args: &Args) -> Result<(), Failure> {
    let spec = load_spec(args)?;
    let io_err = |e: io::Error| Failure::Io(e.to_string());
    let to_stdout = spec.output_path.is_none();

    if spec.experiment == ExperimentKind::Convergence {
        let report = convergence_report(&spec).map_err(|e| Failure::Config(e.to_string()))?;
        let mut out = sink(&spec)?;
        match args.format {
            Format::Csv => write_convergence_csv(&report, &mut out).map_err(io_err)?,
            Format::Json => write_convergence_json(&report, &mut out).map_err(io_err)?,
        }
        out.flush().map_err(io_err)?;
        if !to_stdout {
            for s in &report.summary {
                println!(
                    "K={} M={} N={}  median iterations to mse<{:e}: {}  converged {}/{}",
                    s.k, s.m, s.n, report.mse_tol, s.median_iterations, s.converged, s.realizations
                );
            }
        }
        return Ok(());
    }

    let rows = run_experiment(&spec).map_err(|e| Failure::Config(e.to_string()))?;
    let mut out = sink(&spec)?;
    match args.format {
        Format::Csv => write_csv(&rows, &mut out).map_err(io_err)?,
        Format::Json => write_json(&spec, &rows, &mut out).map_err(io_err)?,
    }
    out.flush().map_err(io_err)?;
    if !to_stdout {
        if let Ok(summary) = aggregate(&rows, &GroupKey::DEFAULT) {
            print!("{}", format_summary(&summary));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("i/o error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
