//! Command-line surface for the coilsense pipeline.
//!
//! Every command is deterministic given its inputs, flags and seed, and
//! every command that writes an output directory leaves exactly one
//! `manifest.json` there recording what produced the files.

mod commands;
mod manifest;

use std::fmt;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

/// Marker for problems with arguments or configuration (exit code 2, as
/// opposed to 1 for runtime failures).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for UsageError {}

pub fn usage_error(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.into()))
}

#[derive(Parser)]
#[command(
    name = "coilsense",
    version,
    about = "Soft-sensor quality control for strip-steel production lines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic production run: measurements, tensile tests,
    /// fault log and ground truth.
    Generate {
        /// TOML generator configuration; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a PLS model on a measurement + tensile file pair.
    Fit {
        #[arg(long)]
        coils: PathBuf,
        #[arg(long)]
        tensile: PathBuf,
        /// Number of latent variables.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Leave-one-coil-out cross-validation: RMSE-vs-k curve, per-variable
    /// OLS baselines and the prediction scatter.
    Cv {
        #[arg(long)]
        coils: PathBuf,
        #[arg(long)]
        tensile: PathBuf,
        /// Components used for the prediction scatter.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Largest component count on the RMSE curve.
        #[arg(long, default_value_t = 5)]
        k_max: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a measurement file with a fitted model: per-position estimates,
    /// smoothed series and alerts.
    Score {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        coils: PathBuf,
        #[arg(long)]
        usl_t1: f64,
        #[arg(long)]
        usl_t2: f64,
        /// Smoothing window for the moving average.
        #[arg(long, default_value_t = 50)]
        window: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Read the measurement stream from standard input and emit alert
    /// records on standard output as they occur.
    Monitor {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        usl_t1: f64,
        #[arg(long)]
        usl_t2: f64,
        #[arg(long, default_value_t = 50)]
        window: usize,
    },
    /// Fault-classification metrics, component/property correlations and
    /// per-coil out-of-spec risk.
    Report {
        #[arg(long)]
        coils: PathBuf,
        #[arg(long)]
        tensile: PathBuf,
        #[arg(long)]
        faults: Option<PathBuf>,
        #[arg(long)]
        usl_t1: f64,
        #[arg(long)]
        usl_t2: f64,
        /// Components for the internally fitted model.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Restrict metrics.csv to one classification rule.
        #[arg(long, value_parser = commands::parse_rule)]
        rule: Option<coilsense::fault::FaultRule>,
        #[arg(long, default_value_t = 50)]
        window: usize,
        /// Minimum estimates per coil for the risk table.
        #[arg(long, default_value_t = 2000)]
        min_count: usize,
        /// Reuse cross-validation predictions from a cv_scatter.csv instead
        /// of re-running cross-validation.
        #[arg(long)]
        scatter: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeated-random-split GMLVQ experiment: can fault-linked
    /// out-of-spec measurements be told apart from unlinked ones?
    GmlvqEval {
        #[arg(long)]
        coils: PathBuf,
        #[arg(long)]
        faults: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        usl_t1: f64,
        #[arg(long)]
        usl_t2: f64,
        #[arg(long, default_value_t = 100)]
        splits: usize,
        #[arg(long, default_value_t = 8)]
        val_size: usize,
        /// Samples per class; defaults to the number of usable positives.
        #[arg(long)]
        per_class: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-variable noise ranking (and optionally one smoothed series) for
    /// a single coil.
    Noise {
        #[arg(long)]
        coils: PathBuf,
        #[arg(long)]
        coil_id: String,
        #[arg(long, default_value_t = 2000)]
        plateau_start: usize,
        #[arg(long, default_value_t = 4000)]
        plateau_end: usize,
        #[arg(long, default_value_t = 50)]
        window: usize,
        /// Also write the raw + smoothed series of this sensor variable
        /// (1-based).
        #[arg(long)]
        sv: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { config, seed, out } => commands::generate::run(config, seed, out),
        Command::Fit {
            coils,
            tensile,
            k,
            out,
        } => commands::fit::run(coils, tensile, k, out),
        Command::Cv {
            coils,
            tensile,
            k,
            k_max,
            out,
        } => commands::cv::run(coils, tensile, k, k_max, out),
        Command::Score {
            model,
            coils,
            usl_t1,
            usl_t2,
            window,
            out,
        } => commands::score::run(model, coils, usl_t1, usl_t2, window, out),
        Command::Monitor {
            model,
            usl_t1,
            usl_t2,
            window,
        } => commands::monitor::run(model, usl_t1, usl_t2, window),
        Command::Report {
            coils,
            tensile,
            faults,
            usl_t1,
            usl_t2,
            k,
            rule,
            window,
            min_count,
            scatter,
            out,
        } => commands::report::run(commands::report::Args {
            coils,
            tensile,
            faults,
            usl_t1,
            usl_t2,
            k,
            rule,
            window,
            min_count,
            scatter,
            out,
        }),
        Command::GmlvqEval {
            coils,
            faults,
            model,
            usl_t1,
            usl_t2,
            splits,
            val_size,
            per_class,
            seed,
            out,
        } => commands::gmlvq_eval::run(commands::gmlvq_eval::Args {
            coils,
            faults,
            model,
            usl_t1,
            usl_t2,
            splits,
            val_size,
            per_class,
            seed,
            out,
        }),
        Command::Noise {
            coils,
            coil_id,
            plateau_start,
            plateau_end,
            window,
            sv,
            out,
        } => commands::noise::run(coils, coil_id, plateau_start..plateau_end, window, sv, out),
    };

    if let Err(e) = result {
        eprintln!("error: {e:#}");
        let code = if e.downcast_ref::<UsageError>().is_some() {
            2
        } else {
            1
        };
        std::process::exit(code);
    }
}
