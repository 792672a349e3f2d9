//! `mpt` command line: dataset generation, tracking, evaluation, ablation,
//! and overlay rendering. Exit codes: 0 success, 1 runtime failure, 2 usage
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod overlay;

#[derive(Parser)]
#[command(
    name = "mpt",
    version,
    about = "Synthetic plankton multi-object tracking benchmark toolkit"
)]
struct Cli {
    /// Worker threads for sequence-level parallelism; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TrackerArg {
    Sort,
    Byte,
    Dsft,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DetectorArg {
    Oracle,
    Blob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl Switch {
    fn is_on(self) -> bool {
        self == Switch::On
    }
}

#[derive(Debug, Clone, clap::Args)]
struct DetectorFlags {
    /// Detection source: oracle corrupts ground truth, blob runs
    /// background subtraction.
    #[arg(long, value_enum, default_value_t = DetectorArg::Oracle)]
    detector: DetectorArg,
    /// Oracle: probability a ground-truth box is dropped.
    #[arg(long)]
    p_fn: Option<f64>,
    /// Oracle: mean spurious boxes per frame.
    #[arg(long)]
    p_fp: Option<f64>,
    /// Oracle: Gaussian corner jitter in pixels.
    #[arg(long)]
    jitter_sigma: Option<f64>,
    /// Seed for detector noise.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic benchmark dataset tree and its manifest.
    Generate {
        /// Scenario config as JSON; defaults cover the full benchmark.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output dataset root.
        #[arg(long)]
        out: PathBuf,
        /// Override the master seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Override sequences per background from the config.
        #[arg(long)]
        sequences_per_background: Option<u32>,
    },
    /// Run a tracker over every sequence in a dataset.
    Track {
        /// Dataset root (contains train/ and test/ splits or sequences).
        #[arg(long)]
        dataset: PathBuf,
        /// Output directory for MOT result files.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = TrackerArg::Dsft)]
        tracker: TrackerArg,
        #[command(flatten)]
        detector: DetectorFlags,
        /// Deviation correction of the feature pyramids (dsft only).
        #[arg(long, value_enum, default_value_t = Switch::On)]
        dcm: Switch,
        /// Multi-scale similarity fusion (dsft only); off uses the deep
        /// scale alone.
        #[arg(long, value_enum, default_value_t = Switch::On)]
        mfsf: Switch,
    },
    /// Score tracking results against dataset ground truth.
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        /// Directory holding one <sequence>.txt result file per sequence.
        #[arg(long)]
        results: PathBuf,
        /// Where to write report.json and report.txt; omit to print only.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the four-scheme module ablation and emit a comparison table.
    Ablate {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        detector: DetectorFlags,
    },
    /// Draw tracking results onto a sequence's frames.
    RenderOverlay {
        /// Sequence directory (img1/ inside).
        #[arg(long)]
        sequence: PathBuf,
        /// MOT result file to draw.
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Generate {
            config,
            out,
            seed,
            sequences_per_background,
        } => commands::cmd_generate(config.as_deref(), &out, seed, sequences_per_background),
        Command::Track {
            dataset,
            out,
            tracker,
            detector,
            dcm,
            mfsf,
        } => commands::cmd_track(&dataset, &out, tracker, &detector, dcm.is_on(), mfsf.is_on()),
        Command::Evaluate {
            dataset,
            results,
            out,
        } => commands::cmd_evaluate(&dataset, &results, out.as_deref()),
        Command::Ablate {
            dataset,
            out,
            detector,
        } => commands::cmd_ablate(&dataset, &out, &detector),
        Command::RenderOverlay {
            sequence,
            results,
            out,
        } => commands::cmd_render_overlay(&sequence, &results, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
