//! Subcommand implementations. Every command validates its inputs before
//! writing anything and records its fully-resolved configuration next to
//! its outputs.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use mpt_core::metrics::{evaluate_dataset, find_sequences, format_report_table, EvalReport};
use mpt_core::motio::save_mot_file;
use mpt_core::synthgen::{generate_benchmark, ScenarioConfig};
use mpt_core::trackers::{
    track_sequence, DetectorConfig, DetectorKind, RunOptions, SequenceRun, TrackerKind,
};

use crate::{DetectorArg, DetectorFlags, TrackerArg};

/// Verbose progress lines go to stderr when MPT_LOG is set non-empty.
pub fn log_enabled() -> bool {
    std::env::var("MPT_LOG").map(|v| !v.is_empty() && v != "0").unwrap_or(false)
}

macro_rules! log {
    ($($arg:tt)*) => {
        if crate::commands::log_enabled() {
            eprintln!($($arg)*);
        }
    };
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn cmd_generate(
    config_path: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
    sequences_per_background: Option<u32>,
) -> Result<()> {
    let mut config: ScenarioConfig = match config_path {
        Some(p) => {
            let text =
                fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(s) = seed {
        config.master_seed = s;
    }
    if let Some(n) = sequences_per_background {
        config.sequences_per_background = n;
    }
    config.validate()?;

    let started = Instant::now();
    let manifest = generate_benchmark(&config, out)?;
    println!(
        "generated {} sequences under {} in {:.1}s",
        manifest.sequences.len(),
        out.display(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

fn detector_config(flags: &DetectorFlags) -> DetectorConfig {
    // frame dims are patched per sequence by the driver
    let mut cfg = match flags.detector {
        DetectorArg::Oracle => DetectorConfig::oracle_default(0, 0),
        DetectorArg::Blob => DetectorConfig::blob_default(0, 0),
    };
    if let Some(v) = flags.p_fn {
        cfg.p_fn = v;
    }
    if let Some(v) = flags.p_fp {
        cfg.p_fp = v;
    }
    if let Some(v) = flags.jitter_sigma {
        cfg.jitter_sigma = v;
    }
    cfg
}

fn detector_json(flags: &DetectorFlags, cfg: &DetectorConfig) -> serde_json::Value {
    serde_json::json!({
        "kind": match cfg.kind { DetectorKind::OracleNoise => "oracle", DetectorKind::Blob => "blob" },
        "p_fn": cfg.p_fn,
        "p_fp": cfg.p_fp,
        "jitter_sigma": cfg.jitter_sigma,
        "diff_threshold": cfg.diff_threshold,
        "min_area": cfg.min_area,
        "seed": flags.seed,
    })
}

/// Track every sequence under the dataset with one options set, writing
/// `<out>/<name>.txt` per sequence. Returns the per-sequence runs sorted
/// by name.
fn track_all(dataset: &Path, out: &Path, opts: &RunOptions) -> Result<Vec<SequenceRun>> {
    let seq_dirs = find_sequences(dataset)?;
    if seq_dirs.is_empty() {
        bail!("no sequences (directories with gt/gt.txt) under {}", dataset.display());
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut runs: Vec<SequenceRun> = seq_dirs
        .par_iter()
        .map(|dir| {
            let run = track_sequence(dir, opts)?;
            save_mot_file(&out.join(format!("{}.txt", run.name)), &run.records)?;
            log!(
                "tracked {} ({} frames) in {:.2}s",
                run.name,
                run.frames,
                run.wall_time.as_secs_f64()
            );
            Ok(run)
        })
        .collect::<mpt_core::error::Result<_>>()?;
    runs.sort_by(|a, b| a.name.cmp(&b.name));

    let timings: String = runs
        .iter()
        .map(|r| format!("{} {:.3}\n", r.name, r.wall_time.as_secs_f64()))
        .collect();
    write_text(&out.join("timings.txt"), &timings)?;
    Ok(runs)
}

pub fn cmd_track(
    dataset: &Path,
    out: &Path,
    tracker: TrackerArg,
    flags: &DetectorFlags,
    dcm: bool,
    mfsf: bool,
) -> Result<()> {
    let kind = match tracker {
        TrackerArg::Sort => TrackerKind::Sort,
        TrackerArg::Byte => TrackerKind::Byte,
        TrackerArg::Dsft => TrackerKind::Dsft,
    };
    let mut opts = RunOptions::new(kind, detector_config(flags));
    opts.detector_seed = flags.seed;
    opts.dsft.dcm = dcm;
    opts.dsft.mfsf = mfsf;

    let started = Instant::now();
    let runs = track_all(dataset, out, &opts)?;

    let resolved = serde_json::json!({
        "command": "track",
        "dataset": dataset.display().to_string(),
        "tracker": kind.name(),
        "detector": detector_json(flags, &opts.detector),
        "dsft": { "dcm": dcm, "mfsf": mfsf, "alpha": opts.dsft.alpha,
                  "score_min": opts.dsft.score_min, "radius": opts.dsft.radius,
                  "lambda": opts.dsft.lambda },
    });
    write_text(
        &out.join("run-config.json"),
        &format!("{}\n", serde_json::to_string_pretty(&resolved)?),
    )?;
    println!(
        "tracked {} sequences with {} in {:.1}s",
        runs.len(),
        kind.name(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

pub fn cmd_evaluate(dataset: &Path, results: &Path, out: Option<&Path>) -> Result<()> {
    let report = evaluate_dataset(dataset, results)?;
    let table = format_report_table(&report);
    print!("{table}");
    if let Some(out) = out {
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        write_text(
            &out.join("report.json"),
            &format!("{}\n", serde_json::to_string_pretty(&report)?),
        )?;
        write_text(&out.join("report.txt"), &table)?;
        let resolved = serde_json::json!({
            "command": "evaluate",
            "dataset": dataset.display().to_string(),
            "results": results.display().to_string(),
        });
        write_text(
            &out.join("run-config.json"),
            &format!("{}\n", serde_json::to_string_pretty(&resolved)?),
        )?;
    }
    Ok(())
}

pub struct Scheme {
    label: &'static str,
    dcm: bool,
    mfsf: bool,
}

const SCHEMES: [Scheme; 4] = [
    Scheme { label: "1", dcm: false, mfsf: false },
    Scheme { label: "2", dcm: true, mfsf: false },
    Scheme { label: "3", dcm: false, mfsf: true },
    Scheme { label: "4", dcm: true, mfsf: true },
];

fn onoff(v: bool) -> &'static str {
    if v {
        "on"
    } else {
        "off"
    }
}

/// Table-3-shaped ablation: the DSFT tracker under the four module schemes
/// with identical detections, one row per scheme.
pub fn format_ablation_table(rows: &[(&Scheme, &EvalReport)]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<8}{:>6}{:>6}{:>8}{:>8}{:>8}{:>8}{:>8}\n",
        "Scheme", "DCM", "MFSF", "MOTA", "IDF1", "IDs", "FP", "FN"
    ));
    for (scheme, report) in rows {
        out.push_str(&format!(
            "{:<8}{:>6}{:>6}{:>8}{:>8}{:>8}{:>8}{:>8}\n",
            scheme.label,
            onoff(scheme.dcm),
            onoff(scheme.mfsf),
            mpt_core::metrics::format_mota_cell(report.mota),
            format!("{:.1}", report.idf1 * 100.0),
            report.idsw,
            report.fp,
            report.false_neg,
        ));
    }
    out
}

pub fn cmd_ablate(dataset: &Path, out: &Path, flags: &DetectorFlags) -> Result<()> {
    let started = Instant::now();
    let mut reports = Vec::new();
    for scheme in &SCHEMES {
        let mut opts = RunOptions::new(TrackerKind::Dsft, detector_config(flags));
        opts.detector_seed = flags.seed;
        opts.dsft.dcm = scheme.dcm;
        opts.dsft.mfsf = scheme.mfsf;
        let scheme_out = out.join(format!("scheme-{}", scheme.label));
        track_all(dataset, &scheme_out, &opts)?;
        let report = evaluate_dataset(dataset, &scheme_out)?;
        log!(
            "scheme {} (dcm {}, mfsf {}): mota {:.3} idf1 {:.3}",
            scheme.label,
            onoff(scheme.dcm),
            onoff(scheme.mfsf),
            report.mota,
            report.idf1
        );
        reports.push(report);
    }

    let rows: Vec<(&Scheme, &EvalReport)> = SCHEMES.iter().zip(reports.iter()).collect();
    let table = format_ablation_table(&rows);
    print!("{table}");
    write_text(&out.join("ablation.txt"), &table)?;
    let json: Vec<serde_json::Value> = rows
        .iter()
        .map(|(scheme, report)| {
            serde_json::json!({
                "scheme": scheme.label,
                "dcm": scheme.dcm,
                "mfsf": scheme.mfsf,
                "mota": report.mota,
                "idf1": report.idf1,
                "ids": report.idsw,
                "fp": report.fp,
                "fn": report.false_neg,
            })
        })
        .collect();
    write_text(
        &out.join("ablation.json"),
        &format!("{}\n", serde_json::to_string_pretty(&json)?),
    )?;
    let resolved = serde_json::json!({
        "command": "ablate",
        "dataset": dataset.display().to_string(),
        "tracker": "dsft",
        "detector": detector_json(flags, &detector_config(flags)),
    });
    write_text(
        &out.join("run-config.json"),
        &format!("{}\n", serde_json::to_string_pretty(&resolved)?),
    )?;
    println!("ablation finished in {:.1}s", started.elapsed().as_secs_f64());
    Ok(())
}

pub fn cmd_render_overlay(sequence: &Path, results: &Path, out: &Path) -> Result<()> {
    crate::overlay::render_overlay(sequence, results, out)?;
    Ok(())
}
