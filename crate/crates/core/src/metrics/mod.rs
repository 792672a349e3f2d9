//! Tracking quality scoring: MOTA and identity metrics per sequence, pooled
//! aggregates per background and overall, plus the report table renderer.

pub mod clearmot;
pub mod idf1;

pub use clearmot::{compute_clearmot, match_frame, mota_from_counts, ClearMot, FrameOutcome};
pub use idf1::{compute_idf1, identity_counts, IdentityCounts};

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motio::{load_mot_file, MotRecord};

/// Scores for one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceScore {
    pub name: String,
    pub mota: f64,
    pub idf1: f64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub false_neg: u64,
    pub idsw: u64,
    pub gt_total: u64,
    pub pred_total: u64,
    pub idtp: u64,
}

impl SequenceScore {
    /// Background label, the part of the name before the sequence number.
    pub fn background(&self) -> &str {
        self.name.split('-').next().unwrap_or(&self.name)
    }
}

/// Whole-dataset report: pooled totals plus the per-sequence breakdown.
///
/// Pooled ratios are recomputed from summed counts, never averaged from
/// per-sequence ratios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mota: f64,
    pub idf1: f64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub false_neg: u64,
    pub idsw: u64,
    pub gt_total: u64,
    pub pred_total: u64,
    pub idtp: u64,
    pub per_sequence: Vec<SequenceScore>,
}

fn pool(scores: &[&SequenceScore]) -> (f64, f64, u64, u64, u64, u64, u64, u64) {
    let fp: u64 = scores.iter().map(|s| s.fp).sum();
    let false_neg: u64 = scores.iter().map(|s| s.false_neg).sum();
    let idsw: u64 = scores.iter().map(|s| s.idsw).sum();
    let gt_total: u64 = scores.iter().map(|s| s.gt_total).sum();
    let pred_total: u64 = scores.iter().map(|s| s.pred_total).sum();
    // Identities never span sequences, so the best global pairing is the
    // union of per-sequence pairings and IDTP sums directly.
    let idtp: u64 = scores.iter().map(|s| s.idtp).sum();
    let mota = mota_from_counts(fp, false_neg, idsw, gt_total);
    let idf1 = IdentityCounts {
        idtp,
        gt_boxes: gt_total,
        pred_boxes: pred_total,
    }
    .idf1();
    (mota, idf1, fp, false_neg, idsw, gt_total, pred_total, idtp)
}

impl EvalReport {
    pub fn from_sequences(mut per_sequence: Vec<SequenceScore>) -> EvalReport {
        per_sequence.sort_by(|a, b| a.name.cmp(&b.name));
        let refs: Vec<&SequenceScore> = per_sequence.iter().collect();
        let (mota, idf1, fp, false_neg, idsw, gt_total, pred_total, idtp) = pool(&refs);
        EvalReport {
            mota,
            idf1,
            fp,
            false_neg,
            idsw,
            gt_total,
            pred_total,
            idtp,
            per_sequence,
        }
    }
}

/// Score a single sequence's predictions against its ground truth.
pub fn score_sequence(name: &str, gt: &[MotRecord], pred: &[MotRecord]) -> SequenceScore {
    let cm = compute_clearmot(gt, pred);
    let ic = identity_counts(gt, pred);
    SequenceScore {
        name: name.to_string(),
        mota: cm.mota,
        idf1: ic.idf1(),
        fp: cm.fp,
        false_neg: cm.false_neg,
        idsw: cm.idsw,
        gt_total: cm.gt_total,
        pred_total: pred.len() as u64,
        idtp: ic.idtp,
    }
}

/// Find sequence directories (those containing `gt/gt.txt`) under a dataset
/// root, looking through one level of split directories if present.
pub fn find_sequences(dataset_root: &Path) -> Result<Vec<PathBuf>> {
    fn is_sequence(dir: &Path) -> bool {
        dir.join("gt").join("gt.txt").is_file()
    }
    let mut seqs = Vec::new();
    if is_sequence(dataset_root) {
        seqs.push(dataset_root.to_path_buf());
    } else {
        let entries = std::fs::read_dir(dataset_root).map_err(|e| Error::io(dataset_root, e))?;
        for entry in entries {
            let path = entry.map_err(|e| Error::io(dataset_root, e))?.path();
            if !path.is_dir() {
                continue;
            }
            if is_sequence(&path) {
                seqs.push(path);
            } else {
                let inner = std::fs::read_dir(&path).map_err(|e| Error::io(&path, e))?;
                for entry in inner {
                    let sub = entry.map_err(|e| Error::io(&path, e))?.path();
                    if sub.is_dir() && is_sequence(&sub) {
                        seqs.push(sub);
                    }
                }
            }
        }
    }
    seqs.sort_by_key(|p| p.file_name().map(|n| n.to_os_string()));
    Ok(seqs)
}

fn sequence_name(dir: &Path) -> String {
    dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Score every sequence under `dataset_root` against `<results_root>/<name>.txt`.
pub fn evaluate_dataset(dataset_root: &Path, results_root: &Path) -> Result<EvalReport> {
    let seq_dirs = find_sequences(dataset_root)?;
    if seq_dirs.is_empty() {
        return Err(Error::Config(format!(
            "no sequences (directories with gt/gt.txt) under {}",
            dataset_root.display()
        )));
    }
    let scores: Vec<SequenceScore> = seq_dirs
        .par_iter()
        .map(|dir| {
            let name = sequence_name(dir);
            let gt = load_mot_file(&dir.join("gt").join("gt.txt"))?;
            let pred = load_mot_file(&results_root.join(format!("{name}.txt")))?;
            Ok(score_sequence(&name, &gt, &pred))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_sequences(scores))
}

/// Render a score as a percentage with one decimal.
fn percent(v: f64) -> String {
    format!("{:.1}", v * 100.0)
}

/// MOTA cell: scores at or below zero render as '-'. The numeric value
/// stays available in the structured report.
pub fn format_mota_cell(mota: f64) -> String {
    if mota <= 0.0 {
        "-".to_string()
    } else {
        percent(mota)
    }
}

fn background_sort_key(label: &str) -> (u8, u32, String) {
    let mut chars = label.chars();
    let family = match chars.next() {
        Some('b') => 0,
        Some('w') => 1,
        _ => 2,
    };
    let num: u32 = chars.as_str().parse().unwrap_or(u32::MAX);
    (family, num, label.to_string())
}

/// Per-background pooled table plus an Average row pooled over everything.
/// Column order: MOTA, IDF1, IDs, FP, FN.
pub fn format_report_table(report: &EvalReport) -> String {
    let mut groups: Vec<(String, Vec<&SequenceScore>)> = Vec::new();
    for s in &report.per_sequence {
        let bg = s.background().to_string();
        match groups.iter_mut().find(|(label, _)| *label == bg) {
            Some((_, v)) => v.push(s),
            None => groups.push((bg, vec![s])),
        }
    }
    groups.sort_by_key(|(label, _)| background_sort_key(label));

    let label_w = groups
        .iter()
        .map(|(l, _)| l.len())
        .chain(["Average".len()].into_iter())
        .max()
        .unwrap_or(7)
        + 2;
    let mut out = String::new();
    out.push_str(&format!(
        "{:<label_w$}{:>8}{:>8}{:>8}{:>8}{:>8}\n",
        "", "MOTA", "IDF1", "IDs", "FP", "FN"
    ));
    let mut row = |label: &str, scores: &[&SequenceScore]| {
        let (mota, idf1, fp, false_neg, idsw, _, _, _) = pool(scores);
        out.push_str(&format!(
            "{:<label_w$}{:>8}{:>8}{:>8}{:>8}{:>8}\n",
            label,
            format_mota_cell(mota),
            percent(idf1),
            idsw,
            fp,
            false_neg
        ));
    };
    for (label, scores) in &groups {
        row(label, scores);
    }
    let all: Vec<&SequenceScore> = report.per_sequence.iter().collect();
    row("Average", &all);
    out
}
