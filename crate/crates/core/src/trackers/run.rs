//! Per-sequence tracking driver: detector plus tracker over a sequence
//! directory, producing MOT result records.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::features::{correct_deviation, extract_pyramid, normalize_pyramid, predict_residual};
use crate::frame::{median_background, sample_for_background, Frame};
use crate::geom::Detection;
use crate::motio::{load_mot_file, MotRecord, SequenceMeta};
use crate::rng::{rng_from_seed, splitmix64, StreamRng};
use crate::trackers::detect::{blob_detector, oracle_noise_detector, DetectorConfig, DetectorKind};
use crate::trackers::dsft::{dsft_step, DsftConfig};
use crate::trackers::track::TrackerState;
use crate::trackers::{byte_step, sort_step};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackerKind {
    Sort,
    Byte,
    Dsft,
}

impl TrackerKind {
    pub fn parse(name: &str) -> Option<TrackerKind> {
        match name {
            "sort" => Some(TrackerKind::Sort),
            "byte" => Some(TrackerKind::Byte),
            "dsft" => Some(TrackerKind::Dsft),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TrackerKind::Sort => "sort",
            TrackerKind::Byte => "byte",
            TrackerKind::Dsft => "dsft",
        }
    }
}

/// Everything a single tracking run needs beyond the sequence itself.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub tracker: TrackerKind,
    pub detector: DetectorConfig,
    pub dsft: DsftConfig,
    /// Seed for detector noise; folded with the sequence name so parallel
    /// runs stay order-independent.
    pub detector_seed: u64,
}

impl RunOptions {
    pub fn new(tracker: TrackerKind, detector: DetectorConfig) -> Self {
        RunOptions {
            tracker,
            detector,
            dsft: DsftConfig::default(),
            detector_seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SequenceRun {
    pub name: String,
    pub records: Vec<MotRecord>,
    pub frames: u32,
    pub wall_time: Duration,
}

/// Deterministic per-sequence noise stream, independent of run order.
fn sequence_stream(seed: u64, name: &str) -> StreamRng {
    let mut h = splitmix64(seed);
    for b in name.bytes() {
        h = splitmix64(h ^ b as u64);
    }
    rng_from_seed(h)
}

/// Frame paths under img1, ordered by frame number.
pub fn frame_paths(seq_dir: &Path) -> Result<Vec<(u32, PathBuf)>> {
    let img_dir = seq_dir.join("img1");
    let mut out = Vec::new();
    for entry in std::fs::read_dir(&img_dir).map_err(|e| Error::io(&img_dir, e))? {
        let entry = entry.map_err(|e| Error::io(&img_dir, e))?;
        let path = entry.path();
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("");
        if path.extension().and_then(|e| e.to_str()) == Some("png") {
            if let Ok(idx) = stem.parse::<u32>() {
                out.push((idx, path));
            }
        }
    }
    out.sort_by_key(|(idx, _)| *idx);
    Ok(out)
}

fn gt_by_frame(records: &[MotRecord], frame: u32) -> Vec<MotRecord> {
    records.iter().filter(|r| r.frame == frame).cloned().collect()
}

/// Median background over a spread of sampled frames; the model the blob
/// detector subtracts and the deviation correction flattens against.
pub fn background_model(seq_dir: &Path) -> Result<Frame> {
    let paths = frame_paths(seq_dir)?;
    if paths.is_empty() {
        return Err(Error::Config(format!(
            "no frames under {}",
            seq_dir.display()
        )));
    }
    let step = (paths.len() / 24).max(1);
    let frames: Vec<Frame> = paths
        .iter()
        .step_by(step)
        .map(|(_, p)| Frame::load_png(p))
        .collect::<Result<_>>()?;
    let sampled = sample_for_background(&frames, 24);
    median_background(&sampled)
}

/// Run one tracker over one sequence directory and return its MOT records.
/// Detection noise is seeded from the options so reruns are identical.
pub fn track_sequence(seq_dir: &Path, opts: &RunOptions) -> Result<SequenceRun> {
    let start = Instant::now();
    let meta = SequenceMeta::load_seqinfo(&seq_dir.join("seqinfo.ini"))?;
    let paths = frame_paths(seq_dir)?;
    if paths.is_empty() {
        return Err(Error::Config(format!(
            "no frames under {}",
            seq_dir.display()
        )));
    }

    let mut detector = opts.detector.clone();
    detector.frame_width = meta.width;
    detector.frame_height = meta.height;

    let gt = if detector.kind == DetectorKind::OracleNoise {
        load_mot_file(&seq_dir.join("gt").join("gt.txt"))?
    } else {
        Vec::new()
    };
    let needs_background =
        detector.kind == DetectorKind::Blob || (opts.tracker == TrackerKind::Dsft && opts.dsft.dcm);
    let background = if needs_background {
        Some(background_model(seq_dir)?)
    } else {
        None
    };

    let mut rng = sequence_stream(opts.detector_seed, &meta.name);
    let mut state = TrackerState::new(match opts.tracker {
        TrackerKind::Dsft => opts.dsft.params,
        _ => Default::default(),
    });
    let mut prev_pyramid = None;
    let mut records = Vec::new();

    for &(frame_idx, ref path) in &paths {
        let frame = Frame::load_png(path)?;
        let detections: Vec<Detection> = match detector.kind {
            DetectorKind::OracleNoise => {
                let frame_gt = gt_by_frame(&gt, frame_idx);
                oracle_noise_detector(&frame_gt, &mut rng, &detector)?
            }
            DetectorKind::Blob => blob_detector(
                &frame,
                background.as_ref().expect("model prepared above"),
                &detector,
            )?,
        };

        let outputs = match opts.tracker {
            TrackerKind::Sort => sort_step(&mut state, &detections),
            TrackerKind::Byte => byte_step(&mut state, &detections),
            TrackerKind::Dsft => {
                let raw = extract_pyramid(&frame)?;
                let pyramid = if opts.dsft.dcm {
                    let residual = predict_residual(
                        &frame,
                        &raw,
                        background.as_ref().expect("model prepared above"),
                        opts.dsft.lambda,
                    )?;
                    correct_deviation(&raw, &residual)?
                } else {
                    normalize_pyramid(&raw)
                };
                let outs = dsft_step(
                    &mut state,
                    &opts.dsft,
                    &detections,
                    Some(prev_pyramid.as_ref().unwrap_or(&pyramid)),
                    Some(&pyramid),
                )?;
                prev_pyramid = Some(pyramid);
                outs
            }
        };
        for o in outputs {
            records.push(MotRecord {
                frame: frame_idx,
                id: o.id,
                box_: o.box_,
                conf: o.score,
                class_id: 0,
                visibility: 1.0,
            });
        }
    }

    Ok(SequenceRun {
        name: meta.name,
        records,
        frames: paths.len() as u32,
        wall_time: start.elapsed(),
    })
}
