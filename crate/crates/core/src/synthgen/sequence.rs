//! Sequence rendering and the on-disk dataset writer.
//!
//! Each sequence derives four fixed sub-streams from its seed (background,
//! length, scenario, motion), so any sequence can be produced in isolation
//! and the full benchmark is identical no matter how work is scheduled.

use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::motio::{serialize_mot_file, MotRecord, SequenceMeta};
use crate::rng::{derive_sequence_seed, derive_substream, rng_from_seed};
use crate::synthgen::background::{background_label, background_preset, render_background};
use crate::synthgen::compose::composite_frame;
use crate::synthgen::motion::{sample_scenario, step_motion, MotionBounds};
use crate::synthgen::ScenarioConfig;

// Sub-stream labels are part of the output format: changing them changes
// every generated byte.
const STREAM_BACKGROUND: u64 = 1;
const STREAM_LENGTH: u64 = 2;
const STREAM_SCENARIO: u64 = 3;
const STREAM_MOTION: u64 = 4;

pub const BACKGROUND_COUNT: u32 = 14;

/// Render one sequence, handing each finished frame to `on_frame` instead of
/// retaining it. A full-length default sequence is ~250 MB of raw frames, so
/// the writer streams.
pub fn generate_sequence_with<F>(
    config: &ScenarioConfig,
    spec: &crate::synthgen::BackgroundSpec,
    sequence_seed: u64,
    name: &str,
    mut on_frame: F,
) -> Result<(Vec<MotRecord>, SequenceMeta)>
where
    F: FnMut(&Frame) -> Result<()>,
{
    config.validate()?;
    let (width, height) = config.frame_size;

    let mut bg_rng = rng_from_seed(derive_substream(sequence_seed, STREAM_BACKGROUND));
    let background = render_background(spec, width, height, &mut bg_rng);

    let mut len_rng = rng_from_seed(derive_substream(sequence_seed, STREAM_LENGTH));
    let (lo, hi) = config.frame_count_range;
    let frame_count = if hi > lo {
        len_rng.random_range(lo..=hi)
    } else {
        lo
    };

    let mut scen_rng = rng_from_seed(derive_substream(sequence_seed, STREAM_SCENARIO));
    let mut actors = sample_scenario(config, spec.id, &mut scen_rng)?;
    let bounds: Vec<MotionBounds> = actors
        .iter()
        .map(|(sprite, _)| MotionBounds::for_sprite(config.frame_size, sprite))
        .collect();

    let mut motion_rng = rng_from_seed(derive_substream(sequence_seed, STREAM_MOTION));
    let mut records = Vec::new();
    for frame_index in 1..=frame_count {
        if frame_index > 1 {
            for ((_, state), b) in actors.iter_mut().zip(&bounds) {
                *state = step_motion(state, &mut motion_rng, b);
            }
        }
        let (frame, mut frame_records) = composite_frame(&background, &actors, frame_index);
        on_frame(&frame)?;
        records.append(&mut frame_records);
    }

    let meta = SequenceMeta {
        name: name.to_string(),
        fps: config.fps,
        width,
        height,
        length: frame_count,
        background_id: background_label(spec.id),
    };
    Ok((records, meta))
}

/// Render one sequence and keep every frame in memory. Convenient for tests
/// and in-process pipelines; use [`generate_sequence_with`] when writing to
/// disk.
pub fn generate_sequence(
    config: &ScenarioConfig,
    background_id: u32,
    sequence_seed: u64,
) -> Result<(Vec<Frame>, Vec<MotRecord>, SequenceMeta)> {
    let spec = background_preset(background_id)
        .ok_or_else(|| Error::Config(format!("no background preset with id {background_id}")))?;
    let name = background_label(background_id);
    let mut frames = Vec::new();
    let (records, meta) = generate_sequence_with(config, &spec, sequence_seed, &name, |f| {
        frames.push(f.clone());
        Ok(())
    })?;
    Ok((frames, records, meta))
}

/// One sequence's row in the benchmark manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceEntry {
    pub name: String,
    pub split: String,
    pub background_id: u32,
    pub seed: u64,
    pub frames: u32,
    /// Hex digest over all frame PNG bytes in order, then gt.txt, then
    /// seqinfo.ini.
    pub sha256: String,
}

/// Everything needed to audit or reproduce a generated benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkManifest {
    pub config: ScenarioConfig,
    pub sequences: Vec<SequenceEntry>,
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn generate_sequence_to_dir(
    config: &ScenarioConfig,
    background_id: u32,
    seq_idx: u32,
    out_root: &Path,
) -> Result<SequenceEntry> {
    let seed = derive_sequence_seed(config.master_seed, background_id, seq_idx);
    let spec = background_preset(background_id)
        .ok_or_else(|| Error::Config(format!("no background preset with id {background_id}")))?;
    let pad = digits(config.sequences_per_background).max(2);
    let name = format!(
        "{}-{:0pad$}",
        background_label(background_id),
        seq_idx,
        pad = pad as usize
    );
    let split = if seq_idx % 2 == 1 { "train" } else { "test" };

    let seq_dir = out_root.join(split).join(&name);
    let img_dir = seq_dir.join("img1");
    let gt_dir = seq_dir.join("gt");
    fs::create_dir_all(&img_dir).map_err(|e| Error::io(&img_dir, e))?;
    fs::create_dir_all(&gt_dir).map_err(|e| Error::io(&gt_dir, e))?;

    let mut hasher = Sha256::new();
    let (records, meta) = generate_sequence_with(config, &spec, seed, &name, |frame| {
        let bytes = frame.png_bytes()?;
        hasher.update(&bytes);
        write_bytes(&img_dir.join(format!("{:06}.png", frame.index)), &bytes)
    })?;

    let gt_text = serialize_mot_file(&records);
    hasher.update(gt_text.as_bytes());
    write_bytes(&gt_dir.join("gt.txt"), gt_text.as_bytes())?;

    let seqinfo = meta.to_seqinfo();
    hasher.update(seqinfo.as_bytes());
    write_bytes(&seq_dir.join("seqinfo.ini"), seqinfo.as_bytes())?;

    Ok(SequenceEntry {
        name,
        split: split.to_string(),
        background_id,
        seed,
        frames: meta.length,
        sha256: hex_digest(hasher),
    })
}

fn hex_digest(hasher: Sha256) -> String {
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn digits(n: u32) -> u32 {
    let mut n = n;
    let mut d = 1;
    while n >= 10 {
        n /= 10;
        d += 1;
    }
    d
}

/// Generate the full benchmark tree under `out_root` and write
/// `manifest.json` beside the split directories.
///
/// Layout per sequence: `<out_root>/<split>/<name>/{img1/%06d.png,
/// gt/gt.txt, seqinfo.ini}` where odd sequence indices go to train and even
/// to test. Sequences run in parallel on the ambient thread pool; every
/// output byte depends only on the config.
pub fn generate_benchmark(config: &ScenarioConfig, out_root: &Path) -> Result<BenchmarkManifest> {
    config.validate()?;
    let tasks: Vec<(u32, u32)> = (1..=BACKGROUND_COUNT)
        .flat_map(|bg| (1..=config.sequences_per_background).map(move |s| (bg, s)))
        .collect();
    let sequences: Vec<SequenceEntry> = tasks
        .par_iter()
        .map(|&(bg, s)| generate_sequence_to_dir(config, bg, s, out_root))
        .collect::<Result<_>>()?;
    let manifest = BenchmarkManifest {
        config: config.clone(),
        sequences,
    };
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))?;
    write_bytes(&out_root.join("manifest.json"), format!("{json}\n").as_bytes())?;
    Ok(manifest)
}
