//! Detection sources feeding the trackers: a noisy oracle that corrupts
//! ground truth, and a background-subtraction blob detector.

use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::geom::{BoundingBox, Detection};
use crate::motio::MotRecord;
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorKind {
    OracleNoise,
    Blob,
}

/// Shared detector parameters. Oracle fields and blob fields coexist; the
/// `kind` decides which set is read.
#[derive(Debug, Clone)]
pub struct DetectorConfig {
    pub kind: DetectorKind,
    /// Probability a ground-truth box is dropped.
    pub p_fn: f64,
    /// Mean spurious boxes per frame (Poisson).
    pub p_fp: f64,
    /// Gaussian corner jitter in pixels.
    pub jitter_sigma: f64,
    /// Kept-box scores drawn uniform from this band (lo == hi pins the value).
    pub kept_score: (f64, f64),
    /// Spurious-box scores drawn uniform from this band.
    pub spurious_score: (f64, f64),
    /// Spurious-box side lengths drawn uniform from this band.
    pub spurious_side: (f64, f64),
    pub frame_width: u32,
    pub frame_height: u32,
    /// Blob: minimum |luma difference| on the 0..255 scale.
    pub diff_threshold: f64,
    /// Blob: components smaller than this many pixels are discarded.
    pub min_area: u32,
    /// Blob: mean difference mapped to score 1.0 at this value.
    pub score_scale: f64,
}

impl DetectorConfig {
    /// Moderately noisy oracle: 10% misses, 0.5 spurious boxes per frame,
    /// 1 px corner jitter, kept scores U(0.7, 1.0), spurious U(0.05, 0.45).
    pub fn oracle_default(frame_width: u32, frame_height: u32) -> Self {
        DetectorConfig {
            kind: DetectorKind::OracleNoise,
            p_fn: 0.1,
            p_fp: 0.5,
            jitter_sigma: 1.0,
            kept_score: (0.7, 1.0),
            spurious_score: (0.05, 0.45),
            spurious_side: (8.0, 60.0),
            frame_width,
            frame_height,
            diff_threshold: 12.0,
            min_area: 12,
            score_scale: 64.0,
        }
    }

    /// Oracle that reproduces ground truth exactly with score 1.
    pub fn noiseless(frame_width: u32, frame_height: u32) -> Self {
        DetectorConfig {
            p_fn: 0.0,
            p_fp: 0.0,
            jitter_sigma: 0.0,
            kept_score: (1.0, 1.0),
            ..Self::oracle_default(frame_width, frame_height)
        }
    }

    pub fn blob_default(frame_width: u32, frame_height: u32) -> Self {
        DetectorConfig {
            kind: DetectorKind::Blob,
            ..Self::oracle_default(frame_width, frame_height)
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_fn) {
            return Err(Error::Config(format!("p_fn = {} outside [0, 1]", self.p_fn)));
        }
        if self.p_fp < 0.0 {
            return Err(Error::Config(format!("p_fp = {} negative", self.p_fp)));
        }
        if self.jitter_sigma < 0.0 {
            return Err(Error::Config("negative jitter_sigma".into()));
        }
        Ok(())
    }
}

fn sample_band(rng: &mut StreamRng, band: (f64, f64)) -> f64 {
    if band.0 >= band.1 {
        band.0
    } else {
        rng.random_range(band.0..band.1)
    }
}

/// Corrupt one frame's ground truth into detections: drop boxes with
/// probability p_fn, jitter surviving corners, then add Poisson(p_fp)
/// spurious boxes uniform over the frame.
pub fn oracle_noise_detector(
    gt_frame_records: &[MotRecord],
    rng: &mut StreamRng,
    cfg: &DetectorConfig,
) -> Result<Vec<Detection>> {
    cfg.validate()?;
    let frame = gt_frame_records.first().map(|r| r.frame).unwrap_or(1);
    debug_assert!(gt_frame_records.iter().all(|r| r.frame == frame));
    let jitter = Normal::new(0.0, cfg.jitter_sigma.max(1e-12)).expect("valid sigma");
    let mut dets = Vec::new();
    for rec in gt_frame_records {
        if rng.random_range(0.0..1.0) < cfg.p_fn {
            continue;
        }
        let b = &rec.box_;
        let (mut x1, mut y1) = (b.x, b.y);
        let (mut x2, mut y2) = (b.right(), b.bottom());
        if cfg.jitter_sigma > 0.0 {
            x1 += jitter.sample(rng);
            y1 += jitter.sample(rng);
            x2 += jitter.sample(rng);
            y2 += jitter.sample(rng);
        }
        let w = (x2 - x1).max(1.0);
        let h = (y2 - y1).max(1.0);
        let box_ = BoundingBox::new(x1, y1, w, h)?;
        dets.push(Detection::new(box_, sample_band(rng, cfg.kept_score), frame));
    }
    if cfg.p_fp > 0.0 {
        let n_spurious = Poisson::new(cfg.p_fp).expect("valid poisson mean").sample(rng) as u64;
        for _ in 0..n_spurious {
            let w = sample_band(rng, cfg.spurious_side).min(cfg.frame_width as f64 - 1.0);
            let h = sample_band(rng, cfg.spurious_side).min(cfg.frame_height as f64 - 1.0);
            let x = rng.random_range(0.0..(cfg.frame_width as f64 - w));
            let y = rng.random_range(0.0..(cfg.frame_height as f64 - h));
            let box_ = BoundingBox::new(x, y, w, h)?;
            dets.push(Detection::new(box_, sample_band(rng, cfg.spurious_score), frame));
        }
    }
    Ok(dets)
}

/// Threshold |frame − background| luma, gather 8-connected components, and
/// box those with enough area. Score is mean difference over the component
/// divided by `score_scale`, clamped to [0, 1].
pub fn blob_detector(
    frame: &Frame,
    background_model: &Frame,
    cfg: &DetectorConfig,
) -> Result<Vec<Detection>> {
    if !frame.same_dims(background_model) {
        return Err(Error::DimMismatch {
            expected: background_model.dims_string(),
            got: frame.dims_string(),
        });
    }
    let (w, h) = (frame.width() as usize, frame.height() as usize);
    let frame_luma = frame.luma();
    let bg_luma = background_model.luma();
    let diff: Vec<f32> = frame_luma
        .iter()
        .zip(&bg_luma)
        .map(|(&f, &b)| (f - b).abs() * 255.0)
        .collect();
    let mask: Vec<bool> = diff.iter().map(|&d| d as f64 >= cfg.diff_threshold).collect();

    let mut seen = vec![false; w * h];
    let mut dets = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    for start in 0..w * h {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let (mut min_x, mut min_y) = (w, h);
        let (mut max_x, mut max_y) = (0usize, 0usize);
        let mut area = 0u32;
        let mut diff_sum = 0.0f64;
        while let Some(idx) = queue.pop_front() {
            let (x, y) = (idx % w, idx / w);
            area += 1;
            diff_sum += diff[idx] as f64;
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let nidx = ny as usize * w + nx as usize;
                    if mask[nidx] && !seen[nidx] {
                        seen[nidx] = true;
                        queue.push_back(nidx);
                    }
                }
            }
        }
        if area < cfg.min_area {
            continue;
        }
        let box_ = BoundingBox::new(
            min_x as f64,
            min_y as f64,
            (max_x - min_x + 1) as f64,
            (max_y - min_y + 1) as f64,
        )?;
        let score = (diff_sum / area as f64 / cfg.score_scale).clamp(0.0, 1.0);
        dets.push(Detection::new(box_, score, frame.index));
    }
    Ok(dets)
}
