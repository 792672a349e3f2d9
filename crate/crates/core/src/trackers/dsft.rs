//! Tracker driven by deviation-corrected multi-scale feature similarity.
//!
//! Instead of a Kalman prediction, each track looks itself up in the fused
//! similarity window between the previous and current frame pyramids and
//! propagates its box by the predicted offset. Association blends box
//! overlap after propagation with the similarity read at each detection's
//! center, so targets that moved too far for IoU can still be re-claimed on
//! appearance.

use crate::error::{Error, Result};
use crate::features::{FeaturePyramid, STRIDE_DEEP};
use crate::geom::{iou, BoundingBox, Detection};
use crate::similarity::{
    fuse_similarity, predict_offset, scale_similarity, ScaleMap, DEFAULT_RADIUS,
};
use crate::trackers::assignment::{hungarian_assign, CostMatrix};
use crate::trackers::track::{TrackOutput, TrackStatus, TrackerParams, TrackerState};

/// Knobs for the similarity tracker. The two booleans are the ablation
/// switches: `dcm` gates the deviation-correction pass upstream (pyramid
/// preparation), `mfsf` chooses fused three-scale similarity over the deep
/// scale alone.
#[derive(Debug, Clone, Copy)]
pub struct DsftConfig {
    pub params: TrackerParams,
    /// Detections below this score are dropped before association.
    pub score_min: f64,
    /// Weight of the IoU term; the similarity term gets the rest.
    pub alpha: f64,
    /// Search radius in deep-grid cells.
    pub radius: u32,
    /// Background suppression strength for the correction pass.
    pub lambda: f32,
    pub dcm: bool,
    pub mfsf: bool,
}

impl Default for DsftConfig {
    fn default() -> Self {
        DsftConfig {
            params: TrackerParams::default(),
            score_min: 0.4,
            alpha: 0.7,
            radius: DEFAULT_RADIUS,
            lambda: 0.8,
            dcm: true,
            mfsf: true,
        }
    }
}

impl DsftConfig {
    /// Number of per-scale maps summed into the fused similarity.
    pub fn scale_count(&self) -> f64 {
        if self.mfsf {
            3.0
        } else {
            1.0
        }
    }

    /// Admissible-cost gate: the overlap term at the minimum admissible IoU
    /// plus the similarity term with a slack of 0.2 below neutral. The slack
    /// lets moderate appearance support rescue a pair whose propagated box
    /// missed, and vanishes at alpha = 1 where matching must reduce to plain
    /// gated IoU.
    pub fn gate(&self) -> f64 {
        self.alpha * (1.0 - self.params.iou_min) + (1.0 - self.alpha) * 1.2
    }
}

struct TrackView {
    propagated: BoundingBox,
    fused: ScaleMap,
    anchor: (u32, u32),
}

fn track_view(
    cfg: &DsftConfig,
    last_box: &BoundingBox,
    prev: &FeaturePyramid,
    cur: &FeaturePyramid,
) -> Result<TrackView> {
    let (cx, cy) = last_box.center();
    let anchor = prev.deep.cell_of(cx, cy);
    let deep = scale_similarity(&prev.deep, &cur.deep, anchor, cfg.radius)?;
    let fused = if cfg.mfsf {
        let mid = scale_similarity(
            &prev.mid,
            &cur.mid,
            prev.mid.cell_of(cx, cy),
            2 * cfg.radius,
        )?;
        let shallow = scale_similarity(
            &prev.shallow,
            &cur.shallow,
            prev.shallow.cell_of(cx, cy),
            4 * cfg.radius,
        )?;
        fuse_similarity(&deep, &mid, &shallow)?
    } else {
        deep
    };
    let (dx, dy) = predict_offset(&fused);
    let propagated = BoundingBox::new(
        last_box.x + dx as f64,
        last_box.y + dy as f64,
        last_box.w,
        last_box.h,
    )
    .expect("translation keeps the box valid");
    Ok(TrackView {
        propagated,
        fused,
        anchor,
    })
}

/// Fused similarity at a detection center, normalized to [-1, 1], relative
/// to the track's anchor. Centers outside the search window read as the
/// worst case.
fn similarity_at(view: &TrackView, cfg: &DsftConfig, cur: &FeaturePyramid, center: (f64, f64)) -> f64 {
    let cell = cur.deep.cell_of(center.0, center.1);
    let dx = cell.0 as i64 - view.anchor.0 as i64;
    let dy = cell.1 as i64 - view.anchor.1 as i64;
    let r = cfg.radius as i64;
    if dx.abs() > r || dy.abs() > r {
        return -1.0;
    }
    view.fused.at(dx, dy) as f64 / cfg.scale_count()
}

/// Advance the tracker one frame.
///
/// Both pyramids must be present; the caller reuses the current pyramid as
/// "previous" on the first frame of a sequence (zero offsets, no tracks to
/// move yet).
pub fn dsft_step(
    state: &mut TrackerState,
    cfg: &DsftConfig,
    detections: &[Detection],
    prev_pyramid: Option<&FeaturePyramid>,
    cur_pyramid: Option<&FeaturePyramid>,
) -> Result<Vec<TrackOutput>> {
    let prev = prev_pyramid.ok_or(Error::MissingPyramid("previous"))?;
    let cur = cur_pyramid.ok_or(Error::MissingPyramid("current"))?;

    let dets: Vec<&Detection> = detections
        .iter()
        .filter(|d| d.score >= cfg.score_min)
        .collect();

    let views: Vec<TrackView> = state
        .tracks
        .iter()
        .map(|t| track_view(cfg, &t.last_box, prev, cur))
        .collect::<Result<_>>()?;

    let last_centers: Vec<(f64, f64)> = state.tracks.iter().map(|t| t.last_box.center()).collect();
    let costs = CostMatrix::from_fn(state.tracks.len(), dets.len(), |ti, di| {
        let view = &views[ti];
        let det = dets[di];
        let overlap = iou(&view.propagated, &det.box_);
        if overlap < cfg.params.iou_min {
            // a low-overlap match leans on appearance alone, and debris can
            // mimic a target's appearance; only a detection reachable by real
            // motion from the last committed position may use that lane
            let bound = 1.5 * STRIDE_DEEP as f64;
            let (cx, cy) = det.box_.center();
            let (lx, ly) = last_centers[ti];
            if (cx - lx).abs() > bound || (cy - ly).abs() > bound {
                return cfg.gate() + 1.0;
            }
        }
        let sim = similarity_at(view, cfg, cur, det.box_.center());
        cfg.alpha * (1.0 - overlap) + (1.0 - cfg.alpha) * (1.0 - sim)
    });
    let assignment = hungarian_assign(&costs, cfg.gate());

    let mut outputs = Vec::new();
    for &(ti, di) in &assignment.pairs {
        state.mark_matched(ti, &dets[di].box_);
        let t = &state.tracks[ti];
        if t.status == TrackStatus::Confirmed {
            outputs.push(TrackOutput {
                id: t.id,
                box_: dets[di].box_,
                score: dets[di].score,
            });
        }
    }
    for &ti in &assignment.unmatched_rows {
        state.mark_missed(ti);
        // coast along the predicted offset so the anchor follows the target
        // through short occlusions; a jump past one deep cell per axis is
        // window noise, not motion, and the track holds position instead
        let last = state.tracks[ti].last_box;
        let view = &views[ti];
        let (dx, dy) = (view.propagated.x - last.x, view.propagated.y - last.y);
        if dx.abs() <= STRIDE_DEEP as f64 && dy.abs() <= STRIDE_DEEP as f64 {
            state.tracks[ti].last_box = view.propagated;
        }
    }
    for &di in &assignment.unmatched_cols {
        state.spawn(&dets[di].box_);
    }
    state.prune();
    outputs.sort_by_key(|o| o.id);
    Ok(outputs)
}
