//! CLEAR-MOT event accounting: per-frame matching with identity
//! continuation, and the MOTA summary built from the event counts.

use std::collections::{BTreeSet, HashMap};

use crate::geom::{iou, BoundingBox};
use crate::motio::{by_frame, MotRecord};
use crate::trackers::assignment::{solve_assignment, CostMatrix};

/// Overlap below this never counts as a hit.
pub const IOU_THRESHOLD: f64 = 0.5;

/// Sentinel cost for sub-threshold pairs. Large enough that the solver
/// trades any number of real matches before accepting one gated pair,
/// which makes minimum cost equivalent to maximum match count first.
const GATED: f64 = 1e9;

/// Events of a single scored frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameOutcome {
    /// Matched (gt id, pred id) pairs.
    pub matches: Vec<(u32, u32)>,
    /// Unmatched predictions.
    pub fp: u64,
    /// Unmatched ground-truth boxes.
    pub false_neg: u64,
    /// Matches whose pred id differs from the gt id's last matched pred id.
    pub idsw: u64,
}

/// Score one frame against the persistent last-match map.
///
/// Pairs from `last_match` still overlapping at IoU >= 0.5 are kept first
/// (gt ids in ascending order; the first wins if two gt ids carry the same
/// pred id). The remainder is matched by minimum-cost assignment on 1 - IoU,
/// sub-threshold pairs excluded. `last_match` survives occlusion gaps, so a
/// switch is counted against the last pred id ever matched, not merely the
/// previous frame's.
pub fn match_frame(
    last_match: &HashMap<u32, u32>,
    gt: &[(u32, BoundingBox)],
    pred: &[(u32, BoundingBox)],
) -> FrameOutcome {
    debug_assert!(gt.windows(2).all(|w| w[0].0 < w[1].0), "gt ids sorted, unique");
    debug_assert!(pred.windows(2).all(|w| w[0].0 < w[1].0));

    let mut matches: Vec<(u32, u32)> = Vec::new();
    let mut gt_free = vec![true; gt.len()];
    let mut pred_free = vec![true; pred.len()];

    for (gi, &(gid, gbox)) in gt.iter().enumerate() {
        let Some(&pid) = last_match.get(&gid) else { continue };
        let Some(pi) = pred.iter().position(|&(p, _)| p == pid) else { continue };
        if pred_free[pi] && iou(&gbox, &pred[pi].1) >= IOU_THRESHOLD {
            gt_free[gi] = false;
            pred_free[pi] = false;
            matches.push((gid, pid));
        }
    }

    let free_gt: Vec<usize> = (0..gt.len()).filter(|&i| gt_free[i]).collect();
    let free_pred: Vec<usize> = (0..pred.len()).filter(|&i| pred_free[i]).collect();
    let costs = CostMatrix::from_fn(free_gt.len(), free_pred.len(), |r, c| {
        let ov = iou(&gt[free_gt[r]].1, &pred[free_pred[c]].1);
        if ov >= IOU_THRESHOLD {
            1.0 - ov
        } else {
            GATED
        }
    });
    for (r, c) in solve_assignment(&costs) {
        if costs.at(r, c) < GATED {
            matches.push((gt[free_gt[r]].0, pred[free_pred[c]].0));
        }
    }
    matches.sort_unstable();

    let idsw = matches
        .iter()
        .filter(|(gid, pid)| last_match.get(gid).is_some_and(|&old| old != *pid))
        .count() as u64;
    FrameOutcome {
        fp: (pred.len() - matches.len()) as u64,
        false_neg: (gt.len() - matches.len()) as u64,
        idsw,
        matches,
    }
}

/// Sequence-level CLEAR-MOT totals.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearMot {
    pub mota: f64,
    pub fp: u64,
    pub false_neg: u64,
    pub idsw: u64,
    /// Total ground-truth boxes over all frames.
    pub gt_total: u64,
}

/// MOTA from raw counts. With no ground truth at all, an error-free result
/// scores 1.0 and anything else -inf.
pub fn mota_from_counts(fp: u64, false_neg: u64, idsw: u64, gt_total: u64) -> f64 {
    if gt_total == 0 {
        return if fp + idsw == 0 { 1.0 } else { f64::NEG_INFINITY };
    }
    1.0 - (fp + false_neg + idsw) as f64 / gt_total as f64
}

/// Run the CLEAR matching over a whole sequence and sum the events.
pub fn compute_clearmot(gt: &[MotRecord], pred: &[MotRecord]) -> ClearMot {
    let gt_frames = by_frame(gt);
    let pred_frames = by_frame(pred);
    let frames: BTreeSet<u32> = gt_frames.keys().chain(pred_frames.keys()).copied().collect();

    let mut last_match: HashMap<u32, u32> = HashMap::new();
    let (mut fp, mut false_neg, mut idsw) = (0u64, 0u64, 0u64);
    for f in frames {
        let gt_boxes: Vec<(u32, BoundingBox)> = gt_frames
            .get(&f)
            .map(|rs| rs.iter().map(|r| (r.id, r.box_)).collect())
            .unwrap_or_default();
        let pred_boxes: Vec<(u32, BoundingBox)> = pred_frames
            .get(&f)
            .map(|rs| rs.iter().map(|r| (r.id, r.box_)).collect())
            .unwrap_or_default();
        let out = match_frame(&last_match, &gt_boxes, &pred_boxes);
        fp += out.fp;
        false_neg += out.false_neg;
        idsw += out.idsw;
        for (g, p) in out.matches {
            last_match.insert(g, p);
        }
    }
    let gt_total = gt.len() as u64;
    ClearMot {
        mota: mota_from_counts(fp, false_neg, idsw, gt_total),
        fp,
        false_neg,
        idsw,
        gt_total,
    }
}
