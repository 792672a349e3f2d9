//! IDF1: identity-level precision/recall under the best global one-to-one
//! pairing of ground-truth and predicted identities.

use std::collections::BTreeMap;

use crate::geom::iou;
use crate::motio::{by_frame, MotRecord};
use crate::trackers::assignment::{solve_assignment, CostMatrix};

/// Identity-level tallies for one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityCounts {
    /// Frames (summed over paired identities) where gt and pred co-occur
    /// with IoU >= 0.5, under the co-occurrence-maximizing pairing.
    pub idtp: u64,
    pub gt_boxes: u64,
    pub pred_boxes: u64,
}

impl IdentityCounts {
    /// IDF1 = 2·IDTP / (2·IDTP + IDFP + IDFN). The unmatched box counts are
    /// IDFP = pred_boxes − IDTP and IDFN = gt_boxes − IDTP, so the ratio
    /// reduces to 2·IDTP / (gt_boxes + pred_boxes). Both-empty scores 1.
    pub fn idf1(&self) -> f64 {
        let denom = self.gt_boxes + self.pred_boxes;
        if denom == 0 {
            return 1.0;
        }
        2.0 * self.idtp as f64 / denom as f64
    }
}

/// Count per-identity-pair co-occurrence and solve for the pairing that
/// maximizes total IDTP.
pub fn identity_counts(gt: &[MotRecord], pred: &[MotRecord]) -> IdentityCounts {
    let gt_ids: BTreeMap<u32, usize> = gt
        .iter()
        .map(|r| r.id)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id, i))
        .collect();
    let pred_ids: BTreeMap<u32, usize> = pred
        .iter()
        .map(|r| r.id)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id, i))
        .collect();

    let mut cooc = vec![0u64; gt_ids.len() * pred_ids.len()];
    let pred_frames = by_frame(pred);
    for (frame, gt_recs) in by_frame(gt) {
        let Some(pred_recs) = pred_frames.get(&frame) else { continue };
        for g in &gt_recs {
            for p in pred_recs {
                if iou(&g.box_, &p.box_) >= super::clearmot::IOU_THRESHOLD {
                    cooc[gt_ids[&g.id] * pred_ids.len() + pred_ids[&p.id]] += 1;
                }
            }
        }
    }

    let idtp = if gt_ids.is_empty() || pred_ids.is_empty() {
        0
    } else {
        // Maximize total co-occurrence by minimizing its negation; every
        // extra pair contributes >= 0, so matching the smaller side fully
        // loses nothing.
        let costs = CostMatrix::from_fn(gt_ids.len(), pred_ids.len(), |r, c| {
            -(cooc[r * pred_ids.len() + c] as f64)
        });
        solve_assignment(&costs)
            .into_iter()
            .map(|(r, c)| cooc[r * pred_ids.len() + c])
            .sum()
    };
    IdentityCounts {
        idtp,
        gt_boxes: gt.len() as u64,
        pred_boxes: pred.len() as u64,
    }
}

pub fn compute_idf1(gt: &[MotRecord], pred: &[MotRecord]) -> f64 {
    identity_counts(gt, pred).idf1()
}
