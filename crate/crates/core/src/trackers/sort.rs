//! SORT-style tracking step: Kalman prediction, IoU association, standard
//! lifecycle.

use crate::geom::Detection;
use crate::trackers::track::{associate_by_iou, TrackOutput, TrackStatus, TrackerState};

/// Advance one frame: predict every track, match detections by IoU against
/// the predictions, update matched tracks, age unmatched ones, and open
/// tentative tracks on leftover detections. Returns the confirmed tracks
/// matched this frame.
pub fn sort_step(state: &mut TrackerState, detections: &[Detection]) -> Vec<TrackOutput> {
    let predicted: Vec<_> = state.tracks.iter_mut().map(|t| t.kstate.predict()).collect();
    let det_refs: Vec<&Detection> = detections.iter().collect();
    let assignment = associate_by_iou(&predicted, &det_refs, state.params.iou_min);

    let mut outputs = Vec::new();
    for &(ti, di) in &assignment.pairs {
        state.mark_matched(ti, &detections[di].box_);
        let t = &state.tracks[ti];
        if t.status == TrackStatus::Confirmed {
            outputs.push(TrackOutput {
                id: t.id,
                box_: t.last_box,
                score: detections[di].score,
            });
        }
    }
    for &ti in &assignment.unmatched_rows {
        state.mark_missed(ti);
    }
    for &di in &assignment.unmatched_cols {
        state.spawn(&detections[di].box_);
    }
    state.prune();
    outputs.sort_by_key(|o| o.id);
    outputs
}
