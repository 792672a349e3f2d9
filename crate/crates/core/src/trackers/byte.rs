//! Two-stage score-split tracking step: high-confidence detections
//! associate first against all tracks, low-confidence leftovers then rescue
//! still-unmatched confirmed tracks. Only high-confidence detections open
//! new tracks.

use crate::geom::Detection;
use crate::trackers::track::{associate_by_iou, TrackOutput, TrackStatus, TrackerState};

pub fn byte_step(state: &mut TrackerState, detections: &[Detection]) -> Vec<TrackOutput> {
    let p = state.params;
    let high: Vec<&Detection> = detections.iter().filter(|d| d.score >= p.tau_high).collect();
    let low: Vec<&Detection> = detections
        .iter()
        .filter(|d| d.score >= p.tau_low && d.score < p.tau_high)
        .collect();

    let predicted: Vec<_> = state.tracks.iter_mut().map(|t| t.kstate.predict()).collect();

    let mut outputs = Vec::new();
    let mut matched_tracks = vec![false; state.tracks.len()];

    let stage1 = associate_by_iou(&predicted, &high, p.iou_min);
    for &(ti, di) in &stage1.pairs {
        matched_tracks[ti] = true;
        state.mark_matched(ti, &high[di].box_);
        let t = &state.tracks[ti];
        if t.status == TrackStatus::Confirmed {
            outputs.push(TrackOutput {
                id: t.id,
                box_: t.last_box,
                score: high[di].score,
            });
        }
    }

    // Stage 2: unmatched confirmed tracks get a shot at the low-score pool.
    let rescue_tracks: Vec<usize> = stage1
        .unmatched_rows
        .iter()
        .copied()
        .filter(|&ti| state.tracks[ti].status == TrackStatus::Confirmed)
        .collect();
    let rescue_boxes: Vec<_> = rescue_tracks.iter().map(|&ti| predicted[ti]).collect();
    let stage2 = associate_by_iou(&rescue_boxes, &low, p.iou_min);
    for &(ri, di) in &stage2.pairs {
        let ti = rescue_tracks[ri];
        matched_tracks[ti] = true;
        state.mark_matched(ti, &low[di].box_);
        let t = &state.tracks[ti];
        if t.status == TrackStatus::Confirmed {
            outputs.push(TrackOutput {
                id: t.id,
                box_: t.last_box,
                score: low[di].score,
            });
        }
    }

    for ti in 0..state.tracks.len() {
        if !matched_tracks[ti] {
            state.mark_missed(ti);
        }
    }
    // Low-score leftovers never spawn; high-score leftovers do.
    for &di in &stage1.unmatched_cols {
        state.spawn(&high[di].box_);
    }
    state.prune();
    outputs.sort_by_key(|o| o.id);
    outputs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::BoundingBox;
    use crate::trackers::track::TrackerParams;

    fn det(x: f64, y: f64, score: f64, frame: u32) -> Detection {
        Detection::new(BoundingBox::new(x, y, 12.0, 12.0).unwrap(), score, frame)
    }

    #[test]
    fn low_score_detection_continues_but_never_spawns() {
        let mut st = TrackerState::new(TrackerParams::default());
        byte_step(&mut st, &[det(50.0, 50.0, 0.9, 1)]);
        byte_step(&mut st, &[det(52.0, 50.0, 0.9, 2)]);
        assert_eq!(st.tracks.len(), 1);
        let id = st.tracks[0].id;

        // a dim detection on the track plus a dim one far away
        let outs = byte_step(&mut st, &[det(54.0, 50.0, 0.3, 3), det(400.0, 300.0, 0.3, 3)]);
        assert_eq!(outs.len(), 1, "dim detection rescued the track");
        assert_eq!(outs[0].id, id);
        assert_eq!(st.tracks.len(), 1, "dim detection alone opened no track");
    }

    #[test]
    fn below_tau_low_is_ignored_entirely() {
        let mut st = TrackerState::new(TrackerParams::default());
        byte_step(&mut st, &[det(50.0, 50.0, 0.9, 1)]);
        byte_step(&mut st, &[det(52.0, 50.0, 0.9, 2)]);
        let before_misses = st.tracks[0].misses;
        byte_step(&mut st, &[det(54.0, 50.0, 0.05, 3)]);
        assert_eq!(st.tracks[0].misses, before_misses + 1, "score 0.05 discarded");
    }

    #[test]
    fn tentative_tracks_join_stage_one() {
        let mut st = TrackerState::new(TrackerParams::default());
        byte_step(&mut st, &[det(50.0, 50.0, 0.9, 1)]);
        assert_eq!(st.tracks[0].status, TrackStatus::Tentative);
        let outs = byte_step(&mut st, &[det(52.0, 50.0, 0.9, 2)]);
        assert_eq!(st.tracks.len(), 1, "matched the tentative track, no new spawn");
        assert_eq!(outs.len(), 1, "confirmed on second hit");
    }

    #[test]
    fn tentative_tracks_skip_stage_two() {
        let mut st = TrackerState::new(TrackerParams::default());
        byte_step(&mut st, &[det(50.0, 50.0, 0.9, 1)]);
        // only a low-score detection on the tentative track: not rescued
        byte_step(&mut st, &[det(51.0, 50.0, 0.3, 2)]);
        assert_eq!(st.tracks.len(), 1);
        assert_eq!(st.tracks[0].misses, 1);
        assert_eq!(st.tracks[0].status, TrackStatus::Tentative);
    }

    #[test]
    fn high_score_behaviour_matches_sort_when_no_low_dets() {
        use crate::trackers::sort::sort_step;
        let mut a = TrackerState::new(TrackerParams::default());
        let mut b = TrackerState::new(TrackerParams::default());
        for f in 1..=20 {
            let dets = [
                det(10.0 + 2.0 * f as f64, 10.0, 0.9, f),
                det(300.0 - 3.0 * f as f64, 200.0, 0.8, f),
            ];
            let oa = sort_step(&mut a, &dets);
            let ob = byte_step(&mut b, &dets);
            assert_eq!(oa, ob, "frame {f}");
        }
    }
}
