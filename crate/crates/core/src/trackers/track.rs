//! Track state and the lifecycle shared by every tracker: tentative birth,
//! confirmation after enough consecutive hits, death after enough
//! consecutive misses. Ids increase strictly and are never reused.

use crate::geom::{BoundingBox, Detection};
use crate::trackers::assignment::{hungarian_assign, Assignment, CostMatrix};
use crate::trackers::kalman::KalmanState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    Tentative,
    Confirmed,
    Dead,
}

#[derive(Debug, Clone)]
pub struct Track {
    pub id: u32,
    pub kstate: KalmanState,
    /// Consecutive matched frames.
    pub hits: u32,
    /// Consecutive missed frames.
    pub misses: u32,
    pub status: TrackStatus,
    /// Box of the most recent match.
    pub last_box: BoundingBox,
}

/// Lifecycle and association thresholds, shared across trackers.
#[derive(Debug, Clone, Copy)]
pub struct TrackerParams {
    /// Consecutive hits required to confirm.
    pub n_init: u32,
    /// Consecutive misses tolerated before death.
    pub max_age: u32,
    /// Minimum IoU for an admissible match.
    pub iou_min: f64,
    /// Score splitting detections into the high and low association stages.
    pub tau_high: f64,
    /// Scores below this are discarded entirely.
    pub tau_low: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        TrackerParams {
            n_init: 2,
            max_age: 10,
            iou_min: 0.3,
            tau_high: 0.5,
            tau_low: 0.1,
        }
    }
}

/// One output row: a confirmed track matched in the current frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOutput {
    pub id: u32,
    pub box_: BoundingBox,
    pub score: f64,
}

/// Mutable tracker state threaded through the per-frame step functions.
#[derive(Debug, Clone)]
pub struct TrackerState {
    pub params: TrackerParams,
    pub tracks: Vec<Track>,
    next_id: u32,
}

impl TrackerState {
    pub fn new(params: TrackerParams) -> Self {
        TrackerState {
            params,
            tracks: Vec::new(),
            next_id: 1,
        }
    }

    /// Start a tentative track on an unmatched detection.
    pub fn spawn(&mut self, box_: &BoundingBox) {
        let status = if self.params.n_init <= 1 {
            TrackStatus::Confirmed
        } else {
            TrackStatus::Tentative
        };
        self.tracks.push(Track {
            id: self.next_id,
            kstate: KalmanState::from_box(box_),
            hits: 1,
            misses: 0,
            status,
            last_box: *box_,
        });
        self.next_id += 1;
    }

    /// Record a match: fold the measurement into the filter and advance the
    /// confirmation counter.
    pub fn mark_matched(&mut self, track_idx: usize, box_: &BoundingBox) {
        let n_init = self.params.n_init;
        let t = &mut self.tracks[track_idx];
        t.kstate.update(box_);
        t.hits += 1;
        t.misses = 0;
        t.last_box = *box_;
        if t.status == TrackStatus::Tentative && t.hits >= n_init {
            t.status = TrackStatus::Confirmed;
        }
    }

    /// Record a miss; the track dies once misses exceed max_age.
    pub fn mark_missed(&mut self, track_idx: usize) {
        let max_age = self.params.max_age;
        let t = &mut self.tracks[track_idx];
        t.misses += 1;
        t.hits = 0;
        if t.misses > max_age {
            t.status = TrackStatus::Dead;
        }
    }

    /// Drop dead tracks. Ids stay retired.
    pub fn prune(&mut self) {
        self.tracks.retain(|t| t.status != TrackStatus::Dead);
    }
}

/// Match a subset of tracks against a subset of detections by IoU between
/// `track_boxes` (already predicted/propagated) and detection boxes.
/// Returns pairs and leftovers as indices into the passed slices.
pub fn associate_by_iou(
    track_boxes: &[BoundingBox],
    detections: &[&Detection],
    iou_min: f64,
) -> Assignment {
    let costs = CostMatrix::from_fn(track_boxes.len(), detections.len(), |r, c| {
        1.0 - crate::geom::iou(&track_boxes[r], &detections[c].box_)
    });
    hungarian_assign(&costs, 1.0 - iou_min)
}
