//! Detection sources and online trackers.
//!
//! Three trackers share one track lifecycle: a SORT-style Kalman+IoU
//! tracker, a two-stage score-split variant, and the offset-corrected
//! multi-scale similarity tracker. All run strictly online: frame t is
//! decided before frame t+1 is seen.

pub mod assignment;
pub mod byte;
pub mod dsft;
pub mod detect;
pub mod kalman;
pub mod run;
pub mod sort;
pub mod track;

pub use assignment::{hungarian_assign, solve_assignment, Assignment, CostMatrix};
pub use byte::byte_step;
pub use dsft::{dsft_step, DsftConfig};
pub use detect::{blob_detector, oracle_noise_detector, DetectorConfig, DetectorKind};
pub use kalman::KalmanState;
pub use run::{background_model, frame_paths, track_sequence, RunOptions, SequenceRun, TrackerKind};
pub use sort::sort_step;
pub use track::{Track, TrackOutput, TrackStatus, TrackerParams, TrackerState};
