//! Synthetic plankton multi-object tracking benchmark toolkit.
//!
//! The crate has three halves that share a small geometry/IO core:
//!
//! - [`synthgen`] renders deterministic benchmark datasets: tinted backgrounds
//!   with suspended impurities, procedurally generated plankton sprites that
//!   drift, jitter and rotate, and MOTChallenge-style ground truth.
//! - [`trackers`] runs online trackers over detections: a Kalman+Hungarian
//!   baseline, a two-stage high/low confidence variant, and a tracker built on
//!   deviation-corrected multi-scale feature similarity ([`features`],
//!   [`similarity`]).
//! - [`metrics`] scores tracker output with CLEAR-MOT (MOTA, IDF1, FP, FN,
//!   identity switches).
//!
//! Everything is deterministic: a master seed fully determines every generated
//! byte, and the same detections always produce the same tracks.

pub mod error;
pub mod features;
pub mod frame;
pub mod geom;
pub mod metrics;
pub mod motio;
pub mod rng;
pub mod similarity;
pub mod synthgen;
pub mod trackers;

pub use error::{Error, Result};
pub use frame::Frame;
pub use geom::BoundingBox;
pub use motio::{MotRecord, SequenceMeta};
