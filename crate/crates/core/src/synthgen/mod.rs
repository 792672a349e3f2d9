//! Synthetic benchmark generation: backgrounds, sprites, motion,
//! compositing, and the on-disk dataset writer.

pub mod background;
pub mod compose;
pub mod motion;
pub mod sequence;
pub mod sprite;

pub use background::{
    background_label, background_preset, background_presets, render_background,
    BackgroundFamily, BackgroundSpec,
};
pub use compose::composite_frame;
pub use motion::{extent_box, sample_scenario, step_motion, MotionBounds, MotionState};
pub use sequence::{
    generate_benchmark, generate_sequence, generate_sequence_to_dir, generate_sequence_with,
    BenchmarkManifest,
    SequenceEntry,
};
pub use sprite::{make_sprite, rotate_raster, rotated_extent, SpriteAsset, SpriteRaster};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Everything that parameterizes one benchmark generation run. Serialized
/// next to the outputs so every dataset records how it was made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub master_seed: u64,
    pub sequences_per_background: u32,
    /// Frames per sequence, drawn uniformly per sequence.
    pub frame_count_range: (u32, u32),
    /// Actors per sequence, drawn uniformly per sequence.
    pub sprite_count_range: (u32, u32),
    /// Pixels per frame.
    pub speed_range: (f64, f64),
    /// Per-axis uniform jitter half-range, pixels.
    pub jitter_range: (f64, f64),
    /// Radians per frame; negative values spin the other way.
    pub rotation_rate_range: (f64, f64),
    pub frame_size: (u32, u32),
    pub fps: u32,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            master_seed: 1,
            sequences_per_background: 10,
            frame_count_range: (100, 300),
            sprite_count_range: (3, 8),
            speed_range: (0.5, 4.0),
            jitter_range: (0.0, 2.0),
            rotation_rate_range: (-0.15, 0.15),
            frame_size: (640, 480),
            fps: 25,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        fn check_u32(name: &str, (lo, hi): (u32, u32)) -> Result<()> {
            if lo > hi || hi == 0 {
                return Err(Error::Config(format!("{name} range [{lo}, {hi}] invalid")));
            }
            Ok(())
        }
        fn check_f64(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
            if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!("{name} range [{lo}, {hi}] invalid")));
            }
            Ok(())
        }
        check_u32("frame_count", self.frame_count_range)?;
        check_u32("sprite_count", self.sprite_count_range)?;
        check_f64("speed", self.speed_range)?;
        check_f64("jitter", self.jitter_range)?;
        check_f64("rotation_rate", self.rotation_rate_range)?;
        if self.speed_range.0 < 0.0 || self.jitter_range.0 < 0.0 {
            return Err(Error::Config("speed and jitter must be nonnegative".into()));
        }
        if self.sequences_per_background == 0 {
            return Err(Error::Config("sequences_per_background must be >= 1".into()));
        }
        if self.frame_size.0 < 32 || self.frame_size.1 < 32 {
            return Err(Error::FrameTooSmall {
                w: self.frame_size.0,
                h: self.frame_size.1,
                why: "minimum generable frame is 32x32".into(),
            });
        }
        if self.fps == 0 {
            return Err(Error::Config("fps must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        ScenarioConfig::default().validate().unwrap();
    }

    #[test]
    fn inverted_range_rejected() {
        let config = ScenarioConfig {
            frame_count_range: (10, 5),
            ..ScenarioConfig::default()
        };
        assert!(config.validate().is_err());
    }

    #[test]
    fn config_round_trips_and_fills_defaults() {
        let config = ScenarioConfig::default();
        let json = serde_json::to_string_pretty(&config).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, config);
        // partial config inherits defaults for the rest
        let partial: ScenarioConfig =
            serde_json::from_str(r#"{"master_seed": 99, "frame_size": [320, 240]}"#).unwrap();
        assert_eq!(partial.master_seed, 99);
        assert_eq!(partial.frame_size, (320, 240));
        assert_eq!(partial.fps, 25);
        assert_eq!(partial.frame_count_range, (100, 300));
    }
}
