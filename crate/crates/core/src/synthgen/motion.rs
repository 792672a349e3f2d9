//! Actor kinematics: uniform scenario sampling and the per-frame motion
//! step with jitter, rotation, and edge reflection.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geom::BoundingBox;
use crate::rng::StreamRng;
use crate::synthgen::sprite::{make_sprite, rotated_extent, SpriteAsset, SPECIES_COUNT};
use crate::synthgen::ScenarioConfig;

/// Sprite diameters are drawn log-uniform from this range, which skews the
/// population small while keeping occasional large bodies.
pub const DIAMETER_RANGE: (f64, f64) = (8.0, 120.0);

/// Kinematic state of one actor. `position` is the sprite center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionState {
    pub position: (f64, f64),
    /// Pixels per frame.
    pub velocity: (f64, f64),
    /// Radians.
    pub angle: f64,
    /// Radians per frame.
    pub angular_velocity: f64,
    /// Per-axis uniform jitter half-range in pixels.
    pub jitter_amplitude: f64,
}

/// Frame extent plus the actor's rotation-safe half extent, used by the
/// reflecting boundary.
#[derive(Debug, Clone, Copy)]
pub struct MotionBounds {
    pub width: f64,
    pub height: f64,
    /// Circumradius of the sprite raster plus the half pixel the rotated
    /// extent's ceil can add: no rotation can poke past it.
    pub half_extent: f64,
}

impl MotionBounds {
    pub fn for_sprite(frame_size: (u32, u32), sprite: &SpriteAsset) -> Self {
        let w = sprite.raster.width as f64;
        let h = sprite.raster.height as f64;
        MotionBounds {
            width: frame_size.0 as f64,
            height: frame_size.1 as f64,
            half_extent: (w * w + h * h).sqrt() / 2.0 + 0.5,
        }
    }
}

fn reflect(pos: f64, vel: f64, lo: f64, hi: f64) -> (f64, f64) {
    if lo >= hi {
        // sprite as large as the axis: pin to center, kill the motion
        return ((lo + hi) / 2.0, -vel);
    }
    let (mut p, mut v) = (pos, vel);
    if p < lo {
        p = lo + (lo - p);
        v = -v;
    } else if p > hi {
        p = hi - (p - hi);
        v = -v;
    }
    (p.clamp(lo, hi), v)
}

/// Advance one frame: translate by velocity plus fresh per-axis jitter,
/// spin by the angular velocity, and reflect off frame edges keeping the
/// whole sprite inside.
pub fn step_motion(state: &MotionState, rng: &mut StreamRng, bounds: &MotionBounds) -> MotionState {
    let amp = state.jitter_amplitude;
    let jx = if amp > 0.0 { rng.random_range(-amp..amp) } else { 0.0 };
    let jy = if amp > 0.0 { rng.random_range(-amp..amp) } else { 0.0 };
    let (x, vx) = reflect(
        state.position.0 + state.velocity.0 + jx,
        state.velocity.0,
        bounds.half_extent,
        bounds.width - bounds.half_extent,
    );
    let (y, vy) = reflect(
        state.position.1 + state.velocity.1 + jy,
        state.velocity.1,
        bounds.half_extent,
        bounds.height - bounds.half_extent,
    );
    MotionState {
        position: (x, y),
        velocity: (vx, vy),
        angle: state.angle + state.angular_velocity,
        angular_velocity: state.angular_velocity,
        jitter_amplitude: amp,
    }
}

/// Outer box of the rotated raster centered at the actor position.
pub fn extent_box(sprite: &SpriteAsset, state: &MotionState) -> BoundingBox {
    let (w, h) = rotated_extent(sprite.raster.width, sprite.raster.height, state.angle);
    BoundingBox::new(
        state.position.0 - w as f64 / 2.0,
        state.position.1 - h as f64 / 2.0,
        w as f64,
        h as f64,
    )
    .expect("positive extent")
}

fn sample_range(rng: &mut StreamRng, range: (f64, f64)) -> f64 {
    if range.1 > range.0 {
        rng.random_range(range.0..range.1)
    } else {
        range.0
    }
}

/// Draw a full cast for one sequence: uniformly sampled species, log-uniform
/// sizes, uniform speeds/jitter/rotation rates, and initial placements fully
/// inside the frame with pairwise extent-box IoU capped at 0.9.
pub fn sample_scenario(
    config: &ScenarioConfig,
    _background_id: u32,
    rng: &mut StreamRng,
) -> Result<Vec<(SpriteAsset, MotionState)>> {
    let (w, h) = config.frame_size;
    let count = if config.sprite_count_range.1 > config.sprite_count_range.0 {
        rng.random_range(config.sprite_count_range.0..=config.sprite_count_range.1)
    } else {
        config.sprite_count_range.0
    };
    let mut actors: Vec<(SpriteAsset, MotionState)> = Vec::with_capacity(count as usize);
    let mut placed: Vec<BoundingBox> = Vec::new();
    let mut attempts_left = 100 * count.max(1);
    let placement_error = || Error::Placement {
        count: count as usize,
        w,
        h,
    };

    for _ in 0..count {
        let species = rng.random_range(1..=SPECIES_COUNT);
        let diameter =
            (rng.random_range(DIAMETER_RANGE.0.ln()..DIAMETER_RANGE.1.ln())).exp();
        let sprite = make_sprite(species, diameter, rng);
        let speed = sample_range(rng, config.speed_range);
        let heading = rng.random_range(0.0..std::f64::consts::TAU);
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        let angular_velocity = sample_range(rng, config.rotation_rate_range);
        let jitter_amplitude = sample_range(rng, config.jitter_range);

        let bounds = MotionBounds::for_sprite(config.frame_size, &sprite);
        let (lo_x, hi_x) = (bounds.half_extent, bounds.width - bounds.half_extent);
        let (lo_y, hi_y) = (bounds.half_extent, bounds.height - bounds.half_extent);
        if lo_x >= hi_x || lo_y >= hi_y {
            return Err(placement_error());
        }

        let mut state = None;
        while attempts_left > 0 {
            attempts_left -= 1;
            let candidate = MotionState {
                position: (rng.random_range(lo_x..hi_x), rng.random_range(lo_y..hi_y)),
                velocity: (speed * heading.cos(), speed * heading.sin()),
                angle,
                angular_velocity,
                jitter_amplitude,
            };
            let candidate_box = extent_box(&sprite, &candidate);
            if placed.iter().all(|b| crate::geom::iou(b, &candidate_box) <= 0.9) {
                placed.push(candidate_box);
                state = Some(candidate);
                break;
            }
        }
        let state = state.ok_or_else(placement_error)?;
        actors.push((sprite, state));
    }
    Ok(actors)
}
