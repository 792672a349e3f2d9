//! Background presets and rendering: a flat family base color scaled by a
//! brightness gain, speckled with static impurity blobs.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::frame::Frame;
use crate::rng::StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackgroundFamily {
    Blue,
    White,
}

/// One of the 14 shipped background presets (or a user variant).
#[derive(Debug, Clone, Copy)]
pub struct BackgroundSpec {
    /// 1..=7 blue family, 8..=14 white family.
    pub id: u32,
    pub family: BackgroundFamily,
    /// Impurity blobs per megapixel.
    pub impurity_density: f64,
    /// Multiplicative gain on the base color, in (0, 2].
    pub brightness: f64,
    /// Impurity radius range in pixels.
    pub impurity_size_range: (f64, f64),
}

const BLUE_BASE: [f64; 3] = [20.0, 38.0, 92.0];
const WHITE_BASE: [f64; 3] = [235.0, 234.0, 228.0];

/// The 14 presets: 7 blue, 7 white, with impurity density and brightness
/// swept across each family.
pub fn background_presets() -> Vec<BackgroundSpec> {
    let blue_params = [
        (60.0, 0.80, (1.0, 3.0)),
        (120.0, 1.00, (1.0, 4.0)),
        (250.0, 0.90, (1.0, 4.0)),
        (400.0, 1.10, (1.5, 5.0)),
        (600.0, 0.75, (1.0, 3.5)),
        (150.0, 1.25, (1.0, 4.0)),
        (800.0, 1.00, (1.5, 6.0)),
    ];
    let white_params = [
        (60.0, 1.00, (1.0, 3.0)),
        (150.0, 0.90, (1.0, 4.0)),
        (300.0, 1.05, (1.0, 4.0)),
        (500.0, 0.85, (1.5, 5.0)),
        (700.0, 1.00, (1.0, 3.5)),
        (100.0, 1.15, (1.0, 4.0)),
        (900.0, 0.95, (1.5, 6.0)),
    ];
    let mut presets = Vec::with_capacity(14);
    for (i, &(density, brightness, size)) in blue_params.iter().enumerate() {
        presets.push(BackgroundSpec {
            id: i as u32 + 1,
            family: BackgroundFamily::Blue,
            impurity_density: density,
            brightness,
            impurity_size_range: size,
        });
    }
    for (i, &(density, brightness, size)) in white_params.iter().enumerate() {
        presets.push(BackgroundSpec {
            id: i as u32 + 8,
            family: BackgroundFamily::White,
            impurity_density: density,
            brightness,
            impurity_size_range: size,
        });
    }
    presets
}

/// Preset by id (1..=14).
pub fn background_preset(id: u32) -> Option<BackgroundSpec> {
    background_presets().into_iter().find(|p| p.id == id)
}

/// Short label used in sequence names and report rows: b1..b7, w1..w7.
pub fn background_label(id: u32) -> String {
    if id <= 7 {
        format!("b{id}")
    } else {
        format!("w{}", id - 7)
    }
}

fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

impl BackgroundSpec {
    pub fn base_color(&self) -> [u8; 3] {
        let base = match self.family {
            BackgroundFamily::Blue => BLUE_BASE,
            BackgroundFamily::White => WHITE_BASE,
        };
        [
            clamp_u8(base[0] * self.brightness),
            clamp_u8(base[1] * self.brightness),
            clamp_u8(base[2] * self.brightness),
        ]
    }
}

/// Render the flat base plus Poisson-count impurity specks. Blue
/// backgrounds get lighter specks, white backgrounds darker ones, so the
/// clutter is visible in both families.
pub fn render_background(spec: &BackgroundSpec, width: u32, height: u32, rng: &mut StreamRng) -> Frame {
    let mut frame = Frame::filled(width, height, spec.base_color());
    let area_mp = width as f64 * height as f64 / 1e6;
    let mean = spec.impurity_density * area_mp;
    if mean <= 0.0 {
        return frame;
    }
    let count = Poisson::new(mean).expect("positive impurity mean").sample(rng) as u64;
    let base = spec.base_color();
    for _ in 0..count {
        let cx = rng.random_range(0.0..width as f64);
        let cy = rng.random_range(0.0..height as f64);
        let (r_lo, r_hi) = spec.impurity_size_range;
        let radius = if r_hi > r_lo { rng.random_range(r_lo..r_hi) } else { r_lo };
        let delta = match spec.family {
            BackgroundFamily::Blue => rng.random_range(15.0..55.0),
            BackgroundFamily::White => -rng.random_range(20.0..80.0),
        };
        let color = [
            clamp_u8(base[0] as f64 + delta),
            clamp_u8(base[1] as f64 + delta),
            clamp_u8(base[2] as f64 + delta * 0.8),
        ];
        let x0 = (cx - radius).floor().max(0.0) as u32;
        let x1 = (cx + radius).ceil().min(width as f64 - 1.0) as u32;
        let y0 = (cy - radius).floor().max(0.0) as u32;
        let y1 = (cy + radius).ceil().min(height as f64 - 1.0) as u32;
        for y in y0..=y1 {
            for x in x0..=x1 {
                let dx = x as f64 + 0.5 - cx;
                let dy = y as f64 + 0.5 - cy;
                if dx * dx + dy * dy <= radius * radius {
                    frame.set_pixel(x, y, color);
                }
            }
        }
    }
    frame
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn fourteen_presets_split_seven_seven() {
        let presets = background_presets();
        assert_eq!(presets.len(), 14);
        let blue = presets.iter().filter(|p| p.family == BackgroundFamily::Blue).count();
        assert_eq!(blue, 7);
        let ids: Vec<u32> = presets.iter().map(|p| p.id).collect();
        assert_eq!(ids, (1..=14).collect::<Vec<_>>());
        for p in &presets {
            assert!(p.impurity_density >= 0.0);
            assert!(p.brightness > 0.0 && p.brightness <= 2.0);
        }
    }

    #[test]
    fn labels_cover_both_families() {
        assert_eq!(background_label(1), "b1");
        assert_eq!(background_label(7), "b7");
        assert_eq!(background_label(8), "w1");
        assert_eq!(background_label(14), "w7");
    }

    #[test]
    fn zero_density_is_uniform() {
        let spec = BackgroundSpec {
            id: 1,
            family: BackgroundFamily::Blue,
            impurity_density: 0.0,
            brightness: 1.0,
            impurity_size_range: (1.0, 3.0),
        };
        let frame = render_background(&spec, 64, 48, &mut rng_from_seed(5));
        let base = spec.base_color();
        assert!(frame.data().chunks_exact(3).all(|p| p == base));
    }

    #[test]
    fn same_seed_is_byte_identical() {
        let spec = background_preset(3).unwrap();
        let a = render_background(&spec, 320, 240, &mut rng_from_seed(42));
        let b = render_background(&spec, 320, 240, &mut rng_from_seed(42));
        assert_eq!(a.data(), b.data());
        let c = render_background(&spec, 320, 240, &mut rng_from_seed(43));
        assert_ne!(a.data(), c.data(), "different seed should move impurities");
    }

    /// Count 8-connected components of pixels differing from `base`.
    fn count_components(frame: &Frame, base: [u8; 3]) -> u64 {
        let (w, h) = (frame.width() as usize, frame.height() as usize);
        let mask: Vec<bool> = frame.data().chunks_exact(3).map(|p| p != base).collect();
        let mut seen = vec![false; w * h];
        let mut stack = Vec::new();
        let mut components = 0;
        for start in 0..w * h {
            if !mask[start] || seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(idx) = stack.pop() {
                let (x, y) = ((idx % w) as i64, (idx / w) as i64);
                for dy in -1..=1i64 {
                    for dx in -1..=1i64 {
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let n = ny as usize * w + nx as usize;
                        if mask[n] && !seen[n] {
                            seen[n] = true;
                            stack.push(n);
                        }
                    }
                }
            }
        }
        components
    }

    #[test]
    fn impurity_count_tracks_density() {
        // Radius pinned small so blobs rarely merge; total component count
        // over 100 seeds is then Poisson(100 * d * A) up to a handful of
        // merges, well inside the 4-sigma band.
        let spec = BackgroundSpec {
            id: 2,
            family: BackgroundFamily::White,
            impurity_density: 200.0,
            brightness: 1.0,
            impurity_size_range: (1.5, 1.5),
        };
        let (w, h) = (256u32, 256u32);
        let mean_per_frame = spec.impurity_density * (w * h) as f64 / 1e6;
        let trials = 100u64;
        let mut total = 0u64;
        for seed in 0..trials {
            let frame = render_background(&spec, w, h, &mut rng_from_seed(seed));
            total += count_components(&frame, spec.base_color());
        }
        let mean = mean_per_frame * trials as f64;
        let sigma = mean.sqrt();
        assert!(
            (total as f64 - mean).abs() < 4.0 * sigma,
            "components {total}, expected {mean:.0} +/- {:.0}",
            4.0 * sigma
        );
    }
}
