//! Procedural sprites: ellipse bodies, cell chains, and spiked discs, in
//! plankton-like olive/green tones, with a hard alpha channel. Shapes are
//! deterministic in (species, diameter, rng stream).

use rand::Rng;

use crate::rng::StreamRng;

pub const SPECIES_COUNT: u32 = 27;

/// RGBA8 raster; alpha is 0 or 255, opaque means alpha >= 128.
#[derive(Debug, Clone, PartialEq)]
pub struct SpriteRaster {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl SpriteRaster {
    pub fn new(width: u32, height: u32) -> Self {
        SpriteRaster {
            width,
            height,
            data: vec![0; (width * height * 4) as usize],
        }
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 4] {
        let i = ((y * self.width + x) * 4) as usize;
        [self.data[i], self.data[i + 1], self.data[i + 2], self.data[i + 3]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: u32, y: u32, rgba: [u8; 4]) {
        let i = ((y * self.width + x) * 4) as usize;
        self.data[i..i + 4].copy_from_slice(&rgba);
    }

    #[inline]
    pub fn opaque(&self, x: u32, y: u32) -> bool {
        self.data[((y * self.width + x) * 4 + 3) as usize] >= 128
    }

    pub fn opaque_count(&self) -> u64 {
        self.data.iter().skip(3).step_by(4).filter(|&&a| a >= 128).count() as u64
    }

    /// Tight bounds (x, y, w, h) of opaque pixels, None if fully transparent.
    pub fn opaque_bounds(&self) -> Option<(u32, u32, u32, u32)> {
        let (mut min_x, mut min_y) = (u32::MAX, u32::MAX);
        let (mut max_x, mut max_y) = (0u32, 0u32);
        let mut any = false;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.opaque(x, y) {
                    any = true;
                    min_x = min_x.min(x);
                    max_x = max_x.max(x);
                    min_y = min_y.min(y);
                    max_y = max_y.max(y);
                }
            }
        }
        any.then(|| (min_x, min_y, max_x - min_x + 1, max_y - min_y + 1))
    }
}

/// A sprite ready for placement.
#[derive(Debug, Clone)]
pub struct SpriteAsset {
    /// Species index in 1..=27; decides shape family and base color.
    pub species: u32,
    pub raster: SpriteRaster,
    pub nominal_diameter: f64,
}

fn hsl_to_rgb(h_deg: f64, s: f64, l: f64) -> [u8; 3] {
    let c = (1.0 - (2.0 * l - 1.0).abs()) * s;
    let hp = (h_deg.rem_euclid(360.0)) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = l - c / 2.0;
    [
        ((r + m) * 255.0).round().clamp(0.0, 255.0) as u8,
        ((g + m) * 255.0).round().clamp(0.0, 255.0) as u8,
        ((b + m) * 255.0).round().clamp(0.0, 255.0) as u8,
    ]
}

/// Species base color: hues swept through yellow-green to green so sprites
/// contrast with both the dark blue and bright white background families.
fn species_color(species: u32, rng: &mut StreamRng) -> [u8; 3] {
    let t = (species as f64 * 0.618_033_988_749_895).fract();
    let hue = 55.0 + 90.0 * t + rng.random_range(-6.0..6.0);
    let sat = 0.40 + 0.25 * ((species as f64 * 0.414).fract()) + rng.random_range(-0.05..0.05);
    let light = 0.46 + 0.12 * ((species as f64 * 0.273).fract()) + rng.random_range(-0.03..0.03);
    hsl_to_rgb(hue, sat.clamp(0.2, 0.85), light.clamp(0.35, 0.68))
}

fn shade(rgb: [u8; 3], factor: f64) -> [u8; 4] {
    [
        (rgb[0] as f64 * factor).round().clamp(0.0, 255.0) as u8,
        (rgb[1] as f64 * factor).round().clamp(0.0, 255.0) as u8,
        (rgb[2] as f64 * factor).round().clamp(0.0, 255.0) as u8,
        255,
    ]
}

fn paint_ellipse(raster: &mut SpriteRaster, rgb: [u8; 3], a: f64, b: f64) {
    let (cx, cy) = (raster.width as f64 / 2.0, raster.height as f64 / 2.0);
    for y in 0..raster.height {
        for x in 0..raster.width {
            let dx = (x as f64 + 0.5 - cx) / a;
            let dy = (y as f64 + 0.5 - cy) / b;
            let rho2 = dx * dx + dy * dy;
            if rho2 <= 1.0 {
                let factor = if rho2 > 0.72 { 0.62 } else { 0.85 + 0.35 * (1.0 - rho2) };
                raster.set_pixel(x, y, shade(rgb, factor));
            }
        }
    }
}

fn ellipse_sprite(diameter: f64, elongation: f64, rgb: [u8; 3]) -> SpriteRaster {
    let a = diameter / 2.0;
    let b = (a / elongation).max(1.5);
    let mut raster = SpriteRaster::new((2.0 * a).ceil().max(3.0) as u32, (2.0 * b).ceil().max(3.0) as u32);
    paint_ellipse(&mut raster, rgb, a, b);
    raster
}

fn chain_sprite(diameter: f64, cells: u32, rgb: [u8; 3]) -> SpriteRaster {
    // cells overlap slightly so the chain is one connected region
    let spacing_factor = 0.85;
    let cell_d = diameter / (1.0 + spacing_factor * (cells as f64 - 1.0));
    let cell_r = (cell_d / 2.0).max(1.5);
    let width = (cell_r * 2.0 + spacing_factor * cell_d * (cells as f64 - 1.0)).ceil().max(3.0) as u32;
    let height = (cell_r * 2.0).ceil().max(3.0) as u32;
    let mut raster = SpriteRaster::new(width, height);
    let cy = height as f64 / 2.0;
    for i in 0..cells {
        let cx = cell_r + spacing_factor * cell_d * i as f64;
        let cell_rgb = if i % 2 == 0 { rgb } else { [rgb[0], rgb[1], rgb[2].saturating_add(14)] };
        for y in 0..height {
            for x in 0..width {
                let dx = (x as f64 + 0.5 - cx) / cell_r;
                let dy = (y as f64 + 0.5 - cy) / cell_r;
                let rho2 = dx * dx + dy * dy;
                if rho2 <= 1.0 {
                    let factor = if rho2 > 0.75 { 0.66 } else { 0.85 + 0.3 * (1.0 - rho2) };
                    raster.set_pixel(x, y, shade(cell_rgb, factor));
                }
            }
        }
    }
    raster
}

fn spiked_sprite(diameter: f64, spikes: u32, phase: f64, rgb: [u8; 3]) -> SpriteRaster {
    let outer = diameter / 2.0;
    let disc = (outer * 0.62).max(1.5);
    let side = (2.0 * outer).ceil().max(3.0) as u32;
    let mut raster = SpriteRaster::new(side, side);
    let c = side as f64 / 2.0;
    let half_width0 = (std::f64::consts::PI / spikes as f64) * 0.42;
    for y in 0..side {
        for x in 0..side {
            let dx = x as f64 + 0.5 - c;
            let dy = y as f64 + 0.5 - c;
            let rho = (dx * dx + dy * dy).sqrt();
            if rho <= disc {
                let rho2 = (rho / disc).powi(2);
                let factor = if rho2 > 0.78 { 0.64 } else { 0.85 + 0.32 * (1.0 - rho2) };
                raster.set_pixel(x, y, shade(rgb, factor));
                continue;
            }
            if rho <= outer {
                let theta = dy.atan2(dx);
                let taper = (outer - rho) / (outer - disc).max(1e-9);
                let half_width = half_width0 * taper.max(0.12);
                for i in 0..spikes {
                    let spike_theta =
                        phase + 2.0 * std::f64::consts::PI * i as f64 / spikes as f64;
                    let mut dt = (theta - spike_theta).rem_euclid(2.0 * std::f64::consts::PI);
                    if dt > std::f64::consts::PI {
                        dt = 2.0 * std::f64::consts::PI - dt;
                    }
                    if dt <= half_width {
                        raster.set_pixel(x, y, shade(rgb, 0.72));
                        break;
                    }
                }
            }
        }
    }
    raster
}

/// Build a sprite for a species at the requested nominal diameter. The
/// shape family cycles with the species index: ellipses, chains, spiked
/// discs. Color and small shape parameters vary per species and per draw.
pub fn make_sprite(species: u32, diameter: f64, rng: &mut StreamRng) -> SpriteAsset {
    assert!((1..=SPECIES_COUNT).contains(&species), "species {species} out of range");
    assert!(diameter >= 4.0, "diameter {diameter} too small");
    let rgb = species_color(species, rng);
    let raster = match species % 3 {
        0 => {
            let elongation = 1.2 + 1.6 * ((species as f64 * 0.531).fract())
                + rng.random_range(-0.1..0.1);
            ellipse_sprite(diameter, elongation.max(1.05), rgb)
        }
        1 => {
            let cells = 3 + (species + rng.random_range(0..2)) % 4;
            chain_sprite(diameter, cells, rgb)
        }
        _ => {
            let spikes = 5 + (species + rng.random_range(0..3)) % 7;
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            spiked_sprite(diameter, spikes, phase, rgb)
        }
    };
    debug_assert!(raster.opaque_count() > 0);
    SpriteAsset {
        species,
        raster,
        nominal_diameter: diameter,
    }
}

/// Raster extent after rotation by `angle` (tight outer box of the rotated
/// rectangle, not of the opaque region).
// Snap sin/cos so multiples of 90 degrees come out exact; otherwise the
// ~1e-16 residue inflates the ceil'd extent by a whole pixel.
fn snapped_sin_cos(angle: f64) -> (f64, f64) {
    let (mut s, mut c) = angle.sin_cos();
    if s.abs() < 1e-12 {
        s = 0.0;
    }
    if c.abs() < 1e-12 {
        c = 0.0;
    }
    (s, c)
}

pub fn rotated_extent(width: u32, height: u32, angle: f64) -> (u32, u32) {
    let (s, c) = snapped_sin_cos(angle);
    let w = width as f64;
    let h = height as f64;
    (
        (w * c.abs() + h * s.abs()).ceil().max(1.0) as u32,
        (w * s.abs() + h * c.abs()).ceil().max(1.0) as u32,
    )
}

/// Rotate with inverse-mapped nearest-neighbor sampling about the raster
/// center. Exact pixel permutation at multiples of 90 degrees.
pub fn rotate_raster(src: &SpriteRaster, angle: f64) -> SpriteRaster {
    let (out_w, out_h) = rotated_extent(src.width, src.height, angle);
    let mut out = SpriteRaster::new(out_w, out_h);
    let (s, c) = snapped_sin_cos(angle);
    let (ocx, ocy) = (out_w as f64 / 2.0, out_h as f64 / 2.0);
    let (scx, scy) = (src.width as f64 / 2.0, src.height as f64 / 2.0);
    for y in 0..out_h {
        for x in 0..out_w {
            let dx = x as f64 + 0.5 - ocx;
            let dy = y as f64 + 0.5 - ocy;
            // rotate back by -angle into source coordinates
            let sx = c * dx + s * dy + scx;
            let sy = -s * dx + c * dy + scy;
            let (sxi, syi) = (sx.floor() as i64, sy.floor() as i64);
            if sxi >= 0 && syi >= 0 && (sxi as u32) < src.width && (syi as u32) < src.height {
                let p = src.pixel(sxi as u32, syi as u32);
                if p[3] > 0 {
                    out.set_pixel(x, y, p);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn every_species_and_size_has_opaque_pixels() {
        for species in 1..=SPECIES_COUNT {
            for diameter in [8.0, 16.0, 40.0, 120.0] {
                let s = make_sprite(species, diameter, &mut rng_from_seed(species as u64));
                assert!(s.raster.opaque_count() > 0, "species {species} d {diameter}");
                let (_, _, w, h) = s.raster.opaque_bounds().unwrap();
                let longest = w.max(h) as f64;
                assert!(
                    longest >= diameter * 0.55 && longest <= diameter + 2.0,
                    "species {species} d {diameter}: opaque extent {longest}"
                );
            }
        }
    }

    #[test]
    fn same_stream_same_sprite() {
        let a = make_sprite(13, 32.0, &mut rng_from_seed(7));
        let b = make_sprite(13, 32.0, &mut rng_from_seed(7));
        assert_eq!(a.raster, b.raster);
    }

    #[test]
    fn quarter_turn_transposes_opaque_mask() {
        let sprite = make_sprite(4, 24.0, &mut rng_from_seed(3));
        let src = &sprite.raster;
        let rot = rotate_raster(src, std::f64::consts::FRAC_PI_2);
        assert_eq!((rot.width, rot.height), (src.height, src.width));
        assert_eq!(rot.opaque_count(), src.opaque_count());
        // exact pixel permutation: rot(x, y) samples src(y, H-1-x)
        for y in 0..rot.height {
            for x in 0..rot.width {
                assert_eq!(
                    rot.opaque(x, y),
                    src.opaque(y, src.height - 1 - x),
                    "mismatch at {x},{y}"
                );
            }
        }
    }

    #[test]
    fn arbitrary_rotation_roughly_preserves_area() {
        let sprite = make_sprite(9, 40.0, &mut rng_from_seed(11));
        let base = sprite.raster.opaque_count() as f64;
        for angle in [0.3, 1.1, 2.0, 4.4, 5.9] {
            let rot = rotate_raster(&sprite.raster, angle);
            let count = rot.opaque_count() as f64;
            assert!(
                (count - base).abs() / base < 0.2,
                "angle {angle}: {count} vs {base}"
            );
        }
    }

    #[test]
    fn chain_is_wider_than_tall() {
        // species 7: 7 % 3 == 1, chain family
        let s = make_sprite(7, 48.0, &mut rng_from_seed(2));
        assert!(s.raster.width > s.raster.height * 2);
    }

    #[test]
    fn rotated_extent_bounds_rotation_output() {
        let s = make_sprite(20, 30.0, &mut rng_from_seed(5));
        for angle in [0.0, 0.7, 1.57, 3.0] {
            let (w, h) = rotated_extent(s.raster.width, s.raster.height, angle);
            let rot = rotate_raster(&s.raster, angle);
            assert_eq!((rot.width, rot.height), (w, h));
        }
    }
}
