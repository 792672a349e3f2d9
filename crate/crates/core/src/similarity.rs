//! Multi-scale similarity windows and offset prediction.
//!
//! For a target anchored in the previous frame, each pyramid level
//! contributes a map of cosine similarities over a search window around the
//! anchor. All three levels span the same pixel extent: the deep radius in
//! deep cells, doubled for mid, quadrupled for shallow. The maps are summed
//! on the deep displacement lattice and the fused peak, scaled back to
//! pixels, is the predicted motion offset.

use crate::error::{Error, Result};
use crate::features::{FeatureGrid, FeaturePyramid, STRIDE_DEEP};

/// Deep-lattice search radius in deep-grid cells. Covers 32 px of motion,
/// comfortably past the default top speed plus jitter.
pub const DEFAULT_RADIUS: u32 = 4;
/// Similarity assigned to displacements that fall outside the grid.
pub const OUT_OF_GRID: f32 = -1.0;

/// Square similarity map over displacements `|dx|,|dy| <= radius`, row-major
/// with `(dx, dy) = (-radius, -radius)` first.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleMap {
    pub radius: i64,
    values: Vec<f32>,
}

impl ScaleMap {
    pub fn new(radius: u32) -> ScaleMap {
        let side = 2 * radius as usize + 1;
        ScaleMap {
            radius: radius as i64,
            values: vec![0.0; side * side],
        }
    }

    pub fn side(&self) -> usize {
        2 * self.radius as usize + 1
    }

    #[inline]
    fn index(&self, dx: i64, dy: i64) -> usize {
        debug_assert!(dx.abs() <= self.radius && dy.abs() <= self.radius);
        ((dy + self.radius) * (2 * self.radius + 1) + (dx + self.radius)) as usize
    }

    pub fn at(&self, dx: i64, dy: i64) -> f32 {
        self.values[self.index(dx, dy)]
    }

    pub fn set(&mut self, dx: i64, dy: i64, v: f32) {
        let i = self.index(dx, dy);
        self.values[i] = v;
    }

    /// Displacements in row-major order, `(dx, dy)` pairs.
    pub fn displacements(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let r = self.radius;
        (-r..=r).flat_map(move |dy| (-r..=r).map(move |dx| (dx, dy)))
    }
}

/// Per-target similarity stack: the three per-scale component maps plus
/// their fusion on the deep lattice.
#[derive(Debug, Clone)]
pub struct SimilarityVolume {
    /// Target's cell in the previous frame's deep grid.
    pub anchor: (u32, u32),
    pub deep: ScaleMap,
    pub mid: ScaleMap,
    pub shallow: ScaleMap,
    pub fused: ScaleMap,
}

fn cosine(a: &[f32], b: &[f32]) -> f32 {
    let mut dot = 0f32;
    let mut na = 0f32;
    let mut nb = 0f32;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na <= 0.0 || nb <= 0.0 {
        return 0.0;
    }
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}

/// Cosine similarity of the previous frame's anchor descriptor against every
/// cell within `radius` of the anchor in the current frame's grid.
/// Displacements that leave the grid score [`OUT_OF_GRID`].
pub fn scale_similarity(
    prev_level: &FeatureGrid,
    cur_level: &FeatureGrid,
    anchor_cell: (u32, u32),
    radius: u32,
) -> Result<ScaleMap> {
    if !prev_level.same_shape(cur_level) {
        return Err(Error::ShapeMismatch(format!(
            "levels {}x{}@{} vs {}x{}@{}",
            prev_level.width,
            prev_level.height,
            prev_level.stride,
            cur_level.width,
            cur_level.height,
            cur_level.stride
        )));
    }
    let (ax, ay) = anchor_cell;
    if ax >= prev_level.width || ay >= prev_level.height {
        return Err(Error::AnchorOutOfGrid {
            x: ax as usize,
            y: ay as usize,
            w: prev_level.width as usize,
            h: prev_level.height as usize,
        });
    }
    let anchor = prev_level.descriptor(ax, ay);
    let mut map = ScaleMap::new(radius);
    for dy in -(radius as i64)..=radius as i64 {
        for dx in -(radius as i64)..=radius as i64 {
            let cx = ax as i64 + dx;
            let cy = ay as i64 + dy;
            let v = if cx < 0 || cy < 0 || cx >= cur_level.width as i64 || cy >= cur_level.height as i64
            {
                OUT_OF_GRID
            } else {
                cosine(anchor, cur_level.descriptor(cx as u32, cy as u32))
            };
            map.set(dx, dy, v);
        }
    }
    Ok(map)
}

/// Sum the three per-scale maps on the deep displacement lattice.
///
/// A deep displacement of d cells is 2d mid cells and 4d shallow cells, so
/// the finer maps are sampled exactly on those lattice points; their radii
/// must be exactly 2x and 4x the deep radius (all scales then cover the same
/// pixel window).
pub fn fuse_similarity(deep: &ScaleMap, mid: &ScaleMap, shallow: &ScaleMap) -> Result<ScaleMap> {
    if mid.radius != 2 * deep.radius || shallow.radius != 4 * deep.radius {
        return Err(Error::ShapeMismatch(format!(
            "fusion lattice: deep radius {} needs mid {} and shallow {}, got {} and {}",
            deep.radius,
            2 * deep.radius,
            4 * deep.radius,
            mid.radius,
            shallow.radius
        )));
    }
    let mut fused = ScaleMap::new(deep.radius as u32);
    let lattice: Vec<(i64, i64)> = fused.displacements().collect();
    for (dx, dy) in lattice {
        let v = deep.at(dx, dy) + mid.at(2 * dx, 2 * dy) + shallow.at(4 * dx, 4 * dy);
        fused.set(dx, dy, v);
    }
    Ok(fused)
}

/// Argmax of the fused map converted to pixels. Ties go to the smallest
/// displacement magnitude, then lexicographic (dy, dx), so identical frames
/// predict exactly zero motion.
pub fn predict_offset(fused: &ScaleMap) -> (i64, i64) {
    let mut best = (0i64, 0i64);
    let mut best_v = f32::NEG_INFINITY;
    let mut best_l2 = i64::MAX;
    for (dx, dy) in fused.displacements() {
        let v = fused.at(dx, dy);
        let l2 = dx * dx + dy * dy;
        let better = v > best_v
            || (v == best_v && l2 < best_l2)
            || (v == best_v && l2 == best_l2 && (dy, dx) < (best.1, best.0));
        if better {
            best = (dx, dy);
            best_v = v;
            best_l2 = l2;
        }
    }
    (best.0 * STRIDE_DEEP as i64, best.1 * STRIDE_DEEP as i64)
}

/// Full stack for one target: per-scale windows around the anchor pixel,
/// fused on the deep lattice.
///
/// `center` is the target's center pixel in the previous frame. The deep
/// radius is `radius`; mid and shallow use 2x and 4x.
pub fn target_similarity(
    prev: &FeaturePyramid,
    cur: &FeaturePyramid,
    center: (f64, f64),
    radius: u32,
) -> Result<SimilarityVolume> {
    let anchor_deep = prev.deep.cell_of(center.0, center.1);
    let anchor_mid = prev.mid.cell_of(center.0, center.1);
    let anchor_shallow = prev.shallow.cell_of(center.0, center.1);
    let deep = scale_similarity(&prev.deep, &cur.deep, anchor_deep, radius)?;
    let mid = scale_similarity(&prev.mid, &cur.mid, anchor_mid, 2 * radius)?;
    let shallow = scale_similarity(&prev.shallow, &cur.shallow, anchor_shallow, 4 * radius)?;
    let fused = fuse_similarity(&deep, &mid, &shallow)?;
    Ok(SimilarityVolume {
        anchor: anchor_deep,
        deep,
        mid,
        shallow,
        fused,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{extract_pyramid, DESCRIPTOR_DIM};
    use crate::frame::Frame;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn random_frame(w: u32, h: u32, seed: u64) -> Frame {
        let mut rng = rng_from_seed(seed);
        let mut f = Frame::new(w, h);
        for y in 0..h {
            for x in 0..w {
                f.set_pixel(x, y, [rng.random(), rng.random(), rng.random()]);
            }
        }
        f
    }

    fn random_grid(stride: u32, w: u32, h: u32, seed: u64) -> FeatureGrid {
        let mut rng = rng_from_seed(seed);
        let data: Vec<f32> = (0..(w * h) as usize * DESCRIPTOR_DIM)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        FeatureGrid::from_raw(stride, w, h, data).unwrap()
    }

    #[test]
    fn identical_frames_peak_at_zero() {
        let f = random_frame(96, 96, 2);
        let pyr = extract_pyramid(&f).unwrap();
        let map = scale_similarity(&pyr.deep, &pyr.deep, (6, 6), 4).unwrap();
        assert!((map.at(0, 0) - 1.0).abs() < 1e-5);
        for (dx, dy) in map.displacements() {
            assert!(map.at(dx, dy) <= 1.0 + 1e-6);
        }
        let vol = target_similarity(&pyr, &pyr, (48.0, 48.0), 4).unwrap();
        assert_eq!(predict_offset(&vol.fused), (0, 0));
    }

    #[test]
    fn orthogonal_descriptors_score_zero() {
        // prev anchor descriptor lives on one axis, every cur descriptor on
        // another
        let mut prev = FeatureGrid::zeroed(8, 40, 40);
        let mut cur = FeatureGrid::zeroed(8, 40, 40);
        for cy in 0..prev.height {
            for cx in 0..prev.width {
                prev.descriptor_mut(cx, cy)[0] = 1.0;
                cur.descriptor_mut(cx, cy)[1] = 1.0;
            }
        }
        let map = scale_similarity(&prev, &cur, (2, 2), 2).unwrap();
        for (dx, dy) in map.displacements() {
            assert_eq!(map.at(dx, dy), 0.0);
        }
    }

    #[test]
    fn shifted_grid_peaks_at_shift() {
        let prev = random_grid(8, 20, 20, 5);
        // cur shifted 2 cells right: cur[x] = prev[x-2]
        let mut cur =
            FeatureGrid::from_raw(8, 20, 20, vec![0.0; 400 * DESCRIPTOR_DIM]).unwrap();
        for cy in 0..20 {
            for cx in 2..20 {
                let src: Vec<f32> = prev.descriptor(cx - 2, cy).to_vec();
                cur.descriptor_mut(cx, cy).copy_from_slice(&src);
            }
        }
        let map = scale_similarity(&prev, &cur, (9, 9), 4).unwrap();
        let mut best = (0i64, 0i64);
        let mut best_v = f32::NEG_INFINITY;
        for (dx, dy) in map.displacements() {
            if map.at(dx, dy) > best_v {
                best_v = map.at(dx, dy);
                best = (dx, dy);
            }
        }
        assert_eq!(best, (2, 0));
        assert!((best_v - 1.0).abs() < 1e-6);
    }

    #[test]
    fn anchor_outside_grid_rejected() {
        let g = random_grid(8, 10, 10, 1);
        assert!(scale_similarity(&g, &g, (10, 3), 2).is_err());
    }

    #[test]
    fn out_of_grid_displacements_score_minus_one() {
        let g = random_grid(8, 6, 6, 3);
        let map = scale_similarity(&g, &g, (0, 0), 2).unwrap();
        assert_eq!(map.at(-1, 0), OUT_OF_GRID);
        assert_eq!(map.at(0, -2), OUT_OF_GRID);
        assert!(map.at(1, 1) > OUT_OF_GRID);
    }

    #[test]
    fn fusion_is_elementwise_sum_on_deep_lattice() {
        let mut rng = rng_from_seed(8);
        let mut deep = ScaleMap::new(3);
        let mut mid = ScaleMap::new(6);
        let mut shallow = ScaleMap::new(12);
        for m in [&mut deep, &mut mid, &mut shallow] {
            let r = m.radius;
            for dy in -r..=r {
                for dx in -r..=r {
                    m.set(dx, dy, rng.random_range(-1.0f32..1.0));
                }
            }
        }
        let fused = fuse_similarity(&deep, &mid, &shallow).unwrap();
        for (dx, dy) in fused.displacements() {
            let expect = deep.at(dx, dy) + mid.at(2 * dx, 2 * dy) + shallow.at(4 * dx, 4 * dy);
            assert_eq!(fused.at(dx, dy), expect);
            assert!(fused.at(dx, dy) >= -3.0 && fused.at(dx, dy) <= 3.0);
        }
    }

    #[test]
    fn fusion_with_zero_secondaries_is_identity() {
        let mut deep = ScaleMap::new(2);
        for (i, (dx, dy)) in deep.displacements().collect::<Vec<_>>().into_iter().enumerate() {
            deep.set(dx, dy, i as f32 / 10.0 - 1.0);
        }
        let fused = fuse_similarity(&deep, &ScaleMap::new(4), &ScaleMap::new(8)).unwrap();
        assert_eq!(fused, deep);
    }

    #[test]
    fn mismatched_radii_rejected() {
        assert!(fuse_similarity(&ScaleMap::new(4), &ScaleMap::new(8), &ScaleMap::new(12)).is_err());
        assert!(fuse_similarity(&ScaleMap::new(4), &ScaleMap::new(7), &ScaleMap::new(16)).is_err());
    }

    #[test]
    fn uniform_map_predicts_zero_by_tie_break() {
        let mut m = ScaleMap::new(4);
        for (dx, dy) in m.displacements().collect::<Vec<_>>() {
            m.set(dx, dy, 0.7);
        }
        assert_eq!(predict_offset(&m), (0, 0));
    }

    #[test]
    fn tie_break_prefers_smaller_l2_then_lex() {
        let mut m = ScaleMap::new(3);
        m.set(2, 2, 0.9);
        m.set(1, 0, 0.9);
        assert_eq!(predict_offset(&m), (8, 0));
        let mut m2 = ScaleMap::new(3);
        m2.set(0, -1, 0.9);
        m2.set(-1, 0, 0.9);
        m2.set(0, 1, 0.9);
        // same magnitude: (dy, dx) = (-1, 0) is lexicographically least
        assert_eq!(predict_offset(&m2), (0, -8));
    }

    #[test]
    fn peak_converts_cells_to_pixels() {
        let mut m = ScaleMap::new(4);
        m.set(2, 1, 2.5);
        assert_eq!(predict_offset(&m), (16, 8));
    }

    #[test]
    fn translated_frame_recovers_offset() {
        // textured frame shifted 16 px right and 8 px down inside a larger
        // canvas; targets well inside the interior
        let base = random_frame(160, 160, 42);
        let mut shifted = base.clone();
        for y in 0..160u32 {
            for x in 0..160u32 {
                let sx = x.checked_sub(16);
                let sy = y.checked_sub(8);
                let p = match (sx, sy) {
                    (Some(sx), Some(sy)) => base.pixel(sx, sy),
                    _ => [0, 0, 0],
                };
                shifted.set_pixel(x, y, p);
            }
        }
        let prev = extract_pyramid(&base).unwrap();
        let cur = extract_pyramid(&shifted).unwrap();
        let mut hits = 0;
        let mut total = 0;
        for cy in (60..100).step_by(8) {
            for cx in (60..100).step_by(8) {
                let vol =
                    target_similarity(&prev, &cur, (cx as f64, cy as f64), DEFAULT_RADIUS).unwrap();
                let (dx, dy) = predict_offset(&vol.fused);
                total += 1;
                if (dx - 16).abs() <= 8 && (dy - 8).abs() <= 8 {
                    hits += 1;
                }
            }
        }
        assert!(hits * 100 >= total * 95, "{hits}/{total} within one cell");
    }
}
