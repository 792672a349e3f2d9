//! Three-scale descriptor pyramids and deviation correction.
//!
//! Each frame is summarized on grids at strides 2, 4 and 8. A cell's
//! descriptor packs an 8-bin gradient-orientation histogram, the mean color,
//! and a local-contrast channel, pooled over the cell's 3x3 neighborhood so
//! the receptive field is three strides wide. The deviation correction pass
//! re-extracts descriptors with the background flattened away and shrinks
//! cells that contain no foreground, so matching keys on the targets rather
//! than on whatever debris they drift over.

use crate::error::{Error, Result};
use crate::frame::Frame;

/// Channels per cell: 8 orientation bins + mean r, g, b + contrast.
pub const DESCRIPTOR_DIM: usize = 12;
const ORIENTATION_BINS: usize = 8;
/// Scales gradient energy up to the same footing as the unit-range color
/// channels; without it flat-color cells dominate every cosine.
const GRADIENT_GAIN: f32 = 4.0;
/// Foreground mask threshold on |luma difference|, in [0,1] luma units.
/// Matches the blob detector's threshold of 12 on the 0-255 scale.
const MASK_DIFF_THRESHOLD: f32 = 12.0 / 255.0;

pub const STRIDE_SHALLOW: u32 = 2;
pub const STRIDE_MID: u32 = 4;
pub const STRIDE_DEEP: u32 = 8;

/// One stride's grid of descriptors, cell-major, `DESCRIPTOR_DIM` floats per
/// cell.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGrid {
    pub stride: u32,
    pub width: u32,
    pub height: u32,
    data: Vec<f32>,
}

impl FeatureGrid {
    pub fn zeroed(stride: u32, frame_w: u32, frame_h: u32) -> FeatureGrid {
        let width = frame_w.div_ceil(stride);
        let height = frame_h.div_ceil(stride);
        FeatureGrid {
            stride,
            width,
            height,
            data: vec![0.0; (width * height) as usize * DESCRIPTOR_DIM],
        }
    }

    pub fn from_raw(stride: u32, width: u32, height: u32, data: Vec<f32>) -> Result<FeatureGrid> {
        if data.len() != (width * height) as usize * DESCRIPTOR_DIM {
            return Err(Error::ShapeMismatch(format!(
                "grid {width}x{height} needs {} floats, got {}",
                (width * height) as usize * DESCRIPTOR_DIM,
                data.len()
            )));
        }
        Ok(FeatureGrid {
            stride,
            width,
            height,
            data,
        })
    }

    #[inline]
    fn offset(&self, cx: u32, cy: u32) -> usize {
        (cy * self.width + cx) as usize * DESCRIPTOR_DIM
    }

    pub fn descriptor(&self, cx: u32, cy: u32) -> &[f32] {
        let o = self.offset(cx, cy);
        &self.data[o..o + DESCRIPTOR_DIM]
    }

    pub fn descriptor_mut(&mut self, cx: u32, cy: u32) -> &mut [f32] {
        let o = self.offset(cx, cy);
        &mut self.data[o..o + DESCRIPTOR_DIM]
    }

    /// Cell containing a pixel coordinate, clamped into the grid.
    pub fn cell_of(&self, x: f64, y: f64) -> (u32, u32) {
        let cx = (x / self.stride as f64).floor().max(0.0) as u32;
        let cy = (y / self.stride as f64).floor().max(0.0) as u32;
        (cx.min(self.width - 1), cy.min(self.height - 1))
    }

    pub fn same_shape(&self, other: &FeatureGrid) -> bool {
        self.stride == other.stride && self.width == other.width && self.height == other.height
    }
}

/// Descriptor grids at strides 2 (shallow), 4 (mid) and 8 (deep).
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePyramid {
    pub shallow: FeatureGrid,
    pub mid: FeatureGrid,
    pub deep: FeatureGrid,
}

/// Additive corrections, one per pyramid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualPyramid {
    pub shallow: FeatureGrid,
    pub mid: FeatureGrid,
    pub deep: FeatureGrid,
}

struct PixelStats {
    /// Orientation bin index per pixel.
    bin: Vec<u8>,
    /// Gradient magnitude per pixel.
    mag: Vec<f32>,
    luma: Vec<f32>,
}

// Octant of the gradient direction over [0, 2pi), half-open bins of pi/4.
// Sign-and-compare logic instead of atan2 so a quarter-turn of the input,
// which maps (gx, gy) to (-gy, gx), shifts the bin by exactly 2 even for
// gradients that sit exactly on a bin boundary.
fn orientation_bin(gx: f32, gy: f32) -> u8 {
    let ax = gx.abs();
    let ay = gy.abs();
    if gy >= 0.0 {
        if gx > 0.0 {
            if gy < gx {
                0
            } else {
                1
            }
        } else if gy > 0.0 {
            if ay > ax {
                2
            } else {
                3
            }
        } else {
            // gx <= 0, gy == 0; gx == 0 too never reaches here (zero gradient)
            4
        }
    } else if gx < 0.0 {
        if ay < ax {
            4
        } else {
            5
        }
    } else if ax < ay {
        6
    } else {
        7
    }
}

fn pixel_stats(frame: &Frame) -> PixelStats {
    let (w, h) = (frame.width() as usize, frame.height() as usize);
    let luma = frame.luma();
    let mut bin = vec![0u8; w * h];
    let mut mag = vec![0f32; w * h];
    for y in 0..h {
        let ym = y.saturating_sub(1);
        let yp = (y + 1).min(h - 1);
        for x in 0..w {
            let xm = x.saturating_sub(1);
            let xp = (x + 1).min(w - 1);
            let gx = (luma[y * w + xp] - luma[y * w + xm]) / 2.0;
            let gy = (luma[yp * w + x] - luma[ym * w + x]) / 2.0;
            let m = (gx * gx + gy * gy).sqrt();
            if m > 0.0 {
                bin[y * w + x] = orientation_bin(gx, gy);
                mag[y * w + x] = m;
            }
        }
    }
    PixelStats { bin, mag, luma }
}

#[derive(Clone, Copy, Default)]
struct CellSums {
    hist: [f32; ORIENTATION_BINS],
    rgb: [f32; 3],
    // f64 so the variance identity stays exact on flat cells
    lum_sum: f64,
    lum_sq: f64,
    count: f32,
}

impl CellSums {
    fn add(&mut self, other: &CellSums) {
        for k in 0..ORIENTATION_BINS {
            self.hist[k] += other.hist[k];
        }
        for c in 0..3 {
            self.rgb[c] += other.rgb[c];
        }
        self.lum_sum += other.lum_sum;
        self.lum_sq += other.lum_sq;
        self.count += other.count;
    }
}

fn extract_grid(frame: &Frame, stats: &PixelStats, stride: u32) -> FeatureGrid {
    let (w, h) = (frame.width(), frame.height());
    let mut grid = FeatureGrid::zeroed(stride, w, h);
    let (gw, gh) = (grid.width, grid.height);

    let mut sums = vec![CellSums::default(); (gw * gh) as usize];
    for y in 0..h {
        let cy = y / stride;
        for x in 0..w {
            let i = (y * w + x) as usize;
            let s = &mut sums[(cy * gw + x / stride) as usize];
            s.hist[stats.bin[i] as usize] += stats.mag[i];
            let p = frame.pixel(x, y);
            s.rgb[0] += p[0] as f32 / 255.0;
            s.rgb[1] += p[1] as f32 / 255.0;
            s.rgb[2] += p[2] as f32 / 255.0;
            let l = stats.luma[i] as f64;
            s.lum_sum += l;
            s.lum_sq += l * l;
            s.count += 1.0;
        }
    }

    // the receptive field is the 3x3 cell neighborhood, clipped at borders;
    // the sample spacing stays one stride, so grids keep their resolution
    // while sub-stride shifts of the content move most of the field with them
    for cy in 0..gh {
        for cx in 0..gw {
            let mut agg = CellSums::default();
            for ny in cy.saturating_sub(1)..=(cy + 1).min(gh - 1) {
                for nx in cx.saturating_sub(1)..=(cx + 1).min(gw - 1) {
                    agg.add(&sums[(ny * gw + nx) as usize]);
                }
            }
            let d = grid.descriptor_mut(cx, cy);
            for k in 0..ORIENTATION_BINS {
                d[k] = GRADIENT_GAIN * agg.hist[k] / agg.count;
            }
            d[8] = agg.rgb[0] / agg.count;
            d[9] = agg.rgb[1] / agg.count;
            d[10] = agg.rgb[2] / agg.count;
            let mean = agg.lum_sum / agg.count as f64;
            d[11] = (agg.lum_sq / agg.count as f64 - mean * mean).max(0.0).sqrt() as f32;
        }
    }
    grid
}

/// Summarize a frame at all three strides. Pure and deterministic.
pub fn extract_pyramid(frame: &Frame) -> Result<FeaturePyramid> {
    if frame.width() < 2 * STRIDE_DEEP || frame.height() < 2 * STRIDE_DEEP {
        return Err(Error::FrameTooSmall {
            w: frame.width(),
            h: frame.height(),
            why: "descriptor pyramids need at least 16x16".into(),
        });
    }
    let stats = pixel_stats(frame);
    Ok(FeaturePyramid {
        shallow: extract_grid(frame, &stats, STRIDE_SHALLOW),
        mid: extract_grid(frame, &stats, STRIDE_MID),
        deep: extract_grid(frame, &stats, STRIDE_DEEP),
    })
}

fn mean_color(frame: &Frame) -> [u8; 3] {
    let mut sums = [0u64; 3];
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            let p = frame.pixel(x, y);
            for c in 0..3 {
                sums[c] += p[c] as u64;
            }
        }
    }
    let n = (frame.width() * frame.height()) as u64;
    [
        ((sums[0] + n / 2) / n) as u8,
        ((sums[1] + n / 2) / n) as u8,
        ((sums[2] + n / 2) / n) as u8,
    ]
}

fn foreground_mask(frame: &Frame, background_model: &Frame) -> Vec<bool> {
    let fl = frame.luma();
    let bl = background_model.luma();
    fl.iter()
        .zip(&bl)
        .map(|(f, b)| (f - b).abs() >= MASK_DIFF_THRESHOLD)
        .collect()
}

fn cell_foreground_counts(mask: &[bool], frame_w: u32, frame_h: u32, stride: u32) -> Vec<u32> {
    let gw = frame_w.div_ceil(stride);
    let gh = frame_h.div_ceil(stride);
    let mut counts = vec![0u32; (gw * gh) as usize];
    for y in 0..frame_h {
        for x in 0..frame_w {
            if mask[(y * frame_w + x) as usize] {
                counts[((y / stride) * gw + x / stride) as usize] += 1;
            }
        }
    }
    counts
}

fn residual_grid(pyr: &FeatureGrid, masked: &FeatureGrid, fg: &[u32], lambda: f32) -> FeatureGrid {
    let mut out = pyr.clone();
    for cy in 0..out.height {
        for cx in 0..out.width {
            let idx = (cy * out.width + cx) as usize;
            let p = pyr.descriptor(cx, cy);
            let m = masked.descriptor(cx, cy);
            let d = out.descriptor_mut(cx, cy);
            if fg[idx] > 0 {
                for k in 0..DESCRIPTOR_DIM {
                    d[k] = m[k] - p[k];
                }
            } else {
                for k in 0..DESCRIPTOR_DIM {
                    d[k] = -lambda * p[k];
                }
            }
        }
    }
    out
}

/// Predict the correction that strips background contamination.
///
/// Foreground pixels keep their values; everything else is flattened to the
/// background model's mean color, descriptors are re-extracted from that
/// cleaned frame, and the residual steers each cell toward the clean value.
/// Cells with no foreground at all get `-lambda` times their descriptor, so
/// pure-background response shrinks toward zero.
pub fn predict_residual(
    frame: &Frame,
    pyramid: &FeaturePyramid,
    background_model: &Frame,
    lambda: f32,
) -> Result<ResidualPyramid> {
    if !frame.same_dims(background_model) {
        return Err(Error::DimMismatch {
            expected: frame.dims_string(),
            got: background_model.dims_string(),
        });
    }
    let (w, h) = (frame.width(), frame.height());
    let mask = foreground_mask(frame, background_model);
    let flat = mean_color(background_model);
    let mut masked_frame = Frame::filled(w, h, flat);
    for y in 0..h {
        for x in 0..w {
            if mask[(y * w + x) as usize] {
                masked_frame.set_pixel(x, y, frame.pixel(x, y));
            }
        }
    }
    let masked = extract_pyramid(&masked_frame)?;
    Ok(ResidualPyramid {
        shallow: residual_grid(
            &pyramid.shallow,
            &masked.shallow,
            &cell_foreground_counts(&mask, w, h, STRIDE_SHALLOW),
            lambda,
        ),
        mid: residual_grid(
            &pyramid.mid,
            &masked.mid,
            &cell_foreground_counts(&mask, w, h, STRIDE_MID),
            lambda,
        ),
        deep: residual_grid(
            &pyramid.deep,
            &masked.deep,
            &cell_foreground_counts(&mask, w, h, STRIDE_DEEP),
            lambda,
        ),
    })
}

/// Clip a descriptor into the unit ball: vectors longer than 1 are scaled
/// down, shorter ones (zero included) pass through. Keeps suppressed cells
/// small instead of blowing them back up to unit length.
fn clip_norm(d: &mut [f32]) {
    let norm: f32 = d.iter().map(|v| v * v).sum::<f32>().sqrt();
    if norm > 1.0 {
        for v in d.iter_mut() {
            *v /= norm;
        }
    }
}

fn corrected_grid(pyr: &FeatureGrid, res: &FeatureGrid) -> Result<FeatureGrid> {
    if !pyr.same_shape(res) {
        return Err(Error::ShapeMismatch(format!(
            "pyramid grid {}x{}@{} vs residual {}x{}@{}",
            pyr.width, pyr.height, pyr.stride, res.width, res.height, res.stride
        )));
    }
    let mut out = pyr.clone();
    for cy in 0..out.height {
        for cx in 0..out.width {
            let r = res.descriptor(cx, cy);
            let d = out.descriptor_mut(cx, cy);
            for k in 0..DESCRIPTOR_DIM {
                d[k] += r[k];
            }
            clip_norm(d);
        }
    }
    Ok(out)
}

/// Apply a residual and re-normalize each cell.
pub fn correct_deviation(
    pyramid: &FeaturePyramid,
    residual: &ResidualPyramid,
) -> Result<FeaturePyramid> {
    Ok(FeaturePyramid {
        shallow: corrected_grid(&pyramid.shallow, &residual.shallow)?,
        mid: corrected_grid(&pyramid.mid, &residual.mid)?,
        deep: corrected_grid(&pyramid.deep, &residual.deep)?,
    })
}

/// Normalize every cell of a pyramid without applying any correction. Used
/// when deviation correction is switched off so both paths feed the
/// similarity stage descriptors on the same scale.
pub fn normalize_pyramid(pyramid: &FeaturePyramid) -> FeaturePyramid {
    let mut out = pyramid.clone();
    for grid in [&mut out.shallow, &mut out.mid, &mut out.deep] {
        for cy in 0..grid.height {
            for cx in 0..grid.width {
                clip_norm(grid.descriptor_mut(cx, cy));
            }
        }
    }
    out
}

fn descriptor_norm(d: &[f32]) -> f32 {
    d.iter().map(|v| v * v).sum::<f32>().sqrt()
}

/// Mean descriptor norm over all cells of a grid; diagnostic helper.
pub fn mean_cell_norm(grid: &FeatureGrid) -> f32 {
    let mut total = 0f32;
    for cy in 0..grid.height {
        for cx in 0..grid.width {
            total += descriptor_norm(grid.descriptor(cx, cy));
        }
    }
    total / (grid.width * grid.height) as f32
}

#[cfg(test)]
mod tests {
    use super::*;
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

    // rot(x, y) = src(y, H-1-x), the same quarter-turn permutation the
    // sprite rotation uses.
    fn quarter_turn(src: &Frame) -> Frame {
        let mut out = Frame::new(src.height(), src.width());
        for y in 0..out.height() {
            for x in 0..out.width() {
                out.set_pixel(x, y, src.pixel(y, src.height() - 1 - x));
            }
        }
        out
    }

    #[test]
    fn uniform_frame_has_flat_descriptors() {
        let f = Frame::filled(32, 32, [64, 128, 192]);
        let pyr = extract_pyramid(&f).unwrap();
        for grid in [&pyr.shallow, &pyr.mid, &pyr.deep] {
            for cy in 0..grid.height {
                for cx in 0..grid.width {
                    let d = grid.descriptor(cx, cy);
                    for k in 0..8 {
                        assert_eq!(d[k], 0.0);
                    }
                    assert!((d[8] - 64.0 / 255.0).abs() < 1e-6);
                    assert!((d[9] - 128.0 / 255.0).abs() < 1e-6);
                    assert!((d[10] - 192.0 / 255.0).abs() < 1e-6);
                    assert!(d[11].abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn extraction_is_deterministic() {
        let f = random_frame(48, 32, 5);
        assert_eq!(extract_pyramid(&f).unwrap(), extract_pyramid(&f.clone()).unwrap());
    }

    #[test]
    fn too_small_frame_rejected() {
        let f = Frame::filled(15, 32, [0, 0, 0]);
        assert!(extract_pyramid(&f).is_err());
    }

    #[test]
    fn quarter_turn_shifts_orientation_bins_by_two() {
        // square frame with side divisible by every stride so cells of the
        // rotated frame align exactly with cells of the source
        let src = random_frame(64, 64, 11);
        let rot = quarter_turn(&src);
        let ps = extract_pyramid(&src).unwrap();
        let pr = extract_pyramid(&rot).unwrap();
        for (gs, gr) in [
            (&ps.shallow, &pr.shallow),
            (&ps.mid, &pr.mid),
            (&ps.deep, &pr.deep),
        ] {
            let n = gs.width;
            for cy in 0..gs.height {
                for cx in 0..gs.width {
                    // cell (cx, cy) of the rotated frame covers the pixels of
                    // source cell (cy, n-1-cx)
                    let ds = gs.descriptor(cy, n - 1 - cx);
                    let dr = gr.descriptor(cx, cy);
                    for k in 0..8 {
                        let shifted = (k + 2) % 8;
                        assert!(
                            (dr[shifted] - ds[k]).abs() < 1e-4,
                            "cell {cx},{cy} bin {k}: {} vs {}",
                            dr[shifted],
                            ds[k]
                        );
                    }
                    for k in 8..DESCRIPTOR_DIM {
                        assert!((dr[k] - ds[k]).abs() < 1e-5);
                    }
                }
            }
        }
    }

    #[test]
    fn pure_background_residual_is_scaled_negation() {
        let f = random_frame(48, 48, 3);
        let pyr = extract_pyramid(&f).unwrap();
        let res = predict_residual(&f, &pyr, &f, 0.8).unwrap();
        for (pg, rg) in [
            (&pyr.shallow, &res.shallow),
            (&pyr.mid, &res.mid),
            (&pyr.deep, &res.deep),
        ] {
            for cy in 0..pg.height {
                for cx in 0..pg.width {
                    let p = pg.descriptor(cx, cy);
                    let r = rg.descriptor(cx, cy);
                    for k in 0..DESCRIPTOR_DIM {
                        assert!((r[k] + 0.8 * p[k]).abs() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn full_foreground_residual_vanishes() {
        // frame far from the model everywhere: every pixel is foreground, the
        // masked frame equals the frame, so the residual is exactly zero
        let mut rng = rng_from_seed(9);
        let mut f = Frame::new(32, 32);
        for y in 0..32 {
            for x in 0..32 {
                f.set_pixel(x, y, [rng.random_range(160..=255); 3]);
            }
        }
        let dark = Frame::filled(32, 32, [10, 10, 10]);
        let pyr = extract_pyramid(&f).unwrap();
        let res = predict_residual(&f, &pyr, &dark, 0.0).unwrap();
        for rg in [&res.shallow, &res.mid, &res.deep] {
            for cy in 0..rg.height {
                for cx in 0..rg.width {
                    for v in rg.descriptor(cx, cy) {
                        assert_eq!(*v, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn dim_mismatch_rejected() {
        let f = random_frame(32, 32, 1);
        let bg = random_frame(32, 48, 1);
        let pyr = extract_pyramid(&f).unwrap();
        assert!(predict_residual(&f, &pyr, &bg, 0.5).is_err());
    }

    #[test]
    fn zero_residual_is_identity_up_to_normalization() {
        let f = random_frame(40, 24, 7);
        let pyr = extract_pyramid(&f).unwrap();
        let zero = ResidualPyramid {
            shallow: FeatureGrid::zeroed(STRIDE_SHALLOW, 40, 24),
            mid: FeatureGrid::zeroed(STRIDE_MID, 40, 24),
            deep: FeatureGrid::zeroed(STRIDE_DEEP, 40, 24),
        };
        let corrected = correct_deviation(&pyr, &zero).unwrap();
        assert_eq!(corrected, normalize_pyramid(&pyr));
    }

    #[test]
    fn annihilating_residual_yields_zero_vectors() {
        let f = random_frame(32, 32, 13);
        let pyr = extract_pyramid(&f).unwrap();
        let res = ResidualPyramid {
            shallow: negated(&pyr.shallow),
            mid: negated(&pyr.mid),
            deep: negated(&pyr.deep),
        };
        let corrected = correct_deviation(&pyr, &res).unwrap();
        for grid in [&corrected.shallow, &corrected.mid, &corrected.deep] {
            for cy in 0..grid.height {
                for cx in 0..grid.width {
                    for v in grid.descriptor(cx, cy) {
                        assert_eq!(*v, 0.0, "zero vectors must stay zero");
                    }
                }
            }
        }
    }

    fn negated(g: &FeatureGrid) -> FeatureGrid {
        let mut out = g.clone();
        for cy in 0..out.height {
            for cx in 0..out.width {
                for v in out.descriptor_mut(cx, cy) {
                    *v = -*v;
                }
            }
        }
        out
    }

    #[test]
    fn correction_matches_elementwise_oracle() {
        let mut rng = rng_from_seed(21);
        let (w, h) = (16u32, 16u32);
        let rand_grid = |stride: u32, rng: &mut crate::rng::StreamRng| {
            let gw = w.div_ceil(stride);
            let gh = h.div_ceil(stride);
            let data: Vec<f32> = (0..(gw * gh) as usize * DESCRIPTOR_DIM)
                .map(|_| rng.random_range(-2.0..2.0))
                .collect();
            FeatureGrid::from_raw(stride, gw, gh, data).unwrap()
        };
        let pyr = FeaturePyramid {
            shallow: rand_grid(STRIDE_SHALLOW, &mut rng),
            mid: rand_grid(STRIDE_MID, &mut rng),
            deep: rand_grid(STRIDE_DEEP, &mut rng),
        };
        let res = ResidualPyramid {
            shallow: rand_grid(STRIDE_SHALLOW, &mut rng),
            mid: rand_grid(STRIDE_MID, &mut rng),
            deep: rand_grid(STRIDE_DEEP, &mut rng),
        };
        let corrected = correct_deviation(&pyr, &res).unwrap();
        for (pg, rg, cg) in [
            (&pyr.shallow, &res.shallow, &corrected.shallow),
            (&pyr.mid, &res.mid, &corrected.mid),
            (&pyr.deep, &res.deep, &corrected.deep),
        ] {
            for cy in 0..pg.height {
                for cx in 0..pg.width {
                    let p = pg.descriptor(cx, cy);
                    let r = rg.descriptor(cx, cy);
                    let c = cg.descriptor(cx, cy);
                    // independent recomputation of sum-then-clip
                    let sum: Vec<f32> = (0..DESCRIPTOR_DIM).map(|k| p[k] + r[k]).collect();
                    let norm = sum.iter().map(|v| v * v).sum::<f32>().sqrt();
                    let scale = if norm > 1.0 { 1.0 / norm } else { 1.0 };
                    for k in 0..DESCRIPTOR_DIM {
                        assert!((c[k] - sum[k] * scale).abs() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let f = random_frame(32, 32, 2);
        let g = random_frame(48, 32, 2);
        let pyr = extract_pyramid(&f).unwrap();
        let other = extract_pyramid(&g).unwrap();
        let res = ResidualPyramid {
            shallow: other.shallow,
            mid: other.mid,
            deep: other.deep,
        };
        assert!(correct_deviation(&pyr, &res).is_err());
    }

    #[test]
    fn background_suppression_shrinks_norms_monotonically() {
        let f = random_frame(64, 64, 17);
        let pyr = extract_pyramid(&f).unwrap();
        let res = predict_residual(&f, &pyr, &f, 0.8).unwrap();
        let corrected = correct_deviation(&pyr, &res).unwrap();
        for (pg, cg) in [
            (&pyr.shallow, &corrected.shallow),
            (&pyr.mid, &corrected.mid),
            (&pyr.deep, &corrected.deep),
        ] {
            for cy in 0..pg.height {
                for cx in 0..pg.width {
                    let before = descriptor_norm(pg.descriptor(cx, cy));
                    let after = descriptor_norm(cg.descriptor(cx, cy));
                    assert!(after <= before + 1e-6);
                }
            }
        }
    }
}
