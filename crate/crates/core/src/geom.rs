//! Axis-aligned box geometry shared by the generator, trackers and scorer.

use crate::error::{Error, Result};

/// Axis-aligned bounding box in pixel coordinates, top-left origin.
///
/// Coordinates are kept as reals internally; rounding to integer pixels
/// happens only when a box is serialized to a results or ground-truth file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    /// Left edge.
    pub x: f64,
    /// Top edge.
    pub y: f64,
    /// Width, strictly positive.
    pub w: f64,
    /// Height, strictly positive.
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        if !(w > 0.0 && h > 0.0) || !x.is_finite() || !y.is_finite() || !w.is_finite() || !h.is_finite()
        {
            return Err(Error::InvalidBox { w, h });
        }
        Ok(BoundingBox { x, y, w, h })
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    /// Box translated by (dx, dy).
    pub fn translated(&self, dx: f64, dy: f64) -> BoundingBox {
        BoundingBox {
            x: self.x + dx,
            y: self.y + dy,
            ..*self
        }
    }

    /// Intersection area with another box, zero when disjoint.
    pub fn intersection_area(&self, other: &BoundingBox) -> f64 {
        let ix = (self.right().min(other.right()) - self.x.max(other.x)).max(0.0);
        let iy = (self.bottom().min(other.bottom()) - self.y.max(other.y)).max(0.0);
        ix * iy
    }
}

/// Intersection over union of two boxes. Symmetric, in [0, 1], zero for
/// disjoint boxes. Clamped: rounding in the area terms can otherwise nudge
/// identical far-from-origin boxes past 1.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter <= 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).min(1.0)
}

/// Detection: a box with a confidence score, tied to a 1-based frame index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub box_: BoundingBox,
    /// Confidence in [0, 1].
    pub score: f64,
    /// 1-based frame index.
    pub frame: u32,
}

impl Detection {
    pub fn new(box_: BoundingBox, score: f64, frame: u32) -> Self {
        debug_assert!((0.0..=1.0).contains(&score));
        Detection { box_, score, frame }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bb(x: f64, y: f64, w: f64, h: f64) -> BoundingBox {
        BoundingBox::new(x, y, w, h).unwrap()
    }

    #[test]
    fn iou_identity_is_one() {
        let b = bb(3.0, 4.0, 17.0, 9.0);
        assert_eq!(iou(&b, &b), 1.0);
    }

    #[test]
    fn iou_disjoint_is_zero() {
        let a = bb(0.0, 0.0, 2.0, 2.0);
        let b = bb(10.0, 10.0, 2.0, 2.0);
        assert_eq!(iou(&a, &b), 0.0);
    }

    #[test]
    fn iou_half_overlap() {
        // inter = 1x2 = 2, union = 4 + 4 - 2 = 6
        let a = bb(0.0, 0.0, 2.0, 2.0);
        let b = bb(1.0, 0.0, 2.0, 2.0);
        let v = iou(&a, &b);
        assert!((v - 1.0 / 3.0).abs() < 1e-12, "got {v}");
    }

    #[test]
    fn degenerate_boxes_rejected() {
        assert!(BoundingBox::new(0.0, 0.0, 0.0, 5.0).is_err());
        assert!(BoundingBox::new(0.0, 0.0, 5.0, -1.0).is_err());
        assert!(BoundingBox::new(f64::NAN, 0.0, 5.0, 5.0).is_err());
    }

    proptest! {
        #[test]
        fn iou_symmetric_and_bounded(
            ax in -50.0..50.0f64, ay in -50.0..50.0f64, aw in 0.1..40.0f64, ah in 0.1..40.0f64,
            bx in -50.0..50.0f64, by in -50.0..50.0f64, bw in 0.1..40.0f64, bh in 0.1..40.0f64,
        ) {
            let a = bb(ax, ay, aw, ah);
            let b = bb(bx, by, bw, bh);
            let ab = iou(&a, &b);
            let ba = iou(&b, &a);
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
            // self-IoU is 1 up to rounding in the interval arithmetic
            prop_assert!(iou(&a, &a) >= 1.0 - 1e-12);
        }
    }
}
