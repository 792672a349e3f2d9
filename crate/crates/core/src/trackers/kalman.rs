//! Constant-velocity Kalman filter over box state
//! [cx, cy, w, h, vcx, vcy, vw, vh].
//!
//! The update uses the Joseph form so the covariance stays symmetric
//! positive semidefinite under long random predict/update interleavings.

use nalgebra::{SMatrix, SVector};

use crate::geom::BoundingBox;

type Vec8 = SVector<f64, 8>;
type Mat8 = SMatrix<f64, 8, 8>;
type Vec4 = SVector<f64, 4>;
type Mat4 = SMatrix<f64, 4, 4>;
type Mat4x8 = SMatrix<f64, 4, 8>;

/// Process noise: position/size random walk plus smaller velocity drift.
const Q_POS: f64 = 1.0;
const Q_SIZE: f64 = 1.0;
const Q_VEL: f64 = 0.25;
const Q_SIZE_VEL: f64 = 0.01;
/// Measurement noise (pixels squared) on [cx, cy, w, h].
const R_MEAS: f64 = 1.0;
/// Initial variance: measured components trusted, velocities wide open.
const P0_MEAS: f64 = 10.0;
const P0_VEL: f64 = 100.0;
const P0_SIZE_VEL: f64 = 25.0;

/// Smallest box side the filter will report; keeps predictions valid boxes
/// even if the size velocity runs negative for a while.
const MIN_SIDE: f64 = 1.0;

fn transition() -> Mat8 {
    let mut f = Mat8::identity();
    for i in 0..4 {
        f[(i, i + 4)] = 1.0;
    }
    f
}

fn observation() -> Mat4x8 {
    let mut h = Mat4x8::zeros();
    for i in 0..4 {
        h[(i, i)] = 1.0;
    }
    h
}

fn process_noise() -> Mat8 {
    Mat8::from_diagonal(&Vec8::from_row_slice(&[
        Q_POS, Q_POS, Q_SIZE, Q_SIZE, Q_VEL, Q_VEL, Q_SIZE_VEL, Q_SIZE_VEL,
    ]))
}

fn measurement_of(b: &BoundingBox) -> Vec4 {
    let (cx, cy) = b.center();
    Vec4::new(cx, cy, b.w, b.h)
}

fn box_of(m: &Vec4) -> BoundingBox {
    let w = m[2].max(MIN_SIDE);
    let h = m[3].max(MIN_SIDE);
    BoundingBox::new(m[0] - w / 2.0, m[1] - h / 2.0, w, h).expect("clamped box is valid")
}

/// Filter state for one track.
#[derive(Debug, Clone)]
pub struct KalmanState {
    x: Vec8,
    p: Mat8,
}

impl KalmanState {
    /// Initialize at a measured box with zero velocity.
    pub fn from_box(b: &BoundingBox) -> Self {
        let m = measurement_of(b);
        let mut x = Vec8::zeros();
        for i in 0..4 {
            x[i] = m[i];
        }
        let p = Mat8::from_diagonal(&Vec8::from_row_slice(&[
            P0_MEAS, P0_MEAS, P0_MEAS, P0_MEAS, P0_VEL, P0_VEL, P0_SIZE_VEL, P0_SIZE_VEL,
        ]));
        KalmanState { x, p }
    }

    /// Advance one frame and return the predicted box.
    pub fn predict(&mut self) -> BoundingBox {
        let f = transition();
        self.x = f * self.x;
        self.p = f * self.p * f.transpose() + process_noise();
        self.state_box()
    }

    /// Fold in a measured box (Joseph-form covariance update).
    pub fn update(&mut self, b: &BoundingBox) {
        let h = observation();
        let r = Mat4::from_diagonal_element(R_MEAS);
        let innovation = measurement_of(b) - h * self.x;
        let s = h * self.p * h.transpose() + r;
        let s_inv = s.try_inverse().expect("innovation covariance invertible");
        let k = self.p * h.transpose() * s_inv;
        self.x += k * innovation;
        let i_kh = Mat8::identity() - k * h;
        self.p = i_kh * self.p * i_kh.transpose() + k * r * k.transpose();
    }

    /// Current estimate as a box.
    pub fn state_box(&self) -> BoundingBox {
        box_of(&Vec4::new(self.x[0], self.x[1], self.x[2], self.x[3]))
    }

    pub fn velocity(&self) -> (f64, f64) {
        (self.x[4], self.x[5])
    }

    pub fn covariance(&self) -> &Mat8 {
        &self.p
    }
}
