//! Raster frames: the unit of video.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use image::codecs::png::{CompressionType, FilterType, PngEncoder};
use image::{ExtendedColorType, ImageEncoder, ImageReader};

use crate::error::{Error, Result};

/// An RGB8 raster with a 1-based timestamp index.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    width: u32,
    height: u32,
    /// 1-based frame index within its sequence; 0 for standalone rasters.
    pub index: u32,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(width: u32, height: u32) -> Self {
        Frame {
            width,
            height,
            index: 0,
            data: vec![0; (width * height * 3) as usize],
        }
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        let mut data = Vec::with_capacity((width * height * 3) as usize);
        for _ in 0..width * height {
            data.extend_from_slice(&rgb);
        }
        Frame {
            width,
            height,
            index: 0,
            data,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = ((y * self.width + x) * 3) as usize;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Luma (Rec. 601 weights) as f32 in [0, 1], row-major.
    pub fn luma(&self) -> Vec<f32> {
        self.data
            .chunks_exact(3)
            .map(|p| {
                (0.299 * p[0] as f32 + 0.587 * p[1] as f32 + 0.114 * p[2] as f32) / 255.0
            })
            .collect()
    }

    pub fn same_dims(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn dims_string(&self) -> String {
        format!("{}x{}", self.width, self.height)
    }

    /// Encode as PNG. Uses the fastest compression setting; output bytes
    /// are deterministic for a given frame.
    pub fn png_bytes(&self) -> Result<Vec<u8>> {
        let mut bytes = Vec::new();
        PngEncoder::new_with_quality(&mut bytes, CompressionType::Fast, FilterType::NoFilter)
            .write_image(&self.data, self.width, self.height, ExtendedColorType::Rgb8)
            .map_err(|e| Error::Image {
                path: "<memory>".into(),
                msg: e.to_string(),
            })?;
        Ok(bytes)
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        let bytes = self.png_bytes().map_err(|e| match e {
            Error::Image { msg, .. } => Error::Image {
                path: path.to_path_buf(),
                msg,
            },
            other => other,
        })?;
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        w.write_all(&bytes).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn load_png(path: &Path) -> Result<Frame> {
        let img = ImageReader::open(path)
            .map_err(|e| Error::io(path, e))?
            .decode()
            .map_err(|e| Error::Image {
                path: path.to_path_buf(),
                msg: e.to_string(),
            })?
            .into_rgb8();
        Ok(Frame {
            width: img.width(),
            height: img.height(),
            index: 0,
            data: img.into_raw(),
        })
    }
}

/// Per-pixel, per-channel median over a set of same-sized frames.
///
/// With moving foreground and a static background this recovers the
/// background; it is the model fed to both the blob detector and the
/// feature-deviation correction.
pub fn median_background(frames: &[&Frame]) -> Result<Frame> {
    let first = frames.first().ok_or_else(|| {
        Error::Config("median background needs at least one frame".into())
    })?;
    for f in frames {
        if !f.same_dims(first) {
            return Err(Error::DimMismatch {
                expected: first.dims_string(),
                got: f.dims_string(),
            });
        }
    }
    let n = frames.len();
    let mut out = Frame::new(first.width, first.height);
    let mut column: Vec<u8> = vec![0; n];
    let len = out.data.len();
    for i in 0..len {
        for (k, f) in frames.iter().enumerate() {
            column[k] = f.data[i];
        }
        column.sort_unstable();
        out.data[i] = column[n / 2];
    }
    Ok(out)
}

/// Evenly-spaced sample of at most `max` frames, used to keep the median
/// model cheap on long sequences.
pub fn sample_for_background(frames: &[Frame], max: usize) -> Vec<&Frame> {
    let n = frames.len();
    if n <= max {
        return frames.iter().collect();
    }
    (0..max)
        .map(|i| &frames[i * (n - 1) / (max - 1)])
        .collect()
}
