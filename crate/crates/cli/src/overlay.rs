//! Draws tracking results onto sequence frames: colored boxes with id tags.
//! The id to color mapping is a fixed hue walk, so the same id always gets
//! the same color.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use mpt_core::frame::Frame;
use mpt_core::motio::{load_mot_file, MotRecord};
use mpt_core::trackers::frame_paths;

/// 3x5 digit glyphs, one u8 of 3 row bits per scanline.
const DIGITS: [[u8; 5]; 10] = [
    [0b111, 0b101, 0b101, 0b101, 0b111],
    [0b010, 0b110, 0b010, 0b010, 0b111],
    [0b111, 0b001, 0b111, 0b100, 0b111],
    [0b111, 0b001, 0b111, 0b001, 0b111],
    [0b101, 0b101, 0b111, 0b001, 0b001],
    [0b111, 0b100, 0b111, 0b001, 0b111],
    [0b111, 0b100, 0b111, 0b101, 0b111],
    [0b111, 0b001, 0b010, 0b010, 0b010],
    [0b111, 0b101, 0b111, 0b101, 0b111],
    [0b111, 0b101, 0b111, 0b001, 0b111],
];

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    [
        ((r + m) * 255.0).round() as u8,
        ((g + m) * 255.0).round() as u8,
        ((b + m) * 255.0).round() as u8,
    ]
}

/// Stable id color: hues walked by the golden angle never repeat closely
/// for nearby ids.
pub fn id_color(id: u32) -> [u8; 3] {
    let hue = (id as f64 * 0.618_033_988_75).fract() * 360.0;
    hsv_to_rgb(hue, 0.85, 0.95)
}

fn put(frame: &mut Frame, x: i64, y: i64, rgb: [u8; 3]) {
    if x >= 0 && y >= 0 && (x as u32) < frame.width() && (y as u32) < frame.height() {
        frame.set_pixel(x as u32, y as u32, rgb);
    }
}

fn draw_box(frame: &mut Frame, rec: &MotRecord, rgb: [u8; 3]) {
    let x0 = rec.box_.x.round() as i64;
    let y0 = rec.box_.y.round() as i64;
    let x1 = rec.box_.right().round() as i64;
    let y1 = rec.box_.bottom().round() as i64;
    for t in 0..2i64 {
        for x in x0..=x1 {
            put(frame, x, y0 + t, rgb);
            put(frame, x, y1 - t, rgb);
        }
        for y in y0..=y1 {
            put(frame, x0 + t, y, rgb);
            put(frame, x1 - t, y, rgb);
        }
    }
}

fn draw_id(frame: &mut Frame, rec: &MotRecord, rgb: [u8; 3]) {
    let digits: Vec<usize> = rec
        .id
        .to_string()
        .bytes()
        .map(|b| (b - b'0') as usize)
        .collect();
    let x0 = rec.box_.x.round() as i64;
    // tag above the box, or inside it when flush with the top edge
    let y0 = {
        let above = rec.box_.y.round() as i64 - 7;
        if above < 0 {
            rec.box_.y.round() as i64 + 3
        } else {
            above
        }
    };
    for (i, &d) in digits.iter().enumerate() {
        let gx = x0 + (i as i64) * 4;
        for (row, bits) in DIGITS[d].iter().enumerate() {
            for col in 0..3i64 {
                if bits >> (2 - col) & 1 == 1 {
                    put(frame, gx + col, y0 + row as i64, rgb);
                }
            }
        }
    }
}

pub fn draw_records(frame: &mut Frame, records: &[MotRecord]) {
    for rec in records {
        let rgb = id_color(rec.id);
        draw_box(frame, rec, rgb);
        draw_id(frame, rec, rgb);
    }
}

/// Render every frame of a sequence with its result boxes drawn in, to
/// `<out>/<frame>.png`.
pub fn render_overlay(sequence: &Path, results: &Path, out: &Path) -> Result<()> {
    let records = load_mot_file(results)
        .with_context(|| format!("loading results {}", results.display()))?;
    let paths = frame_paths(sequence)?;
    if paths.is_empty() {
        anyhow::bail!("no frames under {}", sequence.join("img1").display());
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    for (idx, path) in &paths {
        let mut frame = Frame::load_png(path)?;
        let here: Vec<MotRecord> = records.iter().filter(|r| r.frame == *idx).cloned().collect();
        draw_records(&mut frame, &here);
        frame.save_png(&out.join(format!("{idx:06}.png")))?;
    }
    Ok(())
}
