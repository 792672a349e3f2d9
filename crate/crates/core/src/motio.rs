//! MOTChallenge-format ground truth and tracker result IO.
//!
//! One CSV line per box: `frame,id,x,y,w,h,conf,class,visibility`, LF line
//! endings, ASCII decimal, 1-based frame indices. Ground truth and tracker
//! results share the format; results carry the tracker score in the `conf`
//! column and may use class `-1`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::BoundingBox;

/// One annotation or result row.
///
/// `class_id` 0 means "no class" and is serialized as `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MotRecord {
    /// 1-based frame index.
    pub frame: u32,
    /// Identity, >= 1.
    pub id: u32,
    pub box_: BoundingBox,
    /// 1 for ground truth; tracker confidence for results.
    pub conf: f64,
    /// Species index in [1, 27] for generated ground truth, 0 for none.
    pub class_id: u32,
    /// Unoccluded-pixel fraction in [0, 1].
    pub visibility: f64,
}

impl MotRecord {
    pub fn new(frame: u32, id: u32, box_: BoundingBox) -> Self {
        MotRecord {
            frame,
            id,
            box_,
            conf: 1.0,
            class_id: 0,
            visibility: 1.0,
        }
    }
}

/// Round half-up to the nearest integer (ties go toward +inf).
pub fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

fn parse_field<T: std::str::FromStr>(raw: &str, line: usize, what: &str) -> Result<T> {
    raw.trim().parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} field {raw:?}"),
    })
}

/// Parse a MOT CSV stream into records sorted by (frame, id).
///
/// Lines must have at least the six `frame,id,x,y,w,h` fields; missing
/// `conf`, `class`, `visibility` default to 1, -1 (stored as 0) and 1.0.
pub fn parse_mot_file(text: &str) -> Result<Vec<MotRecord>> {
    let mut records = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 6 {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected at least 6 comma-separated fields, got {}", fields.len()),
            });
        }
        let frame: u32 = parse_field(fields[0], line_no, "frame")?;
        let id: u32 = parse_field(fields[1], line_no, "id")?;
        if frame == 0 || id == 0 {
            return Err(Error::Parse {
                line: line_no,
                msg: "frame and id are 1-based".into(),
            });
        }
        let x: f64 = parse_field(fields[2], line_no, "x")?;
        let y: f64 = parse_field(fields[3], line_no, "y")?;
        let w: f64 = parse_field(fields[4], line_no, "w")?;
        let h: f64 = parse_field(fields[5], line_no, "h")?;
        let box_ = BoundingBox::new(x, y, w, h).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
        let conf: f64 = match fields.get(6) {
            Some(s) => parse_field(s, line_no, "conf")?,
            None => 1.0,
        };
        let class_id: u32 = match fields.get(7) {
            Some(s) => {
                let v: i64 = parse_field(s, line_no, "class")?;
                match v {
                    -1 => 0,
                    c if c >= 0 => c as u32,
                    _ => {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("class must be -1 or >= 0, got {v}"),
                        })
                    }
                }
            }
            None => 0,
        };
        let visibility: f64 = match fields.get(8) {
            Some(s) => {
                let v: f64 = parse_field(s, line_no, "visibility")?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("visibility {v} outside [0, 1]"),
                    });
                }
                v
            }
            None => 1.0,
        };
        records.push(MotRecord {
            frame,
            id,
            box_,
            conf,
            class_id,
            visibility,
        });
    }
    records.sort_by_key(|r| (r.frame, r.id));
    for pair in records.windows(2) {
        if pair[0].frame == pair[1].frame && pair[0].id == pair[1].id {
            return Err(Error::DuplicateRecord {
                frame: pair[0].frame,
                id: pair[0].id,
            });
        }
    }
    Ok(records)
}

/// Serialize records to the MOT CSV format.
///
/// Pixel fields are rounded half-up to integers; rows are emitted in
/// (frame, id) order regardless of input order.
pub fn serialize_mot_file(records: &[MotRecord]) -> String {
    let mut sorted: Vec<&MotRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.frame, r.id));
    let mut out = String::with_capacity(records.len() * 32);
    for r in sorted {
        let class: i64 = if r.class_id == 0 { -1 } else { r.class_id as i64 };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.frame,
            r.id,
            round_half_up(r.box_.x),
            round_half_up(r.box_.y),
            round_half_up(r.box_.w).max(1),
            round_half_up(r.box_.h).max(1),
            r.conf,
            class,
            r.visibility
        )
        .expect("write to string");
    }
    out
}

pub fn load_mot_file(path: &Path) -> Result<Vec<MotRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mot_file(&text)
}

pub fn save_mot_file(path: &Path, records: &[MotRecord]) -> Result<()> {
    std::fs::write(path, serialize_mot_file(records)).map_err(|e| Error::io(path, e))
}

/// Group records by frame index, ordered.
pub fn by_frame(records: &[MotRecord]) -> BTreeMap<u32, Vec<&MotRecord>> {
    let mut map: BTreeMap<u32, Vec<&MotRecord>> = BTreeMap::new();
    for r in records {
        map.entry(r.frame).or_default().push(r);
    }
    map
}

/// Sequence-level metadata mirrored into `seqinfo.ini`.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceMeta {
    pub name: String,
    pub fps: u32,
    pub width: u32,
    pub height: u32,
    /// Frame count.
    pub length: u32,
    /// Background preset label, e.g. "b3" or "w7".
    pub background_id: String,
}

impl SequenceMeta {
    pub fn to_seqinfo(&self) -> String {
        format!(
            "[Sequence]\nname={}\nimDir=img1\nframeRate={}\nseqLength={}\nimWidth={}\nimHeight={}\nimExt=.png\n",
            self.name, self.fps, self.length, self.width, self.height
        )
    }

    pub fn parse_seqinfo(text: &str) -> Result<SequenceMeta> {
        let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('[') || line.starts_with(';') {
                continue;
            }
            if let Some((k, v)) = line.split_once('=') {
                fields.insert(k.trim(), v.trim());
            }
        }
        let get = |k: &str| -> Result<&str> {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::Config(format!("seqinfo missing key {k}")))
        };
        let num = |k: &str| -> Result<u32> {
            get(k)?
                .parse()
                .map_err(|_| Error::Config(format!("seqinfo key {k} is not a number")))
        };
        let name = get("name")?.to_string();
        let background_id = name.split('-').next().unwrap_or("").to_string();
        Ok(SequenceMeta {
            name,
            fps: num("frameRate")?,
            width: num("imWidth")?,
            height: num("imHeight")?,
            length: num("seqLength")?,
            background_id,
        })
    }

    pub fn load_seqinfo(path: &Path) -> Result<SequenceMeta> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_seqinfo(&text)
    }
}
