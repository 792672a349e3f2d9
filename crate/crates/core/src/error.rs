use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid bounding box: w={w}, h={h} (both must be positive and finite)")]
    InvalidBox { w: f64, h: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate record for frame {frame}, id {id}")]
    DuplicateRecord { frame: u32, id: u32 },

    #[error("frame dimensions {got} do not match expected {expected}")]
    DimMismatch { expected: String, got: String },

    #[error("frame {w}x{h} too small: {why}")]
    FrameTooSmall { w: u32, h: u32, why: String },

    #[error("grid shapes do not match: {0}")]
    ShapeMismatch(String),

    #[error("anchor cell ({x}, {y}) outside grid {w}x{h}")]
    AnchorOutOfGrid { x: usize, y: usize, w: usize, h: usize },

    #[error("cannot place {count} sprites in a {w}x{h} frame without excessive overlap")]
    Placement { count: usize, w: u32, h: u32 },

    #[error("missing feature pyramid for {0} frame")]
    MissingPyramid(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Image { path: PathBuf, msg: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
