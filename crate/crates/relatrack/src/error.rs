use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate target box (zero width or height): {0:?}")]
    DegenerateTarget(crate::geometry::BBox),

    #[error("empty frame (zero width or height)")]
    EmptyFrame,

    #[error("{what}: expected {expected}, got {got}")]
    ShapeMismatch {
        what: &'static str,
        expected: String,
        got: String,
    },

    #[error("zero-area roi box")]
    ZeroAreaRoi,

    #[error("roi feature pair is already aligned")]
    AlreadyAligned,

    #[error("relation detector needs a non-empty head set")]
    EmptyHeadSet,

    #[error("dataset needs at least two sequences, got {0}")]
    SingleSequence(usize),

    #[error("sequence {path}: {frames} frames but {annotations} annotation lines")]
    CountMismatch {
        path: PathBuf,
        frames: usize,
        annotations: usize,
    },

    #[error("{path}:{line}: malformed annotation line {line}: {reason}")]
    MalformedAnnotation {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("target ({tw}x{th}) larger than canvas ({cw}x{ch})")]
    TargetTooLarge { tw: u32, th: u32, cw: u32, ch: u32 },

    #[error("non-finite loss at step {step} (cls={cls}, reg={reg}, matching={matching}, lr={lr})")]
    NonFiniteLoss {
        step: usize,
        cls: f32,
        reg: f32,
        matching: f32,
        lr: f64,
    },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
