use thiserror::Error;

use crate::geometry::{Cell, GeometryKind};

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown geometry `{0}`")]
    UnknownGeometry(String),
    #[error("level must be at least 1, got {0}")]
    InvalidLevel(i32),
    #[error("window depth {depth} is shallower than level {level}")]
    WindowTooShallow { level: i32, depth: i32 },
    #[error("level {level} exceeds the reachable maximum {max} for {geometry}")]
    LevelUnreachable {
        geometry: GeometryKind,
        level: i32,
        max: i32,
    },
    #[error("anchor weights sum to {0}, not 1")]
    AnchorWeight(String),
    #[error("anchor {0} lies outside the board")]
    AnchorOutside(Cell),
    #[error("field is not a pagoda function: {0} violating jump(s), first {1}")]
    InvalidField(usize, String),
    #[error("field contains a jump of the excluded (a, a, a-1) pattern: {0}")]
    ExcludedPattern(String),
    #[error("cell {0} lies outside the board")]
    CellOutside(Cell),
    #[error("search failed: {0}")]
    Search(String),
    #[error("illegal jump {0}: {1}")]
    IllegalJump(String, &'static str),
    #[error("cannot translate solution: {0}")]
    Translation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
