//! Exact bounds and minimum army sizes for solitaire-army puzzles on five
//! board geometries: Conway's, skew, diagonal, hexagonal and Pablito's.
//!
//! Weights live in Z[σ] with σ = (√5 − 1)/2, so every slack comparison is
//! exact.

pub mod bounds;
pub mod cli;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod pagoda;
pub mod sigma;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{BoardWindow, Cell, GeometryKind, Jump};
pub use sigma::SigmaValue;
