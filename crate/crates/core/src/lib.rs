//! Unique sink orientations of hypercubes and the Sink-or-Clash problem.
//!
//! Dimension `i` of the cube is bit `i - 1` of every vertex label and outmap
//! value throughout the crate.

pub mod certificates;
pub mod constructions;
pub mod cube;
pub mod error;
pub mod game;
pub mod lp;
pub mod resolution;
pub mod solvers;
pub mod symmetry;
pub mod text;

pub use cube::{
    clash, face_sink, find_clash, is_uso, is_uso_by_faces, FaceSpec, OutmapTable, OutmapValue,
    PartialOutmapTable, Vertex,
};
pub use error::{Error, Result};
