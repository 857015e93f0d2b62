//! Cut-and-project construction, classification and analysis of the rhombic
//! Penrose tiling (P3) and its variant P4.

pub mod analysis;
pub mod document;
pub mod error;
pub mod golden;
pub mod grids;
pub mod labels;
pub mod render;
pub mod tiling;
pub mod transforms;
pub mod windows;

pub use error::{Error, Result};
pub use golden::{canonicalize, GoldenNumber, GoldenVector, IndexVector, PerpVector};
pub use tiling::{Face, Tiling};
pub use labels::{Environment, Family, PrototileType, VertexColor};

