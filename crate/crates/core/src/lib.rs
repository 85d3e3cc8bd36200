//! Combinatorial pyramids over image grids.
//!
//! The base level encodes a `W x H` 4-connected grid as a combinatorial map
//! whose darts are oriented pixel cracks. Reduced levels are produced by
//! contraction kernels and by removal kernels of empty self-loops and empty
//! double edges, and are stored implicitly (a level and a kernel state per
//! dart). On top of that the crate answers the region relationships
//! `meets_exists`, `meets_each`, `contains`, `inside` and `composed_of`,
//! all with computations local to the queried vertices.

pub mod boundary;
pub mod containment;
pub mod dart;
pub mod error;
pub mod grid;
pub mod level;
pub mod map;
pub mod merge;
pub mod pyramid;
pub mod raster;
pub mod relations;
pub mod roadsign;

pub use boundary::{angle, Angle, CrackChain, Move, Segment};
pub use dart::Dart;
pub use error::PyramidError;
pub use grid::{build_grid_map, Grid, Point};
pub use level::{Level, VertexId};
pub use map::{CombinatorialMap, MapError, Perm, ValidationReport};
pub use pyramid::{Kernel, KernelState, Pyramid, PyramidRecord};
