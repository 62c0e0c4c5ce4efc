//! Simplicial regions with labelled boundary faces, their boundary
//! hypersurfaces, file I/O, built-in generators and gluing.

pub mod builtin;
mod complex;
mod glue;
mod hypersurface;
mod metric;
mod off;
mod region;

pub use builtin::{parse_builtin, BuiltinSpec};
pub use complex::{sort_with_parity, Point, SimplicialComplex};
pub use glue::{glue, Gluing};
pub use hypersurface::{HypersurfaceMesh, OrientedFacet};
pub use metric::{simplex_volume, Metric};
pub use off::{load_off, write_off, LabelSidecar};
pub use region::{RegionMesh, DEFAULT_LABEL};
