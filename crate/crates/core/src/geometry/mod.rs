//! Smooth planar domains and boundary-fitted triangulations.

mod domain;
mod io;
mod mesh;

pub use domain::{CustomDomain, DomainGeometry, DomainKind};
pub use io::{read_mesh, write_mesh};
pub use mesh::{build_mesh, sandwich_constant, MeshQuality, TriMesh, DEFAULT_MIN_ANGLE_DEG};
