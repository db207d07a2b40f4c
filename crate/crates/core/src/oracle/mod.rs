//! Reference solutions on the disk.
//!
//! The arrival time of a shrinking circle is known in closed form, and the
//! regularized problem reduces to a radial two-point problem that is solved
//! here by a scheme entirely separate from the finite-element code.

mod exact;
mod radial;

pub use exact::{exact_disk_arrival_time, ExactDisk};
pub use radial::{radial_regularized_solve, radial_to_2d, RadialProfile, MAX_GRID_N, MIN_GRID_N};
