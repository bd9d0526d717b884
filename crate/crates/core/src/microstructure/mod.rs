//! Periodic wall microstructures, exact ray tracing inside one cell, and the
//! reflection kernels they induce after averaging over the entry point.

mod build;
mod kernel;
mod nub;
mod trace;
mod wall;

pub use build::{build_circular_arc, build_elliptic_arc, build_rect_teeth, flat, foreshorten, foreshortening_factor};
pub use kernel::{
    arc_wall, find_atoms, involution_rate, space_averaged_kernel, teeth_wall, trace_many, EmpiricalKernelRow,
    TraceBatch, ATOM_CLUSTER, ATOM_MIN_WEIGHT, MAX_SINGULAR_FRACTION,
};
pub use nub::{attach_nubs, coarse_map, is_nub_piece, nub_maps, NubProfile, NubShape};
pub use trace::{TraceOutcome, CORNER_TOL, DEFAULT_MAX_BOUNCES, GRAZING_TOL};
pub use wall::{Piece, WallProfile};
