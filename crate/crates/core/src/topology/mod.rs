//! Topological diagnostics of discrete maps: fibers of small balls, degree
//! in preimage, monotonicity verdicts, oscillation and conformal capacity.

mod capacity;
mod degree;
mod fibers;
mod geometry;
mod oscillation;

pub use capacity::{capacity, capacity_blowup_profile, disk_plate, segment_plate, Condenser};
pub use degree::{degree_equality_check, degree_in_preimage, DegreeComponent, DegreeEquality, DegreeReport};
pub use fibers::{
    default_fiber_radius, fiber_components, image_grid, interior_grid, monotonicity_report, FiberComponent, FiberSample,
    MonotonicityReport, Verdict,
};
pub use geometry::{disk_polygon_area, segment_hits_disk, triangle_hits_disk};
pub use oscillation::{
    oscillation_decay_check, oscillation_profile, DecayCheck, OscillationSample, DECAY_CONSTANT_PER_K2,
};
