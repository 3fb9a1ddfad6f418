//! Discrete Hopf-harmonic maps of the unit disk: P1 meshes, Dirichlet energy
//! minimization under a Jacobian sign constraint, Hopf differentials and
//! their trajectories, degree, fibers, oscillation and conformal capacity.

pub mod boundary;
pub mod cli;
pub mod energy;
pub mod error;
pub mod gallery;
pub mod hopf;
pub mod linalg;
pub mod mesh;
pub mod topology;

pub use error::{Error, Result};
pub use mesh::{DiscreteMap, UnitDiskMesh, WirtingerField};

