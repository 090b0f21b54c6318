//! Grids, fields, volume operators, interpolation and discrete Hölder norms.

pub mod field;
pub mod grid;
pub mod holder;
pub mod interp;
pub mod ops;
pub mod spacetime;
pub mod spectral;
pub mod tridiag;

pub use field::{volume_integral, volume_mean, PlaneField, ScalarField, TangentPlane, VectorField};
pub use grid::{Grid2, Grid3};
pub use holder::{holder_norm, holder_seminorm, x_norm, Axis, HolderNorm, HolderSampling, SpaceTimeSamples};
pub use interp::{interpolate_scalar, interpolate_vector};
pub use ops::{curl3, divergence, gradient};
pub use spacetime::SpaceTimeVelocity;
