//! Constructive solver for incompressible Euler flow in a periodic channel
//! with inflow through the top wall and outflow through the bottom wall.

pub mod boundary_data;
pub mod error;
pub mod fields;
pub mod flow_map;
pub mod geometry;
pub mod io;
pub mod pressure;
pub mod recovery;
pub mod solver;
pub mod transport;
