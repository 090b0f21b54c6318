//! Boundary calculus on surface patches and the channel walls.

pub mod calculus;
pub mod channel;
pub mod patch;
pub mod pointwise;

pub use calculus::{PatchGrid, PatchTangent};
pub use channel::{BoundaryKind, ChannelDomain, Wall, WallCalculus};
pub use patch::{Frame, SurfacePatch};
pub use pointwise::{cross_tangential, perp, tangential_decompose};
