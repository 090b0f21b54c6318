//! Background flows, Biot–Savart reconstruction and the harmonic component.

pub mod background;
pub mod biot_savart;
pub mod harmonic;

pub use background::{Background, BackgroundKind, BackgroundSpec, RecipeTrace, TangentialSpec, TimeDerivative};
pub use biot_savart::{biot_savart, harmonic_part, recover_velocity};
pub use harmonic::{harmonic_evolve, project_h, project_hc};
