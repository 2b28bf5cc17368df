//! Quantitative direct sampling for inverse medium scattering from
//! multi-frequency backscattering data.
//!
//! The crate synthesizes Born-approximate (and, at small scale, exact
//! Lippmann–Schwinger) backscattering data for analytic contrast phantoms and
//! reconstructs the contrast pointwise with two explicit indicator functionals,
//! one for far-field patterns and one for near-field data on a sphere.

pub mod analysis;
pub mod error;
pub mod field;
pub mod forward;
pub mod geometry;
pub mod inversion;
pub mod io;
pub mod phantoms;
pub mod specialfun;

pub use num_complex::Complex64;

pub use error::{QdsmError, Result};
pub use field::ComplexField;
pub use forward::{MeasurementSet, ForwardModel};
pub use geometry::{
    fibonacci_sphere_directions, make_wavenumbers, uniform_circle_directions, Dim, DirectionSet,
    MeasurementGeometry, Point, SamplingGrid, WavenumberSet,
};
pub use inversion::{indicator_far, indicator_near};
pub use phantoms::ContrastPhantom;
