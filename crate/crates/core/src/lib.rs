//! Numerical laboratory for maximal Fourier restriction to the sphere.
//!
//! Grids and continuum-normalized transforms live in [`grid`], surface
//! quadrature in [`sphere`], the operators in [`ops`], exact exponent
//! bookkeeping in [`exponents`] and the experiment drivers in [`harness`].

pub mod error;
pub mod exponents;
pub mod grid;
pub mod harness;
pub mod ops;
mod separable;
pub mod special;
pub mod sphere;

pub use error::{Error, Result};
pub use exponents::Rational;
pub use grid::{GridFn, GridSpec, ScaleLadder};
pub use ops::ScaleAssignment;
pub use sphere::{SphereFn, SphereRule};
