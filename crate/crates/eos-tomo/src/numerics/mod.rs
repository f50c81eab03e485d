//! Quadrature, special functions, grid containers and curve fitting.

pub mod erfcx;
pub mod fit;
pub mod grid;
pub mod quadrature;

pub use erfcx::{erfc, erfcx, faddeeva};
pub use fit::{fit_gaussian_envelope, EnvelopeFit};
pub use grid::{ComplexGridFunction, UniformGrid};
pub use quadrature::{integrate, integrate_real, Quadrature, QuadratureSpec};
