//! Nanofiber Green's function and the driven dynamics of atoms along the fiber.

pub mod bessel;
pub mod dynamics;
pub mod greens;
pub mod polariton;
pub mod quadrature;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
