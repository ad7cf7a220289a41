//! Collective emission of ordered atomic arrays.
//!
//! Units are fixed once: `k0 = Γ0 = 1`, so lengths are measured in `1/k0`,
//! rates and frequency shifts in `Γ0`, and `λ0 = 2π`.
//!
//! The scalar-level numerics (geometry, Green's tensors, polylogarithms, band
//! formulas, transfer matrices, fits) are generic over [`Real`] and work in
//! `f32` or `f64`. Everything that diagonalizes or solves dense complex
//! matrices is `f64` only: the decay rates of interest reach `1e-8 Γ0`, far
//! below single precision.

pub mod ansatz;
pub mod bands;
pub mod error;
pub mod field;
pub mod fit;
pub mod geometry;
pub mod greens;
pub mod hamiltonian;
pub mod linalg;
pub mod modes;
pub mod polylog;
pub mod real;
pub mod sparse;
pub mod transfer;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use real::Real;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Atom array in double precision.
pub type AtomArray = geometry::AtomArray<f64>;
/// Atom array in single precision.
pub type AtomArray32 = geometry::AtomArray<f32>;
/// Green's tensor in double precision.
pub type GreensTensor = greens::GreensTensor<f64>;
/// Green's tensor in single precision.
pub type GreensTensor32 = greens::GreensTensor<f32>;
/// Pair couplings in double precision.
pub type PairCouplings = greens::PairCouplings<f64>;
/// Transfer-matrix scatterer chain in double precision.
pub type ScattererModel = transfer::ScattererModel<f64>;
/// Unit system in double precision.
pub type UnitSystem = units::UnitSystem<f64>;
