//! The unit system: `k0 = Γ0 = 1`.
//!
//! All lengths downstream are in units of `1/k0` and all rates in `Γ0`. The SI
//! constants that appear in the microscopic theory cancel in every observable
//! and never enter the code.

use crate::Real;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem<T> {
    pub k0: T,
    pub gamma0: T,
    pub lambda0: T,
}

impl<T: Real> UnitSystem<T> {
    pub fn natural() -> Self {
        UnitSystem {
            k0: T::one(),
            gamma0: T::one(),
            lambda0: T::TAU(),
        }
    }

    /// Length in units of `1/k0` for a spacing quoted as a fraction of `λ0`.
    pub fn from_wavelengths(&self, fraction: T) -> T {
        fraction * self.lambda0
    }

    /// Spacing as a fraction of `λ0`.
    pub fn in_wavelengths(&self, length: T) -> T {
        length / self.lambda0
    }
}

impl<T: Real> Default for UnitSystem<T> {
    fn default() -> Self {
        Self::natural()
    }
}

/// `d = fraction · λ0` with `λ0 = 2π`.
pub fn wavelengths<T: Real>(fraction: T) -> T {
    fraction * T::TAU()
}
