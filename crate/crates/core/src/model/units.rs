use crate::error::{Error, Result};

/// Action and mass scales. Natural units (`hbar = mass = 1`) by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    hbar: f64,
    mass: f64,
}

impl Units {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::Units(format!("hbar must be positive, got {hbar}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Units(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { hbar, mass })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `hbar^2 / 2m`, the prefactor of the quantum potential.
    pub fn kinetic_prefactor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }

    /// `2m / hbar^2`, converting energies into squared wavenumbers.
    pub fn wavenumber_factor(&self) -> f64 {
        2.0 * self.mass / (self.hbar * self.hbar)
    }
}

impl Default for Units {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}
