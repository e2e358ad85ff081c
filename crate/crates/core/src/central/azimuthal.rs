//! Azimuthal factor and its constant `alpha_phi`.
//!
//! From `p_phi^2 + 2m Q_phi = alpha_phi^2` with `p_phi = 0`, the amplitude obeys
//! `R_phi'' = -(alpha_phi / hbar)^2 R_phi`; a single-valued real solution needs
//! `alpha_phi = m hbar` with integer `m`.

use crate::error::{Error, Result};
use crate::model::{AzimuthalFactor, AzimuthalParity, MotionMode, Units};
use crate::quantum_potential::azimuthal_quantum_potential;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AzimuthalSolution {
    pub m: u32,
    pub alpha_phi: f64,
    pub parity: AzimuthalParity,
    pub mode: MotionMode,
    /// Closed-form `Q_phi`.
    pub q_phi: f64,
}

impl AzimuthalSolution {
    pub fn factor(&self) -> AzimuthalFactor {
        AzimuthalFactor {
            m: self.m,
            parity: self.parity,
        }
    }
}

/// Rest-mode solution `R_phi = cos(m phi)`, `sin(m phi)` or a constant for `m = 0`.
pub fn solve_azimuthal(m: u32, parity: AzimuthalParity, units: &Units) -> Result<AzimuthalSolution> {
    let parity = match (m, parity) {
        (0, AzimuthalParity::Sin) => {
            return Err(Error::Input("sin(0 phi) vanishes identically; use cos or const".into()))
        }
        (0, _) => AzimuthalParity::Const,
        (_, AzimuthalParity::Const) => {
            return Err(Error::Input(format!(
                "a constant R_phi at rest requires m = 0, got m = {m}"
            )))
        }
        (_, p) => p,
    };
    let factor = AzimuthalFactor { m, parity };
    Ok(AzimuthalSolution {
        m,
        alpha_phi: m as f64 * units.hbar(),
        parity,
        mode: MotionMode::Rest,
        q_phi: azimuthal_quantum_potential(&factor, units),
    })
}

/// Circulating solution: constant `R_phi` and `p_phi = alpha_phi`.
///
/// `alpha_phi` is taken as given; whether it is admissible is decided by the
/// winding diagnostic, not here. The polar factor it pairs with must have been
/// solved for `m = alpha_phi / hbar`, so assembly additionally needs that ratio
/// to be a non-negative integer.
pub fn circulating_azimuthal(alpha_phi: f64, units: &Units) -> Result<AzimuthalSolution> {
    if !alpha_phi.is_finite() || alpha_phi < 0.0 {
        return Err(Error::Input(format!("alpha_phi must be finite and >= 0, got {alpha_phi}")));
    }
    let ratio = alpha_phi / units.hbar();
    Ok(AzimuthalSolution {
        m: ratio.round() as u32,
        alpha_phi,
        parity: AzimuthalParity::Const,
        mode: MotionMode::Circulating,
        q_phi: 0.0,
    })
}
