//! Numerical checks of the identities that tie the continuity condition to
//! quantization: the `f_r`, `f_theta`, `f_phi` decomposition and its constants
//! `c_phi`, `c_theta`, the flux constants `lambda_*`, the turning-point
//! integrals, the operator ratios `A psi / psi` and the action winding.
//!
//! Every routine works on normalized copies of the amplitude factors, so a
//! report does not change when the amplitude is multiplied by a constant.

mod continuity;
mod ratios;
mod turning;
mod winding;

pub use continuity::{
    continuity_fields, continuity_report, continuity_residual, extract_separation_constants,
    measure_separation_constants, ActionGradients, ContinuityFields, ContinuityReport,
    SeparationConstants, Verdict,
};
pub use ratios::{operator_ratios, OperatorRatioReport, RatioSummary};
pub use turning::{verify_polar_turning_point, verify_turning_point_argument, TurningPointCheck};
pub use winding::{action_winding, closed_phi_loop, state_phase_gradient, Winding};

use crate::error::{Error, Result};
use crate::fd::Stencil;
use crate::quantum_potential::NODE_EPSILON;

/// Tolerances and sample-set sizes shared by the diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsConfig {
    pub stencil: Stencil,
    pub node_epsilon: f64,
    /// Equidistant azimuthal samples (offset by half a step).
    pub phi_samples: usize,
    /// Upper bounds on the radial and polar samples of the operator-ratio set.
    pub radial_samples: usize,
    pub polar_samples: usize,
    /// Bound on `|c|`, `|lambda|` and the continuity residual.
    pub tolerance: f64,
    pub constancy_rel: f64,
    pub constancy_abs: f64,
    /// Bound on `max |p^2/2m + Q + V - E| / (|E| + |V|)`.
    pub energy_tolerance: f64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        Self {
            stencil: Stencil::Compact,
            node_epsilon: NODE_EPSILON,
            phi_samples: 8,
            radial_samples: 400,
            polar_samples: 200,
            tolerance: 1e-10,
            constancy_rel: 1e-6,
            constancy_abs: 1e-9,
            energy_tolerance: 1e-6,
        }
    }
}

impl DiagnosticsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.phi_samples < 4 {
            return Err(Error::Config("phi_samples must be at least 4".into()));
        }
        if self.radial_samples < 2 || self.polar_samples < 2 {
            return Err(Error::Config("operator sample set needs at least 2 points per axis".into()));
        }
        for (name, v) in [
            ("node_epsilon", self.node_epsilon),
            ("tolerance", self.tolerance),
            ("constancy_rel", self.constancy_rel),
            ("constancy_abs", self.constancy_abs),
            ("energy_tolerance", self.energy_tolerance),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be finite and non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

/// Mean and population standard deviation of the finite entries of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub mean: f64,
    pub std_dev: f64,
    pub samples: usize,
}

impl Spread {
    /// `None` when no entry is finite.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return None;
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Some(Self {
            mean,
            std_dev: var.sqrt(),
            samples: v.len(),
        })
    }

    /// Two-sided constancy test; the absolute branch covers zero means.
    pub fn is_constant(&self, rel: f64, abs: f64) -> bool {
        self.std_dev <= abs || self.std_dev <= rel * self.mean.abs()
    }
}

/// Evenly strided indices covering `0..n`, at most `max` of them, always
/// including both ends.
pub(crate) fn strided(n: usize, max: usize) -> Vec<usize> {
    if n <= max {
        return (0..n).collect();
    }
    let stride = (n - 1).div_ceil(max - 1);
    let mut idx: Vec<usize> = (0..n).step_by(stride).collect();
    if *idx.last().unwrap() != n - 1 {
        idx.push(n - 1);
    }
    idx
}


#[cfg(test)]
pub(crate) mod fixtures {
    use crate::central::{coulomb_grid, solve_central_state, CentralRequest};
    use crate::eigensolver::ShootingConfig;
    use crate::model::{AzimuthalParity, CentralPotential, PolarGrid, SeparableCentralState, Units};

    pub fn hydrogen(request: CentralRequest) -> SeparableCentralState {
        let u = Units::default();
        let p = CentralPotential::Coulomb { z: 1.0 };
        let rg = coulomb_grid(&p, request.n, 0.01, &u).unwrap();
        let pg = PolarGrid::new(600).unwrap();
        solve_central_state(&p, &request, &rg, &pg, &u, &ShootingConfig::default()).unwrap()
    }

    pub fn rest(n: u32, l: u32, m: u32) -> SeparableCentralState {
        let parity = if m == 0 { AzimuthalParity::Const } else { AzimuthalParity::Cos };
        hydrogen(CentralRequest::rest(n, l, m, parity))
    }
}
