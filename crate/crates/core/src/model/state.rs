use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fd::trapezoid;
use crate::model::grid::{Grid1D, PolarGrid, RadialGrid, UniformGrid};
use crate::model::potential::CentralPotential;
use crate::model::units::Units;

/// Scales `field` so that `integral(field^2 * weight) = 1` by the trapezoidal
/// rule, with the first nonzero sample made positive.
pub fn normalize_weighted(field: &[f64], weight: &[f64], h: f64) -> Result<Vec<f64>> {
    if field.len() != weight.len() {
        return Err(Error::Size("field and weight lengths differ".into()));
    }
    let integrand: Vec<f64> = field.iter().zip(weight).map(|(f, w)| f * f * w).collect();
    let norm = trapezoid(&integrand, h);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate(format!(
            "cannot normalize a field with weighted norm {norm}"
        )));
    }
    let sign = match field.iter().find(|v| **v != 0.0) {
        Some(v) if *v < 0.0 => -1.0,
        _ => 1.0,
    };
    let scale = sign / norm.sqrt();
    Ok(field.iter().map(|v| v * scale).collect())
}

/// `integral(R^2 dx) = 1` on a 1D grid, first nonzero sample positive.
pub fn normalize(field: &[f64], grid: &Grid1D) -> Result<Vec<f64>> {
    if field.len() != grid.len() {
        return Err(Error::Size(format!(
            "field has {} samples, grid has {}",
            field.len(),
            grid.len()
        )));
    }
    normalize_weighted(field, &vec![1.0; field.len()], grid.spacing())
}

/// Counts sign changes between consecutive nonzero samples.
pub fn count_sign_changes(samples: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in samples {
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                changes += 1;
            }
            last = v;
        }
    }
    changes
}

/// A bound stationary state in one dimension.
///
/// The action is `S = -E t`, so the momentum field vanishes identically and
/// the particle is at rest wherever it sits. The amplitude may change sign.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryState1D {
    grid: Grid1D,
    amplitude: Vec<f64>,
    energy: f64,
    nodes: usize,
    units: Units,
}

impl StationaryState1D {
    /// Normalizes `amplitude` and counts its interior nodes.
    pub fn new(grid: Grid1D, amplitude: Vec<f64>, energy: f64, units: Units) -> Result<Self> {
        let amplitude = normalize(&amplitude, &grid)?;
        let n = amplitude.len();
        let nodes = count_sign_changes(&amplitude[1..n - 1]);
        Ok(Self {
            grid,
            amplitude,
            energy,
            nodes,
            units,
        })
    }

    /// Takes `amplitude` as already normalized, so stored states reload
    /// bit for bit.
    pub fn from_normalized(grid: Grid1D, amplitude: Vec<f64>, energy: f64, units: Units) -> Result<Self> {
        if amplitude.len() != grid.len() {
            return Err(Error::Size("amplitude does not match the grid".into()));
        }
        if amplitude.iter().all(|v| *v == 0.0) {
            return Err(Error::Degenerate("amplitude identically zero".into()));
        }
        let n = amplitude.len();
        let nodes = count_sign_changes(&amplitude[1..n - 1]);
        Ok(Self {
            grid,
            amplitude,
            energy,
            nodes,
            units,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn units(&self) -> &Units {
        &self.units
    }

    /// Momentum field `dS/dx`; zero for a bound stationary state.
    pub fn momentum(&self) -> Vec<f64> {
        vec![0.0; self.amplitude.len()]
    }
}

/// Angular dependence of the azimuthal amplitude factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AzimuthalParity {
    Cos,
    Sin,
    Const,
}

impl AzimuthalParity {
    pub fn as_str(&self) -> &'static str {
        match self {
            AzimuthalParity::Cos => "cos",
            AzimuthalParity::Sin => "sin",
            AzimuthalParity::Const => "const",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cos" | "e" | "even" => Ok(AzimuthalParity::Cos),
            "sin" | "o" | "odd" => Ok(AzimuthalParity::Sin),
            "const" | "constant" => Ok(AzimuthalParity::Const),
            other => Err(Error::Input(format!("unknown azimuthal parity '{other}'"))),
        }
    }
}

/// Whether the azimuthal momentum vanishes or equals the separation constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MotionMode {
    /// `p_phi = 0`, trigonometric `R_phi`; all momenta vanish.
    Rest,
    /// `R_phi` constant and `p_phi = alpha_phi`.
    Circulating,
}

impl MotionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            MotionMode::Rest => "rest",
            MotionMode::Circulating => "circulating",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rest" => Ok(MotionMode::Rest),
            "circulating" => Ok(MotionMode::Circulating),
            other => Err(Error::Input(format!("unknown motion mode '{other}'"))),
        }
    }
}

/// The closed-form azimuthal amplitude `cos(m phi)`, `sin(m phi)` or `1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AzimuthalFactor {
    pub m: u32,
    pub parity: AzimuthalParity,
}

impl AzimuthalFactor {
    pub fn value(&self, phi: f64) -> f64 {
        let m = self.m as f64;
        match self.parity {
            AzimuthalParity::Cos => (m * phi).cos(),
            AzimuthalParity::Sin => (m * phi).sin(),
            AzimuthalParity::Const => 1.0,
        }
    }

    /// `-(1/R_phi) d^2 R_phi / dphi^2`: `m^2` for the trigonometric forms.
    pub fn curvature_ratio(&self) -> f64 {
        match self.parity {
            AzimuthalParity::Const => 0.0,
            _ => (self.m * self.m) as f64,
        }
    }
}

/// Default azimuthal sample set: `n` equidistant angles offset by half a
/// step, which avoids the zeros of `cos(m phi)` and `sin(m phi)` for `m < n / 2`.
pub fn azimuthal_samples(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (k as f64 + 0.5) * 2.0 * PI / n as f64)
        .collect()
}

/// Quantum numbers attached to a separated central state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuantumNumbers {
    pub n: u32,
    pub l: u32,
    pub m: u32,
}

/// Product-form amplitude `R = R_r(r) R_theta(theta) R_phi(phi)` together with
/// its constants of motion.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableCentralState {
    pub radial_grid: RadialGrid,
    pub radial: Vec<f64>,
    pub polar_grid: PolarGrid,
    pub polar: Vec<f64>,
    pub azimuthal: AzimuthalFactor,
    pub energy: f64,
    pub alpha_theta_sq: f64,
    pub alpha_phi: f64,
    pub mode: MotionMode,
    pub quantum_numbers: QuantumNumbers,
    pub potential: CentralPotential,
    pub units: Units,
}

impl SeparableCentralState {
    /// Checks sample counts, mode/parity compatibility and nontriviality.
    pub fn validate(&self) -> Result<()> {
        if self.radial.len() != self.radial_grid.len() {
            return Err(Error::Size("radial samples do not match the radial grid".into()));
        }
        if self.polar.len() != self.polar_grid.len() {
            return Err(Error::Size("polar samples do not match the polar grid".into()));
        }
        if self.radial.iter().all(|v| *v == 0.0) || self.polar.iter().all(|v| *v == 0.0) {
            return Err(Error::Degenerate("amplitude factor identically zero".into()));
        }
        match (self.mode, self.azimuthal.parity) {
            (MotionMode::Circulating, AzimuthalParity::Const) => {}
            (MotionMode::Circulating, p) => {
                return Err(Error::Input(format!(
                    "circulating mode needs a constant R_phi, got {}",
                    p.as_str()
                )))
            }
            (MotionMode::Rest, AzimuthalParity::Sin) if self.azimuthal.m == 0 => {
                return Err(Error::Input("sin(0 phi) vanishes identically".into()))
            }
            (MotionMode::Rest, AzimuthalParity::Const) if self.azimuthal.m != 0 => {
                return Err(Error::Input(
                    "rest mode with m > 0 needs a trigonometric R_phi".into(),
                ))
            }
            _ => {}
        }
        Ok(())
    }

    /// Azimuthal momentum `dW_phi/dphi`.
    pub fn p_phi(&self) -> f64 {
        match self.mode {
            MotionMode::Rest => 0.0,
            MotionMode::Circulating => self.alpha_phi,
        }
    }

    /// Amplitude at a point of space.
    pub fn amplitude_at(&self, r_index: usize, theta_index: usize, phi: f64) -> f64 {
        self.radial[r_index] * self.polar[theta_index] * self.azimuthal.value(phi)
    }

    /// Returns a copy with every factor multiplied by `c` (the product scales by `c^3`).
    pub fn scaled(&self, c: f64) -> Self {
        let mut s = self.clone();
        s.radial.iter_mut().for_each(|v| *v *= c);
        s.polar.iter_mut().for_each(|v| *v *= c);
        s
    }
}
