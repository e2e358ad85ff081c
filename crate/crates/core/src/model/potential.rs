use crate::error::{Error, Result};
use crate::model::grid::{Grid1D, RadialGrid, UniformGrid};
use crate::model::units::Units;

/// Piecewise-linear table of `(coordinate, value)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    coords: Vec<f64>,
    values: Vec<f64>,
}

impl Table {
    pub fn new(coords: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if coords.len() != values.len() || coords.len() < 2 {
            return Err(Error::Input(format!(
                "table needs matching columns with at least 2 rows, got {} and {}",
                coords.len(),
                values.len()
            )));
        }
        if coords.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("table coordinates must increase strictly".into()));
        }
        if values.iter().chain(coords.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Input("table contains non-finite entries".into()));
        }
        Ok(Self { coords, values })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn covers(&self, lo: f64, hi: f64) -> bool {
        let eps = 1e-12 * (self.coords[self.coords.len() - 1] - self.coords[0]);
        lo >= self.coords[0] - eps && hi <= self.coords[self.coords.len() - 1] + eps
    }

    fn segment(&self, x: f64) -> Result<usize> {
        if !self.covers(x, x) {
            return Err(Error::Domain(format!(
                "{x} outside tabulated range [{}, {}]",
                self.coords[0],
                self.coords[self.coords.len() - 1]
            )));
        }
        let j = self.coords.partition_point(|&c| c <= x);
        Ok(j.clamp(1, self.coords.len() - 1) - 1)
    }

    pub fn value_at(&self, x: f64) -> Result<f64> {
        let j = self.segment(x)?;
        let (x0, x1) = (self.coords[j], self.coords[j + 1]);
        let t = (x - x0) / (x1 - x0);
        Ok(self.values[j] * (1.0 - t) + self.values[j + 1] * t)
    }

    pub fn slope_at(&self, x: f64) -> Result<f64> {
        let j = self.segment(x)?;
        Ok((self.values[j + 1] - self.values[j]) / (self.coords[j + 1] - self.coords[j]))
    }
}

/// One-dimensional potentials.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential1D {
    /// Infinite square well on `(0, width)`; the walls enter only as
    /// Dirichlet conditions `R(0) = R(width) = 0`.
    Box { width: f64 },
    /// `m omega^2 x^2 / 2`.
    Harmonic { omega: f64 },
    /// `-depth` for `|x| < width / 2`, zero outside.
    FiniteWell { depth: f64, width: f64 },
    Tabulated(Table),
}

impl Potential1D {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Potential1D::Box { width } => *width > 0.0 && width.is_finite(),
            Potential1D::Harmonic { omega } => *omega > 0.0 && omega.is_finite(),
            Potential1D::FiniteWell { depth, width } => {
                depth.is_finite() && *width > 0.0 && width.is_finite()
            }
            Potential1D::Tabulated(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Input(format!("invalid potential parameters: {self:?}")))
        }
    }

    /// True when both ends of the domain are impenetrable walls.
    pub fn has_hard_walls(&self) -> bool {
        matches!(self, Potential1D::Box { .. })
    }

    pub fn value_at(&self, x: f64, units: &Units) -> Result<f64> {
        match self {
            Potential1D::Box { width } => {
                let tol = 1e-12 * width;
                if x < -tol || x > width + tol {
                    Err(Error::Domain(format!("x = {x} outside box (0, {width})")))
                } else {
                    Ok(0.0)
                }
            }
            Potential1D::Harmonic { omega } => Ok(0.5 * units.mass() * omega * omega * x * x),
            Potential1D::FiniteWell { depth, width } => {
                Ok(if x.abs() < 0.5 * width { -depth } else { 0.0 })
            }
            Potential1D::Tabulated(t) => t.value_at(x),
        }
    }

    /// `dV/dx`, used by the classical force.
    pub fn derivative_at(&self, x: f64, units: &Units) -> Result<f64> {
        match self {
            Potential1D::Box { .. } | Potential1D::FiniteWell { .. } => {
                self.value_at(x, units).map(|_| 0.0)
            }
            Potential1D::Harmonic { omega } => Ok(units.mass() * omega * omega * x),
            Potential1D::Tabulated(t) => t.slope_at(x),
        }
    }

    /// Samples of `V` on `grid`.
    pub fn evaluate(&self, grid: &Grid1D, units: &Units) -> Result<Vec<f64>> {
        self.validate()?;
        if let Potential1D::Tabulated(t) = self {
            if !t.covers(grid.x_min(), grid.x_max()) {
                return Err(Error::Domain(format!(
                    "table [{}, {}] does not cover grid [{}, {}]",
                    t.coords[0],
                    t.coords[t.coords.len() - 1],
                    grid.x_min(),
                    grid.x_max()
                )));
            }
        }
        (0..grid.len())
            .map(|i| self.value_at(grid.coord(i), units))
            .collect()
    }
}

/// Spherically symmetric potentials `V(r)`.
#[derive(Debug, Clone, PartialEq)]
pub enum CentralPotential {
    /// `-Z / r` (atomic units when `hbar = m = 1`).
    Coulomb { z: f64 },
    /// `m omega^2 r^2 / 2`.
    Harmonic3d { omega: f64 },
    Tabulated(Table),
}

impl CentralPotential {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            CentralPotential::Coulomb { z } => *z > 0.0 && z.is_finite(),
            CentralPotential::Harmonic3d { omega } => *omega > 0.0 && omega.is_finite(),
            CentralPotential::Tabulated(t) => t.coords[0] >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Input(format!("invalid central potential: {self:?}")))
        }
    }

    pub fn value_at(&self, r: f64, units: &Units) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {r}")));
        }
        match self {
            CentralPotential::Coulomb { z } => Ok(-z / r),
            CentralPotential::Harmonic3d { omega } => Ok(0.5 * units.mass() * omega * omega * r * r),
            CentralPotential::Tabulated(t) => t.value_at(r),
        }
    }

    pub fn derivative_at(&self, r: f64, units: &Units) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {r}")));
        }
        match self {
            CentralPotential::Coulomb { z } => Ok(z / (r * r)),
            CentralPotential::Harmonic3d { omega } => Ok(units.mass() * omega * omega * r),
            CentralPotential::Tabulated(t) => t.slope_at(r),
        }
    }

    pub fn evaluate(&self, grid: &RadialGrid, units: &Units) -> Result<Vec<f64>> {
        self.validate()?;
        if let CentralPotential::Tabulated(t) = self {
            if !t.covers(grid.coord(0), grid.r_max()) {
                return Err(Error::Domain(format!(
                    "table [{}, {}] does not cover radial grid [{}, {}]",
                    t.coords[0],
                    t.coords[t.coords.len() - 1],
                    grid.coord(0),
                    grid.r_max()
                )));
            }
        }
        (0..grid.len())
            .map(|i| self.value_at(grid.coord(i), units))
            .collect()
    }

    /// Coefficients `[c_-1, c_0, c_1, c_2]` of `V(r) ~ c_-1/r + c_0 + c_1 r + c_2 r^2`
    /// near the origin, used to start the radial series.
    pub fn near_origin_expansion(&self, units: &Units, first_radius: f64) -> [f64; 4] {
        match self {
            CentralPotential::Coulomb { z } => [-z, 0.0, 0.0, 0.0],
            CentralPotential::Harmonic3d { omega } => {
                [0.0, 0.0, 0.0, 0.5 * units.mass() * omega * omega]
            }
            CentralPotential::Tabulated(t) => {
                // Only the leading behaviour is recoverable from samples.
                let v = t.value_at(first_radius).unwrap_or(t.values[0]);
                [0.0, v, 0.0, 0.0]
            }
        }
    }

    /// Characteristic length: the Bohr radius or the oscillator length.
    pub fn natural_length(&self, units: &Units) -> f64 {
        match self {
            CentralPotential::Coulomb { z } => units.hbar() * units.hbar() / (units.mass() * z),
            CentralPotential::Harmonic3d { omega } => (units.hbar() / (units.mass() * omega)).sqrt(),
            CentralPotential::Tabulated(t) => t.coords[t.coords.len() - 1] / 40.0,
        }
    }
}
