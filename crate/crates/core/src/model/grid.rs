//! Uniform sampling lattices.
//!
//! Every field in the crate lives on one of three lattices. `Grid1D` includes
//! both endpoints; `PolarGrid` and `RadialGrid` are open at the coordinate
//! singularities (the poles and the origin) so that `sin(theta)` and `r` are
//! strictly positive at every sample.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Shared view of a uniformly spaced, strictly increasing lattice.
pub trait UniformGrid {
    fn len(&self) -> usize;
    fn spacing(&self) -> f64;
    fn coord(&self, i: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coords(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.coord(i)).collect()
    }
}

/// Closed interval `[x_min, x_max]` sampled at `n_points` equidistant points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::Grid(format!("need at least 3 points, got {n_points}")));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::Grid(format!("bad bounds [{x_min}, {x_max}]")));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Index of the sample nearest to `x`, clamped to the grid.
    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.x_min) / self.spacing()).round();
        t.clamp(0.0, (self.n_points - 1) as f64) as usize
    }
}

impl UniformGrid for Grid1D {
    fn len(&self) -> usize {
        self.n_points
    }

    fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    fn coord(&self, i: usize) -> f64 {
        // Pin the last sample exactly to x_max.
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }
}

/// Cell-centred polar angles `theta_i = (i + 1/2) pi / n`, open at both poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGrid {
    n_points: usize,
}

impl PolarGrid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::Grid(format!("need at least 3 polar points, got {n_points}")));
        }
        Ok(Self { n_points })
    }

    /// Rejects explicit angle lists that touch or cross a pole.
    pub fn validate_angles(thetas: &[f64]) -> Result<()> {
        for &t in thetas {
            if !(t > 0.0 && t < PI) {
                return Err(Error::Config(format!(
                    "polar sample {t} is not strictly inside (0, pi)"
                )));
            }
        }
        Ok(())
    }

    /// `sin(theta_i)` measured from the nearer pole, which keeps full
    /// relative precision next to `theta = pi`.
    pub fn sin_at(&self, i: usize) -> f64 {
        let k = i.min(self.n_points - 1 - i);
        ((k as f64 + 0.5) * self.spacing()).sin()
    }

    pub fn sines(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.sin_at(i)).collect()
    }
}

impl UniformGrid for PolarGrid {
    fn len(&self) -> usize {
        self.n_points
    }

    fn spacing(&self) -> f64 {
        PI / self.n_points as f64
    }

    fn coord(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }
}

/// Radii `r_i = (i + 1) r_max / n`, open at the origin and closed at `r_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_max: f64,
    n_points: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 {
            return Err(Error::Grid(format!("need at least 3 radial points, got {n_points}")));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::Grid(format!("r_max must be positive, got {r_max}")));
        }
        Ok(Self { r_max, n_points })
    }

    /// Grid with spacing as close as possible to `h`.
    pub fn with_spacing(r_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Grid(format!("spacing must be positive, got {h}")));
        }
        Self::new(r_max, (r_max / h).round().max(3.0) as usize)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }
}

impl UniformGrid for RadialGrid {
    fn len(&self) -> usize {
        self.n_points
    }

    fn spacing(&self) -> f64 {
        self.r_max / self.n_points as f64
    }

    fn coord(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.r_max
        } else {
            (i + 1) as f64 * self.spacing()
        }
    }
}
