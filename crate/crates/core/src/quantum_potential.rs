//! The quantum potential `Q = -(hbar^2 / 2m) (laplacian R) / R` of sampled amplitudes.
//!
//! Division by `R` is only performed where `|R|` exceeds `node_epsilon * max|R|`;
//! the remaining samples are masked and reported as `NaN`. For eigenstates the
//! identity `Q = E - V` supplies the continuous value across a node, which
//! callers opt into through [`QField1D::continued`].

use crate::central::{frobenius, origin_curvature};
use crate::error::{Error, Result};
use crate::fd::{cosine_derivatives, first_derivative, mirror_extend, second_derivative, second_derivative_pinned, Stencil};
use crate::model::{
    AzimuthalFactor, Grid1D, PolarGrid, RadialGrid, SeparableCentralState, UniformGrid, Units,
};

/// Default node-exclusion threshold, relative to `max|R|`.
pub const NODE_EPSILON: f64 = 1e-6;

/// Ghost samples mirrored across each pole before differencing in `theta`.
const POLE_GHOSTS: usize = 8;
/// Relative size below which cosine coefficients of the polar factor count as rounding.
const COSINE_CUTOFF: f64 = 1e-14;

/// `true` where `|field| < eps * max|field|`.
pub fn node_mask(field: &[f64], eps: f64) -> Vec<bool> {
    let peak = field.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    field.iter().map(|v| v.abs() < eps * peak).collect()
}

fn check_nonzero(field: &[f64]) -> Result<()> {
    if field.iter().all(|v| *v == 0.0) {
        Err(Error::Degenerate("amplitude is identically zero".into()))
    } else {
        Ok(())
    }
}

/// `f'' / f` on unmasked samples, `NaN` elsewhere.
///
/// An end sample that is exactly zero is a Dirichlet wall. The amplitude
/// equation `f'' = (2m/hbar^2)(V - E) f` then gives `f'' = 0` there, which
/// replaces the one-sided closure.
pub fn curvature_ratio(field: &[f64], h: f64, stencil: Stencil, eps: f64) -> Result<(Vec<f64>, Vec<bool>)> {
    check_nonzero(field)?;
    let wall = |v: f64| (v == 0.0).then_some(0.0);
    let ends = (wall(field[0]), wall(field[field.len() - 1]));
    let d2 = second_derivative_pinned(field, h, stencil, ends)?;
    let mask = node_mask(field, eps);
    let ratio = field
        .iter()
        .zip(&d2)
        .zip(&mask)
        .map(|((f, d), &m)| if m { f64::NAN } else { d / f })
        .collect();
    Ok((ratio, mask))
}

/// Quantum potential on a 1D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QField1D {
    pub grid: Grid1D,
    /// `NaN` at masked samples.
    pub q: Vec<f64>,
    pub node_mask: Vec<bool>,
}

impl QField1D {
    /// `(index, Q)` over unmasked samples.
    pub fn unmasked(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.q
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.node_mask[*i])
            .map(|(i, q)| (i, *q))
    }

    /// Fills masked samples with the eigenstate continuation `E - V`.
    pub fn continued(&self, potential: &[f64], energy: f64) -> Vec<f64> {
        self.q
            .iter()
            .zip(&self.node_mask)
            .zip(potential)
            .map(|((q, &m), v)| if m { energy - v } else { *q })
            .collect()
    }

    /// `max |Q + V - E|` over unmasked samples.
    pub fn energy_residual(&self, potential: &[f64], energy: f64) -> f64 {
        self.unmasked()
            .map(|(i, q)| (q + potential[i] - energy).abs())
            .fold(0.0, f64::max)
    }
}

pub fn quantum_potential_1d(amplitude: &[f64], grid: &Grid1D, units: &Units) -> Result<QField1D> {
    quantum_potential_1d_with(amplitude, grid, units, Stencil::default(), NODE_EPSILON)
}

pub fn quantum_potential_1d_with(
    amplitude: &[f64],
    grid: &Grid1D,
    units: &Units,
    stencil: Stencil,
    node_epsilon: f64,
) -> Result<QField1D> {
    if amplitude.len() != grid.len() {
        return Err(Error::Size(format!(
            "{} samples on a {}-point grid",
            amplitude.len(),
            grid.len()
        )));
    }
    let (ratio, node_mask) = curvature_ratio(amplitude, grid.spacing(), stencil, node_epsilon)?;
    let k = units.kinetic_prefactor();
    Ok(QField1D {
        grid: *grid,
        q: ratio.iter().map(|a| -k * a).collect(),
        node_mask,
    })
}

/// `(1/R_r)(1/r^2) d/dr(r^2 dR_r/dr)` computed as `u''/u` with `u = r R_r`.
///
/// The lattice is extended by the origin sample `u(0) = 0` so that the
/// one-sided closure sits at the regular point rather than at `r = h`.
pub fn radial_laplacian_ratio(
    radial: &[f64],
    grid: &RadialGrid,
    stencil: Stencil,
    eps: f64,
) -> Result<(Vec<f64>, Vec<bool>)> {
    radial_laplacian_ratio_pinned(radial, grid, stencil, eps, None)
}

/// As [`radial_laplacian_ratio`], with `u''(0)` prescribed instead of
/// closed one-sidedly. A zero sample at `r_max` is a Dirichlet wall and gets
/// `u'' = 0` there.
pub fn radial_laplacian_ratio_pinned(
    radial: &[f64],
    grid: &RadialGrid,
    stencil: Stencil,
    eps: f64,
    origin_curvature: Option<f64>,
) -> Result<(Vec<f64>, Vec<bool>)> {
    if radial.len() != grid.len() {
        return Err(Error::Size("radial samples do not match the radial grid".into()));
    }
    check_nonzero(radial)?;
    let h = grid.spacing();
    let mut u = Vec::with_capacity(radial.len() + 1);
    u.push(0.0);
    u.extend(radial.iter().enumerate().map(|(i, v)| grid.coord(i) * v));
    let wall = (u[u.len() - 1] == 0.0).then_some(0.0);
    let d2 = second_derivative_pinned(&u, h, stencil, (origin_curvature, wall))?;
    let mask = node_mask(&u[1..], eps);
    let ratio = (0..radial.len())
        .map(|i| if mask[i] { f64::NAN } else { d2[i + 1] / u[i + 1] })
        .collect();
    Ok((ratio, mask))
}

/// `u''(0)` of `u = r R_r` for radial samples `radial` of `state` (possibly
/// rescaled), read off the regular series of the state's radial equation.
pub fn state_origin_curvature(state: &SeparableCentralState, radial: &[f64]) -> Option<f64> {
    let units = &state.units;
    let r0 = state.radial_grid.coord(0);
    let coeffs = state.potential.near_origin_expansion(units, r0);
    let lambda = state.alpha_theta_sq / (units.hbar() * units.hbar());
    let kappa = units.wavenumber_factor();
    let curvature = origin_curvature(coeffs, lambda, kappa)?;
    let unit = frobenius(coeffs, lambda, kappa, state.energy, r0);
    (unit != 0.0 && unit.is_finite()).then(|| curvature * r0 * radial[0] / unit)
}

/// `(1/R_theta)(1/sin) d/dtheta(sin dR_theta/dtheta)`.
///
/// Writing `R_theta = sin^m(theta) P` the ratio is
///
/// ```text
/// m^2 / sin^2 - m (m + 1) + P''/P + (2m + 1) cot(theta) P'/P
/// ```
///
/// where `P` is smooth and even about both poles and the singular
/// `m^2 / sin^2` term stays exact. With `Stencil::Compact` (the high-order
/// choice) `P` is differentiated through its cosine series, which is exact
/// for the polynomials in `cos(theta)` that bound states produce; with
/// `Stencil::Central` it is differenced with mirrored ghost samples.
pub fn polar_laplacian_ratio(
    polar: &[f64],
    grid: &PolarGrid,
    m: u32,
    stencil: Stencil,
    eps: f64,
) -> Result<(Vec<f64>, Vec<bool>)> {
    if polar.len() != grid.len() {
        return Err(Error::Size("polar samples do not match the polar grid".into()));
    }
    check_nonzero(polar)?;
    let h = grid.spacing();
    let mf = m as f64;
    let thetas = grid.coords();
    let sines = grid.sines();
    let p: Vec<f64> = polar
        .iter()
        .zip(&sines)
        .map(|(r, s)| r / s.powi(m as i32))
        .collect();
    let (d1, d2) = match stencil {
        Stencil::Central => {
            let g = POLE_GHOSTS.min(polar.len());
            let ext = mirror_extend(&p, g, 1.0, 1.0);
            let d1 = first_derivative(&ext, h, stencil)?;
            let d2 = second_derivative(&ext, h, stencil)?;
            (d1[g..g + p.len()].to_vec(), d2[g..g + p.len()].to_vec())
        }
        Stencil::Compact => cosine_derivatives(&p, COSINE_CUTOFF),
    };
    let mask = node_mask(polar, eps);
    let ratio = (0..polar.len())
        .map(|j| {
            if mask[j] {
                return f64::NAN;
            }
            let (s, c) = (sines[j], thetas[j].cos());
            mf * mf / (s * s) - mf * (mf + 1.0)
                + (d2[j] + (2.0 * mf + 1.0) * c / s * d1[j]) / p[j]
        })
        .collect();
    Ok((ratio, mask))
}

/// Separated quantum potential `Q = Q_r + Q_theta / r^2 + Q_phi / (r^2 sin^2 theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QFieldSpherical {
    pub radial_grid: RadialGrid,
    pub polar_grid: PolarGrid,
    pub q_r: Vec<f64>,
    pub q_theta: Vec<f64>,
    pub q_phi: f64,
    pub radial_mask: Vec<bool>,
    pub polar_mask: Vec<bool>,
}

impl QFieldSpherical {
    /// Total `Q` at `(r_i, theta_j)`; `None` when either factor is masked.
    pub fn total(&self, i: usize, j: usize) -> Option<f64> {
        if self.radial_mask[i] || self.polar_mask[j] {
            return None;
        }
        let r = self.radial_grid.coord(i);
        let s = self.polar_grid.sin_at(j);
        Some(self.q_r[i] + self.q_theta[j] / (r * r) + self.q_phi / (r * r * s * s))
    }

    /// `max |Q + V - E|` over the unmasked tensor samples.
    pub fn energy_residual(&self, potential: &[f64], energy: f64) -> f64 {
        self.hamiltonian_residual(potential, energy, 0.0, 1.0)
    }

    /// `max |p_phi^2 / (2 mass r^2 sin^2) + Q + V - E|`, the full Hamiltonian
    /// of a state circulating with constant `p_phi`.
    pub fn hamiltonian_residual(&self, potential: &[f64], energy: f64, p_phi: f64, mass: f64) -> f64 {
        self.worst(potential, energy, p_phi, mass, |_| 1.0)
    }

    /// As [`Self::hamiltonian_residual`], divided by `|E| + |V(r)|` per sample.
    pub fn hamiltonian_residual_scaled(&self, potential: &[f64], energy: f64, p_phi: f64, mass: f64) -> f64 {
        self.worst(potential, energy, p_phi, mass, |v| energy.abs() + v.abs())
    }

    fn worst(&self, potential: &[f64], energy: f64, p_phi: f64, mass: f64, scale: impl Fn(f64) -> f64) -> f64 {
        let kinetic = p_phi * p_phi / (2.0 * mass);
        let mut worst = 0.0f64;
        for (i, v) in potential.iter().enumerate() {
            let r2 = self.radial_grid.coord(i).powi(2);
            let sc = scale(*v);
            for j in 0..self.polar_grid.len() {
                if let Some(q) = self.total(i, j) {
                    let s2 = self.polar_grid.sin_at(j).powi(2);
                    worst = worst.max((kinetic / (r2 * s2) + q + v - energy).abs() / sc);
                }
            }
        }
        worst
    }
}

/// `Q_phi = (hbar^2 / 2m) m^2` for the trigonometric forms, zero for a constant.
pub fn azimuthal_quantum_potential(factor: &AzimuthalFactor, units: &Units) -> f64 {
    units.kinetic_prefactor() * factor.curvature_ratio()
}

pub fn quantum_potential_spherical(state: &SeparableCentralState) -> Result<QFieldSpherical> {
    quantum_potential_spherical_with(state, Stencil::default(), NODE_EPSILON)
}

pub fn quantum_potential_spherical_with(
    state: &SeparableCentralState,
    stencil: Stencil,
    node_epsilon: f64,
) -> Result<QFieldSpherical> {
    state.validate()?;
    let k = state.units.kinetic_prefactor();
    let (a_r, radial_mask) = radial_laplacian_ratio_pinned(
        &state.radial,
        &state.radial_grid,
        stencil,
        node_epsilon,
        state_origin_curvature(state, &state.radial),
    )?;
    let (a_t, polar_mask) = polar_laplacian_ratio(
        &state.polar,
        &state.polar_grid,
        state.azimuthal.m,
        stencil,
        node_epsilon,
    )?;
    Ok(QFieldSpherical {
        radial_grid: state.radial_grid,
        polar_grid: state.polar_grid,
        q_r: a_r.iter().map(|a| -k * a).collect(),
        q_theta: a_t.iter().map(|a| -k * a).collect(),
        q_phi: azimuthal_quantum_potential(&state.azimuthal, &state.units),
        radial_mask,
        polar_mask,
    })
}
