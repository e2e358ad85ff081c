//! Effective potentials `U = V + Q` (or `V` alone) and their forces.
//!
//! A sampled quantum potential is interpolated through combinations that the
//! amplitude equations keep flat for an eigenstate. In one dimension that is
//! `V + Q` itself. For a separated central state the two interpolated fields
//! are
//!
//! ```text
//! G(r)     = V + Q_r + alpha_theta^2 / (2m r^2)
//! K(theta) = Q_theta + alpha_phi^2 / (2m sin^2) - alpha_theta^2 / 2m
//! ```
//!
//! and `U = G(r) + K(theta)/r^2 + (Q_phi - alpha_phi^2/2m) / (r^2 sin^2)`, the last
//! term being exact. For a rest state it vanishes, and for a circulating state
//! it is the `-p_phi^2 / (2m rho^2)` that balances the centrifugal push.

use super::interp::{NodePolicy, SampledAxis};
use super::PhasePoint;
use crate::error::{Error, Result};
use crate::fd::mirror_extend;
use crate::model::{
    CentralPotential, Potential1D, SeparableCentralState, StationaryState1D, UniformGrid, Units,
};
use crate::quantum_potential::{quantum_potential_1d, quantum_potential_spherical};

/// Axis samples kept as ghosts beyond each pole.
const POLE_GHOSTS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
enum LineSource {
    Sampled(SampledAxis),
    Classical(Potential1D),
}

/// Motion on a line segment `[x_min, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineField {
    source: LineSource,
    x_min: f64,
    x_max: f64,
    units: Units,
}

#[derive(Debug, Clone, PartialEq)]
struct SeparatedQ {
    radial: SampledAxis,
    polar: SampledAxis,
    /// `Q_phi - alpha_phi^2 / 2m`.
    azimuthal: f64,
}

/// Motion in three dimensions under a central potential, with or without
/// the separated quantum potential of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralField {
    potential: CentralPotential,
    quantum: Option<SeparatedQ>,
    r_min: f64,
    r_max: f64,
    units: Units,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForceField {
    Line(LineField),
    Central(CentralField),
}

/// `(U, dU/dr, dU/dtheta)` of a central field.
struct SphericalGradient {
    u: f64,
    u_r: f64,
    u_theta: f64,
}

impl ForceField {
    /// `V + Q` of a 1D eigenstate, or `V` alone when `q_enabled` is false.
    pub fn line(state: &StationaryState1D, potential: &Potential1D, q_enabled: bool) -> Result<Self> {
        Self::line_with(state, potential, q_enabled, NodePolicy::Continue)
    }

    pub fn line_with(
        state: &StationaryState1D,
        potential: &Potential1D,
        q_enabled: bool,
        policy: NodePolicy,
    ) -> Result<Self> {
        let grid = state.grid();
        let units = *state.units();
        if !q_enabled {
            return Self::classical_line(potential, grid.x_min(), grid.x_max(), &units);
        }
        let v = potential.evaluate(grid, &units)?;
        let q = quantum_potential_1d(state.amplitude(), grid, &units)?;
        let u = q
            .continued(&v, state.energy())
            .iter()
            .zip(&v)
            .map(|(q, v)| q + v)
            .collect();
        Ok(ForceField::Line(LineField {
            source: LineSource::Sampled(SampledAxis {
                origin: grid.x_min(),
                h: grid.spacing(),
                values: u,
                mask: q.node_mask,
                policy,
            }),
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            units,
        }))
    }

    /// Classical motion under `V` on `[x_min, x_max]`.
    pub fn classical_line(potential: &Potential1D, x_min: f64, x_max: f64, units: &Units) -> Result<Self> {
        potential.validate()?;
        if !(x_min < x_max) {
            return Err(Error::Input(format!("empty segment [{x_min}, {x_max}]")));
        }
        Ok(ForceField::Line(LineField {
            source: LineSource::Classical(potential.clone()),
            x_min,
            x_max,
            units: *units,
        }))
    }

    /// `V + Q` of a separated central state, or `V` alone.
    pub fn central(state: &SeparableCentralState, q_enabled: bool) -> Result<Self> {
        Self::central_with(state, q_enabled, NodePolicy::Continue)
    }

    pub fn central_with(state: &SeparableCentralState, q_enabled: bool, policy: NodePolicy) -> Result<Self> {
        let units = state.units;
        let r_min = state.radial_grid.coord(0);
        let r_max = state.radial_grid.r_max();
        if !q_enabled {
            return Self::classical_central(&state.potential, r_min, r_max, &units);
        }
        let q = quantum_potential_spherical(state)?;
        let v = state.potential.evaluate(&state.radial_grid, &units)?;
        let two_m = 2.0 * units.mass();
        let centrifugal = state.alpha_theta_sq / two_m;
        let spin = state.alpha_phi * state.alpha_phi / two_m;

        let g: Vec<f64> = (0..v.len())
            .map(|i| {
                if q.radial_mask[i] {
                    state.energy
                } else {
                    let r = state.radial_grid.coord(i);
                    v[i] + q.q_r[i] + centrifugal / (r * r)
                }
            })
            .collect();
        let pg = state.polar_grid;
        let k: Vec<f64> = (0..pg.len())
            .map(|j| {
                if q.polar_mask[j] {
                    0.0
                } else {
                    q.q_theta[j] + spin / pg.sin_at(j).powi(2) - centrifugal
                }
            })
            .collect();
        let h = pg.spacing();
        let mask_ext: Vec<f64> = q.polar_mask.iter().map(|m| if *m { 1.0 } else { 0.0 }).collect();
        Ok(ForceField::Central(CentralField {
            potential: state.potential.clone(),
            quantum: Some(SeparatedQ {
                radial: SampledAxis {
                    origin: r_min,
                    h: state.radial_grid.spacing(),
                    values: g,
                    mask: q.radial_mask,
                    policy,
                },
                // K is even about both poles.
                polar: SampledAxis {
                    origin: pg.coord(0) - POLE_GHOSTS as f64 * h,
                    h,
                    values: mirror_extend(&k, POLE_GHOSTS, 1.0, 1.0),
                    mask: mirror_extend(&mask_ext, POLE_GHOSTS, 1.0, 1.0)
                        .iter()
                        .map(|m| *m != 0.0)
                        .collect(),
                    policy,
                },
                azimuthal: q.q_phi - spin,
            }),
            r_min,
            r_max,
            units,
        }))
    }

    /// Classical motion under `V(r)` for `r_min <= r <= r_max`.
    pub fn classical_central(potential: &CentralPotential, r_min: f64, r_max: f64, units: &Units) -> Result<Self> {
        potential.validate()?;
        if !(r_min > 0.0 && r_min < r_max) {
            return Err(Error::Input(format!("bad radial range [{r_min}, {r_max}]")));
        }
        Ok(ForceField::Central(CentralField {
            potential: potential.clone(),
            quantum: None,
            r_min,
            r_max,
            units: *units,
        }))
    }

    /// Number of generalized coordinates: 1 on a line, 3 in space.
    pub fn dim(&self) -> usize {
        match self {
            ForceField::Line(_) => 1,
            ForceField::Central(_) => 3,
        }
    }

    pub fn q_enabled(&self) -> bool {
        match self {
            ForceField::Line(l) => matches!(l.source, LineSource::Sampled(_)),
            ForceField::Central(c) => c.quantum.is_some(),
        }
    }

    pub fn units(&self) -> &Units {
        match self {
            ForceField::Line(l) => &l.units,
            ForceField::Central(c) => &c.units,
        }
    }

    pub fn mass(&self) -> f64 {
        self.units().mass()
    }

    /// True when a Cartesian position lies inside the sampled domain.
    pub(crate) fn contains(&self, x: &[f64]) -> bool {
        match self {
            ForceField::Line(l) => x[0] >= l.x_min && x[0] <= l.x_max,
            ForceField::Central(c) => {
                let r = norm(x);
                r >= c.r_min && r <= c.r_max
            }
        }
    }

    /// True when the interpolation stencil at a generalized position touches
    /// a node-exclusion window of the amplitude.
    pub fn in_node_window(&self, q: &[f64]) -> bool {
        match self {
            ForceField::Line(LineField {
                source: LineSource::Sampled(axis),
                ..
            }) => axis.masked_near(q[0]),
            ForceField::Central(CentralField {
                quantum: Some(sep), ..
            }) => sep.radial.masked_near(q[0]) || sep.polar.masked_near(q[1]),
            _ => false,
        }
    }

    /// Generalized-coordinate bounds: `[(x_min, x_max)]` or `[(r_min, r_max), (0, pi), (0, 2 pi)]`.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        use std::f64::consts::PI;
        match self {
            ForceField::Line(l) => vec![(l.x_min, l.x_max)],
            ForceField::Central(c) => vec![(c.r_min, c.r_max), (0.0, PI), (0.0, 2.0 * PI)],
        }
    }

    /// Interpolation spacing of the sampled fields, if any.
    pub fn spacing(&self) -> Option<f64> {
        match self {
            ForceField::Line(LineField {
                source: LineSource::Sampled(a),
                ..
            }) => Some(a.h),
            ForceField::Central(CentralField {
                quantum: Some(sep), ..
            }) => Some(sep.radial.h.max(sep.polar.h)),
            _ => None,
        }
    }

    fn spherical(&self, c: &CentralField, r: f64, theta: f64) -> Result<SphericalGradient> {
        let Some(sep) = &c.quantum else {
            return Ok(SphericalGradient {
                u: c.potential.value_at(r, &c.units)?,
                u_r: c.potential.derivative_at(r, &c.units)?,
                u_theta: 0.0,
            });
        };
        let (g, dg) = sep.radial.eval(r)?;
        let (k, dk) = sep.polar.eval(theta)?;
        let r2 = r * r;
        let (s, co) = theta.sin_cos();
        let mut grad = SphericalGradient {
            u: g + k / r2,
            u_r: dg - 2.0 * k / (r2 * r),
            u_theta: dk / r2,
        };
        if sep.azimuthal != 0.0 {
            let s2 = s * s;
            grad.u += sep.azimuthal / (r2 * s2);
            grad.u_r -= 2.0 * sep.azimuthal / (r2 * r * s2);
            grad.u_theta -= 2.0 * sep.azimuthal * co / (r2 * s2 * s);
        }
        Ok(grad)
    }

    /// `U` and its Cartesian gradient at Cartesian position `x`.
    pub(crate) fn potential_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self {
            ForceField::Line(l) => match &l.source {
                LineSource::Sampled(axis) => {
                    let (u, du) = axis.eval(x[0])?;
                    Ok((u, vec![du]))
                }
                LineSource::Classical(p) => {
                    Ok((p.value_at(x[0], &l.units)?, vec![p.derivative_at(x[0], &l.units)?]))
                }
            },
            ForceField::Central(c) => {
                let r = norm(x);
                let rho = x[0].hypot(x[1]);
                let theta = rho.atan2(x[2]);
                let g = self.spherical(c, r, theta)?;
                let mut grad: Vec<f64> = x.iter().map(|xi| g.u_r * xi / r).collect();
                // theta-hat / r = (z x / (r^2 rho), z y / (r^2 rho), -rho / r^2)
                if rho > 0.0 && g.u_theta != 0.0 {
                    let f = g.u_theta / (r * r);
                    grad[0] += f * x[2] * x[0] / rho;
                    grad[1] += f * x[2] * x[1] / rho;
                    grad[2] -= f * rho;
                }
                Ok((g.u, grad))
            }
        }
    }

    /// `H = p^2 / 2m + U` at a phase point.
    pub fn hamiltonian(&self, point: &PhasePoint) -> Result<f64> {
        let (x, p) = self.to_cartesian(point)?;
        let (u, _) = self.potential_and_gradient(&x)?;
        Ok(p.iter().map(|v| v * v).sum::<f64>() / (2.0 * self.mass()) + u)
    }

    /// Cartesian position and momentum of a generalized phase point.
    pub(crate) fn to_cartesian(&self, point: &PhasePoint) -> Result<(Vec<f64>, Vec<f64>)> {
        if point.q.len() != self.dim() || point.p.len() != self.dim() {
            return Err(Error::Size(format!(
                "phase point has {} coordinates, the field needs {}",
                point.q.len(),
                self.dim()
            )));
        }
        if self.dim() == 1 {
            return Ok((point.q.clone(), point.p.clone()));
        }
        let (r, theta, phi) = (point.q[0], point.q[1], point.q[2]);
        let (p_r, p_theta, p_phi) = (point.p[0], point.p[1], point.p[2]);
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let r_hat = [st * cp, st * sp, ct];
        let t_hat = [ct * cp, ct * sp, -st];
        let f_hat = [-sp, cp, 0.0];
        if p_phi != 0.0 && st == 0.0 {
            return Err(Error::Domain("nonzero p_phi on the polar axis".into()));
        }
        let a = p_theta / r;
        let b = if p_phi == 0.0 { 0.0 } else { p_phi / (r * st) };
        let x = r_hat.iter().map(|u| r * u).collect();
        let p = (0..3).map(|i| p_r * r_hat[i] + a * t_hat[i] + b * f_hat[i]).collect();
        Ok((x, p))
    }

    /// Generalized phase point of a Cartesian one. `phi_ref` selects the
    /// branch of `phi` nearest to a previous value.
    pub(crate) fn to_phase(&self, x: &[f64], p: &[f64], t: f64, phi_ref: Option<f64>) -> PhasePoint {
        if self.dim() == 1 {
            return PhasePoint { t, q: x.to_vec(), p: p.to_vec() };
        }
        let r = norm(x);
        let rho = x[0].hypot(x[1]);
        let theta = rho.atan2(x[2]);
        let mut phi = x[1].atan2(x[0]);
        if phi < 0.0 {
            phi += 2.0 * std::f64::consts::PI;
        }
        if let Some(prev) = phi_ref {
            let tau = 2.0 * std::f64::consts::PI;
            phi += tau * ((prev - phi) / tau).round();
        }
        let p_r = (0..3).map(|i| p[i] * x[i]).sum::<f64>() / r;
        // p_theta = r p . theta-hat
        let p_theta = if rho > 0.0 {
            (x[2] * (x[0] * p[0] + x[1] * p[1]) / rho) - rho * p[2]
        } else {
            // On the axis take the phi = 0 meridian.
            r * x[2].signum() * p[0]
        };
        let p_phi = x[0] * p[1] - x[1] * p[0];
        PhasePoint {
            t,
            q: vec![r, theta, phi],
            p: vec![p_r, p_theta, p_phi],
        }
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Generalized forces `-dH/dq` at a phase point: `-dU/dx` on a line, and
/// `(-dH/dr, -dH/dtheta, -dH/dphi)` in space, centrifugal terms included.
pub fn effective_force(field: &ForceField, point: &PhasePoint) -> Result<Vec<f64>> {
    let (x, _) = field.to_cartesian(point)?;
    if !field.contains(&x) {
        return Err(Error::Domain(format!("{:?} lies outside the field domain", point.q)));
    }
    match field {
        ForceField::Line(_) => {
            let (_, g) = field.potential_and_gradient(&x)?;
            Ok(vec![-g[0]])
        }
        ForceField::Central(c) => {
            let m = c.units.mass();
            let (r, theta) = (point.q[0], point.q[1]);
            let (p_theta, p_phi) = (point.p[1], point.p[2]);
            let (s, co) = theta.sin_cos();
            let g = field.spherical(c, r, theta)?;
            let r3 = r * r * r;
            let spin = if p_phi == 0.0 { 0.0 } else { p_phi * p_phi / (s * s) };
            let f_r = (p_theta * p_theta + spin) / (m * r3) - g.u_r;
            let f_theta = if p_phi == 0.0 {
                0.0
            } else {
                p_phi * p_phi * co / (m * r * r * s * s * s)
            } - g.u_theta;
            Ok(vec![f_r, f_theta, 0.0])
        }
    }
}
