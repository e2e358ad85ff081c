//! The classical counterpart: the same separated constants with `Q = 0`.
//!
//! Without the quantum potential the constants of motion `p_phi = alpha_phi`,
//! `p_theta^2 + alpha_phi^2 / sin^2 = alpha_theta^2 = L^2` and the radial
//! energy relation hold for any real `L` and any `E` above the effective
//! minimum, so nothing is quantized. The report integrates one orbit and
//! measures how well those relations hold along it.

use crate::dynamics::{integrate_with, ForceField, Integrator, PhasePoint, Trajectory};
use crate::error::{Error, Result};
use crate::model::{CentralPotential, Units};

/// Integration settings for [`classical_reference_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalConfig {
    pub dt: f64,
    pub duration: f64,
    /// Tilt of the orbital plane from the equator, so that both angular
    /// relations are exercised.
    pub inclination: f64,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            duration: 60.0,
            inclination: 0.6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalReport {
    pub energy: f64,
    /// Angular-momentum magnitude `L`.
    pub l: f64,
    pub alpha_theta_sq: f64,
    pub alpha_phi: f64,
    /// Turning radii of the orbit; equal for a circular orbit, and the inner
    /// one is zero for `L = 0`.
    pub r_inner: f64,
    pub r_outer: f64,
    /// `max |p_phi - alpha_phi|`.
    pub phi_residual: f64,
    /// `max |p_theta^2 + p_phi^2 / sin^2 - alpha_theta^2|`.
    pub theta_residual: f64,
    /// `max |p_r^2 + alpha_theta^2 / r^2 + 2mV - 2mE|`.
    pub radial_residual: f64,
    pub trajectory: Trajectory,
}

impl ClassicalReport {
    pub fn max_residual(&self) -> f64 {
        self.phi_residual.max(self.theta_residual).max(self.radial_residual)
    }
}

pub fn classical_reference(potential: &CentralPotential, energy: f64, l: f64, units: &Units) -> Result<ClassicalReport> {
    classical_reference_with(potential, energy, l, units, &ClassicalConfig::default())
}

/// Radii over which the effective potential is searched.
fn search_range(potential: &CentralPotential, units: &Units) -> (f64, f64) {
    match potential {
        CentralPotential::Tabulated(t) => (t.coords()[0], t.coords()[t.coords().len() - 1]),
        _ => {
            let a = potential.natural_length(units);
            (1e-6 * a, 1e4 * a)
        }
    }
}

/// Largest root of `f` in `(lo, hi)` with `f(lo) < 0 < f(hi)`.
fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn classical_reference_with(
    potential: &CentralPotential,
    energy: f64,
    l: f64,
    units: &Units,
    config: &ClassicalConfig,
) -> Result<ClassicalReport> {
    potential.validate()?;
    if !(l >= 0.0 && l.is_finite() && energy.is_finite()) {
        return Err(Error::Input(format!("need finite E and L >= 0, got E = {energy}, L = {l}")));
    }
    if !(config.dt > 0.0 && config.duration > config.dt) {
        return Err(Error::Config("classical orbit needs 0 < dt < duration".into()));
    }
    let m = units.mass();
    let l2 = l * l;
    let v_eff = |r: f64| -> Result<f64> { Ok(potential.value_at(r, units)? + l2 / (2.0 * m * r * r)) };

    // Minimum of V_eff on a logarithmic scan, refined by golden section.
    let (r_lo, r_hi) = search_range(potential, units);
    let n_scan: usize = 4000;
    let ratio = (r_hi / r_lo).powf(1.0 / n_scan as f64);
    let radii: Vec<f64> = (0..=n_scan).map(|k| r_lo * ratio.powi(k as i32)).collect();
    let values = radii.iter().map(|r| v_eff(*r)).collect::<Result<Vec<_>>>()?;
    let k_min = (0..values.len()).min_by(|a, b| values[*a].total_cmp(&values[*b])).unwrap();
    let (mut a, mut b) = (radii[k_min.saturating_sub(1)], radii[(k_min + 1).min(n_scan)]);
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let (c, d) = (b - golden * (b - a), a + golden * (b - a));
        if v_eff(c)? < v_eff(d)? {
            b = d;
        } else {
            a = c;
        }
    }
    let r_min = 0.5 * (a + b);
    let v_min = v_eff(r_min)?;
    let slack = 1e-12 * v_min.abs().max(1.0);
    if energy < v_min - slack {
        return Err(Error::NoOrbit(format!(
            "E = {energy} lies below the effective minimum {v_min} at r = {r_min}"
        )));
    }
    let circular = energy <= v_min + slack;

    let below = |r: f64| v_eff(r).map(|v| v - energy);
    let (r_inner, r_outer) = if circular {
        (r_min, r_min)
    } else {
        if values[n_scan] <= energy {
            return Err(Error::NoOrbit(format!(
                "E = {energy} is not bound within r = {r_hi}"
            )));
        }
        let outer_start = (k_min..=n_scan).find(|k| values[*k] > energy).unwrap();
        let outer = bisect(below, radii[outer_start - 1].max(r_min), radii[outer_start])?;
        let inner = match (0..=k_min).rev().find(|k| values[*k] > energy) {
            Some(k) => bisect(|r| below(r).map(|v| -v), radii[k], radii[k + 1].min(r_min))?,
            None => 0.0,
        };
        (inner, outer)
    };

    // Start at the outer turning point on the x axis, moving in a plane
    // tilted by the inclination.
    let (si, ci) = config.inclination.sin_cos();
    let alpha_phi = l * ci;
    let start = PhasePoint {
        t: 0.0,
        q: vec![r_outer, std::f64::consts::FRAC_PI_2, 0.0],
        p: vec![0.0, -l * si, alpha_phi],
    };
    let inner_edge = if r_inner > 0.0 { 0.5 * r_inner } else { 1e-3 * r_outer };
    let field = ForceField::classical_central(
        potential,
        inner_edge.max(r_lo),
        (2.0 * r_outer).min(r_hi),
        units,
    )?;
    let steps = (config.duration / config.dt).ceil() as usize;
    let trajectory = integrate_with(&field, &start, config.dt, steps, Integrator::Yoshida4, "classical")?;

    let (mut phi_residual, mut theta_residual, mut radial_residual) = (0.0f64, 0.0f64, 0.0f64);
    for p in &trajectory.points {
        let (r, theta) = (p.q[0], p.q[1]);
        let (p_r, p_theta, p_phi) = (p.p[0], p.p[1], p.p[2]);
        let s = theta.sin();
        phi_residual = phi_residual.max((p_phi - alpha_phi).abs());
        let spin = if p_phi == 0.0 { 0.0 } else { p_phi * p_phi / (s * s) };
        theta_residual = theta_residual.max((p_theta * p_theta + spin - l2).abs());
        let v = potential.value_at(r, units)?;
        radial_residual = radial_residual.max((p_r * p_r + l2 / (r * r) + 2.0 * m * (v - energy)).abs());
    }
    Ok(ClassicalReport {
        energy,
        l,
        alpha_theta_sq: l2,
        alpha_phi,
        r_inner,
        r_outer,
        phi_residual,
        theta_residual,
        radial_residual,
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const COULOMB: CentralPotential = CentralPotential::Coulomb { z: 1.0 };

    #[test]
    fn arbitrary_angular_momentum_is_admissible() {
        let rep = classical_reference(&COULOMB, -0.125, 0.7, &Units::default()).unwrap();
        assert!(!rep.trajectory.exited);
        assert!(rep.max_residual() < 1e-8, "{rep:?}");
        // Turning points of -1/r + L^2/2r^2 = E.
        let disc = (1.0f64 - 0.49 * 0.25).sqrt();
        assert!((rep.r_outer - (1.0 + disc) / 0.25).abs() < 1e-9);
        assert!((rep.r_inner - (1.0 - disc) / 0.25).abs() < 1e-9);
        let rs: Vec<f64> = rep.trajectory.points.iter().map(|p| p.q[0]).collect();
        assert!(rs.iter().any(|r| *r < 0.3));
    }

    #[test]
    fn radial_orbit_has_no_angular_momentum() {
        let rep = classical_reference(&COULOMB, -0.125, 0.0, &Units::default()).unwrap();
        assert_eq!(rep.r_inner, 0.0);
        for p in &rep.trajectory.points {
            assert!(p.p[1].abs() < 1e-14 && p.p[2].abs() < 1e-14, "{p:?}");
        }
        // The plunge into the origin ends the integration.
        assert!(rep.trajectory.exited);
    }

    #[test]
    fn circular_orbit_keeps_its_radius() {
        // dV_eff/dr = 0 at r = L^2 / m for V = -1/r, where E = -1 / (2 L^2).
        let l = 1.3;
        let e = -1.0 / (2.0 * l * l);
        let rep = classical_reference(&COULOMB, e, l, &Units::default()).unwrap();
        assert!((rep.r_outer - l * l).abs() < 1e-6);
        let rdot = rep.trajectory.points.iter().map(|p| p.p[0].abs()).fold(0.0, f64::max);
        assert!(rdot < 1e-6, "{rdot}");
    }

    #[test]
    fn harmonic_orbit_conserves_constants() {
        let pot = CentralPotential::Harmonic3d { omega: 1.0 };
        let rep = classical_reference(&pot, 2.5, 1.1, &Units::default()).unwrap();
        assert!(rep.max_residual() < 1e-8, "{}", rep.max_residual());
    }

    #[test]
    fn energy_below_minimum_has_no_orbit() {
        let err = classical_reference(&COULOMB, -1.0, 1.0, &Units::default()).unwrap_err();
        assert!(matches!(err, Error::NoOrbit(_)));
        let unbound = classical_reference(&COULOMB, 0.1, 1.0, &Units::default()).unwrap_err();
        assert!(matches!(unbound, Error::NoOrbit(_)));
    }
}
