//! Hamilton's canonical equations under `V + Q`.
//!
//! A bound stationary state has zero momentum everywhere and `Q + V = E`, so
//! every point of space is a fixed point of the flow. The integrators here
//! check that numerically, and with `Q` switched off they show the classical
//! motion that the quantum potential cancels.
//!
//! Integration runs in Cartesian coordinates, where `H = p^2/2m + U(x)` is
//! separable and Stormer-Verlet is explicit. Phase points are reported in the
//! generalized coordinates `(x, p_x)` or `(r, theta, phi, p_r, p_theta, p_phi)`.

mod field;
mod interp;
mod rest;

pub use field::{effective_force, CentralField, ForceField, LineField};
pub use interp::NodePolicy;
pub use rest::{random_interior_points, rest_check, RestOutcome, RestVerdict, REST_TOLERANCE};

use crate::error::{Error, Result};

/// Generalized coordinates and conjugate momenta at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub t: f64,
    /// `[x]` or `[r, theta, phi]`, with `phi` unwrapped along a trajectory.
    pub q: Vec<f64>,
    /// `[p_x]` or `[p_r, p_theta, p_phi]`.
    pub p: Vec<f64>,
}

impl PhasePoint {
    /// A point at rest at time zero.
    pub fn at_rest(q: Vec<f64>) -> Self {
        let p = vec![0.0; q.len()];
        Self { t: 0.0, q, p }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    /// Second-order Stormer-Verlet (leapfrog).
    #[default]
    Verlet,
    /// Fourth-order Yoshida composition of three Verlet steps.
    Yoshida4,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub label: String,
    pub q_enabled: bool,
    pub dt: f64,
    pub steps: usize,
    pub integrator: Integrator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<PhasePoint>,
    /// `H` at every recorded point.
    pub hamiltonian: Vec<f64>,
    /// Cartesian positions, kept for displacement measurements.
    pub positions: Vec<Vec<f64>>,
    pub meta: TrajectoryMeta,
    /// Set when the particle left the field domain; the trajectory stops at
    /// the last point inside.
    pub exited: bool,
}

impl Trajectory {
    pub fn last(&self) -> &PhasePoint {
        self.points.last().expect("trajectories hold at least the initial point")
    }

    /// Largest Cartesian distance from the starting position.
    pub fn max_displacement(&self) -> f64 {
        let x0 = &self.positions[0];
        self.positions
            .iter()
            .map(|x| field::norm(&x.iter().zip(x0).map(|(a, b)| a - b).collect::<Vec<_>>()))
            .fold(0.0, f64::max)
    }
}

fn kick(p: &mut [f64], grad: &[f64], tau: f64) {
    p.iter_mut().zip(grad).for_each(|(p, g)| *p -= tau * g);
}

/// Integrates from `initial` for `n_steps` of size `dt` with Stormer-Verlet.
pub fn integrate_canonical(field: &ForceField, initial: &PhasePoint, dt: f64, n_steps: usize) -> Result<Trajectory> {
    integrate_with(field, initial, dt, n_steps, Integrator::Verlet, "")
}

pub fn integrate_with(
    field: &ForceField,
    initial: &PhasePoint,
    dt: f64,
    n_steps: usize,
    integrator: Integrator,
    label: &str,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Input(format!("time step must be positive, got {dt}")));
    }
    let (mut x, mut p) = field.to_cartesian(initial)?;
    if !field.contains(&x) {
        return Err(Error::Domain(format!("initial point {:?} lies outside the field", initial.q)));
    }
    let m = field.mass();
    let substeps: Vec<f64> = match integrator {
        Integrator::Verlet => vec![dt],
        Integrator::Yoshida4 => {
            let cbrt2 = 2f64.cbrt();
            let w1 = 1.0 / (2.0 - cbrt2);
            vec![w1 * dt, -cbrt2 * w1 * dt, w1 * dt]
        }
    };

    let (mut u, mut grad) = field.potential_and_gradient(&x)?;
    let energy = |u: f64, p: &[f64]| p.iter().map(|v| v * v).sum::<f64>() / (2.0 * m) + u;
    let mut traj = Trajectory {
        points: vec![field.to_phase(&x, &p, initial.t, Some(initial.q.get(2).copied().unwrap_or(0.0)))],
        hamiltonian: vec![energy(u, &p)],
        positions: vec![x.clone()],
        meta: TrajectoryMeta {
            label: label.to_string(),
            q_enabled: field.q_enabled(),
            dt,
            steps: n_steps,
            integrator,
        },
        exited: false,
    };

    'steps: for step in 1..=n_steps {
        for &tau in &substeps {
            kick(&mut p, &grad, 0.5 * tau);
            x.iter_mut().zip(&p).for_each(|(x, p)| *x += tau * p / m);
            if !field.contains(&x) {
                traj.exited = true;
                break 'steps;
            }
            (u, grad) = field.potential_and_gradient(&x)?;
            kick(&mut p, &grad, 0.5 * tau);
        }
        let prev_phi = traj.last().q.get(2).copied();
        let t = initial.t + step as f64 * dt;
        traj.points.push(field.to_phase(&x, &p, t, prev_phi));
        traj.hamiltonian.push(energy(u, &p));
        traj.positions.push(x.clone());
    }
    Ok(traj)
}

/// Runs `n_steps` forward, flips the momentum and runs `n_steps` back.
/// Returns the Cartesian distance between the start and the return point.
pub fn time_reversal_error(field: &ForceField, initial: &PhasePoint, dt: f64, n_steps: usize) -> Result<f64> {
    let out = integrate_canonical(field, initial, dt, n_steps)?;
    if out.exited {
        return Err(Error::Domain("forward leg left the field domain".into()));
    }
    let mut turned = out.last().clone();
    turned.p.iter_mut().for_each(|v| *v = -*v);
    let back = integrate_canonical(field, &turned, dt, n_steps)?;
    if back.exited {
        return Err(Error::Domain("return leg left the field domain".into()));
    }
    let a = &out.positions[0];
    let b = back.positions.last().unwrap();
    Ok(field::norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>()))
}

/// Energy bookkeeping of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyDrift {
    /// `max |H - H_0|`.
    pub max_deviation: f64,
    /// Forward differences `(H_{k+1} - H_k) / dt`.
    pub rate: Vec<f64>,
}

impl EnergyDrift {
    pub fn max_rate(&self) -> f64 {
        self.rate.iter().fold(0.0f64, |m, r| m.max(r.abs()))
    }
}

pub fn energy_drift(trajectory: &Trajectory) -> Result<EnergyDrift> {
    let h = &trajectory.hamiltonian;
    if h.len() < 2 {
        return Err(Error::Input("energy drift needs at least two recorded points".into()));
    }
    let h0 = h[0];
    let rate = trajectory
        .points
        .windows(2)
        .zip(h.windows(2))
        .map(|(p, e)| (e[1] - e[0]) / (p[1].t - p[0].t))
        .collect();
    Ok(EnergyDrift {
        max_deviation: h.iter().map(|e| (e - h0).abs()).fold(0.0, f64::max),
        rate,
    })
}
