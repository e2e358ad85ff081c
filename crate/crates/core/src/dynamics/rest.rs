//! The at-rest test: released with zero momentum, a particle guided by a
//! bound stationary state must not move.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{integrate_canonical, ForceField, PhasePoint};
use crate::error::{Error, Result};

/// Largest admissible displacement, in natural length units.
pub const REST_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum RestOutcome {
    Measured { displacement: f64, passed: bool, exited: bool },
    Skipped { note: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestVerdict {
    pub start: Vec<f64>,
    pub outcome: RestOutcome,
}

impl RestVerdict {
    /// `Some(pass)` for measured points, `None` for skipped ones.
    pub fn passed(&self) -> Option<bool> {
        match self.outcome {
            RestOutcome::Measured { passed, .. } => Some(passed),
            RestOutcome::Skipped { .. } => None,
        }
    }

    pub fn displacement(&self) -> Option<f64> {
        match self.outcome {
            RestOutcome::Measured { displacement, .. } => Some(displacement),
            RestOutcome::Skipped { .. } => None,
        }
    }
}

/// Releases a particle at rest from every sample point and records its
/// largest displacement over `n_steps` of size `dt`. Points inside a node
/// window are skipped. A particle that leaves the domain fails.
pub fn rest_check(
    field: &ForceField,
    samples: &[Vec<f64>],
    dt: f64,
    n_steps: usize,
    tolerance: f64,
) -> Result<Vec<RestVerdict>> {
    if !(tolerance > 0.0) {
        return Err(Error::Input(format!("rest tolerance must be positive, got {tolerance}")));
    }
    samples
        .par_iter()
        .map(|q| {
            if field.q_enabled() && field.in_node_window(q) {
                return Ok(RestVerdict {
                    start: q.clone(),
                    outcome: RestOutcome::Skipped {
                        note: "inside a node-exclusion window".into(),
                    },
                });
            }
            let traj = integrate_canonical(field, &PhasePoint::at_rest(q.clone()), dt, n_steps)?;
            let displacement = traj.max_displacement();
            Ok(RestVerdict {
                start: q.clone(),
                outcome: RestOutcome::Measured {
                    displacement,
                    passed: !traj.exited && displacement < tolerance,
                    exited: traj.exited,
                },
            })
        })
        .collect()
}

/// `count` seeded points drawn uniformly over the field's coordinate box,
/// kept `margin` interpolation cells away from its edges and outside node
/// windows.
pub fn random_interior_points(field: &ForceField, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let margin = 2.0 * field.spacing().unwrap_or(0.0);
    let bounds = field.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0usize;
    while out.len() < count {
        tries += 1;
        if tries > 1000 * count.max(1) {
            return Err(Error::Degenerate("could not draw points outside node windows".into()));
        }
        let q: Vec<f64> = bounds
            .iter()
            .enumerate()
            .map(|(axis, (lo, hi))| {
                // The azimuth is periodic and needs no margin.
                let pad = if axis == 2 { 0.0 } else { margin };
                rng.gen_range(lo + pad..hi - pad)
            })
            .collect();
        if !field.in_node_window(&q) {
            out.push(q);
        }
    }
    Ok(out)
}
