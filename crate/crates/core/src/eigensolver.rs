//! Bound states of `R'' + (2m/hbar^2)(E - V) R = 0` on a 1D grid.
//!
//! A state at rest has `p = 0`, so the canonical equations reduce to this
//! amplitude equation and the spectrum follows from shooting alone.

use crate::error::{Error, Result};
use crate::model::{count_sign_changes, Grid1D, Potential1D, StationaryState1D, UniformGrid, Units};
use crate::numerov::{locate_many, march, Eigenpair, ShootingProblem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    /// Search interval; `None` derives one from the potential.
    pub energy_bracket: Option<(f64, f64)>,
    pub max_states: usize,
    /// Relative width at which count bisection hands over to root polishing.
    pub bisection_tol: f64,
    /// Matching position used when the trial energy has no turning point.
    pub match_point: f64,
    /// Largest admissible `R^2` next to a soft boundary, relative to `max R^2`.
    pub decay_threshold: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            energy_bracket: None,
            max_states: 10,
            bisection_tol: 1e-10,
            match_point: 0.5,
            decay_threshold: 1e-8,
        }
    }
}

impl ShootingConfig {
    pub fn with_states(max_states: usize) -> Self {
        Self {
            max_states,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((lo, hi)) = self.energy_bracket {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!("energy bracket [{lo}, {hi}] is empty")));
            }
        }
        if !(self.match_point > 0.0 && self.match_point < 1.0) {
            return Err(Error::Config(format!(
                "match_point must lie in (0, 1), got {}",
                self.match_point
            )));
        }
        if !(self.bisection_tol > 0.0) || !(self.decay_threshold > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.max_states == 0 {
            return Err(Error::Config("max_states must be at least 1".into()));
        }
        Ok(())
    }
}

/// Dirichlet line problem: `k^2 = (2m/hbar^2)(E - V)`, `R = 0` at both ends.
pub(crate) struct LineProblem {
    pub potential: Vec<f64>,
    pub h: f64,
    pub factor: f64,
    pub match_point: f64,
}

impl ShootingProblem for LineProblem {
    fn len(&self) -> usize {
        self.potential.len()
    }
    fn spacing(&self) -> f64 {
        self.h
    }
    fn k2(&self, e: f64) -> Vec<f64> {
        self.potential.iter().map(|v| self.factor * (e - v)).collect()
    }
    fn left_start(&self, _e: f64) -> Vec<f64> {
        vec![0.0, self.h]
    }
    fn right_start(&self, _e: f64) -> Vec<f64> {
        vec![0.0, self.h]
    }
    fn fallback_match(&self) -> f64 {
        self.match_point
    }
}

fn sampled_potential(potential: &Potential1D, grid: &Grid1D, units: &Units) -> Result<Vec<f64>> {
    let v = potential.evaluate(grid, units)?;
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::Input(format!(
            "potential is not finite at x = {}",
            grid.coord(i)
        )));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// A single shot across the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    /// Samples in natural grid order.
    pub samples: Vec<f64>,
    /// `R'/R` at the match point.
    pub log_derivative: f64,
    /// Sign changes strictly inside the grid.
    pub nodes: usize,
}

/// Integrates from one boundary across the whole grid at trial energy `e`.
pub fn shoot(
    potential: &Potential1D,
    e: f64,
    grid: &Grid1D,
    units: &Units,
    direction: Direction,
    match_point: f64,
) -> Result<Shot> {
    let v = sampled_potential(potential, grid, units)?;
    let n = v.len();
    let h = grid.spacing();
    let factor = units.wavenumber_factor();
    let mut k2: Vec<f64> = v.iter().map(|x| factor * (e - x)).collect();
    if direction == Direction::Backward {
        k2.reverse();
    }
    let mut samples = march(&k2, h, &[0.0, h], n - 1);
    if direction == Direction::Backward {
        samples.reverse();
    }
    let m = ((match_point * (n - 1) as f64).round() as usize).clamp(1, n - 2);
    let log_derivative = (samples[m + 1] - samples[m - 1]) / (2.0 * h * samples[m]);
    let nodes = count_sign_changes(&samples[1..n - 1]);
    Ok(Shot {
        samples,
        log_derivative,
        nodes,
    })
}

/// Per-state convergence record.
#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub index: usize,
    pub bisection_steps: usize,
    /// Normalized Casoratian at the converged energy.
    pub mismatch: f64,
    /// `max |R'' + (2m/hbar^2)(E - V) R| h^2 / max|R|` over interior unmasked samples.
    pub residual: f64,
}

/// A state the solver found but refused to return.
#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub index: usize,
    pub energy: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult1D {
    pub states: Vec<StationaryState1D>,
    pub convergence: Vec<Convergence>,
    pub rejected: Vec<Rejection>,
    /// Set when the bracket held fewer states than requested.
    pub partial: bool,
    pub warnings: Vec<String>,
}

/// Eigenstate residual of the amplitude equation, scaled by `h^2 / max|R|`.
pub fn eigen_residual(amplitude: &[f64], potential: &[f64], energy: f64, h: f64, factor: f64) -> f64 {
    let peak = amplitude.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mask = crate::quantum_potential::node_mask(amplitude, crate::quantum_potential::NODE_EPSILON);
    (1..amplitude.len() - 1)
        .filter(|&i| !mask[i])
        .map(|i| {
            let d2 = amplitude[i + 1] - 2.0 * amplitude[i] + amplitude[i - 1];
            (d2 + h * h * factor * (energy - potential[i]) * amplitude[i]).abs() / peak
        })
        .fold(0.0, f64::max)
}

/// Default search interval for a sampled potential.
fn default_bracket(v: &[f64], hard_walls: bool, width: f64, states: usize, units: &Units) -> (f64, f64) {
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = min - 1e-9 * min.abs().max(1.0);
    let hi = if hard_walls {
        let k = (states + 1) as f64 * std::f64::consts::PI / width;
        max + units.kinetic_prefactor() * k * k
    } else {
        v[0].min(v[v.len() - 1])
    };
    (lo, hi)
}

pub fn solve_bound_states_1d(
    potential: &Potential1D,
    grid: &Grid1D,
    units: &Units,
    config: &ShootingConfig,
) -> Result<SpectrumResult1D> {
    config.validate()?;
    let v = sampled_potential(potential, grid, units)?;
    let hard = potential.has_hard_walls();
    let (lo, hi) = config.energy_bracket.unwrap_or_else(|| {
        default_bracket(&v, hard, grid.x_max() - grid.x_min(), config.max_states, units)
    });
    if !(lo < hi) {
        return Err(Error::Config(format!(
            "no room for bound states: bracket [{lo}, {hi}]"
        )));
    }
    let problem = LineProblem {
        potential: v.clone(),
        h: grid.spacing(),
        factor: units.wavenumber_factor(),
        match_point: config.match_point,
    };

    let first = crate::numerov::eigenvalue_count(&problem, lo);
    let last = crate::numerov::eigenvalue_count(&problem, hi);
    let available = last.saturating_sub(first);
    let wanted = config.max_states.min(available);
    let mut warnings = Vec::new();
    let partial = wanted < config.max_states;
    if partial {
        warnings.push(format!(
            "bracket [{lo:.6e}, {hi:.6e}] holds {available} states, {} requested",
            config.max_states
        ));
    }

    let indices: Vec<usize> = (first..first + wanted).collect();
    let found = locate_many(&problem, &indices, lo, hi, config.bisection_tol);

    let mut states = Vec::new();
    let mut convergence = Vec::new();
    let mut rejected = Vec::new();
    for (k, pair) in indices.iter().zip(found) {
        let pair: Eigenpair = pair?;
        let state = StationaryState1D::new(*grid, pair.samples, pair.energy, *units)?;
        let r = state.amplitude();
        let n = r.len();
        if state.nodes() != *k {
            rejected.push(Rejection {
                index: *k,
                energy: pair.energy,
                reason: format!("expected {k} nodes, found {}", state.nodes()),
            });
            continue;
        }
        if !hard {
            let peak = r.iter().fold(0.0f64, |a, x| a.max(x * x));
            let edge = (r[1] * r[1]).max(r[n - 2] * r[n - 2]) / peak;
            if edge > config.decay_threshold {
                rejected.push(Rejection {
                    index: *k,
                    energy: pair.energy,
                    reason: format!(
                        "density at the boundary is {edge:.3e} of its peak; potential does not confine this state"
                    ),
                });
                continue;
            }
        }
        convergence.push(Convergence {
            index: *k,
            bisection_steps: pair.bisection_steps,
            mismatch: pair.mismatch,
            residual: eigen_residual(r, &v, pair.energy, grid.spacing(), units.wavenumber_factor()),
        });
        states.push(state);
    }
    for r in &rejected {
        warnings.push(format!("state {} rejected: {}", r.index, r.reason));
    }
    Ok(SpectrumResult1D {
        states,
        convergence,
        rejected,
        partial,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn box_grid(n: usize) -> Grid1D {
        Grid1D::new(0.0, 1.0, n).unwrap()
    }

    #[test]
    fn forward_shot_at_first_box_level() {
        let u = Units::default();
        let p = Potential1D::Box { width: 1.0 };
        let g = box_grid(2001);
        let s = shoot(&p, PI * PI / 2.0, &g, &u, Direction::Forward, 0.5).unwrap();
        assert_eq!(s.nodes, 0);
        let peak = s.samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(s.samples[2000].abs() / peak < 1e-6);
        let s2 = shoot(&p, 2.0 * PI * PI, &g, &u, Direction::Forward, 0.5).unwrap();
        assert_eq!(s2.nodes, 1);
    }

    #[test]
    fn shot_far_below_potential_grows_monotonically() {
        let u = Units::default();
        let p = Potential1D::Harmonic { omega: 1.0 };
        let g = Grid1D::new(-5.0, 5.0, 501).unwrap();
        let s = shoot(&p, -10.0, &g, &u, Direction::Backward, 0.5).unwrap();
        assert_eq!(s.nodes, 0);
        assert!(s.samples.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn box_spectrum_and_eigenfunctions() {
        let u = Units::default();
        let g = box_grid(2001);
        let res = solve_bound_states_1d(&Potential1D::Box { width: 1.0 }, &g, &u, &ShootingConfig::default())
            .unwrap();
        assert_eq!(res.states.len(), 10);
        for (k, s) in res.states.iter().enumerate() {
            let n = (k + 1) as f64;
            let exact = n * n * PI * PI / 2.0;
            assert!((s.energy() - exact).abs() / exact < 1e-6);
            assert_eq!(s.nodes(), k);
            let dist = g
                .coords()
                .iter()
                .zip(s.amplitude())
                .map(|(x, r)| (r - 2f64.sqrt() * (n * PI * x).sin()).abs())
                .fold(0.0, f64::max);
            assert!(dist < 1e-5, "n={n} {dist}");
        }
        assert!(res.convergence.iter().all(|c| c.residual < 1e-6));
    }

    #[test]
    fn harmonic_spectrum() {
        let u = Units::default();
        let g = Grid1D::new(-8.0, 8.0, 2001).unwrap();
        let res = solve_bound_states_1d(&Potential1D::Harmonic { omega: 1.0 }, &g, &u, &ShootingConfig::default())
            .unwrap();
        assert!(res.rejected.is_empty(), "{:?}", res.warnings);
        assert_eq!(res.states.len(), 10);
        for (k, s) in res.states.iter().enumerate() {
            let exact = k as f64 + 0.5;
            assert!((s.energy() - exact).abs() / exact < 1e-6, "{k}: {}", s.energy());
        }
        assert_eq!(res.states[0].nodes(), 0);
    }

    #[test]
    fn shallow_well_gives_partial_result() {
        let u = Units::default();
        let g = Grid1D::new(-10.0, 10.0, 2001).unwrap();
        let p = Potential1D::FiniteWell { depth: 1.0, width: 2.0 };
        let res = solve_bound_states_1d(&p, &g, &u, &ShootingConfig::with_states(5)).unwrap();
        assert!(res.partial);
        // 2 a sqrt(2 m V0) / (pi hbar) = 2 sqrt(2)/pi -> one even and (just) no odd state
        assert_eq!(res.states.len(), 1);
        assert!(res.states[0].energy() < 0.0);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut c = ShootingConfig { match_point: 1.5, ..ShootingConfig::default() };
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c = ShootingConfig { energy_bracket: Some((2.0, 1.0)), ..ShootingConfig::default() };
        assert!(c.validate().is_err());
    }
}
