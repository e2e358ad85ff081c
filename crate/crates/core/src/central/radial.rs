//! Radial factor through `u = r R_r`:
//!
//! ```text
//! u'' + [(2m/hbar^2)(E - V(r)) - lambda / r^2] u = 0,   u(0) = 0,
//! ```
//!
//! with `lambda = alpha_theta^2 / hbar^2`. The first sample comes from the
//! Frobenius series `u = r^s sum a_k r^k`, `s(s - 1) = lambda`. When `u''` is
//! finite at the origin the second one is a Numerov step from `u(0) = 0`, so
//! the recurrence holds from the very first sample; otherwise it is also
//! taken from the series.

use crate::eigensolver::ShootingConfig;
use crate::error::{Error, Result};
use crate::model::{normalize_weighted, CentralPotential, RadialGrid, UniformGrid, Units};
use crate::numerov::{eigenvalue_count, locate_many, ShootingProblem};

const SERIES_TERMS: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    /// Radial node count.
    pub n_r: u32,
    pub energy: f64,
    /// The separation constant the equation was solved with.
    pub alpha_theta_sq: f64,
    /// `R_r`, normalized to `integral R_r^2 r^2 dr = 1`.
    pub samples: Vec<f64>,
    pub grid: RadialGrid,
    pub bisection_steps: usize,
    /// Normalized Casoratian at the converged energy.
    pub mismatch: f64,
}

impl RadialSolution {
    /// Orbital number implied by `alpha_theta_sq = l (l + 1) hbar^2`, if integral.
    pub fn orbital(&self, units: &Units) -> Option<u32> {
        let lambda = self.alpha_theta_sq / (units.hbar() * units.hbar());
        let l = (-0.5 + (0.25 + lambda).sqrt()).round();
        ((l * (l + 1.0) - lambda).abs() < 1e-6 * lambda.max(1.0)).then_some(l as u32)
    }
}

/// Indicial exponent of the regular solution.
fn exponent(lambda: f64) -> f64 {
    0.5 + (0.25 + lambda).sqrt()
}

/// Regular solution `u(r)` from the series about the origin.
pub fn frobenius(coeffs: [f64; 4], lambda: f64, kappa: f64, e: f64, r: f64) -> f64 {
    let s = exponent(lambda);
    let [cm1, c0, c1, c2] = coeffs;
    let mut a = [0.0f64; 5];
    a[0] = 1.0;
    let mut sum = 1.0;
    let mut rp = 1.0;
    for k in 1..SERIES_TERMS {
        let kf = k as f64;
        let next = kappa * (cm1 * a[0] + (c0 - e) * a[1] + c1 * a[2] + c2 * a[3]) / (kf * (kf + 2.0 * s - 1.0));
        a = [next, a[0], a[1], a[2], a[3]];
        rp *= r;
        let term = next * rp;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && a[1..4].iter().all(|c| (c * rp).abs() <= 1e-16 * sum.abs()) {
            break;
        }
    }
    r.powf(s) * sum
}

/// `u''(0)` of the regular solution with unit leading coefficient. `None`
/// when the exponent is not integral and `u''` diverges at the origin.
pub fn origin_curvature(coeffs: [f64; 4], lambda: f64, kappa: f64) -> Option<f64> {
    let s = exponent(lambda);
    let k = s.round();
    if (s - k).abs() > 1e-6 {
        return None;
    }
    // u = r (1 + a_1 r + ...) with a_1 = kappa c_-1 / 2, or u = r^2 (1 + ...).
    Some(match k as i64 {
        1 => kappa * coeffs[0],
        2 => 2.0,
        _ => 0.0,
    })
}

pub(crate) struct RadialProblem {
    pub grid: RadialGrid,
    pub v: Vec<f64>,
    pub kappa: f64,
    pub lambda: f64,
    pub coeffs: [f64; 4],
    pub match_point: f64,
}

impl RadialProblem {
    pub fn new(
        potential: &CentralPotential,
        lambda: f64,
        grid: &RadialGrid,
        units: &Units,
        match_point: f64,
    ) -> Result<Self> {
        let v = potential.evaluate(grid, units)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("central potential has non-finite samples".into()));
        }
        Ok(Self {
            grid: *grid,
            v,
            kappa: units.wavenumber_factor(),
            lambda,
            coeffs: potential.near_origin_expansion(units, grid.coord(0)),
            match_point,
        })
    }

    fn effective(&self, i: usize) -> f64 {
        let r = self.grid.coord(i);
        self.v[i] + self.lambda / (self.kappa * r * r)
    }
}

impl ShootingProblem for RadialProblem {
    fn len(&self) -> usize {
        self.grid.len()
    }
    fn spacing(&self) -> f64 {
        self.grid.spacing()
    }
    fn k2(&self, e: f64) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let r = self.grid.coord(i);
                self.kappa * (e - self.v[i]) - self.lambda / (r * r)
            })
            .collect()
    }
    fn left_start(&self, e: f64) -> Vec<f64> {
        let series = |i: usize| frobenius(self.coeffs, self.lambda, self.kappa, e, self.grid.coord(i));
        let u0 = series(0);
        let u1 = match origin_curvature(self.coeffs, self.lambda, self.kappa) {
            Some(c) => {
                // Numerov across the origin, where k^2 u -> -u''(0).
                let h2 = self.grid.spacing().powi(2);
                let k2 = |i: usize| {
                    let r = self.grid.coord(i);
                    self.kappa * (e - self.v[i]) - self.lambda / (r * r)
                };
                (2.0 * (1.0 - 5.0 * h2 * k2(0) / 12.0) * u0 + h2 * c / 12.0) / (1.0 + h2 * k2(1) / 12.0)
            }
            None => series(1),
        };
        vec![u0, u1]
    }
    fn right_start(&self, _e: f64) -> Vec<f64> {
        vec![0.0, self.grid.spacing()]
    }
    fn fallback_match(&self) -> f64 {
        self.match_point
    }
}

/// Bound states of the radial equation ordered by node count.
///
/// The search interval defaults to `[min V_eff, V_eff(r_max)]`; for a
/// Coulomb well that excludes the continuum and any level too diffuse to fit
/// inside `r_max`.
pub fn solve_radial(
    potential: &CentralPotential,
    alpha_theta_sq: f64,
    grid: &RadialGrid,
    units: &Units,
    config: &ShootingConfig,
) -> Result<Vec<RadialSolution>> {
    config.validate()?;
    let lambda = alpha_theta_sq / (units.hbar() * units.hbar());
    // The regular exponent s(s - 1) = lambda stays real down to -1/4, which
    // also admits the rounding-level negatives a polar solve returns for l = 0.
    if !(lambda > -0.25) {
        return Err(Error::Input(format!(
            "alpha_theta_sq / hbar^2 must exceed -1/4, got {lambda}"
        )));
    }
    let problem = RadialProblem::new(potential, lambda, grid, units, config.match_point)?;
    let n = grid.len();
    let (lo, hi) = config.energy_bracket.unwrap_or_else(|| {
        let min = (0..n).map(|i| problem.effective(i)).fold(f64::INFINITY, f64::min);
        (min - 1e-9 * min.abs().max(1.0), problem.effective(n - 1))
    });
    if !(lo < hi) {
        return Err(Error::Config(format!("empty radial bracket [{lo}, {hi}]")));
    }
    let first = eigenvalue_count(&problem, lo);
    let last = eigenvalue_count(&problem, hi);
    let wanted = config.max_states.min(last.saturating_sub(first));
    if wanted == 0 {
        return Err(Error::Convergence(format!(
            "no radial bound state in [{lo:.6e}, {hi:.6e}]"
        )));
    }
    let indices: Vec<usize> = (first..first + wanted).collect();
    let r: Vec<f64> = grid.coords();
    let weight: Vec<f64> = r.iter().map(|x| x * x).collect();

    let mut out = Vec::with_capacity(wanted);
    for (pair, k) in locate_many(&problem, &indices, lo, hi, config.bisection_tol)
        .into_iter()
        .zip(&indices)
    {
        let pair = pair?;
        let u = &pair.samples;
        let peak = u.iter().fold(0.0f64, |a, x| a.max(x * x));
        let edge = u[n - 2] * u[n - 2] / peak;
        if edge > config.decay_threshold {
            return Err(Error::Convergence(format!(
                "radial state {k} has density {edge:.3e} of its peak at r_max; enlarge r_max"
            )));
        }
        let radial: Vec<f64> = u.iter().zip(&r).map(|(u, r)| u / r).collect();
        out.push(RadialSolution {
            n_r: *k as u32,
            energy: pair.energy,
            alpha_theta_sq,
            samples: normalize_weighted(&radial, &weight, grid.spacing())?,
            grid: *grid,
            bisection_steps: pair.bisection_steps,
            mismatch: pair.mismatch,
        });
    }
    Ok(out)
}

/// A radial grid wide enough for Coulomb shells up to `n_max`.
pub fn coulomb_grid(potential: &CentralPotential, n_max: u32, h: f64, units: &Units) -> Result<RadialGrid> {
    let a = potential.natural_length(units);
    let n = n_max.max(1) as f64;
    let r_max = (5.0 * n * n + 25.0 * n).max(40.0) * a;
    RadialGrid::with_spacing(r_max, h * a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hydrogen() -> CentralPotential {
        CentralPotential::Coulomb { z: 1.0 }
    }

    #[test]
    fn frobenius_matches_closed_forms() {
        // u = r exp(-r) for the hydrogen ground state.
        let c = hydrogen().near_origin_expansion(&Units::default(), 0.01);
        for &r in &[0.01, 0.1, 0.5] {
            let u = frobenius(c, 0.0, 2.0, -0.5, r);
            assert!((u - r * (-r).exp()).abs() < 1e-14, "{r}");
        }
        // u = r^2 exp(-r/2) for 2p.
        for &r in &[0.01, 0.3] {
            let u = frobenius(c, 2.0, 2.0, -0.125, r);
            assert!((u - r * r * (-r / 2.0).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn hydrogen_s_levels() {
        let u = Units::default();
        let g = RadialGrid::with_spacing(80.0, 0.005).unwrap();
        let res = solve_radial(&hydrogen(), 0.0, &g, &u, &ShootingConfig::with_states(3)).unwrap();
        for (k, s) in res.iter().enumerate() {
            let n = (k + 1) as f64;
            let exact = -0.5 / (n * n);
            assert!((s.energy / exact - 1.0).abs() < 1e-6, "n={n} {}", s.energy);
            assert_eq!(s.n_r, k as u32);
        }
        // R_10 = 2 exp(-r)
        let r10 = &res[0].samples;
        for i in (0..g.len()).step_by(97) {
            let r = g.coord(i);
            assert!((r10[i] - 2.0 * (-r).exp()).abs() < 1e-6);
        }
    }

    #[test]
    fn p_wave_and_oscillator() {
        let u = Units::default();
        let g = RadialGrid::with_spacing(60.0, 0.005).unwrap();
        let p = solve_radial(&hydrogen(), 2.0, &g, &u, &ShootingConfig::with_states(1)).unwrap();
        assert!((p[0].energy / -0.125 - 1.0).abs() < 1e-6);
        assert_eq!(p[0].orbital(&u), Some(1));

        let osc = CentralPotential::Harmonic3d { omega: 1.0 };
        let g = RadialGrid::with_spacing(10.0, 0.005).unwrap();
        let s = solve_radial(&osc, 0.0, &g, &u, &ShootingConfig::with_states(2)).unwrap();
        assert!((s[0].energy - 1.5).abs() < 1e-8);
        assert!((s[1].energy - 3.5).abs() < 1e-8);
    }

    #[test]
    fn too_small_box_is_reported() {
        let u = Units::default();
        let g = RadialGrid::with_spacing(6.0, 0.01).unwrap();
        let cfg = ShootingConfig { energy_bracket: Some((-1.0, -0.01)), ..ShootingConfig::with_states(2) };
        assert!(solve_radial(&hydrogen(), 0.0, &g, &u, &cfg).is_err());
    }
}
