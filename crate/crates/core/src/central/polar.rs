//! Polar factor: `(1/sin) d/dtheta(sin dR/dtheta) + (lambda - m^2/sin^2) R = 0`
//! with `lambda = alpha_theta^2 / hbar^2`.
//!
//! With `y = R sqrt(sin theta)` the equation becomes `y'' + k^2 y = 0`,
//!
//! ```text
//! k^2 = lambda + 1/4 + (1/4 - m^2) / sin^2(theta)
//! ```
//!
//! Near a pole `y` behaves like `theta^(m + 1/2)`, which Numerov handles
//! poorly, so the first samples on each side come from the regular series
//! `R = sin^m(theta) sum c_k (1 - cos theta)^k`.

use crate::error::{Error, Result};
use crate::model::{normalize_weighted, PolarGrid, UniformGrid, Units};
use crate::numerov::{eigenvalue_count, locate_many, ShootingProblem};

/// Angular distance from each pole covered by the series start. Numerov's
/// error starts where the series hands over, which leaves a small kink in the
/// sampled curvature; away from the pole the solution is smooth enough for
/// that kink to sit at rounding level.
const SERIES_REACH: f64 = std::f64::consts::FRAC_PI_4;
const SERIES_TERMS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct PolarSolution {
    pub l: u32,
    pub m: u32,
    pub alpha_theta_sq: f64,
    /// `R_theta`, normalized to `integral R^2 sin(theta) dtheta = 1`.
    pub samples: Vec<f64>,
    pub grid: PolarGrid,
    pub bisection_steps: usize,
}

/// Regular solution at the pole `theta = 0`, evaluated at angle `t`.
pub fn regular_series(m: u32, lambda: f64, t: f64) -> f64 {
    let x = 1.0 - t.cos();
    let mf = m as f64;
    let mut c = 1.0;
    let mut sum = 1.0;
    let mut xp = 1.0;
    for k in 0..SERIES_TERMS {
        let kf = k as f64;
        c *= ((kf + mf) * (kf + mf + 1.0) - lambda) / (2.0 * (kf + 1.0) * (kf + mf + 1.0));
        xp *= x;
        let term = c * xp;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > 4 {
            break;
        }
    }
    t.sin().powi(m as i32) * sum
}

struct PolarProblem {
    grid: PolarGrid,
    m: u32,
    seeds: usize,
}

impl PolarProblem {
    fn new(grid: PolarGrid, m: u32) -> Self {
        let h = grid.spacing();
        let seeds = ((SERIES_REACH / h).floor() as usize).clamp(2, grid.len() / 4);
        Self { grid, m, seeds: seeds.max(2) }
    }

    fn lambda(&self, e: f64) -> f64 {
        e
    }
}

impl ShootingProblem for PolarProblem {
    fn len(&self) -> usize {
        self.grid.len()
    }
    fn spacing(&self) -> f64 {
        self.grid.spacing()
    }
    fn k2(&self, e: f64) -> Vec<f64> {
        let m2 = (self.m * self.m) as f64;
        let lam = self.lambda(e);
        (0..self.len())
            .map(|j| {
                let s = self.grid.sin_at(j);
                lam + 0.25 + (0.25 - m2) / (s * s)
            })
            .collect()
    }
    fn left_start(&self, e: f64) -> Vec<f64> {
        let lam = self.lambda(e);
        (0..self.seeds)
            .map(|j| {
                let t = self.grid.coord(j);
                regular_series(self.m, lam, t) * t.sin().sqrt()
            })
            .collect()
    }
    fn right_start(&self, e: f64) -> Vec<f64> {
        // The equation is symmetric under theta -> pi - theta, and the
        // cell-centred grid maps onto itself.
        self.left_start(e)
    }
}

fn check_grid(grid: &PolarGrid) -> Result<()> {
    PolarGrid::validate_angles(&grid.coords())?;
    if grid.len() < 16 {
        return Err(Error::Grid(format!(
            "polar shooting needs at least 16 samples, got {}",
            grid.len()
        )));
    }
    Ok(())
}

/// Solves the polar equation for `l = m ..= l_max`.
///
/// The eigenvalue `lambda` is located by counting, so the returned
/// `alpha_theta_sq` is whatever continuity and regularity at both poles
/// select; nothing about `l(l+1)` is assumed.
pub fn solve_polar(m: u32, l_max: u32, grid: &PolarGrid, units: &Units) -> Result<Vec<PolarSolution>> {
    solve_polar_with(m, l_max, grid, units, 1e-13)
}

pub fn solve_polar_with(
    m: u32,
    l_max: u32,
    grid: &PolarGrid,
    units: &Units,
    rel_tol: f64,
) -> Result<Vec<PolarSolution>> {
    if l_max < m {
        return Err(Error::Input(format!("l_max = {l_max} is below m = {m}")));
    }
    check_grid(grid)?;
    let problem = PolarProblem::new(*grid, m);
    let wanted = (l_max - m + 1) as usize;

    // The operator is bounded below by m^2; widen the top until enough levels fit.
    let lo = (m * m) as f64 - 1.0;
    let mut hi = ((l_max + 2) * (l_max + 2)) as f64;
    while eigenvalue_count(&problem, hi) < wanted {
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::Convergence("polar bracket failed to capture the levels".into()));
        }
    }
    let indices: Vec<usize> = (0..wanted).collect();
    let hbar2 = units.hbar() * units.hbar();
    let weight = grid.sines();

    locate_many(&problem, &indices, lo, hi, rel_tol)
        .into_iter()
        .zip(indices)
        .map(|(pair, k)| {
            let pair = pair?;
            let shot: Vec<f64> = pair
                .samples
                .iter()
                .zip(&weight)
                .map(|(y, s)| y / s.sqrt())
                .collect();
            let (lambda, r) = series_samples(grid, m, pair.energy, &shot);
            let samples = normalize_weighted(&r, &weight, grid.spacing())?;
            Ok(PolarSolution {
                l: m + k as u32,
                m,
                alpha_theta_sq: lambda * hbar2,
                samples,
                grid: *grid,
                bisection_steps: pair.bisection_steps,
            })
        })
        .collect()
}

/// Sum and slope in `x = 1 - cos theta` of the pole series at the equator.
fn series_at_equator(m: u32, lambda: f64) -> (f64, f64) {
    let mf = m as f64;
    let (mut c, mut sum, mut slope) = (1.0, 1.0, 0.0);
    for k in 0..SERIES_TERMS {
        let kf = k as f64;
        c *= ((kf + mf) * (kf + mf + 1.0) - lambda) / (2.0 * (kf + 1.0) * (kf + mf + 1.0));
        sum += c;
        slope += (kf + 1.0) * c;
        if c.abs() * (kf + 1.0) <= 1e-17 * (sum.abs() + slope.abs()) && k > 4 {
            break;
        }
    }
    (sum, slope)
}

/// Re-evaluates a converged shot from the regular series of each pole.
///
/// The series in `1 - cos theta` converges on the whole open interval, so
/// each half is taken from its own pole. The values then satisfy the
/// differential equation rather than the Numerov recurrence, which keeps
/// curvature ratios free of the series-to-Numerov seam. The shot fixes the
/// parity; `lambda` is then polished by secant so the two halves join
/// smoothly at the equator (zero slope when even, zero value when odd).
fn series_samples(grid: &PolarGrid, m: u32, lambda: f64, shot: &[f64]) -> (f64, Vec<f64>) {
    let n = grid.len();
    let half = n / 2;
    let from_pole = |lambda: f64| -> Vec<f64> {
        (0..n)
            .map(|j| {
                let t = grid.coord(j);
                let t = if j < half { t } else { std::f64::consts::PI - t };
                regular_series(m, lambda, t)
            })
            .collect()
    };
    let base = from_pole(lambda);
    let overlap = |range: std::ops::Range<usize>| -> f64 {
        range.map(|j| base[j] * shot[j]).sum::<f64>().signum()
    };
    let (a, b) = (overlap(0..half), overlap(half..n));
    let even = a * b > 0.0;
    let residual = |l: f64| {
        let (sum, slope) = series_at_equator(m, l);
        if even { slope } else { sum }
    };

    let scale = lambda.abs().max(1.0);
    let (mut l0, mut l1) = (lambda, lambda + 1e-7 * scale);
    let (mut f0, mut f1) = (residual(l0), residual(l1));
    for _ in 0..50 {
        if f1 == 0.0 || f1 == f0 || (l1 - l0).abs() <= 1e-16 * scale {
            break;
        }
        let l2 = l1 - f1 * (l1 - l0) / (f1 - f0);
        (l0, f0) = (l1, f1);
        l1 = l2;
        f1 = residual(l1);
    }
    // Keep the shooting value if the polish wandered off.
    let lambda = if (l1 - lambda).abs() <= 1e-6 * scale { l1 } else { lambda };
    let values = from_pole(lambda)
        .into_iter()
        .enumerate()
        .map(|(j, v)| if j < half { a * v } else { b * v })
        .collect();
    (lambda, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_reproduces_low_legendre_functions() {
        for &t in &[0.1, 0.7, 1.5, 2.5] {
            assert!((regular_series(0, 0.0, t) - 1.0).abs() < 1e-14);
            assert!((regular_series(0, 2.0, t) - t.cos()).abs() < 1e-13);
            assert!((regular_series(1, 2.0, t) - t.sin()).abs() < 1e-13);
            // P_2^1 ~ sin cos
            assert!((regular_series(1, 6.0, t) - t.sin() * t.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn lowest_polar_constants() {
        let g = PolarGrid::new(1000).unwrap();
        let u = Units::default();
        let s0 = solve_polar(0, 1, &g, &u).unwrap();
        assert!(s0[0].alpha_theta_sq.abs() < 1e-9);
        assert!(s0[0].samples.iter().all(|v| (v - s0[0].samples[0]).abs() < 1e-8));
        assert!((s0[1].alpha_theta_sq - 2.0).abs() < 2e-8);
        let c = s0[1].samples[0] / g.coord(0).cos();
        for (j, v) in s0[1].samples.iter().enumerate() {
            assert!((v - c * g.coord(j).cos()).abs() < 1e-7);
        }
        let s1 = solve_polar(1, 1, &g, &u).unwrap();
        assert!((s1[0].alpha_theta_sq - 2.0).abs() < 2e-8);
    }

    #[test]
    fn constants_scale_with_hbar() {
        let g = PolarGrid::new(600).unwrap();
        let u = Units::new(2.0, 1.0).unwrap();
        let s = solve_polar(0, 1, &g, &u).unwrap();
        assert!((s[1].alpha_theta_sq - 8.0).abs() < 1e-6);
    }

    #[test]
    fn bad_requests_error() {
        let g = PolarGrid::new(100).unwrap();
        assert!(solve_polar(3, 2, &g, &Units::default()).is_err());
        let tiny = PolarGrid::new(8).unwrap();
        assert!(solve_polar(0, 1, &tiny, &Units::default()).is_err());
    }
}
