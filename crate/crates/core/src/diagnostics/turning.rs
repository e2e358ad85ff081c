//! Integrals of the continuity fields between turning points.
//!
//! Integrating `f_r = -c_theta` against `R_r^2` from one radial turning point
//! to the next gives
//!
//! ```text
//! [r^2 R_r^2 dW_r/dr]_(r_min)^(r_max) = -c_theta * integral R_r^2 dr
//! ```
//!
//! The left side vanishes because `dW_r/dr = 0` at turning points, and the
//! integral on the right is positive, so `c_theta` must vanish. The polar
//! version reads `[sin R_theta^2 dW_theta/dtheta] = -c_phi * integral R_theta^2 / sin`.

use crate::error::{Error, Result};
use crate::fd::trapezoid;
use crate::model::{normalize_weighted, PolarGrid, RadialGrid, UniformGrid};

/// Absolute tolerance on `|lhs - rhs|` for normalized amplitudes.
const CONSISTENCY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TurningPointCheck {
    Applicable {
        /// Boundary difference of the flux.
        lhs: f64,
        /// `-c * integral`.
        rhs: f64,
        integral: f64,
        consistent: bool,
    },
    /// The window endpoints are not turning points of a moving coordinate.
    NotApplicable { reason: &'static str },
}

impl TurningPointCheck {
    pub fn is_consistent(&self) -> Option<bool> {
        match self {
            TurningPointCheck::Applicable { consistent, .. } => Some(*consistent),
            TurningPointCheck::NotApplicable { .. } => None,
        }
    }
}

struct Channel<'a> {
    coords: Vec<f64>,
    h: f64,
    amp: Vec<f64>,
    gradient: &'a [f64],
    flux_weight: Vec<f64>,
    integral_weight: Vec<f64>,
}

fn window_indices(coords: &[f64], window: (f64, f64)) -> Result<(usize, usize)> {
    let (a, b) = window;
    if !(a < b) {
        return Err(Error::Input(format!("window [{a}, {b}] is empty")));
    }
    let first = coords.iter().position(|x| *x >= a);
    let last = coords.iter().rposition(|x| *x <= b);
    match (first, last) {
        (Some(i), Some(j)) if j > i => Ok((i, j)),
        _ => Err(Error::Input(format!("window [{a}, {b}] holds fewer than two samples"))),
    }
}

fn check(channel: Channel, window: (f64, f64), c: f64) -> Result<TurningPointCheck> {
    let (i, j) = window_indices(&channel.coords, window)?;
    let g = channel.gradient;
    let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    // A coordinate that never moves has its turning points everywhere.
    if scale > 0.0 && (g[i].abs() > 1e-12 * scale || g[j].abs() > 1e-12 * scale) {
        return Ok(TurningPointCheck::NotApplicable {
            reason: "the momentum does not vanish at the window ends",
        });
    }
    let flux = |k: usize| channel.flux_weight[k] * channel.amp[k] * channel.amp[k] * g[k];
    let lhs = flux(j) - flux(i);
    let integrand: Vec<f64> = (i..=j)
        .map(|k| channel.amp[k] * channel.amp[k] * channel.integral_weight[k])
        .collect();
    let integral = trapezoid(&integrand, channel.h);
    let rhs = -c * integral;
    Ok(TurningPointCheck::Applicable {
        lhs,
        rhs,
        integral,
        consistent: (lhs - rhs).abs() <= CONSISTENCY_TOL,
    })
}

/// Radial turning-point identity over `window = (r_min, r_max)` for a given
/// `c_theta`. `R_r` is normalized to `integral R_r^2 r^2 dr = 1` first.
pub fn verify_turning_point_argument(
    radial: &[f64],
    dw_r: &[f64],
    grid: &RadialGrid,
    window: (f64, f64),
    c_theta: f64,
) -> Result<TurningPointCheck> {
    if radial.len() != grid.len() || dw_r.len() != grid.len() {
        return Err(Error::Size("radial inputs do not match the grid".into()));
    }
    let coords = grid.coords();
    let r2: Vec<f64> = coords.iter().map(|r| r * r).collect();
    let amp = normalize_weighted(radial, &r2, grid.spacing())?;
    check(
        Channel {
            h: grid.spacing(),
            amp,
            gradient: dw_r,
            flux_weight: r2,
            integral_weight: vec![1.0; grid.len()],
            coords,
        },
        window,
        c_theta,
    )
}

/// Polar turning-point identity over `window = (theta_min, theta_max)` for a
/// given `c_phi`, with `R_theta` normalized against `sin(theta)`.
pub fn verify_polar_turning_point(
    polar: &[f64],
    dw_theta: &[f64],
    grid: &PolarGrid,
    window: (f64, f64),
    c_phi: f64,
) -> Result<TurningPointCheck> {
    if polar.len() != grid.len() || dw_theta.len() != grid.len() {
        return Err(Error::Size("polar inputs do not match the grid".into()));
    }
    let coords = grid.coords();
    let sin = grid.sines();
    let amp = normalize_weighted(polar, &sin, grid.spacing())?;
    check(
        Channel {
            h: grid.spacing(),
            amp,
            gradient: dw_theta,
            integral_weight: sin.iter().map(|s| 1.0 / s).collect(),
            flux_weight: sin,
            coords,
        },
        window,
        c_phi,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hydrogen_1s() -> (RadialGrid, Vec<f64>) {
        let g = RadialGrid::with_spacing(30.0, 0.01).unwrap();
        let r = g.coords().iter().map(|r| 2.0 * (-r).exp()).collect();
        (g, r)
    }

    #[test]
    fn rest_state_gives_zero_on_both_sides() {
        let (g, r) = hydrogen_1s();
        let zero = vec![0.0; g.len()];
        match verify_turning_point_argument(&r, &zero, &g, (0.5, 4.0), 0.0).unwrap() {
            TurningPointCheck::Applicable { lhs, rhs, consistent, .. } => {
                assert_eq!((lhs, rhs), (0.0, 0.0));
                assert!(consistent);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn injected_c_theta_is_inconsistent() {
        let (g, r) = hydrogen_1s();
        let zero = vec![0.0; g.len()];
        let check = verify_turning_point_argument(&r, &zero, &g, (0.5, 4.0), 5.0).unwrap();
        let TurningPointCheck::Applicable { lhs, rhs, integral, consistent } = check else {
            panic!()
        };
        // integral of 4 exp(-2r) over [0.5, 4]
        let exact = 2.0 * ((-1.0f64).exp() - (-8.0f64).exp());
        assert!((integral - exact).abs() < 1e-4);
        assert_eq!(lhs, 0.0);
        assert!((rhs + 5.0 * integral).abs() < 1e-14);
        assert!(!consistent);
    }

    #[test]
    fn moving_window_ends_are_not_turning_points() {
        let (g, r) = hydrogen_1s();
        let moving: Vec<f64> = g.coords().iter().map(|x| 1.0 / (x * x)).collect();
        let c = verify_turning_point_argument(&r, &moving, &g, (0.5, 4.0), 0.0).unwrap();
        assert_eq!(c.is_consistent(), None);
    }

    #[test]
    fn genuine_turning_points_balance() {
        // dW/dr = sin(pi (r - 1)) vanishes at r = 1 and r = 2; with c = 0 the
        // boundary terms vanish too.
        let g = RadialGrid::with_spacing(3.0, 0.001).unwrap();
        let r: Vec<f64> = g.coords().iter().map(|x| (-x).exp()).collect();
        let dw: Vec<f64> = g
            .coords()
            .iter()
            .map(|x| (std::f64::consts::PI * (x - 1.0)).sin())
            .collect();
        let c = verify_turning_point_argument(&r, &dw, &g, (0.9995, 2.0005), 0.0).unwrap();
        assert_eq!(c.is_consistent(), Some(true));
    }

    #[test]
    fn polar_channel() {
        let g = PolarGrid::new(400).unwrap();
        let p: Vec<f64> = g.coords().iter().map(|t| t.sin()).collect();
        let zero = vec![0.0; g.len()];
        let c0 = verify_polar_turning_point(&p, &zero, &g, (0.3, 2.8), 0.0).unwrap();
        assert_eq!(c0.is_consistent(), Some(true));
        let c5 = verify_polar_turning_point(&p, &zero, &g, (0.3, 2.8), 5.0).unwrap();
        assert_eq!(c5.is_consistent(), Some(false));
        assert!(verify_polar_turning_point(&p, &zero, &g, (2.0, 1.0), 0.0).is_err());
    }
}
