//! Single-valuedness of `exp(iS/hbar)`: the loop integral of `dS/dphi` must
//! be an integer multiple of `2 pi hbar`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{SeparableCentralState, Units};

/// Distance to the nearest integer below which a winding counts as integral.
pub const INTEGER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    /// `(loop integral of dS/dphi) / (2 pi hbar)`.
    pub value: f64,
    pub nearest: i64,
    pub integral: bool,
}

/// `n + 1` angles `0, 2pi/n, ..., 2pi` describing a closed loop.
pub fn closed_phi_loop(n: usize) -> Vec<f64> {
    (0..=n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// `dS/dphi` of a state on a closed loop: `0` at rest, `alpha_phi` when circulating.
pub fn state_phase_gradient(state: &SeparableCentralState, n: usize) -> (Vec<f64>, Vec<f64>) {
    let phis = closed_phi_loop(n);
    let grad = vec![state.p_phi(); phis.len()];
    (phis, grad)
}

/// Trapezoidal loop integral of `dS/dphi` over `phis`, which must run
/// monotonically once around the circle and close on itself.
pub fn action_winding(phis: &[f64], ds_dphi: &[f64], units: &Units) -> Result<Winding> {
    if phis.len() != ds_dphi.len() {
        return Err(Error::Size("loop angles and gradient differ in length".into()));
    }
    if phis.len() < 3 {
        return Err(Error::Input("a loop needs at least three points".into()));
    }
    if phis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Input("loop angles must increase".into()));
    }
    let span = phis[phis.len() - 1] - phis[0];
    if (span - 2.0 * PI).abs() > 1e-12 * 2.0 * PI {
        return Err(Error::Input(format!(
            "path spans {span} rad; a closed phi loop spans 2 pi"
        )));
    }
    let integral: f64 = phis
        .windows(2)
        .zip(ds_dphi.windows(2))
        .map(|(p, g)| 0.5 * (p[1] - p[0]) * (g[0] + g[1]))
        .sum();
    let value = integral / (2.0 * PI * units.hbar());
    let nearest = value.round();
    Ok(Winding {
        value,
        nearest: nearest as i64,
        integral: (value - nearest).abs() < INTEGER_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_gradients() {
        let u = Units::default();
        let phis = closed_phi_loop(64);
        let w2 = action_winding(&phis, &vec![2.0; 65], &u).unwrap();
        assert!((w2.value - 2.0).abs() < 1e-12 && w2.integral && w2.nearest == 2);
        let w0 = action_winding(&phis, &vec![0.0; 65], &u).unwrap();
        assert_eq!(w0.value, 0.0);
        let half = action_winding(&phis, &vec![1.5; 65], &u).unwrap();
        assert!((half.value - 1.5).abs() < 1e-12);
        assert!(!half.integral);
    }

    #[test]
    fn hbar_sets_the_quantum() {
        let u = Units::new(0.5, 1.0).unwrap();
        let phis = closed_phi_loop(16);
        let w = action_winding(&phis, &[1.0; 17], &u).unwrap();
        assert!((w.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_variation_integrates_away() {
        let phis = closed_phi_loop(200);
        let g: Vec<f64> = phis.iter().map(|p| 3.0 + (2.0 * p).cos()).collect();
        let w = action_winding(&phis, &g, &Units::default()).unwrap();
        assert!((w.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn open_path_is_rejected() {
        let phis: Vec<f64> = (0..10).map(|k| k as f64 * 0.3).collect();
        assert!(matches!(
            action_winding(&phis, &[1.0; 10], &Units::default()),
            Err(Error::Input(_))
        ));
    }
}
