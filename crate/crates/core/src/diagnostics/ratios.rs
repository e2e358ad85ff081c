//! Operator ratios `A psi / psi` for `psi = R exp(iS/hbar)` at `t = 0`.
//!
//! For a product state every derivative acts on one factor, so the ratios
//! are assembled from the one-dimensional ratios
//!
//! ```text
//! A_r     = (1/R_r)(1/r^2)(r^2 R_r')'
//! A_theta = (1/R_theta)(1/sin)(sin R_theta')'
//! A_phi   = psi_phi'' / psi_phi,   psi_phi = R_phi exp(i p_phi phi / hbar)
//! ```
//!
//! and then `H psi/psi = -(hbar^2/2m)(A_r + A_theta/r^2 + A_phi/(r^2 sin^2)) + V`,
//! `L^2 psi/psi = -hbar^2 (A_theta + A_phi/sin^2)`, `Lz^2 psi/psi = -hbar^2 A_phi`
//! and `Lz psi/psi = -i hbar psi_phi'/psi_phi`. This is exactly what the
//! tensor-product finite-difference operators give on the product field.

use num_complex::Complex64;

use super::continuity::{continuity_fields, measure_separation_constants, normalized_factors};
use super::{strided, ActionGradients, DiagnosticsConfig};
use crate::error::{Error, Result};
use crate::fd::periodic_derivatives;
use crate::model::{azimuthal_samples, AzimuthalParity, MotionMode, SeparableCentralState, UniformGrid};
use crate::quantum_potential::{
    node_mask, polar_laplacian_ratio, radial_laplacian_ratio_pinned, state_origin_curvature,
};

/// Statistics of one operator ratio over the sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSummary {
    /// Constant the ratio should equal: real part the constant of motion,
    /// imaginary part the `-hbar c` offset.
    pub predicted: Complex64,
    /// Natural size of the predicted value, used for relative measures.
    pub scale: f64,
    pub mean: Complex64,
    /// `max |ratio - mean|` over complex values.
    pub max_deviation: f64,
    pub real_max_deviation: f64,
    pub imag_max: f64,
    /// `max |ratio - predicted|`.
    pub max_error: f64,
    pub samples: usize,
}

impl RatioSummary {
    fn new(values: &[Complex64], predicted: Complex64, scale: f64) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<Complex64>() / n;
        let fold = |f: &dyn Fn(&Complex64) -> f64| values.iter().map(f).fold(0.0f64, f64::max);
        Self {
            predicted,
            scale,
            mean,
            max_deviation: fold(&|z| (z - mean).norm()),
            real_max_deviation: fold(&|z| (z.re - mean.re).abs()),
            imag_max: fold(&|z| z.im.abs()),
            max_error: fold(&|z| (z - predicted).norm()),
            samples: values.len(),
        }
    }

    /// `max |ratio - predicted| / scale`.
    pub fn relative_error(&self) -> f64 {
        self.max_error / self.scale
    }

    pub fn relative_deviation(&self) -> f64 {
        self.max_deviation / self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorRatioReport {
    pub mode: MotionMode,
    pub hamiltonian: RatioSummary,
    pub l_squared: RatioSummary,
    pub lz_squared: RatioSummary,
    pub lz: RatioSummary,
    /// `Lz psi / psi` at each azimuthal sample (NaN inside node windows).
    pub lz_field: Vec<(f64, Complex64)>,
    /// Largest grid spacing, which sets the finite-difference error scale.
    pub spacing: f64,
}

pub fn operator_ratios(
    state: &SeparableCentralState,
    mode: MotionMode,
    config: &DiagnosticsConfig,
) -> Result<OperatorRatioReport> {
    config.validate()?;
    state.validate()?;
    if mode == MotionMode::Circulating && state.azimuthal.parity != AzimuthalParity::Const {
        return Err(Error::Input("circulating mode needs a constant R_phi".into()));
    }
    let units = state.units;
    let hbar = units.hbar();
    let kin = units.kinetic_prefactor();
    let p_phi = match mode {
        MotionMode::Rest => 0.0,
        MotionMode::Circulating => state.alpha_phi,
    };

    let (radial, polar) = normalized_factors(state)?;
    let (a_r, _) = radial_laplacian_ratio_pinned(
        &radial,
        &state.radial_grid,
        config.stencil,
        config.node_epsilon,
        state_origin_curvature(state, &radial),
    )?;
    let (a_t, _) = polar_laplacian_ratio(
        &polar,
        &state.polar_grid,
        state.azimuthal.m,
        config.stencil,
        config.node_epsilon,
    )?;
    let v = state.potential.evaluate(&state.radial_grid, &units)?;

    let phis = azimuthal_samples(config.phi_samples);
    let r_phi: Vec<f64> = phis.iter().map(|p| state.azimuthal.value(*p)).collect();
    let (d1, d2) = periodic_derivatives(&r_phi.iter().map(|x| Complex64::new(*x, 0.0)).collect::<Vec<_>>());
    let phi_mask = node_mask(&r_phi, config.node_epsilon);
    let k = p_phi / hbar;
    let i = Complex64::i();
    // (psi_phi'/psi_phi, psi_phi''/psi_phi) by the product rule with the phase.
    let phi_ratios: Vec<Option<(Complex64, Complex64)>> = (0..phis.len())
        .map(|q| {
            (!phi_mask[q]).then(|| {
                let g1 = d1[q].re / r_phi[q];
                let g2 = d2[q].re / r_phi[q];
                (g1 + i * k, g2 + 2.0 * i * k * g1 - k * k)
            })
        })
        .collect();

    let rows: Vec<usize> = strided(radial.len(), config.radial_samples)
        .into_iter()
        .filter(|&r| a_r[r].is_finite())
        .collect();
    let cols: Vec<usize> = strided(polar.len(), config.polar_samples)
        .into_iter()
        .filter(|&t| a_t[t].is_finite())
        .collect();
    let live: Vec<(f64, Complex64, Complex64)> = phi_ratios
        .iter()
        .zip(&phis)
        .filter_map(|(r, p)| r.map(|(a, b)| (*p, a, b)))
        .collect();
    if rows.is_empty() || cols.is_empty() || live.is_empty() {
        return Err(Error::Degenerate("every operator sample is node-masked".into()));
    }

    let mut h_vals = Vec::with_capacity(rows.len() * cols.len() * live.len());
    let mut l2_vals = Vec::with_capacity(cols.len() * live.len());
    for &t in &cols {
        let s2 = state.polar_grid.sin_at(t).powi(2);
        for &(_, _, a_phi) in &live {
            let angular = a_t[t] + a_phi / s2;
            l2_vals.push(-hbar * hbar * angular);
            for &r in &rows {
                let rr = state.radial_grid.coord(r).powi(2);
                h_vals.push(-kin * (a_r[r] + angular / rr) + v[r]);
            }
        }
    }
    let lz2_vals: Vec<Complex64> = live.iter().map(|(_, _, a)| -hbar * hbar * a).collect();
    let lz_vals: Vec<Complex64> = live.iter().map(|(_, a, _)| -i * hbar * a).collect();
    let lz_field = phis
        .iter()
        .zip(&phi_ratios)
        .map(|(p, r)| {
            let z = r.map_or(Complex64::new(f64::NAN, f64::NAN), |(a, _)| -i * hbar * a);
            (*p, z)
        })
        .collect();

    let gradients = ActionGradients::for_mode(state, mode, config.phi_samples);
    let c = measure_separation_constants(&continuity_fields(state, &gradients, config)?)?;
    let hb2 = hbar * hbar;
    let predicted = |re: f64, c: f64| Complex64::new(re, -hbar * c);
    Ok(OperatorRatioReport {
        mode,
        hamiltonian: RatioSummary::new(&h_vals, predicted(state.energy, 0.0), state.energy.abs().max(f64::MIN_POSITIVE)),
        l_squared: RatioSummary::new(&l2_vals, predicted(state.alpha_theta_sq, c.c_theta.mean), state.alpha_theta_sq.abs().max(hb2)),
        lz_squared: RatioSummary::new(
            &lz2_vals,
            predicted(state.alpha_phi * state.alpha_phi, c.c_phi.mean),
            (state.alpha_phi * state.alpha_phi).max(hb2),
        ),
        lz: RatioSummary::new(&lz_vals, Complex64::new(p_phi, 0.0), state.alpha_phi.abs().max(hbar)),
        lz_field,
        spacing: state.radial_grid.spacing().max(state.polar_grid.spacing()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::CentralRequest;
    use crate::diagnostics::fixtures;

    #[test]
    fn hydrogen_2p1_rest_ratios() {
        let s = fixtures::rest(2, 1, 1);
        let r = operator_ratios(&s, MotionMode::Rest, &DiagnosticsConfig::default()).unwrap();
        let tol = 50.0 * r.spacing * r.spacing;
        assert!((r.hamiltonian.mean.re + 0.125).abs() < 1e-6);
        assert!(r.hamiltonian.relative_error() < tol, "{}", r.hamiltonian.relative_error());
        assert!((r.l_squared.mean.re - 2.0).abs() < 1e-6);
        assert!(r.l_squared.relative_error() < tol);
        assert!((r.lz_squared.mean.re - 1.0).abs() < 1e-12);
        for s in [r.hamiltonian, r.l_squared, r.lz_squared] {
            assert!(s.imag_max < 1e-8);
        }
        // Lz psi / psi = i hbar tan(phi) for cos(phi): purely imaginary and varying.
        assert!(r.lz.max_deviation > 0.5);
        for (phi, z) in &r.lz_field {
            assert!(z.re.abs() < 1e-12);
            assert!((z.im - phi.tan()).abs() < 1e-10 * phi.tan().abs().max(1.0));
        }
    }

    #[test]
    fn circulating_state_is_an_lz_eigenstate() {
        let s = fixtures::hydrogen(CentralRequest::circulating(2, 1, 1));
        let r = operator_ratios(&s, MotionMode::Circulating, &DiagnosticsConfig::default()).unwrap();
        assert!(r.lz.max_deviation < 1e-12);
        assert!((r.lz.mean.re - 1.0).abs() < 1e-12);
        assert!((r.hamiltonian.mean.re + 0.125).abs() < 1e-6);
        assert!(r.hamiltonian.imag_max < 1e-8);
        // A trigonometric amplitude cannot circulate.
        let rest = fixtures::rest(2, 1, 1);
        assert!(operator_ratios(&rest, MotionMode::Circulating, &DiagnosticsConfig::default()).is_err());
    }

    #[test]
    fn impostors_are_exposed() {
        let mut wrong_e = fixtures::rest(1, 0, 0);
        wrong_e.energy = -0.125;
        let r = operator_ratios(&wrong_e, MotionMode::Rest, &DiagnosticsConfig::default()).unwrap();
        assert!(r.hamiltonian.relative_error() > 1.0);

        let mut gauss = fixtures::rest(1, 0, 0);
        gauss.radial = gauss.radial_grid.coords().iter().map(|r| (-r * r).exp()).collect();
        let r = operator_ratios(&gauss, MotionMode::Rest, &DiagnosticsConfig::default()).unwrap();
        assert!(r.hamiltonian.real_max_deviation > 0.1);
    }

    #[test]
    fn ratios_ignore_amplitude_scale() {
        let s = fixtures::rest(2, 1, 1);
        let cfg = DiagnosticsConfig::default();
        let a = operator_ratios(&s, MotionMode::Rest, &cfg).unwrap();
        for c in [-3.0, 0.01, 7.0] {
            let b = operator_ratios(&s.scaled(c), MotionMode::Rest, &cfg).unwrap();
            for (x, y) in [(a.hamiltonian, b.hamiltonian), (a.l_squared, b.l_squared), (a.lz_squared, b.lz_squared)] {
                // c R is rounded once; differencing amplifies that by ~1/h^2.
                assert!((x.mean - y.mean).norm() < 1e-9 * x.scale, "{c}");
            }
        }
    }
}
