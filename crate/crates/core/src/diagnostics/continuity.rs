use num_complex::Complex64;

use super::{DiagnosticsConfig, Spread};
use crate::error::{Error, Result};
use crate::fd::{first_derivative, periodic_derivatives};
use crate::model::{
    azimuthal_samples, normalize_weighted, MotionMode, PolarGrid, RadialGrid, SeparableCentralState,
    UniformGrid,
};
use crate::quantum_potential::{node_mask, quantum_potential_spherical_with};

/// Gradients of the separated characteristic function `W_r + W_theta + W_phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionGradients {
    /// `dW_r/dr` on the radial grid.
    pub dw_r: Vec<f64>,
    /// `dW_theta/dtheta` on the polar grid.
    pub dw_theta: Vec<f64>,
    /// Azimuthal sample angles, equidistant over one period.
    pub phis: Vec<f64>,
    /// `dW_phi/dphi` at `phis`.
    pub dw_phi: Vec<f64>,
}

impl ActionGradients {
    /// Gradients fixed by a motion mode: all zero at rest, `dW_phi/dphi =
    /// alpha_phi` when circulating.
    pub fn for_mode(state: &SeparableCentralState, mode: MotionMode, phi_samples: usize) -> Self {
        let p_phi = match mode {
            MotionMode::Rest => 0.0,
            MotionMode::Circulating => state.alpha_phi,
        };
        Self {
            dw_r: vec![0.0; state.radial_grid.len()],
            dw_theta: vec![0.0; state.polar_grid.len()],
            phis: azimuthal_samples(phi_samples),
            dw_phi: vec![p_phi; phi_samples],
        }
    }

    pub fn for_state(state: &SeparableCentralState, phi_samples: usize) -> Self {
        Self::for_mode(state, state.mode, phi_samples)
    }

    fn check(&self, state: &SeparableCentralState) -> Result<()> {
        if self.dw_r.len() != state.radial_grid.len() || self.dw_theta.len() != state.polar_grid.len() {
            return Err(Error::Size("action gradients do not match the state grids".into()));
        }
        if self.phis.len() != self.dw_phi.len() || self.phis.len() < 4 {
            return Err(Error::Size("need at least 4 azimuthal gradient samples".into()));
        }
        Ok(())
    }
}

/// The three continuity fields and the fluxes whose derivatives they are.
///
/// Masked samples (amplitude factor inside a node window) hold NaN in the
/// `f_*` fields; the fluxes are defined everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityFields {
    pub radial_grid: RadialGrid,
    pub polar_grid: PolarGrid,
    pub phis: Vec<f64>,
    pub f_r: Vec<f64>,
    pub f_theta: Vec<f64>,
    pub f_phi: Vec<f64>,
    /// `r^2 R_r^2 dW_r/dr`.
    pub flux_r: Vec<f64>,
    /// `sin(theta) R_theta^2 dW_theta/dtheta`.
    pub flux_theta: Vec<f64>,
    /// `R_phi^2 dW_phi/dphi`.
    pub flux_phi: Vec<f64>,
}

/// Normalized radial and polar factors of a state.
pub(crate) fn normalized_factors(state: &SeparableCentralState) -> Result<(Vec<f64>, Vec<f64>)> {
    let r2: Vec<f64> = state.radial_grid.coords().iter().map(|r| r * r).collect();
    let sin = state.polar_grid.sines();
    Ok((
        normalize_weighted(&state.radial, &r2, state.radial_grid.spacing())?,
        normalize_weighted(&state.polar, &sin, state.polar_grid.spacing())?,
    ))
}

/// `(1/a^2) d/dx(w a^2 g)`, NaN where `a` is inside a node window.
fn divergence_ratio(
    amp: &[f64],
    weight: &[f64],
    gradient: &[f64],
    h: f64,
    config: &DiagnosticsConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let flux: Vec<f64> = amp
        .iter()
        .zip(weight)
        .zip(gradient)
        .map(|((a, w), g)| w * a * a * g)
        .collect();
    let d = first_derivative(&flux, h, config.stencil)?;
    let mask = node_mask(amp, config.node_epsilon);
    let f = (0..amp.len())
        .map(|i| if mask[i] { f64::NAN } else { d[i] / (amp[i] * amp[i]) })
        .collect();
    Ok((f, flux))
}

pub fn continuity_fields(
    state: &SeparableCentralState,
    gradients: &ActionGradients,
    config: &DiagnosticsConfig,
) -> Result<ContinuityFields> {
    config.validate()?;
    state.validate()?;
    gradients.check(state)?;
    let (radial, polar) = normalized_factors(state)?;

    let r2: Vec<f64> = state.radial_grid.coords().iter().map(|r| r * r).collect();
    let (f_r, flux_r) = divergence_ratio(&radial, &r2, &gradients.dw_r, state.radial_grid.spacing(), config)?;

    let sin = state.polar_grid.sines();
    let (g, flux_theta) =
        divergence_ratio(&polar, &sin, &gradients.dw_theta, state.polar_grid.spacing(), config)?;
    let f_theta = g.iter().zip(&sin).map(|(g, s)| g / s).collect();

    // The azimuthal flux is periodic, so its derivative is taken spectrally.
    let r_phi: Vec<f64> = gradients.phis.iter().map(|p| state.azimuthal.value(*p)).collect();
    let flux_phi: Vec<f64> = r_phi.iter().zip(&gradients.dw_phi).map(|(a, g)| a * a * g).collect();
    let spectral: Vec<Complex64> = flux_phi.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let (d1, _) = periodic_derivatives(&spectral);
    let mask = node_mask(&r_phi, config.node_epsilon);
    let f_phi = (0..r_phi.len())
        .map(|k| if mask[k] { f64::NAN } else { d1[k].re / (r_phi[k] * r_phi[k]) })
        .collect();

    Ok(ContinuityFields {
        radial_grid: state.radial_grid,
        polar_grid: state.polar_grid,
        phis: gradients.phis.clone(),
        f_r,
        f_theta,
        f_phi,
        flux_r,
        flux_theta,
        flux_phi,
    })
}

/// `max |f_r + f_theta + f_phi / sin^2(theta)|` over the unmasked tensor samples.
///
/// The sum is separable, so for each `(theta, phi)` pair only the extreme
/// radial values need checking.
pub fn continuity_residual(fields: &ContinuityFields) -> Result<f64> {
    if fields.f_r.len() != fields.radial_grid.len()
        || fields.f_theta.len() != fields.polar_grid.len()
        || fields.f_phi.len() != fields.phis.len()
    {
        return Err(Error::Size("continuity fields do not match their grids".into()));
    }
    let finite = |v: &[f64]| v.iter().copied().filter(|x| x.is_finite()).collect::<Vec<_>>();
    let fr = finite(&fields.f_r);
    let fp = finite(&fields.f_phi);
    if fr.is_empty() || fp.is_empty() || fields.f_theta.iter().all(|x| !x.is_finite()) {
        return Err(Error::Degenerate("every continuity sample is node-masked".into()));
    }
    let hi = fr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = fr.iter().copied().fold(f64::INFINITY, f64::min);
    let mut worst = 0.0f64;
    for (j, ft) in fields.f_theta.iter().enumerate() {
        if !ft.is_finite() {
            continue;
        }
        let s = fields.polar_grid.sin_at(j);
        for p in &fp {
            let t = ft + p / (s * s);
            worst = worst.max((hi + t).abs()).max((lo + t).abs());
        }
    }
    Ok(worst)
}

/// `c_phi` from the azimuthal channel and `c_theta` from both the polar and
/// the radial channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationConstants {
    /// `f_phi`.
    pub c_phi: Spread,
    /// `f_theta + c_phi / sin^2(theta)`.
    pub c_theta: Spread,
    /// `-f_r`.
    pub c_theta_radial: Spread,
}

impl SeparationConstants {
    /// Difference between the two estimates of `c_theta`.
    pub fn agreement(&self) -> f64 {
        (self.c_theta.mean - self.c_theta_radial.mean).abs()
    }

    pub fn is_constant(&self, config: &DiagnosticsConfig) -> bool {
        [self.c_phi, self.c_theta, self.c_theta_radial]
            .iter()
            .all(|s| s.is_constant(config.constancy_rel, config.constancy_abs))
    }
}

/// Constants and their spreads without judging constancy.
pub fn measure_separation_constants(fields: &ContinuityFields) -> Result<SeparationConstants> {
    let degenerate = || Error::Degenerate("every continuity sample is node-masked".into());
    let c_phi = Spread::of(fields.f_phi.iter().copied()).ok_or_else(degenerate)?;
    let c_theta = Spread::of(fields.f_theta.iter().enumerate().map(|(j, f)| {
        let s = fields.polar_grid.sin_at(j);
        f + c_phi.mean / (s * s)
    }))
    .ok_or_else(degenerate)?;
    let c_theta_radial = Spread::of(fields.f_r.iter().map(|f| -f)).ok_or_else(degenerate)?;
    Ok(SeparationConstants {
        c_phi,
        c_theta,
        c_theta_radial,
    })
}

/// Like [`measure_separation_constants`], but a spread above the constancy
/// tolerance is reported as a state that is not separable-stationary.
pub fn extract_separation_constants(
    fields: &ContinuityFields,
    config: &DiagnosticsConfig,
) -> Result<SeparationConstants> {
    let c = measure_separation_constants(fields)?;
    for (name, s) in [("c_phi", c.c_phi), ("c_theta", c.c_theta), ("-f_r", c.c_theta_radial)] {
        if !s.is_constant(config.constancy_rel, config.constancy_abs) {
            return Err(Error::NotSeparable(format!(
                "{name} varies: mean {:.6e}, std-dev {:.3e}",
                s.mean, s.std_dev
            )));
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// All continuity constants and radial/polar fluxes vanish.
    Bound,
    /// Separable and stationary, but some `c` or a radial/polar flux is nonzero.
    Unbound,
    /// `Q + V` differs from `E`: the amplitude does not solve the separated equations.
    OffShell,
    /// The continuity fields are not constant per channel or do not cancel.
    NotSeparable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Bound => "bound",
            Verdict::Unbound => "unbound",
            Verdict::OffShell => "off-shell",
            Verdict::NotSeparable => "not separable-stationary",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityReport {
    pub fields: ContinuityFields,
    pub constants: SeparationConstants,
    pub lambda_r: Spread,
    pub lambda_theta: Spread,
    pub lambda_phi: Spread,
    pub residual_norm: f64,
    /// `max |p^2/2m + Q + V - E| / (|E| + |V(r)|)` over the unmasked
    /// `(r, theta)` samples; the kinetic term is nonzero only for a
    /// circulating state. Near the origin `Q` carries large canceling
    /// centrifugal parts, so the residual is measured against the local
    /// energy scale rather than `|E|` alone.
    pub energy_residual: f64,
    pub verdict: Verdict,
}

/// Continuity fields, constants, fluxes and the bound/unbound verdict for a
/// state under the given action gradients.
pub fn continuity_report(
    state: &SeparableCentralState,
    gradients: &ActionGradients,
    config: &DiagnosticsConfig,
) -> Result<ContinuityReport> {
    let fields = continuity_fields(state, gradients, config)?;
    let residual_norm = continuity_residual(&fields)?;
    let constants = measure_separation_constants(&fields)?;
    let spread = |v: &[f64]| Spread::of(v.iter().copied()).ok_or_else(|| Error::Degenerate("empty flux".into()));
    let lambda_r = spread(&fields.flux_r)?;
    let lambda_theta = spread(&fields.flux_theta)?;
    let lambda_phi = spread(&fields.flux_phi)?;

    let q = quantum_potential_spherical_with(state, config.stencil, config.node_epsilon)?;
    let v = state.potential.evaluate(&state.radial_grid, &state.units)?;
    let energy_residual = q.hamiltonian_residual_scaled(&v, state.energy, state.p_phi(), state.units.mass());

    let fluxes_constant = [lambda_r, lambda_theta, lambda_phi]
        .iter()
        .all(|s| s.is_constant(config.constancy_rel, config.constancy_abs));
    let tol = config.tolerance;
    let verdict = if residual_norm > tol || !constants.is_constant(config) || !fluxes_constant {
        Verdict::NotSeparable
    } else if energy_residual > config.energy_tolerance {
        Verdict::OffShell
    } else if constants.c_phi.mean.abs() > tol
        || constants.c_theta.mean.abs() > tol
        || constants.c_theta_radial.mean.abs() > tol
        || lambda_r.mean.abs() > tol
        || lambda_theta.mean.abs() > tol
    {
        Verdict::Unbound
    } else {
        Verdict::Bound
    };
    Ok(ContinuityReport {
        fields,
        constants,
        lambda_r,
        lambda_theta,
        lambda_phi,
        residual_norm,
        energy_residual,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::CentralRequest;
    use crate::diagnostics::fixtures;

    fn cfg() -> DiagnosticsConfig {
        DiagnosticsConfig::default()
    }

    #[test]
    fn rest_state_has_vanishing_fields() {
        let s = fixtures::rest(2, 1, 1);
        let rep = continuity_report(&s, &ActionGradients::for_state(&s, 8), &cfg()).unwrap();
        for f in rep.fields.f_r.iter().chain(&rep.fields.f_theta).chain(&rep.fields.f_phi) {
            assert!(f.is_nan() || *f == 0.0);
        }
        assert!(rep.residual_norm < 1e-10);
        assert!(rep.constants.c_phi.mean.abs() < 1e-10 && rep.constants.c_theta.mean.abs() < 1e-10);
        assert_eq!((rep.lambda_r.mean, rep.lambda_theta.mean, rep.lambda_phi.mean), (0.0, 0.0, 0.0));
        assert!(rep.energy_residual < 1e-6, "{}", rep.energy_residual);
        assert_eq!(rep.verdict, Verdict::Bound);
    }

    #[test]
    fn circulating_state_keeps_a_constant_azimuthal_flux() {
        let s = fixtures::hydrogen(CentralRequest::circulating(2, 1, 1));
        let rep = continuity_report(&s, &ActionGradients::for_state(&s, 8), &cfg()).unwrap();
        assert!(rep.fields.f_phi.iter().all(|f| *f == 0.0));
        assert_eq!(rep.lambda_phi.mean, 1.0);
        assert_eq!(rep.lambda_phi.std_dev, 0.0);
        assert!(rep.residual_norm < 1e-10);
        assert_eq!(rep.verdict, Verdict::Bound);
    }

    #[test]
    fn injected_radial_motion_is_detected() {
        let s = fixtures::rest(1, 0, 0);
        let mut g = ActionGradients::for_state(&s, 8);
        g.dw_r = s.radial_grid.coords();
        let fields = continuity_fields(&s, &g, &cfg()).unwrap();
        // R_r = 2 exp(-r) gives (1/R^2) d/dr(r^3 R^2) = 3 r^2 - 2 r^3.
        for i in (50..800).step_by(37) {
            let r = s.radial_grid.coord(i);
            let exact = 3.0 * r * r - 2.0 * r * r * r;
            assert!((fields.f_r[i] - exact).abs() < 1e-6 * exact.abs().max(1.0), "r={r}");
        }
        assert!(continuity_residual(&fields).unwrap() > 0.1);
        assert!(matches!(extract_separation_constants(&fields, &cfg()), Err(Error::NotSeparable(_))));
        let rep = continuity_report(&s, &g, &cfg()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotSeparable);
    }

    #[test]
    fn constant_injection_yields_c_theta() {
        let s = fixtures::rest(1, 0, 0);
        let mut fields = continuity_fields(&s, &ActionGradients::for_state(&s, 8), &cfg()).unwrap();
        fields.f_r.iter_mut().for_each(|f| *f = -5.0);
        fields.f_theta.iter_mut().for_each(|f| *f = 5.0);
        let c = extract_separation_constants(&fields, &cfg()).unwrap();
        assert_eq!(c.c_theta_radial.mean, 5.0);
        assert!((c.c_theta.mean - 5.0).abs() < 1e-12);
        assert!(c.agreement() < 1e-10);
        assert!(continuity_residual(&fields).unwrap() < 1e-12);
    }

    #[test]
    fn wrong_energy_is_off_shell() {
        let mut s = fixtures::rest(1, 0, 0);
        s.energy = -0.125;
        let rep = continuity_report(&s, &ActionGradients::for_state(&s, 8), &cfg()).unwrap();
        assert!(rep.energy_residual > 0.1);
        assert_eq!(rep.verdict, Verdict::OffShell);
    }

    #[test]
    fn reports_ignore_amplitude_scale() {
        let s = fixtures::rest(2, 1, 0);
        let g = ActionGradients::for_state(&s, 8);
        let mut inj = g.clone();
        inj.dw_r = s.radial_grid.coords();
        for grads in [&g, &inj] {
            let a = continuity_report(&s, grads, &cfg()).unwrap();
            for c in [-3.0, 0.01, 7.0] {
                let b = continuity_report(&s.scaled(c), grads, &cfg()).unwrap();
                assert_eq!(a.verdict, b.verdict);
                let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(1.0);
                assert!(close(a.residual_norm, b.residual_norm));
                assert!(close(a.lambda_r.mean, b.lambda_r.mean));
                assert!(close(a.energy_residual, b.energy_residual) || a.energy_residual < 1e-6);
            }
        }
    }

    #[test]
    fn mismatched_gradients_are_rejected() {
        let s = fixtures::rest(1, 0, 0);
        let mut g = ActionGradients::for_state(&s, 8);
        g.dw_r.pop();
        assert!(matches!(continuity_fields(&s, &g, &cfg()), Err(Error::Size(_))));
    }
}
