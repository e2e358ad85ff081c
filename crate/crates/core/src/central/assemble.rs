use crate::central::azimuthal::{circulating_azimuthal, solve_azimuthal, AzimuthalSolution};
use crate::central::polar::{solve_polar, PolarSolution};
use crate::central::radial::{solve_radial, RadialSolution};
use crate::eigensolver::ShootingConfig;
use crate::error::{Error, Result};
use crate::model::{
    AzimuthalParity, CentralPotential, MotionMode, PolarGrid, QuantumNumbers, RadialGrid,
    SeparableCentralState, Units,
};

/// Product state `R_r R_theta R_phi` from independently solved factors.
///
/// The quantum number `n` is reported as `n_r + l + 1`.
pub fn assemble_state(
    radial: &RadialSolution,
    polar: &PolarSolution,
    azimuthal: &AzimuthalSolution,
    potential: &CentralPotential,
    units: &Units,
) -> Result<SeparableCentralState> {
    if polar.m != azimuthal.m {
        return Err(Error::Consistency(format!(
            "polar factor solved for m = {}, azimuthal factor has m = {}",
            polar.m, azimuthal.m
        )));
    }
    if polar.l < polar.m {
        return Err(Error::Consistency(format!("l = {} below m = {}", polar.l, polar.m)));
    }
    let scale = polar.alpha_theta_sq.abs().max(units.hbar() * units.hbar());
    if (radial.alpha_theta_sq - polar.alpha_theta_sq).abs() > 1e-9 * scale {
        return Err(Error::Consistency(format!(
            "radial factor solved with alpha_theta_sq = {}, polar factor gives {}",
            radial.alpha_theta_sq, polar.alpha_theta_sq
        )));
    }
    if azimuthal.mode == MotionMode::Circulating {
        let ratio = azimuthal.alpha_phi / units.hbar();
        if (ratio - polar.m as f64).abs() > 1e-12 * ratio.max(1.0) {
            return Err(Error::Consistency(format!(
                "circulating alpha_phi / hbar = {ratio} does not match the polar m = {}",
                polar.m
            )));
        }
    }
    let state = SeparableCentralState {
        radial_grid: radial.grid,
        radial: radial.samples.clone(),
        polar_grid: polar.grid,
        polar: polar.samples.clone(),
        azimuthal: azimuthal.factor(),
        energy: radial.energy,
        alpha_theta_sq: polar.alpha_theta_sq,
        alpha_phi: azimuthal.alpha_phi,
        mode: azimuthal.mode,
        quantum_numbers: QuantumNumbers {
            n: radial.n_r + polar.l + 1,
            l: polar.l,
            m: polar.m,
        },
        potential: potential.clone(),
        units: *units,
    };
    state.validate()?;
    Ok(state)
}

/// Everything needed to pick one separated state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralRequest {
    pub n: u32,
    pub l: u32,
    pub m: u32,
    pub parity: AzimuthalParity,
    pub mode: MotionMode,
}

impl CentralRequest {
    pub fn rest(n: u32, l: u32, m: u32, parity: AzimuthalParity) -> Self {
        Self {
            n,
            l,
            m,
            parity,
            mode: MotionMode::Rest,
        }
    }

    pub fn circulating(n: u32, l: u32, m: u32) -> Self {
        Self {
            n,
            l,
            m,
            parity: AzimuthalParity::Const,
            mode: MotionMode::Circulating,
        }
    }
}

/// Solves the three separated equations for one `(n, l, m)` and assembles them.
pub fn solve_central_state(
    potential: &CentralPotential,
    request: &CentralRequest,
    radial_grid: &RadialGrid,
    polar_grid: &PolarGrid,
    units: &Units,
    config: &ShootingConfig,
) -> Result<SeparableCentralState> {
    let CentralRequest { n, l, m, .. } = *request;
    if l >= n || m > l {
        return Err(Error::Input(format!(
            "need 0 <= m <= l < n, got n = {n}, l = {l}, m = {m}"
        )));
    }
    let azimuthal = match request.mode {
        MotionMode::Rest => solve_azimuthal(m, request.parity, units)?,
        MotionMode::Circulating => circulating_azimuthal(m as f64 * units.hbar(), units)?,
    };
    let polar = solve_polar(m, l, polar_grid, units)?
        .pop()
        .ok_or_else(|| Error::Convergence("polar solve returned nothing".into()))?;
    let n_r = (n - l - 1) as usize;
    let cfg = ShootingConfig {
        max_states: n_r + 1,
        ..*config
    };
    let radial = solve_radial(potential, polar.alpha_theta_sq, radial_grid, units, &cfg)?;
    let radial = radial.get(n_r).ok_or_else(|| {
        Error::Convergence(format!(
            "only {} radial states found for l = {l}, wanted n_r = {n_r}",
            radial.len()
        ))
    })?;
    assemble_state(radial, &polar, &azimuthal, potential, units)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::central::coulomb_grid;

    fn setup() -> (CentralPotential, RadialGrid, PolarGrid, Units) {
        let u = Units::default();
        let p = CentralPotential::Coulomb { z: 1.0 };
        let rg = coulomb_grid(&p, 2, 0.01, &u).unwrap();
        (p, rg, PolarGrid::new(1000).unwrap(), u)
    }

    #[test]
    fn hydrogen_states_carry_their_constants() {
        let (p, rg, pg, u) = setup();
        let cfg = ShootingConfig::default();
        let s = solve_central_state(&p, &CentralRequest::rest(1, 0, 0, AzimuthalParity::Cos), &rg, &pg, &u, &cfg)
            .unwrap();
        assert!((s.energy + 0.5).abs() < 1e-7, "{} {}", s.energy, s.alpha_theta_sq);
        assert!(s.alpha_theta_sq.abs() < 1e-7);
        assert_eq!(s.alpha_phi, 0.0);
        for parity in [AzimuthalParity::Cos, AzimuthalParity::Sin] {
            let s = solve_central_state(&p, &CentralRequest::rest(2, 1, 1, parity), &rg, &pg, &u, &cfg).unwrap();
            assert!((s.energy + 0.125).abs() < 1e-7);
            assert!((s.alpha_theta_sq - 2.0).abs() < 1e-6);
            assert_eq!(s.alpha_phi, 1.0);
            assert_eq!(s.azimuthal.parity, parity);
            assert_eq!(s.quantum_numbers, QuantumNumbers { n: 2, l: 1, m: 1 });
        }
    }

    #[test]
    fn mismatched_factors_are_inconsistent() {
        let (p, rg, pg, u) = setup();
        let polar = solve_polar(0, 1, &pg, &u).unwrap();
        let radial = solve_radial(&p, 0.0, &rg, &u, &ShootingConfig::with_states(1)).unwrap();
        let az = solve_azimuthal(0, AzimuthalParity::Cos, &u).unwrap();
        assert!(matches!(
            assemble_state(&radial[0], &polar[1], &az, &p, &u),
            Err(Error::Consistency(_))
        ));
        let az1 = solve_azimuthal(1, AzimuthalParity::Cos, &u).unwrap();
        assert!(matches!(
            assemble_state(&radial[0], &polar[0], &az1, &p, &u),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn circulating_needs_integer_alpha_phi() {
        let (p, rg, pg, u) = setup();
        let polar = solve_polar(1, 1, &pg, &u).unwrap().pop().unwrap();
        let radial = solve_radial(&p, polar.alpha_theta_sq, &rg, &u, &ShootingConfig::with_states(1)).unwrap();
        let half = circulating_azimuthal(1.5, &u).unwrap();
        assert!(assemble_state(&radial[0], &polar, &half, &p, &u).is_err());
        let one = circulating_azimuthal(1.0, &u).unwrap();
        let s = assemble_state(&radial[0], &polar, &one, &p, &u).unwrap();
        assert_eq!(s.p_phi(), 1.0);
    }

    #[test]
    fn impossible_quantum_numbers() {
        let (p, rg, pg, u) = setup();
        let req = CentralRequest::rest(1, 1, 0, AzimuthalParity::Cos);
        assert!(solve_central_state(&p, &req, &rg, &pg, &u, &ShootingConfig::default()).is_err());
    }
}
