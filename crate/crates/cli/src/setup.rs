//! Turns a parsed [`Config`] plus command-line overrides into solver inputs.

use std::path::Path;

use bohmquant_core::central::{coulomb_grid, CentralRequest};
use bohmquant_core::eigensolver::ShootingConfig;
use bohmquant_core::model::{
    AzimuthalParity, CentralPotential, Grid1D, MotionMode, PolarGrid, Potential1D, RadialGrid, Table, Units,
};

use crate::config::{Config, ConfigError};

/// Flags shared by every command that override config entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
    pub tol: Option<f64>,
    pub seed: u64,
    pub classical: bool,
}

pub enum Problem {
    Line(Potential1D),
    Central(CentralPotential),
}

pub fn units(cfg: &Config, ov: &Overrides) -> Result<Units, ConfigError> {
    let hbar = ov.hbar.unwrap_or(cfg.get_or("units.hbar", 1.0)?);
    let mass = ov.mass.unwrap_or(cfg.get_or("units.mass", 1.0)?);
    Units::new(hbar, mass).map_err(|e| cfg.invalid("units.hbar", e.to_string()))
}

fn read_table(cfg: &Config) -> Result<Table, ConfigError> {
    let path = cfg.path("potential.table").ok_or_else(|| cfg.invalid("potential.kind", "tabulated potentials need 'table'"))?;
    let fail = |m: String| cfg.invalid("potential.table", format!("{}: {m}", path.display()));
    let mut reader = csv::Reader::from_path(&path).map_err(|e| fail(e.to_string()))?;
    let (mut xs, mut vs) = (Vec::new(), Vec::new());
    for (k, row) in reader.records().enumerate() {
        let row = row.map_err(|e| fail(e.to_string()))?;
        let num = |i: usize| -> Result<f64, ConfigError> {
            row.get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| fail(format!("row {} needs two numeric columns", k + 2)))
        };
        xs.push(num(0)?);
        vs.push(num(1)?);
    }
    Table::new(xs, vs).map_err(|e| fail(e.to_string()))
}

pub fn problem(cfg: &Config) -> Result<Problem, ConfigError> {
    let kind: String = cfg.require("potential.kind")?;
    let p = match kind.as_str() {
        "box" => Problem::Line(Potential1D::Box { width: cfg.get_or("potential.width", 1.0)? }),
        "harmonic" => Problem::Line(Potential1D::Harmonic { omega: cfg.get_or("potential.omega", 1.0)? }),
        "finite_well" => Problem::Line(Potential1D::FiniteWell {
            depth: cfg.require("potential.depth")?,
            width: cfg.require("potential.width")?,
        }),
        "tabulated" => Problem::Line(Potential1D::Tabulated(read_table(cfg)?)),
        "coulomb" => Problem::Central(CentralPotential::Coulomb { z: cfg.get_or("potential.z", 1.0)? }),
        "harmonic3d" => Problem::Central(CentralPotential::Harmonic3d { omega: cfg.get_or("potential.omega", 1.0)? }),
        "tabulated_central" => Problem::Central(CentralPotential::Tabulated(read_table(cfg)?)),
        other => return Err(cfg.invalid("potential.kind", format!("unknown potential kind '{other}'"))),
    };
    let check = match &p {
        Problem::Line(v) => v.validate(),
        Problem::Central(v) => v.validate(),
    };
    check.map_err(|e| cfg.invalid("potential.kind", e.to_string()))?;
    Ok(p)
}

pub fn grid_1d(cfg: &Config, potential: &Potential1D) -> Result<Grid1D, ConfigError> {
    let (lo, hi) = match potential {
        Potential1D::Box { width } => (0.0, *width),
        Potential1D::Harmonic { .. } => (-8.0, 8.0),
        Potential1D::FiniteWell { width, .. } => (-2.0 * width, 2.0 * width),
        Potential1D::Tabulated(t) => (t.coords()[0], t.coords()[t.coords().len() - 1]),
    };
    let x_min = cfg.get_or("grid.x_min", lo)?;
    let x_max = cfg.get_or("grid.x_max", hi)?;
    let n = cfg.get_or("grid.n_points", 2001usize)?;
    Grid1D::new(x_min, x_max, n).map_err(|e| cfg.invalid("grid.n_points", e.to_string()))
}

/// Radial grid large enough for principal number `n_max`, unless `r_max` is given.
pub fn radial_grid(cfg: &Config, potential: &CentralPotential, n_max: u32, units: &Units) -> Result<RadialGrid, ConfigError> {
    let h = cfg.get_or("grid.h", 0.05)?;
    let grid = match cfg.get::<f64>("grid.r_max")? {
        Some(r_max) => RadialGrid::with_spacing(r_max, h),
        None => coulomb_grid(potential, n_max, h, units),
    };
    grid.map_err(|e| cfg.invalid("grid.h", e.to_string()))
}

pub fn polar_grid(cfg: &Config) -> Result<PolarGrid, ConfigError> {
    PolarGrid::new(cfg.get_or("grid.n_polar", 150usize)?).map_err(|e| cfg.invalid("grid.n_polar", e.to_string()))
}

pub fn shooting(cfg: &Config, ov: &Overrides) -> Result<ShootingConfig, ConfigError> {
    let mut s = ShootingConfig::with_states(cfg.get_or("solver.states", 10usize)?);
    s.bisection_tol = ov.tol.unwrap_or(cfg.get_or("solver.bisection_tol", s.bisection_tol)?);
    s.energy_bracket = match (cfg.get::<f64>("solver.e_min")?, cfg.get::<f64>("solver.e_max")?) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => return Err(cfg.invalid("solver.e_min", "set both e_min and e_max or neither")),
    };
    s.validate().map_err(|e| cfg.invalid("solver.states", e.to_string()))?;
    Ok(s)
}

/// Requested central states: a single `(n, l, m)` or every rest state up to `n_max`.
pub fn requests(cfg: &Config) -> Result<Vec<CentralRequest>, ConfigError> {
    if let Some(n_max) = cfg.get::<u32>("state.n_max")? {
        let mut out = Vec::new();
        for n in 1..=n_max {
            for l in 0..n {
                for m in 0..=l {
                    let parity = if m == 0 { AzimuthalParity::Const } else { AzimuthalParity::Cos };
                    out.push(CentralRequest::rest(n, l, m, parity));
                }
            }
        }
        return Ok(out);
    }
    let n = cfg.get_or("state.n", 1u32)?;
    let l = cfg.get_or("state.l", 0u32)?;
    let m = cfg.get_or("state.m", 0u32)?;
    let mode = match cfg.str("state.mode") {
        Some(s) => MotionMode::parse(s).map_err(|e| cfg.invalid("state.mode", e.to_string()))?,
        None => MotionMode::Rest,
    };
    Ok(vec![match mode {
        MotionMode::Circulating => CentralRequest::circulating(n, l, m),
        MotionMode::Rest => {
            let parity = match cfg.str("state.parity") {
                Some(s) => AzimuthalParity::parse(s).map_err(|e| cfg.invalid("state.parity", e.to_string()))?,
                None if m == 0 => AzimuthalParity::Const,
                None => AzimuthalParity::Cos,
            };
            CentralRequest::rest(n, l, m, parity)
        }
    }])
}

pub fn output_dir(path: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(path)
}
