use std::fmt;
use std::path::{Path, PathBuf};

use bohmquant_core::central::solve_central_state;
use bohmquant_core::diagnostics::{
    action_winding, continuity_report, operator_ratios, state_phase_gradient, verify_turning_point_argument,
    ActionGradients, DiagnosticsConfig, TurningPointCheck, Verdict,
};
use bohmquant_core::dynamics::{
    energy_drift, integrate_canonical, random_interior_points, rest_check, ForceField, PhasePoint, REST_TOLERANCE,
};
use bohmquant_core::eigensolver::solve_bound_states_1d;
use bohmquant_core::model::{
    load_bundle, save_bundle, MotionMode, Potential1D, SeparableCentralState, StateBundle, StationaryState1D,
    UniformGrid,
};
use bohmquant_core::quantum_potential::{quantum_potential_1d, quantum_potential_spherical};

use crate::config::{Config, ConfigError};
use crate::output::{num, Table};
use crate::setup::{self, Overrides, Problem};

/// Why a command stopped; each kind has its own exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Solver(String),
    Diagnostic(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Solver(_) => 2,
            Failure::Diagnostic(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Solver(m) => write!(f, "solver failure: {m}"),
            Failure::Diagnostic(m) => write!(f, "diagnostic failure: {m}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(format!("config {e}"))
    }
}

impl From<bohmquant_core::Error> for Failure {
    fn from(e: bohmquant_core::Error) -> Self {
        Failure::Solver(e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(format!("{e:#}"))
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

pub type Outcome = Result<(), Failure>;

fn no_classical(ov: &Overrides, command: &str) -> Outcome {
    if ov.classical {
        return Err(Failure::Usage(format!("--classical has no meaning for {command}")));
    }
    Ok(())
}

fn line_problem(cfg: &Config) -> Result<Potential1D, Failure> {
    match setup::problem(cfg)? {
        Problem::Line(p) => Ok(p),
        Problem::Central(_) => Err(Failure::Usage("this command needs a 1D potential kind".into())),
    }
}

fn solve_spectrum(cfg: &Config, ov: &Overrides) -> Result<(Potential1D, Vec<StationaryState1D>, Vec<f64>), Failure> {
    let potential = line_problem(cfg)?;
    let units = setup::units(cfg, ov)?;
    let grid = setup::grid_1d(cfg, &potential)?;
    let shooting = setup::shooting(cfg, ov)?;
    let spec = solve_bound_states_1d(&potential, &grid, &units, &shooting)?;
    for w in &spec.warnings {
        eprintln!("warning: {w}");
    }
    for r in &spec.rejected {
        eprintln!("warning: rejected state {} at E = {}: {}", r.index, r.energy, r.reason);
    }
    if spec.states.is_empty() {
        return Err(Failure::Solver("no bound states found".into()));
    }
    let residuals = spec.convergence.iter().map(|c| c.residual).collect();
    Ok((potential, spec.states, residuals))
}

pub fn solve1d(cfg: &Config, ov: &Overrides, out: &Path) -> Outcome {
    no_classical(ov, "solve1d")?;
    let (potential, states, residuals) = solve_spectrum(cfg, ov)?;
    setup::output_dir(out)?;

    let mut spectrum = Table::new(&["index", "energy [energy]", "nodes", "residual [h^2 scaled]"]);
    for (k, s) in states.iter().enumerate() {
        spectrum.push(vec![k.to_string(), num(s.energy()), s.nodes().to_string(), num(residuals[k])]);

        let grid = s.grid();
        let v = potential.evaluate(grid, s.units())?;
        let q = quantum_potential_1d(s.amplitude(), grid, s.units())?;
        let mut per = Table::new(&[
            "x [length]",
            "V [energy]",
            "R [length^-1/2]",
            "Q [energy]",
            "Q+V-E [energy]",
        ]);
        for (i, (vi, qi)) in v.iter().zip(&q.q).enumerate() {
            per.push(vec![
                num(grid.coord(i)),
                num(*vi),
                num(s.amplitude()[i]),
                num(*qi),
                num(qi + vi - s.energy()),
            ]);
        }
        per.write(&out.join(format!("state_{k:02}.csv")))?;
        let bundle = StateBundle::Line { state: s.clone(), potential: potential.clone() };
        save_bundle(&bundle, &out.join(format!("state_{k:02}.bundle.csv")))?;
    }
    spectrum.write(&out.join("spectrum.csv"))?;
    println!("{}", spectrum.render());
    Ok(())
}

fn state_tag(s: &SeparableCentralState) -> String {
    let qn = s.quantum_numbers;
    format!("n{}l{}m{}_{}_{}", qn.n, qn.l, qn.m, s.azimuthal.parity.as_str(), s.mode.as_str())
}

pub fn solve_central(cfg: &Config, ov: &Overrides, out: &Path) -> Outcome {
    no_classical(ov, "solve-central")?;
    let Problem::Central(potential) = setup::problem(cfg)? else {
        return Err(Failure::Usage("solve-central needs a central potential kind".into()));
    };
    let units = setup::units(cfg, ov)?;
    let requests = setup::requests(cfg)?;
    let n_max = requests.iter().map(|r| r.n).max().unwrap_or(1);
    let rg = setup::radial_grid(cfg, &potential, n_max, &units)?;
    let pg = setup::polar_grid(cfg)?;
    let shooting = setup::shooting(cfg, ov)?;
    setup::output_dir(out)?;

    let mut table = Table::new(&[
        "n",
        "l",
        "m",
        "parity",
        "mode",
        "energy [energy]",
        "alpha_theta_sq [action^2]",
        "alpha_phi [action]",
    ]);
    let mut failure = None;
    for req in &requests {
        let s = match solve_central_state(&potential, req, &rg, &pg, &units, &shooting) {
            Ok(s) => s,
            Err(e) => {
                failure = Some(Failure::Solver(format!("(n, l, m) = ({}, {}, {}): {e}", req.n, req.l, req.m)));
                break;
            }
        };
        table.push(vec![
            req.n.to_string(),
            req.l.to_string(),
            req.m.to_string(),
            s.azimuthal.parity.as_str().into(),
            s.mode.as_str().into(),
            num(s.energy),
            num(s.alpha_theta_sq),
            num(s.alpha_phi),
        ]);
        write_central_state(&s, out)?;
    }
    // Whatever was solved before a failure is kept on disk.
    table.write(&out.join("central.csv"))?;
    println!("{}", table.render());
    failure.map_or(Ok(()), Err)
}

fn write_central_state(s: &SeparableCentralState, out: &Path) -> Outcome {
    let tag = state_tag(s);
    let q = quantum_potential_spherical(s)?;
    let mut radial = Table::new(&["r [length]", "R_r [relative]", "Q_r [energy]"]);
    for i in 0..s.radial_grid.len() {
        let qr = if q.radial_mask[i] { f64::NAN } else { q.q_r[i] };
        radial.push(vec![num(s.radial_grid.coord(i)), num(s.radial[i]), num(qr)]);
    }
    radial.write(&out.join(format!("radial_{tag}.csv")))?;
    let mut polar = Table::new(&["theta [rad]", "R_theta [relative]", "Q_theta [energy length^2]"]);
    for j in 0..s.polar_grid.len() {
        let qt = if q.polar_mask[j] { f64::NAN } else { q.q_theta[j] };
        polar.push(vec![num(s.polar_grid.coord(j)), num(s.polar[j]), num(qt)]);
    }
    polar.write(&out.join(format!("polar_{tag}.csv")))?;
    save_bundle(&StateBundle::Central(s.clone()), &out.join(format!("state_{tag}.bundle.csv")))?;
    Ok(())
}

/// One row of a verification report.
struct Check {
    name: String,
    value: f64,
    threshold: String,
    passed: bool,
}

fn check(name: &str, value: f64, threshold: f64) -> Check {
    Check {
        name: name.into(),
        value,
        threshold: format!("< {}", num(threshold)),
        passed: value < threshold,
    }
}

fn expect(name: &str, value: f64, expected: &str, passed: bool) -> Check {
    Check {
        name: name.into(),
        value,
        threshold: expected.into(),
        passed,
    }
}

struct RestSettings {
    points: usize,
    dt: f64,
    steps: usize,
}

fn rest_checks(field: &ForceField, rest: &RestSettings, seed: u64, label: &str) -> Result<Vec<Check>, Failure> {
    let pts = random_interior_points(field, rest.points, seed)?;
    let verdicts = rest_check(field, &pts, rest.dt, rest.steps, REST_TOLERANCE)?;
    let measured: Vec<_> = verdicts.iter().filter(|v| v.passed().is_some()).collect();
    let worst = measured.iter().filter_map(|v| v.displacement()).fold(0.0, f64::max);
    let all = measured.iter().all(|v| v.passed() == Some(true));
    Ok(vec![
        expect(&format!("{label} points measured"), measured.len() as f64, "> 0", !measured.is_empty()),
        Check {
            name: format!("{label} max displacement [length]"),
            value: worst,
            threshold: format!("< {}", num(REST_TOLERANCE)),
            passed: all && !measured.is_empty(),
        },
    ])
}

fn verify_line(
    state: &StationaryState1D,
    potential: &Potential1D,
    cfg: &Config,
    ov: &Overrides,
    rest: &RestSettings,
) -> Result<Vec<Check>, Failure> {
    let q_tol = cfg.get_or("verify.q_tol", 1e-6)?;
    let v = potential.evaluate(state.grid(), state.units())?;
    let q = quantum_potential_1d(state.amplitude(), state.grid(), state.units())?;
    let scale = state.energy().abs().max(f64::MIN_POSITIVE);
    let mut checks = vec![check("|Q+V-E|/|E|", q.energy_residual(&v, state.energy()) / scale, q_tol)];
    let field = ForceField::line(state, potential, !ov.classical)?;
    checks.extend(rest_checks(&field, rest, ov.seed, if ov.classical { "rest (Q off)" } else { "rest" })?);
    Ok(checks)
}

fn verify_central(s: &SeparableCentralState, cfg: &Config, ov: &Overrides, rest: &RestSettings) -> Result<Vec<Check>, Failure> {
    let mut dc = DiagnosticsConfig::default();
    dc.tolerance = ov.tol.unwrap_or(cfg.get_or("verify.tol", dc.tolerance)?);
    dc.validate()?;
    let tol = dc.tolerance;
    let gradients = ActionGradients::for_state(s, dc.phi_samples);
    let rep = continuity_report(s, &gradients, &dc)?;
    let mut checks = vec![
        check("continuity residual", rep.residual_norm, tol),
        check("|c_phi|", rep.constants.c_phi.mean.abs(), tol),
        check("|c_theta|", rep.constants.c_theta.mean.abs(), tol),
        check("energy residual [relative]", rep.energy_residual, dc.energy_tolerance),
        expect("verdict bound", 0.0, "bound", rep.verdict == Verdict::Bound),
    ];
    if rep.verdict != Verdict::Bound {
        checks.last_mut().unwrap().threshold = format!("bound (got {})", rep.verdict.as_str());
    }

    let a = s.potential.natural_length(&s.units);
    let zero = vec![0.0; s.radial_grid.len()];
    match verify_turning_point_argument(&s.radial, &zero, &s.radial_grid, (0.5 * a, 4.0 * a), rep.constants.c_theta.mean)? {
        TurningPointCheck::Applicable { lhs, rhs, consistent, .. } => {
            checks.push(expect("turning point |lhs - rhs|", (lhs - rhs).abs(), "consistent", consistent))
        }
        TurningPointCheck::NotApplicable { reason } => {
            checks.push(expect("turning point", f64::NAN, reason, false))
        }
    }

    let ratios = operator_ratios(s, s.mode, &dc)?;
    let budget = 50.0 * ratios.spacing * ratios.spacing;
    for (name, r) in [("H", ratios.hamiltonian), ("L^2", ratios.l_squared), ("Lz^2", ratios.lz_squared)] {
        checks.push(check(&format!("{name} psi/psi real spread [relative]"), r.real_max_deviation / r.scale, budget));
        checks.push(check(&format!("{name} psi/psi imaginary part"), r.imag_max, 1e-8));
    }
    let lz_constant = ratios.lz.relative_deviation() < dc.constancy_rel;
    let circulating = s.mode == MotionMode::Circulating;
    checks.push(expect(
        "Lz psi/psi spread [relative]",
        ratios.lz.relative_deviation(),
        if circulating { "constant" } else { "varies (rest mode, m > 0) or constant (m = 0)" },
        lz_constant == circulating || s.quantum_numbers.m == 0,
    ));

    if circulating {
        let (phis, grad) = state_phase_gradient(s, 64);
        let w = action_winding(&phis, &grad, &s.units)?;
        checks.push(expect(
            "action winding",
            w.value,
            &format!("integer = {}", s.quantum_numbers.m),
            w.integral && w.nearest == i64::from(s.quantum_numbers.m),
        ));
    } else {
        let field = ForceField::central(s, !ov.classical)?;
        checks.extend(rest_checks(&field, rest, ov.seed, if ov.classical { "rest (Q off)" } else { "rest" })?);
    }
    Ok(checks)
}

pub fn verify(cfg: &Config, ov: &Overrides, input: Option<PathBuf>, out: &Path) -> Outcome {
    let path = input
        .or_else(|| cfg.path("verify.input"))
        .ok_or_else(|| Failure::Usage("verify needs a bundle path (argument or [verify] input)".into()))?;
    let bundle = load_bundle(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let rest = RestSettings {
        points: cfg.get_or("verify.rest_points", 10usize)?,
        dt: cfg.get_or("verify.rest_dt", 1e-3)?,
        steps: cfg.get_or("verify.rest_steps", 10_000usize)?,
    };
    let checks = match &bundle {
        StateBundle::Line { state, potential } => verify_line(state, potential, cfg, ov, &rest)?,
        StateBundle::Central(s) => verify_central(s, cfg, ov, &rest)?,
    };
    setup::output_dir(out)?;
    let mut table = Table::new(&["check", "value", "expected", "status"]);
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        table.push(vec![c.name.clone(), num(c.value), c.threshold.clone(), status.into()]);
    }
    table.write(&out.join("verify.csv"))?;
    println!("{}", table.render());
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        println!("all {} checks passed", checks.len());
        Ok(())
    } else {
        Err(Failure::Diagnostic(format!("{} of {} checks failed: {}", failed.len(), checks.len(), failed.join(", "))))
    }
}

pub fn trajectory(cfg: &Config, ov: &Overrides, out: &Path) -> Outcome {
    let q_on = !ov.classical;
    let (field, names): (ForceField, &[&str]) = if let Some(path) = cfg.path("trajectory.input") {
        match load_bundle(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))? {
            StateBundle::Line { state, potential } => (ForceField::line(&state, &potential, q_on)?, &LINE_NAMES),
            StateBundle::Central(s) => (ForceField::central(&s, q_on)?, &CENTRAL_NAMES),
        }
    } else {
        match setup::problem(cfg)? {
            Problem::Line(_) => {
                let (potential, states, _) = solve_spectrum(cfg, ov)?;
                let k = cfg.get_or("trajectory.state", 0usize)?;
                let state = states
                    .get(k)
                    .ok_or_else(|| cfg.invalid("trajectory.state", format!("only {} states were found", states.len())))?;
                (ForceField::line(state, &potential, q_on)?, &LINE_NAMES)
            }
            Problem::Central(potential) => {
                let units = setup::units(cfg, ov)?;
                let reqs = setup::requests(cfg)?;
                let [req] = reqs.as_slice() else {
                    return Err(Failure::Usage("trajectory needs a single [state], not n_max".into()));
                };
                let rg = setup::radial_grid(cfg, &potential, req.n, &units)?;
                let pg = setup::polar_grid(cfg)?;
                let s = solve_central_state(&potential, req, &rg, &pg, &units, &setup::shooting(cfg, ov)?)?;
                (ForceField::central(&s, q_on)?, &CENTRAL_NAMES)
            }
        }
    };
    let dim = field.dim();
    let start = cfg.list("trajectory.start")?.ok_or_else(|| Failure::Usage("missing required key trajectory.start".into()))?;
    let momentum = cfg.list("trajectory.momentum")?.unwrap_or_else(|| vec![0.0; dim]);
    if start.len() != dim || momentum.len() != dim {
        return Err(cfg.invalid("trajectory.start", format!("start and momentum need {dim} components")).into());
    }
    let dt = cfg.get_or("trajectory.dt", 1e-3)?;
    let steps = cfg.get_or("trajectory.steps", 10_000usize)?;
    let initial = PhasePoint { t: 0.0, q: start, p: momentum.clone() };
    let traj = integrate_canonical(&field, &initial, dt, steps)?;

    setup::output_dir(out)?;
    let mut header = vec!["t [time]"];
    header.extend(&names[..2 * dim]);
    header.push("H [energy]");
    let mut table = Table::new(&header);
    for (p, h) in traj.points.iter().zip(&traj.hamiltonian) {
        let mut row = vec![num(p.t)];
        row.extend(p.q.iter().chain(&p.p).map(|v| num(*v)));
        row.push(num(*h));
        table.push(row);
    }
    table.write(&out.join("trajectory.csv"))?;

    let displacement = traj.max_displacement();
    let started_at_rest = momentum.iter().all(|p| *p == 0.0);
    let verdict = match (traj.exited, started_at_rest, displacement < REST_TOLERANCE) {
        (true, _, _) => "left the domain",
        (false, true, true) => "stayed at rest",
        (false, true, false) => "moved from rest",
        (false, false, _) => "moving",
    };
    let drift = if traj.points.len() > 1 { energy_drift(&traj)?.max_deviation } else { 0.0 };
    let mut summary = Table::new(&["quantity", "value"]);
    summary.push(vec!["q_enabled".into(), q_on.to_string()]);
    summary.push(vec!["steps".into(), (traj.points.len() - 1).to_string()]);
    summary.push(vec!["dt [time]".into(), num(dt)]);
    summary.push(vec!["max displacement [length]".into(), num(displacement)]);
    summary.push(vec!["max energy drift [energy]".into(), num(drift)]);
    summary.push(vec!["exited".into(), traj.exited.to_string()]);
    summary.push(vec!["verdict".into(), verdict.into()]);
    summary.write(&out.join("trajectory_summary.csv"))?;
    println!("{}", summary.render());
    Ok(())
}

const LINE_NAMES: [&str; 2] = ["x [length]", "p_x [momentum]"];
const CENTRAL_NAMES: [&str; 6] = [
    "r [length]",
    "theta [rad]",
    "phi [rad]",
    "p_r [momentum]",
    "p_theta [action]",
    "p_phi [action]",
];
