//! Plain-text state bundles: a block of `# key = value` constants followed by
//! one CSV table of samples.
//!
//! ```text
//! # bohmquant state bundle
//! # kind = central
//! # potential = coulomb
//! # z = 1.0
//! ...
//! axis,index,coordinate [length | rad],amplitude [normalized factor]
//! radial,0,0.05,0.0475...
//! polar,0,0.0104...,0.4886...
//! ```
//!
//! Floats are written in shortest round-trip form, so a bundle reloads to
//! the bit-identical state.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{
    AzimuthalFactor, AzimuthalParity, CentralPotential, Grid1D, MotionMode, PolarGrid, Potential1D,
    QuantumNumbers, RadialGrid, SeparableCentralState, StationaryState1D, Table, UniformGrid, Units,
};
use crate::error::{Error, Result};

const MAGIC: &str = "bohmquant state bundle";
const HEADER: [&str; 4] = ["axis", "index", "coordinate [length | rad]", "amplitude [normalized factor]"];

#[derive(Debug, Clone, PartialEq)]
pub enum StateBundle {
    Line {
        state: StationaryState1D,
        potential: Potential1D,
    },
    Central(SeparableCentralState),
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn potential_1d_meta(p: &Potential1D, meta: &mut Vec<(&'static str, String)>) {
    match p {
        Potential1D::Box { width } => {
            meta.push(("potential", "box".into()));
            meta.push(("width", num(*width)));
        }
        Potential1D::Harmonic { omega } => {
            meta.push(("potential", "harmonic".into()));
            meta.push(("omega", num(*omega)));
        }
        Potential1D::FiniteWell { depth, width } => {
            meta.push(("potential", "finite_well".into()));
            meta.push(("depth", num(*depth)));
            meta.push(("width", num(*width)));
        }
        Potential1D::Tabulated(_) => meta.push(("potential", "tabulated".into())),
    }
}

fn central_potential_meta(p: &CentralPotential, meta: &mut Vec<(&'static str, String)>) {
    match p {
        CentralPotential::Coulomb { z } => {
            meta.push(("potential", "coulomb".into()));
            meta.push(("z", num(*z)));
        }
        CentralPotential::Harmonic3d { omega } => {
            meta.push(("potential", "harmonic3d".into()));
            meta.push(("omega", num(*omega)));
        }
        CentralPotential::Tabulated(_) => meta.push(("potential", "tabulated".into())),
    }
}

pub fn write_bundle(bundle: &StateBundle, out: impl Write) -> Result<()> {
    let mut meta: Vec<(&'static str, String)> = Vec::new();
    let mut rows: Vec<(&'static str, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut table = None;
    match bundle {
        StateBundle::Line { state, potential } => {
            let g = state.grid();
            meta.push(("kind", "line".into()));
            potential_1d_meta(potential, &mut meta);
            meta.push(("hbar", num(state.units().hbar())));
            meta.push(("mass", num(state.units().mass())));
            meta.push(("x_min", num(g.x_min())));
            meta.push(("x_max", num(g.x_max())));
            meta.push(("n_points", g.len().to_string()));
            meta.push(("energy", num(state.energy())));
            meta.push(("nodes", state.nodes().to_string()));
            rows.push(("x", g.coords(), state.amplitude().to_vec()));
            if let Potential1D::Tabulated(t) = potential {
                table = Some(t);
            }
        }
        StateBundle::Central(s) => {
            meta.push(("kind", "central".into()));
            central_potential_meta(&s.potential, &mut meta);
            meta.push(("hbar", num(s.units.hbar())));
            meta.push(("mass", num(s.units.mass())));
            meta.push(("r_max", num(s.radial_grid.r_max())));
            meta.push(("n_radial", s.radial_grid.len().to_string()));
            meta.push(("n_polar", s.polar_grid.len().to_string()));
            meta.push(("n", s.quantum_numbers.n.to_string()));
            meta.push(("l", s.quantum_numbers.l.to_string()));
            meta.push(("m", s.quantum_numbers.m.to_string()));
            meta.push(("azimuthal_m", s.azimuthal.m.to_string()));
            meta.push(("parity", s.azimuthal.parity.as_str().into()));
            meta.push(("mode", s.mode.as_str().into()));
            meta.push(("energy", num(s.energy)));
            meta.push(("alpha_theta_sq", num(s.alpha_theta_sq)));
            meta.push(("alpha_phi", num(s.alpha_phi)));
            rows.push(("radial", s.radial_grid.coords(), s.radial.clone()));
            rows.push(("polar", s.polar_grid.coords(), s.polar.clone()));
            if let CentralPotential::Tabulated(t) = &s.potential {
                table = Some(t);
            }
        }
    }

    let mut out = out;
    writeln!(out, "# {MAGIC}")?;
    for (k, v) in &meta {
        writeln!(out, "# {k} = {v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for (axis, coords, values) in &rows {
        for (i, (c, v)) in coords.iter().zip(values).enumerate() {
            w.write_record([axis.to_string(), i.to_string(), num(*c), num(*v)])?;
        }
    }
    if let Some(t) = table {
        for (i, (c, v)) in t.coords().iter().zip(t.values()).enumerate() {
            w.write_record(["potential".to_string(), i.to_string(), num(*c), num(*v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

struct Meta {
    entries: BTreeMap<String, (usize, String)>,
}

impl Meta {
    fn text(&self, key: &str) -> Result<&str> {
        self.entries
            .get(key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Input(format!("bundle is missing '{key}'")))
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let v = self.text(key)?;
        v.parse().map_err(|_| {
            let line = self.entries[key].0;
            Error::Input(format!("line {line}: cannot parse {key} = '{v}'"))
        })
    }

    fn units(&self) -> Result<Units> {
        Units::new(self.parse("hbar")?, self.parse("mass")?)
    }
}

type Rows = BTreeMap<String, Vec<(f64, f64)>>;

fn column(rows: &Rows, axis: &str, expected: usize) -> Result<Vec<f64>> {
    let r = rows.get(axis).map(Vec::as_slice).unwrap_or(&[]);
    if r.len() != expected {
        return Err(Error::Size(format!(
            "bundle has {} '{axis}' rows, expected {expected}",
            r.len()
        )));
    }
    Ok(r.iter().map(|(_, v)| *v).collect())
}

fn table(rows: &Rows) -> Result<Table> {
    let r = rows
        .get("potential")
        .ok_or_else(|| Error::Input("tabulated potential without 'potential' rows".into()))?;
    Table::new(r.iter().map(|p| p.0).collect(), r.iter().map(|p| p.1).collect())
}

pub fn read_bundle(input: impl Read) -> Result<StateBundle> {
    let mut entries = BTreeMap::new();
    let mut body = String::new();
    let mut body_start = 0;
    let mut saw_magic = false;
    for (k, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let n = k + 1;
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if rest == MAGIC {
                saw_magic = true;
            } else if let Some((key, value)) = rest.split_once('=') {
                entries.insert(key.trim().to_string(), (n, value.trim().to_string()));
            } else if !rest.is_empty() {
                return Err(Error::Input(format!("line {n}: expected '# key = value'")));
            }
            continue;
        }
        if body.is_empty() {
            body_start = n;
        }
        body.push_str(&line);
        body.push('\n');
    }
    if !saw_magic {
        return Err(Error::Input(format!("not a state bundle (missing '# {MAGIC}')")));
    }
    let meta = Meta { entries };

    let mut rows: Rows = BTreeMap::new();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    for (k, rec) in reader.records().enumerate() {
        let n = body_start + 1 + k;
        let rec = rec.map_err(|e| Error::Input(format!("line {n}: {e}")))?;
        if rec.len() != 4 {
            return Err(Error::Input(format!("line {n}: expected 4 fields, got {}", rec.len())));
        }
        let parse = |i: usize| -> Result<f64> {
            rec[i]
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("line {n}: bad number '{}'", &rec[i])))
        };
        rows.entry(rec[0].trim().to_string()).or_default().push((parse(2)?, parse(3)?));
    }

    match meta.text("kind")? {
        "line" => {
            let potential = match meta.text("potential")? {
                "box" => Potential1D::Box { width: meta.parse("width")? },
                "harmonic" => Potential1D::Harmonic { omega: meta.parse("omega")? },
                "finite_well" => Potential1D::FiniteWell {
                    depth: meta.parse("depth")?,
                    width: meta.parse("width")?,
                },
                "tabulated" => Potential1D::Tabulated(table(&rows)?),
                other => return Err(Error::Input(format!("unknown 1D potential '{other}'"))),
            };
            potential.validate()?;
            let grid = Grid1D::new(meta.parse("x_min")?, meta.parse("x_max")?, meta.parse("n_points")?)?;
            let amplitude = column(&rows, "x", grid.len())?;
            let state = StationaryState1D::from_normalized(grid, amplitude, meta.parse("energy")?, meta.units()?)?;
            Ok(StateBundle::Line { state, potential })
        }
        "central" => {
            let potential = match meta.text("potential")? {
                "coulomb" => CentralPotential::Coulomb { z: meta.parse("z")? },
                "harmonic3d" => CentralPotential::Harmonic3d { omega: meta.parse("omega")? },
                "tabulated" => CentralPotential::Tabulated(table(&rows)?),
                other => return Err(Error::Input(format!("unknown central potential '{other}'"))),
            };
            potential.validate()?;
            let radial_grid = RadialGrid::new(meta.parse("r_max")?, meta.parse("n_radial")?)?;
            let polar_grid = PolarGrid::new(meta.parse("n_polar")?)?;
            let state = SeparableCentralState {
                radial: column(&rows, "radial", radial_grid.len())?,
                polar: column(&rows, "polar", polar_grid.len())?,
                radial_grid,
                polar_grid,
                azimuthal: AzimuthalFactor {
                    m: meta.parse("azimuthal_m")?,
                    parity: AzimuthalParity::parse(meta.text("parity")?)?,
                },
                energy: meta.parse("energy")?,
                alpha_theta_sq: meta.parse("alpha_theta_sq")?,
                alpha_phi: meta.parse("alpha_phi")?,
                mode: MotionMode::parse(meta.text("mode")?)?,
                quantum_numbers: QuantumNumbers {
                    n: meta.parse("n")?,
                    l: meta.parse("l")?,
                    m: meta.parse("m")?,
                },
                potential,
                units: meta.units()?,
            };
            state.validate()?;
            Ok(StateBundle::Central(state))
        }
        other => Err(Error::Input(format!("unknown bundle kind '{other}'"))),
    }
}

pub fn save_bundle(bundle: &StateBundle, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_bundle(bundle, std::io::BufWriter::new(file))
}

pub fn load_bundle(path: &Path) -> Result<StateBundle> {
    read_bundle(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_bundle() -> StateBundle {
        let grid = Grid1D::new(0.0, 1.0, 11).unwrap();
        let amp: Vec<f64> = grid.coords().iter().map(|x| (std::f64::consts::PI * x).sin()).collect();
        StateBundle::Line {
            state: StationaryState1D::new(grid, amp, 4.93, Units::default()).unwrap(),
            potential: Potential1D::Box { width: 1.0 },
        }
    }

    fn roundtrip(b: &StateBundle) -> StateBundle {
        let mut buf = Vec::new();
        write_bundle(b, &mut buf).unwrap();
        read_bundle(buf.as_slice()).unwrap()
    }

    #[test]
    fn line_state_roundtrips_exactly() {
        let b = line_bundle();
        assert_eq!(roundtrip(&b), b);
    }

    #[test]
    fn tabulated_potential_roundtrips() {
        let StateBundle::Line { state, .. } = line_bundle() else { unreachable!() };
        let t = Table::new(vec![0.0, 0.5, 1.0], vec![0.1, -1.0 / 3.0, 2.0]).unwrap();
        let b = StateBundle::Line {
            state,
            potential: Potential1D::Tabulated(t),
        };
        assert_eq!(roundtrip(&b), b);
    }

    #[test]
    fn header_names_units() {
        let mut buf = Vec::new();
        write_bundle(&line_bundle(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# bohmquant state bundle\n# kind = line\n"));
        assert!(text.contains("axis,index,coordinate [length | rad],amplitude [normalized factor]"));
    }

    #[test]
    fn missing_or_malformed_entries_are_reported() {
        let mut buf = Vec::new();
        write_bundle(&line_bundle(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let no_energy: String = text.lines().filter(|l| !l.starts_with("# energy")).map(|l| format!("{l}\n")).collect();
        let err = read_bundle(no_energy.as_bytes()).unwrap_err();
        assert!(matches!(&err, Error::Input(m) if m.contains("energy")), "{err}");

        let bad = text.replace("# energy = 4.93", "# energy = lots");
        let err = read_bundle(bad.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 10"), "{err}");

        let short: String = text.lines().take(15).map(|l| format!("{l}\n")).collect();
        assert!(matches!(read_bundle(short.as_bytes()), Err(Error::Size(_))));
        assert!(read_bundle("axis,index\n".as_bytes()).is_err());
    }
}
