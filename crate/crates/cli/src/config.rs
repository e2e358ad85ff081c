//! Plain-text run configuration.
//!
//! A config file is a list of `key = value` lines grouped under `[section]`
//! headers. Blank lines and lines starting with `#` are ignored, and a value
//! may carry a trailing `# comment`. Keys outside any section are rejected.
//!
//! ```text
//! [potential]
//! kind = box          # box | harmonic | finite_well | tabulated
//!                     # coulomb | harmonic3d | tabulated_central
//! width = 1.0         # box, finite_well
//! omega = 1.0         # harmonic, harmonic3d
//! depth = 5.0         # finite_well
//! z = 1.0             # coulomb
//! table = v.csv       # tabulated kinds: two columns (coordinate, V), header row,
//!                     # path relative to the config file
//!
//! [grid]
//! x_min = 0.0         # 1D
//! x_max = 1.0
//! n_points = 2001
//! h = 0.05            # central: radial spacing
//! r_max = 60          # central: overrides the size derived from n
//! n_polar = 150       # central: polar samples
//!
//! [units]
//! hbar = 1.0
//! mass = 1.0
//!
//! [solver]
//! states = 10         # 1D: number of states
//! bisection_tol = 1e-10
//! e_min = -1.0        # optional search bracket, both or neither
//! e_max = 10.0
//!
//! [state]             # central
//! n = 2
//! l = 1
//! m = 1
//! parity = cos        # const | cos | sin
//! mode = rest         # rest | circulating
//! n_max = 3           # instead of n/l/m: every rest state up to n_max
//!
//! [trajectory]
//! state = 0           # 1D: spectrum index to follow
//! start = 0.3         # 1D: x; central: r, theta, phi
//! momentum = 0.0      # same layout as start, default at rest
//! dt = 1e-3
//! steps = 10000
//!
//! [verify]
//! input = out/state.csv   # bundle written by solve1d or solve-central
//! tol = 1e-10         # continuity and constancy tolerance
//! q_tol = 1e-6        # bound on |Q + V - E| / |E|
//! rest_points = 10
//! rest_dt = 1e-3
//! rest_steps = 10000
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    value: String,
    line: usize,
}

/// Parsed `key = value` entries addressed as `section.key`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
    /// Directory that relative paths are resolved against.
    base: PathBuf,
}

const SECTIONS: [&str; 7] = ["potential", "grid", "units", "solver", "state", "trajectory", "verify"];

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let err = |message: String| ConfigError { line: Some(line), message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header '{content}'")))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(format!("unknown section [{name}]")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', found '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(err(format!("expected 'key = value', found '{content}'")));
            }
            let sec = section.as_ref().ok_or_else(|| err(format!("'{key}' appears before any [section]")))?;
            let full = format!("{sec}.{key}");
            if let Some(prev) = entries.get(&full) {
                let prev: &Entry = prev;
                return Err(err(format!("'{full}' already set on line {}", prev.line)));
            }
            entries.insert(full, Entry { value: value.to_string(), line });
        }
        Ok(Self { entries, base: PathBuf::new() })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        let mut cfg = Self::parse(&text).map_err(|e| ConfigError {
            line: e.line,
            message: format!("{}: {}", path.display(), e.message),
        })?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|_| ConfigError {
                line: Some(e.line),
                message: format!("cannot parse '{}' for {key}", e.value),
            }),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, ConfigError> {
        self.get(key)?.ok_or_else(|| ConfigError {
            line: None,
            message: format!("missing required key {key}"),
        })
    }

    /// Comma-separated list of numbers.
    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
            .map_err(|_| ConfigError {
                line: Some(e.line),
                message: format!("cannot parse '{}' as a list of numbers for {key}", e.value),
            })
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.str(key).map(|p| self.base.join(p))
    }

    /// Error pointing at the line that set `key`.
    pub fn invalid(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.entries.get(key).map(|e| e.line),
            message: message.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let cfg = Config::parse("# header\n[potential]\nkind = box # wall\nwidth=2.5\n\n[grid]\nn_points = 11\n").unwrap();
        assert_eq!(cfg.str("potential.kind"), Some("box"));
        assert_eq!(cfg.get::<f64>("potential.width").unwrap(), Some(2.5));
        assert_eq!(cfg.require::<usize>("grid.n_points").unwrap(), 11);
        assert_eq!(cfg.str("grid.x_min"), None);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = Config::parse("[grid]\nn_points 11\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = Config::parse("kind = box\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = Config::parse("[grid]\n[bogus]\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = Config::parse("[grid]\nn_points = 3\nn_points = 4\n").unwrap_err();
        assert!(e.to_string().starts_with("line 3:"), "{e}");
        let cfg = Config::parse("[grid]\n\nn_points = many\n").unwrap();
        let e = cfg.get::<usize>("grid.n_points").unwrap_err();
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn number_lists() {
        let cfg = Config::parse("[trajectory]\nstart = 4, 1.0 ,0.2\nbad = 1, x\n").unwrap();
        assert_eq!(cfg.list("trajectory.start").unwrap(), Some(vec![4.0, 1.0, 0.2]));
        assert_eq!(cfg.list("trajectory.bad").unwrap_err().line, Some(3));
    }
}
