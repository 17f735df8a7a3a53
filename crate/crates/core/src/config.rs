//! Regime configuration files: parsing and the built-in regime bundle.
//!
//! A configuration is a flat `key = value` text file describing one
//! oscillator regime: the laboratory drive and filter parameters plus the
//! affine observation model of the recorded channel.  Seven reference
//! regimes ship embedded in the library so the tools work out of the box;
//! any external file with the same keys is accepted as well.
//!
//! Recognised keys:
//!
//! | key            | meaning                                            |
//! |----------------|----------------------------------------------------|
//! | `name`         | regime label, e.g. `1b`                            |
//! | `omega_rg_hz`  | reference-generator frequency (Hz)                 |
//! | `m`            | reference divider (positive integer)               |
//! | `omega_0_hz`   | nominal oscillator frequency (Hz)                  |
//! | `n`            | feedback divider (positive integer)                |
//! | `omega_h_rad_s`| tuning-sensitivity scale (rad/s)                   |
//! | `r1_ohm`, `c1_f` | first filter stage resistance and capacitance    |
//! | `r2_ohm`, `c2_f` | second filter stage resistance and capacitance   |
//! | `obs_a`        | observation scale (dimensionless, non-zero)        |
//! | `obs_b`        | observation offset                                 |
//! | `obs_c`        | optional additive drift rate (defaults to 0)       |
//! | `notes`        | optional free text                                 |
//!
//! Lines starting with `#` (or blank) are ignored; a trailing `#` starts a
//! comment.  Unknown or duplicated keys are rejected so typos surface as
//! configuration errors instead of silently falling back to defaults.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::PhysicalSetup;
use crate::pipeline::ObservationModel;

// ── configuration type ──────────────────────────────────────────────────────

/// One regime: physical drive/filter parameters plus the observation model
/// that maps the dimensionless slow variable to the recorded channel.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeConfig {
    /// Regime label used in reports and tables (for example `1b`).
    pub name: String,
    /// Laboratory parameters of the loop.
    pub physical: PhysicalSetup,
    /// Affine map between the slow variable and the recorded channel.
    pub observation: ObservationModel,
    /// Free-text annotation carried through to reports.
    pub notes: String,
}

impl fmt::Display for RegimeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "regime {}", self.name)
    }
}

// ── built-in bundle ─────────────────────────────────────────────────────────

/// Names of the bundled regimes, in presentation order.
const BUILTIN_NAMES: [&str; 7] = ["1b", "2c", "3d", "4", "5e", "6", "Cf"];

/// Embedded text of the bundled configuration files, matching
/// [`BUILTIN_NAMES`] index for index.
const BUILTIN_TEXTS: [&str; 7] = [
    include_str!("../configs/regime_1b.cfg"),
    include_str!("../configs/regime_2c.cfg"),
    include_str!("../configs/regime_3d.cfg"),
    include_str!("../configs/regime_4.cfg"),
    include_str!("../configs/regime_5e.cfg"),
    include_str!("../configs/regime_6.cfg"),
    include_str!("../configs/regime_Cf.cfg"),
];

/// Returns the labels of the bundled regimes in presentation order.
pub fn builtin_names() -> &'static [&'static str] {
    &BUILTIN_NAMES
}

/// Returns the raw configuration text of a bundled regime, if `name`
/// matches one.
pub fn builtin_text(name: &str) -> Option<&'static str> {
    BUILTIN_NAMES
        .iter()
        .position(|n| *n == name)
        .map(|i| BUILTIN_TEXTS[i])
}

/// Parses every bundled regime.  Infallible in a correctly built binary;
/// the error path exists only to keep the parser honest with itself.
pub fn builtin_configs() -> Result<Vec<RegimeConfig>> {
    BUILTIN_NAMES
        .iter()
        .zip(BUILTIN_TEXTS.iter())
        .map(|(name, text)| parse_config(text, &format!("builtin regime {name}")))
        .collect()
}

// ── parsing ─────────────────────────────────────────────────────────────────

/// Key/value accumulator used while parsing a single file.
struct Fields<'a> {
    source: &'a str,
    pairs: Vec<(String, String)>,
}

impl<'a> Fields<'a> {
    fn err(&self, message: String) -> Error {
        Error::Config {
            file: self.source.to_string(),
            message,
        }
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.pairs
            .iter()
            .position(|(k, _)| k == key)
            .map(|i| self.pairs.remove(i).1)
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.take(key)
            .ok_or_else(|| self.err(format!("missing required key `{key}`")))
    }

    fn float(&mut self, key: &str) -> Result<f64> {
        let raw = self.required(key)?;
        raw.parse::<f64>()
            .map_err(|_| self.err(format!("key `{key}`: `{raw}` is not a number")))
    }

    fn integer(&mut self, key: &str) -> Result<u32> {
        let raw = self.required(key)?;
        raw.parse::<u32>()
            .map_err(|_| self.err(format!("key `{key}`: `{raw}` is not a positive integer")))
    }
}

/// Parses a configuration from text.  `source` names the origin (file path
/// or builtin label) and appears verbatim in error messages.
pub fn parse_config(text: &str, source: &str) -> Result<RegimeConfig> {
    let mut fields = Fields {
        source,
        pairs: Vec::new(),
    };

    for (line_no, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(i) => &raw_line[..i],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            fields.err(format!(
                "line {}: expected `key = value`, got `{}`",
                line_no + 1,
                line
            ))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if fields.pairs.iter().any(|(k, _)| *k == key) {
            return Err(fields.err(format!("line {}: duplicate key `{key}`", line_no + 1)));
        }
        fields.pairs.push((key, value));
    }

    let name = fields.required("name")?;
    let physical = PhysicalSetup {
        omega_rg_hz: fields.float("omega_rg_hz")?,
        m: fields.integer("m")?,
        omega_0_hz: fields.float("omega_0_hz")?,
        n: fields.integer("n")?,
        omega_h_rad_s: fields.float("omega_h_rad_s")?,
        r1_ohm: fields.float("r1_ohm")?,
        c1_f: fields.float("c1_f")?,
        r2_ohm: fields.float("r2_ohm")?,
        c2_f: fields.float("c2_f")?,
    };
    let a = fields.float("obs_a")?;
    let b = fields.float("obs_b")?;
    let c = match fields.take("obs_c") {
        Some(raw) => raw
            .parse::<f64>()
            .map_err(|_| fields.err(format!("key `obs_c`: `{raw}` is not a number")))?,
        None => 0.0,
    };
    let notes = fields.take("notes").unwrap_or_default();

    if let Some((key, _)) = fields.pairs.first() {
        return Err(fields.err(format!("unknown key `{key}`")));
    }

    physical.validate().map_err(|e| Error::Config {
        file: source.to_string(),
        message: e.to_string(),
    })?;
    if !(a.is_finite() && a != 0.0) {
        return Err(fields.err(format!("key `obs_a`: scale must be finite and non-zero, got {a}")));
    }
    if !b.is_finite() || !c.is_finite() {
        return Err(fields.err("keys `obs_b`/`obs_c` must be finite".to_string()));
    }

    Ok(RegimeConfig {
        name,
        physical,
        observation: ObservationModel { a, b, c },
        notes,
    })
}

/// Reads and parses a configuration file from disk.
pub fn load_config(path: &Path) -> Result<RegimeConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        file: path.display().to_string(),
        message: format!("cannot read file: {e}"),
    })?;
    parse_config(&text, &path.display().to_string())
}

/// Resolves a `--config` argument: a bundled regime name, a single file, or
/// a directory of `*.cfg` files.  Returns the configurations together with
/// the raw text of each (for provenance hashing), in a stable order.
pub fn resolve_configs(spec: &str) -> Result<Vec<(RegimeConfig, String)>> {
    if let Some(text) = builtin_text(spec) {
        let cfg = parse_config(text, &format!("builtin regime {spec}"))?;
        return Ok(vec![(cfg, text.to_string())]);
    }
    let path = Path::new(spec);
    if path.is_dir() {
        let mut entries: Vec<_> = std::fs::read_dir(path)
            .map_err(|e| Error::Config {
                file: spec.to_string(),
                message: format!("cannot read directory: {e}"),
            })?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "cfg"))
            .collect();
        entries.sort();
        if entries.is_empty() {
            return Err(Error::Config {
                file: spec.to_string(),
                message: "directory contains no .cfg files".to_string(),
            });
        }
        return entries
            .iter()
            .map(|p| {
                let text = std::fs::read_to_string(p).map_err(|e| Error::Config {
                    file: p.display().to_string(),
                    message: format!("cannot read file: {e}"),
                })?;
                let cfg = parse_config(&text, &p.display().to_string())?;
                Ok((cfg, text))
            })
            .collect();
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        file: spec.to_string(),
        message: format!(
            "not a bundled regime name ({}) and cannot read as file: {e}",
            BUILTIN_NAMES.join(", ")
        ),
    })?;
    let cfg = parse_config(&text, spec)?;
    Ok(vec![(cfg, text)])
}

/// Resolves a `--config` argument that must name exactly one regime.
pub fn resolve_single_config(spec: &str) -> Result<(RegimeConfig, String)> {
    let mut configs = resolve_configs(spec)?;
    if configs.len() != 1 {
        return Err(Error::Config {
            file: spec.to_string(),
            message: format!(
                "expected exactly one regime, found {} (pass a single file or name)",
                configs.len()
            ),
        });
    }
    Ok(configs.remove(0))
}

// ── tests ───────────────────────────────────────────────────────────────────
