//! Report assembly and file output: JSON fit reports, CSV tables, and the
//! expected-parameter summary.
//!
//! Every writer goes through an atomic write-then-rename and prints
//! floating-point values with 17 significant digits, so emitted files are
//! byte-stable across reruns and round-trip losslessly through the paired
//! reader in this module.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RegimeConfig;
use crate::error::{Error, Result};
use crate::identify::FunctionGraph;
use crate::model::{effective_params, to_dimensionless, DimensionlessParams};
use crate::scan::ScanResult;
use crate::series::{write_atomic, TimeSeries, GRID_JITTER_TOL};

// ── report structure ────────────────────────────────────────────────────────

/// Dimensionless model parameters as they appear in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessReport {
    pub eps1: f64,
    pub eps2: f64,
    pub gamma: f64,
    pub t_renorm: f64,
}

impl From<DimensionlessParams> for DimensionlessReport {
    fn from(p: DimensionlessParams) -> Self {
        DimensionlessReport {
            eps1: p.eps1,
            eps2: p.eps2,
            gamma: p.gamma,
            t_renorm: p.t_renorm,
        }
    }
}

/// Coefficients the regression is expected to recover, derived from the
/// configured parameters: `beta0` is the damping combination and `beta1`
/// the drive combination of the slow equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedBetas {
    pub beta0: f64,
    pub beta1: f64,
}

/// Estimated regression output included in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatedFit {
    /// Fitted coefficients, lowest order first.
    pub beta: Vec<f64>,
    /// Residual objective at the fitted coefficients.
    pub l_value: f64,
    /// Condition number of the design matrix.
    pub condition: f64,
    /// Number of regression rows.
    pub n_points: usize,
    /// False when the design matrix was too ill-conditioned to trust.
    pub valid: bool,
    /// Fit family: `integrated` or `legacy`.
    pub method: String,
}

/// Relative errors `|estimated - expected| / |expected|`, present whenever
/// both values exist and the expected value is non-zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelativeErrors {
    pub beta0: Option<f64>,
    pub beta1: Option<f64>,
}

/// Shift-scan grid parameters recorded for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub b_min: f64,
    pub b_max: f64,
    pub step: f64,
    pub n_points: usize,
}

/// Where a report came from: enough to rerun the exact command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// Input series file as given on the command line.
    pub input_file: String,
    /// Configuration source (file path or bundled regime name).
    pub config_source: String,
    /// SHA-256 of the configuration text, hex encoded.
    pub config_sha256: String,
    /// Version of the tool that wrote the report.
    pub tool_version: String,
    /// Polynomial drift order used in the fit.
    pub k_order: usize,
    /// Trial shift setting: a number, or `scan`.
    pub b_trial: String,
    /// Scan grid, when a scan was performed.
    pub grid: Option<GridReport>,
    /// Low-pass cutoff in cycles per sample, when smoothing was applied.
    pub cutoff: Option<f64>,
    /// Small-|eta| exclusion floor, when the legacy fit was used.
    pub y_floor: Option<f64>,
}

/// Complete identification report for one series and one regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub regime: String,
    pub dimensionless: DimensionlessReport,
    pub expected: ExpectedBetas,
    pub estimated: EstimatedFit,
    /// Shift chosen by the scan, or the trial shift when given directly.
    pub chosen_b: Option<f64>,
    pub relative_errors: RelativeErrors,
    pub provenance: Provenance,
}

/// Relative error `|estimated - expected| / |expected|`; `None` when the
/// expected value is zero or either input is non-finite.
pub fn relative_error(estimated: f64, expected: f64) -> Option<f64> {
    if !estimated.is_finite() || !expected.is_finite() || expected == 0.0 {
        return None;
    }
    Some((estimated - expected).abs() / expected.abs())
}

/// Hex-encoded SHA-256 of arbitrary bytes, used for config provenance.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

/// Writes a report as pretty-printed JSON (atomic).
pub fn write_report(path: &Path, report: &Report) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Invalid(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Reads a report back from JSON.
pub fn read_report(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Csv {
        file: path.display().to_string(),
        row: None,
        message: format!("invalid report JSON: {e}"),
    })
}

// ── expected-parameter table ────────────────────────────────────────────────

/// One row of the expected-parameter table.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedRow {
    pub regime: String,
    pub t_renorm: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub gamma: f64,
    /// Negated damping coefficient, the conventional sign for display.
    pub neg_beta0: f64,
    /// Drive coefficient (not rescaled; tables usually show `beta1 * 1e3`).
    pub beta1: f64,
}

/// Derives the expected-parameter rows for a set of regimes.
pub fn expected_rows(configs: &[RegimeConfig]) -> Result<Vec<ExpectedRow>> {
    configs
        .iter()
        .map(|cfg| {
            let p = to_dimensionless(&cfg.physical)?;
            let alpha = effective_params(&p);
            Ok(ExpectedRow {
                regime: cfg.name.clone(),
                t_renorm: p.t_renorm,
                eps1: p.eps1,
                eps2: p.eps2,
                gamma: p.gamma,
                neg_beta0: -alpha.alpha1,
                beta1: alpha.alpha0,
            })
        })
        .collect()
}

/// Formats the expected-parameter table for terminal display.
pub fn format_expected_table(rows: &[ExpectedRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<8} {:>12} {:>8} {:>8} {:>10} {:>10} {:>12}",
        "regime", "T_renorm", "eps1", "eps2", "gamma", "-beta0", "beta1*1e3"
    );
    for row in rows {
        let _ = writeln!(
            out,
            "{:<8} {:>12.4} {:>8.3} {:>8.3} {:>10.6} {:>10.5} {:>12.4}",
            row.regime,
            row.t_renorm,
            row.eps1,
            row.eps2,
            row.gamma,
            row.neg_beta0,
            row.beta1 * 1e3
        );
    }
    out
}

/// Writes the expected-parameter table as CSV (atomic, full precision).
pub fn write_expected_csv(path: &Path, rows: &[ExpectedRow]) -> Result<()> {
    let mut text = String::from("regime,t_renorm,eps1,eps2,gamma,neg_beta0,beta1\n");
    for row in rows {
        let _ = writeln!(
            text,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            row.regime, row.t_renorm, row.eps1, row.eps2, row.gamma, row.neg_beta0, row.beta1
        );
    }
    write_atomic(path, text.as_bytes())
}

/// Reads an expected-parameter CSV back.
pub fn read_expected_csv(path: &Path) -> Result<Vec<ExpectedRow>> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != "regime,t_renorm,eps1,eps2,gamma,neg_beta0,beta1" {
        return Err(Error::Csv {
            file,
            row: None,
            message: format!("unexpected header `{header}`"),
        });
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::Csv {
                file,
                row: Some(i + 1),
                message: format!("expected 7 fields, got {}", fields.len()),
            });
        }
        let num = |j: usize| -> Result<f64> {
            fields[j].trim().parse::<f64>().map_err(|_| Error::Csv {
                file: path.display().to_string(),
                row: Some(i + 1),
                message: format!("field {} is not a number: `{}`", j + 1, fields[j]),
            })
        };
        rows.push(ExpectedRow {
            regime: fields[0].trim().to_string(),
            t_renorm: num(1)?,
            eps1: num(2)?,
            eps2: num(3)?,
            gamma: num(4)?,
            neg_beta0: num(5)?,
            beta1: num(6)?,
        });
    }
    Ok(rows)
}

// ── trajectory CSV ──────────────────────────────────────────────────────────

/// Writes a simulated trajectory as a `t,phi,y,z` CSV (atomic).  The three
/// series must share the same time grid.
pub fn write_state_csv(
    path: &Path,
    phi: &TimeSeries,
    y: &TimeSeries,
    z: &TimeSeries,
) -> Result<()> {
    if phi.len() != y.len() || phi.len() != z.len() {
        return Err(Error::Invalid(format!(
            "trajectory components disagree in length: {} / {} / {}",
            phi.len(),
            y.len(),
            z.len()
        )));
    }
    let mut text = String::with_capacity(96 * phi.len() + 16);
    text.push_str("t,phi,y,z\n");
    for i in 0..phi.len() {
        let _ = writeln!(
            text,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            phi.time_at(i),
            phi.values[i],
            y.values[i],
            z.values[i]
        );
    }
    write_atomic(path, text.as_bytes())
}

/// Reads a `t,phi,y,z` CSV back into three series sharing one grid.
pub fn read_state_csv(path: &Path) -> Result<(TimeSeries, TimeSeries, TimeSeries)> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != "t,phi,y,z" {
        return Err(Error::Csv {
            file,
            row: None,
            message: format!("expected header `t,phi,y,z`, got `{header}`"),
        });
    }
    let mut t = Vec::new();
    let mut cols = [Vec::new(), Vec::new(), Vec::new()];
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Csv {
                file,
                row: Some(i + 1),
                message: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        for (j, field) in fields.iter().enumerate() {
            let value = field.trim().parse::<f64>().map_err(|_| Error::Csv {
                file: path.display().to_string(),
                row: Some(i + 1),
                message: format!("field {} is not a number: `{}`", j + 1, field),
            })?;
            if j == 0 {
                t.push(value);
            } else {
                cols[j - 1].push(value);
            }
        }
    }
    if t.len() < 2 {
        return Err(Error::Csv {
            file,
            row: None,
            message: format!("need at least 2 samples, got {}", t.len()),
        });
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Csv {
            file,
            row: None,
            message: format!("inferred step {dt} is not positive"),
        });
    }
    for (i, &ti) in t.iter().enumerate() {
        let expected = t[0] + i as f64 * dt;
        if (ti - expected).abs() > GRID_JITTER_TOL * dt {
            return Err(Error::Csv {
                file,
                row: Some(i + 1),
                message: format!(
                    "time grid is not uniform: t = {ti}, expected {expected} (step {dt})"
                ),
            });
        }
    }
    let [phi, y, z] = cols;
    Ok((
        TimeSeries::new(t[0], dt, phi),
        TimeSeries::new(t[0], dt, y),
        TimeSeries::new(t[0], dt, z),
    ))
}

// ── scan and function-graph CSV ─────────────────────────────────────────────

/// Writes a scan result as CSV with columns
/// `b_trial,L,abs_beta1,beta0,monotonic` (atomic).
pub fn write_scan_csv(path: &Path, scan: &ScanResult) -> Result<()> {
    let mut text = String::with_capacity(96 * scan.b_values.len() + 40);
    text.push_str("b_trial,L,abs_beta1,beta0,monotonic\n");
    for i in 0..scan.b_values.len() {
        let _ = writeln!(
            text,
            "{:.16e},{:.16e},{:.16e},{:.16e},{}",
            scan.b_values[i],
            scan.l_values[i],
            scan.beta1_abs[i],
            scan.beta0[i],
            u8::from(scan.monotonic_flags[i])
        );
    }
    write_atomic(path, text.as_bytes())
}

/// One parsed row of a scan CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub b_trial: f64,
    pub l_value: f64,
    pub abs_beta1: f64,
    pub beta0: f64,
    pub monotonic: bool,
}

/// Reads a scan CSV back.
pub fn read_scan_csv(path: &Path) -> Result<Vec<ScanRow>> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != "b_trial,L,abs_beta1,beta0,monotonic" {
        return Err(Error::Csv {
            file,
            row: None,
            message: format!("unexpected header `{header}`"),
        });
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Csv {
                file,
                row: Some(i + 1),
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let num = |j: usize| -> Result<f64> {
            fields[j].trim().parse::<f64>().map_err(|_| Error::Csv {
                file: path.display().to_string(),
                row: Some(i + 1),
                message: format!("field {} is not a number: `{}`", j + 1, fields[j]),
            })
        };
        let monotonic = match fields[4].trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::Csv {
                    file,
                    row: Some(i + 1),
                    message: format!("monotonic flag must be 0 or 1, got `{other}`"),
                })
            }
        };
        rows.push(ScanRow {
            b_trial: num(0)?,
            l_value: num(1)?,
            abs_beta1: num(2)?,
            beta0: num(3)?,
            monotonic,
        });
    }
    Ok(rows)
}

/// Writes a reconstructed function graph as a `psi,f4` CSV (atomic).
pub fn write_f4_csv(path: &Path, graph: &FunctionGraph) -> Result<()> {
    let mut text = String::with_capacity(48 * graph.psi_sorted.len() + 8);
    text.push_str("psi,f4\n");
    for (psi, f4) in graph.psi_sorted.iter().zip(graph.f4_values.iter()) {
        let _ = writeln!(text, "{:.16e},{:.16e}", psi, f4);
    }
    write_atomic(path, text.as_bytes())
}

/// Reads a `psi,f4` CSV back as `(psi, f4)` columns.
pub fn read_f4_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != "psi,f4" {
        return Err(Error::Csv {
            file,
            row: None,
            message: format!("expected header `psi,f4`, got `{header}`"),
        });
    }
    let mut psi = Vec::new();
    let mut f4 = Vec::new();
    for (i, line) in lines.enumerate() {
        let (a, b) = line.split_once(',').ok_or_else(|| Error::Csv {
            file: path.display().to_string(),
            row: Some(i + 1),
            message: "expected 2 fields".to_string(),
        })?;
        let parse = |s: &str, which: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::Csv {
                file: path.display().to_string(),
                row: Some(i + 1),
                message: format!("{which} is not a number: `{s}`"),
            })
        };
        psi.push(parse(a, "psi")?);
        f4.push(parse(b, "f4")?);
    }
    Ok((psi, f4))
}

// ── tests ───────────────────────────────────────────────────────────────────
