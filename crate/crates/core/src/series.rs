//! Uniformly sampled time series and their CSV form.
//!
//! Every signal in the toolkit — simulator output, observations, smoothed
//! derivatives — lives on a uniform grid `t0 + i·dt`. The CSV format is a
//! `t,value` header followed by one row per sample; values are written with
//! 17 significant digits so a write → read round trip is exact in f64.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

// ── series ──────────────────────────────────────────────────────────────────

/// A uniformly sampled scalar signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    /// Time of the first sample.
    pub t0: f64,
    /// Sample spacing; strictly positive.
    pub dt: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>) -> Self {
        TimeSeries { t0, dt, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of sample `i`.
    pub fn time_at(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    /// All sample times, same length as `values`.
    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time_at(i)).collect()
    }
}

// ── csv io ──────────────────────────────────────────────────────────────────

/// Tolerated deviation of a file's time column from a uniform grid,
/// as a fraction of the inferred sample spacing.
pub const GRID_JITTER_TOL: f64 = 1e-6;

/// Read a `t,value` CSV into a [`TimeSeries`].
///
/// The time column must be a uniform grid: spacing is inferred from the
/// first two rows and every later row is checked against `t0 + i·dt` to a
/// relative tolerance of 1e-6·dt. A file that fails the check is rejected
/// with the worst-offending row named.
pub fn read_csv(path: &Path) -> Result<TimeSeries> {
    let file = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::Csv {
        file: file.clone(),
        row: None,
        message: e.to_string(),
    })?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Csv {
        file: file.clone(),
        row: None,
        message: "empty file".into(),
    })?;
    let mut cols = header.split(',');
    if cols.next().map(str::trim) != Some("t") {
        return Err(Error::Csv {
            file,
            row: None,
            message: format!("expected header starting with 't', got '{header}'"),
        });
    }

    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (t_str, v_str) = match (fields.next(), fields.next()) {
            (Some(t), Some(v)) => (t, v),
            _ => {
                return Err(Error::Csv {
                    file,
                    row: Some(row),
                    message: "expected two comma-separated fields".into(),
                })
            }
        };
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::Csv {
                file: file.clone(),
                row: Some(row),
                message: format!("unparseable {what} '{}'", s.trim()),
            })
        };
        times.push(parse(t_str, "time")?);
        values.push(parse(v_str, "value")?);
    }

    if times.len() < 2 {
        return Err(Error::Csv {
            file,
            row: None,
            message: format!("need at least 2 samples, got {}", times.len()),
        });
    }

    let t0 = times[0];
    let dt = times[1] - times[0];
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Csv {
            file,
            row: Some(2),
            message: format!("non-increasing time column (dt = {dt})"),
        });
    }

    // Find the row that deviates most from the uniform grid; reject if it
    // exceeds the jitter tolerance.
    let mut worst = (0usize, 0.0f64);
    for (i, &t) in times.iter().enumerate() {
        let dev = (t - (t0 + i as f64 * dt)).abs();
        if dev > worst.1 {
            worst = (i, dev);
        }
    }
    if worst.1 > GRID_JITTER_TOL * dt {
        return Err(Error::Csv {
            file,
            row: Some(worst.0 + 1),
            message: format!(
                "time column is not a uniform grid: row deviates from t0 + i*dt by {:.3e} (tolerance {:.3e})",
                worst.1,
                GRID_JITTER_TOL * dt
            ),
        });
    }

    Ok(TimeSeries::new(t0, dt, values))
}

/// Write a [`TimeSeries`] as `t,value` CSV with 17 significant digits.
pub fn write_csv(path: &Path, series: &TimeSeries, value_name: &str) -> Result<()> {
    let mut out = String::with_capacity(series.len() * 48 + 16);
    out.push_str("t,");
    out.push_str(value_name);
    out.push('\n');
    for (i, v) in series.values.iter().enumerate() {
        out.push_str(&format!("{:.16e},{:.16e}\n", series.time_at(i), v));
    }
    write_atomic(path, out.as_bytes())
}

/// Write bytes to `path` via a temporary sibling and an atomic rename, so a
/// crash mid-write never leaves a truncated file under the final name.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
        )),
        None => Path::new(&format!(
            ".{}.tmp",
            path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
        ))
        .to_path_buf(),
    };
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
