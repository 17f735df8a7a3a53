//! Trial-shift scanning: estimating the unknown measurement offset.
//!
//! The observable is known only up to y = aη + b with b unmeasured, yet the
//! sorting step needs the phase — which depends on b. The remedy is a scan:
//! run the integrated fit at many trial shifts b̃ and read two curves,
//! L(b̃) and |β₁|(b̃). Where the candidate phase becomes monotone the
//! sorting map degenerates and L collapses by orders of magnitude (the
//! "sharp slope"); that region is excluded, and among the remaining strict
//! local minima of |β₁| the rightmost one is taken as the estimate b̂,
//! since the true detuning term β₁ is known to be comparatively small.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::identify::{build_deltas_integrated, MAX_K_ORDER};
use crate::lstsq::solve_least_squares;
use crate::pipeline::assemble_states;
use crate::series::TimeSeries;
use crate::sort::{build_sort_map, is_strictly_increasing};

/// Default L-drop ratio that qualifies as the sharp slope.
pub const DEFAULT_DROP_FACTOR: f64 = 100.0;

/// Default number of grid points for an automatically sized scan.
pub const DEFAULT_GRID_POINTS: usize = 200;

// ── scan grid ───────────────────────────────────────────────────────────────

/// A uniform grid of trial shifts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanGrid {
    pub b_min: f64,
    pub b_max: f64,
    pub step: f64,
}

impl ScanGrid {
    /// Build a grid, enforcing b_min < b_max, step > 0, and ≥ 10 points.
    pub fn new(b_min: f64, b_max: f64, step: f64) -> Result<Self> {
        if !b_min.is_finite() || !b_max.is_finite() || !step.is_finite() {
            return Err(Error::Invalid("grid bounds and step must be finite".into()));
        }
        if b_min >= b_max {
            return Err(Error::Invalid(format!(
                "grid needs b_min < b_max, got [{b_min}, {b_max}]"
            )));
        }
        if !(step > 0.0) {
            return Err(Error::Invalid(format!("grid step must be > 0, got {step}")));
        }
        let grid = ScanGrid { b_min, b_max, step };
        if grid.n_points() < 10 {
            return Err(Error::Invalid(format!(
                "grid has {} points; at least 10 required",
                grid.n_points()
            )));
        }
        Ok(grid)
    }

    /// Default grid for an observable: centered on −mean(η) with half-width
    /// 3·stddev(η) and 200 points. The true shift moves η's DC level, so
    /// −mean(η) is the natural center; a constant record has no scale for a
    /// grid and is rejected.
    pub fn default_for(eta: &[f64]) -> Result<Self> {
        if eta.len() < 2 {
            return Err(Error::Invalid("grid sizing needs at least 2 samples".into()));
        }
        let n = eta.len() as f64;
        let mean = eta.iter().sum::<f64>() / n;
        let var = eta.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        if !(sd > 0.0) {
            return Err(Error::Invalid(
                "constant observable: cannot size a scan grid from zero spread".into(),
            ));
        }
        let half = 3.0 * sd;
        let step = 2.0 * half / (DEFAULT_GRID_POINTS - 1) as f64;
        ScanGrid::new(-mean - half, -mean + half, step)
    }

    /// Number of grid points (b_min, b_min + step, … up to b_max).
    pub fn n_points(&self) -> usize {
        ((self.b_max - self.b_min) / self.step + 1e-9).floor() as usize + 1
    }

    /// Value of grid point `i`.
    pub fn value(&self, i: usize) -> f64 {
        self.b_min + i as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n_points()).map(|i| self.value(i)).collect()
    }
}

// ── scan result ─────────────────────────────────────────────────────────────

/// Curves produced by a trial-shift scan, plus the slope/choice annotations
/// filled in by [`detect_slope`] and [`choose_shift`]. Failed per-point fits
/// are recorded as NaN entries rather than aborting the scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub b_values: Vec<f64>,
    pub l_values: Vec<f64>,
    pub beta1_abs: Vec<f64>,
    pub beta0: Vec<f64>,
    /// True where the candidate phase ψ + b̃t is strictly increasing in
    /// time — the degenerate case where the sorting map carries nothing.
    pub monotonic_flags: Vec<bool>,
    pub slope_index: Option<usize>,
    pub chosen_index: Option<usize>,
    pub chosen_b: Option<f64>,
}

/// Run the integrated fit over every grid point.
///
/// The state ensemble is assembled once; each grid point then sorts its own
/// candidate phase and solves its own least-squares system. Points are
/// independent, evaluated in parallel, and collected in grid order, so
/// results are deterministic and identical to a sequential run.
pub fn scan(
    eta: &TimeSeries,
    grid: &ScanGrid,
    t_renorm: f64,
    k_order: usize,
) -> Result<ScanResult> {
    if k_order < 1 || k_order > MAX_K_ORDER {
        return Err(Error::Invalid(format!(
            "Taylor order K must lie in 1..={MAX_K_ORDER}, got {k_order}"
        )));
    }
    let ens = assemble_states(eta, t_renorm, false)?;
    let b_values = grid.values();

    let points: Vec<(f64, f64, f64, bool)> = b_values
        .par_iter()
        .map(|&b_trial| {
            let keys = ens.candidate_phase(b_trial);
            let monotonic = is_strictly_increasing(&keys);
            let fit = build_sort_map(&keys)
                .and_then(|map| build_deltas_integrated(&ens, &map, k_order))
                .and_then(|sys| solve_least_squares(&sys));
            match fit {
                Ok(f) => (f.l_value, f.beta[1].abs(), f.beta[0], monotonic),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN, monotonic),
            }
        })
        .collect();

    let mut result = ScanResult {
        b_values,
        l_values: Vec::with_capacity(points.len()),
        beta1_abs: Vec::with_capacity(points.len()),
        beta0: Vec::with_capacity(points.len()),
        monotonic_flags: Vec::with_capacity(points.len()),
        slope_index: None,
        chosen_index: None,
        chosen_b: None,
    };
    for (l, b1, b0, mono) in points {
        result.l_values.push(l);
        result.beta1_abs.push(b1);
        result.beta0.push(b0);
        result.monotonic_flags.push(mono);
    }
    Ok(result)
}

// ── slope detection ─────────────────────────────────────────────────────────

fn median(values: &mut Vec<f64>) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    })
}

/// Find the sharp slope in L(b̃): the smallest index i where everything
/// from i rightward has fallen at least `drop_factor` below the median of
/// the plateau left of i, and the transition into i itself is steep
/// (adjacent ratio at least √drop_factor). Returns `None` when the curve
/// never drops that way. NaN entries (failed fits) are ignored on the
/// plateau and cannot host the slope.
pub fn detect_slope(scan: &ScanResult, drop_factor: f64) -> Option<usize> {
    let l = &scan.l_values;
    let n = l.len();
    let sqrt_drop = drop_factor.sqrt();
    for i in 1..n {
        if !l[i - 1].is_finite() || !l[i].is_finite() {
            continue;
        }
        let mut left: Vec<f64> = l[..i].iter().copied().filter(|v| v.is_finite()).collect();
        let Some(median_left) = median(&mut left) else {
            continue;
        };
        let min_right = l[i..]
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::INFINITY, f64::min);
        if min_right <= median_left / drop_factor && l[i - 1] / l[i] >= sqrt_drop {
            return Some(i);
        }
    }
    None
}

// ── shift choice ────────────────────────────────────────────────────────────

/// Outcome of the shift choice: the estimate (when one qualifies) plus
/// every strict local minimum inspected, as a diagnostic for empty results.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOutcome {
    pub chosen_index: Option<usize>,
    pub chosen_b: Option<f64>,
    /// Indices of all strict interior local minima of |β₁|.
    pub minima: Vec<usize>,
}

/// Choose b̂: the rightmost strict local minimum of |β₁|(b̃) that lies
/// strictly left of the slope (everywhere, when no slope was found), is not
/// flagged monotonic, and is not a grid boundary point.
pub fn choose_shift(scan: &ScanResult) -> ShiftOutcome {
    let v = &scan.beta1_abs;
    let n = v.len();
    let mut minima = Vec::new();
    if n >= 3 {
        for i in 1..n - 1 {
            if v[i].is_finite() && v[i] < v[i - 1] && v[i] < v[i + 1] {
                minima.push(i);
            }
        }
    }
    let limit = scan.slope_index.unwrap_or(n);
    let chosen_index = minima
        .iter()
        .rev()
        .find(|&&i| i < limit && !scan.monotonic_flags[i])
        .copied();
    ShiftOutcome {
        chosen_index,
        chosen_b: chosen_index.map(|i| scan.b_values[i]),
        minima,
    }
}
