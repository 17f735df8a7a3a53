//! From a raw observable to the aligned state arrays the fits consume.
//!
//! The measured scalar η is related to the model's y component by a linear
//! observation y = aη + b with unknown offset b, and to the phase by
//! φ = aψ + bt + c where ψ = ∫η dt. This module provides the numerical
//! calculus (integration, differentiation), the observation map, and the
//! assembly step that puts time, ψ, η, and ζ = dη/dt (optionally dζ/dt) on
//! one common, centered, consistently trimmed support.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

// ── observation model ───────────────────────────────────────────────────────

/// Linear observation y = aη + b linking the recorded observable η to the
/// model component y, together with the phase integration constant c of
/// φ = aψ + bt + c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationModel {
    /// Linear scale; must be nonzero.
    pub a: f64,
    /// Constant shift, in observable units.
    pub b: f64,
    /// Phase integration constant (rad). Never needed by the fits (it is
    /// absorbed into the unknown function's argument); kept for forward
    /// simulation of observables.
    pub c: f64,
}

/// Map a series through the observation model: forward takes η to aη + b,
/// inverse takes y to (y − b)/a.
pub fn apply_observation(
    y: &TimeSeries,
    model: &ObservationModel,
    inverse: bool,
) -> Result<TimeSeries> {
    if model.a == 0.0 || !model.a.is_finite() {
        return Err(Error::Invalid(format!(
            "observation scale a must be nonzero and finite, got {}",
            model.a
        )));
    }
    let values = if inverse {
        y.values.iter().map(|v| (v - model.b) / model.a).collect()
    } else {
        y.values.iter().map(|v| model.a * v + model.b).collect()
    };
    Ok(TimeSeries::new(y.t0, y.dt, values))
}

// ── numerical calculus ──────────────────────────────────────────────────────

/// Central-difference derivative on the interior of the record: sample i of
/// the output is (values[i+2] − values[i])/(2dt) of the input, so `t0`
/// advances by one step and the length shrinks by two.
pub fn differentiate(series: &TimeSeries) -> Result<TimeSeries> {
    if series.len() < 3 {
        return Err(Error::Invalid(format!(
            "differentiation needs at least 3 samples, got {}",
            series.len()
        )));
    }
    let inv = 1.0 / (2.0 * series.dt);
    let values = series
        .values
        .windows(3)
        .map(|w| (w[2] - w[0]) * inv)
        .collect();
    Ok(TimeSeries::new(series.t0 + series.dt, series.dt, values))
}

/// Cumulative trapezoidal integral with the first value pinned to 0; the
/// time axis is unchanged.
pub fn integrate(series: &TimeSeries) -> Result<TimeSeries> {
    if series.len() < 2 {
        return Err(Error::Invalid(format!(
            "integration needs at least 2 samples, got {}",
            series.len()
        )));
    }
    let half_dt = 0.5 * series.dt;
    let mut values = Vec::with_capacity(series.len());
    values.push(0.0);
    let mut acc = 0.0;
    for w in series.values.windows(2) {
        acc += half_dt * (w[0] + w[1]);
        values.push(acc);
    }
    Ok(TimeSeries::new(series.t0, series.dt, values))
}

// ── state assembly ──────────────────────────────────────────────────────────

/// Aligned state arrays assembled from one observable record, everything on
/// the same centered dimensionless time grid and trimmed to the support
/// where every derivative stencil is complete.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEnsemble {
    /// Centered dimensionless time; antisymmetric about the record middle.
    pub t: Vec<f64>,
    /// ψ = ∫η dt in dimensionless time, offset to vanish at the record
    /// middle (matching the time convention; the constant is arbitrary and
    /// drops out of every use).
    pub psi: Vec<f64>,
    /// The observable itself.
    pub eta: Vec<f64>,
    /// ζ = dη/dt in dimensionless time.
    pub zeta: Vec<f64>,
    /// dζ/dt, present only when the direct method needs it.
    pub dzeta: Option<Vec<f64>>,
    /// Grid spacing of `t` (dimensionless).
    pub dt: f64,
}

impl StateEnsemble {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Candidate phase ψ + b̃·t for a trial shift b̃. At the true shift
    /// (up to the observation scale) this is the model phase up to an
    /// affine transformation, which is what the sorting step relies on.
    pub fn candidate_phase(&self, b_trial: f64) -> Vec<f64> {
        self.psi
            .iter()
            .zip(&self.t)
            .map(|(p, t)| p + b_trial * t)
            .collect()
    }
}

/// Assemble the state arrays from an observable record.
///
/// The laboratory time axis is multiplied by `t_renorm` (rad/s), turning
/// seconds into dimensionless model time, and re-centered so t = 0 falls at
/// the record middle. ψ comes from trapezoidal integration, ζ (and dζ/dt
/// when `need_second_derivative` is set) from central differences; one edge
/// sample per derivative order is trimmed from every array so they share
/// one support.
pub fn assemble_states(
    eta: &TimeSeries,
    t_renorm: f64,
    need_second_derivative: bool,
) -> Result<StateEnsemble> {
    if !(t_renorm > 0.0) || !t_renorm.is_finite() {
        return Err(Error::Invalid(format!(
            "t_renorm must be > 0, got {t_renorm}"
        )));
    }
    let trim = if need_second_derivative { 2 } else { 1 };
    let n0 = eta.len();
    if n0 < 2 * trim + 2 {
        return Err(Error::Invalid(format!(
            "record of {n0} samples is too short: {} needed after trimming {trim} per edge",
            2 * trim + 2
        )));
    }

    let dt = eta.dt * t_renorm;
    let rescaled = TimeSeries::new(0.0, dt, eta.values.clone());
    let psi_full = integrate(&rescaled)?;
    let zeta_full = differentiate(&rescaled)?;
    let dzeta_full = if need_second_derivative {
        Some(differentiate(&zeta_full)?)
    } else {
        None
    };

    let n = n0 - 2 * trim;
    let center = (n - 1) as f64 / 2.0;
    let t: Vec<f64> = (0..n).map(|i| (i as f64 - center) * dt).collect();

    let mut psi = psi_full.values[trim..n0 - trim].to_vec();
    let mid = if n % 2 == 1 {
        psi[n / 2]
    } else {
        0.5 * (psi[n / 2 - 1] + psi[n / 2])
    };
    for p in &mut psi {
        *p -= mid;
    }

    let eta_trimmed = eta.values[trim..n0 - trim].to_vec();
    // zeta_full sample k corresponds to original sample k + 1.
    let zeta = zeta_full.values[trim - 1..n0 - trim - 1].to_vec();
    // dzeta_full sample k corresponds to original sample k + 2.
    let dzeta = dzeta_full.map(|d| d.values[trim - 2..n0 - trim - 2].to_vec());

    Ok(StateEnsemble {
        t,
        psi,
        eta: eta_trimmed,
        zeta,
        dzeta,
        dt,
    })
}
