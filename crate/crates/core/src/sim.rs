//! Fixed-step simulator for the third-order generator model.
//!
//! A classical 4th-order Runge–Kutta scheme integrates the model in
//! dimensionless time. The step is fixed so that runs are deterministic and
//! the output lands on a uniform grid ready for the identification pipeline;
//! accuracy is validated elsewhere by step-halving against an adaptive
//! reference integrator.

use crate::error::{Error, Result};
use crate::model::{rhs, DimensionlessParams, ModelState};
use crate::series::TimeSeries;

// ── integrator ──────────────────────────────────────────────────────────────

#[inline]
fn offset(s: &ModelState, k: &[f64; 3], h: f64) -> ModelState {
    ModelState {
        phi: s.phi + h * k[0],
        y: s.y + h * k[1],
        z: s.z + h * k[2],
    }
}

/// One classical Runge–Kutta step of size `dt`.
#[inline]
fn rk4_step(s: &ModelState, dp: &DimensionlessParams, dt: f64) -> ModelState {
    let k1 = rhs(s, dp);
    let k2 = rhs(&offset(s, &k1, 0.5 * dt), dp);
    let k3 = rhs(&offset(s, &k2, 0.5 * dt), dp);
    let k4 = rhs(&offset(s, &k3, dt), dp);
    let w = dt / 6.0;
    ModelState {
        phi: s.phi + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y: s.y + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        z: s.z + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    }
}

/// Integrate the model from `init` for `n_steps` samples spaced `dt` apart,
/// discarding the first `transient` samples.
///
/// Sample `i` of the output is the state at dimensionless time `i·dt`
/// (sample 0 is the initial condition), so the returned series start at
/// `t0 = transient·dt` and keep absolute integration time. Returns the
/// (φ, y, z) component series.
///
/// A non-finite state aborts the run and reports the step that produced it.
pub fn simulate(
    dp: &DimensionlessParams,
    init: &ModelState,
    dt: f64,
    n_steps: usize,
    transient: usize,
) -> Result<(TimeSeries, TimeSeries, TimeSeries)> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Invalid(format!("dt must be > 0, got {dt}")));
    }
    if !init.is_finite() {
        return Err(Error::Invalid("initial state must be finite".into()));
    }
    if n_steps < transient + 2 {
        return Err(Error::Invalid(format!(
            "n_steps ({n_steps}) must exceed transient ({transient}) by at least 2"
        )));
    }

    let kept = n_steps - transient;
    let mut phi = Vec::with_capacity(kept);
    let mut y = Vec::with_capacity(kept);
    let mut z = Vec::with_capacity(kept);

    let mut state = *init;
    for i in 0..n_steps {
        if i >= transient {
            phi.push(state.phi);
            y.push(state.y);
            z.push(state.z);
        }
        state = rk4_step(&state, dp, dt);
        if !state.is_finite() {
            return Err(Error::Numerical(format!(
                "trajectory diverged: non-finite state after step {} (t = {:.6})",
                i + 1,
                (i + 1) as f64 * dt
            )));
        }
    }

    let t0 = transient as f64 * dt;
    Ok((
        TimeSeries::new(t0, dt, phi),
        TimeSeries::new(t0, dt, y),
        TimeSeries::new(t0, dt, z),
    ))
}
