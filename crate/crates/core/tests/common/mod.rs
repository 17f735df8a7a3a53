//! Shared test fixtures: an independent reference integrator, settled
//! regime records, and small measurement helpers.
//!
//! The reference integrator is an adaptive Dormand–Prince 5(4) scheme —
//! deliberately a different method from the fixed-step integrator under
//! test, so trajectory comparisons check the production code against an
//! independent implementation rather than against itself.
#![allow(dead_code)]

use pll_ident::config::resolve_single_config;
use pll_ident::model::{rhs, to_dimensionless, DimensionlessParams, ModelState};
use pll_ident::series::TimeSeries;
use pll_ident::sim::simulate;

/// Sample step used for all regime records in the test suite.
pub const DT: f64 = 1e-3;

// ── regime fixtures ─────────────────────────────────────────────────────────

/// Mean burst period per bundled regime in dimensionless slow time,
/// measured once at dt = 1e-3 after a long transient and frozen. For the
/// strictly periodic regimes this is the limit-cycle period; for the
/// mixed-mode regimes 3d and 4 it is the mean spacing between burst
/// onsets at the grouping gap from [`burst_gap`], good enough for sizing
/// records and transients.
pub fn burst_period(name: &str) -> f64 {
    match name {
        "1b" => 101.32,
        "2c" => 142.63,
        "3d" => 78.2,
        "4" => 129.0,
        "5e" => 344.76,
        "6" => 658.13,
        "Cf" => 482.63,
        other => panic!("unknown regime {other}"),
    }
}

/// Spike-grouping gap that separates intra-burst from inter-burst
/// intervals for each regime. The mixed-mode regimes have several
/// interval clusters, so their gaps are pinned inside the widest valley
/// rather than derived from the period.
pub fn burst_gap(name: &str) -> f64 {
    match name {
        "3d" => 30.0,
        "4" => 50.0,
        other => 0.5 * burst_period(other),
    }
}

/// Regimes that settle onto a strictly periodic burst train with a fixed
/// spike count. 3d and 4 are excluded: they settle into mixed-mode
/// patterns whose spike multiplicity varies from burst to burst.
pub fn regular_regimes() -> [&'static str; 5] {
    ["1b", "2c", "5e", "6", "Cf"]
}

/// Spikes per burst for the strictly periodic regimes.
pub fn spikes_per_burst(name: &str) -> usize {
    match name {
        "1b" | "2c" => 1,
        "5e" | "6" | "Cf" => 2,
        other => panic!("regime {other} has no fixed spike count"),
    }
}

/// All bundled regime names in presentation order.
pub fn all_regimes() -> [&'static str; 7] {
    ["1b", "2c", "3d", "4", "5e", "6", "Cf"]
}

/// Dimensionless parameters of a bundled regime.
pub fn regime_params(name: &str) -> DimensionlessParams {
    let (cfg, _) = resolve_single_config(name).expect("bundled regime must resolve");
    to_dimensionless(&cfg.physical).expect("bundled regime must be valid")
}

/// Standard initial state for regime records.
pub fn standard_init() -> ModelState {
    ModelState::new(0.0, 0.1, 0.0)
}

/// Simulates a regime onto its attractor and returns `n_bursts` worth of
/// the (φ, y, z) components, sampled at [`DT`] after a two-period
/// transient.
pub fn settled_components(name: &str, n_bursts: f64) -> (TimeSeries, TimeSeries, TimeSeries) {
    let params = regime_params(name);
    let period = burst_period(name);
    let transient = (2.0 * period / DT).round() as usize;
    let n_steps = transient + (n_bursts * period / DT).round() as usize;
    simulate(&params, &standard_init(), DT, n_steps, transient).expect("regime must integrate")
}

/// The slow observable y of a settled regime record.
pub fn settled_y(name: &str, n_bursts: f64) -> TimeSeries {
    settled_components(name, n_bursts).1
}

// ── reference integrator ────────────────────────────────────────────────────

fn deriv(dp: &DimensionlessParams, s: &[f64; 3]) -> [f64; 3] {
    rhs(&ModelState::new(s[0], s[1], s[2]), dp)
}

/// One Dormand–Prince 5(4) trial step; returns the fifth-order state and
/// the scaled error norm of the embedded fourth-order difference.
fn dp_step(dp: &DimensionlessParams, s: &[f64; 3], h: f64) -> ([f64; 3], f64) {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    // Fifth-order weights (also the last stage's coefficients).
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    // Embedded fourth-order weights.
    const E1: f64 = 5179.0 / 57600.0;
    const E3: f64 = 7571.0 / 16695.0;
    const E4: f64 = 393.0 / 640.0;
    const E5: f64 = -92097.0 / 339200.0;
    const E6: f64 = 187.0 / 2100.0;
    const E7: f64 = 1.0 / 40.0;

    const RTOL: f64 = 1e-10;
    const ATOL: f64 = 1e-12;

    let at = |base: &[f64; 3], coeff: &[(f64, [f64; 3])]| -> [f64; 3] {
        let mut out = *base;
        for (c, k) in coeff {
            for i in 0..3 {
                out[i] += h * c * k[i];
            }
        }
        out
    };

    let k1 = deriv(dp, s);
    let k2 = deriv(dp, &at(s, &[(A21, k1)]));
    let k3 = deriv(dp, &at(s, &[(A31, k1), (A32, k2)]));
    let k4 = deriv(dp, &at(s, &[(A41, k1), (A42, k2), (A43, k3)]));
    let k5 = deriv(dp, &at(s, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
    let k6 = deriv(
        dp,
        &at(s, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]),
    );
    let y5 = at(s, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
    let k7 = deriv(dp, &y5);
    let y4 = at(
        s,
        &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)],
    );

    let mut err2 = 0.0;
    for i in 0..3 {
        let scale = ATOL + RTOL * s[i].abs().max(y5[i].abs());
        let e = (y5[i] - y4[i]) / scale;
        err2 += e * e;
    }
    (y5, (err2 / 3.0).sqrt())
}

/// Integrates the model with the adaptive reference scheme, returning the
/// state at each requested time. `times` must be non-decreasing and start
/// at or after zero; the initial state is taken at t = 0.
pub fn oracle_at_times(
    dp: &DimensionlessParams,
    init: &ModelState,
    times: &[f64],
) -> Vec<[f64; 3]> {
    let mut state = [init.phi, init.y, init.z];
    let mut t = 0.0;
    let mut h: f64 = 1e-4;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        assert!(target >= t, "times must be non-decreasing");
        while t < target {
            let step = h.min(target - t);
            let (next, err) = dp_step(dp, &state, step);
            if err <= 1.0 {
                t += step;
                state = next;
                h = step * (0.9 * err.max(1e-12).powf(-0.2)).clamp(0.2, 5.0);
                h = h.min(0.5);
            } else {
                h = step * (0.9 * err.powf(-0.2)).clamp(0.05, 0.9);
            }
        }
        out.push(state);
    }
    out
}

// ── measurement helpers ─────────────────────────────────────────────────────

/// Single-bin DFT amplitude of a tone at `f` cycles per sample.
pub fn dft_amplitude(values: &[f64], f: f64) -> f64 {
    let n = values.len() as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        let arg = -2.0 * std::f64::consts::PI * f * i as f64;
        re += v * arg.cos();
        im += v * arg.sin();
    }
    2.0 * (re * re + im * im).sqrt() / n
}

/// Largest absolute difference between two equal-length slices.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Root-mean-square of a slice.
pub fn rms(values: &[f64]) -> f64 {
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}
