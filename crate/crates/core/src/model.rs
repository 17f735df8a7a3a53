//! Physical and dimensionless parameterizations of the generator model.
//!
//! A phase-locked loop with a second-order bandpass loop filter reduces, in
//! renormalized time, to a third-order autonomous system for the phase
//! difference φ:
//!
//! ```text
//! dφ/dt = y
//! dy/dt = z
//! ε₁ε₂ dz/dt = γ − (ε₁ + ε₂) z − (1 + ε₁ cos φ) y
//! ```
//!
//! where ε₁, ε₂ come from the filter time constants, γ is the normalized
//! frequency detuning between the reference and the free-running VCO (both
//! taken after their dividers), and one unit of dimensionless time equals
//! `1 / t_renorm` seconds. This module converts a circuit-level description
//! into (ε₁, ε₂, γ), evaluates the right-hand side, and packages the two
//! combinations of parameters that a linear fit of the model can actually
//! resolve.

use crate::error::{Error, Result};

// ── circuit-level description ───────────────────────────────────────────────

/// One experimental regime at the circuit level: reference and VCO
/// frequencies with their dividers, the loop hold band, and the bandpass
/// filter R/C values. Field names carry their units.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalSetup {
    /// Reference-generator cyclic frequency (Hz).
    pub omega_rg_hz: f64,
    /// Reference-generator frequency divider.
    pub m: u32,
    /// Free-running (uncontrolled) VCO cyclic frequency (Hz).
    pub omega_0_hz: f64,
    /// VCO frequency divider.
    pub n: u32,
    /// Hold band ΩH (rad/s): product of VCO sensitivity and phase-detector
    /// output amplitude.
    pub omega_h_rad_s: f64,
    /// First filter stage resistance (Ω).
    pub r1_ohm: f64,
    /// First filter stage capacitance (F).
    pub c1_f: f64,
    /// Second filter stage resistance (Ω).
    pub r2_ohm: f64,
    /// Second filter stage capacitance (F).
    pub c2_f: f64,
}

impl PhysicalSetup {
    /// Check the strict-positivity invariants; names the offending field.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_rg_hz", self.omega_rg_hz),
            ("omega_0_hz", self.omega_0_hz),
            ("omega_h_rad_s", self.omega_h_rad_s),
            ("r1_ohm", self.r1_ohm),
            ("c1_f", self.c1_f),
            ("r2_ohm", self.r2_ohm),
            ("c2_f", self.c2_f),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Invalid(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.m == 0 || self.n == 0 {
            return Err(Error::Invalid("dividers m, n must be ≥ 1".into()));
        }
        Ok(())
    }
}

// ── dimensionless model parameters ──────────────────────────────────────────

/// Parameters of the third-order model in renormalized time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    /// ε₁ = (ΩH/n)·R₁C₁.
    pub eps1: f64,
    /// ε₂ = (ΩH/n)·R₂C₂.
    pub eps2: f64,
    /// Normalized detuning, signed: positive when the divided reference runs
    /// above the divided free-running VCO.
    pub gamma: f64,
    /// Renormalization rate ΩH/n (rad/s); one unit of dimensionless time is
    /// `1 / t_renorm` seconds.
    pub t_renorm: f64,
}

/// State of the model: phase difference and its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModelState {
    /// Phase difference φ (rad).
    pub phi: f64,
    /// dφ/dt.
    pub y: f64,
    /// dy/dt.
    pub z: f64,
}

impl ModelState {
    pub fn new(phi: f64, y: f64, z: f64) -> Self {
        ModelState { phi, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.phi.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// The two parameter combinations that appear as linear coefficients when
/// the third equation is divided through by ε₁ε₂. A fit of the model from
/// data estimates exactly these, not ε₁, ε₂, γ individually.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaPair {
    /// α₀ = γ/(ε₁ε₂).
    pub alpha0: f64,
    /// α₁ = −(ε₁ + ε₂)/(ε₁ε₂); always negative for a physical filter.
    pub alpha1: f64,
}

// ── conversions ─────────────────────────────────────────────────────────────

/// Convert a circuit-level setup into dimensionless model parameters.
///
/// The divided frequencies ω_RG/m and ω₀/n are cyclic (Hz); the 2π inside γ
/// converts their difference to angular units before normalizing by ΩH/n.
/// γ keeps its sign — a reference below the free-running VCO gives γ < 0.
pub fn to_dimensionless(setup: &PhysicalSetup) -> Result<DimensionlessParams> {
    setup.validate()?;
    let t_renorm = setup.omega_h_rad_s / setup.n as f64;
    let eps1 = t_renorm * setup.r1_ohm * setup.c1_f;
    let eps2 = t_renorm * setup.r2_ohm * setup.c2_f;
    let detuning_hz = setup.omega_rg_hz / setup.m as f64 - setup.omega_0_hz / setup.n as f64;
    let gamma = 2.0 * std::f64::consts::PI * detuning_hz / t_renorm;
    Ok(DimensionlessParams {
        eps1,
        eps2,
        gamma,
        t_renorm,
    })
}

/// Collapse (ε₁, ε₂, γ) into the effective linear coefficients (α₀, α₁).
pub fn effective_params(dp: &DimensionlessParams) -> AlphaPair {
    let product = dp.eps1 * dp.eps2;
    AlphaPair {
        alpha0: dp.gamma / product,
        alpha1: -(dp.eps1 + dp.eps2) / product,
    }
}

/// Right-hand side of the model: time derivatives of (φ, y, z).
pub fn rhs(state: &ModelState, dp: &DimensionlessParams) -> [f64; 3] {
    let dz = (dp.gamma
        - (dp.eps1 + dp.eps2) * state.z
        - (1.0 + dp.eps1 * state.phi.cos()) * state.y)
        / (dp.eps1 * dp.eps2);
    [state.y, state.z, dz]
}
