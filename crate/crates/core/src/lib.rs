//! Simulation and system identification for a phase-locked-loop generator
//! with a bandpass loop filter.
//!
//! The loop is modeled by the third-order system
//!
//! ```text
//! dφ/dt = y
//! dy/dt = z
//! ε₁ε₂ dz/dt = γ − (ε₁+ε₂) z − (1 + ε₁ cos φ) y
//! ```
//!
//! where φ is the phase difference between the controlled oscillator and the
//! reference, γ the dimensionless frequency detuning, and ε₁, ε₂ the filter
//! time constants. The crate covers the full workflow from a measured scalar
//! observable back to model parameters:
//!
//! * [`model`] — physical-to-dimensionless parameter mapping and the model
//!   right-hand side,
//! * [`sim`] — fixed-step integration of the model,
//! * [`spikes`] — spike/burst labeling of simulated or measured records,
//! * [`series`] + [`smooth`] + [`pipeline`] — the observable-to-state-ensemble
//!   preprocessing chain (smoothing, integration, differentiation, time
//!   centering, the linear observation model),
//! * [`sort`] + [`lstsq`] + [`identify`] — the increment-based identification
//!   methods: state vectors sorted by phase, increments between phase
//!   neighbors regressed to recover the effective parameters without
//!   parameterizing the nonlinearity, plus reconstruction of the nonlinear
//!   function itself,
//! * [`scan`] — estimation of the unknown constant measurement shift by
//!   scanning trial shifts,
//! * [`config`] + [`report`] + [`cli`] — regime configuration files, JSON
//!   run reports, and the `pllid` command-line surface.

pub mod cli;
pub mod config;
pub mod error;
pub mod identify;
pub mod lstsq;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod scan;
pub mod series;
pub mod sim;
pub mod smooth;
pub mod sort;
pub mod spikes;

pub use error::{Error, Result};
