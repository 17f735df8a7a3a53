//! The two identification methods: direct (legacy) and integrated.
//!
//! Both exploit the same trick: order samples by phase, difference model
//! relations between phase-neighbors, and the unknown nonlinear phase
//! function nearly cancels — leaving a *linear* system for the effective
//! parameters without ever parameterizing the function itself.
//!
//! The legacy method differences the model equation directly and therefore
//! needs the second derivative of the observable and a guard against the
//! 1/y singularity. The integrated method differences the once-integrated
//! equation ζ = β₀η + Σβ_k tᵏ − f₄(ψ + b̃t) + C, needing only the first
//! derivative and tolerating an unknown measurement shift b̃; the unknown
//! function is recovered afterwards from the fitted coefficients.

use crate::error::{Error, Result};
use crate::lstsq::{solve_least_squares, DeltaSystem, FitMethod, FitResult};
use crate::pipeline::StateEnsemble;
use crate::sort::{build_sort_map, SortMap};

/// Largest accepted Taylor truncation order for the integrated method.
pub const MAX_K_ORDER: usize = 5;

// ── increment construction ──────────────────────────────────────────────────

/// Build the integrated-method increment system from a sorting map over the
/// candidate phase.
///
/// For every sample n with a phase-predecessor p, the row is
/// (Δη, h₁, …, h_K) with Δη = η(n) − η(p) and h_k = t(n)ᵏ − t(p)ᵏ, and the
/// target is Δζ = ζ(n) − ζ(p); the fitted relation reads
/// β₀Δη + Σ β_k h_k − Δζ = δ_n. Rows are emitted in rank order.
pub fn build_deltas_integrated(
    ens: &StateEnsemble,
    map: &SortMap,
    k_order: usize,
) -> Result<DeltaSystem> {
    if k_order < 1 || k_order > MAX_K_ORDER {
        return Err(Error::Invalid(format!(
            "Taylor order K must lie in 1..={MAX_K_ORDER}, got {k_order}"
        )));
    }
    if map.len() != ens.len() {
        return Err(Error::Invalid(format!(
            "sorting map covers {} samples but the ensemble has {}",
            map.len(),
            ens.len()
        )));
    }
    if ens.len() < 2 {
        return Err(Error::Degenerate(
            "need at least 2 samples to form increments".into(),
        ));
    }

    let mut sys = DeltaSystem::with_capacity(k_order + 1, FitMethod::Integrated, ens.len() - 1);
    let mut row = vec![0.0; k_order + 1];
    for r in 1..ens.len() {
        let n = map.index_at_rank(r);
        let p = map.index_at_rank(r - 1);
        row[0] = ens.eta[n] - ens.eta[p];
        for k in 1..=k_order {
            row[k] = ens.t[n].powi(k as i32) - ens.t[p].powi(k as i32);
        }
        sys.push(&row, ens.zeta[n] - ens.zeta[p]);
    }
    Ok(sys)
}

/// Build the legacy (direct-method) increment system.
///
/// Rows are (Δ(1/y), Δ(z/y)) with target Δ(ż/y), built between
/// phase-neighbors; any pair touching a sample with |y| below `y_floor` is
/// excluded to keep clear of the 1/y singularity.
pub fn build_deltas_legacy(
    ens: &StateEnsemble,
    map: &SortMap,
    y_floor: f64,
) -> Result<DeltaSystem> {
    let dzeta = ens.dzeta.as_ref().ok_or_else(|| {
        Error::Invalid("legacy increments need an ensemble with d\u{3b6}/dt".into())
    })?;
    if map.len() != ens.len() {
        return Err(Error::Invalid(format!(
            "sorting map covers {} samples but the ensemble has {}",
            map.len(),
            ens.len()
        )));
    }
    if !(y_floor > 0.0) || !y_floor.is_finite() {
        return Err(Error::Invalid(format!("y-floor must be > 0, got {y_floor}")));
    }

    let mut sys = DeltaSystem::with_capacity(2, FitMethod::Legacy, ens.len() - 1);
    for r in 1..ens.len() {
        let n = map.index_at_rank(r);
        let p = map.index_at_rank(r - 1);
        let (yn, yp) = (ens.eta[n], ens.eta[p]);
        if yn.abs() < y_floor || yp.abs() < y_floor {
            continue;
        }
        let row = [1.0 / yn - 1.0 / yp, ens.zeta[n] / yn - ens.zeta[p] / yp];
        sys.push(&row, dzeta[n] / yn - dzeta[p] / yp);
    }
    if sys.is_empty() {
        return Err(Error::Degenerate(
            "every increment row was excluded by the y-floor".into(),
        ));
    }
    Ok(sys)
}

// ── fits ────────────────────────────────────────────────────────────────────

/// Fraction of max|η| used as the default legacy-method exclusion floor.
pub const DEFAULT_Y_FLOOR_FRACTION: f64 = 0.05;

/// Integrated-method fit at a given trial shift: sort by candidate phase,
/// build increments, minimize L. β₀ estimates α₁ = −(ε₁+ε₂)/(ε₁ε₂); β₁
/// estimates α₀ = γ/(ε₁ε₂) up to the truncated Taylor term.
pub fn fit_integrated(ens: &StateEnsemble, b_trial: f64, k_order: usize) -> Result<FitResult> {
    let keys = ens.candidate_phase(b_trial);
    let map = build_sort_map(&keys)?;
    let sys = build_deltas_integrated(ens, &map, k_order)?;
    solve_least_squares(&sys)
}

/// Legacy direct-method fit: sort by ψ, build the 1/y increments, minimize
/// L. Returns (α₀, α₁) estimates. `y_floor` defaults to 5% of max|η|.
pub fn fit_legacy(ens: &StateEnsemble, y_floor: Option<f64>) -> Result<FitResult> {
    let floor = match y_floor {
        Some(f) => f,
        None => {
            let peak = ens.eta.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            DEFAULT_Y_FLOOR_FRACTION * peak
        }
    };
    let map = build_sort_map(&ens.psi)?;
    let sys = build_deltas_legacy(ens, &map, floor)?;
    solve_least_squares(&sys)
}

// ── function reconstruction ─────────────────────────────────────────────────

/// How the reconstructed function values are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum F4Source {
    /// Evaluate β₀η + Σβ_k tᵏ − ζ at every sample.
    Pointwise,
    /// Accumulate the fit residual increments δ_n along rank order; equals
    /// the pointwise variant up to one additive constant.
    Cumulative,
}

/// The reconstructed nonlinear function as a graph over sorted candidate
/// phase.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionGraph {
    /// Candidate phase in rank order (non-decreasing).
    pub psi_sorted: Vec<f64>,
    /// Reconstructed f₄ at each abscissa.
    pub f4_values: Vec<f64>,
    pub source: F4Source,
}

/// Reconstruct the nonlinear function f₄ from a completed integrated fit.
pub fn reconstruct_f4(
    ens: &StateEnsemble,
    b_trial: f64,
    fit: &FitResult,
    source: F4Source,
) -> Result<FunctionGraph> {
    if !fit.valid {
        return Err(Error::Invalid(
            "refusing to reconstruct from an invalid (degenerate) fit".into(),
        ));
    }
    if fit.beta.len() < 2 {
        return Err(Error::Invalid(format!(
            "integrated fit must carry \u{3b2}\u{2080}..\u{3b2}_K (\u{2265} 2 coefficients), got {}",
            fit.beta.len()
        )));
    }
    let keys = ens.candidate_phase(b_trial);
    let map = build_sort_map(&keys)?;

    let pointwise_at = |n: usize| -> f64 {
        let mut v = fit.beta[0] * ens.eta[n] - ens.zeta[n];
        for (k, b) in fit.beta.iter().enumerate().skip(1) {
            v += b * ens.t[n].powi(k as i32);
        }
        v
    };

    let n_samples = ens.len();
    let mut psi_sorted = Vec::with_capacity(n_samples);
    let mut f4_values = Vec::with_capacity(n_samples);
    match source {
        F4Source::Pointwise => {
            for r in 0..n_samples {
                let n = map.index_at_rank(r);
                psi_sorted.push(keys[n]);
                f4_values.push(pointwise_at(n));
            }
        }
        F4Source::Cumulative => {
            let mut acc = 0.0;
            psi_sorted.push(keys[map.index_at_rank(0)]);
            f4_values.push(0.0);
            for r in 1..n_samples {
                let n = map.index_at_rank(r);
                let p = map.index_at_rank(r - 1);
                // δ_n = β₀Δη + Σβ_k h_k − Δζ, accumulated in plain f64:
                // the telescoping sum stays within ~1e-13 of the pointwise
                // values over multi-million-sample records.
                acc += pointwise_at(n) - pointwise_at(p);
                psi_sorted.push(keys[n]);
                f4_values.push(acc);
            }
        }
    }

    Ok(FunctionGraph {
        psi_sorted,
        f4_values,
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ensemble(t: Vec<f64>, psi: Vec<f64>, eta: Vec<f64>, zeta: Vec<f64>) -> StateEnsemble {
        let dt = if t.len() > 1 { t[1] - t[0] } else { 1.0 };
        StateEnsemble {
            t,
            psi,
            eta,
            zeta,
            dzeta: None,
            dt,
        }
    }

    #[test]
    fn three_point_hand_example() {
        let ens = ensemble(
            vec![-1.0, 0.0, 1.0],
            vec![0.2, 0.1, 0.3],
            vec![2.0, 1.0, 3.0],
            vec![0.0, 1.0, 2.0],
        );
        let map = build_sort_map(&ens.candidate_phase(0.0)).unwrap();
        let sys = build_deltas_integrated(&ens, &map, 1).unwrap();
        assert_eq!(sys.len(), 2);
        // Sorted chain 0.1 → 0.2 → 0.3 visits samples 1 → 0 → 2.
        assert_eq!(sys.row(0), &[1.0, -1.0]);
        assert_eq!(sys.target(0), -1.0);
        assert_eq!(sys.row(1), &[1.0, 2.0]);
        assert_eq!(sys.target(1), 2.0);
    }

    #[test]
    fn constant_observable_leaves_only_time_terms() {
        let n = 20;
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.1 - 0.95).collect();
        let psi: Vec<f64> = (0..n).map(|i| ((i * 13) % n) as f64).collect();
        let ens = ensemble(t, psi, vec![4.0; n], vec![-1.0; n]);
        let map = build_sort_map(&ens.candidate_phase(0.0)).unwrap();
        let sys = build_deltas_integrated(&ens, &map, 2).unwrap();
        for i in 0..sys.len() {
            assert_eq!(sys.row(i)[0], 0.0);
            assert_eq!(sys.target(i), 0.0);
            assert!(sys.row(i)[1] != 0.0 || sys.row(i)[2] != 0.0);
        }
    }

    #[test]
    fn increments_telescope_to_endpoint_difference() {
        let n = 64;
        let t: Vec<f64> = (0..n).map(|i| (i as f64 - 31.5) * 0.05).collect();
        let psi: Vec<f64> = (0..n).map(|i| (i as f64 * 0.9).sin()).collect();
        let eta: Vec<f64> = (0..n).map(|i| (i as f64 * 0.31).cos()).collect();
        let zeta: Vec<f64> = (0..n).map(|i| (i as f64 * 0.17).sin() * 0.3).collect();
        let ens = ensemble(t, psi, eta, zeta);
        let keys = ens.candidate_phase(0.4);
        let map = build_sort_map(&keys).unwrap();
        let sys = build_deltas_integrated(&ens, &map, 1).unwrap();

        let beta = [0.5, 0.25];
        let total: f64 = (0..sys.len())
            .map(|i| beta[0] * sys.row(i)[0] + beta[1] * sys.row(i)[1] - sys.target(i))
            .sum();
        let point = |n: usize| beta[0] * ens.eta[n] + beta[1] * ens.t[n] - ens.zeta[n];
        let lo = map.index_at_rank(0);
        let hi = map.index_at_rank(ens.len() - 1);
        assert!((total - (point(hi) - point(lo))).abs() < 1e-12);
    }

    #[test]
    fn exactly_linear_data_is_recovered_with_zero_residual() {
        // ζ = β₀η + β₁t exactly (no nonlinear part): the fit must find the
        // coefficients and an essentially zero L.
        let n = 200;
        let t: Vec<f64> = (0..n).map(|i| (i as f64 - 99.5) * 0.01).collect();
        let psi: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let eta: Vec<f64> = (0..n).map(|i| (i as f64 * 0.11).cos()).collect();
        let (b0, b1) = (-0.31, 1.4e-3);
        let zeta: Vec<f64> = (0..n).map(|i| b0 * eta[i] + b1 * t[i]).collect();
        let ens = ensemble(t, psi, eta, zeta);
        let fit = fit_integrated(&ens, 0.0, 1).unwrap();
        assert!(fit.valid);
        assert!((fit.beta[0] - b0).abs() < 1e-10);
        assert!((fit.beta[1] - b1).abs() < 1e-10);
        assert!(fit.l_value < 1e-20);
    }

    #[test]
    fn legacy_trivial_system_is_all_zero() {
        let n = 16;
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.1 - 0.75).collect();
        let psi: Vec<f64> = (0..n).map(|i| ((i * 7) % n) as f64).collect();
        let mut ens = ensemble(t, psi, vec![1.0; n], vec![0.0; n]);
        ens.dzeta = Some(vec![0.0; n]);
        let map = build_sort_map(&ens.psi).unwrap();
        let sys = build_deltas_legacy(&ens, &map, 0.05).unwrap();
        assert_eq!(sys.len(), n - 1);
        for i in 0..sys.len() {
            assert_eq!(sys.row(i), &[0.0, 0.0]);
            assert_eq!(sys.target(i), 0.0);
        }
    }

    #[test]
    fn legacy_excludes_rows_near_zero_crossing() {
        let eta = vec![1.0, 0.8, 0.01, -0.9, -1.0, 0.7, 1.0, 0.9];
        let n = eta.len();
        let t: Vec<f64> = (0..n).map(|i| i as f64 - 3.5).collect();
        let psi: Vec<f64> = (0..n).map(|i| ((i * 3) % n) as f64).collect();
        let mut ens = ensemble(t, psi, eta, vec![0.1; n]);
        ens.dzeta = Some(vec![0.2; n]);
        let map = build_sort_map(&ens.psi).unwrap();
        let sys = build_deltas_legacy(&ens, &map, 0.05).unwrap();
        // Sample 2 has |y| = 0.01 < 0.05; both rows touching it vanish.
        assert_eq!(sys.len(), n - 1 - 2);
    }

    #[test]
    fn legacy_with_everything_excluded_is_degenerate() {
        let n = 10;
        let t: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let psi: Vec<f64> = (0..n).map(|i| ((i * 3) % n) as f64).collect();
        let mut ens = ensemble(t, psi, vec![1e-6; n], vec![0.0; n]);
        ens.dzeta = Some(vec![0.0; n]);
        let map = build_sort_map(&ens.psi).unwrap();
        let err = build_deltas_legacy(&ens, &map, 0.05).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn reconstruction_variants_differ_by_a_constant() {
        // ζ = β₀η + β₁t − sin(ψ): with the true coefficients supplied, the
        // pointwise reconstruction is exactly sin at the sorted keys, and
        // the cumulative one matches it up to one constant.
        let n = 300;
        let t: Vec<f64> = (0..n).map(|i| (i as f64 - 149.5) * 0.02).collect();
        let psi: Vec<f64> = (0..n).map(|i| 2.5 * (i as f64 * 0.21).sin()).collect();
        let eta: Vec<f64> = (0..n).map(|i| (i as f64 * 0.13).cos()).collect();
        let (b0, b1) = (-0.3, 2e-3);
        let zeta: Vec<f64> = (0..n)
            .map(|i| b0 * eta[i] + b1 * t[i] - psi[i].sin())
            .collect();
        let ens = ensemble(t, psi, eta, zeta);
        let fit = FitResult {
            beta: vec![b0, b1],
            l_value: 0.0,
            condition: 1.0,
            n_points: n - 1,
            valid: true,
        };
        let point = reconstruct_f4(&ens, 0.0, &fit, F4Source::Pointwise).unwrap();
        let cumul = reconstruct_f4(&ens, 0.0, &fit, F4Source::Cumulative).unwrap();
        assert_eq!(point.psi_sorted, cumul.psi_sorted);
        for i in 0..n {
            assert!((point.f4_values[i] - point.psi_sorted[i].sin()).abs() < 1e-12);
        }
        let offsets: Vec<f64> = (0..n)
            .map(|i| point.f4_values[i] - cumul.f4_values[i])
            .collect();
        let spread = offsets.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - offsets.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1e-10, "constant offset spread {spread:.3e}");
        // Abscissae are sorted.
        assert!(point.psi_sorted.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn reconstruction_refuses_invalid_fit() {
        let ens = ensemble(
            vec![-0.5, 0.0, 0.5],
            vec![0.2, 0.1, 0.3],
            vec![1.0, 2.0, 3.0],
            vec![0.0, 0.0, 0.0],
        );
        let fit = FitResult {
            beta: vec![1.0, 1.0],
            l_value: 0.0,
            condition: 1e13,
            n_points: 2,
            valid: false,
        };
        assert!(reconstruct_f4(&ens, 0.0, &fit, F4Source::Pointwise).is_err());
    }

    #[test]
    fn k_order_bounds_enforced() {
        let ens = ensemble(
            vec![-1.0, 0.0, 1.0],
            vec![0.2, 0.1, 0.3],
            vec![2.0, 1.0, 3.0],
            vec![0.0, 1.0, 2.0],
        );
        assert!(fit_integrated(&ens, 0.0, 0).is_err());
        assert!(fit_integrated(&ens, 0.0, 6).is_err());
    }
}
