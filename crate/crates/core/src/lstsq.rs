//! Linear least squares on phase-neighbor increment systems.
//!
//! Both identification methods reduce to minimizing L = Σδ_n² where δ_n is
//! the residual of a linear relation between increments. The solver uses an
//! orthogonal (QR) factorization rather than normal equations: the
//! increment columns can be strongly correlated, and squaring the matrix
//! would square its condition number.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Conditioning threshold beyond which a fit is marked invalid.
const CONDITION_LIMIT: f64 = 1e12;

// ── increment system ────────────────────────────────────────────────────────

/// Which identification method produced a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMethod {
    /// Direct method on (1/y, z/y) increments with target (ż/y) increments.
    Legacy,
    /// Integrated method on (Δη, h₁..h_K) with target Δζ.
    Integrated,
}

/// A stack of regressor rows and their targets, one per usable
/// phase-neighbor pair. Rows are stored flat, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSystem {
    rows: Vec<f64>,
    targets: Vec<f64>,
    width: usize,
    method: FitMethod,
}

impl DeltaSystem {
    pub fn with_capacity(width: usize, method: FitMethod, capacity: usize) -> Self {
        DeltaSystem {
            rows: Vec::with_capacity(width * capacity),
            targets: Vec::with_capacity(capacity),
            width,
            method,
        }
    }

    /// Append one regressor row and its target.
    pub fn push(&mut self, row: &[f64], target: f64) {
        debug_assert_eq!(row.len(), self.width);
        self.rows.extend_from_slice(row);
        self.targets.push(target);
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Entries per row: K+1 for the integrated method, 2 for the legacy one.
    pub fn width(&self) -> usize {
        self.width
    }

    /// Taylor truncation order K for integrated systems.
    pub fn n_terms(&self) -> usize {
        match self.method {
            FitMethod::Integrated => self.width - 1,
            FitMethod::Legacy => 0,
        }
    }

    pub fn method(&self) -> FitMethod {
        self.method
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.width..(i + 1) * self.width]
    }

    pub fn target(&self, i: usize) -> f64 {
        self.targets[i]
    }
}

// ── fit result ──────────────────────────────────────────────────────────────

/// Outcome of one least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    /// Fitted coefficients: (β₀..β_K) for the integrated method,
    /// (α₀, α₁) for the legacy one.
    pub beta: Vec<f64>,
    /// Achieved minimum of L = Σδ_n².
    pub l_value: f64,
    /// Spectral condition number of the regressor matrix.
    pub condition: f64,
    /// Rows entering the fit.
    pub n_points: usize,
    /// False when the system is rank deficient or conditioning exceeds 10¹².
    pub valid: bool,
}

/// Minimize L = Σδ_n² over the coefficients of a [`DeltaSystem`].
///
/// The residual norm comes directly from the tail of Qᵀ·target, the
/// coefficients from back substitution on R, and the condition number from
/// the singular values of R (which match those of the full matrix). A rank
/// deficient system still returns coefficients — the minimum-norm solution —
/// but flagged `valid = false`.
pub fn solve_least_squares(sys: &DeltaSystem) -> Result<FitResult> {
    let n = sys.len();
    let k = sys.width();
    if n < k + 1 {
        return Err(Error::Degenerate(format!(
            "least squares needs at least {} rows for {k} coefficients, got {n}",
            k + 1
        )));
    }

    let a = DMatrix::from_row_slice(n, k, &sys.rows);
    let mut b = DVector::from_column_slice(&sys.targets);

    let qr = a.qr();
    qr.q_tr_mul(&mut b);

    // ‖residual‖² is the part of Qᵀb beyond the first k entries.
    let l_value: f64 = b.as_slice()[k..].iter().map(|v| v * v).sum();

    let r = qr.r();
    let head = DVector::from_column_slice(&b.as_slice()[..k]);
    let svd = r.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };

    let beta = match r.solve_upper_triangular(&head) {
        Some(x) => x,
        // Exactly singular R: fall back to the minimum-norm solution.
        None => svd
            .pseudo_inverse(s_max * 1e-15)
            .map_err(|e| Error::Degenerate(format!("pseudo-inverse failed: {e}")))?
            * head,
    };

    Ok(FitResult {
        beta: beta.as_slice().to_vec(),
        l_value,
        condition,
        n_points: n,
        valid: condition <= CONDITION_LIMIT,
    })
}
