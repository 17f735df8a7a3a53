//! The sorting map: ordering samples by a phase key.
//!
//! Both identification methods difference model quantities between samples
//! that are *neighbors in phase*, not neighbors in time — that is what
//! cancels the unknown nonlinear function out of the fitted relation. The
//! sorting map Q ranks every sample by its candidate phase; each sample's
//! predecessor is the sample one rank below it. When the candidate phase is
//! monotone in time the map degenerates to the identity and carries no
//! information, which callers detect via [`is_strictly_increasing`].

use crate::error::{Error, Result};

// ── sort map ────────────────────────────────────────────────────────────────

/// Permutation pair produced by stably sorting samples on a key array.
///
/// Ranks use `u32` indices: records beyond 4G samples are far past any
/// practical record length, and the two arrays dominate memory at scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SortMap {
    /// `q[n]` is the rank of original sample n in key order.
    q: Vec<u32>,
    /// `q_inv[r]` is the original sample index holding rank r.
    q_inv: Vec<u32>,
}

impl SortMap {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Rank of original sample `n`.
    pub fn rank(&self, n: usize) -> usize {
        self.q[n] as usize
    }

    /// Original sample index at rank `r`.
    pub fn index_at_rank(&self, r: usize) -> usize {
        self.q_inv[r] as usize
    }

    /// The sample immediately below `n` in key order: p(n) = Q⁻¹(Q(n) − 1).
    /// `None` for the minimum-rank sample, which has no predecessor.
    pub fn predecessor(&self, n: usize) -> Option<usize> {
        let r = self.q[n];
        if r == 0 {
            None
        } else {
            Some(self.q_inv[(r - 1) as usize] as usize)
        }
    }
}

/// Build the sorting map for a key array (candidate phase values).
///
/// The sort is stable: equal keys keep their original relative order, so
/// repeated phases produce deterministic, reproducible chains.
pub fn build_sort_map(keys: &[f64]) -> Result<SortMap> {
    if keys.len() < 2 {
        return Err(Error::Invalid(format!(
            "sorting map needs at least 2 keys, got {}",
            keys.len()
        )));
    }
    if keys.len() > u32::MAX as usize {
        return Err(Error::Invalid("record exceeds u32 indexing range".into()));
    }
    if let Some(i) = keys.iter().position(|k| !k.is_finite()) {
        return Err(Error::Numerical(format!(
            "non-finite phase key at sample {i}"
        )));
    }

    // Sorting (key, original index) pairs lexicographically is equivalent to
    // a stable sort on the key alone. Finite keys admit an order-preserving
    // map onto u64 bit patterns (flip the sign bit, or all bits for
    // negatives), so packing that pattern above the index gives one integer
    // whose natural order is exactly `key, then original position` — and the
    // branch-free integer sort is markedly faster on multi-million-sample
    // records than comparing f64 pairs. Phase keys arrive in long monotone
    // stretches, which the run-detecting stable sort exploits as well.
    let mut packed: Vec<u128> = keys
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let bits = (k + 0.0).to_bits(); // −0.0 → +0.0 keeps equal keys tied
            let ord = if bits >> 63 == 1 { !bits } else { bits | 1 << 63 };
            (u128::from(ord) << 32) | i as u128
        })
        .collect();
    packed.sort();

    let mut q = vec![0u32; keys.len()];
    let mut q_inv = vec![0u32; keys.len()];
    for (r, &p) in packed.iter().enumerate() {
        let n = p as u32;
        q[n as usize] = r as u32;
        q_inv[r] = n;
    }
    Ok(SortMap { q, q_inv })
}

/// Whether a key array is strictly increasing in original order — the
/// degenerate case where sorting by key reduces to the identity and
/// phase-neighbor differences collapse onto time-neighbor differences.
pub fn is_strictly_increasing(keys: &[f64]) -> bool {
    keys.windows(2).all(|w| w[1] > w[0])
}
