//! Spike and burst counting for regime classification.
//!
//! The generator's y component alternates long quiescent stretches with
//! short bursts of one or more spikes; the number of spikes per burst is
//! the fingerprint that distinguishes the experimental regimes. Spikes are
//! threshold upward crossings; spikes closer together than a gap duration
//! belong to the same burst.

use crate::error::{Error, Result};
use crate::series::TimeSeries;

// ── counting ────────────────────────────────────────────────────────────────

/// Count spikes per burst in `y`.
///
/// A spike is an upward crossing of `spike_threshold` (defaults to the
/// midpoint between the global minimum and maximum). Spikes separated by
/// less than `burst_gap` time units fall into the same burst; the gap
/// defaults to 5× the median inter-spike interval. Returns one count per
/// burst in temporal order; a series with no crossing yields an empty list.
pub fn count_spikes_per_burst(
    y: &TimeSeries,
    spike_threshold: Option<f64>,
    burst_gap: Option<f64>,
) -> Result<Vec<usize>> {
    if y.is_empty() {
        return Err(Error::Invalid("spike counting needs a non-empty series".into()));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &y.values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let threshold = match spike_threshold {
        Some(thr) => {
            if thr < lo || thr > hi {
                return Err(Error::Invalid(format!(
                    "spike threshold {thr} outside series range [{lo}, {hi}]"
                )));
            }
            thr
        }
        None => 0.5 * (lo + hi),
    };
    if let Some(g) = burst_gap {
        if !(g > 0.0) {
            return Err(Error::Invalid(format!("burst gap must be > 0, got {g}")));
        }
    }

    // Spike = first sample at or above threshold after one below it.
    let mut spike_times = Vec::new();
    for i in 1..y.len() {
        if y.values[i - 1] < threshold && y.values[i] >= threshold {
            spike_times.push(y.time_at(i));
        }
    }
    if spike_times.is_empty() {
        return Ok(Vec::new());
    }
    if spike_times.len() == 1 {
        return Ok(vec![1]);
    }

    let gap = match burst_gap {
        Some(g) => g,
        None => {
            let mut intervals: Vec<f64> = spike_times.windows(2).map(|w| w[1] - w[0]).collect();
            intervals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mid = intervals.len() / 2;
            let median = if intervals.len() % 2 == 1 {
                intervals[mid]
            } else {
                0.5 * (intervals[mid - 1] + intervals[mid])
            };
            5.0 * median
        }
    };

    let mut counts = vec![1usize];
    for w in spike_times.windows(2) {
        if w[1] - w[0] < gap {
            *counts.last_mut().unwrap() += 1;
        } else {
            counts.push(1);
        }
    }
    Ok(counts)
}
