use serde::{Deserialize, Serialize};

/// Work and memory caps shared by the budgeted operations.
///
/// Every field counts elementary evaluations (or points), not bytes, except
/// `max_sample_points` which bounds dense sample buffers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Maximum number of points in a single averaging window.
    pub max_window_points: u64,
    /// Maximum number of shift tuples `H^{dk}` in a uniformity estimate.
    pub max_shift_tuples: u64,
    /// Maximum number of multiply-adds for cube-path Gowers norms, `N^{d(s+1)}`.
    pub gowers_budget: u64,
    /// Generic cap on elementary evaluations for the heavier loops.
    pub max_work: u64,
    /// Largest dense sample buffer built to speed up repeated evaluation.
    pub max_sample_points: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_window_points: 1_000_000_000,
            max_shift_tuples: 1 << 26,
            gowers_budget: 1 << 30,
            max_work: 1 << 36,
            max_sample_points: 1 << 24,
        }
    }
}

impl Limits {
    pub fn unlimited() -> Self {
        Self {
            max_window_points: u64::MAX,
            max_shift_tuples: u64::MAX,
            gowers_budget: u64::MAX,
            max_work: u64::MAX,
            max_sample_points: 1 << 26,
        }
    }
}

/// Saturating product of a list of counts.
pub(crate) fn product(parts: impl IntoIterator<Item = u64>) -> u64 {
    parts.into_iter().fold(1u64, |acc, x| acc.saturating_mul(x))
}

/// Saturating integer power.
pub(crate) fn pow(base: u64, exp: u64) -> u64 {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
        if acc == u64::MAX {
            break;
        }
    }
    acc
}
