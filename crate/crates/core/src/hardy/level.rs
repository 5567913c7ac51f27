//! Level sets `{n ≤ N : ‖f(n)‖ ∈ [a, b]}` and weighted averages
//! `N⁻¹ Σ e(f(n)) e(knα)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::function::HardyFunctionSpec;
use super::HardyError;
use crate::budget::Limits;
use crate::phase::{e, frac_mul};
use crate::seqcore::{ComplexSeqNd, SeqError};
use crate::sum::try_det_sum;

/// First integer in the domain of `f`.
pub(crate) fn first_index(f: &HardyFunctionSpec) -> u64 {
    f.t0().ceil().max(1.0) as u64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    pub lower: f64,
    pub upper: f64,
    pub horizon: u64,
    pub members: Vec<u64>,
    pub density: f64,
    /// Lebesgue measure of `{t : ‖t‖ ∈ [a, b]}`, i.e. `2(b − a)`.
    pub measure: f64,
    pub fractional_digits: f64,
}

/// Members are `n ≤ N` in the domain of `f`; the density divides by `N`.
pub fn level_set(
    f: &HardyFunctionSpec,
    lower: f64,
    upper: f64,
    horizon: u64,
    limits: &Limits,
) -> Result<LevelSet, HardyError> {
    if !(0.0 <= lower && lower <= upper && upper <= 0.5) {
        return Err(HardyError::InvalidInterval(format!(
            "need 0 ≤ a ≤ b ≤ 1/2, got [{lower}, {upper}]"
        )));
    }
    if horizon == 0 {
        return Err(HardyError::InvalidInterval("N must be positive".into()));
    }
    if horizon > limits.max_sample_points {
        return Err(HardyError::BudgetExceeded { work: horizon, max: limits.max_sample_points });
    }
    let budget = f.check_horizon(horizon)?;
    let start = first_index(f);
    let flags = (start..=horizon)
        .into_par_iter()
        .map(|n| {
            let x = f.frac_at(n)?;
            let d = x.min(1.0 - x);
            Ok(lower <= d && d <= upper)
        })
        .collect::<Result<Vec<bool>, HardyError>>()?;
    let members: Vec<u64> = flags
        .iter()
        .zip(start..)
        .filter_map(|(&m, n)| m.then_some(n))
        .collect();
    Ok(LevelSet {
        lower,
        upper,
        horizon,
        density: members.len() as f64 / horizon as f64,
        members,
        measure: 2.0 * (upper - lower),
        fractional_digits: budget.fractional_digits,
    })
}

/// `N⁻¹ Σ_{t₀ ≤ n ≤ N} e(f(n)) e(knα)`.
pub fn hardy_weighted_average(
    f: &HardyFunctionSpec,
    k: i64,
    alpha: f64,
    horizon: u64,
) -> Result<Complex64, HardyError> {
    if horizon == 0 {
        return Err(HardyError::InvalidInterval("N must be positive".into()));
    }
    f.check_horizon(horizon)?;
    let start = first_index(f);
    if start > horizon {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let len = horizon - start + 1;
    let s = try_det_sum(len, |i| {
        let n = start + i;
        let lin = frac_mul(k as i128 * n as i128, alpha);
        Ok::<_, HardyError>(e((f.frac_at(n)? + lin).fract()))
    })?;
    Ok(s / horizon as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub k: i64,
    pub horizon: u64,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

/// [`hardy_weighted_average`] over all `(k, N)` pairs, `k` outermost.
pub fn weighted_decay_table(
    f: &HardyFunctionSpec,
    alpha: f64,
    ks: &[i64],
    horizons: &[u64],
) -> Result<Vec<DecayRow>, HardyError> {
    let mut rows = Vec::with_capacity(ks.len() * horizons.len());
    for &k in ks {
        for &n in horizons {
            let v = hardy_weighted_average(f, k, alpha, n)?;
            rows.push(DecayRow { k, horizon: n, re: v.re, im: v.im, modulus: v.norm() });
        }
    }
    Ok(rows)
}

/// `w(n) = e(Σ_i f_i(n_i))` as a sequence on `Z^d`.
pub fn hardy_sequence(fs: &[HardyFunctionSpec]) -> Result<ComplexSeqNd, HardyError> {
    if fs.is_empty() {
        return Err(HardyError::InvalidSpec("need at least one function".into()));
    }
    let fs = fs.to_vec();
    Ok(ComplexSeqNd::fallible(fs.len(), 1.0, move |n| {
        let mut total = 0.0;
        for (f, &m) in fs.iter().zip(n) {
            let m = u64::try_from(m).map_err(|_| SeqError::Evaluation(format!("n = {m} is negative")))?;
            total += f.frac_at(m).map_err(|e| SeqError::Evaluation(e.to_string()))?;
        }
        Ok(e(total.fract()))
    })
    .with_label("hardy weight"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::dist_to_int;

    fn t32() -> HardyFunctionSpec {
        HardyFunctionSpec::power(1.0, 1.5).unwrap()
    }

    #[test]
    fn full_and_empty_ranges() {
        let l = Limits::default();
        let s = level_set(&t32(), 0.0, 0.5, 1000, &l).unwrap();
        assert_eq!(s.members.len(), 999);
        assert!((s.density - 0.999).abs() < 1e-15);
        let s = level_set(&t32(), 0.3, 0.3, 100_000, &l).unwrap();
        assert!(s.density < 1e-3);
        assert!(level_set(&t32(), 0.3, 0.6, 10, &l).is_err());
    }

    #[test]
    fn members_match_direct_check() {
        let s = level_set(&t32(), 0.25, 0.5, 20_000, &Limits::default()).unwrap();
        let direct: Vec<u64> = (2..=20_000u64)
            .filter(|&n| {
                let v = (n as f64).powf(1.5);
                let d = dist_to_int(v);
                (0.25..=0.5).contains(&d)
            })
            .collect();
        // Doubles carry ~10 fractional digits here; boundary cases may differ.
        let diff = s.members.len().abs_diff(direct.len());
        assert!(diff <= 2, "{diff}");
        assert!(s.members.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn averages_match_direct_sums() {
        let f = t32();
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        for k in 0..3 {
            let v = hardy_weighted_average(&f, k, alpha, 20_000).unwrap();
            let oracle: Complex64 = (2..=20_000u64)
                .map(|n| {
                    let x = n as f64;
                    e((x * x.sqrt()).fract() + (k as f64 * x * alpha).fract())
                })
                .sum::<Complex64>()
                / 20_000.0;
            assert!((v - oracle).norm() < 1e-8);
        }
        let rows = weighted_decay_table(&f, alpha, &[0, 1], &[100, 1000]).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[2].k, rows[2].horizon), (1, 100));
    }

    #[test]
    fn sequence_view() {
        let w = hardy_sequence(&[t32(), HardyFunctionSpec::power(0.5, 1.0).unwrap()]).unwrap();
        // e(8 + 4.5) at (4, 9).
        assert!((w.eval(&[4, 9]).unwrap() + 1.0).norm() < 1e-14);
        assert!(w.eval(&[1, 9]).is_err());
    }
}
