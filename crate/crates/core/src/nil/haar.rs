//! Haar integrals by the midpoint rule and Weyl-sum equidistribution reports.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::system::NilsystemSpec;
use super::NilError;
use crate::budget::{pow, Limits};
use crate::phase::IntLinComb;
use crate::sum::det_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarEstimate {
    /// Midpoint rule at resolution `2Q`.
    pub value: Complex64,
    /// Midpoint rule at resolution `Q`.
    pub coarse: Complex64,
    /// `|value − coarse|`.
    pub error_estimate: f64,
    pub resolution: usize,
}

/// Tensor midpoint rule for `f` on `[0,1)^dim` with `q` points per axis.
pub fn midpoint_rule<F>(dim: usize, q: usize, f: F) -> Complex64
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let total = pow(q as u64, dim as u64);
    let h = 1.0 / q as f64;
    det_sum(total, |i| {
        let mut p = [0.0f64; 16];
        let mut rest = i;
        for j in (0..dim).rev() {
            p[j] = ((rest % q as u64) as f64 + 0.5) * h;
            rest /= q as u64;
        }
        f(&p[..dim])
    }) / total as f64
}

fn midpoint_pair<F>(dim: usize, q: usize, limits: &Limits, f: F) -> Result<HaarEstimate, NilError>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    if dim > 16 {
        return Err(NilError::InvalidSpec("quadrature supports at most 16 coordinates".into()));
    }
    let work = pow(2 * q as u64, dim as u64);
    if work > limits.max_work {
        return Err(NilError::BudgetExceeded {
            work,
            max: limits.max_work,
        });
    }
    let coarse = midpoint_rule(dim, q, &f);
    let value = midpoint_rule(dim, 2 * q, &f);
    Ok(HaarEstimate {
        value,
        coarse,
        error_estimate: (value - coarse).norm(),
        resolution: 2 * q,
    })
}

/// `∫_X Ψ dm_X` over the fundamental domain, with a `Q` vs `2Q` error estimate.
pub fn haar_integral(spec: &NilsystemSpec, limits: &Limits) -> Result<HaarEstimate, NilError> {
    midpoint_pair(spec.space_dim(), spec.quadrature, limits, |p| spec.observe(p))
}

/// `∫_X Ψ(τ·x) dm_X(x)` for a Heisenberg translation `τ` acting on the left.
pub fn haar_integral_translated(
    spec: &NilsystemSpec,
    tau: &super::HeisenbergElement,
    limits: &Limits,
) -> Result<HaarEstimate, NilError> {
    if spec.space_dim() != 3 {
        return Err(NilError::InvalidSpec("left translation needs the Heisenberg quotient".into()));
    }
    midpoint_pair(3, spec.quadrature, limits, |p| {
        let g = tau.mul(&super::HeisenbergElement::new(p[0], p[1], p[2]));
        let (r, _) = g.reduce_fundamental();
        spec.observe(&[r.x, r.y, r.z])
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquidistributionReport {
    pub horizon: u64,
    pub cutoff: u64,
    /// Nonzero horizontal frequencies checked (one of each `±k` pair).
    pub frequencies: usize,
    /// `max_k |N⁻¹ Σ_{n≤N} e(k·π(orbit_n))|`.
    pub max_weyl: f64,
    pub worst_frequency: Vec<i64>,
    /// The same maximum at horizon `⌊N/2⌋`.
    pub max_weyl_half: f64,
    pub orbit_mean: Complex64,
    pub haar: Complex64,
    /// `|N⁻¹ Σ Ψ(orbit_n) − ∫Ψ|`.
    pub observable_gap: f64,
    pub observable_gap_half: f64,
}

/// Nonzero `k ∈ Z^dim` with `‖k‖₁ ≤ cutoff` and first nonzero entry positive.
pub fn half_frequency_set(dim: usize, cutoff: u64) -> Vec<Vec<i64>> {
    let k = cutoff as i64;
    let side = (2 * k + 1) as u64;
    let mut out = Vec::new();
    for idx in 0..pow(side, dim as u64) {
        let mut rest = idx;
        let mut v = vec![0i64; dim];
        for j in (0..dim).rev() {
            v[j] = (rest % side) as i64 - k;
            rest /= side;
        }
        let l1: i64 = v.iter().map(|c| c.abs()).sum();
        if l1 == 0 || l1 > k {
            continue;
        }
        if v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
            out.push(v);
        }
    }
    out
}

/// Weyl sums along the diagonal orbit `n ↦ τ_1^n···τ_d^n·e_X`, `1 ≤ n ≤ N`.
pub fn equidistribution_report(
    spec: &NilsystemSpec,
    horizon: u64,
    cutoff: u64,
    limits: &Limits,
) -> Result<EquidistributionReport, NilError> {
    if horizon < 2 {
        return Err(NilError::InvalidSpec("horizon must be at least 2".into()));
    }
    let hd = spec.horizontal_dim();
    let work = horizon.saturating_mul(pow(2 * cutoff + 1, hd as u64));
    if work > limits.max_work || horizon > limits.max_sample_points {
        return Err(NilError::BudgetExceeded {
            work,
            max: limits.max_work,
        });
    }
    let d = spec.arity();
    let orbit: Vec<(Vec<f64>, Complex64)> = (1..=horizon as i64)
        .into_par_iter()
        .map(|n| {
            let p = spec.orbit_point(&vec![n; d])?;
            let v = spec.observe(&p);
            Ok((p[..hd].to_vec(), v))
        })
        .collect::<Vec<Result<_, NilError>>>()
        .into_iter()
        .collect::<Result<_, _>>()?;
    let half = horizon / 2;
    let weyl = |k: &[i64], len: u64| {
        (det_sum(len, |i| {
            let mut c = IntLinComb::new();
            for (&kj, &x) in k.iter().zip(&orbit[i as usize].0) {
                c.push(kj as i128, x);
            }
            c.phase()
        }) / len as f64)
            .norm()
    };
    let freqs = half_frequency_set(hd, cutoff);
    let sums: Vec<(f64, f64)> = freqs
        .par_iter()
        .map(|k| (weyl(k, horizon), weyl(k, half)))
        .collect();
    let mut max_weyl = 0.0;
    let mut max_weyl_half = 0.0;
    let mut worst = vec![0; hd];
    for (k, &(full, h)) in freqs.iter().zip(&sums) {
        if full > max_weyl {
            max_weyl = full;
            worst = k.clone();
        }
        max_weyl_half = f64::max(max_weyl_half, h);
    }
    let haar = spec.exact_haar();
    let mean = |len: u64| det_sum(len, |i| orbit[i as usize].1) / len as f64;
    let orbit_mean = mean(horizon);
    Ok(EquidistributionReport {
        horizon,
        cutoff,
        frequencies: freqs.len(),
        max_weyl,
        worst_frequency: worst,
        max_weyl_half,
        orbit_mean,
        haar,
        observable_gap: (orbit_mean - haar).norm(),
        observable_gap_half: (mean(half) - haar).norm(),
    })
}
