//! Averages of multiplicative functions along progressions and against
//! linear phases.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mult::MultiplicativeFunctionSpec;
use super::sieve::FactorSieve;
use super::ArithError;
use crate::phase::{e, frac_mul};
use crate::sum::try_det_sum;

fn end_point(a: u64, b: u64, horizon: u64, sieve: &FactorSieve) -> Result<(), ArithError> {
    let top = a
        .checked_mul(horizon)
        .and_then(|x| x.checked_add(b))
        .ok_or_else(|| ArithError::InvalidArgument("aN + b overflows".into()))?;
    if top > sieve.limit() {
        return Err(ArithError::SieveRange { n: top, limit: sieve.limit() });
    }
    Ok(())
}

/// `(1/N) Σ_{n=1}^{N} φ(an + b)`.
pub fn ap_average(
    phi: &MultiplicativeFunctionSpec,
    a: u64,
    b: u64,
    horizon: u64,
    sieve: &FactorSieve,
) -> Result<Complex64, ArithError> {
    if a == 0 || horizon == 0 {
        return Err(ArithError::InvalidArgument("a and N must be positive".into()));
    }
    end_point(a, b, horizon, sieve)?;
    let s = try_det_sum(horizon, |i| phi.eval(a * (i + 1) + b, sieve))?;
    Ok(s / horizon as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApEntry {
    pub a: u64,
    pub b: u64,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApScan {
    pub horizon: u64,
    pub entries: Vec<ApEntry>,
    pub max_modulus: f64,
    pub argmax: (u64, u64),
}

/// `ap_average` for all `1 ≤ a ≤ A_max`, `0 ≤ b < a`, in that order.
pub fn aperiodicity_scan(
    phi: &MultiplicativeFunctionSpec,
    a_max: u64,
    horizon: u64,
    sieve: &FactorSieve,
) -> Result<ApScan, ArithError> {
    if a_max == 0 {
        return Err(ArithError::InvalidArgument("A_max must be positive".into()));
    }
    end_point(a_max, a_max - 1, horizon, sieve)?;
    let pairs: Vec<(u64, u64)> = (1..=a_max).flat_map(|a| (0..a).map(move |b| (a, b))).collect();
    let entries = pairs
        .par_iter()
        .map(|&(a, b)| {
            let v = ap_average(phi, a, b, horizon, sieve)?;
            Ok(ApEntry { a, b, re: v.re, im: v.im, modulus: v.norm() })
        })
        .collect::<Result<Vec<_>, ArithError>>()?;
    let best = entries
        .iter()
        .fold(&entries[0], |m, x| if x.modulus > m.modulus { x } else { m });
    Ok(ApScan {
        horizon,
        max_modulus: best.modulus,
        argmax: (best.a, best.b),
        entries,
    })
}

/// `(1/N) Σ_{n=1}^{N} φ(n) e(nα)`, with `nα` reduced exactly.
pub fn twisted_average(
    phi: &MultiplicativeFunctionSpec,
    alpha: f64,
    horizon: u64,
    sieve: &FactorSieve,
) -> Result<Complex64, ArithError> {
    if horizon == 0 {
        return Err(ArithError::InvalidArgument("N must be positive".into()));
    }
    end_point(1, 0, horizon, sieve)?;
    let s = try_det_sum(horizon, |i| {
        let n = i + 1;
        Ok::<_, ArithError>(phi.eval(n, sieve)? * e(frac_mul(n as i128, alpha)))
    })?;
    Ok(s / horizon as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayTrend {
    pub horizons: Vec<u64>,
    pub moduli: Vec<f64>,
    /// Each modulus is strictly below the previous one.
    pub decreasing: bool,
}

/// `|average(N)|` over ascending horizons.
pub fn decay_trend<F>(horizons: &[u64], mut average: F) -> Result<DecayTrend, ArithError>
where
    F: FnMut(u64) -> Result<Complex64, ArithError>,
{
    let moduli = horizons
        .iter()
        .map(|&n| average(n).map(|v| v.norm()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DecayTrend {
        horizons: horizons.to_vec(),
        decreasing: moduli.windows(2).all(|w| w[1] < w[0]),
        moduli,
    })
}
