//! Partial sums of the pretentious distance
//! `𝔻(φ₁, φ₂)² = Σ_p (1 − Re φ₁(p)·conj φ₂(p)) / p`.
//!
//! Only partial sums up to a displayed `P` are ever reported. Divergence can
//! be suggested by a growth profile, never decided.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mult::{DirichletCharacterSpec, MultiplicativeFunctionSpec};
use super::sieve::FactorSieve;
use super::ArithError;
use crate::phase::e;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DDistance {
    pub prime_bound: u64,
    pub primes: u64,
    /// `Σ_{p ≤ P} (1 − Re φ₁(p) conj φ₂(p)) / p`.
    pub squared: f64,
    pub distance: f64,
}

/// `1 − Re(u v̄) = |u − v|²/2 + (1 − (|u|² + |v|²)/2)`. The second part is
/// rounding noise for unimodular values and is then dropped, so equal
/// unimodular values give exactly zero.
fn term(u: Complex64, v: Complex64) -> f64 {
    let defect = 1.0 - 0.5 * (u.norm_sqr() + v.norm_sqr());
    let defect = if defect.abs() <= 8.0 * f64::EPSILON { 0.0 } else { defect };
    ((u - v).norm_sqr() * 0.5 + defect).max(0.0)
}

fn partial_sums(
    phi1: &MultiplicativeFunctionSpec,
    phi2: &MultiplicativeFunctionSpec,
    bounds: &[u64],
    sieve: &FactorSieve,
) -> Result<Vec<DDistance>, ArithError> {
    if bounds.windows(2).any(|w| w[0] > w[1]) {
        return Err(ArithError::InvalidArgument("prime bounds must be nondecreasing".into()));
    }
    let top = bounds.last().copied().unwrap_or(0);
    let primes = sieve.primes_up_to(top)?;
    let mut out = Vec::with_capacity(bounds.len());
    let mut acc = crate::sum::Neumaier::default();
    let mut idx = 0;
    for &bound in bounds {
        while idx < primes.len() && primes[idx] <= bound {
            let p = primes[idx];
            let (u, v) = (phi1.eval(p, sieve)?, phi2.eval(p, sieve)?);
            acc.add(term(u, v) / p as f64);
            idx += 1;
        }
        let squared = acc.value();
        out.push(DDistance {
            prime_bound: bound,
            primes: idx as u64,
            squared,
            distance: squared.sqrt(),
        });
    }
    Ok(out)
}

pub fn d_distance_partial(
    phi1: &MultiplicativeFunctionSpec,
    phi2: &MultiplicativeFunctionSpec,
    prime_bound: u64,
    sieve: &FactorSieve,
) -> Result<DDistance, ArithError> {
    Ok(partial_sums(phi1, phi2, &[prime_bound], sieve)?[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DDistanceProfile {
    pub points: Vec<DDistance>,
    /// Increments of `𝔻²` between consecutive bounds.
    pub increments: Vec<f64>,
    /// Every increment exceeds `growth_floor`. A trend indicator only.
    pub growing: bool,
    pub growth_floor: f64,
}

/// Partial sums at each bound of an ascending list.
pub fn d_distance_profile(
    phi1: &MultiplicativeFunctionSpec,
    phi2: &MultiplicativeFunctionSpec,
    bounds: &[u64],
    growth_floor: f64,
    sieve: &FactorSieve,
) -> Result<DDistanceProfile, ArithError> {
    let points = partial_sums(phi1, phi2, bounds, sieve)?;
    let increments: Vec<f64> = points.windows(2).map(|w| w[1].squared - w[0].squared).collect();
    Ok(DDistanceProfile {
        growing: !increments.is_empty() && increments.iter().all(|&d| d > growth_floor),
        points,
        increments,
        growth_floor,
    })
}

/// `𝔻(φχ, n^{it})` up to `P`: each prime contributes `φ(p)χ(p)p^{−it}`.
pub fn d_distance_twisted(
    phi: &MultiplicativeFunctionSpec,
    chi: &DirichletCharacterSpec,
    t: f64,
    prime_bound: u64,
    sieve: &FactorSieve,
) -> Result<DDistance, ArithError> {
    let twisted = phi.product(&MultiplicativeFunctionSpec::from_character(chi));
    d_distance_partial(&twisted, &MultiplicativeFunctionSpec::archimedean(t), prime_bound, sieve)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoAdicCheck {
    pub t: f64,
    /// `|χ(2)^k φ(2^k) + 2^{ikt}|` for `k = 1..=K`.
    pub defects: Vec<f64>,
    pub holds_up_to: Option<u32>,
    pub tolerance: f64,
}

/// Checks `χ(2)^k φ(2^k) = −2^{ikt}` for finitely many `k`. There is no finite
/// criterion, so a pass is only evidence.
pub fn two_adic_check(
    phi: &MultiplicativeFunctionSpec,
    chi: &DirichletCharacterSpec,
    t: f64,
    k_max: u32,
    tolerance: f64,
) -> TwoAdicCheck {
    let c2 = chi.eval(2);
    let defects: Vec<f64> = (1..=k_max)
        .map(|k| {
            let lhs = c2.powu(k) * phi.prime_power(2, k);
            let rhs = -e(k as f64 * t * 2f64.ln() / std::f64::consts::TAU);
            (lhs - rhs).norm()
        })
        .collect();
    let holds = defects.iter().take_while(|&&d| d <= tolerance).count() as u32;
    TwoAdicCheck {
        t,
        holds_up_to: if holds == k_max { Some(k_max) } else { None },
        defects,
        tolerance,
    }
}

/// `Σ_{p ≤ P} |φ₁(p) − φ₂(p)|² / (2p)`, equal to the partial `𝔻²` when both
/// functions are unimodular on primes.
pub fn unimodular_partial(
    phi1: &MultiplicativeFunctionSpec,
    phi2: &MultiplicativeFunctionSpec,
    prime_bound: u64,
    sieve: &FactorSieve,
) -> Result<f64, ArithError> {
    let mut acc = crate::sum::Neumaier::default();
    for p in sieve.primes_up_to(prime_bound)? {
        let d: Complex64 = phi1.eval(p, sieve)? - phi2.eval(p, sieve)?;
        acc.add(d.norm_sqr() / (2.0 * p as f64));
    }
    Ok(acc.value())
}
