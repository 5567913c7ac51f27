//! Trigonometric polynomials `P₁, P₂` without constant term such that
//! `P₁ − ε ≤ 1_{[c,d]} − (d − c) ≤ P₂ + ε` on the circle.
//!
//! `P₂` is the Fejér mean of the indicator of `[c − δ, d + δ]` minus its mean,
//! `P₁` the same for `[c + δ, d − δ]`. With `δ = ε/4` the Fejér tail
//! `∫_{δ<|t|≤1/2} F_D ≤ 1/(2(D+1)δ)` is at most `ε/2` once
//! `D + 1 ≥ ⌈4/ε²⌉`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::HardyError;
use crate::budget::Limits;
use crate::phase::e;

pub const DEFAULT_DEGREE_CAP: u64 = 4096;
/// Grid points per unit of degree in the verification.
pub const GRID_FACTOR: u64 = 10_000;
pub const SANDWICH_TOL: f64 = 1e-12;

/// `P(t) = Σ_{k=1}^{D} 2 Re(c_k e(kt))`, real-valued.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    /// `c_1, …, c_D`.
    pub coeffs: Vec<Complex64>,
}

impl TrigPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0)).map_or(0, |i| i + 1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let z = e(t);
        let mut w = z;
        let mut acc = 0.0;
        for c in &self.coeffs {
            acc += 2.0 * (c * w).re;
            w *= z;
        }
        acc
    }

    /// Values at `j/m`, `0 ≤ j < m`, by one inverse FFT.
    pub fn eval_grid(&self, m: usize) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for (k, c) in self.coeffs.iter().enumerate() {
            let k = k + 1;
            buf[k % m] += c;
            buf[(m - k % m) % m] += c.conj();
        }
        FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }
}

/// Fejér-weighted Fourier coefficients of `1_{[u, v]}` for `k = 1..=D`.
fn fejer_indicator(u: f64, v: f64, degree: usize) -> TrigPolynomial {
    if v - u >= 1.0 || v <= u {
        return TrigPolynomial { coeffs: vec![Complex64::new(0.0, 0.0); degree] };
    }
    let coeffs = (1..=degree)
        .map(|k| {
            let kf = k as f64;
            let hat = (e(-kf * u) - e(-kf * v)) / Complex64::new(0.0, TAU * kf);
            hat * (1.0 - kf / (degree as f64 + 1.0))
        })
        .collect();
    TrigPolynomial { coeffs }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub lower: TrigPolynomial,
    pub upper: TrigPolynomial,
    pub c: f64,
    pub d: f64,
    pub epsilon: f64,
    pub degree: usize,
    pub delta: f64,
    pub grid_points: usize,
    /// `min (1_I − (d−c)) − (P₁ − ε)` over the grid.
    pub lower_margin: f64,
    /// `min (P₂ + ε) − (1_I − (d−c))` over the grid.
    pub upper_margin: f64,
}

pub fn sandwich_degree(epsilon: f64) -> u64 {
    (4.0 / (epsilon * epsilon)).ceil() as u64 - 1
}

pub fn fejer_sandwich(c: f64, d: f64, epsilon: f64, limits: &Limits) -> Result<Sandwich, HardyError> {
    fejer_sandwich_capped(c, d, epsilon, DEFAULT_DEGREE_CAP, limits)
}

pub fn fejer_sandwich_capped(
    c: f64,
    d: f64,
    epsilon: f64,
    degree_cap: u64,
    limits: &Limits,
) -> Result<Sandwich, HardyError> {
    if !(0.0 <= c && c < d && d <= 1.0) {
        return Err(HardyError::InvalidInterval(format!("need 0 ≤ c < d ≤ 1, got [{c}, {d}]")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(HardyError::InvalidInterval("epsilon must be positive".into()));
    }
    let width = d - c;
    let delta = epsilon / 4.0;
    let full = width >= 1.0;
    let degree = if full { 0 } else { sandwich_degree(epsilon.min(1.0)) };
    if degree > degree_cap {
        return Err(HardyError::DegreeCap { degree, cap: degree_cap });
    }
    let grid = (GRID_FACTOR * degree.max(1)) as usize;
    if grid as u64 > limits.max_sample_points {
        return Err(HardyError::BudgetExceeded { work: grid as u64, max: limits.max_sample_points });
    }
    let degree = degree as usize;
    let upper = fejer_indicator(c - delta, d + delta, degree);
    let lower = if width > 2.0 * delta {
        fejer_indicator(c + delta, d - delta, degree)
    } else {
        TrigPolynomial { coeffs: vec![Complex64::new(0.0, 0.0); degree] }
    };

    let lo_vals = lower.eval_grid(grid);
    let up_vals = upper.eval_grid(grid);
    let mut lower_margin = f64::INFINITY;
    let mut upper_margin = f64::INFINITY;
    for j in 0..grid {
        let t = j as f64 / grid as f64;
        let ind = if full || (c <= t && t <= d) { 1.0 } else { 0.0 };
        let centered = ind - width.min(1.0);
        let lm = centered - (lo_vals[j] - epsilon);
        let um = up_vals[j] + epsilon - centered;
        lower_margin = lower_margin.min(lm);
        upper_margin = upper_margin.min(um);
        if lm < -SANDWICH_TOL || um < -SANDWICH_TOL {
            return Err(HardyError::SandwichViolation { t, gap: lm.min(um) });
        }
    }
    Ok(Sandwich {
        lower,
        upper,
        c,
        d,
        epsilon,
        degree,
        delta,
        grid_points: grid,
        lower_margin,
        upper_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_circle_needs_nothing() {
        let s = fejer_sandwich(0.0, 1.0, 0.05, &Limits::default()).unwrap();
        assert_eq!(s.lower.degree(), 0);
        assert_eq!(s.upper.degree(), 0);
    }

    #[test]
    fn standard_case() {
        let s = fejer_sandwich(0.2, 0.4, 0.1, &Limits::default()).unwrap();
        assert_eq!(s.degree, 399);
        // D ≤ ⌈C/ε⌉ with C = 40 at this ε, and D ≤ ⌈4/ε²⌉ in general.
        assert!(s.degree as f64 <= (40.0f64 / 0.1).ceil());
        assert!(s.degree as f64 <= (4.0f64 / 0.01).ceil());
        assert!(s.lower_margin >= -SANDWICH_TOL && s.upper_margin >= -SANDWICH_TOL);
        assert_eq!(s.grid_points, 3_990_000);
    }

    #[test]
    fn grid_fft_matches_direct_evaluation() {
        let s = fejer_sandwich(0.13, 0.71, 0.3, &Limits::default()).unwrap();
        let vals = s.upper.eval_grid(997);
        for j in (0..997).step_by(37) {
            assert!((vals[j] - s.upper.eval(j as f64 / 997.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn sandwich_brackets_sample_densities() {
        // Averaging the inequality over samples brackets the empirical
        // density within the averages of P₁, P₂ and ε.
        let (c, d, eps) = (0.2, 0.4, 0.1);
        let s = fejer_sandwich(c, d, eps, &Limits::default()).unwrap();
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        let n = 5000;
        let pts: Vec<f64> = (1..=n).map(|m| (m as f64 * alpha).fract()).collect();
        let dens = pts.iter().filter(|&&t| c <= t && t <= d).count() as f64 / n as f64;
        let p1: f64 = pts.iter().map(|&t| s.lower.eval(t)).sum::<f64>() / n as f64;
        let p2: f64 = pts.iter().map(|&t| s.upper.eval(t)).sum::<f64>() / n as f64;
        assert!(p1 - eps <= dens - (d - c) + 1e-12);
        assert!(dens - (d - c) <= p2 + eps + 1e-12);
    }

    #[test]
    fn caps() {
        assert!(matches!(
            fejer_sandwich_capped(0.2, 0.4, 0.1, 100, &Limits::default()),
            Err(HardyError::DegreeCap { degree: 399, cap: 100 })
        ));
        assert!(matches!(
            fejer_sandwich(0.2, 0.4, 0.045, &Limits::default()),
            Err(HardyError::BudgetExceeded { .. })
        ));
        assert!(fejer_sandwich(0.4, 0.2, 0.1, &Limits::default()).is_err());
    }
}
