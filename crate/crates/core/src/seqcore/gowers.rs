//! Gowers `U^s(Z_N^d)` norms.
//!
//! The cube path works with the powers `G_s = ‖f‖_{U^s}^{2^s}`:
//! `G_1(f) = |E f|²` and `G_{s+1}(f) = E_h G_s(f·f̄_h)`, each a mean of
//! nonnegative reals. The `U²` spectral path uses
//! `‖f‖_{U²}⁴ = N^{-4d} Σ_ξ |f̂(ξ)|⁴` with the unnormalized transform
//! `f̂(ξ) = Σ_n f(n) e(−n·ξ/N)`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{unflatten, FiniteGridFn, SeqError};
use crate::budget::{pow, Limits};
use crate::sum::{compensated, det_sum, det_sum_real, Neumaier};

fn power_cube(values: &[Complex64], f: &FiniteGridFn, s: usize) -> f64 {
    if s == 1 {
        let mean = compensated(values.iter().copied()) / values.len() as f64;
        return mean.norm_sqr();
    }
    let len = values.len();
    let mut h = vec![0usize; f.arity()];
    let mut deriv = vec![Complex64::default(); len];
    let mut acc = Neumaier::default();
    for hf in 0..len {
        unflatten(hf, f.modulus(), &mut h);
        for (i, slot) in deriv.iter_mut().enumerate() {
            *slot = values[i] * values[f.shifted_index(i, &h)].conj();
        }
        acc.add(power_cube(&deriv, f, s - 1));
    }
    acc.value() / len as f64
}

/// `‖f‖_{U^s(Z_N^d)}` by the inductive cube definition.
///
/// Costs about `N^{d s}` operations; the check uses the larger
/// `N^{d(s+1)}` against `limits.gowers_budget`.
pub fn gowers_norm(f: &FiniteGridFn, s: usize, limits: &Limits) -> Result<f64, SeqError> {
    if s == 0 || s > 16 {
        return Err(SeqError::InvalidParameter(format!("Gowers order s = {s} must lie in 1..=16")));
    }
    let work = pow(f.len() as u64, s as u64 + 1);
    if work > limits.gowers_budget {
        return Err(SeqError::GowersBudgetExceeded {
            work,
            max: limits.gowers_budget,
        });
    }
    let g = if s == 1 {
        power_cube(f.values(), f, 1)
    } else {
        // Outer shift loop in parallel with a deterministic reduction.
        let total = det_sum_real(f.len() as u64, |hf| {
            let mut h = vec![0usize; f.arity()];
            unflatten(hf as usize, f.modulus(), &mut h);
            let deriv = f.multiplicative_derivative(&h);
            power_cube(deriv.values(), f, s - 1)
        });
        total / f.len() as f64
    };
    Ok(g.max(0.0).powf(1.0 / (1u64 << s) as f64))
}

/// In-place unnormalized DFT of a dense `Z_N^d` array along every axis.
pub(crate) fn fft_nd(values: &mut [Complex64], modulus: usize, arity: usize) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(modulus);
    let mut line = vec![Complex64::default(); modulus];
    for axis in 0..arity {
        let stride = modulus.pow((arity - 1 - axis) as u32);
        let block = stride * modulus;
        for start in 0..values.len() {
            if (start % block) / stride != 0 {
                continue;
            }
            for (j, slot) in line.iter_mut().enumerate() {
                *slot = values[start + j * stride];
            }
            fft.process(&mut line);
            for (j, v) in line.iter().enumerate() {
                values[start + j * stride] = *v;
            }
        }
    }
}

/// `‖f‖_{U²(Z_N^d)}` through the Fourier transform.
pub fn gowers_u2_spectral(f: &FiniteGridFn) -> f64 {
    let mut spec = f.values().to_vec();
    fft_nd(&mut spec, f.modulus(), f.arity());
    // Scale before raising to the fourth power to stay far from overflow.
    let scale = 1.0 / f.len() as f64;
    let mut acc = Neumaier::default();
    for z in &spec {
        let m = (z * scale).norm_sqr();
        acc.add(m * m);
    }
    acc.value().max(0.0).powf(0.25)
}

/// Both sides of the identity `|E_n a(n)|² = E_h E_n a(n+h) ā(n)`, plus the
/// right side of the inequality `E_h |E_n a(n+h) ā(n)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VanDerCorputSides {
    pub lhs: f64,
    pub rhs: Complex64,
    pub rhs_abs: f64,
}

pub fn van_der_corput_sides(
    f: &FiniteGridFn,
    limits: &Limits,
) -> Result<VanDerCorputSides, SeqError> {
    let len = f.len() as u64;
    let work = len.saturating_mul(len);
    if work > limits.gowers_budget {
        return Err(SeqError::GowersBudgetExceeded {
            work,
            max: limits.gowers_budget,
        });
    }
    let lhs = f.mean().norm_sqr();
    let inner = |hf: u64| {
        let mut h = vec![0usize; f.arity()];
        unflatten(hf as usize, f.modulus(), &mut h);
        let vals = f.values();
        compensated((0..vals.len()).map(|i| vals[f.shifted_index(i, &h)] * vals[i].conj()))
            / len as f64
    };
    let rhs = det_sum(len, inner) / len as f64;
    let rhs_abs = det_sum_real(len, |hf| inner(hf).norm()) / len as f64;
    Ok(VanDerCorputSides { lhs, rhs, rhs_abs })
}
