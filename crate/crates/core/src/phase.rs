//! Phases `e(x) = exp(2πix)` and exact reduction of integer multiples mod 1.
//!
//! Orbits of rotations and unipotent maps produce phases `m·v` with a large
//! integer `m` and a double `v`. Forming `m as f64 * v` first loses the
//! fractional digits, so [`frac_mul`] reduces the exact product of `m` with
//! the binary value of `v` instead.

use num_complex::Complex64;
use std::f64::consts::TAU;

/// `e(x) = exp(2πix)`, with `x` reduced mod 1 before the trigonometry.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let t = x - x.floor();
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Distance to the nearest integer, `‖x‖`.
#[inline]
pub fn dist_to_int(x: f64) -> f64 {
    let f = frac(x);
    f.min(1.0 - f)
}

/// Splits a finite double into `(negative, mantissa, exponent)` with
/// `|v| = mantissa · 2^exponent`.
fn decompose(v: f64) -> (bool, u64, i32) {
    let bits = v.to_bits();
    let neg = bits >> 63 == 1;
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac_bits = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 {
        (neg, frac_bits, -1074)
    } else {
        (neg, frac_bits | (1u64 << 52), exp_bits - 1075)
    }
}

/// Exact `frac(m · v)` for an integer `m` and the exact binary value of `v`.
///
/// The only rounding is the final conversion of the reduced numerator to a
/// double. Falls back to plain double arithmetic only when `v` is below
/// `2^-75` and `|m| ≥ 2^74`, where the product is itself far below one ulp of
/// the result.
pub fn frac_mul(m: i128, v: f64) -> f64 {
    if m == 0 || v == 0.0 || !v.is_finite() {
        return 0.0;
    }
    let (neg_v, mant, exp) = decompose(v);
    if exp >= 0 {
        return 0.0;
    }
    let shift = (-exp) as u32;
    let neg = neg_v ^ (m < 0);
    let m_abs = m.unsigned_abs();
    let reduced = if shift <= 127 {
        let modulus_mask = (1u128 << shift) - 1;
        let numer = (m_abs & modulus_mask).wrapping_mul(mant as u128) & modulus_mask;
        numer as f64 / (shift as f64).exp2()
    } else {
        match m_abs.checked_mul(mant as u128) {
            Some(p) => frac((p as f64) * 2f64.powi(-(shift as i32).min(1074))),
            None => frac(m_abs as f64 * v.abs()),
        }
    };
    let r = if neg && reduced != 0.0 { 1.0 - reduced } else { reduced };
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// An integer linear combination `Σ c_i v_i` of doubles, reduced mod 1
/// exactly term by term.
#[derive(Debug, Clone, Default)]
pub struct IntLinComb {
    terms: Vec<(i128, f64)>,
}

impl IntLinComb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, coeff: i128, value: f64) -> &mut Self {
        if coeff != 0 && value != 0.0 {
            self.terms.push((coeff, value));
        }
        self
    }

    pub fn extend(&mut self, other: &IntLinComb) -> &mut Self {
        self.terms.extend_from_slice(&other.terms);
        self
    }

    /// Multiplies every coefficient by `k`; `None` on overflow.
    pub fn scaled(&self, k: i128) -> Option<Self> {
        let terms = self
            .terms
            .iter()
            .map(|&(c, v)| c.checked_mul(k).map(|c| (c, v)))
            .collect::<Option<Vec<_>>>()?;
        Some(Self { terms })
    }

    pub fn frac(&self) -> f64 {
        let mut acc = 0.0;
        for &(c, v) in &self.terms {
            acc += frac_mul(c, v);
            if acc >= 1.0 {
                acc -= 1.0;
            }
        }
        frac(acc)
    }

    /// Approximate real value (no reduction); used for integer parts.
    pub fn approx(&self) -> f64 {
        self.terms.iter().map(|&(c, v)| c as f64 * v).sum()
    }

    pub fn phase(&self) -> Complex64 {
        e(self.frac())
    }
}
