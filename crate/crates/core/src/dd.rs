//! Double-double arithmetic (about 106 significant bits).
//!
//! Used where a phase `e(f(n))` needs the fractional part of a value of size
//! `10^9` or more. Only the operations needed by the Hardy-field evaluator
//! are provided: field operations, `exp`, `ln`, `powf` and `frac`.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    /// Exact conversion of an integer below `2^106` in magnitude.
    pub fn from_i128(n: i128) -> Self {
        let hi = n as f64;
        let rest = n - hi as i128;
        Self::new(hi, rest as f64)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn floor(self) -> Self {
        let fh = self.hi.floor();
        if fh == self.hi {
            Self::new(fh, self.lo.floor())
        } else {
            Self { hi: fh, lo: 0.0 }
        }
    }

    /// Fractional part in `[0, 1)` rounded to a double.
    pub fn frac(self) -> f64 {
        let f = (self - self.floor()).to_f64();
        if f >= 1.0 {
            0.0
        } else if f < 0.0 {
            let g = f + 1.0;
            if g >= 1.0 {
                0.0
            } else {
                g
            }
        } else {
            f
        }
    }

    #[inline]
    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        Self::new(p, e + self.lo * b)
    }

    fn mul_pow2(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        let x = self.hi.sqrt();
        // One Newton step on the residual doubles the precision.
        let (p, e) = two_prod(x, x);
        let resid = (self - Dd::new(p, e)).hi;
        Self::new(x, resid / (2.0 * x))
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self {
                hi: f64::INFINITY,
                lo: 0.0,
            };
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        const SQUARINGS: i32 = 10;
        let s = r.mul_pow2(-SQUARINGS);
        // expm1(s) by Taylor series; |s| < 4e-4 so 12 terms are far past
        // double-double precision.
        let mut term = s;
        let mut m = s;
        for j in 2..=12 {
            term = term * s / Dd::from(j as f64);
            m = m + term;
        }
        for _ in 0..SQUARINGS {
            m = m.mul_f64(2.0) + m * m;
        }
        (m + Dd::ONE).mul_pow2(k as i32)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self {
                hi: f64::NAN,
                lo: 0.0,
            };
        }
        let mut y = Dd::from(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }

    /// `self^a` for positive `self`.
    pub fn powf(self, a: f64) -> Self {
        if a == 0.0 {
            return Self::ONE;
        }
        if a.fract() == 0.0 && a.abs() <= 64.0 {
            return self.powi(a as i32);
        }
        // Half-integer exponents go through sqrt, which is correctly rounded
        // to double-double; the common t^{k/2} weights stay sharp.
        if (2.0 * a).fract() == 0.0 && a.abs() <= 64.0 {
            let root = self.sqrt();
            return root.powi((2.0 * a) as i32);
        }
        (self.ln().mul_f64(a)).exp()
    }

    pub fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Dd::ONE / self.powi(-n);
        }
        let mut base = self;
        let mut acc = Dd::ONE;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from(q3)
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 50-digit mpmath evaluations.
    #[test]
    fn ln_and_exp_agree_with_references() {
        let ln10 = Dd::from(10.0).ln();
        let reference = Dd::new(2.302585092994046, -2.1707562233822494e-16);
        assert!((ln10 - reference).abs().to_f64() < 1e-30);
        let e1 = Dd::ONE.exp();
        let e_ref = Dd::new(2.718281828459045, 1.4456468917292502e-16);
        assert!((e1 - e_ref).abs().to_f64() < 1e-30);
    }

    #[test]
    fn half_integer_powers_keep_fractional_digits() {
        // 2^{3/2} = 2.8284271247461900976...
        let f = Dd::from(2.0).powf(1.5).frac();
        assert!((f - 0.828_427_124_746_190_1).abs() < 1e-16);
        // 999999^{3/2} = 999998500.000375000062500023...
        let g = Dd::from(999_999.0).powf(1.5).frac();
        assert!((g - 0.000_375_000_062_500_023_4).abs() < 1e-15, "{g}");
        // Generic exponent path: 12345^{1.3} mod 1 (binary 1.3) from mpmath.
        let h = Dd::from(12_345.0).powf(1.3).frac();
        assert!((h - 0.534_966_863_113_744_4).abs() < 1e-12, "{h}");
    }

    #[test]
    fn division_roundtrip() {
        let a = Dd::from(1.0) / Dd::from(3.0);
        let back = a * Dd::from(3.0);
        assert!((back - Dd::ONE).abs().to_f64() < 1e-31);
    }
}
