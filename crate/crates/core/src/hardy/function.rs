//! Finite sums `Σ c·t^a·(log t)^e` with exact symbolic derivatives and
//! double-double evaluation of phases.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::HardyError;
use crate::dd::Dd;
use crate::phase::e;

/// Conservative relative accuracy of [`HardyFunctionSpec::eval_dd`].
pub const DD_REL_ERROR: f64 = 1e-28;

/// Fewest fractional digits a phase may keep before a horizon is refused.
pub const MIN_FRACTIONAL_DIGITS: f64 = 6.0;

pub const DEFAULT_T0: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyTerm {
    pub coeff: f64,
    pub power: f64,
    #[serde(default)]
    pub log_power: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct HardyFunctionSpec {
    terms: Vec<HardyTerm>,
    t0: f64,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    terms: Vec<HardyTerm>,
    #[serde(default = "default_t0")]
    t0: f64,
}

fn default_t0() -> f64 {
    DEFAULT_T0
}

impl TryFrom<SpecRepr> for HardyFunctionSpec {
    type Error = HardyError;
    fn try_from(r: SpecRepr) -> Result<Self, HardyError> {
        Self::new(r.terms, r.t0)
    }
}

impl From<HardyFunctionSpec> for SpecRepr {
    fn from(s: HardyFunctionSpec) -> Self {
        SpecRepr { terms: s.terms, t0: s.t0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionBudget {
    pub magnitude: f64,
    pub fractional_digits: f64,
}

impl HardyFunctionSpec {
    /// Input specs need `a ≥ 0` and `t₀ > 1`.
    pub fn new(terms: Vec<HardyTerm>, t0: f64) -> Result<Self, HardyError> {
        if !(t0 > 1.0 && t0.is_finite()) {
            return Err(HardyError::InvalidSpec(format!("t0 = {t0} must exceed 1")));
        }
        for t in &terms {
            if !t.coeff.is_finite() || !t.power.is_finite() || t.power < 0.0 {
                return Err(HardyError::InvalidSpec(format!(
                    "term {t:?} needs a finite coefficient and exponent a ≥ 0"
                )));
            }
        }
        Ok(Self::normalized(terms, t0))
    }

    fn normalized(mut terms: Vec<HardyTerm>, t0: f64) -> Self {
        terms.sort_by(|x, y| {
            y.power
                .total_cmp(&x.power)
                .then(y.log_power.cmp(&x.log_power))
        });
        let mut out: Vec<HardyTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(l) if l.power == t.power && l.log_power == t.log_power => l.coeff += t.coeff,
                _ => out.push(t),
            }
        }
        out.retain(|t| t.coeff != 0.0);
        Self { terms: out, t0 }
    }

    /// `c·t^a`.
    pub fn power(coeff: f64, a: f64) -> Result<Self, HardyError> {
        Self::new(vec![HardyTerm { coeff, power: a, log_power: 0 }], DEFAULT_T0)
    }

    /// `c·t^a·(log t)^e`.
    pub fn power_log(coeff: f64, a: f64, e: u32) -> Result<Self, HardyError> {
        Self::new(vec![HardyTerm { coeff, power: a, log_power: e }], DEFAULT_T0)
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new(), t0: DEFAULT_T0 }
    }

    pub fn with_t0(mut self, t0: f64) -> Result<Self, HardyError> {
        if !(t0 > 1.0 && t0.is_finite()) {
            return Err(HardyError::InvalidSpec(format!("t0 = {t0} must exceed 1")));
        }
        self.t0 = t0;
        Ok(self)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self::normalized(terms, self.t0.max(other.t0))
    }

    pub fn terms(&self) -> &[HardyTerm] {
        &self.terms
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest exponent `a` among the terms.
    pub fn growth_exponent(&self) -> f64 {
        self.terms.first().map_or(0.0, |t| t.power)
    }

    /// The symbolic test: drop the polynomial part (integer exponent, no log)
    /// and look at the leading remaining term. `f` stays away from
    /// polynomials iff that term exists and outgrows `log t`, i.e. it is not
    /// `c·log t`.
    pub fn stays_away(&self) -> bool {
        let rest = self
            .terms
            .iter()
            .find(|t| t.power.fract() != 0.0 || t.log_power > 0);
        match rest {
            None => false,
            Some(t) => t.power > 0.0 || t.log_power > 1,
        }
    }

    pub fn deriv(&self) -> Self {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.power != 0.0 {
                out.push(HardyTerm {
                    coeff: t.coeff * t.power,
                    power: t.power - 1.0,
                    log_power: t.log_power,
                });
            }
            if t.log_power > 0 {
                out.push(HardyTerm {
                    coeff: t.coeff * t.log_power as f64,
                    power: t.power - 1.0,
                    log_power: t.log_power - 1,
                });
            }
        }
        Self::normalized(out, self.t0)
    }

    fn check(&self, t: f64) -> Result<(), HardyError> {
        if !(t >= self.t0) || !t.is_finite() {
            return Err(HardyError::Domain { t, t0: self.t0 });
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<f64, HardyError> {
        self.check(t)?;
        let l = t.ln();
        Ok(self
            .terms
            .iter()
            .map(|x| x.coeff * t.powf(x.power) * l.powi(x.log_power as i32))
            .sum())
    }

    pub fn eval_dd(&self, t: Dd) -> Result<Dd, HardyError> {
        self.check(t.to_f64())?;
        let l = t.ln();
        let mut acc = Dd::ZERO;
        for x in &self.terms {
            acc = acc + t.powf(x.power) * l.powi(x.log_power as i32) * Dd::from(x.coeff);
        }
        Ok(acc)
    }

    /// `Σ |c|·t^a·|log t|^e` at `t`, bounding `|f(t)|`.
    pub fn magnitude(&self, t: f64) -> f64 {
        let l = t.ln().abs();
        self.terms
            .iter()
            .map(|x| x.coeff.abs() * t.powf(x.power) * l.powi(x.log_power as i32))
            .sum()
    }

    /// Fractional digits left in `f(t) mod 1` at `t`.
    pub fn precision_at(&self, t: f64) -> PrecisionBudget {
        let magnitude = self.magnitude(t).max(1.0);
        PrecisionBudget {
            magnitude,
            fractional_digits: -(magnitude * DD_REL_ERROR).log10(),
        }
    }

    /// Checks that every `n ≤ horizon` keeps enough fractional digits. All
    /// terms are eventually monotone, so the larger endpoint decides.
    pub fn check_horizon(&self, horizon: u64) -> Result<PrecisionBudget, HardyError> {
        let t = (horizon as f64).max(self.t0);
        let p = self.precision_at(t);
        if p.fractional_digits < MIN_FRACTIONAL_DIGITS {
            return Err(HardyError::PrecisionExhausted {
                horizon,
                digits: p.fractional_digits,
            });
        }
        Ok(p)
    }

    /// `f(n) mod 1` reduced in double-double.
    pub fn frac_at(&self, n: u64) -> Result<f64, HardyError> {
        Ok(self.eval_dd(Dd::from(n as f64))?.frac())
    }
}

pub fn hardy_eval(f: &HardyFunctionSpec, t: f64) -> Result<f64, HardyError> {
    f.eval(t)
}

/// The `j`-th derivative.
pub fn hardy_deriv(f: &HardyFunctionSpec, j: u32) -> HardyFunctionSpec {
    (0..j).fold(f.clone(), |g, _| g.deriv())
}

/// `e(f(n))`.
pub fn hardy_weight(f: &HardyFunctionSpec, n: u64) -> Result<Complex64, HardyError> {
    Ok(e(f.frac_at(n)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t32() -> HardyFunctionSpec {
        HardyFunctionSpec::power(1.0, 1.5).unwrap()
    }

    #[test]
    fn derivative_examples() {
        let d1 = hardy_deriv(&t32(), 1);
        assert_eq!(d1.terms(), &[HardyTerm { coeff: 1.5, power: 0.5, log_power: 0 }]);
        let d2 = hardy_deriv(&t32(), 2);
        assert_eq!(d2.terms(), &[HardyTerm { coeff: 0.75, power: -0.5, log_power: 0 }]);
        let tlog = HardyFunctionSpec::power_log(1.0, 1.0, 1).unwrap();
        let d = hardy_deriv(&tlog, 1);
        for t in [2.0, 10.0, 1e4] {
            assert!((d.eval(t).unwrap() - (t.ln() + 1.0)).abs() < 1e-12);
        }
        assert!(hardy_deriv(&HardyFunctionSpec::power(1.0, 2.0).unwrap(), 3).is_zero());
    }

    #[test]
    fn stays_away_classification() {
        let p = |c, a, e| HardyFunctionSpec::power_log(c, a, e).unwrap();
        assert!(t32().stays_away());
        assert!(p(1.0, 1.0, 1).stays_away());
        assert!(p(1.0, 0.0, 2).stays_away());
        assert!(!p(1.0, 0.0, 1).stays_away());
        assert!(!p(1.0, 2.0, 0).stays_away());
        // t² + log t is a polynomial plus a log-sized error.
        assert!(!p(1.0, 2.0, 0).add(&p(3.0, 0.0, 1)).stays_away());
        assert!(p(1.0, 3.0, 0).add(&p(1.0, 0.5, 0)).stays_away());
        assert!(HardyFunctionSpec::power(1.0, -1.0).is_err());
    }

    #[test]
    fn weights() {
        let f = t32();
        assert!((hardy_weight(&f, 4).unwrap() - 1.0).norm() < 1e-15);
        let w = hardy_weight(&f, 2).unwrap();
        // 2√2 = 2.828427124746190097603377448419...
        assert!((w - e(0.828_427_124_746_190_1)).norm() < 1e-15);
        assert_eq!(hardy_weight(&HardyFunctionSpec::zero(), 7).unwrap(), Complex64::new(1.0, 0.0));
        assert!(matches!(hardy_weight(&f, 1), Err(HardyError::Domain { .. })));
    }

    #[test]
    fn large_arguments_keep_digits() {
        let f = t32();
        // (10⁶ + 1)^{3/2} mod 1 = 0.000374999937500023437488...
        let v = f.frac_at(1_000_001).unwrap();
        assert!((v - 0.000_374_999_937_500_023_437_5).abs() < 1e-16, "{v}");
        assert!(f.check_horizon(1_000_000).unwrap().fractional_digits > 18.0);
        let steep = HardyFunctionSpec::power(1.0, 4.5).unwrap();
        assert!(matches!(steep.check_horizon(1_000_000), Err(HardyError::PrecisionExhausted { .. })));
    }

    #[test]
    fn serde_validates() {
        let f: HardyFunctionSpec = serde_json::from_str(r#"{"terms":[{"coeff":1.0,"power":1.5}]}"#).unwrap();
        assert_eq!(f, t32());
        assert!(serde_json::from_str::<HardyFunctionSpec>(r#"{"terms":[],"t0":0.5}"#).is_err());
    }

    proptest! {
        #[test]
        fn derivative_matches_central_differences(
            c in -3.0f64..3.0, a in 0.0f64..3.0, e in 0u32..3, lt in 1.0f64..12.0,
        ) {
            let f = HardyFunctionSpec::power_log(c, a, e).unwrap();
            let t = lt.exp();
            let h = 1e-4 * t;
            let fd = (f.eval(t + h).unwrap() - f.eval(t - h).unwrap()) / (2.0 * h);
            let exact = hardy_deriv(&f, 1).eval(t).unwrap();
            // Error ≤ h²·max|f‴|/6 plus cancellation in the difference.
            let f3 = hardy_deriv(&f, 3);
            let bound = h * h * f3.magnitude(t - h).max(f3.magnitude(t + h)) / 6.0 * 1.1
                + 4.0 * f64::EPSILON * f.magnitude(t + h) / h;
            prop_assert!((fd - exact).abs() <= bound + 1e-12, "{fd} vs {exact}, bound {bound}");
        }
    }
}
