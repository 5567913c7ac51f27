//! Multiplicative functions given by their values on prime powers, and
//! Dirichlet characters.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::sieve::{Counting, FactorSieve};
use super::ArithError;
use crate::phase::e;
use crate::seqcore::{ComplexSeqNd, SeqError};

/// Slack on `|φ(p^k)| ≤ 1`.
pub const UNIT_TOL: f64 = 1e-12;

type Rule = dyn Fn(u64, u32) -> Complex64 + Send + Sync;

/// `φ` with `φ(1) = 1`, determined by `(p, k) ↦ φ(p^k)`.
///
/// When `completely` is set only the `k = 1` value of the rule is used and
/// `φ(p^k) = φ(p)^k`.
#[derive(Clone)]
pub struct MultiplicativeFunctionSpec {
    rule: Arc<Rule>,
    completely: bool,
    label: Arc<str>,
}

impl fmt::Debug for MultiplicativeFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplicativeFunctionSpec")
            .field("label", &self.label)
            .field("completely", &self.completely)
            .finish()
    }
}

/// `ζ^j` for `ζ = e(1/b)`, reduced exactly. Quarter turns are exact.
pub fn root_of_unity(j: i64, b: u64) -> Complex64 {
    let r = j.rem_euclid(b as i64) as u64;
    if (4 * r) % b == 0 {
        return match 4 * r / b {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    e(r as f64 / b as f64)
}

impl MultiplicativeFunctionSpec {
    pub fn new<F>(completely: bool, rule: F) -> Self
    where
        F: Fn(u64, u32) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            rule: Arc::new(rule),
            completely,
            label: Arc::from("phi"),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Arc::from(label.into());
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_completely(&self) -> bool {
        self.completely
    }

    pub fn one() -> Self {
        Self::new(true, |_, _| Complex64::new(1.0, 0.0)).with_label("one")
    }

    /// `λ(n) = (−1)^{Ω(n)}`.
    pub fn liouville() -> Self {
        Self::new(true, |_, _| Complex64::new(-1.0, 0.0)).with_label("liouville")
    }

    pub fn mobius() -> Self {
        Self::new(false, |_, k| Complex64::new(if k == 1 { -1.0 } else { 0.0 }, 0.0))
            .with_label("mobius")
    }

    /// `f_b(p^k) = ζ` with `ζ = e(1/b)`, or `ζ^k` when counting with
    /// multiplicity. So `f_b(n) = ζ^{ω(n)}` (resp. `ζ^{Ω(n)}`).
    pub fn f_b(b: u64, counting: Counting) -> Result<Self, ArithError> {
        if b == 0 {
            return Err(ArithError::InvalidArgument("b must be positive".into()));
        }
        Ok(match counting {
            Counting::Distinct => Self::new(false, move |_, _| root_of_unity(1, b)),
            Counting::WithMultiplicity => Self::new(true, move |_, _| root_of_unity(1, b)),
        }
        .with_label(format!("f_{b}")))
    }

    pub fn from_character(chi: &DirichletCharacterSpec) -> Self {
        let label = format!("chi mod {}", chi.modulus());
        let chi = chi.clone();
        Self::new(true, move |p, _| chi.eval(p)).with_label(label)
    }

    /// `n ↦ n^{it}`.
    pub fn archimedean(t: f64) -> Self {
        Self::new(true, move |p, _| e(t * (p as f64).ln() / std::f64::consts::TAU))
            .with_label(format!("n^(i{t})"))
    }

    /// Pointwise product, again multiplicative.
    pub fn product(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(self.completely && other.completely, move |p, k| {
            a.prime_power(p, k) * b.prime_power(p, k)
        })
        .with_label(format!("{}*{}", self.label, other.label))
    }

    pub fn conj(&self) -> Self {
        let a = self.clone();
        Self::new(self.completely, move |p, k| a.prime_power(p, k).conj())
            .with_label(format!("conj {}", self.label))
    }

    /// `φ(p^k)` without the bound check.
    pub fn prime_power(&self, p: u64, k: u32) -> Complex64 {
        if k == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if self.completely {
            (self.rule)(p, 1).powu(k)
        } else {
            (self.rule)(p, k)
        }
    }

    fn checked_prime_power(&self, p: u64, k: u32) -> Result<Complex64, ArithError> {
        let v = self.prime_power(p, k);
        if !(v.norm() <= 1.0 + UNIT_TOL) {
            return Err(ArithError::NotBounded { p, k, modulus: v.norm() });
        }
        Ok(v)
    }

    /// `φ(n) = ∏_{p^k ∥ n} φ(p^k)`.
    pub fn eval(&self, n: u64, sieve: &FactorSieve) -> Result<Complex64, ArithError> {
        let mut v = Complex64::new(1.0, 0.0);
        for (p, k) in sieve.factorize(n)? {
            v *= self.checked_prime_power(p, k)?;
        }
        Ok(v)
    }

    /// The sequence `n ↦ φ(n)` on positive integers.
    pub fn as_sequence(&self, sieve: Arc<FactorSieve>) -> ComplexSeqNd {
        let phi = self.clone();
        ComplexSeqNd::fallible(1, 1.0, move |n| {
            let m = u64::try_from(n[0])
                .map_err(|_| SeqError::Evaluation(format!("{} needs n ≥ 1", phi.label)))?;
            phi.eval(m, &sieve).map_err(|e| SeqError::Evaluation(e.to_string()))
        })
        .with_label(self.label.to_string())
    }
}

/// `φ(n)` for the spec.
pub fn mult_eval(
    spec: &MultiplicativeFunctionSpec,
    n: u64,
    sieve: &FactorSieve,
) -> Result<Complex64, ArithError> {
    spec.eval(n, sieve)
}

/// `φ(n₁,…,n_d) = ∏ φ_i(n_i)`.
pub fn mult_eval_multi(
    specs: &[MultiplicativeFunctionSpec],
    n: &[u64],
    sieve: &FactorSieve,
) -> Result<Complex64, ArithError> {
    if specs.len() != n.len() {
        return Err(ArithError::InvalidArgument(format!(
            "{} components for {} variables",
            specs.len(),
            n.len()
        )));
    }
    specs
        .iter()
        .zip(n)
        .try_fold(Complex64::new(1.0, 0.0), |acc, (s, &m)| Ok(acc * s.eval(m, sieve)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacterSpec {
    modulus: u64,
    values: Vec<Complex64>,
    principal: bool,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

const CHAR_TOL: f64 = 1e-9;

impl DirichletCharacterSpec {
    /// Validates `χ(1) = 1`, `χ(n) = 0 ⇔ gcd(n, q) > 1` and
    /// `χ(mn) = χ(m)χ(n)` on residues.
    pub fn from_table(modulus: u64, values: Vec<Complex64>) -> Result<Self, ArithError> {
        let q = modulus as usize;
        let bad = |m: String| Err(ArithError::InvalidCharacter(m));
        if modulus == 0 || values.len() != q {
            return bad(format!("need {modulus} values, got {}", values.len()));
        }
        if modulus == 1 {
            if (values[0] - 1.0).norm() > CHAR_TOL {
                return bad("the character mod 1 is identically 1".into());
            }
        } else if (values[1] - 1.0).norm() > CHAR_TOL {
            return bad("chi(1) must be 1".into());
        }
        for (n, v) in values.iter().enumerate() {
            let unit = gcd(n as u64, modulus) == 1;
            if unit && (v.norm() - 1.0).abs() > CHAR_TOL {
                return bad(format!("|chi({n})| must be 1"));
            }
            if !unit && v.norm() > CHAR_TOL {
                return bad(format!("chi({n}) must vanish"));
            }
        }
        for m in 0..q {
            for n in 0..q {
                if (values[m * n % q] - values[m] * values[n]).norm() > CHAR_TOL {
                    return bad(format!("not multiplicative at ({m}, {n})"));
                }
            }
        }
        let principal = (0..q).all(|n| {
            let target = if gcd(n as u64, modulus) == 1 { 1.0 } else { 0.0 };
            (values[n] - target).norm() <= CHAR_TOL
        });
        Ok(Self {
            modulus,
            values,
            principal,
        })
    }

    pub fn principal(modulus: u64) -> Result<Self, ArithError> {
        let values = (0..modulus)
            .map(|n| Complex64::new(if gcd(n, modulus) == 1 { 1.0 } else { 0.0 }, 0.0))
            .collect();
        Self::from_table(modulus, values)
    }

    /// The character mod a prime `q` with `χ(g^m) = e(jm/(q−1))` for the least
    /// primitive root `g`.
    pub fn prime_modulus(q: u64, j: u64) -> Result<Self, ArithError> {
        if q < 3 || (2..q).take_while(|d| d * d <= q).any(|d| q % d == 0) {
            return Err(ArithError::InvalidCharacter(format!("{q} is not an odd prime")));
        }
        let order = q - 1;
        let g = (2..q)
            .find(|&g| {
                let mut x = 1;
                (1..order).all(|_| {
                    x = x * g % q;
                    x != 1
                })
            })
            .expect("a primitive root exists mod a prime");
        let mut values = vec![Complex64::new(0.0, 0.0); q as usize];
        let mut x = 1u64;
        for m in 0..order {
            values[x as usize] = root_of_unity(((j % order) * m % order) as i64, order);
            x = x * g % q;
        }
        Self::from_table(q, values)
    }

    /// The non-principal real character mod 3: `1 ↦ 1`, `2 ↦ −1`.
    pub fn mod3() -> Self {
        Self::prime_modulus(3, 1).expect("3 is prime")
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    pub fn eval(&self, n: u64) -> Complex64 {
        self.values[(n % self.modulus) as usize]
    }
}
