//! `S_{a,b} = {n : ω(n) ≡ a mod b}`, its densities and the root-of-unity
//! expansion of its indicator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mult::{root_of_unity, MultiplicativeFunctionSpec};
use super::sieve::{Counting, FactorSieve};
use super::ArithError;

fn check_ab(a: u64, b: u64) -> Result<(), ArithError> {
    if b == 0 {
        return Err(ArithError::InvalidArgument("b must be positive".into()));
    }
    if a >= b {
        return Err(ArithError::InvalidArgument(format!("a = {a} must lie in 0..{b}")));
    }
    Ok(())
}

pub fn s_ab_indicator(n: u64, a: u64, b: u64, sieve: &FactorSieve) -> Result<u8, ArithError> {
    s_ab_indicator_counting(n, a, b, Counting::Distinct, sieve)
}

pub fn s_ab_indicator_counting(
    n: u64,
    a: u64,
    b: u64,
    counting: Counting,
    sieve: &FactorSieve,
) -> Result<u8, ArithError> {
    check_ab(a, b)?;
    Ok(u8::from(sieve.count(n, counting)? as u64 % b == a))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SabDensity {
    pub a: u64,
    pub b: u64,
    pub shift: i64,
    pub horizon: u64,
    pub count: u64,
    pub density: f64,
    /// The limiting density `1/b`.
    pub limit: f64,
}

/// `|{1 ≤ n ≤ N : n − c ≥ 1, ω(n − c) ≡ a mod b}| / N`.
pub fn s_ab_density(
    a: u64,
    b: u64,
    c: i64,
    horizon: u64,
    sieve: &FactorSieve,
) -> Result<SabDensity, ArithError> {
    s_ab_density_counting(a, b, c, horizon, Counting::Distinct, sieve)
}

pub fn s_ab_density_counting(
    a: u64,
    b: u64,
    c: i64,
    horizon: u64,
    counting: Counting,
    sieve: &FactorSieve,
) -> Result<SabDensity, ArithError> {
    check_ab(a, b)?;
    if horizon == 0 {
        return Err(ArithError::InvalidArgument("horizon must be positive".into()));
    }
    // n − c ranges over max(1, 1 − c) ..= N − c.
    let lo = (1 - c as i128).max(1);
    let hi = horizon as i128 - c as i128;
    let mut count = 0u64;
    if hi >= lo {
        if hi > sieve.limit() as i128 {
            return Err(ArithError::SieveRange {
                n: hi as u64,
                limit: sieve.limit(),
            });
        }
        let table = sieve.count_table(hi as u64, counting)?;
        count = table[(lo - 1) as usize..hi as usize]
            .iter()
            .filter(|&&w| w as u64 % b == a)
            .count() as u64;
    }
    Ok(SabDensity {
        a,
        b,
        shift: c,
        horizon,
        count,
        density: count as f64 / horizon as f64,
        limit: 1.0 / b as f64,
    })
}

/// Density of `∏_i (S_{a_i,b_i} − c_i)` in `[N]^d`. The indicator is a
/// product, so the box count factors.
pub fn s_ab_density_multi(
    params: &[(u64, u64, i64)],
    horizon: u64,
    sieve: &FactorSieve,
) -> Result<f64, ArithError> {
    if params.is_empty() {
        return Err(ArithError::InvalidArgument("need at least one component".into()));
    }
    params.iter().try_fold(1.0, |acc, &(a, b, c)| {
        Ok(acc * s_ab_density(a, b, c, horizon, sieve)?.density)
    })
}

/// `(1/b) Σ_{j<b} ζ^{−aj} f_b(n)^j` with `ζ = e(1/b)`. Here `f_b(n)` is
/// evaluated as a product over prime powers, independently of `ω`.
pub fn key_identity_eval(n: u64, a: u64, b: u64, sieve: &FactorSieve) -> Result<Complex64, ArithError> {
    key_identity_eval_counting(n, a, b, Counting::Distinct, sieve)
}

pub fn key_identity_eval_counting(
    n: u64,
    a: u64,
    b: u64,
    counting: Counting,
    sieve: &FactorSieve,
) -> Result<Complex64, ArithError> {
    check_ab(a, b)?;
    let fb = MultiplicativeFunctionSpec::f_b(b, counting)?.eval(n, sieve)?;
    let mut power = Complex64::new(1.0, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..b {
        total += root_of_unity(-((a * j) as i64), b) * power;
        power *= fb;
    }
    Ok(total / b as f64)
}
