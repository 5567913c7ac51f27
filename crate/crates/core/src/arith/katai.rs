//! Correlations along prime dilations, the hypothesis side of Kátai's
//! orthogonality criterion.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ArithError;
use crate::budget::{product, Limits};
use crate::seqcore::ComplexSeqNd;
use crate::sum::try_det_sum;

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn check_primes(p: [u64; 4]) -> Result<(), ArithError> {
    if let Some(&q) = p.iter().find(|&&q| !is_prime(q)) {
        return Err(ArithError::NotPrime(q));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return Err(ArithError::PrimeClash { primes: p });
            }
        }
    }
    Ok(())
}

fn raw(a: &ComplexSeqNd, p: [u64; 4], n1: u64, n2: u64) -> Result<Complex64, ArithError> {
    let s = try_det_sum(n1 * n2, |i| {
        let (x, y) = ((i / n2 + 1) as i64, (i % n2 + 1) as i64);
        let u = a.eval(&[p[0] as i64 * x, p[1] as i64 * y])?;
        let v = a.eval(&[p[2] as i64 * x, p[3] as i64 * y])?;
        Ok::<_, ArithError>(u * v.conj())
    })?;
    Ok(s / (n1 * n2) as f64)
}

fn check_seq(a: &ComplexSeqNd, n1: u64, n2: u64) -> Result<(), ArithError> {
    a.check_arity(2)?;
    if n1 == 0 || n2 == 0 {
        return Err(ArithError::InvalidArgument("N₁ and N₂ must be positive".into()));
    }
    Ok(())
}

/// `(1/(N₁N₂)) Σ a(p₁n₁, p₂n₂) conj a(p₁′n₁, p₂′n₂)` over `n_i ∈ [1, N_i]`,
/// with `primes = [p₁, p₂, p₁′, p₂′]` pairwise distinct.
pub fn katai_correlation(
    a: &ComplexSeqNd,
    primes: [u64; 4],
    n1: u64,
    n2: u64,
    limits: &Limits,
) -> Result<Complex64, ArithError> {
    check_seq(a, n1, n2)?;
    check_primes(primes)?;
    let work = product([n1, n2]);
    if work > limits.max_window_points {
        return Err(ArithError::BudgetExceeded { work, max: limits.max_window_points });
    }
    raw(a, primes, n1, n2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KataiEntry {
    pub primes: [u64; 4],
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KataiGrid {
    pub entries: Vec<KataiEntry>,
    pub max_modulus: f64,
    pub argmax: [u64; 4],
}

/// All ordered 4-tuples of distinct primes from `primes`, in lexicographic
/// order of indices.
pub fn katai_grid(
    a: &ComplexSeqNd,
    primes: &[u64],
    n1: u64,
    n2: u64,
    limits: &Limits,
) -> Result<KataiGrid, ArithError> {
    check_seq(a, n1, n2)?;
    if primes.len() < 4 {
        return Err(ArithError::InvalidArgument("need at least four primes".into()));
    }
    let k = primes.len();
    let mut tuples = Vec::new();
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                for m in 0..k {
                    let t = [primes[i], primes[j], primes[l], primes[m]];
                    if i != j && i != l && i != m && j != l && j != m && l != m {
                        tuples.push(t);
                    }
                }
            }
        }
    }
    for t in &tuples {
        check_primes(*t)?;
    }
    let work = product([tuples.len() as u64, n1, n2]);
    if work > limits.max_work {
        return Err(ArithError::BudgetExceeded { work, max: limits.max_work });
    }
    let entries = tuples
        .par_iter()
        .map(|&t| {
            let v = raw(a, t, n1, n2)?;
            Ok(KataiEntry { primes: t, re: v.re, im: v.im, modulus: v.norm() })
        })
        .collect::<Result<Vec<_>, ArithError>>()?;
    let best = entries
        .iter()
        .fold(&entries[0], |m, x| if x.modulus > m.modulus { x } else { m });
    Ok(KataiGrid {
        max_modulus: best.modulus,
        argmax: best.primes,
        entries,
    })
}
