//! Deterministic compensated reductions.
//!
//! Index ranges are cut into fixed-size chunks. Each chunk is summed
//! sequentially with Neumaier compensation, and chunk totals are combined by
//! a pairwise tree in chunk order. The chunk size does not depend on the
//! thread count, so the result is bit-reproducible.

use num_complex::Complex64;
use rayon::prelude::*;

/// Number of consecutive terms summed sequentially inside one chunk.
pub const CHUNK: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexAcc {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexAcc {
    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Pairwise (tree) sum in slice order.
pub fn pairwise(values: &[Complex64]) -> Complex64 {
    match values.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise(l) + pairwise(r)
        }
    }
}

pub fn pairwise_real(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_real(l) + pairwise_real(r)
        }
    }
}

fn chunk_count(len: u64) -> u64 {
    len.div_ceil(CHUNK)
}

/// `Σ_{i<len} f(i)` with the deterministic chunked contract.
pub fn det_sum<F>(len: u64, f: F) -> Complex64
where
    F: Fn(u64) -> Complex64 + Sync,
{
    let parts: Vec<Complex64> = (0..chunk_count(len))
        .into_par_iter()
        .map(|c| {
            let mut acc = ComplexAcc::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                acc.add(f(i));
            }
            acc.value()
        })
        .collect();
    pairwise(&parts)
}

/// Real-valued variant of [`det_sum`].
pub fn det_sum_real<F>(len: u64, f: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    let parts: Vec<f64> = (0..chunk_count(len))
        .into_par_iter()
        .map(|c| {
            let mut acc = Neumaier::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                acc.add(f(i));
            }
            acc.value()
        })
        .collect();
    pairwise_real(&parts)
}

/// Fallible variant of [`det_sum`]. On failure the error of the lowest
/// failing chunk is returned, so the reported error is deterministic too.
pub fn try_det_sum<F, E>(len: u64, f: F) -> Result<Complex64, E>
where
    F: Fn(u64) -> Result<Complex64, E> + Sync,
    E: Send,
{
    let parts: Vec<Result<Complex64, E>> = (0..chunk_count(len))
        .into_par_iter()
        .map(|c| {
            let mut acc = ComplexAcc::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(len) {
                acc.add(f(i)?);
            }
            Ok(acc.value())
        })
        .collect();
    let parts = parts.into_iter().collect::<Result<Vec<_>, E>>()?;
    Ok(pairwise(&parts))
}

/// Sequential compensated sum of an iterator, for small inner loops.
pub fn compensated<I: IntoIterator<Item = Complex64>>(it: I) -> Complex64 {
    let mut acc = ComplexAcc::default();
    for z in it {
        acc.add(z);
    }
    acc.value()
}
