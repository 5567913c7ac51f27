//! Dense sample buffers for sequences evaluated many times on one box.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{ComplexSeqNd, SeqError};
use crate::budget::{product, Limits};
use crate::sum::CHUNK;

/// Values of a sequence on the box `lo + [0, sides)`, row-major.
pub(crate) struct Sampled {
    lo: Vec<i64>,
    strides: Vec<usize>,
    values: Vec<Complex64>,
}

impl Sampled {
    /// Samples `a` on the box, or returns `None` when the buffer would exceed
    /// `limits.max_sample_points`. Bound checks happen here.
    pub fn build(
        a: &ComplexSeqNd,
        lo: &[i64],
        sides: &[u64],
        limits: &Limits,
    ) -> Result<Option<Self>, SeqError> {
        let total = product(sides.iter().copied());
        if total > limits.max_sample_points {
            return Ok(None);
        }
        let d = sides.len();
        let mut strides = vec![1usize; d];
        for i in (0..d.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sides[i + 1] as usize;
        }
        let mut values = vec![Complex64::default(); total as usize];
        let results: Vec<Result<(), SeqError>> = values
            .par_chunks_mut(CHUNK as usize)
            .enumerate()
            .map(|(c, chunk)| {
                let mut p = vec![0i64; d];
                for (j, slot) in chunk.iter_mut().enumerate() {
                    let mut idx = c * CHUNK as usize + j;
                    for i in (0..d).rev() {
                        let side = sides[i] as usize;
                        p[i] = lo[i] + (idx % side) as i64;
                        idx /= side;
                    }
                    *slot = a.eval_checked(&p)?;
                }
                Ok(())
            })
            .collect();
        for r in results {
            r?;
        }
        Ok(Some(Self {
            lo: lo.to_vec(),
            strides,
            values,
        }))
    }

    #[inline]
    pub fn index(&self, p: &[i64]) -> usize {
        p.iter()
            .zip(&self.lo)
            .zip(&self.strides)
            .map(|((&x, &l), &s)| (x - l) as usize * s)
            .sum()
    }

    /// Flat offset of a nonnegative displacement.
    #[inline]
    pub fn offset(&self, v: &[i64]) -> usize {
        v.iter().zip(&self.strides).map(|(&x, &s)| x as usize * s).sum()
    }

    #[inline]
    pub fn at(&self, flat: usize) -> Complex64 {
        self.values[flat]
    }
}
