//! Bounded sequences on `N^d`, box windows and finite-window estimators.
//!
//! Infinite averages `Av`/`LimAv` are replaced by averages over explicit
//! [`FolnerWindow`]s, and every `H → ∞` limit by a user-chosen `H` (see
//! [`average::uniformity_seminorm_probe`] for the `H, 2H` pair). Exact Gowers
//! norms on `Z_N^d` live in [`gowers`].

pub mod average;
pub mod gowers;
mod sample;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::error::ErrorClass;
use crate::phase::{e, IntLinComb};

pub use average::{
    besicovitch_norm, cesaro_average, correlation_cube, uniformity_seminorm,
    uniformity_seminorm_probe, SeminormEstimate, SeminormProbe,
};
pub use gowers::{gowers_norm, gowers_u2_spectral, van_der_corput_sides, VanDerCorputSides};

/// Slack allowed above the declared sup-bound before a value counts as a
/// violation.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeqError {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("|a({point:?})| = {modulus} exceeds declared bound {bound}")]
    BoundViolation {
        point: Vec<i64>,
        modulus: f64,
        bound: f64,
    },
    #[error("window has {points} points, more than the configured maximum {max}")]
    WindowTooLarge { points: u64, max: u64 },
    #[error("{tuples} shift tuples (work {work}) exceed the configured budget")]
    ShiftBudgetExceeded { tuples: u64, work: u64 },
    #[error("cube evaluation needs {work} multiply-adds, budget is {max}; the U^2 spectral path is still available")]
    GowersBudgetExceeded { work: u64, max: u64 },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid shift tuple: {0}")]
    InvalidShift(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sequence evaluation failed: {0}")]
    Evaluation(String),
}

impl SeqError {
    pub fn class(&self) -> ErrorClass {
        match self {
            SeqError::BoundViolation { .. } | SeqError::Evaluation(_) => ErrorClass::Numerical,
            SeqError::WindowTooLarge { .. }
            | SeqError::ShiftBudgetExceeded { .. }
            | SeqError::GowersBudgetExceeded { .. } => ErrorClass::Budget,
            _ => ErrorClass::Validation,
        }
    }
}

type EvalFn = dyn Fn(&[i64]) -> Result<Complex64, SeqError> + Send + Sync;

/// A bounded complex sequence on `N^d`, evaluated lazily.
///
/// Evaluators must be pure. The declared bound `B` is checked whenever the
/// sequence is averaged; values above `B + BOUND_TOL` are an error.
#[derive(Clone)]
pub struct ComplexSeqNd {
    arity: usize,
    bound: f64,
    label: Arc<str>,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for ComplexSeqNd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexSeqNd")
            .field("arity", &self.arity)
            .field("bound", &self.bound)
            .field("label", &self.label)
            .finish()
    }
}

impl ComplexSeqNd {
    pub fn new<F>(arity: usize, bound: f64, f: F) -> Self
    where
        F: Fn(&[i64]) -> Complex64 + Send + Sync + 'static,
    {
        Self::fallible(arity, bound, move |n| Ok(f(n)))
    }

    pub fn fallible<F>(arity: usize, bound: f64, f: F) -> Self
    where
        F: Fn(&[i64]) -> Result<Complex64, SeqError> + Send + Sync + 'static,
    {
        assert!(arity >= 1, "sequences need at least one variable");
        assert!(bound >= 0.0 && bound.is_finite(), "bound must be finite and nonnegative");
        Self {
            arity,
            bound,
            label: Arc::from("seq"),
            eval: Arc::new(f),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Arc::from(label.into());
        self
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn eval(&self, n: &[i64]) -> Result<Complex64, SeqError> {
        debug_assert_eq!(n.len(), self.arity);
        (self.eval)(n)
    }

    /// Evaluates and enforces the declared sup-bound.
    #[inline]
    pub fn eval_checked(&self, n: &[i64]) -> Result<Complex64, SeqError> {
        let z = self.eval(n)?;
        let modulus = z.norm();
        if !(modulus <= self.bound + BOUND_TOL) {
            return Err(SeqError::BoundViolation {
                point: n.to_vec(),
                modulus,
                bound: self.bound,
            });
        }
        Ok(z)
    }

    pub fn check_arity(&self, d: usize) -> Result<(), SeqError> {
        if self.arity != d {
            return Err(SeqError::ArityMismatch {
                expected: self.arity,
                got: d,
            });
        }
        Ok(())
    }

    pub fn constant(arity: usize, c: Complex64) -> Self {
        Self::new(arity, c.norm(), move |_| c).with_label(format!("const({c})"))
    }

    /// `n ↦ e(n·α)` with exact phase reduction.
    pub fn linear_phase(alpha: &[f64]) -> Self {
        let alpha = alpha.to_vec();
        let label = format!("e(n·{alpha:?})");
        Self::new(alpha.len(), 1.0, move |n| {
            let mut c = IntLinComb::new();
            for (&ni, &ai) in n.iter().zip(&alpha) {
                c.push(ni as i128, ai);
            }
            c.phase()
        })
        .with_label(label)
    }

    /// One-variable polynomial phase `n ↦ e(Σ_j coeffs[j]·n^j)`.
    pub fn poly_phase(coeffs: &[f64]) -> Self {
        let coeffs = coeffs.to_vec();
        let label = format!("e(poly{coeffs:?})");
        Self::fallible(1, 1.0, move |n| {
            let mut c = IntLinComb::new();
            let mut pow: i128 = 1;
            for (j, &cj) in coeffs.iter().enumerate() {
                if j > 0 {
                    pow = pow
                        .checked_mul(n[0] as i128)
                        .ok_or_else(|| SeqError::Evaluation("polynomial phase overflow".into()))?;
                }
                c.push(pow, cj);
            }
            Ok(c.phase())
        })
        .with_label(label)
    }

    /// `(-1)^{n_1+…+n_d}`.
    pub fn alternating(arity: usize) -> Self {
        Self::new(arity, 1.0, |n| {
            let s: i64 = n.iter().sum();
            Complex64::new(if s.rem_euclid(2) == 0 { 1.0 } else { -1.0 }, 0.0)
        })
        .with_label("alternating")
    }

    pub fn conj(&self) -> Self {
        let inner = self.clone();
        Self::fallible(self.arity, self.bound, move |n| Ok(inner.eval(n)?.conj()))
            .with_label(format!("conj({})", self.label))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let inner = self.clone();
        Self::fallible(self.arity, self.bound * c.norm(), move |n| Ok(c * inner.eval(n)?))
            .with_label(format!("{c}·{}", self.label))
    }

    pub fn add(&self, other: &ComplexSeqNd) -> Result<Self, SeqError> {
        other.check_arity(self.arity)?;
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::fallible(self.arity, self.bound + other.bound, move |n| {
            Ok(a.eval(n)? + b.eval(n)?)
        })
        .with_label(format!("({} + {})", self.label, other.label)))
    }

    pub fn sub(&self, other: &ComplexSeqNd) -> Result<Self, SeqError> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &ComplexSeqNd) -> Result<Self, SeqError> {
        other.check_arity(self.arity)?;
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::fallible(self.arity, self.bound * other.bound, move |n| {
            Ok(a.eval(n)? * b.eval(n)?)
        })
        .with_label(format!("({} · {})", self.label, other.label)))
    }

    /// Replaces the declared bound, e.g. after an a-priori estimate tighter
    /// than the one tracked through combinators.
    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = bound;
        self
    }
}

/// An offset box `k + [N_1]×…×[N_d]` with `[N] = {1,…,N}`.
///
/// Points are enumerated in lexicographic order, last coordinate fastest.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FolnerWindow {
    offset: Vec<i64>,
    sides: Vec<u64>,
}

impl FolnerWindow {
    pub fn new(offset: Vec<i64>, sides: Vec<u64>) -> Result<Self, SeqError> {
        if sides.is_empty() {
            return Err(SeqError::InvalidWindow("window needs at least one side".into()));
        }
        if offset.len() != sides.len() {
            return Err(SeqError::InvalidWindow(format!(
                "offset has {} coordinates but there are {} sides",
                offset.len(),
                sides.len()
            )));
        }
        if sides.iter().any(|&s| s == 0) {
            return Err(SeqError::InvalidWindow("side lengths must be at least 1".into()));
        }
        if offset.iter().any(|&k| k < 0) {
            return Err(SeqError::InvalidWindow("offsets must be nonnegative".into()));
        }
        Ok(Self { offset, sides })
    }

    /// `[N]` in one variable.
    pub fn interval(n: u64) -> Result<Self, SeqError> {
        Self::new(vec![0], vec![n])
    }

    /// `[N]^d`.
    pub fn cube(d: usize, n: u64) -> Result<Self, SeqError> {
        Self::new(vec![0; d], vec![n; d])
    }

    pub fn arity(&self) -> usize {
        self.sides.len()
    }

    pub fn offset(&self) -> &[i64] {
        &self.offset
    }

    pub fn sides(&self) -> &[u64] {
        &self.sides
    }

    /// `∏ N_i`, saturating at `u64::MAX`.
    pub fn cardinality(&self) -> u64 {
        crate::budget::product(self.sides.iter().copied())
    }

    pub fn check_size(&self, max: u64) -> Result<u64, SeqError> {
        let points = self.cardinality();
        if points > max {
            return Err(SeqError::WindowTooLarge { points, max });
        }
        Ok(points)
    }

    /// Writes the `idx`-th point (lexicographic order) into `out`.
    #[inline]
    pub fn point_into(&self, mut idx: u64, out: &mut [i64]) {
        for i in (0..self.sides.len()).rev() {
            let side = self.sides[i];
            out[i] = self.offset[i] + 1 + (idx % side) as i64;
            idx /= side;
        }
    }

    pub fn point(&self, idx: u64) -> Vec<i64> {
        let mut out = vec![0; self.arity()];
        self.point_into(idx, &mut out);
        out
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.cardinality()).map(move |i| self.point(i))
    }

    /// The same box with every side multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        Self {
            offset: self.offset.clone(),
            sides: self.sides.iter().map(|&s| s.saturating_mul(factor)).collect(),
        }
    }
}

/// Shifts `ĥ = (h_1,…,h_k)` in `(N^d)^k` indexing a `k`-dimensional cube.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeShiftTuple {
    shifts: Vec<Vec<i64>>,
}

impl CubeShiftTuple {
    pub fn new(shifts: Vec<Vec<i64>>) -> Result<Self, SeqError> {
        let Some(first) = shifts.first() else {
            return Err(SeqError::InvalidShift("order must be at least 1".into()));
        };
        let d = first.len();
        if d == 0 || shifts.iter().any(|h| h.len() != d) {
            return Err(SeqError::InvalidShift("all shifts must share one positive dimension".into()));
        }
        if shifts.iter().flatten().any(|&c| c < 0) {
            return Err(SeqError::InvalidShift("shift components must be nonnegative".into()));
        }
        Ok(Self { shifts })
    }

    pub fn zero(order: usize, d: usize) -> Self {
        Self {
            shifts: vec![vec![0; d]; order.max(1)],
        }
    }

    pub fn order(&self) -> usize {
        self.shifts.len()
    }

    pub fn dim(&self) -> usize {
        self.shifts[0].len()
    }

    pub fn shifts(&self) -> &[Vec<i64>] {
        &self.shifts
    }

    /// `ε·ĥ` for the vertex whose bits are given by `mask`.
    pub fn vertex(&self, mask: usize) -> Vec<i64> {
        let mut v = vec![0; self.dim()];
        for (j, h) in self.shifts.iter().enumerate() {
            if mask >> j & 1 == 1 {
                for (vi, hi) in v.iter_mut().zip(h) {
                    *vi += hi;
                }
            }
        }
        v
    }
}

/// A dense function `Z_N^d → C`, index arithmetic componentwise mod `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGridFn {
    modulus: usize,
    arity: usize,
    values: Vec<Complex64>,
}

impl FiniteGridFn {
    pub fn new(modulus: usize, arity: usize, values: Vec<Complex64>) -> Result<Self, SeqError> {
        if modulus == 0 || arity == 0 {
            return Err(SeqError::InvalidParameter("modulus and arity must be positive".into()));
        }
        let expected = modulus
            .checked_pow(arity as u32)
            .ok_or_else(|| SeqError::InvalidParameter("N^d overflows".into()))?;
        if values.len() != expected {
            return Err(SeqError::InvalidParameter(format!(
                "expected {expected} values for Z_{modulus}^{arity}, got {}",
                values.len()
            )));
        }
        Ok(Self {
            modulus,
            arity,
            values,
        })
    }

    pub fn from_fn<F>(modulus: usize, arity: usize, mut f: F) -> Result<Self, SeqError>
    where
        F: FnMut(&[usize]) -> Complex64,
    {
        let len = modulus
            .checked_pow(arity as u32)
            .ok_or_else(|| SeqError::InvalidParameter("N^d overflows".into()))?;
        let mut idx = vec![0usize; arity];
        let mut values = Vec::with_capacity(len);
        for flat in 0..len {
            unflatten(flat, modulus, &mut idx);
            values.push(f(&idx));
        }
        Self::new(modulus, arity, values)
    }

    pub fn constant(modulus: usize, arity: usize, c: Complex64) -> Result<Self, SeqError> {
        Self::from_fn(modulus, arity, |_| c)
    }

    /// The character `n ↦ e(k·n / N)`.
    pub fn character(modulus: usize, k: &[i64]) -> Result<Self, SeqError> {
        let n = modulus as i64;
        Self::from_fn(modulus, k.len(), |idx| {
            let dot: i64 = idx
                .iter()
                .zip(k)
                .map(|(&i, &ki)| (i as i64 * ki.rem_euclid(n)) % n)
                .sum::<i64>()
                % n;
            e(dot as f64 / n as f64)
        })
    }

    /// `n ↦ e((n_1² + … + n_d²) / N)`, computed with exact integer reduction.
    pub fn quadratic_phase(modulus: usize, arity: usize) -> Result<Self, SeqError> {
        let n = modulus as u64;
        Self::from_fn(modulus, arity, |idx| {
            let s: u64 = idx.iter().map(|&i| (i as u64 * i as u64) % n).sum::<u64>() % n;
            e(s as f64 / n as f64)
        })
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.values[flatten(idx, self.modulus)]
    }

    /// Flat index of `n + h` where `n` is given by its flat index.
    #[inline]
    pub fn shifted_index(&self, flat: usize, h: &[usize]) -> usize {
        let n = self.modulus;
        let mut rem = flat;
        let mut out = 0;
        let mut stride = 1;
        for i in (0..self.arity).rev() {
            let c = rem % n;
            rem /= n;
            out += ((c + h[i]) % n) * stride;
            stride *= n;
        }
        out
    }

    pub fn mean(&self) -> Complex64 {
        crate::sum::compensated(self.values.iter().copied()) / self.values.len() as f64
    }

    /// `f · conj(f_h)` where `f_h(n) = f(n + h)`.
    pub fn multiplicative_derivative(&self, h: &[usize]) -> Self {
        let values = (0..self.values.len())
            .map(|i| self.values[i] * self.values[self.shifted_index(i, h)].conj())
            .collect();
        Self {
            modulus: self.modulus,
            arity: self.arity,
            values,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            modulus: self.modulus,
            arity: self.arity,
            values: self.values.iter().map(|&v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeqError> {
        if self.modulus != other.modulus || self.arity != other.arity {
            return Err(SeqError::InvalidParameter("grid shapes differ".into()));
        }
        Ok(Self {
            modulus: self.modulus,
            arity: self.arity,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn unflatten(mut flat: usize, modulus: usize, out: &mut [usize]) {
    for i in (0..out.len()).rev() {
        out[i] = flat % modulus;
        flat /= modulus;
    }
}

pub(crate) fn flatten(idx: &[usize], modulus: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * modulus + (i % modulus))
}
