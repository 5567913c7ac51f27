//! Window averages, cube correlations and uniformity seminorm estimates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sample::Sampled;
use super::{ComplexSeqNd, CubeShiftTuple, FolnerWindow, SeqError};
use crate::budget::{pow, Limits};
use crate::sum::{try_det_sum, ComplexAcc};

fn check(a: &ComplexSeqNd, w: &FolnerWindow, limits: &Limits) -> Result<u64, SeqError> {
    a.check_arity(w.arity())?;
    w.check_size(limits.max_window_points)
}

/// `(1/|w|) Σ_{n∈w} a(n)`.
pub fn cesaro_average(
    a: &ComplexSeqNd,
    w: &FolnerWindow,
    limits: &Limits,
) -> Result<Complex64, SeqError> {
    let card = check(a, w, limits)?;
    let d = w.arity();
    let total = try_det_sum(card, |i| {
        let mut p = [0i64; 8];
        if d <= 8 {
            w.point_into(i, &mut p[..d]);
            a.eval_checked(&p[..d])
        } else {
            a.eval_checked(&w.point(i))
        }
    })?;
    Ok(total / card as f64)
}

/// `(Av_w |a|²)^{1/2}`.
pub fn besicovitch_norm(
    a: &ComplexSeqNd,
    w: &FolnerWindow,
    limits: &Limits,
) -> Result<f64, SeqError> {
    let card = check(a, w, limits)?;
    let total = try_det_sum(card, |i| {
        let z = a.eval_checked(&w.point(i))?;
        Ok(Complex64::new(z.norm_sqr(), 0.0))
    })?;
    Ok((total.re / card as f64).max(0.0).sqrt())
}

/// Vertex displacements `ε·ĥ` and conjugation parities `|ε| mod 2`.
fn vertices(h: &CubeShiftTuple) -> Vec<(Vec<i64>, bool)> {
    (0..1usize << h.order())
        .map(|mask| (h.vertex(mask), mask.count_ones() % 2 == 1))
        .collect()
}

#[inline]
fn cube_product(values: impl Iterator<Item = (Complex64, bool)>) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    for (z, conj) in values {
        prod *= if conj { z.conj() } else { z };
    }
    prod
}

/// `(1/|w|) Σ_{n∈w} ∏_{ε∈{0,1}^k} C^{|ε|} a(n + ε·ĥ)`.
pub fn correlation_cube(
    a: &ComplexSeqNd,
    w: &FolnerWindow,
    h: &CubeShiftTuple,
    limits: &Limits,
) -> Result<Complex64, SeqError> {
    let card = check(a, w, limits)?;
    if h.dim() != w.arity() {
        return Err(SeqError::ArityMismatch {
            expected: w.arity(),
            got: h.dim(),
        });
    }
    let verts = vertices(h);
    let work = card.saturating_mul(verts.len() as u64);
    if work > limits.max_work {
        return Err(SeqError::ShiftBudgetExceeded { tuples: 1, work });
    }
    let reach: Vec<u64> = (0..w.arity())
        .map(|i| h.shifts().iter().map(|s| s[i] as u64).sum())
        .collect();
    let lo: Vec<i64> = w.offset().iter().map(|k| k + 1).collect();
    let sides: Vec<u64> = w.sides().iter().zip(&reach).map(|(n, r)| n + r).collect();

    let total = match Sampled::build(a, &lo, &sides, limits)? {
        Some(s) => {
            let offs: Vec<(usize, bool)> = verts.iter().map(|(v, c)| (s.offset(v), *c)).collect();
            try_det_sum(card, |i| {
                let base = s.index(&w.point(i));
                Ok(cube_product(offs.iter().map(|&(o, c)| (s.at(base + o), c))))
            })?
        }
        None => try_det_sum(card, |i| {
            let n = w.point(i);
            let mut prod = Complex64::new(1.0, 0.0);
            let mut p = n.clone();
            for (v, conj) in &verts {
                for j in 0..p.len() {
                    p[j] = n[j] + v[j];
                }
                let z = a.eval_checked(&p)?;
                prod *= if *conj { z.conj() } else { z };
            }
            Ok(prod)
        })?,
    };
    Ok(total / card as f64)
}

/// Finite uniformity seminorm estimate with the diagnostics of its clamp.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormEstimate {
    /// `max(Re S, 0)^{1/2^k}`.
    pub value: f64,
    /// The raw inner average `S`.
    pub inner_re: f64,
    pub inner_im: f64,
    /// Amount by which `Re S` was raised to reach zero (0 if nonnegative).
    pub clamp: f64,
    pub order: usize,
    pub shift_range: u64,
    pub tuples: u64,
}

/// Estimate at `H` and at `2H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormProbe {
    pub at_h: SeminormEstimate,
    pub at_2h: SeminormEstimate,
    /// `value(2H) − value(H)`.
    pub delta: f64,
}

/// `(H^{-dk} Σ_{ĥ∈([H]^d)^k} cor_w(a; ĥ))^{1/2^k}` with shifts in `{1,…,H}^d`.
pub fn uniformity_seminorm(
    a: &ComplexSeqNd,
    w: &FolnerWindow,
    k: usize,
    shift_range: u64,
    limits: &Limits,
) -> Result<SeminormEstimate, SeqError> {
    let card = check(a, w, limits)?;
    if k == 0 || k > 16 {
        return Err(SeqError::InvalidParameter(format!("order k = {k} must lie in 1..=16")));
    }
    if shift_range == 0 {
        return Err(SeqError::InvalidParameter("shift range H must be at least 1".into()));
    }
    let d = w.arity();
    let coords = (d * k) as u64;
    let tuples = pow(shift_range, coords);
    let work = tuples.saturating_mul(card).saturating_mul(1 << k);
    if tuples > limits.max_shift_tuples || work > limits.max_work {
        return Err(SeqError::ShiftBudgetExceeded { tuples, work });
    }
    let lo: Vec<i64> = w.offset().iter().map(|x| x + 1).collect();
    let sides: Vec<u64> = w.sides().iter().map(|&n| n + k as u64 * shift_range).collect();
    let sampled = Sampled::build(a, &lo, &sides, limits)?;
    let window_offsets: Option<Vec<usize>> = sampled
        .as_ref()
        .map(|s| (0..card).map(|i| s.index(&w.point(i))).collect());

    let h_of = |t: u64| -> CubeShiftTuple {
        let mut rest = t;
        let mut shifts = vec![vec![0i64; d]; k];
        for j in (0..k).rev() {
            for i in (0..d).rev() {
                shifts[j][i] = 1 + (rest % shift_range) as i64;
                rest /= shift_range;
            }
        }
        CubeShiftTuple { shifts }
    };

    let sum = try_det_sum(tuples, |t| {
        let h = h_of(t);
        let verts = vertices(&h);
        let mut acc = ComplexAcc::default();
        match (&sampled, &window_offsets) {
            (Some(s), Some(base)) => {
                let offs: Vec<(usize, bool)> =
                    verts.iter().map(|(v, c)| (s.offset(v), *c)).collect();
                for &b in base {
                    acc.add(cube_product(offs.iter().map(|&(o, c)| (s.at(b + o), c))));
                }
            }
            _ => {
                let mut p = vec![0i64; d];
                for i in 0..card {
                    let n = w.point(i);
                    let mut prod = Complex64::new(1.0, 0.0);
                    for (v, conj) in &verts {
                        for j in 0..d {
                            p[j] = n[j] + v[j];
                        }
                        let z = a.eval_checked(&p)?;
                        prod *= if *conj { z.conj() } else { z };
                    }
                    acc.add(prod);
                }
            }
        }
        Ok(acc.value() / card as f64)
    })?;
    let s = sum / tuples as f64;
    let clamp = if s.re < 0.0 { -s.re } else { 0.0 };
    Ok(SeminormEstimate {
        value: s.re.max(0.0).powf(1.0 / (1u64 << k) as f64),
        inner_re: s.re,
        inner_im: s.im,
        clamp,
        order: k,
        shift_range,
        tuples,
    })
}

/// Runs [`uniformity_seminorm`] at `H` and `2H`.
pub fn uniformity_seminorm_probe(
    a: &ComplexSeqNd,
    w: &FolnerWindow,
    k: usize,
    shift_range: u64,
    limits: &Limits,
) -> Result<SeminormProbe, SeqError> {
    let at_h = uniformity_seminorm(a, w, k, shift_range, limits)?;
    let at_2h = uniformity_seminorm(a, w, k, shift_range.saturating_mul(2), limits)?;
    Ok(SeminormProbe {
        at_h,
        at_2h,
        delta: at_2h.value - at_h.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{dist_to_int, e};

    fn lim() -> Limits {
        Limits::default()
    }

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn constant_and_alternating_averages() {
        let one = ComplexSeqNd::constant(1, Complex64::new(1.0, 0.0));
        let z = cesaro_average(&one, &FolnerWindow::interval(1000).unwrap(), &lim()).unwrap();
        assert_eq!(z, Complex64::new(1.0, 0.0));
        let alt = ComplexSeqNd::alternating(1);
        let z = cesaro_average(&alt, &FolnerWindow::interval(1000).unwrap(), &lim()).unwrap();
        assert!(z.norm() < 1e-15);
    }

    #[test]
    fn rotation_average_matches_geometric_sum() {
        let alpha = golden();
        let a = ComplexSeqNd::linear_phase(&[alpha]);
        let n = 10_000u64;
        let z = cesaro_average(&a, &FolnerWindow::interval(n).unwrap(), &lim()).unwrap();
        // Σ_{m=1}^{N} e(mα) = e(α)(e(Nα) − 1)/(e(α) − 1)
        let closed = e(alpha) * (e(n as f64 * alpha) - 1.0) / (e(alpha) - 1.0) / n as f64;
        assert!((z - closed).norm() < 1e-12);
        assert!(z.norm() <= 2.0 / (n as f64 * dist_to_int(alpha)));
    }

    #[test]
    fn besicovitch_examples() {
        let w = FolnerWindow::interval(1000).unwrap();
        let c = ComplexSeqNd::constant(1, Complex64::new(0.6, -0.8) * 2.0);
        assert!((besicovitch_norm(&c, &w, &lim()).unwrap() - 2.0).abs() < 1e-12);
        let r = ComplexSeqNd::linear_phase(&[0.3]);
        assert!((besicovitch_norm(&r, &w, &lim()).unwrap() - 1.0).abs() < 1e-12);
        let even = ComplexSeqNd::new(1, 1.0, |n| Complex64::new(((n[0] + 1) % 2) as f64, 0.0));
        let v = besicovitch_norm(&even, &w, &lim()).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cube_correlations_of_phases() {
        let alpha = golden();
        let w = FolnerWindow::interval(500).unwrap();
        let lin = ComplexSeqNd::linear_phase(&[alpha]);
        let h = CubeShiftTuple::new(vec![vec![7]]).unwrap();
        let z = correlation_cube(&lin, &w, &h, &lim()).unwrap();
        assert!((z - e(-7.0 * alpha)).norm() < 1e-12);

        let quad = ComplexSeqNd::poly_phase(&[0.0, 0.0, alpha]);
        let h = CubeShiftTuple::new(vec![vec![3], vec![5]]).unwrap();
        let z = correlation_cube(&quad, &w, &h, &lim()).unwrap();
        assert!((z - e(2.0 * 15.0 * alpha)).norm() < 1e-12, "{z}");
    }

    #[test]
    fn zero_shift_correlation_is_power_average() {
        let a = ComplexSeqNd::new(1, 2.1, |n| Complex64::new(1.0 + (n[0] as f64).sin(), 0.3));
        let w = FolnerWindow::interval(300).unwrap();
        for k in 1..=3usize {
            let z = correlation_cube(&a, &w, &CubeShiftTuple::zero(k, 1), &lim()).unwrap();
            let direct = (1..=300)
                .map(|m| a.eval(&[m]).unwrap().norm_sqr().powi(1 << (k - 1)))
                .sum::<f64>()
                / 300.0;
            assert!((z.re - direct).abs() < 1e-12 * direct.max(1.0));
            assert!(z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_and_direct_paths_agree() {
        let a = ComplexSeqNd::poly_phase(&[0.1, 0.2, 0.37]);
        let w = FolnerWindow::interval(200).unwrap();
        let h = CubeShiftTuple::new(vec![vec![2], vec![9]]).unwrap();
        let mut tight = lim();
        tight.max_sample_points = 1;
        let s = correlation_cube(&a, &w, &h, &lim()).unwrap();
        let d = correlation_cube(&a, &w, &h, &tight).unwrap();
        assert!((s - d).norm() < 1e-13);
        let s = uniformity_seminorm(&a, &w, 2, 6, &lim()).unwrap();
        let d = uniformity_seminorm(&a, &w, 2, 6, &tight).unwrap();
        assert!((s.inner_re - d.inner_re).abs() < 1e-13);
    }

    #[test]
    fn seminorm_examples() {
        let w = FolnerWindow::interval(400).unwrap();
        let one = ComplexSeqNd::constant(1, Complex64::new(1.0, 0.0));
        for k in 1..=3 {
            let s = uniformity_seminorm(&one, &w, k, 4, &lim()).unwrap();
            assert!((s.value - 1.0).abs() < 1e-12);
        }
        let alt = ComplexSeqNd::alternating(1);
        let s = uniformity_seminorm(&alt, &FolnerWindow::interval(1000).unwrap(), 1, 8, &lim()).unwrap();
        assert!(s.value < 1e-7, "{s:?}");
    }

    #[test]
    fn rotation_seminorms_by_order() {
        let alpha = golden();
        let a = ComplexSeqNd::linear_phase(&[alpha]);
        let w = FolnerWindow::interval(10_000).unwrap();
        // Order 1: the inner average is H^{-1} Σ_h e(−hα), small for irrational α.
        let s1 = uniformity_seminorm(&a, &w, 1, 64, &lim()).unwrap();
        let oracle = crate::sum::compensated((1..=64).map(|h| e(-(h as f64) * alpha))) / 64.0;
        assert!((s1.inner_re - oracle.re).abs() < 1e-12);
        assert!((s1.inner_im - oracle.im).abs() < 1e-12);
        assert!((s1.value - oracle.re.max(0.0).sqrt()).abs() < 1e-10);
        assert!(s1.value <= 0.3);
        // Order 2: every cube product is exactly 1 for a linear phase.
        let s2 = uniformity_seminorm(&a, &w, 2, 64, &lim()).unwrap();
        assert!((s2.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn budget_and_validation_errors() {
        let a = ComplexSeqNd::constant(2, Complex64::new(1.0, 0.0));
        let w = FolnerWindow::cube(2, 10).unwrap();
        let mut l = lim();
        l.max_shift_tuples = 100;
        assert!(matches!(
            uniformity_seminorm(&a, &w, 2, 4, &l),
            Err(SeqError::ShiftBudgetExceeded { .. })
        ));
        l.max_window_points = 50;
        assert!(matches!(cesaro_average(&a, &w, &l), Err(SeqError::WindowTooLarge { .. })));
        let w1 = FolnerWindow::interval(10).unwrap();
        assert!(matches!(cesaro_average(&a, &w1, &lim()), Err(SeqError::ArityMismatch { .. })));
        let bad = ComplexSeqNd::new(1, 0.5, |_| Complex64::new(1.0, 0.0));
        assert!(matches!(cesaro_average(&bad, &w1, &lim()), Err(SeqError::BoundViolation { .. })));
    }
}
