//! Finite-horizon Host–Kra seminorms for a single map.
//!
//! `|||f|||_1 = ‖B_N f‖_{L²}` with the Birkhoff average
//! `B_N f = N⁻¹ Σ_{n=1}^{N} f∘T^n`, and
//! `|||f|||_k^{2^k} = N⁻¹ Σ_{n=1}^{N} |||f · conj(f∘T^n)|||_{k−1}^{2^{k−1}}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::torus::{compose_iterate, CommutingTorusSystem, TorusObservable};
use super::DynError;
use crate::budget::{pow, Limits};
use crate::phase::{e, IntLinComb};
use crate::sum::det_sum_real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HkEstimate {
    pub value: f64,
    /// `|||f|||_k^{2^k}` before clamping.
    pub power: f64,
    pub clamp: f64,
    pub order: usize,
    pub horizon: u64,
    /// All frequencies were fixed by the map, so Birkhoff sums were summed in
    /// closed form.
    pub closed_form: bool,
}

struct Ctx<'a> {
    system: &'a CommutingTorusSystem,
    map: usize,
    horizon: u64,
    fixed: bool,
}

impl Ctx<'_> {
    fn iterate(&self, f: &TorusObservable, n: i64) -> Result<TorusObservable, DynError> {
        let mut v = vec![0i64; self.system.map_count()];
        v[self.map] = n;
        compose_iterate(self.system, f, &v)
    }

    /// `B_N f`.
    fn birkhoff(&self, f: &TorusObservable) -> Result<TorusObservable, DynError> {
        let n = self.horizon;
        if self.fixed {
            // Fixed k: the phase after n steps is n·(k·b), so the sum is geometric.
            let b = &self.system.maps()[self.map].shift;
            let mut out = TorusObservable::zero(f.dim());
            for (k, c) in f.terms() {
                let mut phase = IntLinComb::new();
                for (&kj, &bj) in k.iter().zip(b) {
                    phase.push(kj as i128, bj);
                }
                let z = phase.phase();
                let g = if (Complex64::new(1.0, 0.0) - z).norm() < 1e-6 {
                    crate::sum::compensated((1..=n).map(|m| {
                        phase.scaled(m as i128).map_or(Complex64::new(1.0, 0.0), |p| p.phase())
                    })) / n as f64
                } else {
                    let zn = phase
                        .scaled(n as i128)
                        .map(|p| p.phase())
                        .unwrap_or_else(|| e(phase.approx() * n as f64));
                    z * (Complex64::new(1.0, 0.0) - zn) / (Complex64::new(1.0, 0.0) - z) / n as f64
                };
                out.add_term(k.clone(), c * g);
            }
            return Ok(out);
        }
        let mut out = TorusObservable::zero(f.dim());
        for m in 1..=n as i64 {
            out = out.add(&self.iterate(f, m)?);
        }
        Ok(out.scale(Complex64::new(1.0 / n as f64, 0.0)))
    }

    fn power(&self, f: &TorusObservable, k: usize) -> Result<f64, DynError> {
        if k == 1 {
            let b = self.birkhoff(f)?.l2_norm();
            return Ok(b * b);
        }
        let n = self.horizon;
        let fails = std::sync::Mutex::new(None::<(u64, DynError)>);
        let total = det_sum_real(n, |i| {
            let run = || -> Result<f64, DynError> {
                let g = f.mul(&self.iterate(f, i as i64 + 1)?.conj())?;
                self.power(&g, k - 1)
            };
            run().unwrap_or_else(|err| {
                let mut slot = fails.lock().unwrap();
                if slot.as_ref().map_or(true, |(j, _)| i < *j) {
                    *slot = Some((i, err));
                }
                0.0
            })
        });
        if let Some((_, err)) = fails.into_inner().unwrap() {
            return Err(err);
        }
        Ok(total / n as f64)
    }
}

/// `|||f|||_k` at horizon `N_av` for map `map` of the system.
pub fn hk_seminorm(
    system: &CommutingTorusSystem,
    map: usize,
    f: &TorusObservable,
    k: usize,
    horizon: u64,
    limits: &Limits,
) -> Result<HkEstimate, DynError> {
    if map >= system.map_count() {
        return Err(DynError::InvalidSystem(format!("map index {map} out of range")));
    }
    if !(1..=3).contains(&k) {
        return Err(DynError::InvalidSystem("seminorm order must be 1, 2 or 3".into()));
    }
    if horizon == 0 {
        return Err(DynError::InvalidSystem("horizon must be positive".into()));
    }
    if f.dim() != system.dim() {
        return Err(DynError::ArityMismatch {
            expected: system.dim(),
            got: f.dim(),
        });
    }
    let single = CommutingTorusSystem::new(system.dim(), vec![system.maps()[map].clone()], system.quadrature())?;
    let fixed = f.terms().all(|(k, _)| single.fixes_frequency(k));
    // Products at depth k have up to |f|^{2^{k-1}} terms.
    let terms = pow(f.len().max(1) as u64, 1 << (k - 1));
    let inner = if fixed { 1 } else { horizon };
    let work = pow(horizon, k as u64 - 1).saturating_mul(inner).saturating_mul(terms);
    if work > limits.max_work {
        return Err(DynError::BudgetExceeded {
            work,
            max: limits.max_work,
        });
    }
    let ctx = Ctx {
        system: &single,
        map: 0,
        horizon,
        fixed,
    };
    let power = ctx.power(f, k)?;
    let clamp = if power < 0.0 { -power } else { 0.0 };
    Ok(HkEstimate {
        value: power.max(0.0).powf(1.0 / (1u64 << k) as f64),
        power,
        clamp,
        order: k,
        horizon,
        closed_form: fixed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynsys::{AffineMap, IntMatrix};

    fn lim() -> Limits {
        Limits::default()
    }

    fn golden_rotation() -> CommutingTorusSystem {
        CommutingTorusSystem::rotations(vec![vec![(5f64.sqrt() - 1.0) / 2.0]], 16).unwrap()
    }

    #[test]
    fn character_under_rotation() {
        let s = golden_rotation();
        let f = TorusObservable::character(vec![1]);
        let h1 = hk_seminorm(&s, 0, &f, 1, 10_000, &lim()).unwrap();
        assert!(h1.value < 1e-3);
        assert!(h1.closed_form);
        let h2 = hk_seminorm(&s, 0, &f, 2, 10_000, &lim()).unwrap();
        assert!((h2.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn u2_closed_form_for_trig_polynomials() {
        let s = golden_rotation();
        let coeffs = [(vec![1], Complex64::new(0.5, 0.0)), (vec![-2], Complex64::new(0.0, 0.3)), (vec![3], Complex64::new(0.1, 0.1))];
        let f = TorusObservable::from_terms(1, coeffs.clone()).unwrap();
        let oracle: f64 = coeffs.iter().map(|(_, c)| c.norm_sqr().powi(2)).sum::<f64>().powf(0.25);
        let h2 = hk_seminorm(&s, 0, &f, 2, 2000, &lim()).unwrap();
        assert!((h2.value - oracle).abs() < 1e-2, "{} vs {}", h2.value, oracle);
    }

    #[test]
    fn constants_and_monotonicity() {
        let s = golden_rotation();
        let c = TorusObservable::constant(1, Complex64::new(0.6, -0.8) * 0.5);
        for k in 1..=3 {
            let h = hk_seminorm(&s, 0, &c, k, 50, &lim()).unwrap();
            assert!((h.value - 0.5).abs() < 1e-12);
        }
        let f = TorusObservable::from_terms(1, [(vec![0], Complex64::new(0.2, 0.0)), (vec![1], Complex64::new(0.4, 0.0))]).unwrap();
        let vals: Vec<f64> = (1..=3).map(|k| hk_seminorm(&s, 0, &f, k, 200, &lim()).unwrap().value).collect();
        assert!(vals[0] <= vals[1] + 1e-9 && vals[1] <= vals[2] + 1e-9, "{vals:?}");
        assert!(vals[2] <= f.sup_bound() + 1e-12);
    }

    #[test]
    fn non_fixed_frequencies_use_direct_sums() {
        // Skew map (x, y) ↦ (x + α, y + x): e(y) is not fixed.
        let s = CommutingTorusSystem::new(
            2,
            vec![AffineMap {
                matrix: IntMatrix::from_rows(vec![vec![1, 0], vec![1, 1]]).unwrap(),
                shift: vec![2f64.sqrt() - 1.0, 0.0],
            }],
            16,
        )
        .unwrap();
        let f = TorusObservable::character(vec![0, 1]);
        let h1 = hk_seminorm(&s, 0, &f, 1, 100, &lim()).unwrap();
        assert!(!h1.closed_form);
        // Distinct frequencies: ‖B_N f‖ = N^{-1/2}.
        assert!((h1.value - 0.1).abs() < 1e-12);
        let h2 = hk_seminorm(&s, 0, &f, 2, 60, &lim()).unwrap();
        assert!(h2.value >= h1.value - 1e-12 && h2.value <= 1.0 + 1e-12);
    }
}
