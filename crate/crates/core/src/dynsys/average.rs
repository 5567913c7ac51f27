//! Weighted multiple ergodic averages, correlation sequences and Cauchy
//! probes, all evaluated in frequency space.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::torus::{compose_iterate, CommutingTorusSystem, GridFunction, PolynomialMapping, TorusObservable};
use super::DynError;
use crate::budget::{product, Limits};
use crate::seqcore::{ComplexSeqNd, FolnerWindow, SeqError};
use crate::sum::{ComplexAcc, CHUNK};

/// `w(n) ∏_i f_i(T_{p⃗_i(n)} x)` averaged over a window.
#[derive(Debug, Clone)]
pub struct AverageSpec {
    pub weight: ComplexSeqNd,
    pub observables: Vec<TorusObservable>,
    pub iterates: Vec<PolynomialMapping>,
}

impl AverageSpec {
    fn validate(&self, system: &CommutingTorusSystem, window: &FolnerWindow) -> Result<(), DynError> {
        if self.observables.is_empty() || self.observables.len() != self.iterates.len() {
            return Err(DynError::InvalidSystem(
                "need one polynomial iterate per observable, at least one".into(),
            ));
        }
        let d = self.weight.arity();
        if window.arity() != d {
            return Err(DynError::ArityMismatch {
                expected: d,
                got: window.arity(),
            });
        }
        for p in &self.iterates {
            if p.arity() != d {
                return Err(DynError::ArityMismatch {
                    expected: d,
                    got: p.arity(),
                });
            }
            if p.codim() != system.map_count() {
                return Err(DynError::ArityMismatch {
                    expected: system.map_count(),
                    got: p.codim(),
                });
            }
        }
        for f in &self.observables {
            if f.dim() != system.dim() {
                return Err(DynError::ArityMismatch {
                    expected: system.dim(),
                    got: f.dim(),
                });
            }
        }
        Ok(())
    }

    /// `sup|w| · ∏ sup|f_i|`.
    pub fn bound(&self) -> f64 {
        self.weight.bound() * self.observables.iter().map(|f| f.sup_bound()).product::<f64>()
    }
}

fn product_at(
    system: &CommutingTorusSystem,
    fs: &[TorusObservable],
    maps: &[PolynomialMapping],
    n: &[i64],
) -> Result<TorusObservable, DynError> {
    let mut acc: Option<TorusObservable> = None;
    for (f, p) in fs.iter().zip(maps) {
        let g = compose_iterate(system, f, &p.eval(n)?)?;
        acc = Some(match acc {
            None => g,
            Some(a) => a.mul(&g)?,
        });
    }
    Ok(acc.expect("at least one observable"))
}

/// Exact frequency-space average; no grid rendering.
pub(crate) fn average_observable(
    system: &CommutingTorusSystem,
    spec: &AverageSpec,
    window: &FolnerWindow,
    limits: &Limits,
) -> Result<TorusObservable, DynError> {
    spec.validate(system, window)?;
    let card = window.check_size(limits.max_window_points)?;
    let per_point = product(spec.observables.iter().map(|f| f.len().max(1) as u64));
    let work = card
        .saturating_mul(per_point)
        .saturating_mul(spec.observables.len() as u64);
    if work > limits.max_work {
        return Err(DynError::BudgetExceeded {
            work,
            max: limits.max_work,
        });
    }
    let chunks = card.div_ceil(CHUNK);
    let parts: Vec<Result<BTreeMap<Vec<i64>, ComplexAcc>, DynError>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc: BTreeMap<Vec<i64>, ComplexAcc> = BTreeMap::new();
            for i in c * CHUNK..((c + 1) * CHUNK).min(card) {
                let n = window.point(i);
                let w = spec.weight.eval_checked(&n)?;
                if w == Complex64::default() {
                    continue;
                }
                let prod = product_at(system, &spec.observables, &spec.iterates, &n)?;
                for (k, v) in prod.terms() {
                    acc.entry(k.clone()).or_default().add(w * v);
                }
                if acc.len() as u64 > limits.max_sample_points {
                    return Err(DynError::BudgetExceeded {
                        work: acc.len() as u64,
                        max: limits.max_sample_points,
                    });
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total: BTreeMap<Vec<i64>, ComplexAcc> = BTreeMap::new();
    for part in parts {
        for (k, v) in part? {
            total.entry(k).or_default().add(v.value());
        }
    }
    TorusObservable::from_terms(
        system.dim(),
        total.into_iter().map(|(k, v)| (k, v.value() / card as f64)),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedAverage {
    /// The average as a trigonometric polynomial.
    pub average: TorusObservable,
    /// `‖A‖_{L²}` by Parseval.
    pub l2: f64,
    pub grid: GridFunction,
    /// `‖A‖_{L²}` by the midpoint rule on the grid.
    pub l2_quadrature: f64,
    /// `sup|w| · ∏ sup|f_i|`, an upper bound for `l2`.
    pub bound: f64,
    pub points: u64,
}

/// `(1/|I|) Σ_{n∈I} w(n) ∏_i f_i(T_{p⃗_i(n)} x)`.
pub fn weighted_multiple_average(
    system: &CommutingTorusSystem,
    spec: &AverageSpec,
    window: &FolnerWindow,
    limits: &Limits,
) -> Result<WeightedAverage, DynError> {
    let average = average_observable(system, spec, window, limits)?;
    let q = system.quadrature();
    let cells = crate::budget::pow(q as u64, system.dim() as u64);
    let work = cells.saturating_mul(average.len().max(1) as u64);
    if work > limits.max_work || cells > limits.max_sample_points {
        return Err(DynError::BudgetExceeded {
            work,
            max: limits.max_work,
        });
    }
    let grid = GridFunction::render(&average, q);
    let l2_quadrature = grid.l2_norm();
    let l2 = average.l2_norm();
    let bound = spec.bound();
    debug_assert!(l2 <= bound * (1.0 + 1e-12) + 1e-12);
    Ok(WeightedAverage {
        average,
        l2,
        grid,
        l2_quadrature,
        bound,
        points: window.cardinality(),
    })
}

/// `a(n) = ∫ f_0 · ∏_i T_{p⃗_i(n)} f_i dμ`, exact in frequency space.
pub fn correlation_sequence(
    system: &CommutingTorusSystem,
    f0: &TorusObservable,
    fs: &[TorusObservable],
    maps: &[PolynomialMapping],
) -> Result<ComplexSeqNd, DynError> {
    if fs.is_empty() || fs.len() != maps.len() {
        return Err(DynError::InvalidSystem("need one iterate per observable".into()));
    }
    let d = maps[0].arity();
    for p in maps {
        if p.arity() != d || p.codim() != system.map_count() {
            return Err(DynError::ArityMismatch {
                expected: system.map_count(),
                got: p.codim(),
            });
        }
    }
    for f in fs.iter().chain(std::iter::once(f0)) {
        if f.dim() != system.dim() {
            return Err(DynError::ArityMismatch {
                expected: system.dim(),
                got: f.dim(),
            });
        }
    }
    let bound = f0.sup_bound() * fs.iter().map(|f| f.sup_bound()).product::<f64>();
    let (system, f0, fs, maps) = (system.clone(), f0.clone(), fs.to_vec(), maps.to_vec());
    Ok(ComplexSeqNd::fallible(d, bound, move |n| {
        let run = || -> Result<Complex64, DynError> {
            let last = fs.len() - 1;
            let mut acc = f0.clone();
            for (f, p) in fs[..last].iter().zip(&maps[..last]) {
                acc = acc.mul(&compose_iterate(&system, f, &p.eval(n)?)?)?;
            }
            let tail = compose_iterate(&system, &fs[last], &maps[last].eval(n)?)?;
            Ok(acc.integral_of_product(&tail))
        };
        run().map_err(|e| SeqError::Evaluation(e.to_string()))
    })
    .with_label("correlation"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    /// Window cardinalities for `N`, `2N`, `4N`.
    pub horizons: [u64; 3],
    /// `‖A_N‖`, `‖A_{2N}‖`, `‖A_{4N}‖`.
    pub norms: [f64; 3],
    /// `‖A_N − A_{2N}‖_{L²}`.
    pub delta_n: f64,
    /// `‖A_{2N} − A_{4N}‖_{L²}`.
    pub delta_2n: f64,
    /// `delta_2n / delta_n` (NaN when `delta_n = 0`).
    pub ratio: f64,
    /// `delta_2n > delta_n + tolerance`.
    pub non_cauchy: bool,
    pub tolerance: f64,
}

/// Compares averages over the window and its dilates by 2 and 4.
pub fn cauchy_convergence_probe(
    system: &CommutingTorusSystem,
    spec: &AverageSpec,
    window: &FolnerWindow,
    limits: &Limits,
) -> Result<CauchyReport, DynError> {
    let windows = [window.clone(), window.scaled(2), window.scaled(4)];
    let avgs = windows
        .iter()
        .map(|w| average_observable(system, spec, w, limits))
        .collect::<Result<Vec<_>, _>>()?;
    let delta_n = avgs[0].sub(&avgs[1]).l2_norm();
    let delta_2n = avgs[1].sub(&avgs[2]).l2_norm();
    let tolerance = 1e-12 * spec.bound().max(1.0);
    Ok(CauchyReport {
        horizons: [windows[0].cardinality(), windows[1].cardinality(), windows[2].cardinality()],
        norms: [avgs[0].l2_norm(), avgs[1].l2_norm(), avgs[2].l2_norm()],
        delta_n,
        delta_2n,
        ratio: if delta_n > 0.0 { delta_2n / delta_n } else { f64::NAN },
        non_cauchy: delta_2n > delta_n + tolerance,
        tolerance,
    })
}
