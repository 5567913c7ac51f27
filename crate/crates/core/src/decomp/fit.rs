//! Orthogonal matching pursuit against a [`NilDictionary`] and uniformity of
//! the residual.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dictionary::{gram_from_columns, inner, sample, AtomKind, NilDictionary};
use super::DecompError;
use crate::budget::{product, Limits};
use crate::seqcore::{gowers_norm, ComplexSeqNd, FiniteGridFn, FolnerWindow};

/// Gram matrices with a larger condition number stop the fit.
pub const MAX_GRAM_CONDITION: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedAtom {
    /// Position in the dictionary.
    pub index: usize,
    pub atom: AtomKind,
    pub label: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxTerms,
    BelowTolerance,
    DictionaryExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityMetric {
    pub order: usize,
    pub n_wrap: usize,
    pub value: f64,
    /// `d·k / N_wrap`, the size of the boundary effect of wrapping.
    pub boundary_estimate: f64,
    /// Always true: the wrapped-grid norm stands in for a Følner-window
    /// uniformity norm.
    pub proxy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitMetrics {
    pub input_norm: f64,
    /// Besicovitch norm of `a_err` on the window.
    pub residual_norm: f64,
    /// `Σ |c_j|`.
    pub structured_sup_bound: f64,
    pub structured_window_max: f64,
    pub input_window_max: f64,
    pub input_sup_bound: f64,
    pub gram_condition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub window: FolnerWindow,
    pub dictionary_size: usize,
    pub atoms: Vec<SelectedAtom>,
    pub stop: StopReason,
    /// `|⟨r, φ⟩_w|` of each selected atom at selection time.
    pub correlations: Vec<f64>,
    /// Residual norm after each step, starting with the input norm.
    pub residual_history: Vec<f64>,
    pub metrics: FitMetrics,
    pub uniformity: Vec<UniformityMetric>,
    pub warnings: Vec<String>,
}

/// `a = a_st + a_err` with `a_st = Σ c_j φ_j`.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub summary: FitSummary,
    #[serde(skip)]
    pub structured: ComplexSeqNd,
    #[serde(skip)]
    pub residual: ComplexSeqNd,
}

impl DecompositionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summaries serialize")
    }
}

fn norm(v: &[Complex64]) -> f64 {
    inner(v, v).re.max(0.0).sqrt()
}

fn condition(g: &DMatrix<Complex64>) -> f64 {
    let sv = g.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Least-squares coefficients of `target` on `cols` via QR.
fn solve(cols: &[Vec<Complex64>], target: &[Complex64]) -> Result<Vec<Complex64>, DecompError> {
    let m = target.len();
    let k = cols.len();
    let a = DMatrix::from_fn(m, k, |i, j| cols[j][i]);
    let qr = a.qr();
    let qtb = qr.q().adjoint() * DVector::from_column_slice(target);
    let c = qr
        .r()
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| DecompError::Numerical("singular triangular factor".into()))?;
    Ok(c.iter().copied().collect())
}

/// Greedy selection of the atom maximizing `|⟨r, φ⟩_w|` (first index on ties),
/// followed by a least-squares re-solve over all selected atoms. Stops after
/// `max_terms` atoms or when the best correlation drops below `tol`.
pub fn fit_structured(
    a: &ComplexSeqNd,
    window: &FolnerWindow,
    dict: &NilDictionary,
    max_terms: usize,
    tol: f64,
    limits: &Limits,
) -> Result<DecompositionReport, DecompError> {
    if a.arity() != dict.arity() || window.arity() != dict.arity() {
        return Err(DecompError::ArityMismatch { expected: dict.arity(), got: a.arity().max(window.arity()) });
    }
    if !(tol >= 0.0) {
        return Err(DecompError::InvalidAtom("tolerance must be nonnegative".into()));
    }
    let card = window.check_size(limits.max_window_points)?;
    let work = product([card, dict.len() as u64, max_terms.max(1) as u64]);
    if work > limits.max_work {
        return Err(DecompError::BudgetExceeded { work, max: limits.max_work });
    }
    let target = sample(a, window)?;
    let cache: Option<Vec<Vec<Complex64>>> = if product([card, dict.len() as u64]) <= limits.max_sample_points {
        Some(
            dict.atoms()
                .par_iter()
                .map(|atom| sample(atom.seq(), window))
                .collect::<Result<_, _>>()?,
        )
    } else {
        None
    };
    let column = |j: usize| -> Result<Vec<Complex64>, DecompError> {
        match &cache {
            Some(c) => Ok(c[j].clone()),
            None => sample(dict.atoms()[j].seq(), window),
        }
    };

    let input_norm = norm(&target);
    let mut residual = target.clone();
    let mut selected: Vec<usize> = Vec::new();
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    let mut coeffs: Vec<Complex64> = Vec::new();
    let mut correlations = Vec::new();
    let mut history = vec![input_norm];
    let mut gram_condition = 1.0;
    let stop = loop {
        if selected.len() >= max_terms {
            break StopReason::MaxTerms;
        }
        let scores: Vec<Option<f64>> = (0..dict.len())
            .into_par_iter()
            .map(|j| {
                if selected.contains(&j) {
                    return Ok(None);
                }
                let col = match &cache {
                    Some(c) => std::borrow::Cow::Borrowed(&c[j]),
                    None => std::borrow::Cow::Owned(sample(dict.atoms()[j].seq(), window)?),
                };
                Ok(Some(inner(&residual, &col).norm()))
            })
            .collect::<Result<_, DecompError>>()?;
        let mut best: Option<(usize, f64)> = None;
        for (j, s) in scores.iter().enumerate() {
            if let Some(s) = *s {
                if best.map_or(true, |(_, b)| s > b) {
                    best = Some((j, s));
                }
            }
        }
        let Some((j, score)) = best else {
            break StopReason::DictionaryExhausted;
        };
        if score < tol {
            break StopReason::BelowTolerance;
        }
        let mut trial = cols.clone();
        trial.push(column(j)?);
        let cond = condition(&gram_from_columns(&trial));
        if cond > MAX_GRAM_CONDITION {
            let partial = summarize(
                a, window, dict, &selected, &coeffs, &cols, &target, &residual,
                StopReason::MaxTerms, correlations, history, gram_condition, input_norm,
            );
            return Err(DecompError::GramIllConditioned { condition: cond, partial: Box::new(partial) });
        }
        gram_condition = cond;
        cols = trial;
        selected.push(j);
        correlations.push(score);
        coeffs = solve(&cols, &target)?;
        for (i, r) in residual.iter_mut().enumerate() {
            let st: Complex64 = cols.iter().zip(&coeffs).map(|(c, k)| c[i] * k).sum();
            *r = target[i] - st;
        }
        history.push(norm(&residual));
    };

    let summary = summarize(
        a, window, dict, &selected, &coeffs, &cols, &target, &residual, stop, correlations, history,
        gram_condition, input_norm,
    );
    let atoms: Vec<ComplexSeqNd> = selected.iter().map(|&j| dict.atoms()[j].seq().clone()).collect();
    let cs = coeffs.clone();
    let bound = summary.metrics.structured_sup_bound;
    let structured = ComplexSeqNd::fallible(a.arity(), bound, move |n| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, c) in atoms.iter().zip(&cs) {
            acc += s.eval(n)? * c;
        }
        Ok(acc)
    })
    .with_label("a_st");
    let residual = a.sub(&structured)?.with_label("a_err");
    Ok(DecompositionReport { summary, structured, residual })
}

#[allow(clippy::too_many_arguments)]
fn summarize(
    a: &ComplexSeqNd,
    window: &FolnerWindow,
    dict: &NilDictionary,
    selected: &[usize],
    coeffs: &[Complex64],
    cols: &[Vec<Complex64>],
    target: &[Complex64],
    residual: &[Complex64],
    stop: StopReason,
    correlations: Vec<f64>,
    residual_history: Vec<f64>,
    gram_condition: f64,
    input_norm: f64,
) -> FitSummary {
    let atoms = selected
        .iter()
        .zip(coeffs)
        .map(|(&j, c)| SelectedAtom {
            index: j,
            atom: dict.atoms()[j].kind.clone(),
            label: dict.atoms()[j].label(),
            re: c.re,
            im: c.im,
        })
        .collect();
    let structured_window_max = (0..target.len())
        .map(|i| cols.iter().zip(coeffs).map(|(c, k)| c[i] * k).sum::<Complex64>().norm())
        .fold(0.0, f64::max);
    let input_window_max = target.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut warnings = Vec::new();
    if structured_window_max > input_window_max + 1e-12 {
        warnings.push(format!(
            "structured part reaches {structured_window_max:.6} on the window, above max |a| = {input_window_max:.6}"
        ));
    }
    FitSummary {
        window: window.clone(),
        dictionary_size: dict.len(),
        atoms,
        stop,
        correlations,
        residual_history,
        metrics: FitMetrics {
            input_norm,
            residual_norm: norm(residual),
            structured_sup_bound: coeffs.iter().map(|c| c.norm()).sum(),
            structured_window_max,
            input_window_max,
            input_sup_bound: a.bound(),
            gram_condition,
        },
        uniformity: Vec::new(),
        warnings,
    }
}

/// `‖a_err‖_{U^k}` on `Z_{N_wrap}^d`, with the grid filled by the first
/// `N_wrap` window points along each axis (restriction, no periodization).
/// The result is also appended to the report summary.
pub fn residual_uniformity(
    report: &mut DecompositionReport,
    k: usize,
    n_wrap: usize,
    limits: &Limits,
) -> Result<UniformityMetric, DecompError> {
    let w = &report.summary.window;
    if n_wrap == 0 || w.sides().iter().any(|&s| (s as usize) < n_wrap) {
        return Err(DecompError::WindowTooSmall { sides: w.sides().to_vec(), n_wrap });
    }
    let d = w.arity();
    let offset = w.offset().to_vec();
    let mut failure = None;
    let mut p = vec![0i64; d];
    let grid = FiniteGridFn::from_fn(n_wrap, d, |idx| {
        for i in 0..d {
            p[i] = offset[i] + 1 + idx[i] as i64;
        }
        report.residual.eval(&p).unwrap_or_else(|e| {
            failure.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        })
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let value = gowers_norm(&grid, k, limits)?;
    let m = UniformityMetric {
        order: k,
        n_wrap,
        value,
        boundary_estimate: (d * k) as f64 / n_wrap as f64,
        proxy: true,
    };
    report.summary.uniformity.push(m.clone());
    Ok(m)
}
