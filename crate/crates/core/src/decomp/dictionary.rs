//! Dictionaries of unit-bounded structured atoms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DecompError;
use crate::budget::{product, Limits};
use crate::nil::NilsystemSpec;
use crate::phase::{e, IntLinComb};
use crate::seqcore::{ComplexSeqNd, FolnerWindow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AtomKind {
    /// `e(n·θ)`.
    LinearPhase { theta: Vec<f64> },
    /// `e(θ n_i n_j)`.
    QuadraticPhase { theta: f64, i: usize, j: usize },
    /// `Ψ(orbit(n)) / scale` with `scale = max(1, sup|Ψ|)`.
    Nilsequence { spec: Box<NilsystemSpec>, scale: f64 },
}

fn label_of(kind: &AtomKind) -> String {
    match kind {
        AtomKind::LinearPhase { theta } => format!("e(n·{theta:?})"),
        AtomKind::QuadraticPhase { theta, i, j } => format!("e({theta}·n{i}·n{j})"),
        AtomKind::Nilsequence { .. } => "nilsequence".into(),
    }
}

#[derive(Clone)]
pub struct Atom {
    pub kind: AtomKind,
    seq: ComplexSeqNd,
}

impl std::fmt::Debug for Atom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.kind.fmt(f)
    }
}

impl Atom {
    pub fn seq(&self) -> &ComplexSeqNd {
        &self.seq
    }

    pub fn label(&self) -> String {
        label_of(&self.kind)
    }

    fn build(kind: AtomKind, arity: usize) -> Result<Self, DecompError> {
        let seq = match &kind {
            AtomKind::LinearPhase { theta } => {
                if theta.len() != arity {
                    return Err(DecompError::ArityMismatch { expected: arity, got: theta.len() });
                }
                if theta.iter().any(|t| !t.is_finite()) {
                    return Err(DecompError::InvalidAtom("frequencies must be finite".into()));
                }
                ComplexSeqNd::linear_phase(theta)
            }
            &AtomKind::QuadraticPhase { theta, i, j } => {
                if i >= arity || j >= arity || !theta.is_finite() {
                    return Err(DecompError::InvalidAtom(format!("bad quadratic atom ({theta}, {i}, {j})")));
                }
                ComplexSeqNd::fallible(arity, 1.0, move |n| {
                    let m = (n[i] as i128)
                        .checked_mul(n[j] as i128)
                        .ok_or_else(|| crate::seqcore::SeqError::Evaluation("n_i n_j overflows".into()))?;
                    let mut c = IntLinComb::new();
                    c.push(m, theta);
                    Ok(e(c.frac()))
                })
            }
            AtomKind::Nilsequence { spec, scale } => {
                if spec.arity() != arity {
                    return Err(DecompError::ArityMismatch { expected: arity, got: spec.arity() });
                }
                let inv = 1.0 / scale;
                spec.as_sequence().scale(Complex64::new(inv, 0.0)).with_bound(1.0)
            }
        };
        let seq = seq.with_label(label_of(&kind));
        Ok(Self { kind, seq })
    }
}

/// All reduced fractions `p/q ∈ [0, 1)` with `q ≤ Q`, ascending.
pub fn farey_fractions(q: u64) -> Vec<f64> {
    let mut out: Vec<(u64, u64)> = vec![(0, 1)];
    for den in 2..=q.max(1) {
        for num in 1..den {
            if gcd(num, den) == 1 {
                out.push((num, den));
            }
        }
    }
    out.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    out.into_iter().map(|(p, q)| p as f64 / q as f64).collect()
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone)]
pub struct NilDictionary {
    arity: usize,
    atoms: Vec<Atom>,
}

impl NilDictionary {
    pub fn new(arity: usize) -> Result<Self, DecompError> {
        if arity == 0 || arity > 8 {
            return Err(DecompError::InvalidAtom("arity must lie in 1..=8".into()));
        }
        Ok(Self { arity, atoms: Vec::new() })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn push(&mut self, kind: AtomKind) -> Result<&mut Self, DecompError> {
        if self.atoms.iter().any(|a| a.kind == kind) {
            return Err(DecompError::DuplicateAtom(format!("{kind:?}")));
        }
        self.atoms.push(Atom::build(kind, self.arity)?);
        Ok(self)
    }

    pub fn push_linear(&mut self, theta: Vec<f64>) -> Result<&mut Self, DecompError> {
        self.push(AtomKind::LinearPhase { theta })
    }

    pub fn push_quadratic(&mut self, theta: f64, i: usize, j: usize) -> Result<&mut Self, DecompError> {
        self.push(AtomKind::QuadraticPhase { theta, i, j })
    }

    pub fn push_nilsequence(&mut self, spec: NilsystemSpec) -> Result<&mut Self, DecompError> {
        let scale = spec.sup_bound().max(1.0);
        self.push(AtomKind::Nilsequence { spec: Box::new(spec), scale })
    }

    /// Linear phases over the product grid `F^d`, where `F` is the Farey
    /// fractions of order `Q` followed by `extra` (reduced mod 1, duplicates
    /// dropped). Coordinates vary lexicographically, last fastest.
    pub fn frequency_grid(arity: usize, q: u64, extra: &[f64]) -> Result<Self, DecompError> {
        let mut freqs = farey_fractions(q);
        for &x in extra {
            let r = crate::phase::frac(x);
            if !freqs.contains(&r) {
                freqs.push(r);
            }
        }
        let mut dict = Self::new(arity)?;
        let total = (freqs.len() as u64).checked_pow(arity as u32).unwrap_or(u64::MAX);
        if total > 1 << 20 {
            return Err(DecompError::BudgetExceeded { work: total, max: 1 << 20 });
        }
        let mut idx = vec![0usize; arity];
        for _ in 0..total {
            dict.push_linear(idx.iter().map(|&i| freqs[i]).collect())?;
            for k in (0..arity).rev() {
                idx[k] += 1;
                if idx[k] < freqs.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(dict)
    }

    /// `G_ij = ⟨φ_j, φ_i⟩_w = |w|⁻¹ Σ φ_j conj φ_i`.
    pub fn gram(&self, window: &FolnerWindow, limits: &Limits) -> Result<DMatrix<Complex64>, DecompError> {
        gram_of(self.atoms.iter().map(|a| &a.seq).collect::<Vec<_>>().as_slice(), window, limits)
    }
}

pub(crate) fn gram_of(
    seqs: &[&ComplexSeqNd],
    window: &FolnerWindow,
    limits: &Limits,
) -> Result<DMatrix<Complex64>, DecompError> {
    let card = window.check_size(limits.max_window_points)?;
    let work = product([card, seqs.len() as u64, seqs.len() as u64]);
    if work > limits.max_work {
        return Err(DecompError::BudgetExceeded { work, max: limits.max_work });
    }
    let cols: Vec<Vec<Complex64>> = seqs
        .par_iter()
        .map(|s| sample(s, window))
        .collect::<Result<_, _>>()?;
    Ok(gram_from_columns(&cols))
}

pub(crate) fn sample(s: &ComplexSeqNd, window: &FolnerWindow) -> Result<Vec<Complex64>, DecompError> {
    let mut p = vec![0i64; window.arity()];
    (0..window.cardinality())
        .map(|i| {
            window.point_into(i, &mut p);
            s.eval_checked(&p).map_err(DecompError::from)
        })
        .collect()
}

pub(crate) fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    crate::sum::compensated(u.iter().zip(v).map(|(a, b)| a * b.conj())) / u.len() as f64
}

pub(crate) fn gram_from_columns(cols: &[Vec<Complex64>]) -> DMatrix<Complex64> {
    let k = cols.len();
    DMatrix::from_fn(k, k, |i, j| inner(&cols[j], &cols[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nil::{NilKind, ObservableSpec};

    #[test]
    fn farey() {
        assert_eq!(farey_fractions(1), vec![0.0]);
        let f = farey_fractions(5);
        // 1 + φ(2) + φ(3) + φ(4) + φ(5) = 1 + 1 + 2 + 2 + 4.
        assert_eq!(f.len(), 10);
        assert!(f.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(f[1], 0.2);
    }

    #[test]
    fn grid_and_duplicates() {
        let d = NilDictionary::frequency_grid(2, 3, &[0.5, 2f64.sqrt()]).unwrap();
        // Farey(3) = {0, 1/3, 1/2, 2/3}; 0.5 is already present.
        assert_eq!(d.len(), 25);
        let mut d1 = NilDictionary::new(1).unwrap();
        d1.push_linear(vec![0.25]).unwrap();
        assert!(matches!(d1.push_linear(vec![0.25]), Err(DecompError::DuplicateAtom(_))));
        assert!(d1.push_linear(vec![0.25, 0.5]).is_err());
        assert!(d1.push_quadratic(0.1, 0, 1).is_err());
    }

    #[test]
    fn atoms_are_unit_bounded() {
        let mut d = NilDictionary::new(1).unwrap();
        d.push_linear(vec![0.3]).unwrap().push_quadratic(2f64.sqrt(), 0, 0).unwrap();
        let spec = NilsystemSpec::new(
            NilKind::Torus { translations: vec![vec![0.1]] },
            ObservableSpec::TrigPoly {
                terms: vec![
                    crate::nil::TrigTerm { freq: vec![1], re: 1.0, im: 0.0 },
                    crate::nil::TrigTerm { freq: vec![2], re: 1.0, im: 0.0 },
                ],
            },
            16,
        )
        .unwrap();
        d.push_nilsequence(spec).unwrap();
        let w = FolnerWindow::interval(200).unwrap();
        for a in d.atoms() {
            assert_eq!(a.seq().bound(), 1.0);
            for p in w.points() {
                assert!(a.seq().eval(&p).unwrap().norm() <= 1.0 + 1e-12);
            }
        }
        // e(√2 n²) at n = 3.
        let q = d.atoms()[1].seq().eval(&[3]).unwrap();
        assert!((q - e((9.0 * 2f64.sqrt()).fract())).norm() < 1e-12);
    }

    #[test]
    fn gram_of_orthogonal_characters() {
        let d = NilDictionary::frequency_grid(1, 4, &[]).unwrap();
        // Characters j/12 are orthogonal over 12 consecutive points.
        let g = d.gram(&FolnerWindow::interval(12).unwrap(), &Limits::default()).unwrap();
        for i in 0..d.len() {
            for j in 0..d.len() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)] - target).norm() < 1e-13);
            }
        }
    }
}
