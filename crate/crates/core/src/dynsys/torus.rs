//! Commuting unipotent affine maps of `T^m` acting on trigonometric
//! polynomials.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{IntMatrix, FREQ_LIMIT};
use super::DynError;
use crate::nil::TrigTerm;
use crate::phase::{dist_to_int, IntLinComb};
use crate::sum::det_sum;

/// Tolerance for the translation part of the commutation test, which is
/// evaluated exactly mod 1 on the stored doubles.
pub const COMMUTE_TOL: f64 = 1e-12;

/// A finite trigonometric polynomial `Σ_k c_k e(k·x)` on `T^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ObservableRepr", into = "ObservableRepr")]
pub struct TorusObservable {
    dim: usize,
    terms: BTreeMap<Vec<i64>, Complex64>,
}

#[derive(Serialize, Deserialize)]
struct ObservableRepr {
    dim: usize,
    terms: Vec<TrigTerm>,
}

impl TryFrom<ObservableRepr> for TorusObservable {
    type Error = DynError;

    fn try_from(r: ObservableRepr) -> Result<Self, DynError> {
        Self::from_terms(
            r.dim,
            r.terms.into_iter().map(|t| (t.freq, Complex64::new(t.re, t.im))),
        )
    }
}

impl From<TorusObservable> for ObservableRepr {
    fn from(o: TorusObservable) -> Self {
        ObservableRepr {
            dim: o.dim,
            terms: o
                .terms
                .into_iter()
                .map(|(freq, c)| TrigTerm {
                    freq,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl TorusObservable {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self, DynError>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        if dim == 0 {
            return Err(DynError::InvalidSystem("observable dimension must be positive".into()));
        }
        let mut out = Self::zero(dim);
        for (k, c) in terms {
            if k.len() != dim {
                return Err(DynError::ArityMismatch {
                    expected: dim,
                    got: k.len(),
                });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(DynError::InvalidSystem("coefficients must be finite".into()));
            }
            out.add_term(k, c);
        }
        Ok(out)
    }

    pub fn character(k: Vec<i64>) -> Self {
        let dim = k.len();
        let mut out = Self::zero(dim);
        out.add_term(k, Complex64::new(1.0, 0.0));
        out
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut out = Self::zero(dim);
        out.add_term(vec![0; dim], c);
        out
    }

    pub(crate) fn add_term(&mut self, k: Vec<i64>, c: Complex64) {
        use std::collections::btree_map::Entry;
        if c == Complex64::default() {
            return;
        }
        match self.terms.entry(k) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == Complex64::default() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, k: &[i64]) -> Complex64 {
        self.terms.get(k).copied().unwrap_or_default()
    }

    /// `Σ |c_k|`, an upper bound for the sup-norm.
    pub fn sup_bound(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// `∫ f dμ`, the zero-frequency coefficient.
    pub fn integral(&self) -> Complex64 {
        self.coefficient(&vec![0; self.dim])
    }

    /// `‖f‖_{L²}` by Parseval.
    pub fn l2_norm(&self) -> f64 {
        crate::sum::compensated(self.terms.values().map(|c| Complex64::new(c.norm_sqr(), 0.0)))
            .re
            .sqrt()
    }

    /// Largest frequency component in absolute value.
    pub fn max_frequency(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|k| k.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::default();
        for (k, c) in &self.terms {
            let mut p = IntLinComb::new();
            for (&kj, &xj) in k.iter().zip(x) {
                p.push(kj as i128, xj);
            }
            acc += c * p.phase();
        }
        acc
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.iter().map(|v| -v).collect(), c.conj()))
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), s * c);
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(k.clone(), *c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Pointwise product (convolution of coefficients).
    pub fn mul(&self, o: &Self) -> Result<Self, DynError> {
        let mut out = Self::zero(self.dim);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                let k = add_freq(k1, k2)?;
                out.add_term(k, c1 * c2);
            }
        }
        Ok(out)
    }

    /// `∫ f·g dμ` without forming the full product.
    pub fn integral_of_product(&self, o: &Self) -> Complex64 {
        let mut acc = Complex64::default();
        for (k, c) in &self.terms {
            let neg: Vec<i64> = k.iter().map(|v| -v).collect();
            if let Some(d) = o.terms.get(&neg) {
                acc += c * d;
            }
        }
        acc
    }
}

fn add_freq(a: &[i64], b: &[i64]) -> Result<Vec<i64>, DynError> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let s = *x as i128 + *y as i128;
            if s.abs() > FREQ_LIMIT {
                Err(DynError::FrequencyOverflow(format!("frequency {s} exceeds 2^62")))
            } else {
                Ok(s as i64)
            }
        })
        .collect()
}

/// Values on the `Q^m` midpoint lattice `((i + 1/2)/Q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub resolution: usize,
    pub dim: usize,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn render(f: &TorusObservable, resolution: usize) -> Self {
        let m = f.dim();
        let total = crate::budget::pow(resolution as u64, m as u64) as usize;
        let h = 1.0 / resolution as f64;
        let values = (0..total)
            .map(|i| {
                let mut rest = i;
                let mut x = vec![0.0; m];
                for j in (0..m).rev() {
                    x[j] = ((rest % resolution) as f64 + 0.5) * h;
                    rest /= resolution;
                }
                f.eval(&x)
            })
            .collect();
        Self {
            resolution,
            dim: m,
            values,
        }
    }

    pub fn mean(&self) -> Complex64 {
        det_sum(self.values.len() as u64, |i| self.values[i as usize]) / self.values.len() as f64
    }

    /// `(mean |v|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let s = det_sum(self.values.len() as u64, |i| {
            Complex64::new(self.values[i as usize].norm_sqr(), 0.0)
        });
        (s.re / self.values.len() as f64).max(0.0).sqrt()
    }
}

/// One map `x ↦ A x + b (mod 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub matrix: IntMatrix,
    pub shift: Vec<f64>,
}

impl AffineMap {
    pub fn rotation(shift: Vec<f64>) -> Self {
        Self {
            matrix: IntMatrix::identity(shift.len()),
            shift,
        }
    }
}

/// `ℓ` commuting unipotent affine maps of `T^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutingTorusSystem {
    dim: usize,
    maps: Vec<AffineMap>,
    quadrature: usize,
}

impl CommutingTorusSystem {
    pub fn new(dim: usize, maps: Vec<AffineMap>, quadrature: usize) -> Result<Self, DynError> {
        if dim == 0 || maps.is_empty() || quadrature == 0 {
            return Err(DynError::InvalidSystem(
                "dimension, map count and quadrature resolution must be positive".into(),
            ));
        }
        for (i, t) in maps.iter().enumerate() {
            if t.matrix.dim() != dim || t.shift.len() != dim {
                return Err(DynError::InvalidSystem(format!("map {i} has the wrong dimension")));
            }
            if t.shift.iter().any(|b| !(0.0..1.0).contains(b)) {
                return Err(DynError::InvalidSystem(format!("map {i}: shift must lie in [0,1)^m")));
            }
            if !t.matrix.is_unipotent() {
                return Err(DynError::InvalidSystem(format!("map {i}: matrix is not unipotent")));
            }
            if t.matrix.determinant() != Some(1) {
                return Err(DynError::InvalidSystem(format!("map {i}: determinant is not 1")));
            }
        }
        for i in 0..maps.len() {
            for j in i + 1..maps.len() {
                let (a, b) = (&maps[i], &maps[j]);
                if a.matrix.checked_mul(&b.matrix)? != b.matrix.checked_mul(&a.matrix)? {
                    return Err(DynError::NonCommuting {
                        i,
                        j,
                        defect: f64::INFINITY,
                    });
                }
                // (A_i − I) b_j − (A_j − I) b_i ≡ 0 (mod 1)
                let (na, nb) = (a.matrix.sub_identity(), b.matrix.sub_identity());
                let mut defect: f64 = 0.0;
                for r in 0..dim {
                    let mut c = IntLinComb::new();
                    for s in 0..dim {
                        c.push(na.get(r, s), b.shift[s]);
                        c.push(-nb.get(r, s), a.shift[s]);
                    }
                    defect = defect.max(dist_to_int(c.frac()));
                }
                if defect > COMMUTE_TOL {
                    return Err(DynError::NonCommuting { i, j, defect });
                }
            }
        }
        Ok(Self {
            dim,
            maps,
            quadrature,
        })
    }

    /// Commuting rotations `x ↦ x + b_i`.
    pub fn rotations(shifts: Vec<Vec<f64>>, quadrature: usize) -> Result<Self, DynError> {
        let dim = shifts.first().map_or(0, |s| s.len());
        Self::new(dim, shifts.into_iter().map(AffineMap::rotation).collect(), quadrature)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn map_count(&self) -> usize {
        self.maps.len()
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    pub fn quadrature(&self) -> usize {
        self.quadrature
    }

    /// `k` is fixed by the transpose action of every map.
    pub fn fixes_frequency(&self, k: &[i64]) -> bool {
        let v: Vec<i128> = k.iter().map(|&x| x as i128).collect();
        self.maps.iter().all(|t| {
            t.matrix
                .transpose()
                .checked_mul_vec(&v)
                .map(|w| w == v)
                .unwrap_or(false)
        })
    }
}

/// `f ∘ T_i^n`: frequency `k ↦ (A^n)ᵀ k`, coefficient times `e(k·S_n b)`.
fn compose_single(f: &TorusObservable, t: &AffineMap, n: i64) -> Result<TorusObservable, DynError> {
    if n == 0 {
        return Ok(f.clone());
    }
    let (power, sum) = t.matrix.unipotent_power(n)?;
    let pt = power.transpose();
    let st = sum.transpose();
    let mut out = TorusObservable::zero(f.dim());
    for (k, c) in f.terms() {
        let kv: Vec<i128> = k.iter().map(|&x| x as i128).collect();
        let nk = pt.checked_mul_vec(&kv)?;
        let mut freq = Vec::with_capacity(nk.len());
        for v in nk {
            if v.abs() > FREQ_LIMIT {
                return Err(DynError::FrequencyOverflow(format!("frequency {v} exceeds 2^62")));
            }
            freq.push(v as i64);
        }
        let coeffs = st.checked_mul_vec(&kv)?;
        let mut phase = IntLinComb::new();
        for (&cj, &bj) in coeffs.iter().zip(&t.shift) {
            phase.push(cj, bj);
        }
        out.add_term(freq, c * phase.phase());
    }
    Ok(out)
}

/// `f ∘ T_{n⃗} = f ∘ T_1^{n_1} ∘ … ∘ T_ℓ^{n_ℓ}`, exactly in frequency space.
pub fn compose_iterate(
    system: &CommutingTorusSystem,
    f: &TorusObservable,
    n: &[i64],
) -> Result<TorusObservable, DynError> {
    if n.len() != system.map_count() {
        return Err(DynError::ArityMismatch {
            expected: system.map_count(),
            got: n.len(),
        });
    }
    if f.dim() != system.dim() {
        return Err(DynError::ArityMismatch {
            expected: system.dim(),
            got: f.dim(),
        });
    }
    let mut g = f.clone();
    for (t, &ni) in system.maps().iter().zip(n) {
        g = compose_single(&g, t, ni)?;
    }
    Ok(g)
}

/// A polynomial map `Z^d → Z^ℓ` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialMapping {
    arity: usize,
    /// `components[c]` lists `(coefficient, exponents)` monomials.
    components: Vec<Vec<(i64, Vec<u32>)>>,
}

impl PolynomialMapping {
    pub fn new(arity: usize, components: Vec<Vec<(i64, Vec<u32>)>>) -> Result<Self, DynError> {
        if arity == 0 || components.is_empty() {
            return Err(DynError::InvalidSystem("polynomial mappings need arity and components".into()));
        }
        if components.iter().flatten().any(|(_, e)| e.len() != arity) {
            return Err(DynError::InvalidSystem("monomial exponent length must equal the arity".into()));
        }
        Ok(Self { arity, components })
    }

    /// One variable: `components[c][j]` is the coefficient of `n^j`.
    pub fn univariate(components: Vec<Vec<i64>>) -> Result<Self, DynError> {
        Self::new(
            1,
            components
                .into_iter()
                .map(|cs| {
                    cs.into_iter()
                        .enumerate()
                        .filter(|(_, c)| *c != 0)
                        .map(|(j, c)| (c, vec![j as u32]))
                        .collect()
                })
                .collect(),
        )
    }

    /// `n ↦ n·e_i` in `Z^ℓ`.
    pub fn linear_axis(codim: usize, axis: usize) -> Self {
        let mut components = vec![Vec::new(); codim];
        components[axis] = vec![(1, vec![1])];
        Self {
            arity: 1,
            components,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn codim(&self) -> usize {
        self.components.len()
    }

    pub fn degree(&self) -> u32 {
        self.components
            .iter()
            .flatten()
            .filter(|(c, _)| *c != 0)
            .map(|(_, e)| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, n: &[i64]) -> Result<Vec<i64>, DynError> {
        let ovf = || DynError::FrequencyOverflow("polynomial iterate overflowed i64".into());
        self.components
            .iter()
            .map(|mons| {
                let mut s: i128 = 0;
                for (c, exps) in mons {
                    let mut t = *c as i128;
                    for (&x, &p) in n.iter().zip(exps) {
                        t = t.checked_mul((x as i128).checked_pow(p).ok_or_else(ovf)?).ok_or_else(ovf)?;
                    }
                    s = s.checked_add(t).ok_or_else(ovf)?;
                }
                i64::try_from(s).map_err(|_| ovf())
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skew() -> CommutingTorusSystem {
        CommutingTorusSystem::new(
            2,
            vec![AffineMap {
                matrix: IntMatrix::from_rows(vec![vec![1, 0], vec![1, 1]]).unwrap(),
                shift: vec![0.0, 0.0],
            }],
            32,
        )
        .unwrap()
    }

    #[test]
    fn rotation_composition() {
        let alpha = 2f64.sqrt() - 1.0;
        let s = CommutingTorusSystem::rotations(vec![vec![alpha]], 16).unwrap();
        let f = TorusObservable::character(vec![1]);
        for n in [0i64, 1, 17, -5, 1_000_000_007] {
            let g = compose_iterate(&s, &f, &[n]).unwrap();
            assert_eq!(g.len(), 1);
            let c = g.coefficient(&[1]);
            assert!((c - crate::phase::e(crate::phase::frac_mul(n as i128, alpha))).norm() < 1e-14);
        }
    }

    #[test]
    fn skew_composition_moves_frequency() {
        // T(x, y) = (x, y + x): e(y) ∘ T^n = e(y + n x).
        let s = skew();
        let f = TorusObservable::character(vec![0, 1]);
        for n in [0i64, 1, 3, -7] {
            let g = compose_iterate(&s, &f, &[n]).unwrap();
            assert_eq!(g.coefficient(&[n, 1]), Complex64::new(1.0, 0.0));
            assert_eq!(g.len(), 1);
        }
    }

    #[test]
    fn composition_agrees_with_pointwise_maps() {
        let m = IntMatrix::from_rows(vec![vec![1, 0], vec![2, 1]]).unwrap();
        let s = CommutingTorusSystem::new(
            2,
            vec![AffineMap {
                matrix: m,
                shift: vec![0.3, 0.45],
            }],
            16,
        )
        .unwrap();
        let f = TorusObservable::from_terms(
            2,
            [(vec![1, 2], Complex64::new(0.5, 0.1)), (vec![-1, 1], Complex64::new(0.0, 0.3))],
        )
        .unwrap();
        let x0 = [0.123, 0.777];
        let step = |x: [f64; 2]| [x[0] + 0.3, 2.0 * x[0] + x[1] + 0.45];
        let mut x = x0;
        for n in 0..6 {
            let g = compose_iterate(&s, &f, &[n]).unwrap();
            assert!((g.eval(&x0) - f.eval(&x)).norm() < 1e-10, "n={n}");
            x = step(x);
        }
    }

    #[test]
    fn validation() {
        let bad = AffineMap {
            matrix: IntMatrix::from_rows(vec![vec![2, 1], vec![1, 1]]).unwrap(),
            shift: vec![0.0, 0.0],
        };
        assert!(CommutingTorusSystem::new(2, vec![bad], 8).is_err());
        // Shear and a vertical rotation commute; a horizontal rotation does not.
        let shear = AffineMap {
            matrix: IntMatrix::from_rows(vec![vec![1, 0], vec![1, 1]]).unwrap(),
            shift: vec![0.0, 0.0],
        };
        assert!(CommutingTorusSystem::new(2, vec![shear.clone(), AffineMap::rotation(vec![0.0, 0.3])], 8).is_ok());
        assert!(matches!(
            CommutingTorusSystem::new(2, vec![shear, AffineMap::rotation(vec![0.3, 0.0])], 8),
            Err(DynError::NonCommuting { .. })
        ));
    }

    #[test]
    fn quadrature_preserves_integrals() {
        let s = skew();
        let f = TorusObservable::from_terms(
            2,
            [
                (vec![0, 0], Complex64::new(0.25, 0.0)),
                (vec![3, -2], Complex64::new(0.5, 0.5)),
                (vec![1, 1], Complex64::new(-0.2, 0.0)),
            ],
        )
        .unwrap();
        let q = s.quadrature();
        let base = GridFunction::render(&f, q).mean();
        assert!((base - f.integral()).norm() < 1e-13);
        for n in 1..4 {
            let g = compose_iterate(&s, &f, &[n]).unwrap();
            assert!(g.max_frequency() < q as i64 / 2);
            let moved = GridFunction::render(&g, q).mean();
            assert!((moved - base).norm() < 1e-13);
        }
    }

    #[test]
    fn polynomial_mappings() {
        let p = PolynomialMapping::univariate(vec![vec![0, 1], vec![0, 0, 1]]).unwrap();
        assert_eq!(p.eval(&[7]).unwrap(), vec![7, 49]);
        assert_eq!(p.degree(), 2);
        let q = PolynomialMapping::new(2, vec![vec![(3, vec![1, 1]), (-1, vec![0, 2])]]).unwrap();
        assert_eq!(q.eval(&[2, 5]).unwrap(), vec![30 - 25]);
        assert!(PolynomialMapping::univariate(vec![vec![0, 0, 1]]).unwrap().eval(&[i64::MAX]).is_err());
    }

    #[test]
    fn serde_roundtrip() {
        let f = TorusObservable::from_terms(2, [(vec![1, -1], Complex64::new(0.5, 0.25))]).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        let back: TorusObservable = serde_json::from_str(&json).unwrap();
        assert_eq!(f, back);
        let m: IntMatrix = serde_json::from_str("[[1,0],[1,1]]").unwrap();
        assert!(m.is_unipotent());
    }
}
