//! Nilsystem specifications, observables and exact orbit evaluation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::heisenberg::HeisenbergElement;
use super::NilError;
use crate::dd::two_prod;
use crate::phase::{dist_to_int, e, frac_mul, IntLinComb};
use crate::seqcore::ComplexSeqNd;

/// `∫_{-1}^{1} exp(−1/(1−t²)) dt`.
pub const BUMP_INTEGRAL: f64 = 0.443_993_816_168_079_44;

/// Tolerance for the Heisenberg commutation test `x_i y_j = x_j y_i`.
pub const COMMUTE_TOL: f64 = 1e-12;

/// `T(x, y) = (x + alpha, y + coupling·x + beta)` on `T²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewMap {
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    pub coupling: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NilKind {
    /// Rotations of `T^m` by the vectors `translations[i]`, orbit from 0.
    Torus { translations: Vec<Vec<f64>> },
    /// Commuting skew products on `T²` started at `start`.
    Skew { start: [f64; 2], maps: Vec<SkewMap> },
    /// Translations of `G/Γ` for the Heisenberg group, orbit from `e_X`.
    Heisenberg {
        translations: Vec<HeisenbergElement>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub freq: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ObservableSpec {
    /// `Σ c_k e(k·t)`; on the Heisenberg quotient `t` is the horizontal
    /// pair `(x, y)`.
    TrigPoly { terms: Vec<TrigTerm> },
    /// `Ψ(g·e_X) = Σ_{γ∈Γ} φ(g·γ)` for the coordinate bump
    /// `φ = amplitude · ∏_i b((g_i − center_i)/radii_i)`,
    /// `b(t) = exp(−1/(1−t²))` on `|t| < 1`. Every `γ` meeting the support is
    /// enumerated, so no terms are dropped.
    PeriodizedBump {
        center: [f64; 3],
        radii: [f64; 3],
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `e(m·z)` on reduced coordinates. Not continuous on `X`; diagnostic only.
    VerticalTwist { m: i64 },
}

fn one() -> f64 {
    1.0
}

impl ObservableSpec {
    pub fn character(freq: Vec<i64>) -> Self {
        ObservableSpec::TrigPoly {
            terms: vec![TrigTerm {
                freq,
                re: 1.0,
                im: 0.0,
            }],
        }
    }
}

#[inline]
fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// Integers `γ` with `lo < v + γ < hi`.
fn integer_range(v: f64, lo: f64, hi: f64) -> std::ops::RangeInclusive<i64> {
    ((lo - v).floor() as i64)..=((hi - v).ceil() as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NilsystemSpec {
    pub kind: NilKind,
    pub observable: ObservableSpec,
    /// Midpoint-rule resolution per coordinate for Haar integrals.
    #[serde(default = "default_quadrature")]
    pub quadrature: usize,
}

fn default_quadrature() -> usize {
    64
}

impl NilsystemSpec {
    pub fn new(kind: NilKind, observable: ObservableSpec, quadrature: usize) -> Result<Self, NilError> {
        let spec = Self {
            kind,
            observable,
            quadrature,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), NilError> {
        let invalid = |m: &str| Err(NilError::InvalidSpec(m.to_string()));
        if self.quadrature == 0 {
            return invalid("quadrature resolution must be positive");
        }
        match &self.kind {
            NilKind::Torus { translations } => {
                let Some(first) = translations.first() else {
                    return invalid("at least one translation is required");
                };
                if first.is_empty() || translations.iter().any(|t| t.len() != first.len()) {
                    return invalid("torus translations must share one positive dimension");
                }
                if translations.iter().flatten().any(|v| !v.is_finite()) {
                    return invalid("translation coordinates must be finite");
                }
            }
            NilKind::Skew { start, maps } => {
                if maps.is_empty() {
                    return invalid("at least one skew map is required");
                }
                if start.iter().any(|v| !v.is_finite())
                    || maps.iter().any(|m| !m.alpha.is_finite() || !m.beta.is_finite())
                {
                    return invalid("skew parameters must be finite");
                }
                for i in 0..maps.len() {
                    for j in i + 1..maps.len() {
                        // T_i T_j = T_j T_i  ⇔  c_i α_j ≡ c_j α_i (mod 1).
                        let d = frac_mul(maps[i].coupling as i128, maps[j].alpha)
                            - frac_mul(maps[j].coupling as i128, maps[i].alpha);
                        let defect = dist_to_int(d);
                        if defect > COMMUTE_TOL {
                            return Err(NilError::NonCommuting { i, j, defect });
                        }
                    }
                }
            }
            NilKind::Heisenberg { translations } => {
                if translations.is_empty() {
                    return invalid("at least one translation is required");
                }
                if translations
                    .iter()
                    .any(|t| !(t.x.is_finite() && t.y.is_finite() && t.z.is_finite()))
                {
                    return invalid("translation coordinates must be finite");
                }
                for i in 0..translations.len() {
                    for j in i + 1..translations.len() {
                        let defect = translations[i].commutator_defect(&translations[j]).abs();
                        if defect > COMMUTE_TOL {
                            return Err(NilError::NonCommuting { i, j, defect });
                        }
                    }
                }
            }
        }
        let obs_dim = self.observable_dim();
        match &self.observable {
            ObservableSpec::TrigPoly { terms } => {
                if terms.iter().any(|t| t.freq.len() != obs_dim) {
                    return Err(NilError::InvalidSpec(format!(
                        "trigonometric terms need {obs_dim} frequency components"
                    )));
                }
                if terms.iter().any(|t| !t.re.is_finite() || !t.im.is_finite()) {
                    return invalid("coefficients must be finite");
                }
            }
            ObservableSpec::PeriodizedBump { radii, center, amplitude } => {
                if !matches!(self.kind, NilKind::Heisenberg { .. }) {
                    return invalid("periodized bumps are defined on the Heisenberg quotient only");
                }
                if radii.iter().any(|r| !(r.is_finite() && *r > 0.0 && *r <= 64.0))
                    || center.iter().any(|c| !c.is_finite())
                    || !amplitude.is_finite()
                {
                    return invalid("bump radii must lie in (0, 64] and all parameters be finite");
                }
            }
            ObservableSpec::VerticalTwist { .. } => {
                if !matches!(self.kind, NilKind::Heisenberg { .. }) {
                    return invalid("vertical twists are defined on the Heisenberg quotient only");
                }
            }
        }
        Ok(())
    }

    /// Number of commuting translations, i.e. the number of variables.
    pub fn arity(&self) -> usize {
        match &self.kind {
            NilKind::Torus { translations } => translations.len(),
            NilKind::Skew { maps, .. } => maps.len(),
            NilKind::Heisenberg { translations } => translations.len(),
        }
    }

    /// Dimension of the fundamental domain.
    pub fn space_dim(&self) -> usize {
        match &self.kind {
            NilKind::Torus { translations } => translations[0].len(),
            NilKind::Skew { .. } => 2,
            NilKind::Heisenberg { .. } => 3,
        }
    }

    /// Coordinates seen by trigonometric observables.
    pub fn observable_dim(&self) -> usize {
        match &self.kind {
            NilKind::Torus { translations } => translations.first().map_or(0, |t| t.len()),
            NilKind::Skew { .. } | NilKind::Heisenberg { .. } => 2,
        }
    }

    /// Coordinates of the horizontal torus: all of them for a torus, `x` for
    /// a skew product, `(x, y)` for the Heisenberg quotient.
    pub fn horizontal_dim(&self) -> usize {
        match &self.kind {
            NilKind::Torus { translations } => translations[0].len(),
            NilKind::Skew { .. } => 1,
            NilKind::Heisenberg { .. } => 2,
        }
    }

    /// The reduced orbit point of `n`, computed with exact phase reduction.
    pub fn orbit_point(&self, n: &[i64]) -> Result<Vec<f64>, NilError> {
        if n.len() != self.arity() {
            return Err(NilError::ArityMismatch {
                expected: self.arity(),
                got: n.len(),
            });
        }
        let overflow = || NilError::Overflow("orbit coefficients exceed i128".into());
        match &self.kind {
            NilKind::Torus { translations } => {
                let m = translations[0].len();
                Ok((0..m)
                    .map(|j| {
                        let mut c = IntLinComb::new();
                        for (t, &ni) in translations.iter().zip(n) {
                            c.push(ni as i128, t[j]);
                        }
                        c.frac()
                    })
                    .collect())
            }
            NilKind::Skew { start, maps } => {
                let mut x = IntLinComb::new();
                x.push(1, start[0]);
                let mut y = IntLinComb::new();
                y.push(1, start[1]);
                for (map, &ni) in maps.iter().zip(n).rev() {
                    let ni = ni as i128;
                    let binom = ni.checked_mul(ni - 1).ok_or_else(overflow)? / 2;
                    let cross = x.scaled(ni.checked_mul(map.coupling as i128).ok_or_else(overflow)?);
                    y.extend(&cross.ok_or_else(overflow)?);
                    y.push(ni, map.beta);
                    y.push(binom.checked_mul(map.coupling as i128).ok_or_else(overflow)?, map.alpha);
                    x.push(ni, map.alpha);
                }
                Ok(vec![x.frac(), y.frac()])
            }
            NilKind::Heisenberg { translations } => {
                let mut xc = IntLinComb::new();
                let mut yc = IntLinComb::new();
                let mut zc = IntLinComb::new();
                for (i, (t, &ni)) in translations.iter().zip(n).enumerate() {
                    let ni = ni as i128;
                    xc.push(ni, t.x);
                    yc.push(ni, t.y);
                    zc.push(ni, t.z);
                    let binom = ni.checked_mul(ni - 1).ok_or_else(overflow)? / 2;
                    let (hi, lo) = two_prod(t.x, t.y);
                    zc.push(binom, hi).push(binom, lo);
                    for (u, &nj) in translations.iter().zip(n).skip(i + 1) {
                        let c = ni.checked_mul(nj as i128).ok_or_else(overflow)?;
                        let (hi, lo) = two_prod(t.x, u.y);
                        zc.push(c, hi).push(c, lo);
                    }
                }
                // Reduce by γ = (p, q, r) with q = −⌊Y⌋: the corner becomes
                // Z + X·q mod 1.
                let y = yc.frac();
                let q = -(yc.approx() - y).round() as i128;
                zc.extend(&xc.scaled(q).ok_or_else(overflow)?);
                Ok(vec![xc.frac(), y, zc.frac()])
            }
        }
    }

    /// The observable at a point of the fundamental domain.
    pub fn observe(&self, p: &[f64]) -> Complex64 {
        match &self.observable {
            ObservableSpec::TrigPoly { terms } => {
                let mut acc = Complex64::default();
                for t in terms {
                    let mut c = IntLinComb::new();
                    for (&k, &v) in t.freq.iter().zip(p) {
                        c.push(k as i128, v);
                    }
                    acc += Complex64::new(t.re, t.im) * c.phase();
                }
                acc
            }
            ObservableSpec::PeriodizedBump {
                center,
                radii,
                amplitude,
            } => {
                let (x, y, z) = (p[0], p[1], p[2]);
                let mut acc = 0.0;
                for g1 in integer_range(x, center[0] - radii[0], center[0] + radii[0]) {
                    let bx = bump((x + g1 as f64 - center[0]) / radii[0]);
                    if bx == 0.0 {
                        continue;
                    }
                    for g2 in integer_range(y, center[1] - radii[1], center[1] + radii[1]) {
                        let by = bump((y + g2 as f64 - center[1]) / radii[1]);
                        if by == 0.0 {
                            continue;
                        }
                        let zz = z + x * g2 as f64;
                        for g3 in integer_range(zz, center[2] - radii[2], center[2] + radii[2]) {
                            acc += bx * by * bump((zz + g3 as f64 - center[2]) / radii[2]);
                        }
                    }
                }
                Complex64::new(amplitude * acc, 0.0)
            }
            ObservableSpec::VerticalTwist { m } => e(frac_mul(*m as i128, p[2])),
        }
    }

    /// `Ψ(τ_1^{n_1}···τ_d^{n_d}·e_X)`.
    pub fn eval(&self, n: &[i64]) -> Result<Complex64, NilError> {
        Ok(self.observe(&self.orbit_point(n)?))
    }

    /// Upper bound for `|Ψ|`.
    pub fn sup_bound(&self) -> f64 {
        match &self.observable {
            ObservableSpec::TrigPoly { terms } => {
                terms.iter().map(|t| Complex64::new(t.re, t.im).norm()).sum()
            }
            ObservableSpec::PeriodizedBump { radii, amplitude, .. } => {
                let overlaps: f64 = radii.iter().map(|r| (2.0 * r).floor() + 1.0).product();
                amplitude.abs() * (-3.0f64).exp() * overlaps
            }
            ObservableSpec::VerticalTwist { .. } => 1.0,
        }
    }

    /// `∫_X Ψ dm_X` in closed form.
    pub fn exact_haar(&self) -> Complex64 {
        match &self.observable {
            ObservableSpec::TrigPoly { terms } => terms
                .iter()
                .filter(|t| t.freq.iter().all(|&k| k == 0))
                .map(|t| Complex64::new(t.re, t.im))
                .sum(),
            ObservableSpec::PeriodizedBump { radii, amplitude, .. } => {
                Complex64::new(amplitude * radii.iter().product::<f64>() * BUMP_INTEGRAL.powi(3), 0.0)
            }
            ObservableSpec::VerticalTwist { m } => {
                Complex64::new(if *m == 0 { 1.0 } else { 0.0 }, 0.0)
            }
        }
    }

    /// The nilsequence `n ↦ Ψ(τ^n·e_X)` as a lazily evaluated sequence.
    pub fn as_sequence(&self) -> ComplexSeqNd {
        let spec = self.clone();
        ComplexSeqNd::fallible(self.arity(), self.sup_bound(), move |n| {
            spec.eval(n)
                .map_err(|e| crate::seqcore::SeqError::Evaluation(e.to_string()))
        })
        .with_label("nilsequence")
    }
}

/// Functional form of [`NilsystemSpec::eval`].
pub fn nilsequence_eval(spec: &NilsystemSpec, n: &[i64]) -> Result<Complex64, NilError> {
    spec.eval(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    type H = HeisenbergElement<f64>;

    fn torus(alpha: f64) -> NilsystemSpec {
        NilsystemSpec::new(
            NilKind::Torus {
                translations: vec![vec![alpha]],
            },
            ObservableSpec::character(vec![1]),
            16,
        )
        .unwrap()
    }

    #[test]
    fn torus_orbit_is_a_linear_phase() {
        let alpha = 2f64.sqrt() - 1.0;
        let s = torus(alpha);
        for n in [0i64, 1, 7, 123_456_789] {
            let z = s.eval(&[n]).unwrap();
            assert!((z - e(frac_mul(n as i128, alpha))).norm() < 1e-14);
        }
    }

    #[test]
    fn skew_orbit_unrolls() {
        let alpha = 0.1234567;
        // T(x, y) = (x, y + x) from (α, 0): y_n = nα.
        let s = NilsystemSpec::new(
            NilKind::Skew {
                start: [alpha, 0.0],
                maps: vec![SkewMap {
                    alpha: 0.0,
                    beta: 0.0,
                    coupling: 1,
                }],
            },
            ObservableSpec::character(vec![0, 1]),
            16,
        )
        .unwrap();
        for n in [0i64, 1, 5, 1000] {
            let z = s.eval(&[n]).unwrap();
            assert!((z - e(n as f64 * alpha)).norm() < 1e-12);
        }
        // T(x, y) = (x + α, y + x) from 0: y_n = C(n,2) α.
        let s = NilsystemSpec::new(
            NilKind::Skew {
                start: [0.0, 0.0],
                maps: vec![SkewMap {
                    alpha,
                    beta: 0.0,
                    coupling: 1,
                }],
            },
            ObservableSpec::character(vec![0, 1]),
            16,
        )
        .unwrap();
        let mut x = 0.0f64;
        let mut y = 0.0f64;
        for n in 0..50i64 {
            let p = s.orbit_point(&[n]).unwrap();
            assert!(dist_to_int(p[0] - x) < 1e-12 && dist_to_int(p[1] - y) < 1e-12);
            y += x;
            x += alpha;
        }
    }

    #[test]
    fn skew_commutation_is_checked() {
        let maps = vec![
            SkewMap {
                alpha: 0.25,
                beta: 0.0,
                coupling: 1,
            },
            SkewMap {
                alpha: 0.5,
                beta: 0.1,
                coupling: 2,
            },
        ];
        let ok = NilsystemSpec::new(
            NilKind::Skew {
                start: [0.0, 0.0],
                maps: maps.clone(),
            },
            ObservableSpec::character(vec![1, 1]),
            8,
        );
        assert!(ok.is_ok());
        let mut bad = maps;
        bad[1].alpha = 0.3;
        let err = NilsystemSpec::new(
            NilKind::Skew {
                start: [0.0, 0.0],
                maps: bad,
            },
            ObservableSpec::character(vec![1, 1]),
            8,
        );
        assert!(matches!(err, Err(NilError::NonCommuting { .. })));
    }

    #[test]
    fn multi_map_skew_matches_sequential_application() {
        let maps = vec![
            SkewMap {
                alpha: 0.25,
                beta: 0.3,
                coupling: 1,
            },
            SkewMap {
                alpha: 0.5,
                beta: 0.1,
                coupling: 2,
            },
        ];
        let s = NilsystemSpec::new(
            NilKind::Skew {
                start: [0.11, 0.07],
                maps: maps.clone(),
            },
            ObservableSpec::character(vec![1, 1]),
            8,
        )
        .unwrap();
        let apply = |m: &SkewMap, (x, y): (f64, f64)| (x + m.alpha, y + m.coupling as f64 * x + m.beta);
        let (mut x, mut y) = (0.11, 0.07);
        for _ in 0..4 {
            (x, y) = apply(&maps[1], (x, y));
        }
        for _ in 0..3 {
            (x, y) = apply(&maps[0], (x, y));
        }
        let p = s.orbit_point(&[3, 4]).unwrap();
        assert!(dist_to_int(p[0] - x) < 1e-12 && dist_to_int(p[1] - y) < 1e-12);
    }

    #[test]
    fn heisenberg_orbit_matches_group_arithmetic() {
        let t1 = H::new(0.3, 0.2, 0.05);
        let t2 = H::new(0.6, 0.4, 0.7);
        let s = NilsystemSpec::new(
            NilKind::Heisenberg {
                translations: vec![t1, t2],
            },
            ObservableSpec::VerticalTwist { m: 1 },
            8,
        )
        .unwrap();
        for (a, b) in [(0i64, 0i64), (3, 5), (-2, 7), (11, -4)] {
            let g = t1.pow(a).mul(&t2.pow(b));
            let (p, _) = g.reduce_fundamental();
            let q = s.orbit_point(&[a, b]).unwrap();
            assert!(dist_to_int(q[0] - p.x) < 1e-12);
            assert!(dist_to_int(q[1] - p.y) < 1e-12);
            assert!(dist_to_int(q[2] - p.z) < 1e-12, "{a} {b} {q:?} {p:?}");
        }
    }

    #[test]
    fn heisenberg_noncommuting_rejected() {
        let err = NilsystemSpec::new(
            NilKind::Heisenberg {
                translations: vec![H::new(1.0, 0.0, 0.0), H::new(0.0, 1.0, 0.0)],
            },
            ObservableSpec::character(vec![1, 0]),
            8,
        );
        assert!(matches!(err, Err(NilError::NonCommuting { .. })));
    }

    #[test]
    fn periodized_bump_is_lattice_invariant() {
        let s = NilsystemSpec::new(
            NilKind::Heisenberg {
                translations: vec![H::new(0.1, 0.2, 0.0)],
            },
            ObservableSpec::PeriodizedBump {
                center: [0.0, 0.0, 0.0],
                radii: [0.7, 0.9, 1.3],
                amplitude: 1.0,
            },
            8,
        )
        .unwrap();
        let g = H::new(0.37, 0.81, 0.12);
        let base = s.observe(&[g.x, g.y, g.z]);
        assert!(base.re > 0.0);
        for gamma in [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-2, 3, 5], [4, -1, -7]] {
            let h = g.mul(&H::lattice(gamma));
            let v = s.observe(&[h.x, h.y, h.z]);
            assert!((v - base).norm() < 1e-12, "{gamma:?}");
        }
        // At the orbit start only γ near the origin contribute.
        let at0 = s.eval(&[0]).unwrap();
        assert!((at0.re - s.observe(&[0.0, 0.0, 0.0]).re).abs() < 1e-15);
        assert!(at0.re >= (-3.0f64).exp());
    }
}
