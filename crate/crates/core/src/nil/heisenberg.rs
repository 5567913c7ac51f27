//! The Heisenberg group of upper unitriangular 3×3 matrices.
//!
//! `(x, y, z)` is the matrix with `x` upper-left, `y` middle-right and `z` in
//! the corner, so `(x,y,z)·(x',y',z') = (x+x', y+y', z+z'+x·y')`. The lattice
//! `Γ` consists of the integer points.

use std::ops::Neg;

use num_traits::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct HeisenbergElement<T = f64> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T> HeisenbergElement<T>
where
    T: Num + Neg<Output = T> + Clone + FromPrimitive,
{
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            self.x.clone() + o.x.clone(),
            self.y.clone() + o.y.clone(),
            self.z.clone() + o.z.clone() + self.x.clone() * o.y.clone(),
        )
    }

    pub fn inverse(&self) -> Self {
        Self::new(
            -self.x.clone(),
            -self.y.clone(),
            -self.z.clone() + self.x.clone() * self.y.clone(),
        )
    }

    /// `τ^n = (n a, n b, n c + C(n,2) a b)`.
    pub fn pow(&self, n: i64) -> Self {
        let nn = T::from_i64(n).expect("exponent representable");
        let n = n as i128;
        let binom = T::from_i128(n * (n - 1) / 2).expect("binomial representable");
        Self::new(
            nn.clone() * self.x.clone(),
            nn.clone() * self.y.clone(),
            nn * self.z.clone() + binom * self.x.clone() * self.y.clone(),
        )
    }

    /// `τ^n` by repeated multiplication; for cross-checks only.
    pub fn pow_iterated(&self, n: i64) -> Self {
        let step = if n >= 0 { self.clone() } else { self.inverse() };
        let mut acc = Self::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&step);
        }
        acc
    }

    /// `x_1 y_2 = x_2 y_1`, the condition for two elements to commute.
    pub fn commutator_defect(&self, o: &Self) -> T {
        self.x.clone() * o.y.clone() - o.x.clone() * self.y.clone()
    }
}

/// `v + k ∈ [0, 1)` with integer `k`.
fn unit_shift(v: f64) -> (f64, i64) {
    let k = -v.floor();
    let mut w = v + k;
    let mut k = k as i64;
    if w >= 1.0 {
        w -= 1.0;
        k -= 1;
    }
    if w < 0.0 {
        w = 0.0;
    }
    (w, k)
}

impl HeisenbergElement<f64> {
    /// Coset representative in `[0,1)³` and the lattice element `γ` with
    /// `g·γ` equal to it. The order is fixed: `q = −⌊y⌋`, then `p = −⌊x⌋`,
    /// then `r` so that the corner lands in `[0,1)`.
    pub fn reduce_fundamental(&self) -> (HeisenbergElement<f64>, [i64; 3]) {
        let (y, q) = unit_shift(self.y);
        let (x, p) = unit_shift(self.x);
        let (z, r) = unit_shift(self.z + self.x * q as f64);
        (HeisenbergElement { x, y, z }, [p, q, r])
    }

    pub fn lattice(g: [i64; 3]) -> Self {
        Self {
            x: g[0] as f64,
            y: g[1] as f64,
            z: g[2] as f64,
        }
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        (self.x - o.x)
            .abs()
            .max((self.y - o.y).abs())
            .max((self.z - o.z).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type H = HeisenbergElement<f64>;
    type Q = HeisenbergElement<BigRational>;

    fn rat(num: i64, den: i64) -> BigRational {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    #[test]
    fn closed_form_powers() {
        let t = H::new(1.0, 1.0, 0.0);
        assert_eq!(t.pow(3), H::new(3.0, 3.0, 3.0));
        assert_eq!(t.pow_iterated(3), H::new(3.0, 3.0, 3.0));
        let s = H::new(0.3, -0.7, 0.2);
        assert_eq!(s.pow(0), H::identity());
        let inv = s.pow(-1);
        assert!(inv.max_abs_diff(&H::new(-0.3, 0.7, -0.2 + 0.3 * -0.7)) < 1e-15);
    }

    #[test]
    fn reduction_examples() {
        let (p, g) = H::new(1.25, -0.5, 2.3).reduce_fundamental();
        assert_eq!(g, [-1, 1, -3]);
        assert!(p.max_abs_diff(&H::new(0.25, 0.5, 0.55)) < 1e-12);
        let inside = H::new(0.1, 0.9, 0.4);
        assert_eq!(inside.reduce_fundamental(), (inside, [0, 0, 0]));
        let (p, _) = H::new(2.0, 3.0, 0.0).reduce_fundamental();
        assert_eq!(p, H::identity());
    }

    #[test]
    fn reduction_stays_inside_near_boundaries() {
        for v in [-1e-17, -0.0, 1.0 - 1e-17, -1.0 - 1e-16] {
            let (p, g) = H::new(v, v, v).reduce_fundamental();
            for c in [p.x, p.y, p.z] {
                assert!((0.0..1.0).contains(&c), "{v} -> {p:?}");
            }
            let back = H::new(v, v, v).mul(&H::lattice(g));
            assert!(back.max_abs_diff(&p) < 1e-12);
        }
    }

    fn q_elem() -> impl Strategy<Value = Q> {
        ((-50i64..50, 1i64..20), (-50i64..50, 1i64..20), (-50i64..50, 1i64..20)).prop_map(
            |((a, b), (c, d), (e, f))| Q::new(rat(a, b), rat(c, d), rat(e, f)),
        )
    }

    proptest! {
        #[test]
        fn exact_group_axioms(a in q_elem(), b in q_elem(), c in q_elem()) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&Q::identity()), a.clone());
            prop_assert_eq!(a.mul(&a.inverse()), Q::identity());
            prop_assert_eq!(a.inverse().mul(&a), Q::identity());
        }

        #[test]
        fn exact_power_laws(a in q_elem(), n in -30i64..30, m in -30i64..30) {
            prop_assert_eq!(a.pow(n).mul(&a.pow(m)), a.pow(n + m));
            prop_assert_eq!(a.pow(n), a.pow_iterated(n));
        }

        #[test]
        fn float_group_axioms(
            a in (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0),
            b in (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0),
            c in (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0),
        ) {
            let (a, b, c) = (H::new(a.0, a.1, a.2), H::new(b.0, b.1, b.2), H::new(c.0, c.1, c.2));
            prop_assert!(a.mul(&b).mul(&c).max_abs_diff(&a.mul(&b.mul(&c))) < 1e-12);
            prop_assert!(a.mul(&a.inverse()).max_abs_diff(&H::identity()) < 1e-12);
        }

        #[test]
        fn float_power_laws(
            a in (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), n in -200i64..200, m in -200i64..200
        ) {
            let a = H::new(a.0, a.1, a.2);
            prop_assert!(a.pow(n).mul(&a.pow(m)).max_abs_diff(&a.pow(n + m)) < 1e-9);
        }

        #[test]
        fn reduction_invariants(x in -10f64..10.0, y in -10f64..10.0, z in -10f64..10.0) {
            let g = H::new(x, y, z);
            let (p, gamma) = g.reduce_fundamental();
            for c in [p.x, p.y, p.z] {
                prop_assert!((0.0..1.0).contains(&c));
            }
            let back = g.mul(&H::lattice(gamma));
            prop_assert!(back.max_abs_diff(&p) < 1e-12);
        }
    }
}
