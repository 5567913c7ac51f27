//! Small square integer matrices with exact unipotent powers.

use serde::{Deserialize, Serialize};

use super::DynError;

/// Largest frequency magnitude accepted after a composition.
pub const FREQ_LIMIT: i128 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct IntMatrix {
    m: usize,
    a: Vec<i128>,
}

impl TryFrom<Vec<Vec<i64>>> for IntMatrix {
    type Error = DynError;

    fn try_from(rows: Vec<Vec<i64>>) -> Result<Self, DynError> {
        let m = rows.len();
        if m == 0 || rows.iter().any(|r| r.len() != m) {
            return Err(DynError::InvalidSystem("matrix must be square and nonempty".into()));
        }
        Ok(Self {
            m,
            a: rows.into_iter().flatten().map(i128::from).collect(),
        })
    }
}

impl From<IntMatrix> for Vec<Vec<i64>> {
    fn from(x: IntMatrix) -> Self {
        (0..x.m)
            .map(|i| (0..x.m).map(|j| x.get(i, j) as i64).collect())
            .collect()
    }
}

fn overflow() -> DynError {
    DynError::FrequencyOverflow("integer matrix arithmetic overflowed".into())
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self, DynError> {
        Self::try_from(rows)
    }

    pub fn identity(m: usize) -> Self {
        let mut a = vec![0i128; m * m];
        for i in 0..m {
            a[i * m + i] = 1;
        }
        Self { m, a }
    }

    pub fn zero(m: usize) -> Self {
        Self {
            m,
            a: vec![0; m * m],
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.a[i * self.m + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.m)
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Self {
        let m = self.m;
        let mut a = vec![0; m * m];
        for i in 0..m {
            for j in 0..m {
                a[j * m + i] = self.get(i, j);
            }
        }
        Self { m, a }
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, DynError> {
        let m = self.m;
        let mut a = vec![0i128; m * m];
        for i in 0..m {
            for k in 0..m {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..m {
                    let p = x.checked_mul(o.get(k, j)).ok_or_else(overflow)?;
                    a[i * m + j] = a[i * m + j].checked_add(p).ok_or_else(overflow)?;
                }
            }
        }
        Ok(Self { m, a })
    }

    fn checked_axpy(&mut self, c: i128, o: &Self) -> Result<(), DynError> {
        for (x, &y) in self.a.iter_mut().zip(&o.a) {
            *x = x
                .checked_add(c.checked_mul(y).ok_or_else(overflow)?)
                .ok_or_else(overflow)?;
        }
        Ok(())
    }

    pub fn sub_identity(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.m {
            out.a[i * self.m + i] -= 1;
        }
        out
    }

    pub fn checked_mul_vec(&self, v: &[i128]) -> Result<Vec<i128>, DynError> {
        (0..self.m)
            .map(|i| {
                let mut s: i128 = 0;
                for j in 0..self.m {
                    s = s
                        .checked_add(self.get(i, j).checked_mul(v[j]).ok_or_else(overflow)?)
                        .ok_or_else(overflow)?;
                }
                Ok(s)
            })
            .collect()
    }

    /// `(A − I)^m = 0`, equivalently all eigenvalues equal 1.
    pub fn is_unipotent(&self) -> bool {
        let n = self.sub_identity();
        let mut p = Self::identity(self.m);
        for _ in 0..self.m {
            match p.checked_mul(&n) {
                Ok(q) => p = q,
                Err(_) => return false,
            }
        }
        p.is_zero()
    }

    /// Integer determinant by Bareiss elimination.
    pub fn determinant(&self) -> Option<i128> {
        let m = self.m;
        let mut a = self.a.clone();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..m {
            if a[k * m + k] == 0 {
                let swap = (k + 1..m).find(|&r| a[r * m + k] != 0)?;
                for j in 0..m {
                    a.swap(k * m + j, swap * m + j);
                }
                sign = -sign;
            }
            for i in k + 1..m {
                for j in k + 1..m {
                    let v = a[i * m + j]
                        .checked_mul(a[k * m + k])?
                        .checked_sub(a[i * m + k].checked_mul(a[k * m + j])?)?;
                    a[i * m + j] = v / prev;
                }
            }
            prev = a[k * m + k];
        }
        Some(sign * a[m * m - 1])
    }

    /// `(A^n, S_n)` for unipotent `A = I + N`, where
    /// `A^n = Σ_j C(n,j) N^j` and `S_n = Σ_{i<n} A^i = Σ_j C(n,j+1) N^j`.
    /// Both formulas hold for negative `n` with generalized binomials.
    pub fn unipotent_power(&self, n: i64) -> Result<(Self, Self), DynError> {
        let m = self.m;
        let nil = self.sub_identity();
        let mut power = Self::zero(m);
        let mut sum = Self::zero(m);
        let mut nj = Self::identity(m);
        let n = n as i128;
        // binom[j] = C(n, j)
        let mut binom = vec![1i128; m + 1];
        for j in 1..=m {
            binom[j] = binom[j - 1]
                .checked_mul(n - (j as i128 - 1))
                .ok_or_else(overflow)?
                / j as i128;
        }
        for j in 0..m {
            if nj.is_zero() {
                break;
            }
            power.checked_axpy(binom[j], &nj)?;
            sum.checked_axpy(binom[j + 1], &nj)?;
            nj = nj.checked_mul(&nil)?;
        }
        Ok((power, sum))
    }
}
