//! Smallest-prime-factor sieve, prime-factor counts and the on-disk cache.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ArithError;

/// Largest table the sieve will hold in memory. Larger ranges go through
/// [`segmented_omega`].
pub const DEFAULT_SIEVE_CAP: u64 = 100_000_000;

const MAGIC: &[u8; 4] = b"ELSV";
const CACHE_VERSION: u32 = 1;

/// Whether prime factors are counted once (`ω`) or with multiplicity (`Ω`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Counting {
    #[default]
    Distinct,
    WithMultiplicity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorSieve {
    limit: u64,
    /// `spf[n]` for `0 ≤ n ≤ limit`; entries 0 and 1 are 0.
    spf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: u64) -> Result<Self, ArithError> {
        Self::with_cap(limit, DEFAULT_SIEVE_CAP)
    }

    /// Linear sieve up to `limit`, refusing anything above `cap`.
    pub fn with_cap(limit: u64, cap: u64) -> Result<Self, ArithError> {
        if limit > cap || limit > u32::MAX as u64 {
            return Err(ArithError::SieveTooLarge {
                requested: limit,
                cap: cap.min(u32::MAX as u64),
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si {
                    break;
                }
                let j = i * p as usize;
                if j > n {
                    break;
                }
                spf[j] = p;
            }
        }
        Ok(Self { limit, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) -> Result<(), ArithError> {
        if n == 0 {
            return Err(ArithError::InvalidArgument("n must be positive".into()));
        }
        if n > self.limit {
            return Err(ArithError::SieveRange { n, limit: self.limit });
        }
        Ok(())
    }

    /// Smallest prime factor of `n ≥ 2`.
    pub fn spf(&self, n: u64) -> Result<u64, ArithError> {
        self.check(n)?;
        if n == 1 {
            return Err(ArithError::InvalidArgument("1 has no prime factor".into()));
        }
        Ok(self.spf[n as usize] as u64)
    }

    pub fn is_prime(&self, n: u64) -> Result<bool, ArithError> {
        if n < 2 {
            return Ok(false);
        }
        self.check(n)?;
        Ok(self.spf[n as usize] as u64 == n)
    }

    /// Primes `p ≤ bound`, ascending.
    pub fn primes_up_to(&self, bound: u64) -> Result<Vec<u64>, ArithError> {
        if bound > self.limit {
            return Err(ArithError::SieveRange { n: bound, limit: self.limit });
        }
        Ok((2..=bound).filter(|&p| self.spf[p as usize] as u64 == p).collect())
    }

    /// `n = ∏ p^k` as ascending `(p, k)` pairs; empty for `n = 1`.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>, ArithError> {
        self.check(n)?;
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut m = n as usize;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut k = 0;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            out.push((p as u64, k));
        }
        Ok(out)
    }

    pub fn count(&self, n: u64, counting: Counting) -> Result<u32, ArithError> {
        self.check(n)?;
        let mut m = n as usize;
        let mut c = 0;
        let mut last = 0;
        while m > 1 {
            let p = self.spf[m] as usize;
            m /= p;
            if counting == Counting::WithMultiplicity || p != last {
                c += 1;
            }
            last = p;
        }
        Ok(c)
    }

    /// Counts for `1..=n` in one pass, index `i` holding the count of `i + 1`.
    pub fn count_table(&self, n: u64, counting: Counting) -> Result<Vec<u8>, ArithError> {
        if n > self.limit {
            return Err(ArithError::SieveRange { n, limit: self.limit });
        }
        let n = n as usize;
        let mut t = vec![0u8; n + 1];
        for m in 2..=n {
            let p = self.spf[m] as usize;
            let q = m / p;
            let new_prime = q % p != 0;
            t[m] = t[q] + u8::from(counting == Counting::WithMultiplicity || new_prime);
        }
        t.remove(0);
        Ok(t)
    }

    /// Writes the table as `"ELSV"`, version (u32), limit (u64), then
    /// `limit + 1` u32 entries, all little-endian.
    pub fn save(&self, path: &Path) -> Result<(), ArithError> {
        let io = |e: std::io::Error| ArithError::Cache(e.to_string());
        let mut w = BufWriter::new(File::create(path).map_err(io)?);
        w.write_all(MAGIC).map_err(io)?;
        w.write_all(&CACHE_VERSION.to_le_bytes()).map_err(io)?;
        w.write_all(&self.limit.to_le_bytes()).map_err(io)?;
        for v in &self.spf {
            w.write_all(&v.to_le_bytes()).map_err(io)?;
        }
        w.flush().map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self, ArithError> {
        let io = |e: std::io::Error| ArithError::Cache(e.to_string());
        let mut r = BufReader::new(File::open(path).map_err(io)?);
        let mut head = [0u8; 16];
        r.read_exact(&mut head).map_err(io)?;
        if &head[..4] != MAGIC {
            return Err(ArithError::Cache("bad magic".into()));
        }
        let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
        if version != CACHE_VERSION {
            return Err(ArithError::Cache(format!("unsupported cache version {version}")));
        }
        let limit = u64::from_le_bytes(head[8..16].try_into().unwrap());
        if limit > u32::MAX as u64 {
            return Err(ArithError::Cache("limit out of range".into()));
        }
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(io)?;
        if bytes.len() as u64 != 4 * (limit + 1) {
            return Err(ArithError::Cache("truncated or oversized table".into()));
        }
        let spf: Vec<u32> = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let s = Self { limit, spf };
        s.spot_check()?;
        Ok(s)
    }

    /// Loads `path` if it holds a table covering `limit`, otherwise builds one
    /// and writes it back.
    pub fn load_or_build(path: &Path, limit: u64) -> Result<Self, ArithError> {
        if let Ok(s) = Self::load(path) {
            if s.limit >= limit {
                return Ok(s);
            }
        }
        let s = Self::new(limit)?;
        s.save(path)?;
        Ok(s)
    }

    fn spot_check(&self) -> Result<(), ArithError> {
        let bad = || ArithError::Cache("table fails the spf invariant".into());
        if self.spf.len() < 2 || self.spf[0] != 0 || self.spf[1] != 0 {
            return Err(bad());
        }
        let n = self.limit;
        let step = (n / 4096).max(1);
        let mut m = 2;
        while m <= n {
            let p = self.spf[m as usize] as u64;
            if p < 2 || m % p != 0 || (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
                return Err(bad());
            }
            m += step;
        }
        Ok(())
    }
}

/// `ω` or `Ω` of every integer in `lo..lo + len` by segmented trial division
/// with primes up to `√(lo + len)`. Needs no table beyond that prime list.
pub fn segmented_omega(lo: u64, len: u64, counting: Counting) -> Result<Vec<u8>, ArithError> {
    if lo == 0 {
        return Err(ArithError::InvalidArgument("segment must start at 1 or later".into()));
    }
    let hi = lo
        .checked_add(len)
        .ok_or_else(|| ArithError::InvalidArgument("segment end overflows".into()))?;
    let root = (hi as f64).sqrt() as u64 + 2;
    let small = FactorSieve::with_cap(root, u32::MAX as u64)?;
    let mut rest: Vec<u64> = (lo..hi).collect();
    let mut counts = vec![0u8; len as usize];
    for p in small.primes_up_to(root)? {
        let first = lo.div_ceil(p) * p;
        let mut m = first;
        while m < hi {
            let i = (m - lo) as usize;
            let mut k = 0u8;
            while rest[i] % p == 0 {
                rest[i] /= p;
                k += 1;
            }
            counts[i] += match counting {
                Counting::Distinct => 1,
                Counting::WithMultiplicity => k,
            };
            m += p;
        }
    }
    for (c, r) in counts.iter_mut().zip(&rest) {
        if *r > 1 {
            *c += 1;
        }
    }
    Ok(counts)
}
