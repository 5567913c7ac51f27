//! Small textual formats for sequences, observables and systems.
//!
//! Lists use `,`; repeated groups use `|`; rows or terms inside a group use `;`.

use std::str::FromStr;
use std::sync::Arc;

use ergolab::arith::{Counting, DirichletCharacterSpec, FactorSieve, MultiplicativeFunctionSpec};
use ergolab::dynsys::{AffineMap, CommutingTorusSystem, IntMatrix, PolynomialMapping, TorusObservable};
use ergolab::hardy::{hardy_sequence, HardyFunctionSpec, HardyTerm};
use ergolab::phase::e;
use ergolab::seqcore::{ComplexSeqNd, FiniteGridFn};
use ergolab::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, Result};

pub fn list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| CliError::invalid(format!("{what}: cannot parse '{t}'"))))
        .collect()
}

pub fn nonempty<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    let v = list(s, what)?;
    if v.is_empty() {
        return Err(CliError::invalid(format!("{what}: empty list")));
    }
    Ok(v)
}

pub fn scalar<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| CliError::invalid(format!("{what}: cannot parse '{s}'")))
}

/// Splits `kind:args` into its two halves.
fn head(s: &str) -> (&str, &str) {
    match s.split_once(':') {
        Some((h, rest)) => (h.trim(), rest.trim()),
        None => (s.trim(), ""),
    }
}

/// `key=value` lookup inside a comma list such as `k=3` or `b=2`; bare
/// values are accepted when `key` is the only parameter.
fn keyed<'a>(args: &'a str, key: &str) -> &'a str {
    args.strip_prefix(key).and_then(|r| r.strip_prefix('=')).unwrap_or(args)
}

/// Grid functions on `Z_N^d`: `const`, `char:k=3[,1]`, `quad`, `random`,
/// `signs`.
pub fn grid_function(spec: &str, n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<FiniteGridFn> {
    let (kind, args) = head(spec);
    let len = n
        .checked_pow(d as u32)
        .ok_or_else(|| CliError::invalid("N^d overflows"))?;
    let f = match kind {
        "const" => FiniteGridFn::constant(n, d, Complex64::new(1.0, 0.0))?,
        "char" => {
            let k: Vec<i64> = nonempty(keyed(args, "k"), "character frequency")?;
            if k.len() != d {
                return Err(CliError::invalid(format!("character needs {d} frequencies, got {}", k.len())));
            }
            FiniteGridFn::character(n, &k)?
        }
        "quad" => FiniteGridFn::quadratic_phase(n, d)?,
        "random" => FiniteGridFn::new(n, d, (0..len).map(|_| e(rng.gen_range(0.0..1.0))).collect())?,
        "signs" => FiniteGridFn::new(
            n,
            d,
            (0..len).map(|_| Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)).collect(),
        )?,
        _ => return Err(CliError::invalid(format!("unknown grid function '{spec}'"))),
    };
    Ok(f)
}

/// Multiplicative functions: `one`, `liouville`, `mobius`, `fb:b=2`,
/// `fb-omega:b=2` (counted with multiplicity), `chi3`, `chi:q=5,j=1`,
/// `nit:t=0.5`. Products are written with `*`.
pub fn multiplicative(spec: &str) -> Result<MultiplicativeFunctionSpec> {
    let mut acc: Option<MultiplicativeFunctionSpec> = None;
    for part in spec.split('*') {
        let (kind, args) = head(part);
        let f = match kind {
            "one" => MultiplicativeFunctionSpec::one(),
            "liouville" => MultiplicativeFunctionSpec::liouville(),
            "mobius" => MultiplicativeFunctionSpec::mobius(),
            "fb" => MultiplicativeFunctionSpec::f_b(scalar(keyed(args, "b"), "b")?, Counting::Distinct)?,
            "fb-omega" => MultiplicativeFunctionSpec::f_b(scalar(keyed(args, "b"), "b")?, Counting::WithMultiplicity)?,
            "chi3" => MultiplicativeFunctionSpec::from_character(&DirichletCharacterSpec::mod3()),
            "chi" => MultiplicativeFunctionSpec::from_character(&character(args)?),
            "nit" => MultiplicativeFunctionSpec::archimedean(scalar(keyed(args, "t"), "t")?),
            _ => return Err(CliError::invalid(format!("unknown multiplicative function '{part}'"))),
        };
        acc = Some(match acc {
            None => f,
            Some(g) => g.product(&f),
        });
    }
    acc.ok_or_else(|| CliError::invalid("empty multiplicative function"))
}

/// `q=5,j=1` for the character `n ↦ e(j·ind(n)/(q−1))` modulo a prime `q`.
pub fn character(args: &str) -> Result<DirichletCharacterSpec> {
    let mut q = None;
    let mut j = 0u64;
    for kv in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match kv.split_once('=') {
            Some(("q", v)) => q = Some(scalar(v, "q")?),
            Some(("j", v)) => j = scalar(v, "j")?,
            _ => return Err(CliError::invalid(format!("character: unexpected '{kv}'"))),
        }
    }
    let q = q.ok_or_else(|| CliError::invalid("character needs q"))?;
    Ok(DirichletCharacterSpec::prime_modulus(q, j)?)
}

/// Hardy functions as `+`-joined terms `c*t^a` or `c*t^a*log^e`, e.g.
/// `1*t^1.5` or `t^1.5+0.5*t^1.2*log^1`. An optional `@t0` suffix sets the
/// start of the domain.
pub fn hardy(spec: &str) -> Result<HardyFunctionSpec> {
    let (body, t0) = match spec.split_once('@') {
        Some((b, t)) => (b, scalar(t, "t0")?),
        None => (spec, ergolab::hardy::DEFAULT_T0),
    };
    let mut terms = Vec::new();
    for raw in body.split('+').map(str::trim).filter(|s| !s.is_empty()) {
        let mut coeff = 1.0;
        let mut power = None;
        let mut log_power = 0;
        for factor in raw.split('*').map(str::trim) {
            if let Some(a) = factor.strip_prefix("t^") {
                power = Some(scalar(a, "power")?);
            } else if factor == "t" {
                power = Some(1.0);
            } else if let Some(l) = factor.strip_prefix("log^") {
                log_power = scalar(l, "log power")?;
            } else if factor == "log" {
                log_power = 1;
            } else {
                coeff *= scalar::<f64>(factor, "coefficient")?;
            }
        }
        let power = power.ok_or_else(|| CliError::invalid(format!("term '{raw}' lacks t^a")))?;
        terms.push(HardyTerm { coeff, power, log_power });
    }
    Ok(HardyFunctionSpec::new(terms, t0)?)
}

/// Weights: `one`, `alternating`, `phase:a`, `poly:c0,c1,...`,
/// `hardy:<function>`, `mult:<function>`, `signs`, `noisy-phase:a,amp`.
/// Only `phase:a1,a2,...` takes several variables.
/// `span` is the largest argument that will be evaluated, used to size the
/// sieve and the random tables.
pub fn sequence(spec: &str, span: u64, rng: &mut ChaCha8Rng) -> Result<ComplexSeqNd> {
    let (kind, args) = head(spec);
    let seq = match kind {
        "one" => ComplexSeqNd::constant(1, Complex64::new(1.0, 0.0)),
        "alternating" => ComplexSeqNd::alternating(1),
        "phase" => ComplexSeqNd::linear_phase(&nonempty::<f64>(args, "phase")?),
        "poly" => ComplexSeqNd::poly_phase(&nonempty::<f64>(args, "polynomial")?),
        "hardy" => hardy_sequence(&[hardy(args)?])?,
        "mult" => {
            let f = multiplicative(args)?;
            let sieve = FactorSieve::new(span.max(2))?;
            f.as_sequence(Arc::new(sieve))
        }
        "signs" | "noisy-phase" => {
            let len = usize::try_from(span).map_err(|_| CliError::invalid("span too large"))?;
            if len > 1 << 26 {
                return Err(CliError::invalid(format!("random tables are capped at 2^26 entries, need {len}")));
            }
            let (alpha, amp) = if kind == "noisy-phase" {
                let p: Vec<f64> = nonempty(args, "noisy-phase")?;
                if p.len() != 2 {
                    return Err(CliError::invalid("noisy-phase takes alpha,amplitude"));
                }
                (Some(p[0]), p[1])
            } else {
                (None, 0.0)
            };
            let table: Vec<Complex64> = (0..len)
                .map(|_| match alpha {
                    None => Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0),
                    Some(_) => e(rng.gen_range(0.0..1.0)) * amp,
                })
                .collect();
            let table = Arc::new(table);
            ComplexSeqNd::fallible(1, 1.0 + amp, move |n| {
                let i = usize::try_from(n[0] - 1)
                    .ok()
                    .filter(|&i| i < table.len())
                    .ok_or_else(|| ergolab::seqcore::SeqError::Evaluation(format!("n = {} outside the random table", n[0])))?;
                let base = match alpha {
                    Some(a) => e(ergolab::phase::frac_mul(n[0] as i128, a)),
                    None => Complex64::new(0.0, 0.0),
                };
                Ok(base + table[i])
            })
            .with_label(spec.to_string())
        }
        _ => return Err(CliError::invalid(format!("unknown sequence '{spec}'"))),
    };
    Ok(seq)
}

/// Trigonometric polynomial on `T^m`: `;`-joined terms `k1,k2[:re[:im]]`.
pub fn observable(spec: &str, dim: usize) -> Result<TorusObservable> {
    let mut terms = Vec::new();
    for raw in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let mut parts = raw.split(':');
        let k: Vec<i64> = nonempty(parts.next().unwrap_or(""), "frequency")?;
        let re = parts.next().map(|v| scalar(v, "re")).transpose()?.unwrap_or(1.0);
        let im = parts.next().map(|v| scalar(v, "im")).transpose()?.unwrap_or(0.0);
        terms.push((k, Complex64::new(re, im)));
    }
    if terms.is_empty() {
        return Err(CliError::invalid("empty observable"));
    }
    Ok(TorusObservable::from_terms(dim, terms)?)
}

pub fn observables(spec: &str, dim: usize) -> Result<Vec<TorusObservable>> {
    spec.split('|').map(|s| observable(s, dim)).collect()
}

/// Affine maps `x ↦ Mx + shift`: shifts `a,b|c,d`, optional matrices
/// `1,0;1,1|1,0;0,1` (identity when absent).
pub fn system(shifts: &str, matrices: Option<&str>, quadrature: usize) -> Result<CommutingTorusSystem> {
    let shifts: Vec<Vec<f64>> = shifts.split('|').map(|s| nonempty(s, "shift")).collect::<Result<_>>()?;
    let dim = shifts[0].len();
    let maps = match matrices {
        None => shifts.into_iter().map(AffineMap::rotation).collect(),
        Some(m) => {
            let mats: Vec<&str> = m.split('|').collect();
            if mats.len() != shifts.len() {
                return Err(CliError::invalid(format!("{} shifts but {} matrices", shifts.len(), mats.len())));
            }
            mats.iter()
                .zip(shifts)
                .map(|(m, shift)| {
                    let rows: Vec<Vec<i64>> = m.split(';').map(|r| nonempty(r, "matrix row")).collect::<Result<_>>()?;
                    Ok(AffineMap { matrix: IntMatrix::from_rows(rows)?, shift })
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(CommutingTorusSystem::new(dim, maps, quadrature)?)
}

/// Univariate polynomial iterates: `|`-separated, components `;`-separated,
/// coefficients of `1, n, n², …` comma-separated. `None` gives `n·e_i` for
/// the `i`-th observable.
pub fn iterates(spec: Option<&str>, count: usize, maps: usize) -> Result<Vec<PolynomialMapping>> {
    match spec {
        None => {
            if count > maps {
                return Err(CliError::invalid(format!("{count} observables but only {maps} maps; give iterates")));
            }
            Ok((0..count).map(|i| PolynomialMapping::linear_axis(maps, i)).collect())
        }
        Some(s) => s
            .split('|')
            .map(|it| {
                let comps: Vec<Vec<i64>> = it.split(';').map(|c| list(c, "coefficients")).collect::<Result<_>>()?;
                Ok(PolynomialMapping::univariate(comps)?)
            })
            .collect(),
    }
}
