//! Subcommand arguments and their experiment runners.

use std::path::PathBuf;

use clap::Args;
use ergolab::arith::{
    aperiodicity_scan, d_distance_profile, katai_grid, s_ab_density, twisted_average, FactorSieve,
};
use ergolab::decomp::{fit_structured, residual_uniformity, DecompError, NilDictionary};
use ergolab::dynsys::{
    cauchy_convergence_probe, correlation_sequence, hk_seminorm, weighted_multiple_average, AverageSpec,
};
use ergolab::hardy::{
    fejer_sandwich, level_set, taylor_localization, weighted_decay_table,
};
use ergolab::seqcore::{gowers_norm, gowers_u2_spectral, uniformity_seminorm, ComplexSeqNd, FolnerWindow};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{de_text, Runtime};
use crate::error::{CliError, Result};
use crate::output::{Outcome, Table};
use crate::parse;

fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| CliError::invalid(format!("missing parameter --{name}")))
}

fn windows(v: &Option<String>) -> Result<Vec<u64>> {
    let ns: Vec<u64> = parse::list(v.as_deref().unwrap_or(""), "N")?;
    if ns.is_empty() {
        return Err(CliError::invalid("empty window list: give --N"));
    }
    if ns.contains(&0) {
        return Err(CliError::invalid("window lengths must be positive"));
    }
    Ok(ns)
}

fn single(v: &Option<String>) -> Result<u64> {
    match windows(v)?.as_slice() {
        [n] => Ok(*n),
        more => Err(CliError::invalid(format!("expected a single N, got {}", more.len()))),
    }
}

fn one_mode(modes: &[(&'static str, bool)]) -> Result<&'static str> {
    let on: Vec<&str> = modes.iter().filter(|m| m.1).map(|m| m.0).collect();
    match on.as_slice() {
        [m] => Ok(m),
        [] => Err(CliError::invalid(format!(
            "choose one of {}",
            modes.iter().map(|m| format!("--{}", m.0)).collect::<Vec<_>>().join(", ")
        ))),
        _ => Err(CliError::invalid(format!("modes {on:?} are mutually exclusive"))),
    }
}

// ---------------------------------------------------------------- gowers

/// Gowers norm tables over `N` and `s`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GowersArgs {
    /// Moduli, comma-separated.
    #[arg(long = "N")]
    #[serde(rename = "N", default, deserialize_with = "de_text")]
    pub n: Option<String>,
    /// Highest order; rows are written for `1..=s`.
    #[arg(long)]
    #[serde(default)]
    pub s: Option<usize>,
    /// Dimension `d` of `Z_N^d`.
    #[arg(long)]
    #[serde(default)]
    pub d: Option<usize>,
    /// `const`, `char:k=3[,1]`, `quad`, `random`, `signs`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub f: Option<String>,
}

pub fn gowers(p: &GowersArgs, rt: &Runtime, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let ns = windows(&p.n)?;
    let s_max = p.s.unwrap_or(2);
    let d = p.d.unwrap_or(1);
    let spec = p.f.clone().unwrap_or_else(|| format!("char:k={}", vec!["1"; d.max(1)].join(",")));
    if s_max == 0 || d == 0 {
        return Err(CliError::invalid("s and d must be positive"));
    }
    let mut t = Table::new(&[
        ("f", "grid function spec"),
        ("N", "modulus"),
        ("d", "dimension"),
        ("s", "order"),
        ("norm", "‖f‖_{U^s(Z_N^d)}, cube definition"),
        ("spectral_u2", "‖f‖_{U²} from the Fourier transform (s = 2 only)"),
    ]);
    for n in ns {
        let n = usize::try_from(n).map_err(|_| CliError::invalid("N too large"))?;
        let f = parse::grid_function(&spec, n, d, rng)?;
        for s in 1..=s_max {
            let norm = gowers_norm(&f, s, &rt.limits)?;
            let spectral = (s == 2).then(|| gowers_u2_spectral(&f));
            t.push(vec![spec.as_str().into(), n.into(), d.into(), s.into(), norm.into(), spectral.into()]);
        }
    }
    Ok(Outcome::new(t))
}

// ---------------------------------------------------------------- systems

/// Commuting affine maps on a torus.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SystemArgs {
    /// Translation parts, maps separated by `|`: `0.414,0|0,0.732`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub shifts: Option<String>,
    /// Integer unipotent matrices, maps by `|`, rows by `;`: `1,0;1,1`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub matrices: Option<String>,
    /// Midpoint-rule resolution per axis for the quadrature cross-check.
    #[arg(long)]
    #[serde(default)]
    pub quadrature: Option<usize>,
}

impl SystemArgs {
    fn build(&self) -> Result<ergolab::dynsys::CommutingTorusSystem> {
        parse::system(&need(&self.shifts, "shifts")?, self.matrices.as_deref(), self.quadrature.unwrap_or(32))
    }
}

// ---------------------------------------------------------------- average

/// Weighted multiple ergodic averages with Cauchy probes.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AverageArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    /// Observables separated by `|`, terms `k1,k2[:re[:im]]` by `;`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub observables: Option<String>,
    /// Polynomial iterates, `|`-separated; defaults to `n·e_i`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub iterates: Option<String>,
    /// Weight sequence, e.g. `one`, `phase:0.3`, `mult:liouville`.
    #[arg(long)]
    #[serde(default, deserialize_with = "de_text")]
    pub weight: Option<String>,
    /// Window lengths.
    #[arg(long = "N")]
    #[serde(rename = "N", default, deserialize_with = "de_text")]
    pub n: Option<String>,
}

pub fn average(p: &AverageArgs, rt: &Runtime, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let system = p.system.build()?;
    let observables = parse::observables(&need(&p.observables, "observables")?, system.dim())?;
    let iterates = parse::iterates(p.iterates.as_deref(), observables.len(), system.map_count())?;
    let ns = windows(&p.n)?;
    let span = ns.iter().max().copied().unwrap_or(1).saturating_mul(4);
    let weight = parse::sequence(p.weight.as_deref().unwrap_or("one"), span, rng)?;
    let spec = AverageSpec { weight, observables, iterates };
    let mut t = Table::new(&[
        ("N", "window length"),
        ("l2", "‖A_N‖_{L²} by Parseval"),
        ("l2_quadrature", "‖A_N‖_{L²} by the midpoint rule"),
        ("bound", "sup|w|·∏ sup|f_i|"),
        ("l2_2N", "‖A_{2N}‖_{L²}"),
        ("l2_4N", "‖A_{4N}‖_{L²}"),
        ("delta_N", "‖A_N − A_{2N}‖_{L²}"),
        ("delta_2N", "‖A_{2N} − A_{4N}‖_{L²}"),
        ("ratio", "delta_2N / delta_N"),
        ("non_cauchy", "delta_2N exceeds delta_N beyond rounding"),
    ]);
    let mut averages = Vec::new();
    for n in ns {
        let w = FolnerWindow::interval(n)?;
        let avg = weighted_multiple_average(&system, &spec, &w, &rt.limits)?;
        let probe = cauchy_convergence_probe(&system, &spec, &w, &rt.limits)?;
        t.push(vec![
            n.into(),
            avg.l2.into(),
            avg.l2_quadrature.into(),
            avg.bound.into(),
            probe.norms[1].into(),
            probe.norms[2].into(),
            probe.delta_n.into(),
            probe.delta_2n.into(),
            probe.ratio.into(),
            probe.non_cauchy.into(),
        ]);
        let terms: Vec<_> = avg
            .average
            .terms()
            .map(|(k, c)| json!({ "freq": k, "re": c.re, "im": c.im }))
            .collect();
        averages.push(json!({ "N": n, "terms": terms }));
    }
    Ok(Outcome::new(t).with_details(json!({ "averages": averages })))
}

// ---------------------------------------------------------------- correlate

/// Correlation sequences `a(n) = ∫ f_0 · ∏ f_i ∘ T_{p_i(n)} dμ`.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    /// The untransformed observable.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub f0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub observables: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub iterates: Option<String>,
    /// Rows are written for `n = 1..=N`.
    #[arg(long = "N")]
    #[serde(rename = "N", default, deserialize_with = "de_text")]
    pub n: Option<String>,
}

pub fn correlate(p: &CorrelateArgs, rt: &Runtime) -> Result<Outcome> {
    let system = p.system.build()?;
    let f0 = parse::observable(&need(&p.f0, "f0")?, system.dim())?;
    let fs = parse::observables(&need(&p.observables, "observables")?, system.dim())?;
    let maps = parse::iterates(p.iterates.as_deref(), fs.len(), system.map_count())?;
    let n = single(&p.n)?;
    if n > rt.limits.max_window_points {
        return Err(ergolab::seqcore::SeqError::WindowTooLarge { points: n, max: rt.limits.max_window_points }.into());
    }
    let a = correlation_sequence(&system, &f0, &fs, &maps)?;
    let mut t = Table::new(&[("n", "iterate"), ("re", "Re a(n)"), ("im", "Im a(n)"), ("modulus", "|a(n)|")]);
    for m in 1..=n as i64 {
        let v = a.eval(&[m])?;
        t.push(vec![m.into(), v.re.into(), v.im.into(), v.norm().into()]);
    }
    Ok(Outcome::new(t))
}

// ---------------------------------------------------------------- decompose

/// Greedy structured fit and residual uniformity.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeArgs {
    /// Input sequence, e.g. `phase:0.414`, `noisy-phase:0.414,0.1`, `signs`.
    #[arg(long)]
    #[serde(default, deserialize_with = "de_text")]
    pub input: Option<String>,
    /// Window length.
    #[arg(long = "N")]
    #[serde(rename = "N", default, deserialize_with = "de_text")]
    pub n: Option<String>,
    /// Farey order of the frequency grid.
    #[arg(long)]
    #[serde(default)]
    pub farey: Option<u64>,
    /// Extra frequencies added to the grid.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub extra: Option<String>,
    #[arg(long)]
    #[serde(default, rename = "max-terms")]
    pub max_terms: Option<usize>,
    /// Stop when the best correlation falls below this.
    #[arg(long)]
    #[serde(default)]
    pub tol: Option<f64>,
    /// Order of the residual uniformity norm.
    #[arg(long)]
    #[serde(default)]
    pub k: Option<usize>,
    /// Grid size for the wrapped uniformity norm.
    #[arg(long)]
    #[serde(default, rename = "n-wrap")]
    pub n_wrap: Option<usize>,
}

pub fn decompose(p: &DecomposeArgs, rt: &Runtime, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let n = single(&p.n)?;
    let input = need(&p.input, "input")?;
    let a = parse::sequence(&input, n, rng)?;
    let extra: Vec<f64> = parse::list(p.extra.as_deref().unwrap_or(""), "extra")?;
    let dict = NilDictionary::frequency_grid(1, p.farey.unwrap_or(12), &extra)?;
    let window = FolnerWindow::interval(n)?;
    let fit = fit_structured(&a, &window, &dict, p.max_terms.unwrap_or(5), p.tol.unwrap_or(1e-9), &rt.limits);
    let mut report = match fit {
        Ok(r) => r,
        Err(DecompError::GramIllConditioned { condition, partial }) => {
            let details = json!({ "partial": partial });
            return Err(CliError::WithDetails {
                error: Box::new(DecompError::GramIllConditioned { condition, partial }.into()),
                details,
            });
        }
        Err(e) => return Err(e.into()),
    };
    let n_wrap = p.n_wrap.unwrap_or_else(|| (n as usize).min(64));
    let k = p.k.unwrap_or(2);
    residual_uniformity(&mut report, k, n_wrap, &rt.limits)?;
    let s = &report.summary;
    let mut t = Table::new(&[
        ("step", "selection order"),
        ("index", "dictionary position"),
        ("label", "atom"),
        ("re", "Re c_j after the final re-solve"),
        ("im", "Im c_j after the final re-solve"),
        ("modulus", "|c_j|"),
        ("correlation", "|⟨r, φ⟩_w| when selected"),
        ("residual_norm", "Besicovitch norm of the residual after this step"),
    ]);
    for (i, atom) in s.atoms.iter().enumerate() {
        t.push(vec![
            (i + 1).into(),
            atom.index.into(),
            atom.label.clone().into(),
            atom.re.into(),
            atom.im.into(),
            atom.re.hypot(atom.im).into(),
            s.correlations[i].into(),
            s.residual_history[i + 1].into(),
        ]);
    }
    let details = serde_json::to_value(s).expect("summaries serialize");
    Ok(Outcome::new(t).with_details(details))
}

// ---------------------------------------------------------------- arith

/// Arithmetic experiments.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArithArgs {
    /// Density of `{n ≤ N : ω(n + c) ≡ a mod b}`.
    #[arg(long)]
    #[serde(default)]
    pub density: bool,
    /// Partial pretentious distances `𝔻(φ, ψ; P)²`.
    #[arg(long)]
    #[serde(default)]
    pub distance: bool,
    /// Averages along `an + b` for `a ≤ a_max`, `0 ≤ b < a`.
    #[arg(long)]
    #[serde(default)]
    pub scan: bool,
    /// `|N⁻¹ Σ φ(n) e(nα)|` over a list of `N`.
    #[arg(long)]
    #[serde(default)]
    pub twisted: bool,
    /// Kátai correlations over distinct prime quadruples.
    #[arg(long)]
    #[serde(default)]
    pub katai: bool,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub a: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub b: Option<u64>,
    /// Shift `c` in `ω(n + c)`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub c: Option<i64>,
    #[arg(long = "N")]
    #[serde(rename = "N", default, deserialize_with = "de_text")]
    pub n: Option<String>,
    /// Multiplicative function, e.g. `liouville`, `fb:b=2`, `chi:q=5,j=1`.
    #[arg(long)]
    #[serde(default, deserialize_with = "de_text")]
    pub phi: Option<String>,
    /// Comparison function for `--distance`.
    #[arg(long)]
    #[serde(default, deserialize_with = "de_text")]
    pub psi: Option<String>,
    /// Prime bounds for `--distance`.
    #[arg(long = "P")]
    #[serde(rename = "P", default, deserialize_with = "de_text")]
    pub p: Option<String>,
    #[arg(long)]
    #[serde(default, rename = "a-max")]
    pub a_max: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Primes for `--katai`.
    #[arg(long)]
    #[serde(default, deserialize_with = "de_text")]
    pub primes: Option<String>,
    #[arg(long)]
    #[serde(default)]
    pub n1: Option<u64>,
    #[arg(long)]
    #[serde(default)]
    pub n2: Option<u64>,
    /// Sequence tested by `--katai`; one-variable `b` becomes `b(m)·b(n)`.
    #[arg(long)]
    #[serde(default, deserialize_with = "de_text")]
    pub seq: Option<String>,
    /// Binary sieve cache, reused when large enough.
    #[arg(long)]
    #[serde(default, rename = "sieve-cache")]
    pub sieve_cache: Option<PathBuf>,
}

impl ArithArgs {
    fn sieve(&self, limit: u64) -> Result<FactorSieve> {
        let limit = limit.max(2);
        Ok(match &self.sieve_cache {
            Some(path) => FactorSieve::load_or_build(path, limit)?,
            None => FactorSieve::new(limit)?,
        })
    }
}

pub fn arith(p: &ArithArgs, rt: &Runtime, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mode = one_mode(&[
        ("density", p.density),
        ("distance", p.distance),
        ("scan", p.scan),
        ("twisted", p.twisted),
        ("katai", p.katai),
    ])?;
    let phi = || parse::multiplicative(p.phi.as_deref().unwrap_or("fb:b=2"));
    match mode {
        "density" => {
            let (a, b, c) = (need(&p.a, "a")?, need(&p.b, "b")?, p.c.unwrap_or(0));
            let ns = windows(&p.n)?;
            let top = ns.iter().max().copied().unwrap_or(1);
            let sieve = p.sieve(top.saturating_add(c.unsigned_abs()).saturating_add(1))?;
            let mut t = Table::new(&[
                ("a", "residue"),
                ("b", "modulus"),
                ("c", "shift"),
                ("N", "horizon"),
                ("count", "members n ≤ N"),
                ("density", "count / N"),
                ("limit", "limiting density 1/b"),
            ]);
            for n in ns {
                let d = s_ab_density(a, b, c, n, &sieve)?;
                t.push(vec![a.into(), b.into(), c.into(), n.into(), d.count.into(), d.density.into(), d.limit.into()]);
            }
            Ok(Outcome::new(t))
        }
        "distance" => {
            let psi = parse::multiplicative(p.psi.as_deref().unwrap_or("one"))?;
            let mut bounds: Vec<u64> = parse::nonempty(p.p.as_deref().unwrap_or(""), "P")?;
            bounds.sort_unstable();
            bounds.dedup();
            let sieve = p.sieve(*bounds.last().unwrap() + 1)?;
            let prof = d_distance_profile(&phi()?, &psi, &bounds, 0.0, &sieve)?;
            let mut t = Table::new(&[
                ("P", "prime bound"),
                ("primes", "number of primes ≤ P"),
                ("squared", "Σ_{p≤P} (1 − Re φ(p) conj ψ(p)) / p"),
                ("distance", "square root of squared"),
            ]);
            for d in &prof.points {
                t.push(vec![d.prime_bound.into(), d.primes.into(), d.squared.into(), d.distance.into()]);
            }
            Ok(Outcome::new(t).with_details(json!({ "increments": prof.increments, "growing": prof.growing })))
        }
        "scan" => {
            let a_max = need(&p.a_max, "a_max")?;
            let n = single(&p.n)?;
            let sieve = p.sieve(a_max.saturating_mul(n).saturating_add(a_max))?;
            let scan = aperiodicity_scan(&phi()?, a_max, n, &sieve)?;
            let mut t = Table::new(&[
                ("a", "progression step"),
                ("b", "offset"),
                ("re", "Re N⁻¹ Σ φ(an + b)"),
                ("im", "Im N⁻¹ Σ φ(an + b)"),
                ("modulus", "absolute value"),
            ]);
            for e in &scan.entries {
                t.push(vec![e.a.into(), e.b.into(), e.re.into(), e.im.into(), e.modulus.into()]);
            }
            Ok(Outcome::new(t).with_details(json!({ "max_modulus": scan.max_modulus, "argmax": scan.argmax })))
        }
        "twisted" => {
            let alpha = need(&p.alpha, "alpha")?;
            let ns = windows(&p.n)?;
            let sieve = p.sieve(ns.iter().max().copied().unwrap_or(1) + 1)?;
            let f = phi()?;
            let mut t = Table::new(&[
                ("N", "horizon"),
                ("alpha", "twist frequency"),
                ("re", "Re N⁻¹ Σ φ(n) e(nα)"),
                ("im", "Im N⁻¹ Σ φ(n) e(nα)"),
                ("modulus", "absolute value"),
            ]);
            for n in ns {
                let v = twisted_average(&f, alpha, n, &sieve)?;
                t.push(vec![n.into(), alpha.into(), v.re.into(), v.im.into(), v.norm().into()]);
            }
            Ok(Outcome::new(t))
        }
        _ => {
            let primes: Vec<u64> = parse::nonempty(p.primes.as_deref().unwrap_or(""), "primes")?;
            let (n1, n2) = (need(&p.n1, "n1")?, need(&p.n2, "n2")?);
            let span = n1.max(n2).saturating_mul(primes.iter().max().copied().unwrap_or(1));
            let seq = parse::sequence(&need(&p.seq, "seq")?, span, rng)?;
            let seq = match seq.arity() {
                1 => {
                    let b = seq.clone();
                    ComplexSeqNd::fallible(2, seq.bound() * seq.bound(), move |n| Ok(b.eval(&n[..1])? * b.eval(&n[1..])?))
                        .with_label(format!("{0} ⊗ {0}", seq.label()))
                }
                _ => seq,
            };
            let grid = katai_grid(&seq, &primes, n1, n2, &rt.limits)?;
            let mut t = Table::new(&[
                ("p1", "first prime"),
                ("p2", "second prime"),
                ("q1", "third prime"),
                ("q2", "fourth prime"),
                ("re", "Re correlation"),
                ("im", "Im correlation"),
                ("modulus", "absolute value"),
            ]);
            for e in &grid.entries {
                let [a, b, c, d] = e.primes;
                t.push(vec![a.into(), b.into(), c.into(), d.into(), e.re.into(), e.im.into(), e.modulus.into()]);
            }
            Ok(Outcome::new(t).with_details(json!({ "max_modulus": grid.max_modulus, "argmax": grid.argmax })))
        }
    }
}

// ---------------------------------------------------------------- hardy

/// Hardy-field weights.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyArgs {
    /// Level-set densities of `‖f(n)‖ ∈ [a, b]`.
    #[arg(long)]
    #[serde(default)]
    pub level: bool,
    /// Taylor-localization diagnostics.
    #[arg(long)]
    #[serde(default)]
    pub localize: bool,
    /// Decay of `N⁻¹ Σ e(f(n)) e(knα)`.
    #[arg(long)]
    #[serde(default)]
    pub decay: bool,
    /// Trigonometric polynomials bracketing an interval indicator.
    #[arg(long)]
    #[serde(default)]
    pub sandwich: bool,
    /// Function, e.g. `t^1.5` or `2*t^1.2*log^1@3`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub f: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub b: Option<f64>,
    #[arg(long = "N")]
    #[serde(rename = "N", default, deserialize_with = "de_text")]
    pub n: Option<String>,
    /// Localization centres.
    #[arg(long)]
    #[serde(default, deserialize_with = "de_text")]
    pub center: Option<String>,
    /// Taylor order for `--localize`, twist multipliers for `--decay`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default)]
    pub c: Option<f64>,
    #[arg(long = "d")]
    #[serde(default)]
    pub d: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub eps: Option<f64>,
}

pub fn hardy(p: &HardyArgs, rt: &Runtime) -> Result<Outcome> {
    let mode = one_mode(&[
        ("level", p.level),
        ("localize", p.localize),
        ("decay", p.decay),
        ("sandwich", p.sandwich),
    ])?;
    let f = || parse::hardy(p.f.as_deref().unwrap_or("t^1.5"));
    match mode {
        "level" => {
            let f = f()?;
            let (a, b) = (need(&p.a, "a")?, need(&p.b, "b")?);
            let mut t = Table::new(&[
                ("a", "lower end"),
                ("b", "upper end"),
                ("N", "horizon"),
                ("count", "members"),
                ("density", "count / N"),
                ("measure", "Lebesgue measure 2(b − a)"),
                ("fractional_digits", "fractional digits of f(N) carried by double-double"),
            ]);
            for n in windows(&p.n)? {
                let s = level_set(&f, a, b, n, &rt.limits)?;
                t.push(vec![
                    a.into(),
                    b.into(),
                    n.into(),
                    s.members.len().into(),
                    s.density.into(),
                    s.measure.into(),
                    s.fractional_digits.into(),
                ]);
            }
            Ok(Outcome::new(t))
        }
        "localize" => {
            let f = f()?;
            let centers: Vec<u64> = parse::nonempty(p.center.as_deref().unwrap_or(""), "center")?;
            let k = match &p.k {
                Some(k) => parse::scalar(k, "k")?,
                None => f.growth_exponent().ceil().max(1.0) as u32,
            };
            let mut t = Table::new(&[
                ("center", "N"),
                ("k", "Taylor order"),
                ("theta", "window exponent"),
                ("window", "L_N = ⌊N^θ⌋"),
                ("alpha", "f^(k)(N)/k!"),
                ("leading_size", "L_N^k |α_N|"),
                ("max_residual", "max over the window of |f(N+n) − n^k α_N − q_N(n)|"),
                ("predicted_residual", "L_N^{k+1} sup|f^(k+1)| / (k+1)!"),
                ("stays_away", "f stays away from polynomials"),
            ]);
            let mut warnings = Vec::new();
            for c in centers {
                let l = taylor_localization(&f, c, k, p.theta)?;
                warnings.extend(l.warnings.iter().map(|w| format!("N = {c}: {w}")));
                t.push(vec![
                    c.into(),
                    k.into(),
                    l.theta.into(),
                    l.window.into(),
                    l.alpha.into(),
                    l.leading_size.into(),
                    l.max_residual.into(),
                    l.predicted_residual.into(),
                    l.stays_away.into(),
                ]);
            }
            Ok(Outcome::new(t).with_details(json!({ "warnings": warnings })))
        }
        "decay" => {
            let f = f()?;
            let alpha = need(&p.alpha, "alpha")?;
            let ks: Vec<i64> = parse::nonempty(p.k.as_deref().unwrap_or("0,1,2"), "k")?;
            let ns = windows(&p.n)?;
            let rows = weighted_decay_table(&f, alpha, &ks, &ns)?;
            let mut t = Table::new(&[
                ("k", "twist multiplier"),
                ("N", "horizon"),
                ("re", "Re N⁻¹ Σ e(f(n)) e(knα)"),
                ("im", "Im N⁻¹ Σ e(f(n)) e(knα)"),
                ("modulus", "absolute value"),
            ]);
            for r in rows {
                t.push(vec![r.k.into(), r.horizon.into(), r.re.into(), r.im.into(), r.modulus.into()]);
            }
            Ok(Outcome::new(t))
        }
        _ => {
            let (c, d, eps) = (need(&p.c, "c")?, need(&p.d, "d")?, need(&p.eps, "eps")?);
            let s = fejer_sandwich(c, d, eps, &rt.limits)?;
            let mut t = Table::new(&[
                ("polynomial", "lower (P₁) or upper (P₂)"),
                ("j", "frequency; P(t) = Σ 2 Re(c_j e(jt))"),
                ("re", "Re c_j"),
                ("im", "Im c_j"),
            ]);
            for (name, poly) in [("lower", &s.lower), ("upper", &s.upper)] {
                for (j, cj) in poly.coeffs.iter().enumerate() {
                    t.push(vec![name.into(), (j + 1).into(), cj.re.into(), cj.im.into()]);
                }
            }
            Ok(Outcome::new(t).with_details(json!({
                "degree": s.degree,
                "delta": s.delta,
                "grid_points": s.grid_points,
                "lower_margin": s.lower_margin,
                "upper_margin": s.upper_margin,
            })))
        }
    }
}

// ---------------------------------------------------------------- seminorm

/// Finite uniformity seminorms and Host–Kra seminorms.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeminormArgs {
    /// `finite` (window seminorm of a sequence) or `hk` (Host–Kra).
    #[arg(long)]
    #[serde(default, deserialize_with = "de_text")]
    pub kind: Option<String>,
    /// Sequence for `finite`.
    #[arg(long)]
    #[serde(default, deserialize_with = "de_text")]
    pub seq: Option<String>,
    /// Window lengths (`finite`) or averaging horizons (`hk`).
    #[arg(long = "N")]
    #[serde(rename = "N", default, deserialize_with = "de_text")]
    pub n: Option<String>,
    /// Shift ranges for `finite`.
    #[arg(long = "H")]
    #[serde(rename = "H", default, deserialize_with = "de_text")]
    pub h: Option<String>,
    /// Orders.
    #[arg(long)]
    #[serde(default, deserialize_with = "de_text")]
    pub k: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub system: SystemArgs,
    /// Observable for `hk`.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, deserialize_with = "de_text")]
    pub f: Option<String>,
    /// Which map of the system drives the `hk` recursion.
    #[arg(long)]
    #[serde(default)]
    pub map: Option<usize>,
}

pub fn seminorm(p: &SeminormArgs, rt: &Runtime, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let ns = windows(&p.n)?;
    match p.kind.as_deref().unwrap_or("finite") {
        "finite" => {
            let ks: Vec<usize> = parse::nonempty(p.k.as_deref().unwrap_or("1,2"), "k")?;
            let hs: Vec<u64> = parse::nonempty(p.h.as_deref().unwrap_or("4"), "H")?;
            let span = ns.iter().max().copied().unwrap_or(1)
                + (*ks.iter().max().unwrap() as u64).saturating_mul(*hs.iter().max().unwrap())
                + 1;
            let a = parse::sequence(&need(&p.seq, "seq")?, span, rng)?;
            let mut t = Table::new(&[
                ("k", "order"),
                ("H", "shifts range over {1..H}^d"),
                ("N", "window length"),
                ("value", "max(Re S, 0)^{1/2^k}"),
                ("inner_re", "Re S"),
                ("inner_im", "Im S"),
                ("clamp", "amount Re S was raised to reach 0"),
                ("tuples", "shift tuples averaged"),
            ]);
            for &k in &ks {
                for &h in &hs {
                    for &n in &ns {
                        let est = uniformity_seminorm(&a, &FolnerWindow::interval(n)?, k, h, &rt.limits)?;
                        t.push(vec![
                            k.into(),
                            h.into(),
                            n.into(),
                            est.value.into(),
                            est.inner_re.into(),
                            est.inner_im.into(),
                            est.clamp.into(),
                            est.tuples.into(),
                        ]);
                    }
                }
            }
            Ok(Outcome::new(t))
        }
        "hk" => {
            let system = p.system.build()?;
            let f = parse::observable(&need(&p.f, "f")?, system.dim())?;
            let ks: Vec<usize> = parse::nonempty(p.k.as_deref().unwrap_or("1,2,3"), "k")?;
            let map = p.map.unwrap_or(0);
            let mut t = Table::new(&[
                ("k", "order"),
                ("N", "averaging horizon"),
                ("value", "|||f|||_k"),
                ("power", "|||f|||_k^{2^k} before clamping"),
                ("clamp", "amount the power was raised to reach 0"),
                ("closed_form", "Birkhoff sums in closed form"),
            ]);
            for &k in &ks {
                for &n in &ns {
                    let h = hk_seminorm(&system, map, &f, k, n, &rt.limits)?;
                    t.push(vec![k.into(), n.into(), h.value.into(), h.power.into(), h.clamp.into(), h.closed_form.into()]);
                }
            }
            Ok(Outcome::new(t))
        }
        other => Err(CliError::invalid(format!("unknown seminorm kind '{other}' (finite or hk)"))),
    }
}

