//! Taylor localization `f(N + n) = n^k α_N + q_N(n) + small` on windows
//! `0 ≤ n ≤ L_N = ⌊N^θ⌋`.

use serde::{Deserialize, Serialize};

use super::function::{hardy_deriv, HardyFunctionSpec};
use super::HardyError;
use crate::dd::Dd;

/// Midpoint of `((k − a)/k, (k + 1 − a)/(k + 1))`. Above the left end
/// `L_N^k |α_N| → ∞`; below the right end the next Taylor term
/// `L_N^{k+1} |f^{(k+1)}(N)|` tends to zero.
pub fn default_theta(k: u32, a: f64) -> f64 {
    let k = k as f64;
    let lo = ((k - a) / k).max(0.0);
    let hi = ((k + 1.0 - a) / (k + 1.0)).min(1.0);
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub center: u64,
    pub order: u32,
    pub theta: f64,
    /// `f^{(k)}(N)/k!`.
    pub alpha: f64,
    /// `q_N(n) = Σ_{j<k} f^{(j)}(N)/j! · n^j`, ascending.
    pub taylor: Vec<f64>,
    pub window: u64,
    /// `L_N / N`.
    pub window_ratio: f64,
    /// `L_N^k |α_N|`.
    pub leading_size: f64,
    pub max_residual: f64,
    /// `L_N^{k+1} max|f^{(k+1)}| / (k+1)!` over the window.
    pub predicted_residual: f64,
    pub stays_away: bool,
    pub warnings: Vec<String>,
}

/// Localizes `f` at `N` with order `k`. `theta = None` picks
/// [`default_theta`].
pub fn taylor_localization(
    f: &HardyFunctionSpec,
    center: u64,
    k: u32,
    theta: Option<f64>,
) -> Result<Localization, HardyError> {
    let a = f.growth_exponent();
    let needed = a.ceil().max(1.0) as u32;
    if k < needed {
        return Err(HardyError::OrderTooSmall { k, needed });
    }
    let n0 = center as f64;
    if n0 < f.t0() {
        return Err(HardyError::Domain { t: n0, t0: f.t0() });
    }
    let theta = theta.unwrap_or_else(|| default_theta(k, a));
    if !(theta > 0.0 && theta < 1.0) {
        return Err(HardyError::InvalidSpec(format!("theta = {theta} must lie in (0, 1)")));
    }
    let window = n0.powf(theta).floor() as u64;
    f.check_horizon(center.saturating_add(window))?;

    let nd = Dd::from(n0);
    let mut fact = Dd::ONE;
    let mut derivs: Vec<Dd> = Vec::with_capacity(k as usize + 1);
    let mut g = f.clone();
    for j in 0..=k {
        if j > 0 {
            fact = fact * Dd::from(j as f64);
            g = g.deriv();
        }
        derivs.push(g.eval_dd(nd)? / fact);
    }
    let alpha = derivs[k as usize];
    let taylor_dd = &derivs[..k as usize];

    let mut max_residual = 0.0f64;
    for n in 0..=window {
        let x = Dd::from(n as f64);
        let mut q = Dd::ZERO;
        for c in taylor_dd.iter().rev() {
            q = q * x + *c;
        }
        let lead = alpha * x.powi(k as i32);
        let r = f.eval_dd(Dd::from((center + n) as f64))? - lead - q;
        max_residual = max_residual.max(r.abs().to_f64());
    }

    let next = hardy_deriv(f, k + 1);
    let kfact: f64 = (1..=k + 1).map(|j| j as f64).product();
    let sup_next = next.magnitude(n0).max(next.magnitude(n0 + window as f64));
    let predicted_residual = (window as f64).powi(k as i32 + 1) * sup_next / kfact;

    let stays_away = f.stays_away();
    let mut warnings = Vec::new();
    if !stays_away {
        warnings.push("f does not stay away from polynomials; the localization is degenerate".into());
    }
    let leading_size = (window as f64).powi(k as i32) * alpha.to_f64().abs();
    if leading_size <= 1.0 {
        warnings.push(format!("L_N^k |alpha_N| = {leading_size:.3e} is not large"));
    }
    Ok(Localization {
        center,
        order: k,
        theta,
        alpha: alpha.to_f64(),
        taylor: taylor_dd.iter().map(|c| c.to_f64()).collect(),
        window,
        window_ratio: window as f64 / n0,
        leading_size,
        max_residual,
        predicted_residual,
        stays_away,
        warnings,
    })
}
