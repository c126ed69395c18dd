//! Closed-form dimension bounds for exceptional sets of projections.
//!
//! `γ` is the dimension of the set, `σ` the projection threshold. Every
//! function rejects parameters outside the range where its formula applies.

use crate::error::{domain, Error, Result};

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        domain(format!("{name} must be finite"))
    }
}

fn in_range(name: &str, v: f64, lo: f64, hi: f64) -> Result<f64> {
    finite(name, v)?;
    if v < lo || v > hi {
        return domain(format!("{name} = {v} outside [{lo}, {hi}]"));
    }
    Ok(v)
}

/// Bound value with an optional note when the input sits outside the range
/// where the estimate is stated.
#[derive(Clone, Debug, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub warning: Option<String>,
}

/// `σ` for `σ ∈ [0, 1]`.
pub fn kaufman(sigma: f64) -> Result<f64> {
    in_range("sigma", sigma, 0.0, 1.0)
}

/// `γ/(1 + (1/σ − 1/2)γ)` for `σ ∈ (0, 1]`, `γ ∈ [0, 2]`.
pub fn falconer_howroyd(gamma: f64, sigma: f64) -> Result<f64> {
    in_range("gamma", gamma, 0.0, 2.0)?;
    in_range("sigma", sigma, 0.0, 1.0)?;
    if sigma == 0.0 {
        return domain("sigma must be positive");
    }
    Ok(gamma / (1.0 + (1.0 / sigma - 0.5) * gamma))
}

/// `2γ/(2 + γ)`.
pub fn fh_lower(gamma: f64) -> Result<f64> {
    in_range("gamma", gamma, 0.0, 2.0)?;
    Ok(2.0 * gamma / (2.0 + gamma))
}

/// `σγ/(γ + σ(γ − 1))` for `0 ≤ σ ≤ γ ≤ 1`, `γ > 0`.
pub fn estimate_bound1(gamma: f64, sigma: f64) -> Result<f64> {
    in_range("gamma", gamma, 0.0, 1.0)?;
    in_range("sigma", sigma, 0.0, gamma)?;
    if gamma == 0.0 {
        return domain("gamma must be positive");
    }
    Ok(sigma * gamma / (gamma + sigma * (gamma - 1.0)))
}

/// `(2σ − γ)(1 − γ)/(γ/2) + σ` for `γ/2 ≤ σ ≤ γ`, `0 < γ ≤ 1`.
pub fn estimate_bound2(gamma: f64, sigma: f64) -> Result<f64> {
    in_range("gamma", gamma, 0.0, 1.0)?;
    if gamma == 0.0 {
        return domain("gamma must be positive");
    }
    in_range("sigma", sigma, gamma / 2.0, gamma)?;
    Ok((2.0 * sigma - gamma) * (1.0 - gamma) / (gamma / 2.0) + sigma)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimate {
    First,
    Second,
}

/// Least applicable estimate and which one attains it.
pub fn best_estimate(gamma: f64, sigma: f64) -> Result<(f64, Estimate)> {
    let a = estimate_bound1(gamma, sigma)?;
    match estimate_bound2(gamma, sigma) {
        Ok(b) if b < a => Ok((b, Estimate::Second)),
        _ => Ok((a, Estimate::First)),
    }
}

/// `τγ/(τγ + (1 − τ))`, the first estimate at `σ = τγ`, for `τ ∈ [0, 1]`.
pub fn bound1_reformulated(gamma: f64, tau: f64) -> Result<f64> {
    in_range("gamma", gamma, 0.0, 1.0)?;
    in_range("tau", tau, 0.0, 1.0)?;
    let den = tau * gamma + (1.0 - tau);
    if den == 0.0 {
        return domain("tau = 1 with gamma = 0 is undefined");
    }
    Ok(tau * gamma / den)
}

/// Threshold `s/2` below which at most `cap` directions lie.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MainPThreshold {
    pub threshold: f64,
    pub cap: u32,
}

pub fn main_p_threshold(s: f64) -> Result<MainPThreshold> {
    in_range("s", s, 0.0, 2.0)?;
    Ok(MainPThreshold { threshold: s / 2.0, cap: 2 })
}

/// `γ` for `γ ∈ [0, 1]`.
pub fn pss(gamma: f64) -> Result<f64> {
    in_range("gamma", gamma, 0.0, 1.0)
}

/// `σ` for `σ ∈ [0, 1]`.
pub fn rams(sigma: f64) -> Result<f64> {
    in_range("sigma", sigma, 0.0, 1.0)
}

/// `σ` for `0 ≤ σ < dim K`; a known `dim K ≤ σ` yields a warning.
pub fn furstenberg(sigma: f64, dim_k: Option<f64>) -> Result<Bound> {
    in_range("sigma", sigma, 0.0, 1.0)?;
    let warning = match dim_k {
        Some(g) if sigma >= finite("dim K", g)? => Some(format!("sigma = {sigma} is not below dim K = {g}")),
        _ => None,
    };
    Ok(Bound { value: sigma, warning })
}

/// Block dimension `d = ⌈3/(1 − σ)⌉` and the admissible open interval
/// `((d+1)/(d+2), 1)` for `τ`, with its midpoint as default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BigexParameters {
    pub d: u32,
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub tau: f64,
}

pub fn bigex_parameters(sigma: f64) -> Result<BigexParameters> {
    finite("sigma", sigma)?;
    if !(sigma > 0.75 && sigma < 1.0) {
        return domain("sigma must lie in (3/4, 1)");
    }
    let x = 3.0 / (1.0 - sigma);
    // snap quotients that are integers up to rounding of σ
    let d = if (x - x.round()).abs() <= 1e-9 * x { x.round() } else { x.ceil() } as u32;
    let tau_lo = (d + 1) as f64 / (d + 2) as f64;
    Ok(BigexParameters { d, tau_lo, tau_hi: 1.0, tau: (tau_lo + 1.0) / 2.0 })
}

/// `1 + σ − m` for `0 ≤ σ ≤ m ≤ 1`.
pub fn category_bound(sigma: f64, m: f64) -> Result<f64> {
    in_range("m", m, 0.0, 1.0)?;
    in_range("sigma", sigma, 0.0, m)?;
    Ok(1.0 + sigma - m)
}

/// The exponent `κ(α, η)` has no closed form; only its limit behaviour as
/// `η ↘ α/2` is known. Returns `None` after validating `0 < α < 2`,
/// `α/2 < η < α`.
pub fn bourgain_kappa(alpha: f64, eta: f64) -> Result<Option<f64>> {
    in_range("alpha", alpha, 0.0, 2.0)?;
    finite("eta", eta)?;
    if alpha == 0.0 || alpha == 2.0 || !(eta > alpha / 2.0 && eta < alpha) {
        return domain("need 0 < alpha < 2 and alpha/2 < eta < alpha");
    }
    Ok(None)
}

/// Parameters of a formula evaluation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundQuery {
    pub gamma: Option<f64>,
    pub sigma: Option<f64>,
    pub s: Option<f64>,
    pub tau: Option<f64>,
    pub m: Option<f64>,
}

pub const FORMULAS: [&str; 13] = ["kaufman", "falconer-howroyd", "fh-lower", "estimate1", "estimate2", "estimate-best", "estimate1-tau", "mainp", "pss", "rams", "furstenberg", "bigex-d", "category"];

fn need(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::Invalid(format!("missing parameter {name}")))
}

/// Value of a named formula; `params` lists the inputs used.
pub fn evaluate(formula: &str, q: &BoundQuery) -> Result<(f64, String)> {
    let g = || need("gamma", q.gamma);
    let sg = || need("sigma", q.sigma);
    let show = |names: &[(&str, f64)]| names.iter().map(|(n, v)| format!("{n}={v}")).collect::<Vec<_>>().join(";");
    Ok(match formula {
        "kaufman" => (kaufman(sg()?)?, show(&[("sigma", sg()?)])),
        "falconer-howroyd" => (falconer_howroyd(g()?, sg()?)?, show(&[("gamma", g()?), ("sigma", sg()?)])),
        "fh-lower" => (fh_lower(g()?)?, show(&[("gamma", g()?)])),
        "estimate1" => (estimate_bound1(g()?, sg()?)?, show(&[("gamma", g()?), ("sigma", sg()?)])),
        "estimate2" => (estimate_bound2(g()?, sg()?)?, show(&[("gamma", g()?), ("sigma", sg()?)])),
        "estimate-best" => (best_estimate(g()?, sg()?)?.0, show(&[("gamma", g()?), ("sigma", sg()?)])),
        "estimate1-tau" => {
            let t = need("tau", q.tau)?;
            (bound1_reformulated(g()?, t)?, show(&[("gamma", g()?), ("tau", t)]))
        }
        "mainp" => {
            let s = need("s", q.s)?;
            (main_p_threshold(s)?.threshold, show(&[("s", s)]))
        }
        "pss" => (pss(g()?)?, show(&[("gamma", g()?)])),
        "rams" => (rams(sg()?)?, show(&[("sigma", sg()?)])),
        "furstenberg" => (furstenberg(sg()?, q.gamma)?.value, show(&[("sigma", sg()?)])),
        "bigex-d" => (bigex_parameters(sg()?)?.d as f64, show(&[("sigma", sg()?)])),
        "category" => {
            let m = need("m", q.m)?;
            (category_bound(sg()?, m)?, show(&[("sigma", sg()?), ("m", m)]))
        }
        other => return Err(Error::Invalid(format!("unknown formula '{other}'; known: {}", FORMULAS.join(", ")))),
    })
}
