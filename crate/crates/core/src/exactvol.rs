//! Intrinsic volumes, key integrals and curvature-measure moments of weighted
//! ℓp-balls `B_p^n(a) = {x : Σ |a_i x_i|^p ≤ 1}`.
//!
//! Every quantity reduces to a one-dimensional integral over `θ ∈ (0, ∞)`
//! whose integrand is a product of `n` members of the F-family. Integrands are
//! assembled in log space and integrated in `s = ln θ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::logvalue::LogValue;
use crate::quad::{integrate_log_peak, LogIntegral, QuadConfig};
use crate::specfun::{
    f_family_deficit, lgamma, log_binomial, log_f_family, log_f_family_at_zero, log_kappa, PExponent,
};
use crate::symmetric::{log_marked_coefficient, LogFactor};

/// A coordinate-weighted ℓp-ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PBallSpec {
    p: PExponent,
    weights: Vec<f64>,
}

impl PBallSpec {
    pub fn new(p: f64, weights: Vec<f64>) -> Result<Self> {
        let p = PExponent::new(p)?;
        if weights.len() < 2 {
            return domain(format!("dimension must be at least 2, got {}", weights.len()));
        }
        if let Some(a) = weights.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return domain(format!("weights must be positive and finite, got {a}"));
        }
        Ok(PBallSpec { p, weights })
    }

    /// The standard unit ball `B_p^n`.
    pub fn unit(p: f64, n: usize) -> Result<Self> {
        Self::new(p, vec![1.0; n])
    }

    pub fn p(&self) -> f64 {
        self.p.value()
    }

    pub fn exponent(&self) -> PExponent {
        self.p
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn is_unit(&self) -> bool {
        self.weights.iter().all(|&a| a == 1.0)
    }

    /// `Σ |a_i x_i|^p`; the ball is its unit sublevel set.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        let p = self.p();
        x.iter().zip(&self.weights).map(|(xi, ai)| (ai * xi).abs().powf(p)).sum()
    }

    /// Coordinates grouped by identical `(a_k, λ_k)`, in first-occurrence order.
    fn groups(&self, lambdas: &[f64]) -> Vec<(f64, f64, usize)> {
        let mut out: Vec<(f64, f64, usize)> = Vec::new();
        for (k, &a) in self.weights.iter().enumerate() {
            let lam = lambdas.get(k).copied().unwrap_or(0.0);
            match out.iter_mut().find(|g| g.0 == a && g.1 == lam) {
                Some(g) => g.2 += 1,
                None => out.push((a, lam, 1)),
            }
        }
        out
    }
}

/// Quadrature bookkeeping attached to every θ-integral result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub theta_nodes: usize,
    pub est_rel_error: f64,
}

impl Diagnostics {
    const EXACT: Diagnostics = Diagnostics { theta_nodes: 0, est_rel_error: 0.0 };

    fn from(li: &LogIntegral) -> Self {
        Diagnostics { theta_nodes: li.nodes, est_rel_error: li.rel_err }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntrinsicVolumeResult {
    pub value: LogValue,
    pub j: usize,
    pub diagnostics: Diagnostics,
}

impl IntrinsicVolumeResult {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn ln(&self) -> f64 {
        self.value.log_abs()
    }
}

/// Codimension and Mellin exponents of a curvature-measure moment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRequest {
    pub m: usize,
    /// Exponents for the leading coordinates; missing entries are zero.
    pub lambdas: Vec<f64>,
}

impl MomentRequest {
    pub fn new(m: usize, lambdas: Vec<f64>) -> Self {
        MomentRequest { m, lambdas }
    }

    pub fn validate(&self, n: usize, p: f64) -> Result<()> {
        let m = self.m;
        if m < 1 || m > n {
            return domain(format!("codimension m must lie in [1, {n}], got {m}"));
        }
        if self.lambdas.len() > n {
            return domain(format!("{} exponents given for dimension {n}", self.lambdas.len()));
        }
        let floor = if m == 1 {
            -1.0
        } else if m < n {
            f64::max(-1.0, 1.0 - p)
        } else {
            1.0 - p
        };
        if let Some(l) = self.lambdas.iter().find(|l| !(**l > floor && l.is_finite())) {
            return domain(format!("exponent {l} must exceed {floor} for m = {m}"));
        }
        let total: f64 = self.lambdas.iter().sum();
        if !(total > m as f64 - n as f64 - p) {
            return domain(format!("exponent sum {total} must exceed m - n - p = {}", m as f64 - n as f64 - p));
        }
        Ok(())
    }
}

/// `Vol_n(B_p^n(a)) = Π a_i^{-1} (2Γ(1+1/p))^n / Γ(1+n/p)`.
pub fn volume(spec: &PBallSpec) -> LogValue {
    let (p, n) = (spec.p(), spec.n() as f64);
    let log_weights: f64 = spec.weights().iter().map(|a| a.ln()).sum();
    LogValue::from_log(n * (2f64.ln() + lgamma(1.0 + 1.0 / p)) - lgamma(1.0 + n / p) - log_weights)
}

/// `V_j` of the unit ball `B_p^n`.
pub fn intrinsic_volume(spec: &PBallSpec, j: usize, cfg: &QuadConfig) -> Result<IntrinsicVolumeResult> {
    if !spec.is_unit() {
        return domain("intrinsic_volume needs unit weights; use intrinsic_volume_weighted");
    }
    let n = spec.n();
    if let Some(r) = trivial_index(spec, j)? {
        return Ok(r);
    }
    cfg.validate()?;
    let p = spec.p();
    let m = n - j;
    let (jf, mf) = (j as f64, m as f64);
    let prefactor = p.ln() + (mf - 1.0) * (p - 1.0).ln() + log_binomial(n, j)
        - log_kappa(mf)
        - lgamma(1.0 + jf / p)
        - lgamma(0.5 * mf);
    let li = integrate_log_peak(
        |s| {
            let t = s.exp();
            let li = log_f_family(p, t, 0.0, cfg)?;
            let lj = log_f_family(p, t, p - 2.0, cfg)?;
            let lk = log_f_family(p, t, 2.0 * p - 2.0, cfg)?;
            Ok(0.5 * mf * s + jf * li + (mf - 1.0) * lj + lk)
        },
        0.0,
        cfg,
    )?;
    finish(prefactor + li.log_value, j, Diagnostics::from(&li))
}

fn trivial_index(spec: &PBallSpec, j: usize) -> Result<Option<IntrinsicVolumeResult>> {
    let n = spec.n();
    match j {
        0 => Ok(Some(IntrinsicVolumeResult { value: LogValue::ONE, j, diagnostics: Diagnostics::EXACT })),
        _ if j == n => Ok(Some(IntrinsicVolumeResult { value: volume(spec), j, diagnostics: Diagnostics::EXACT })),
        _ if j > n => domain(format!("index j = {j} exceeds dimension {n}")),
        _ => Ok(None),
    }
}

fn finish(log_value: f64, j: usize, diagnostics: Diagnostics) -> Result<IntrinsicVolumeResult> {
    if !log_value.is_finite() {
        return Err(Error::OverflowGuard(format!("log V_{j} is {log_value}")));
    }
    Ok(IntrinsicVolumeResult { value: LogValue::from_log(log_value), j, diagnostics })
}

/// `V_j` of a weighted ball, computed as the total mass of `Φ_j`.
pub fn intrinsic_volume_weighted(spec: &PBallSpec, j: usize, cfg: &QuadConfig) -> Result<IntrinsicVolumeResult> {
    if let Some(r) = trivial_index(spec, j)? {
        return Ok(r);
    }
    let (log_value, diagnostics) = log_mixed_moment(spec, &MomentRequest::new(spec.n() - j, vec![]), cfg)?;
    finish(log_value, j, diagnostics)
}

/// `V_0, …, V_n`, evaluated in parallel over `j`.
pub fn intrinsic_volume_profile(spec: &PBallSpec, cfg: &QuadConfig) -> Result<Vec<IntrinsicVolumeResult>> {
    (0..=spec.n())
        .into_par_iter()
        .map(|j| {
            if spec.is_unit() {
                intrinsic_volume(spec, j, cfg)
            } else {
                intrinsic_volume_weighted(spec, j, cfg)
            }
        })
        .collect()
}

/// Checks `V_r^2 ≥ (r+1)/r · V_{r-1} V_{r+1}` for a full profile, up to `slack` in log.
pub fn is_log_concave(profile: &[LogValue], slack: f64) -> bool {
    (1..profile.len().saturating_sub(1)).all(|r| {
        let lhs = 2.0 * profile[r].log_abs();
        let rhs = ((r + 1) as f64 / r as f64).ln() + profile[r - 1].log_abs() + profile[r + 1].log_abs();
        lhs >= rhs - slack
    })
}

/// `∫_{∂B} Π|x_k|^{λ_k} dΦ_{n-m}`.
pub fn mixed_moment(spec: &PBallSpec, req: &MomentRequest, cfg: &QuadConfig) -> Result<f64> {
    Ok(log_mixed_moment(spec, req, cfg)?.0.exp())
}

/// Natural log of [`mixed_moment`] with quadrature diagnostics.
pub fn log_mixed_moment(spec: &PBallSpec, req: &MomentRequest, cfg: &QuadConfig) -> Result<(f64, Diagnostics)> {
    cfg.validate()?;
    let (p, n) = (spec.p(), spec.n());
    req.validate(n, p)?;
    let m = req.m;
    let mf = m as f64;
    let lam_total: f64 = req.lambdas.iter().sum();
    let groups = spec.groups(&req.lambdas);
    let log_weights: f64 = groups.iter().map(|&(a, l, k)| k as f64 * (l + 1.0) * a.ln()).sum();
    let prefactor = p.ln() + (mf - 1.0) * (p - 1.0).ln()
        - mf.ln()
        - log_kappa(mf)
        - lgamma((n as f64 + lam_total + p - mf) / p)
        - lgamma(0.5 * mf)
        - log_weights;
    let (need_v, need_u) = (m < n, m > 1);
    let mut factors = vec![
        LogFactor { ln_v: f64::NEG_INFINITY, ln_u: f64::NEG_INFINITY, ln_w: 0.0, mult: 0 };
        groups.len()
    ];
    let li = integrate_log_peak(
        |s| {
            let theta = s.exp();
            for (f, &(a, lam, k)) in factors.iter_mut().zip(&groups) {
                let t = theta * a * a;
                let la2 = 2.0 * a.ln();
                f.mult = k;
                f.ln_w = la2 + log_f_family(p, t, lam + 2.0 * p - 2.0, cfg)?;
                if need_u {
                    f.ln_u = la2 + log_f_family(p, t, lam + p - 2.0, cfg)?;
                }
                if need_v {
                    f.ln_v = log_f_family(p, t, lam, cfg)?;
                }
            }
            Ok(0.5 * mf * s + log_marked_coefficient(&factors, m - 1))
        },
        0.0,
        cfg,
    )?;
    let value = prefactor + li.log_value;
    if !value.is_finite() {
        return Err(Error::OverflowGuard(format!("log moment is {value}")));
    }
    Ok((value, Diagnostics::from(&li)))
}

/// The key integral `∫_{∂B} Π|x_i|^{α_i} (Σ a_r^{2p}|x_r|^{2p-2})^{-(α+1)/2} dH^{n-1}`.
pub fn key_integral(spec: &PBallSpec, alpha: f64, alpha_i: &[f64], cfg: &QuadConfig) -> Result<f64> {
    cfg.validate()?;
    let (p, n) = (spec.p(), spec.n());
    if alpha_i.len() != n {
        return domain(format!("expected {n} exponents, got {}", alpha_i.len()));
    }
    if let Some(a) = alpha_i.iter().find(|a| !(**a > -1.0)) {
        return domain(format!("exponent {a} must exceed -1"));
    }
    let total: f64 = alpha_i.iter().sum();
    let upper = (n as f64 + total) / (p - 1.0);
    if !(alpha > 0.0 && alpha < upper) {
        return domain(format!("alpha = {alpha} must lie in (0, {upper})"));
    }
    let mu = (n as f64 + total - alpha * (p - 1.0)) / p;
    let groups = spec.groups(alpha_i);
    let log_weights: f64 = groups.iter().map(|&(a, l, k)| k as f64 * (l + 1.0) * a.ln()).sum();
    let prefactor = p.ln() - log_weights - lgamma(mu) - lgamma(0.5 * alpha);
    let li = integrate_log_peak(
        |s| {
            let theta = s.exp();
            let mut acc = 0.5 * alpha * s;
            for &(a, lam, k) in &groups {
                acc += k as f64 * log_f_family(p, theta * a * a, lam, cfg)?;
            }
            Ok(acc)
        },
        0.0,
        cfg,
    )?;
    Ok((prefactor + li.log_value).exp())
}

/// `∫_{∂B} Π|x_k|^{λ_k} dH^{n-1}`.
pub fn surface_moment(spec: &PBallSpec, lambdas: &[f64], cfg: &QuadConfig) -> Result<f64> {
    cfg.validate()?;
    let (p, n) = (spec.p(), spec.n());
    if lambdas.len() > n {
        return domain(format!("{} exponents given for dimension {n}", lambdas.len()));
    }
    if let Some(l) = lambdas.iter().find(|l| !(**l > -1.0)) {
        return domain(format!("exponent {l} must exceed -1"));
    }
    let lam_total: f64 = lambdas.iter().sum();
    let groups = spec.groups(lambdas);
    let log_weights: f64 = groups.iter().map(|&(a, l, k)| k as f64 * (l + 1.0) * a.ln()).sum();
    let log_g0: f64 = groups.iter().map(|&(_, l, k)| k as f64 * log_f_family_at_zero(p, l)).sum();
    let prefactor = p.ln() - log_weights
        - 2f64.ln()
        - lgamma((n as f64 + lam_total + p - 1.0) / p)
        - 0.5 * std::f64::consts::PI.ln();
    let li = integrate_log_peak(
        |s| {
            let theta = s.exp();
            let mut log_ratio = 0.0;
            for &(a, lam, k) in &groups {
                let t = theta * a * a;
                let lf0 = log_f_family_at_zero(p, lam);
                let d = if t < 1.0 {
                    f_family_deficit(p, t, lam, cfg)? / lf0.exp()
                } else {
                    -(log_f_family(p, t, lam, cfg)? - lf0).exp_m1()
                };
                log_ratio += k as f64 * (-d).ln_1p();
            }
            Ok(-0.5 * s + log_g0 + (-log_ratio.exp_m1()).ln())
        },
        0.0,
        cfg,
    )?;
    Ok((prefactor + li.log_value).exp())
}

/// `κ_j κ_{n-j} / (κ_n C(n,j))`, the factor in Kubota's formula.
pub fn kubota_factor(n: usize, j: usize) -> f64 {
    let (nf, jf) = (n as f64, j as f64);
    (log_kappa(jf) + log_kappa(nf - jf) - log_kappa(nf) - log_binomial(n, j)).exp()
}

/// Expected `j`-volume of a uniformly random orthogonal projection onto a `j`-plane.
pub fn mean_projection_volume(spec: &PBallSpec, j: usize, cfg: &QuadConfig) -> Result<f64> {
    let n = spec.n();
    if j < 1 || j > n {
        return domain(format!("projection dimension must lie in [1, {n}], got {j}"));
    }
    let v = if spec.is_unit() { intrinsic_volume(spec, j, cfg)? } else { intrinsic_volume_weighted(spec, j, cfg)? };
    Ok(kubota_factor(n, j) * v.value_f64())
}
