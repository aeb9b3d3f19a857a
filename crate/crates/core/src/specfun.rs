//! The special-function family `F_p(t; ν) = ∫_R |u|^ν exp(-|u|^p - t|u|^{2p-2}) du`
//! and the Gamma-type constants used throughout the crate.

use serde::{Deserialize, Serialize};
use statrs::function::gamma;

use crate::error::{domain, Error, Result};
use crate::quad::{integrate_with_breaks, QuadConfig};

/// Exponent `p` of an ℓp-ball, restricted to `1 < p < ∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PExponent(f64);

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p > 1.0 && p.is_finite() {
            Ok(PExponent(p))
        } else {
            domain(format!("exponent p must satisfy 1 < p < inf, got {p}"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Hölder conjugate `q = p / (p - 1)`.
    pub fn conjugate(self) -> f64 {
        self.0 / (self.0 - 1.0)
    }
}

impl TryFrom<f64> for PExponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        PExponent::new(p)
    }
}

impl From<PExponent> for f64 {
    fn from(p: PExponent) -> f64 {
        p.0
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(gamma::ln_gamma(x))
    } else {
        domain(format!("log_gamma needs a positive argument, got {x}"))
    }
}

pub(crate) fn lgamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

/// `ln C(n, k)`.
pub fn log_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    lgamma(n as f64 + 1.0) - lgamma(k as f64 + 1.0) - lgamma((n - k) as f64 + 1.0)
}

/// Volume of the Euclidean unit ball in dimension `m`.
pub fn kappa(m: usize) -> f64 {
    match m {
        0 => 1.0,
        2 => std::f64::consts::PI,
        _ => log_kappa(m as f64).exp(),
    }
}

/// `ln κ_m = (m/2) ln π - ln Γ(1 + m/2)`, valid for real `m ≥ 0`.
pub fn log_kappa(m: f64) -> f64 {
    0.5 * m * std::f64::consts::PI.ln() - lgamma(1.0 + 0.5 * m)
}

/// `F_p(0; ν) = (2/p) Γ((ν+1)/p)`.
pub fn f_family_at_zero(p: f64, nu: f64) -> Result<f64> {
    check_args(p, 0.0, nu)?;
    Ok(log_f_family_at_zero(p, nu).exp())
}

pub(crate) fn log_f_family_at_zero(p: f64, nu: f64) -> f64 {
    (2.0 / p).ln() + lgamma((nu + 1.0) / p)
}

fn check_args(p: f64, t: f64, nu: f64) -> Result<()> {
    PExponent::new(p)?;
    if !(t >= 0.0) || !t.is_finite() {
        return domain(format!("t must be finite and non-negative, got {t}"));
    }
    if !(nu > -1.0) || !nu.is_finite() {
        return domain(format!("nu must exceed -1, got {nu}"));
    }
    Ok(())
}

/// Evaluates `F_p(t; ν)`.
pub fn f_family(p: f64, t: f64, nu: f64, cfg: &QuadConfig) -> Result<f64> {
    Ok(log_f_family(p, t, nu, cfg)?.exp())
}

/// Natural logarithm of `F_p(t; ν)`; finite even where `F` itself underflows.
pub fn log_f_family(p: f64, t: f64, nu: f64, cfg: &QuadConfig) -> Result<f64> {
    check_args(p, t, nu)?;
    if t == 0.0 {
        return Ok(log_f_family_at_zero(p, nu));
    }
    log_exp_integral(p, nu, 1.0, t, cfg)
}

/// `ln ∫_R |u|^ν exp(-A|u|^p - B|u|^{2p-2}) du` for `A, B ≥ 0` not both zero.
pub fn log_exp_integral(p: f64, nu: f64, a_coef: f64, b_coef: f64, cfg: &QuadConfig) -> Result<f64> {
    check_args(p, 0.0, nu)?;
    if !(a_coef >= 0.0 && b_coef >= 0.0) || (a_coef == 0.0 && b_coef == 0.0) {
        return domain(format!("coefficients must be non-negative and not both zero: {a_coef}, {b_coef}"));
    }
    let q = 2.0 * p - 2.0;
    let sigma_a = if a_coef > 0.0 { a_coef.powf(-1.0 / p) } else { f64::INFINITY };
    let sigma_b = if b_coef > 0.0 { b_coef.powf(-1.0 / q) } else { f64::INFINITY };
    let sigma = sigma_a.min(sigma_b);
    let a = if a_coef > 0.0 { a_coef * sigma.powf(p) } else { 0.0 };
    let b = if b_coef > 0.0 { b_coef * sigma.powf(q) } else { 0.0 };
    let phi = move |x: f64| a * x.powf(p) + b * x.powf(q);
    let upper = cutoff(nu, cfg, &phi);
    let mode = mode_of(p, nu, a, b, upper);
    let (val, _) = half_line(nu, upper, mode, cfg, |x| (-phi(x)).exp())?;
    if !(val > 0.0) {
        return Err(Error::QuadratureFailure(format!("F integral vanished (p={p}, nu={nu})")));
    }
    Ok((nu + 1.0) * sigma.ln() + (2.0 * val).ln())
}

/// `F_p(0; ν) - F_p(t; ν)`, computed without cancellation for small `t`.
pub fn f_family_deficit(p: f64, t: f64, nu: f64, cfg: &QuadConfig) -> Result<f64> {
    check_args(p, t, nu)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    if t >= 1.0 {
        return Ok(f_family_at_zero(p, nu)? - f_family(p, t, nu, cfg)?);
    }
    let q = 2.0 * p - 2.0;
    let phi = move |x: f64| x.powf(p);
    let upper = cutoff(nu + q, cfg, &phi);
    let mode = mode_of(p, nu + q, 1.0, 0.0, upper);
    let (val, _) = half_line(nu, upper, mode, cfg, |x| {
        -(-t * x.powf(q)).exp_m1() * (-x.powf(p)).exp()
    })?;
    Ok(2.0 * val)
}

/// Point beyond which `x^ν exp(-φ(x))` is negligible at the configured tolerance.
fn cutoff(nu: f64, cfg: &QuadConfig, phi: &impl Fn(f64) -> f64) -> f64 {
    let target = 36.0 - cfg.rel_tol.ln();
    let nu_pos = nu.max(0.0);
    let log_f = |x: f64| nu_pos * x.ln() - phi(x);
    let (mut x_peak, mut peak) = (1.0, log_f(1.0));
    if nu_pos > 0.0 {
        let mut x = 1e-3;
        while x < 1e3 {
            let v = log_f(x);
            if v > peak {
                (x_peak, peak) = (x, v);
            }
            x *= 1.1;
        }
    }
    let excess = |x: f64| peak - target - log_f(x);
    let mut lo = x_peak.max(1.0);
    let mut hi = 2.0 * lo;
    while excess(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Maximizer of `ν ln x - a x^p - b x^{2p-2}` on `(0, upper)`, if `ν > 0`.
fn mode_of(p: f64, nu: f64, a: f64, b: f64, upper: f64) -> Option<f64> {
    if nu <= 0.0 {
        return None;
    }
    let q = 2.0 * p - 2.0;
    let dlog = |x: f64| nu - a * p * x.powf(p) - b * q * x.powf(q);
    let (mut lo, mut hi) = (0.0, upper);
    if dlog(hi) >= 0.0 {
        return None;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if dlog(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `∫_0^upper x^ν g(x) dx`, with the singular substitution for `ν < 0`.
fn half_line(
    nu: f64,
    upper: f64,
    mode: Option<f64>,
    cfg: &QuadConfig,
    g: impl Fn(f64) -> f64,
) -> Result<(f64, f64)> {
    const PANELS: usize = 8;
    let split = if nu < 0.0 { cfg.singularity_split.min(0.5 * upper) } else { 0.0 };
    let mut breaks: Vec<f64> = (0..=PANELS)
        .map(|k| split + (upper - split) * k as f64 / PANELS as f64)
        .collect();
    if let Some(m) = mode {
        if m > split && m < upper {
            breaks.push(m);
            breaks.push(split + 0.5 * (m - split));
            breaks.sort_by(f64::total_cmp);
        }
    }
    let main = if nu == 0.0 {
        integrate_with_breaks(&g, &breaks, cfg)?
    } else {
        integrate_with_breaks(|x: f64| x.powf(nu) * g(x), &breaks, cfg)?
    };
    if nu >= 0.0 {
        return Ok((main.value, main.abs_err));
    }
    let e = 1.0 / (nu + 1.0);
    let wmax = split.powf(nu + 1.0);
    let left = integrate_with_breaks(|w: f64| g(w.powf(e)), &[0.0, 0.5 * wmax, wmax], cfg)?;
    Ok((main.value + e * left.value, main.abs_err + e * left.abs_err))
}

/// Leading term and first-correction coefficient of the large-`t` expansion
/// `F ≈ leading · (1 - correction · t^{-p/(2p-2)})`.
pub fn f_family_large_t(p: f64, t: f64, nu: f64) -> Result<(f64, f64)> {
    check_args(p, t, nu)?;
    if t == 0.0 {
        return domain("large-t expansion needs t > 0");
    }
    let q = 2.0 * p - 2.0;
    let g0 = lgamma((nu + 1.0) / q);
    let leading = (g0 - (p - 1.0).ln() - (nu + 1.0) / q * t.ln()).exp();
    let correction = (lgamma((nu + p + 1.0) / q) - g0).exp();
    Ok((leading, correction))
}

/// The four family members `I, J, K, L` at a common argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ijkl {
    pub i: f64,
    pub j: f64,
    pub k: f64,
    pub l: f64,
}

/// `I = F(t;0)`, `J = F(t;p-2)`, `K = F(t;2p-2)`, `L = F(t;3p-4)`.
pub fn ijkl(p: f64, t: f64, cfg: &QuadConfig) -> Result<Ijkl> {
    Ok(Ijkl {
        i: f_family(p, t, 0.0, cfg)?,
        j: f_family(p, t, p - 2.0, cfg)?,
        k: f_family(p, t, 2.0 * p - 2.0, cfg)?,
        l: f_family(p, t, 3.0 * p - 4.0, cfg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    /// Composite midpoint sum on a fine grid after the substitution u = w^k,
    /// which removes the singularity at the origin.
    fn riemann(p: f64, t: f64, nu: f64) -> f64 {
        let k = 4.0 / (nu + 1.0);
        let (n, wmax) = (400_000usize, 12f64.powf(1.0 / k));
        let h = wmax / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let w = (i as f64 + 0.5) * h;
            let u = w.powf(k);
            s += u.powf(nu) * (-u.powf(p) - t * u.powf(2.0 * p - 2.0)).exp() * k * w.powf(k - 1.0);
        }
        2.0 * s * h
    }

    #[test]
    fn p2_closed_forms() {
        assert_relative_eq!(f_family(2.0, 1.0, 0.0, &cfg()).unwrap(), PI.sqrt() / 2f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(f_family(2.0, 0.0, 0.0, &cfg()).unwrap(), PI.sqrt(), max_relative = 1e-14);
        let v = ijkl(2.0, 3.0, &cfg()).unwrap();
        assert_relative_eq!(v.i, PI.sqrt() / 2.0, max_relative = 1e-12);
        assert_relative_eq!(v.j, PI.sqrt() / 2.0, max_relative = 1e-12);
        assert_relative_eq!(v.k, PI.sqrt() / 16.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_argument_matches_riemann_sum() {
        assert_relative_eq!(f_family(3.0, 0.0, 0.0, &cfg()).unwrap(), 1.785_959_023_138_5, max_relative = 1e-12);
        for &(p, nu) in &[(3.0, 0.0), (1.5, -0.5), (5.0, 2.0)] {
            assert_relative_eq!(f_family_at_zero(p, nu).unwrap(), riemann(p, 0.0, nu), max_relative = 1e-7);
        }
    }

    #[test]
    fn quadrature_matches_riemann_sum() {
        for &(p, t, nu) in &[(1.2, 0.7, -0.8), (1.5, 2.0, -0.5), (3.0, 0.3, 1.0), (5.0, 10.0, 3.0)] {
            let q = f_family(p, t, nu, &cfg()).unwrap();
            assert_relative_eq!(q, riemann(p, t, nu), max_relative = 1e-7);
        }
    }

    #[test]
    fn quadrature_at_zero_matches_closed_form() {
        for &(p, nu) in &[(1.1, -0.05), (1.5, -0.5), (2.0, 0.0), (4.0, 6.0), (64.0, 0.0), (64.0, 126.0)] {
            let q = log_exp_integral(p, nu, 1.0, 0.0, &cfg()).unwrap();
            assert!((q - log_f_family_at_zero(p, nu)).abs() < 1e-10, "p={p} nu={nu}");
        }
    }

    #[test]
    fn huge_argument_stays_in_log_space() {
        let t = 1e200;
        let lf = log_f_family(2.0, t, 0.0, &cfg()).unwrap();
        let exact = 0.5 * PI.ln() - 0.5 * (1.0 + t).ln();
        assert!((lf - exact).abs() < 1e-10);
    }

    #[test]
    fn deficit_matches_difference() {
        for &(p, t, nu) in &[(2.0, 1e-6, 0.0), (1.5, 0.3, -0.4), (3.0, 0.9, 2.0)] {
            let d = f_family_deficit(p, t, nu, &cfg()).unwrap();
            let direct = f_family_at_zero(p, nu).unwrap() - f_family(p, t, nu, &cfg()).unwrap();
            assert_relative_eq!(d, direct, max_relative = 1e-6);
        }
        let t: f64 = 1e-9;
        let exact = -PI.sqrt() * (-0.5 * t.ln_1p()).exp_m1();
        assert_relative_eq!(f_family_deficit(2.0, t, 0.0, &cfg()).unwrap(), exact, max_relative = 1e-9);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(f_family(2.0, 1.0, -1.0, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(f_family(2.0, -1.0, 0.0, &cfg()), Err(Error::Domain(_))));
        assert!(matches!(f_family(1.0, 1.0, 0.0, &cfg()), Err(Error::Domain(_))));
        assert!(log_gamma(0.0).is_err());
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(0), 1.0);
        assert_relative_eq!(kappa(2), PI, max_relative = 1e-14);
        assert_relative_eq!(kappa(3), 4.0 * PI / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn log_gamma_accuracy() {
        assert_relative_eq!(log_gamma(0.5).unwrap(), 0.5 * PI.ln(), max_relative = 1e-13);
        assert_relative_eq!(log_gamma(10.0).unwrap(), 362_880f64.ln(), max_relative = 1e-13);
    }

    #[test]
    fn large_t_leading_term() {
        let (lead, corr) = f_family_large_t(2.0, 1e8, 0.0).unwrap();
        assert_relative_eq!(lead, PI.sqrt() * 1e-4, max_relative = 1e-12);
        assert_relative_eq!(corr, 0.5, max_relative = 1e-12);
    }
}
