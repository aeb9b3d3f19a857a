//! Phase function, its maximizer, the bulk/left-edge/right-edge asymptotics
//! of `V_j(B_p^n)`, the exponential profile and surface-area asymptotics.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{domain, Error, Result};
use crate::exactvol::{intrinsic_volume, volume, PBallSpec};
use crate::logvalue::LogValue;
use crate::oracles::normal_pdf;
use crate::quad::QuadConfig;
use crate::specfun::{f_family, ijkl, lgamma, log_binomial, Ijkl, PExponent};

/// Solved phase problem for a given `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub beta: f64,
    pub theta_star: f64,
    pub psi_at_star: f64,
    pub psi2_at_star: f64,
    /// `|θJ/I / R - 1|` at the returned root.
    pub residual: f64,
    pub ijkl: Ijkl,
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        domain(format!("beta must lie in (0,1), got {beta}"))
    }
}

/// Right side `R(β) = (1-β)p / (2(p-1)β)` of the critical equation.
pub fn critical_ratio(p: f64, beta: f64) -> f64 {
    (1.0 - beta) * p / (2.0 * (p - 1.0) * beta)
}

/// `Ψ_{p,β}(θ) = ((1-β)/2) ln θ + β ln I(θ) + (1-β) ln J(θ)`.
pub fn phase(p: f64, beta: f64, theta: f64, cfg: &QuadConfig) -> Result<f64> {
    PExponent::new(p)?;
    check_beta(beta)?;
    if !(theta > 0.0) {
        return domain(format!("theta must be positive, got {theta}"));
    }
    let i = f_family(p, theta, 0.0, cfg)?;
    let j = f_family(p, theta, p - 2.0, cfg)?;
    Ok(0.5 * (1.0 - beta) * theta.ln() + beta * i.ln() + (1.0 - beta) * j.ln())
}

/// `(Ψ, Ψ', Ψ'')` at `θ`, with derivatives from the F-family chain rule.
pub fn phase_derivatives(p: f64, beta: f64, theta: f64, cfg: &QuadConfig) -> Result<(f64, f64, f64)> {
    let psi = phase(p, beta, theta, cfg)?;
    let v = ijkl(p, theta, cfg)?;
    let f4 = f_family(p, theta, 4.0 * p - 4.0, cfg)?;
    let f5 = f_family(p, theta, 5.0 * p - 6.0, cfg)?;
    let d1 = 0.5 * (1.0 - beta) / theta - beta * v.k / v.i - (1.0 - beta) * v.l / v.j;
    let d2 = -0.5 * (1.0 - beta) / (theta * theta)
        + beta * (f4 / v.i - (v.k / v.i).powi(2))
        + (1.0 - beta) * (f5 / v.j - (v.l / v.j).powi(2));
    Ok((psi, d1, d2))
}

/// `g(θ) = θJ/I` and its derivative.
fn ratio_and_slope(p: f64, theta: f64, v: &Ijkl) -> (f64, f64) {
    let g = theta * v.j / v.i;
    let slope = (v.i * (0.5 * v.j + p * v.k / (2.0 * (p - 1.0))) + theta * v.j * v.k) / (v.i * v.i);
    (g, slope)
}

/// Unique maximizer `θ_{p,β}` of `Ψ_{p,β}`, with `Ψ''` from the closed form at the root.
pub fn phase_maximizer(p: f64, beta: f64, cfg: &QuadConfig) -> Result<PhasePoint> {
    PExponent::new(p)?;
    check_beta(beta)?;
    let target = critical_ratio(p, beta).ln();
    let log_g = |x: f64| -> Result<(f64, f64, Ijkl)> {
        let theta = x.exp();
        let v = ijkl(p, theta, cfg)?;
        let (g, slope) = ratio_and_slope(p, theta, &v);
        Ok((g.ln() - target, theta * slope / g, v))
    };
    // bracket in x = ln θ by unit steps (doubling/halving θ from 1)
    let step = std::f64::consts::LN_2;
    let (mut lo, mut hi);
    let f0 = log_g(0.0)?.0;
    if f0 < 0.0 {
        lo = 0.0;
        hi = step;
        let mut k = 0;
        while log_g(hi)?.0 < 0.0 {
            lo = hi;
            hi += step;
            k += 1;
            if k > 2000 {
                return Err(Error::ConvergenceFailure("could not bracket the phase maximizer".into()));
            }
        }
    } else {
        hi = 0.0;
        lo = -step;
        let mut k = 0;
        while log_g(lo)?.0 > 0.0 {
            hi = lo;
            lo -= step;
            k += 1;
            if k > 2000 {
                return Err(Error::ConvergenceFailure("could not bracket the phase maximizer".into()));
            }
        }
    }
    let mut x = 0.5 * (lo + hi);
    let mut best: Option<(f64, f64, Ijkl)> = None;
    for _ in 0..200 {
        let (f, df, v) = log_g(x)?;
        if best.as_ref().is_none_or(|b| f.abs() < b.1.abs()) {
            best = Some((x, f, v));
        }
        if f.abs() <= 1e-14 {
            break;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - f / df;
        x = if newton.is_finite() && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    let (x, f, v) = best.ok_or_else(|| Error::ConvergenceFailure("phase maximizer loop did not run".into()))?;
    let residual = f.exp_m1().abs();
    if residual > 1e-10 {
        return Err(Error::ConvergenceFailure(format!("critical equation residual {residual:.3e}")));
    }
    let theta = x.exp();
    let (g, slope) = ratio_and_slope(p, theta, &v);
    let psi = 0.5 * (1.0 - beta) * theta.ln() + beta * v.i.ln() + (1.0 - beta) * v.j.ln();
    let psi2 = -beta * v.k / (v.i * g) * slope;
    Ok(PhasePoint { beta, theta_star: theta, psi_at_star: psi, psi2_at_star: psi2, residual, ijkl: v })
}

/// Laplace-method approximation of `V_j(B_p^n)` for `0 < j < n`, with every
/// factor evaluated at `θ_{p,j/n}`.
pub fn bulk_asymptotic(p: f64, n: usize, j: usize, cfg: &QuadConfig) -> Result<LogValue> {
    PExponent::new(p)?;
    if !(0 < j && j < n) {
        return domain(format!("bulk regime needs 0 < j < n, got j = {j}, n = {n}"));
    }
    let (nf, jf) = (n as f64, j as f64);
    let pt = phase_maximizer(p, jf / nf, cfg)?;
    let v = pt.ijkl;
    let log = p.ln() + (nf - jf - 1.0) * (p - 1.0).ln() + nf.ln() + log_binomial(n - 1, j)
        - 2f64.ln()
        - 0.5 * (nf - jf) * std::f64::consts::PI.ln()
        - lgamma((jf + p) / p)
        + (v.k / (pt.theta_star * v.j)).ln()
        + nf * pt.psi_at_star
        + 0.5 * (2.0 * std::f64::consts::PI / (nf * pt.psi2_at_star.abs())).ln();
    Ok(LogValue::from_log(log))
}

/// `(2√π)^{1/p} (Γ(1/(2p-2))/(p-1))^{1-1/p}`, the per-index growth constant at the left edge.
fn left_edge_constant(p: f64) -> f64 {
    (2.0 * std::f64::consts::PI.sqrt()).ln() / p + (1.0 - 1.0 / p) * (lgamma(1.0 / (2.0 * p - 2.0)) - (p - 1.0).ln())
}

/// Left-edge approximation `V_j(B_p^n) ≈ c^j n^{j(1-1/p)} / j!` for fixed `j`.
pub fn left_edge_asymptotic(p: f64, n: usize, j: usize) -> Result<f64> {
    PExponent::new(p)?;
    if j == 0 {
        return Ok(1.0);
    }
    let jf = j as f64;
    Ok((jf * left_edge_constant(p) + jf * (1.0 - 1.0 / p) * (n as f64).ln() - lgamma(jf + 1.0)).exp())
}

/// Right-edge approximation of `V_{n-m}(B_p^n)` for fixed `m ≥ 1`.
pub fn right_edge_asymptotic(p: f64, n: usize, m: usize) -> Result<LogValue> {
    PExponent::new(p)?;
    if m < 1 || m > n {
        return domain(format!("right-edge codimension must lie in [1, n], got {m}"));
    }
    let (nf, mf) = (n as f64, m as f64);
    let base = p.ln() + (p - 1.0).ln() + lgamma(1.0 - 1.0 / p) - std::f64::consts::PI.ln() - lgamma(1.0 / p);
    let log = lgamma(0.5 * mf) - 2f64.ln() - lgamma(mf) + 0.5 * mf * base
        + nf * ((2.0 / p).ln() + lgamma(1.0 / p))
        + 0.5 * mf * nf.ln()
        - lgamma((nf + p - mf) / p);
    Ok(LogValue::from_log(log))
}

/// Surface area of `B_p^n`, or of its volume-one rescaling when `normalized`.
pub fn surface_area_asymptotic(p: f64, n: usize, normalized: bool) -> Result<LogValue> {
    PExponent::new(p)?;
    let nf = n as f64;
    if normalized {
        let pi = std::f64::consts::PI;
        let c = 2.0 * (1.0 / p).exp() * (pi * (p - 1.0) / (p * (pi / p).sin())).sqrt();
        return Ok(LogValue::from_f64(c * nf.sqrt()));
    }
    let log = 0.5 * (p.ln() + (p - 1.0).ln() + lgamma(1.0 - 1.0 / p) - lgamma(1.0 / p))
        + nf * ((2.0 / p).ln() + lgamma(1.0 / p))
        + 0.5 * nf.ln()
        - lgamma((nf + p - 1.0) / p);
    Ok(LogValue::from_log(log))
}

/// Exact surface area of the volume-one rescaling of `B_p^n`.
pub fn normalized_surface_area(p: f64, n: usize, cfg: &QuadConfig) -> Result<f64> {
    let spec = PBallSpec::unit(p, n)?;
    let area = 2f64.ln() + intrinsic_volume(&spec, n - 1, cfg)?.ln();
    let log_vol = volume(&spec).log_abs();
    Ok((area - log_vol * (n as f64 - 1.0) / n as f64).exp())
}

/// `λ_0 = (p Γ((2p-1)/(2p-2)) / √π)^{2(p-1)/p}`.
pub fn lambda0(p: f64) -> f64 {
    let base = p.ln() + lgamma((2.0 * p - 1.0) / (2.0 * p - 2.0)) - 0.5 * std::f64::consts::PI.ln();
    (2.0 * (p - 1.0) / p * base).exp()
}

/// `x ln x` with the convention `0 ln 0 = 0`.
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// The combinatorial part `κ_p(α)` of the exponential profile.
pub fn kappa_profile(p: f64, alpha: f64) -> f64 {
    let a = alpha;
    let lead = if a == 0.0 { 0.0 } else { a / p * (1.0 - (a / p).ln()) };
    lead + (1.0 - a) * (p - 1.0).ln() - xlogx(a) - xlogx(1.0 - a) - 0.5 * (1.0 - a) * std::f64::consts::PI.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub alpha: f64,
    pub g_value: f64,
    pub kappa_term: f64,
    pub sup_psi: f64,
}

/// Exponential profile `g_p(α) = κ_p(α) + sup_θ Ψ_{p,α}(θ)`.
pub fn exp_profile(p: f64, alpha: f64, cfg: &QuadConfig) -> Result<ProfilePoint> {
    PExponent::new(p)?;
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [0,1], got {alpha}"));
    }
    let kappa_term = kappa_profile(p, alpha);
    if alpha == 0.0 {
        return Ok(ProfilePoint { alpha, g_value: 0.0, kappa_term, sup_psi: -kappa_term });
    }
    if alpha == 1.0 {
        let g = 2f64.ln() + (1.0 + p.ln()) / p + lgamma(1.0 + 1.0 / p);
        return Ok(ProfilePoint { alpha, g_value: g, kappa_term, sup_psi: g - kappa_term });
    }
    let pt = phase_maximizer(p, alpha, cfg)?;
    Ok(ProfilePoint { alpha, g_value: kappa_term + pt.psi_at_star, kappa_term, sup_psi: pt.psi_at_star })
}

/// Closed-form profiles of cubes, Euclidean balls, crosspolytopes and simplices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileReferences {
    pub g_inf: f64,
    pub g_2: f64,
    pub g_1: f64,
    pub g_simplex: f64,
}

/// Maximizes a smooth concave-enough `h` on `[0, 10]` given `h'` and `h''`.
fn maximize_on_bracket(h: impl Fn(f64) -> f64, dh: impl Fn(f64) -> f64, d2h: impl Fn(f64) -> f64) -> f64 {
    let invphi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0, 10.0);
    let mut x1 = hi - invphi * (hi - lo);
    let mut x2 = lo + invphi * (hi - lo);
    let (mut f1, mut f2) = (h(x1), h(x2));
    while hi - lo > 1e-8 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = h(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = h(x2);
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..5 {
        let curv = d2h(x);
        if !(curv < 0.0) {
            break;
        }
        let next = x - dh(x) / curv;
        if !(next > 0.0 && next.is_finite()) {
            break;
        }
        x = next;
    }
    h(x).max(h(0.5 * (lo + hi)))
}

/// `ln(2Φ(t) - 1)` for `t > 0`, accurate in both tails.
fn log_two_phi_minus_one(t: f64) -> f64 {
    (-erfc(t / std::f64::consts::SQRT_2)).ln_1p()
}

/// `ln Φ(x)` for `x ≥ 0`.
fn log_phi(x: f64) -> f64 {
    (-0.5 * erfc(x / std::f64::consts::SQRT_2)).ln_1p()
}

pub fn profile_references(alpha: f64) -> Result<ProfileReferences> {
    if !(0.0..=1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [0,1], got {alpha}"));
    }
    let a = alpha;
    let g_inf = -xlogx(a) - xlogx(1.0 - a) + a * 2f64.ln();
    let g_2 = -xlogx(a) - 0.5 * xlogx(1.0 - a) + a * 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln();
    let (sup1, sup_simp) = if a == 0.0 {
        (0.0, 0.0)
    } else if a == 1.0 {
        (0.0, 0.0)
    } else {
        let sup1 = maximize_on_bracket(
            |t| -0.5 * a * t * t + (1.0 - a) * log_two_phi_minus_one(t),
            |t| {
                let e = 1.0 - erfc(t / std::f64::consts::SQRT_2);
                -a * t + (1.0 - a) * 2.0 * normal_pdf(t) / e
            },
            |t| {
                let e = 1.0 - erfc(t / std::f64::consts::SQRT_2);
                let ph = normal_pdf(t);
                -a + (1.0 - a) * (-2.0 * t * ph * e - 4.0 * ph * ph) / (e * e)
            },
        );
        let sup_simp = maximize_on_bracket(
            |x| -0.5 * a * x * x + (1.0 - a) * log_phi(x),
            |x| {
                let cdf = 0.5 * erfc(-x / std::f64::consts::SQRT_2);
                -a * x + (1.0 - a) * normal_pdf(x) / cdf
            },
            |x| {
                let cdf = 0.5 * erfc(-x / std::f64::consts::SQRT_2);
                let ph = normal_pdf(x);
                -a + (1.0 - a) * (-x * ph * cdf - ph * ph) / (cdf * cdf)
            },
        );
        (sup1, sup_simp)
    };
    let g_1 = a * (2.0 * std::f64::consts::E).ln() - 2.0 * xlogx(a) - xlogx(1.0 - a) + sup1;
    let g_simplex = a - 2.0 * xlogx(a) - xlogx(1.0 - a) + sup_simp;
    Ok(ProfileReferences { g_inf, g_2, g_1, g_simplex })
}
