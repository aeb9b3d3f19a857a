//! Maxwell–Poincaré–Borel limit laws for coordinates of random points drawn
//! from normalized curvature measures of `B_p^n`, their Mellin moments, and
//! skeleton samplers for cubes and crosspolytopes.

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{lambda0, phase_maximizer, PhasePoint};
use crate::error::{domain, Error, Result};
use crate::exactvol::{log_mixed_moment, MomentRequest, PBallSpec};
use crate::logvalue::log_add_exp;
use crate::oracles::McConfig;
use crate::quad::{integrate_log_peak, QuadConfig};
use crate::specfun::{lgamma, log_f_family, PExponent};

/// Asymptotic regime of the curvature-measure index `j(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    /// `j(n) = ⌊αn⌋`.
    Bulk { alpha: f64 },
    /// Fixed `j`.
    LeftEdge { j: usize },
    /// `j(n) = n - m`.
    RightEdge { m: usize },
}

impl Regime {
    /// The index `j(n)`.
    pub fn index(&self, n: usize) -> Result<usize> {
        let j = match *self {
            Regime::Bulk { alpha } => (alpha * n as f64).floor() as usize,
            Regime::LeftEdge { j } => j,
            Regime::RightEdge { m } => {
                if m > n {
                    return domain(format!("codimension {m} exceeds n = {n}"));
                }
                n - m
            }
        };
        if j >= n {
            return domain(format!("curvature index {j} must be below n = {n}"));
        }
        Ok(j)
    }
}

/// One of the limit laws `f_{p,α}`, `g_p`, `f_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitLaw {
    p: f64,
    regime: Regime,
    phase: Option<PhasePoint>,
    lambda0: f64,
    log_norm_i: f64,
    log_norm_j: f64,
}

impl LimitLaw {
    /// Builds the law and checks by quadrature that its density integrates to 1.
    pub fn new(p: f64, regime: Regime, cfg: &QuadConfig) -> Result<Self> {
        PExponent::new(p)?;
        let mut law = LimitLaw { p, regime, phase: None, lambda0: lambda0(p), log_norm_i: 0.0, log_norm_j: 0.0 };
        if let Regime::Bulk { alpha } = regime {
            if !(alpha > 0.0 && alpha < 1.0) {
                return domain(format!("bulk alpha must lie in (0,1), got {alpha}"));
            }
            let pt = phase_maximizer(p, alpha, cfg)?;
            law.log_norm_i = pt.ijkl.i.ln();
            law.log_norm_j = pt.ijkl.j.ln();
            law.phase = Some(pt);
        }
        let mass = law.quadrature_moment(0.0, cfg)?;
        if (mass - 1.0).abs() > 1e-8 {
            return Err(Error::QuadratureFailure(format!("limit density has mass {mass}")));
        }
        Ok(law)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn phase(&self) -> Option<&PhasePoint> {
        self.phase.as_ref()
    }

    /// Factor `c` with `n^{1/p} X → c ξ`: `(p/α)^{1/p}` in the bulk, `p^{1/p}` at the edges.
    pub fn scale(&self) -> f64 {
        match self.regime {
            Regime::Bulk { alpha } => (self.p / alpha).powf(1.0 / self.p),
            _ => self.p.powf(1.0 / self.p),
        }
    }

    fn log_density(&self, u: f64) -> f64 {
        let p = self.p;
        let a = u.abs();
        match self.regime {
            Regime::Bulk { alpha } => {
                let theta = self.phase.map(|pt| pt.theta_star).unwrap_or(0.0);
                let mix = log_add_exp(alpha.ln() - self.log_norm_i, (1.0 - alpha).ln() + log_abs_pow(a, p - 2.0) - self.log_norm_j);
                mix - a.powf(p) - theta * a.powf(2.0 * p - 2.0)
            }
            Regime::LeftEdge { .. } => {
                let l0 = self.lambda0;
                (p - 1.0).ln() + 0.5 * (l0 / std::f64::consts::PI).ln() + log_abs_pow(a, p - 2.0) - l0 * a.powf(2.0 * p - 2.0)
            }
            Regime::RightEdge { .. } => -a.powf(p) - 2f64.ln() - lgamma(1.0 + 1.0 / p),
        }
    }

    /// `∫ |u|^λ f(u) du` by log-space quadrature in `ln|u|`.
    pub fn quadrature_moment(&self, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
        let li = integrate_log_peak(|s| Ok((lambda + 1.0) * s + self.log_density(s.exp())), 0.0, cfg)?;
        Ok(2.0 * li.log_value.exp())
    }
}

/// `e ln a`, with `0 ln 0 = 0`.
fn log_abs_pow(a: f64, e: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e * a.ln()
    }
}

/// Density of the limit law at `u`.
pub fn limit_density(law: &LimitLaw, u: f64) -> f64 {
    if u == 0.0 && law.p < 2.0 && !matches!(law.regime, Regime::RightEdge { .. }) {
        return f64::INFINITY;
    }
    law.log_density(u).exp()
}

/// Raw absolute moment `E|ξ|^λ` from its closed form.
pub fn limit_moment(law: &LimitLaw, lambda: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(lambda >= 0.0) {
        return domain(format!("moment order must be nonnegative, got {lambda}"));
    }
    let p = law.p;
    Ok(match law.regime {
        Regime::Bulk { alpha } => {
            let theta = law.phase.map(|pt| pt.theta_star).unwrap_or(0.0);
            let first = log_f_family(p, theta, lambda, cfg)? - law.log_norm_i;
            let second = log_f_family(p, theta, lambda + p - 2.0, cfg)? - law.log_norm_j;
            alpha * first.exp() + (1.0 - alpha) * second.exp()
        }
        Regime::LeftEdge { .. } => {
            let k = 2.0 * p - 2.0;
            (lgamma((lambda + p - 1.0) / k) - 0.5 * std::f64::consts::PI.ln() - lambda / k * law.lambda0.ln()).exp()
        }
        Regime::RightEdge { .. } => (lgamma((lambda + 1.0) / p) - lgamma(1.0 / p)).exp(),
    })
}

/// Limit of `n^{Λ/p} E Π|X_k|^{λ_k}`: `c^Λ Π E|ξ|^{λ_k}` for independent coordinates.
pub fn scaled_limit_moment(law: &LimitLaw, lambdas: &[f64], cfg: &QuadConfig) -> Result<f64> {
    let total: f64 = lambdas.iter().sum();
    let mut out = law.scale().powf(total);
    for &l in lambdas {
        out *= limit_moment(law, l, cfg)?;
    }
    Ok(out)
}

/// `E Π|X_{k;n}|^{λ_k}` for `X_n ~ Φ_j(B_p^n,·)/V_j`, times `n^{Λ/p}` when `scaled`.
pub fn finite_n_moment_ratio(p: f64, n: usize, j: usize, lambdas: &[f64], scaled: bool, cfg: &QuadConfig) -> Result<f64> {
    Ok(finite_n_moment_ratio_with_error(p, n, j, lambdas, scaled, cfg)?.0)
}

/// [`finite_n_moment_ratio`] together with its estimated relative error.
pub fn finite_n_moment_ratio_with_error(
    p: f64,
    n: usize,
    j: usize,
    lambdas: &[f64],
    scaled: bool,
    cfg: &QuadConfig,
) -> Result<(f64, f64)> {
    if j >= n {
        return domain(format!("curvature index {j} must be below n = {n}"));
    }
    if lambdas.len() > n {
        return domain(format!("{} exponents for dimension {n}", lambdas.len()));
    }
    let spec = PBallSpec::unit(p, n)?;
    let m = n - j;
    let (num, dn) = log_mixed_moment(&spec, &MomentRequest::new(m, lambdas.to_vec()), cfg)?;
    let (den, dd) = log_mixed_moment(&spec, &MomentRequest::new(m, Vec::new()), cfg)?;
    let shift = if scaled { lambdas.iter().sum::<f64>() / p * (n as f64).ln() } else { 0.0 };
    Ok(((num - den + shift).exp(), dn.est_rel_error + dd.est_rel_error))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub j: usize,
    pub scaled_moment: f64,
    pub limit: f64,
    pub rel_gap: f64,
    pub est_rel_error: f64,
}

/// Scaled finite-n moments against their limit for each `n`.
pub fn convergence_table(
    p: f64,
    regime: Regime,
    lambdas: &[f64],
    n_list: &[usize],
    cfg: &QuadConfig,
) -> Result<Vec<ConvergenceRow>> {
    let law = LimitLaw::new(p, regime, cfg)?;
    let limit = scaled_limit_moment(&law, lambdas, cfg)?;
    n_list
        .par_iter()
        .map(|&n| {
            let j = regime.index(n)?;
            let (scaled_moment, est_rel_error) = finite_n_moment_ratio_with_error(p, n, j, lambdas, true, cfg)?;
            let rel_gap = (scaled_moment / limit - 1.0).abs();
            Ok(ConvergenceRow { n, j, scaled_moment, limit, rel_gap, est_rel_error })
        })
        .collect()
}

/// True if every gap is below `floor` or strictly smaller than the previous one.
pub fn gaps_decreasing(rows: &[ConvergenceRow], floor: f64) -> bool {
    rows.windows(2).all(|w| w[1].rel_gap <= floor || w[1].rel_gap < w[0].rel_gap)
}

/// Draws of the first coordinates of a random point on a polytope skeleton.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSample {
    /// `count × coords` row-major draws.
    pub draws: Vec<Vec<f64>>,
    pub seed: u64,
    pub source: String,
}

impl EmpiricalSample {
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.draws.iter().map(|row| row[k]).collect()
    }
}

fn run_batches<F>(count: u64, seed: u64, draw: F) -> Vec<Vec<f64>>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Vec<f64> + Sync,
{
    let mc = McConfig::new(count, seed);
    let batches = count.div_ceil(mc.batch);
    let chunks: Vec<Vec<Vec<f64>>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = mc.stream(b);
            let size = mc.batch.min(count - b * mc.batch);
            (0..size).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

fn check_sampler(n: usize, coords: usize, count: u64) -> Result<()> {
    if coords == 0 || coords > n {
        return domain(format!("coords must lie in [1, {n}], got {coords}"));
    }
    if count == 0 {
        return domain("count must be positive");
    }
    Ok(())
}

/// Uniform point on the `j`-skeleton of `[-1,1]^n`, first `coords` coordinates.
pub fn sample_cube_skeleton(n: usize, j: usize, coords: usize, count: u64, seed: u64) -> Result<EmpiricalSample> {
    check_sampler(n, coords, count)?;
    if j > n {
        return domain(format!("cube skeleton dimension must lie in [0, {n}], got {j}"));
    }
    let draws = run_batches(count, seed, |rng| {
        let mut free = vec![false; coords];
        for i in sample(rng, n, j).into_iter() {
            if i < coords {
                free[i] = true;
            }
        }
        free.iter()
            .map(|&f| {
                if f {
                    2.0 * rng.random::<f64>() - 1.0
                } else if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            })
            .collect()
    });
    Ok(EmpiricalSample { draws, seed, source: format!("cube-skeleton n={n} j={j}") })
}

fn exp1(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    -(-rng.random::<f64>()).ln_1p()
}

/// Uniform point on the `j`-skeleton of `n B_1^n`, first `coords` coordinates.
pub fn sample_crosspolytope_skeleton(n: usize, j: usize, coords: usize, count: u64, seed: u64) -> Result<EmpiricalSample> {
    check_sampler(n, coords, count)?;
    if j >= n {
        return domain(format!("crosspolytope skeleton dimension must lie in [0, {}], got {j}", n - 1));
    }
    let nf = n as f64;
    let draws = run_batches(count, seed, |rng| {
        let support = sample(rng, n, j + 1);
        let mut row = vec![0.0; coords];
        let mut total = 0.0;
        for i in support.into_iter() {
            let e = exp1(rng);
            total += e;
            if i < coords {
                row[i] = if rng.random::<bool>() { e } else { -e };
            }
        }
        row.iter().map(|x| nf * x / total).collect()
    });
    Ok(EmpiricalSample { draws, seed, source: format!("crosspolytope-skeleton n={n} j={j}") })
}

/// Limit marginals of the polytope skeleton laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SkeletonLimit {
    /// `α Unif[-1,1] + (1-α)(δ_{-1} + δ_1)/2`.
    Cube { alpha: f64 },
    /// `(1-α)δ_0 + α Laplace(α)`.
    Crosspolytope { alpha: f64 },
}

impl SkeletonLimit {
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            SkeletonLimit::Cube { alpha } => {
                let atoms = 0.5 * (x >= -1.0) as u8 as f64 + 0.5 * (x >= 1.0) as u8 as f64;
                alpha * ((x + 1.0) / 2.0).clamp(0.0, 1.0) + (1.0 - alpha) * atoms
            }
            SkeletonLimit::Crosspolytope { alpha } => {
                let atom = (x >= 0.0) as u8 as f64;
                let lap = if alpha == 0.0 {
                    atom
                } else if x < 0.0 {
                    0.5 * (alpha * x).exp()
                } else {
                    1.0 - 0.5 * (-alpha * x).exp()
                };
                (1.0 - alpha) * atom + alpha * lap
            }
        }
    }

    /// Left limit `P(ξ < x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        match *self {
            SkeletonLimit::Cube { alpha } => {
                let atoms = 0.5 * (x > -1.0) as u8 as f64 + 0.5 * (x > 1.0) as u8 as f64;
                alpha * ((x + 1.0) / 2.0).clamp(0.0, 1.0) + (1.0 - alpha) * atoms
            }
            SkeletonLimit::Crosspolytope { alpha } => {
                let atom = (x > 0.0) as u8 as f64;
                let lap = if alpha == 0.0 {
                    atom
                } else if x <= 0.0 {
                    0.5 * (alpha * x).exp()
                } else {
                    1.0 - 0.5 * (-alpha * x).exp()
                };
                (1.0 - alpha) * atom + alpha * lap
            }
        }
    }
}

/// `sup_x |F_N(x) - F(x)|` for a target with atoms, checking both one-sided limits at every sample value.
pub fn kolmogorov_distance(sample: &[f64], target: &SkeletonLimit) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < xs.len() {
        let v = xs[i];
        let mut k = i;
        while k < xs.len() && xs[k] == v {
            k += 1;
        }
        d = d.max((i as f64 / n - target.cdf_left(v)).abs());
        d = d.max((k as f64 / n - target.cdf(v)).abs());
        i = k;
    }
    d
}
