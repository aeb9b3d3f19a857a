//! Adaptive Gauss–Kronrod quadrature and a log-space integrator for
//! sharply peaked positive integrands on the half line.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Tolerances and budgets shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Log-drop below the peak at which outer integrands are truncated.
    pub theta_truncation_factor: f64,
    /// Breakpoint separating the singular piece for negative exponents.
    pub singularity_split: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            theta_truncation_factor: 40.0,
            singularity_split: 0.5,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return domain(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return domain(format!("abs_tol must be positive, got {}", self.abs_tol));
        }
        if self.max_subdivisions < 8 {
            return domain(format!("max_subdivisions must be at least 8, got {}", self.max_subdivisions));
        }
        if !(self.theta_truncation_factor >= 10.0 && self.theta_truncation_factor.is_finite()) {
            return domain(format!(
                "theta_truncation_factor must be at least 10, got {}",
                self.theta_truncation_factor
            ));
        }
        if !(self.singularity_split > 0.0 && self.singularity_split < 1.0) {
            return domain(format!("singularity_split must lie in (0,1), got {}", self.singularity_split));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for jj in 0..7 {
        let dx = half * XGK[jj];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jj] = f1;
        fv2[jj] = f2;
        res_k += WGK[jj] * (f1 + f2);
        res_abs += WGK[jj] * (f1.abs() + f2.abs());
        if jj % 2 == 1 {
            res_g += WG[jj / 2] * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::QuadratureFailure(format!("non-finite integrand on [{a}, {b}]")));
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for jj in 0..7 {
        res_asc += WGK[jj] * ((fv1[jj] - mean).abs() + (fv2[jj] - mean).abs());
    }
    let h = half.abs();
    let res_asc = res_asc * h;
    let res_abs = res_abs * h;
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value: res_k * half, err })
}

/// Integrates `f` over `[a, b]` with an adaptive 7/15-point Gauss–Kronrod rule.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    integrate_with_breaks(f, &[a, b], cfg)
}

/// Adaptive integration over consecutive panels `breaks[0] < breaks[1] < ...`.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    if breaks.len() < 2 {
        return domain("at least two breakpoints are required");
    }
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut frozen_err = 0.0;
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if !(w[1] > w[0]) {
            if w[1] == w[0] {
                continue;
            }
            return domain(format!("breakpoints must increase: {} then {}", w[0], w[1]));
        }
        let seg = gk15(&mut f, w[0], w[1])?;
        evaluations += 15;
        total += seg.value;
        total_err += seg.err;
        heap.push(seg);
    }
    let budget = cfg.max_subdivisions.max(breaks.len());
    let mut count = heap.len();
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) || (worst.b - worst.a) <= 1e3 * f64::EPSILON * mid.abs() {
            frozen_err += worst.err;
            if frozen_err > tol {
                return Err(Error::QuadratureFailure(format!(
                    "interval [{}, {}] cannot be refined further (error {:.3e}, target {:.3e})",
                    worst.a, worst.b, total_err, tol
                )));
            }
            continue;
        }
        if count >= budget {
            return Err(Error::QuadratureFailure(format!(
                "subdivision budget {} exhausted (error {:.3e}, target {:.3e})",
                budget, total_err, tol
            )));
        }
        let left = gk15(&mut f, worst.a, mid)?;
        let right = gk15(&mut f, mid, worst.b)?;
        evaluations += 30;
        count += 1;
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    let value: f64 = heap.iter().map(|s| s.value).sum::<f64>();
    let err: f64 = heap.iter().map(|s| s.err).sum::<f64>() + frozen_err;
    Ok(QuadResult { value: if heap.is_empty() { total } else { value }, abs_err: err, evaluations })
}

/// Result of [`integrate_log_peak`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogIntegral {
    /// Natural log of the integral.
    pub log_value: f64,
    /// Estimated relative error.
    pub rel_err: f64,
    /// Number of log-integrand evaluations.
    pub nodes: usize,
}

/// Computes `ln ∫_R exp(h(s)) ds` for a unimodal-ish log-integrand `h`.
///
/// The peak is located by a unit-step scan from `start`, refined by golden
/// section, and the integrand is truncated once it falls
/// `cfg.theta_truncation_factor` below the peak. Both truncated tails are
/// added back with an exponential tail model.
pub fn integrate_log_peak<H>(mut h: H, start: f64, cfg: &QuadConfig) -> Result<LogIntegral>
where
    H: FnMut(f64) -> Result<f64>,
{
    const STEP: f64 = 1.0;
    const MAX_STEPS: usize = 4000;
    let drop = cfg.theta_truncation_factor;
    let mut nodes = 0usize;
    let mut eval = |s: f64, nodes: &mut usize| -> Result<f64> {
        *nodes += 1;
        let v = h(s)?;
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::OverflowGuard(format!("log-integrand is {v} at s = {s}")));
        }
        Ok(v)
    };

    let mut grid: Vec<(f64, f64)> = vec![(start, eval(start, &mut nodes)?)];
    let mut hmax = grid[0].1;
    for dir in [1.0, -1.0] {
        let mut prev = grid[0].1;
        let (mut s, mut step) = (start, STEP);
        for k in 0.. {
            if k > MAX_STEPS {
                return Err(Error::QuadratureFailure(format!(
                    "log-integrand did not decay within {MAX_STEPS} steps (direction {dir})"
                )));
            }
            s += dir * step;
            let v = eval(s, &mut nodes)?;
            grid.push((s, v));
            hmax = hmax.max(v);
            if hmax.is_finite() && v < hmax - drop && v < prev {
                break;
            }
            if hmax.is_finite() && v < hmax - 10.0 && v < prev {
                step *= 1.5;
            } else {
                step = STEP;
            }
            prev = v;
        }
    }
    grid.sort_by(|x, y| x.0.total_cmp(&y.0));
    if !hmax.is_finite() {
        return Err(Error::QuadratureFailure("log-integrand is -inf everywhere scanned".into()));
    }

    // Golden-section refinement of the peak around the best grid point.
    let ibest = grid
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let lo_i = ibest.saturating_sub(1);
    let hi_i = (ibest + 1).min(grid.len() - 1);
    let (mut lo, mut hi) = (grid[lo_i].0, grid[hi_i].0);
    let invphi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - invphi * (hi - lo);
    let mut x2 = lo + invphi * (hi - lo);
    let mut f1 = eval(x1, &mut nodes)?;
    let mut f2 = eval(x2, &mut nodes)?;
    for _ in 0..40 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = eval(x1, &mut nodes)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = eval(x2, &mut nodes)?;
        }
    }
    let (speak, hpeak) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let hmax = hmax.max(hpeak);

    // Width of the peak from the local curvature, for breakpoints.
    let d = 1e-3;
    let hp = eval(speak + d, &mut nodes)?;
    let hm = eval(speak - d, &mut nodes)?;
    let curv = -(hp - 2.0 * hpeak + hm) / (d * d);
    let width = if curv.is_finite() && curv > 1e-12 { curv.powf(-0.5).min(STEP) } else { STEP };

    let s_left = grid.first().map(|g| g.0).unwrap_or(start);
    let s_right = grid.last().map(|g| g.0).unwrap_or(start);
    let mut breaks: Vec<f64> = grid
        .iter()
        .filter(|g| g.1 > hmax - 25.0)
        .map(|g| g.0)
        .collect();
    breaks.push(s_left);
    breaks.push(s_right);
    breaks.push(speak);
    let mut offset = 0.5 * width;
    while offset < 2.0 * STEP {
        for s in [speak - offset, speak + offset] {
            if s > s_left && s < s_right {
                breaks.push(s);
            }
        }
        offset *= 1.5;
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() < 1e-12);

    let mut failure: Option<Error> = None;
    let inner_cfg = QuadConfig { abs_tol: cfg.rel_tol * 1e-3 * width, ..*cfg };
    let res = integrate_with_breaks(
        |s| {
            if failure.is_some() {
                return 0.0;
            }
            match eval(s, &mut nodes) {
                Ok(v) => (v - hmax).exp(),
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        &breaks,
        &inner_cfg,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let res = res?;

    let tail = |edge: (f64, f64), inner: (f64, f64)| -> f64 {
        let slope = (inner.1 - edge.1) / (inner.0 - edge.0).abs();
        let mass = (edge.1 - hmax).exp();
        if slope > 1e-3 && slope.is_finite() {
            mass / slope
        } else {
            mass * 1e3
        }
    };
    let n = grid.len();
    let left_tail = if n >= 2 { tail(grid[0], grid[1]) } else { 0.0 };
    let right_tail = if n >= 2 { tail(grid[n - 1], grid[n - 2]) } else { 0.0 };
    let value = res.value + left_tail + right_tail;
    if !(value > 0.0) {
        return Err(Error::QuadratureFailure("outer integral is not positive".into()));
    }
    let rel_err = (res.abs_err + left_tail + right_tail) / value;
    Ok(LogIntegral { log_value: hmax + value.ln(), rel_err, nodes })
}
