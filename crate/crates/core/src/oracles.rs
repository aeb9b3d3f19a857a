//! Independent reference values: closed forms for balls, boxes and
//! crosspolytopes, ellipsoid integrals, planar arclength quadrature, the
//! Euclidean projection onto `B_p^n(a)` and a Monte Carlo Steiner volume.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::{erf, erfc};

use crate::error::{domain, Error, Result};
use crate::exactvol::PBallSpec;
use crate::quad::{integrate, integrate_with_breaks, QuadConfig};
use crate::specfun::{kappa, lgamma, log_binomial, log_kappa};
use crate::symmetric::elementary_symmetric;

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `V_j(B_2^n) = C(n,j) κ_n / κ_{n-j}`.
pub fn ball_vj(n: usize, j: usize) -> f64 {
    assert!(j <= n, "j = {j} exceeds n = {n}");
    (log_binomial(n, j) + log_kappa(n as f64) - log_kappa((n - j) as f64)).exp()
}

/// `V_j([-1,1]^n) = C(n,j) 2^j`.
pub fn unit_cube_vj(n: usize, j: usize) -> f64 {
    assert!(j <= n, "j = {j} exceeds n = {n}");
    (log_binomial(n, j) + j as f64 * 2f64.ln()).exp()
}

/// `V_j` of the box `Π [-h_i, h_i]`, which is `2^j σ_j(h)`.
pub fn cube_vj(j: usize, half_sides: &[f64]) -> Result<f64> {
    if j > half_sides.len() {
        return domain(format!("j = {j} exceeds dimension {}", half_sides.len()));
    }
    if let Some(h) = half_sides.iter().find(|h| !(**h > 0.0)) {
        return domain(format!("half-sides must be positive, got {h}"));
    }
    Ok(2f64.powi(j as i32) * elementary_symmetric(half_sides)[j])
}

fn oracle_cfg(cfg: &QuadConfig) -> QuadConfig {
    QuadConfig { rel_tol: cfg.rel_tol.min(1e-12), ..*cfg }
}

/// `V_j(B_1^n)`.
pub fn crosspolytope_vj(n: usize, j: usize, cfg: &QuadConfig) -> Result<f64> {
    if j > n {
        return domain(format!("j = {j} exceeds n = {n}"));
    }
    if j == n {
        return Ok((n as f64 * 2f64.ln() - lgamma(n as f64 + 1.0)).exp());
    }
    let k = (n - j - 1) as i32;
    let sj = ((j + 1) as f64).sqrt();
    let r = integrate(
        |t| normal_pdf(sj * t) * erf(t / std::f64::consts::SQRT_2).powi(k),
        0.0,
        12.0,
        &oracle_cfg(cfg),
    )?;
    let log_pref = (j + 1) as f64 * 2f64.ln() + log_binomial(n, j + 1) + ((j + 1) as f64).ln()
        - lgamma(j as f64 + 1.0);
    Ok(log_pref.exp() * r.value)
}

/// `V_j` of the weighted crosspolytope `{Σ a_i|x_i| ≤ 1}`, by enumeration of
/// `(j+1)`-subsets; intended for `n ≤ 16`.
pub fn weighted_crosspolytope_vj(weights: &[f64], j: usize, cfg: &QuadConfig) -> Result<f64> {
    let n = weights.len();
    if n > 16 {
        return domain("subset enumeration is limited to n <= 16");
    }
    if j > n {
        return domain(format!("j = {j} exceeds n = {n}"));
    }
    if j == n {
        let prod: f64 = weights.iter().product();
        return Ok((n as f64 * 2f64.ln() - lgamma(n as f64 + 1.0)).exp() / prod);
    }
    let cfg = oracle_cfg(cfg);
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != j + 1 {
            continue;
        }
        let inside = |i: usize| mask >> i & 1 == 1;
        let s: f64 = (0..n).filter(|&i| inside(i)).map(|i| weights[i] * weights[i]).sum();
        let prod: f64 = (0..n).filter(|&i| inside(i)).map(|i| weights[i]).product();
        let root = s.sqrt();
        let r = integrate(
            |x| {
                let mut v = normal_pdf(x * root);
                for i in (0..n).filter(|&i| !inside(i)) {
                    v *= erf(weights[i] * x / std::f64::consts::SQRT_2);
                }
                v
            },
            0.0,
            12.0 / root,
            &cfg,
        )?;
        total += s / prod * r.value;
    }
    Ok(2f64.powi(j as i32 + 1) / (lgamma(j as f64 + 1.0)).exp() * total)
}

/// Which of the two classical one-dimensional ellipsoid integrals to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EllipsoidForm {
    /// `σ_j` weights with `t^{j+1}`, valid for `0 ≤ j ≤ n-1`.
    A,
    /// `σ_{j-1}` weights with `t^{j-1}`, valid for `1 ≤ j ≤ n`.
    B,
}

/// `V_j` of the ellipsoid with semi-axes `b`.
pub fn ellipsoid_vj(semiaxes: &[f64], j: usize, cfg: &QuadConfig, form: EllipsoidForm) -> Result<f64> {
    let n = semiaxes.len();
    let valid = match form {
        EllipsoidForm::A => j < n,
        EllipsoidForm::B => (1..=n).contains(&j),
    };
    if !valid {
        return domain(format!("index j = {j} is outside the range of form {form:?} for n = {n}"));
    }
    if let Some(b) = semiaxes.iter().find(|b| !(**b > 0.0)) {
        return domain(format!("semi-axes must be positive, got {b}"));
    }
    let b2: Vec<f64> = semiaxes.iter().map(|b| b * b).collect();
    let (order, power) = match form {
        EllipsoidForm::A => (j, j as i32 + 1),
        EllipsoidForm::B => (j - 1, j as i32 - 1),
    };
    let cfg = oracle_cfg(cfg);
    let mut total = 0.0;
    for i in 0..n {
        let others: Vec<f64> = (0..n).filter(|&r| r != i).map(|r| b2[r]).collect();
        let sigma = elementary_symmetric(&others)[order];
        let bi2 = b2[i];
        let r = integrate(
            |s: f64| {
                if s >= 1.0 {
                    return 0.0;
                }
                let t = s / (1.0 - s);
                let t2 = t * t;
                let denom: f64 = (1.0 + bi2 * t2) * b2.iter().map(|b| (1.0 + b * t2).sqrt()).product::<f64>();
                t.powi(power) / denom / ((1.0 - s) * (1.0 - s))
            },
            0.0,
            1.0,
            &cfg,
        )?;
        total += bi2 * sigma * r.value;
    }
    Ok(kappa(j) * total)
}

/// `∫_{∂B} f dH^1` for a planar weighted ball and an integrand even in each
/// coordinate; `f` is evaluated at first-quadrant points only.
pub fn planar_boundary_integral<F: Fn(f64, f64) -> f64>(spec: &PBallSpec, f: F, cfg: &QuadConfig) -> Result<f64> {
    if spec.n() != 2 {
        return domain("planar boundary integrals need n = 2");
    }
    let p = spec.p();
    let (a1, a2) = (spec.weights()[0], spec.weights()[1]);
    let cfg = oracle_cfg(cfg);
    let half = 0.5f64.powf(1.0 / p);
    // graph over the second coordinate: x = g(y), 0 ≤ a2 y ≤ 2^{-1/p}
    let piece = |alpha: f64, beta: f64, swap: bool| -> Result<f64> {
        let r = integrate_with_breaks(
            |v: f64| {
                let r = (beta * v).powf(p);
                let w = (1.0 - r).powf(1.0 / p) / alpha;
                let dw = -(beta * v).powf(p - 1.0) * beta * (1.0 - r).powf(1.0 / p - 1.0) / alpha;
                let ds = (1.0 + dw * dw).sqrt();
                if swap { f(v, w) * ds } else { f(w, v) * ds }
            },
            &[0.0, 0.25 * half / beta, 0.5 * half / beta, half / beta],
            &cfg,
        )?;
        Ok(r.value)
    };
    Ok(4.0 * (piece(a1, a2, false)? + piece(a2, a1, true)?))
}

/// Perimeter of a planar weighted ball.
pub fn planar_perimeter(spec: &PBallSpec, cfg: &QuadConfig) -> Result<f64> {
    planar_boundary_integral(spec, |_, _| 1.0, cfg)
}

/// Solves `z + c z^{p-1} = b` for `z ∈ [0, b]`.
fn scalar_root(p: f64, b: f64, c: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    if c == 0.0 {
        return b;
    }
    if p >= 2.0 {
        let mut z = b.min((b / c).powf(1.0 / (p - 1.0)));
        for _ in 0..100 {
            let zp = z.powf(p - 2.0);
            let h = z + c * zp * z - b;
            let step = h / (1.0 + c * (p - 1.0) * zp);
            let next = (z - step).max(0.0);
            if (z - next).abs() <= 1e-16 * z {
                return next;
            }
            z = next;
        }
        z
    } else {
        let r = 1.0 / (p - 1.0);
        let mut w = b.powf(p - 1.0).min(b / c);
        for _ in 0..100 {
            let wr = w.powf(r - 1.0);
            let k = wr * w + c * w - b;
            let step = k / (r * wr + c);
            let next = (w - step).max(0.0);
            if (w - next).abs() <= 1e-16 * w {
                return next.powf(r);
            }
            w = next;
        }
        w.powf(r)
    }
}

/// Euclidean projection of `x` onto `B_p^n(a)`.
pub fn project_lp_ball(spec: &PBallSpec, x: &[f64]) -> Result<Vec<f64>> {
    let n = spec.n();
    if x.len() != n {
        return domain(format!("point has {} coordinates, expected {n}", x.len()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return domain("point has non-finite coordinates");
    }
    if spec.gauge(x) <= 1.0 {
        return Ok(x.to_vec());
    }
    let p = spec.p();
    let a = spec.weights();
    let b: Vec<f64> = x.iter().zip(a).map(|(xi, ai)| ai * xi.abs()).collect();
    let mut z = vec![0.0; n];
    // Returns Σ z^p - 1 and its derivative in μ.
    let eval = |mu: f64, z: &mut [f64]| -> (f64, f64) {
        let (mut g, mut dg) = (-1.0, 0.0);
        for i in 0..n {
            let c = mu * p * a[i] * a[i];
            let zi = scalar_root(p, b[i], c);
            z[i] = zi;
            g += zi.powf(p);
            if zi > 0.0 {
                let dz_dc = -zi / (zi.powf(2.0 - p) + c * (p - 1.0));
                dg += p * zi.powf(p - 1.0) * dz_dc * p * a[i] * a[i];
            }
        }
        (g, dg)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut iters = 0;
    while eval(hi, &mut z).0 > 0.0 {
        lo = hi;
        hi *= 2.0;
        iters += 1;
        if iters > 2000 {
            return Err(Error::ConvergenceFailure("could not bracket the KKT multiplier".into()));
        }
    }
    let mut mu = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..200 {
        let (g, dg) = eval(mu, &mut z);
        if g.abs() <= 1e-14 {
            converged = true;
            break;
        }
        if g > 0.0 {
            lo = mu;
        } else {
            hi = mu;
        }
        let newton = if dg < 0.0 { mu - g / dg } else { f64::NAN };
        mu = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-16 * hi {
            eval(mu, &mut z);
            converged = true;
            break;
        }
    }
    let y: Vec<f64> = (0..n).map(|i| x[i].signum() * z[i] / a[i]).collect();
    let residual = spec.gauge(&y) - 1.0;
    if !converged || residual.abs() > 1e-10 {
        return Err(Error::ConvergenceFailure(format!("projection residual {residual:.3e}")));
    }
    Ok(y)
}

/// Monte Carlo settings; the generator is ChaCha8 with one stream per batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub sample_count: u64,
    pub seed: u64,
    pub batch: u64,
}

impl McConfig {
    pub fn new(sample_count: u64, seed: u64) -> Self {
        McConfig { sample_count, seed, batch: 1 << 16 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count < 10_000 {
            return domain(format!("sample_count must be at least 1e4, got {}", self.sample_count));
        }
        if self.batch == 0 {
            return domain("batch size must be positive");
        }
        Ok(())
    }

    /// Generator for batch `index`: seeded by `seed`, stream `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_err: f64,
    pub samples: u64,
    pub hits: u64,
    pub seed: u64,
    pub generator: &'static str,
}

/// Hit-or-miss estimate of `Vol_n(B_p^n(a) + t B_2^n)` over the box
/// `Π [-1/a_i - t, 1/a_i + t]`.
pub fn steiner_mc_volume(spec: &PBallSpec, t: f64, mc: &McConfig) -> Result<McEstimate> {
    mc.validate()?;
    let n = spec.n();
    if !(2..=3).contains(&n) {
        return domain(format!("Monte Carlo Steiner volumes are limited to n in {{2, 3}}, got {n}"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return domain(format!("offset radius must be non-negative, got {t}"));
    }
    let p = spec.p();
    let inner: Vec<f64> = spec.weights().iter().map(|a| 1.0 / a).collect();
    let half: Vec<f64> = inner.iter().map(|h| h + t).collect();
    let box_volume: f64 = half.iter().map(|h| 2.0 * h).product();
    let r_in = inner.iter().copied().fold(f64::INFINITY, f64::min) * (n as f64).powf((0.5 - 1.0 / p).min(0.0));
    let t2 = t * t;
    let r2 = (r_in + t) * (r_in + t);
    let batches = mc.sample_count.div_ceil(mc.batch);
    let hits: Result<u64> = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut rng = mc.stream(bi);
            let count = mc.batch.min(mc.sample_count - bi * mc.batch);
            let mut hits = 0u64;
            let mut x = [0.0f64; 3];
            for _ in 0..count {
                for i in 0..n {
                    x[i] = (2.0 * rng.random::<f64>() - 1.0) * half[i];
                }
                let x = &x[..n];
                let box_d2: f64 = (0..n).map(|i| (x[i].abs() - inner[i]).max(0.0).powi(2)).sum();
                if box_d2 > t2 {
                    continue;
                }
                if spec.gauge(x) <= 1.0 || x.iter().map(|v| v * v).sum::<f64>() <= r2 {
                    hits += 1;
                    continue;
                }
                let y = project_lp_ball(spec, x)?;
                let d2: f64 = x.iter().zip(&y).map(|(u, v)| (u - v) * (u - v)).sum();
                if d2 <= t2 {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b));
    let hits = hits?;
    let frac = hits as f64 / mc.sample_count as f64;
    Ok(McEstimate {
        estimate: box_volume * frac,
        std_err: box_volume * (frac * (1.0 - frac) / mc.sample_count as f64).sqrt(),
        samples: mc.sample_count,
        hits,
        seed: mc.seed,
        generator: "ChaCha8",
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

    #[test]
    fn closed_forms() {
        assert_relative_eq!(ball_vj(3, 1), 4.0, max_relative = 1e-13);
        assert_relative_eq!(ball_vj(3, 3), 4.0 * PI / 3.0, max_relative = 1e-13);
        assert_relative_eq!(ball_vj(7, 0), 1.0, max_relative = 1e-13);
        assert_relative_eq!(unit_cube_vj(2, 1), 4.0, max_relative = 1e-13);
        assert_relative_eq!(unit_cube_vj(3, 2), 12.0, max_relative = 1e-13);
        assert_relative_eq!(cube_vj(1, &[1.0, 0.5]).unwrap(), 3.0, max_relative = 1e-14);
    }

    #[test]
    fn crosspolytope_values() {
        assert_relative_eq!(crosspolytope_vj(2, 1, &cfg()).unwrap(), 2.0 * 2f64.sqrt(), max_relative = 1e-11);
        assert_relative_eq!(crosspolytope_vj(4, 4, &cfg()).unwrap(), 16.0 / 24.0, max_relative = 1e-13);
        for n in [3usize, 4] {
            let s = 2.0 * crosspolytope_vj(n, n - 1, &cfg()).unwrap();
            let exact = 2f64.powi(n as i32) * (n as f64).sqrt() / lgamma(n as f64).exp();
            assert_relative_eq!(s, exact, max_relative = 1e-11);
        }
        for j in 0..=4 {
            assert_relative_eq!(
                weighted_crosspolytope_vj(&[1.0; 4], j, &cfg()).unwrap(),
                crosspolytope_vj(4, j, &cfg()).unwrap(),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn weighted_crosspolytope_planar() {
        // The rhombus with vertices (±1, 0), (0, ±1/2) has half-perimeter 2·sqrt(1 + 1/4).
        let v1 = weighted_crosspolytope_vj(&[1.0, 2.0], 1, &cfg()).unwrap();
        assert_relative_eq!(v1, 2.0 * 1.25f64.sqrt(), max_relative = 1e-11);
    }

    #[test]
    fn ellipsoid_forms() {
        for j in 1..3 {
            let a = ellipsoid_vj(&[1.0; 3], j, &cfg(), EllipsoidForm::A).unwrap();
            let b = ellipsoid_vj(&[1.0; 3], j, &cfg(), EllipsoidForm::B).unwrap();
            assert_relative_eq!(a, ball_vj(3, j), max_relative = 1e-11);
            assert_relative_eq!(b, ball_vj(3, j), max_relative = 1e-11);
        }
        let e = PBallSpec::new(2.0, vec![1.0, 2.0]).unwrap();
        let half_perimeter = 0.5 * planar_perimeter(&e, &cfg()).unwrap();
        assert_relative_eq!(half_perimeter, 2.422_112_055_4, max_relative = 1e-9);
        assert_relative_eq!(
            ellipsoid_vj(&[1.0, 0.5], 1, &cfg(), EllipsoidForm::A).unwrap(),
            half_perimeter,
            max_relative = 1e-10
        );
        assert!(ellipsoid_vj(&[1.0, 0.5], 2, &cfg(), EllipsoidForm::A).is_err());
        assert!(ellipsoid_vj(&[1.0, 0.5], 0, &cfg(), EllipsoidForm::B).is_err());
    }

    #[test]
    fn planar_perimeters() {
        let disk = PBallSpec::unit(2.0, 2).unwrap();
        assert_relative_eq!(planar_perimeter(&disk, &cfg()).unwrap(), 2.0 * PI, max_relative = 1e-11);
        // 30-digit tanh-sinh quadrature of the angle parametrization
        let reference = [
            (3.0, [1.0, 1.0], 6.744_993_140_126_340),
            (1.3, [1.0, 0.4], 10.905_451_245_800_438),
            (6.0, [2.0, 0.5], 9.390_704_654_262_804),
        ];
        for (p, a, value) in reference {
            let spec = PBallSpec::new(p, a.to_vec()).unwrap();
            assert_relative_eq!(planar_perimeter(&spec, &cfg()).unwrap(), value, max_relative = 1e-10);
        }
    }

    #[test]
    fn projection_examples() {
        let b = PBallSpec::unit(2.0, 3).unwrap();
        let inside = [0.1, -0.2, 0.3];
        assert_eq!(project_lp_ball(&b, &inside).unwrap(), inside.to_vec());
        let y = project_lp_ball(&b, &[3.0, -4.0, 0.0]).unwrap();
        assert_relative_eq!(y[0], 0.6, max_relative = 1e-10);
        assert_relative_eq!(y[1], -0.8, max_relative = 1e-10);
        let b4 = PBallSpec::unit(4.0, 2).unwrap();
        let y = project_lp_ball(&b4, &[2.0, 0.0]).unwrap();
        assert_relative_eq!(y[0], 1.0, max_relative = 1e-12);
        assert_eq!(y[1], 0.0);
    }

    #[test]
    fn projection_is_optimal() {
        // The residual x - y must be a non-negative multiple of the outer normal at y.
        for &p in &[1.2, 1.5, 3.0, 7.0] {
            let b = PBallSpec::new(p, vec![1.0, 2.5, 0.7]).unwrap();
            let x = [1.3, -0.9, 2.2];
            let y = project_lp_ball(&b, &x).unwrap();
            assert!((b.gauge(&y) - 1.0).abs() <= 1e-10);
            let grad: Vec<f64> =
                (0..3).map(|i| b.weights()[i].powf(p) * y[i].abs().powf(p - 1.0) * y[i].signum()).collect();
            let ratios: Vec<f64> = (0..3).map(|i| (x[i] - y[i]) / grad[i]).collect();
            assert!(ratios.iter().all(|r| *r > 0.0));
            assert_relative_eq!(ratios[0], ratios[1], max_relative = 1e-7);
            assert_relative_eq!(ratios[0], ratios[2], max_relative = 1e-7);
        }
    }

    #[test]
    fn disk_offset_monte_carlo() {
        let disk = PBallSpec::unit(2.0, 2).unwrap();
        let mc = McConfig::new(200_000, 7);
        let r = steiner_mc_volume(&disk, 1.0, &mc).unwrap();
        assert!((r.estimate - 4.0 * PI).abs() <= 3.0 * r.std_err);
        let again = steiner_mc_volume(&disk, 1.0, &mc).unwrap();
        assert_eq!(r, again);
        assert!(steiner_mc_volume(&disk, 1.0, &McConfig::new(100, 7)).is_err());
    }

    #[test]
    fn steiner_monte_carlo_below_two() {
        let b = PBallSpec::unit(1.5, 2).unwrap();
        let t = 0.1;
        let area = 4.0 * (2.0 * lgamma(1.0 + 1.0 / 1.5) - lgamma(1.0 + 2.0 / 1.5)).exp();
        let expected = area + planar_perimeter(&b, &cfg()).unwrap() * t + PI * t * t;
        let r = steiner_mc_volume(&b, t, &McConfig::new(400_000, 11)).unwrap();
        assert!((r.estimate - expected).abs() <= 4.0 * r.std_err, "{} vs {expected}", r.estimate);
    }
}
