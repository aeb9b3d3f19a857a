//! Differential geometry of `∂B_p^n(a)`: principal curvatures, their
//! elementary symmetric functions, curvature-measure densities, the support
//! function and the Gauss map.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exactvol::PBallSpec;
use crate::specfun::kappa;
use crate::symmetric::marked_coefficient;

/// A point on the boundary of a weighted ℓp-ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    spec: PBallSpec,
    coords: Vec<f64>,
}

impl BoundaryPoint {
    /// Accepts `x` if `Σ|a_i x_i|^p = 1` within `1e-12`.
    pub fn new(spec: &PBallSpec, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != spec.n() {
            return domain(format!("point has {} coordinates, ball has dimension {}", coords.len(), spec.n()));
        }
        let g = spec.gauge(&coords);
        if !((g - 1.0).abs() <= 1e-12) {
            return domain(format!("point is not on the boundary: gauge = {g}"));
        }
        Ok(BoundaryPoint { spec: spec.clone(), coords })
    }

    /// Radial projection `x / F(x)^{1/p}` of a nonzero vector onto the boundary.
    pub fn from_direction(spec: &PBallSpec, v: &[f64]) -> Result<Self> {
        if v.len() != spec.n() {
            return domain(format!("direction has {} coordinates, ball has dimension {}", v.len(), spec.n()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return domain("direction must be finite");
        }
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return domain("direction must be nonzero");
        }
        let unit: Vec<f64> = v.iter().map(|x| x / scale).collect();
        let r = spec.gauge(&unit).powf(1.0 / spec.p());
        Ok(BoundaryPoint { spec: spec.clone(), coords: unit.iter().map(|x| x / r).collect() })
    }

    pub fn spec(&self) -> &PBallSpec {
        &self.spec
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// `w_i = a_i^{2p}|x_i|^{2p-2}`, `b_i = a_i^p|x_i|^{p-2}` and `S = (Σ w_i)^{1/2}`.
struct LocalData {
    w: Vec<f64>,
    b: Vec<f64>,
    s: f64,
}

fn local_data(pt: &BoundaryPoint) -> Result<LocalData> {
    let p = pt.spec.p();
    if p < 2.0 {
        if let Some(k) = pt.coords.iter().position(|&x| x == 0.0) {
            return Err(Error::DegenerateInput(format!("coordinate {k} vanishes and the boundary is not C2 there")));
        }
    }
    let (mut w, mut b) = (Vec::with_capacity(pt.coords.len()), Vec::with_capacity(pt.coords.len()));
    for (&x, &a) in pt.coords.iter().zip(pt.spec.weights()) {
        let ax = (a * x).abs();
        let bi = if p == 2.0 { a * a } else { a.powf(p) * x.abs().powf(p - 2.0) };
        w.push(ax.powf(2.0 * p - 2.0) * a * a);
        b.push(bi);
    }
    let s = w.iter().sum::<f64>().sqrt();
    Ok(LocalData { w, b, s })
}

/// Principal curvatures in ascending order.
///
/// With `d_i = (p-1) b_i` the characteristic equation becomes the secular
/// equation `Σ w_i / (d_i - Sλ) = 0`; its roots interlace the distinct `d_i`.
pub fn principal_curvatures(pt: &BoundaryPoint) -> Result<Vec<f64>> {
    let p = pt.spec.p();
    let LocalData { w, b, s } = local_data(pt)?;
    let mut pairs: Vec<(f64, f64)> = b.iter().map(|bi| (p - 1.0) * bi).zip(w.iter().copied()).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    // groups of equal d with summed weight and multiplicity
    let mut groups: Vec<(f64, f64, usize)> = Vec::new();
    for (d, wi) in pairs {
        match groups.last_mut() {
            Some(g) if g.0 == d => {
                g.1 += wi;
                g.2 += 1;
            }
            _ => groups.push((d, wi, 1)),
        }
    }
    let mut mu = Vec::with_capacity(pt.coords.len() - 1);
    for g in &groups {
        let extra = if g.1 == 0.0 { g.2 } else { g.2 - 1 };
        mu.extend(std::iter::repeat_n(g.0, extra));
    }
    let active: Vec<(f64, f64)> = groups.iter().filter(|g| g.1 > 0.0).map(|g| (g.0, g.1)).collect();
    for k in 0..active.len().saturating_sub(1) {
        let (c0, width) = (active[k].0, active[k + 1].0 - active[k].0);
        // secular function in the offset δ = μ - c0, increasing on (0, width)
        let f = |delta: f64| -> f64 { active.iter().map(|&(c, wc)| wc / ((c - c0) - delta)).sum() };
        let (mut lo, mut hi) = (0.0, width);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        mu.push(c0 + 0.5 * (lo + hi));
    }
    let mut lambdas: Vec<f64> = mu.into_iter().map(|m| m / s).collect();
    lambdas.sort_by(f64::total_cmp);
    Ok(lambdas)
}

/// `σ_{m-1}` of the principal curvatures from the closed formula.
pub fn sigma_curvatures(pt: &BoundaryPoint, m: usize) -> Result<f64> {
    let n = pt.coords.len();
    if !(1..=n).contains(&m) {
        return domain(format!("m must lie in [1, {n}], got {m}"));
    }
    let p = pt.spec.p();
    let LocalData { w, b, s } = local_data(pt)?;
    let ones = vec![1.0; n];
    let sum = marked_coefficient(&ones, &b, &w, m - 1);
    Ok((p - 1.0).powi(m as i32 - 1) * sum / s.powi(m as i32 + 1))
}

/// Product of the principal curvatures.
pub fn gauss_curvature(pt: &BoundaryPoint) -> Result<f64> {
    let n = pt.coords.len();
    let p = pt.spec.p();
    let LocalData { b, s, .. } = local_data(pt)?;
    let log_prod: f64 = b.iter().map(|x| x.ln()).sum();
    Ok(((n as f64 - 1.0) * (p - 1.0).ln() + log_prod - (n as f64 + 1.0) * s.ln()).exp())
}

/// Density of `Φ_{n-m}` with respect to `H^{n-1}` on the boundary.
pub fn curvature_density(pt: &BoundaryPoint, m: usize) -> Result<f64> {
    Ok(sigma_curvatures(pt, m)? / (m as f64 * kappa(m)))
}

fn check_direction(spec: &PBallSpec, u: &[f64]) -> Result<()> {
    if u.len() != spec.n() {
        return domain(format!("direction has {} coordinates, ball has dimension {}", u.len(), spec.n()));
    }
    if u.iter().all(|&x| x == 0.0) || u.iter().any(|x| !x.is_finite()) {
        return domain("direction must be finite and nonzero");
    }
    Ok(())
}

/// `h(u) = (Σ |u_i/a_i|^q)^{1/q}` with `q = p/(p-1)`.
pub fn support_function(spec: &PBallSpec, u: &[f64]) -> Result<f64> {
    check_direction(spec, u)?;
    let q = spec.exponent().conjugate();
    let scale = u.iter().zip(spec.weights()).fold(0.0f64, |m, (x, a)| m.max((x / a).abs()));
    let sum: f64 = u.iter().zip(spec.weights()).map(|(x, a)| (x / a / scale).abs().powf(q)).sum();
    Ok(scale * sum.powf(1.0 / q))
}

/// Outer unit normal at a boundary point.
pub fn gauss_map(pt: &BoundaryPoint) -> Result<Vec<f64>> {
    let p = pt.spec.p();
    let g: Vec<f64> = pt
        .coords
        .iter()
        .zip(pt.spec.weights())
        .map(|(&x, &a)| a.powf(p) * x.abs().powf(p - 1.0) * x.signum() * (x != 0.0) as u8 as f64)
        .collect();
    let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(g.into_iter().map(|v| v / norm).collect())
}

/// The boundary point whose outer unit normal is `u`.
pub fn inverse_gauss_map(spec: &PBallSpec, u: &[f64]) -> Result<BoundaryPoint> {
    check_direction(spec, u)?;
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return domain(format!("normal must be a unit vector, got norm {norm}"));
    }
    let q = spec.exponent().conjugate();
    let h = support_function(spec, u)?;
    let coords: Vec<f64> = u
        .iter()
        .zip(spec.weights())
        .map(|(&x, &a)| a.powf(-q) * x.abs().powf(q - 1.0) * x.signum() * (x != 0.0) as u8 as f64 / h.powf(q - 1.0))
        .collect();
    BoundaryPoint::new(spec, coords)
}
