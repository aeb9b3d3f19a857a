//! Elementary symmetric polynomials and marked generating-polynomial coefficients.

use crate::logvalue::log_add_exp;
use crate::specfun::log_binomial;

/// `σ_0, …, σ_n` of `values` by the standard one-pass recurrence.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (k, &x) in values.iter().enumerate() {
        for d in (1..=k + 1).rev() {
            e[d] += x * e[d - 1];
        }
    }
    e
}

/// `Σ_i w_i · [z^degree] Π_{r≠i} (v_r + z·u_r)`, i.e. the coefficient of
/// `y·z^degree` in `Π_r (v_r + z·u_r + y·w_r)`.
pub fn marked_coefficient(v: &[f64], u: &[f64], w: &[f64], degree: usize) -> f64 {
    assert!(v.len() == u.len() && u.len() == w.len());
    let mut a0 = vec![0.0; degree + 1];
    let mut a1 = vec![0.0; degree + 1];
    a0[0] = 1.0;
    for r in 0..v.len() {
        for d in (0..=degree).rev() {
            let lower0 = if d > 0 { a0[d - 1] } else { 0.0 };
            let lower1 = if d > 0 { a1[d - 1] } else { 0.0 };
            a1[d] = a1[d] * v[r] + lower1 * u[r] + a0[d] * w[r];
            a0[d] = a0[d] * v[r] + lower0 * u[r];
        }
    }
    a1[degree]
}

/// A block of `mult` identical factors `(v + z·u + y·w)`, stored as logarithms.
/// A logarithm of `-inf` marks a vanishing entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogFactor {
    pub ln_v: f64,
    pub ln_u: f64,
    pub ln_w: f64,
    pub mult: usize,
}

fn scaled(k: usize, ln: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * ln
    }
}

/// Natural log of the coefficient of `y·z^degree` in `Π (v + z·u + y·w)^mult`.
pub(crate) fn log_marked_coefficient(factors: &[LogFactor], degree: usize) -> f64 {
    let ninf = f64::NEG_INFINITY;
    let mut a0 = vec![ninf; degree + 1];
    let mut a1 = vec![ninf; degree + 1];
    a0[0] = 0.0;
    let mut g0 = vec![ninf; degree + 1];
    let mut g1 = vec![ninf; degree + 1];
    for f in factors {
        let n = f.mult;
        for d in 0..=degree {
            g0[d] = if d <= n {
                log_binomial(n, d) + scaled(d, f.ln_u) + scaled(n - d, f.ln_v)
            } else {
                ninf
            };
            g1[d] = if n >= 1 && d < n {
                (n as f64).ln() + log_binomial(n - 1, d) + f.ln_w + scaled(d, f.ln_u) + scaled(n - 1 - d, f.ln_v)
            } else {
                ninf
            };
        }
        let mut b0 = vec![ninf; degree + 1];
        let mut b1 = vec![ninf; degree + 1];
        for d in 0..=degree {
            for e in 0..=d {
                b0[d] = log_add_exp(b0[d], a0[e] + g0[d - e]);
                b1[d] = log_add_exp(b1[d], a0[e] + g1[d - e]);
                b1[d] = log_add_exp(b1[d], a1[e] + g0[d - e]);
            }
        }
        a0 = b0;
        a1 = b1;
    }
    a1[degree]
}
