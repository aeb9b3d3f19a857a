//! Sign plus log-magnitude scalars.
//!
//! Intrinsic volumes of high-dimensional bodies are products of factors raised
//! to powers proportional to the dimension; `LogValue` carries them without
//! overflow or underflow. Multiplication, division and powers act exactly on
//! the `(sign, log_abs)` pair, addition goes through max-subtraction.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// `ln(e^a + e^b)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(sum exp(x_i))`; returns `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || !max.is_finite() {
        return max;
    }
    let sum: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + sum.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    sign: i8,
    log_abs: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { sign: 0, log_abs: f64::NEG_INFINITY };
    pub const ONE: LogValue = LogValue { sign: 1, log_abs: 0.0 };

    /// Positive value `exp(log_abs)`. A `-inf` logarithm yields zero.
    pub fn from_log(log_abs: f64) -> Self {
        if log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogValue { sign: 1, log_abs }
        }
    }

    pub fn from_parts(sign: i8, log_abs: f64) -> Self {
        if sign == 0 || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogValue { sign: sign.signum(), log_abs }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        match x.partial_cmp(&0.0) {
            Some(Ordering::Greater) => LogValue { sign: 1, log_abs: x.ln() },
            Some(Ordering::Less) => LogValue { sign: -1, log_abs: (-x).ln() },
            _ => Self::ZERO,
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log_abs(&self) -> f64 {
        self.log_abs
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_finite(&self) -> bool {
        self.sign == 0 || self.log_abs.is_finite()
    }

    /// Natural logarithm of a positive value, `None` otherwise.
    pub fn ln(&self) -> Option<f64> {
        (self.sign > 0).then_some(self.log_abs)
    }

    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * self.log_abs.exp()
    }

    pub fn abs(&self) -> Self {
        LogValue { sign: self.sign.abs(), log_abs: self.log_abs }
    }

    /// Real power of a non-negative value.
    pub fn powf(&self, e: f64) -> Self {
        assert!(self.sign >= 0, "real power of a negative LogValue");
        if self.sign == 0 {
            return if e == 0.0 { Self::ONE } else { Self::ZERO };
        }
        Self::from_log(self.log_abs * e)
    }

    pub fn powi(&self, e: i32) -> Self {
        if self.sign == 0 {
            return if e == 0 { Self::ONE } else { Self::ZERO };
        }
        let sign = if e % 2 == 0 { 1 } else { self.sign };
        LogValue { sign, log_abs: self.log_abs * f64::from(e) }
    }

    pub fn recip(&self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero LogValue");
        LogValue { sign: self.sign, log_abs: -self.log_abs }
    }

    /// `self / other - 1` evaluated without forming either value.
    pub fn relative_difference(&self, other: &LogValue) -> f64 {
        assert!(self.sign == other.sign && self.sign != 0);
        (self.log_abs - other.log_abs).exp_m1()
    }
}

impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        LogValue { sign: self.sign * rhs.sign, log_abs: self.log_abs + rhs.log_abs }
    }
}

impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        self * rhs.recip()
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue { sign: -self.sign, log_abs: self.log_abs }
    }
}

impl Add for LogValue {
    type Output = LogValue;
    fn add(self, rhs: LogValue) -> LogValue {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_abs >= rhs.log_abs { (self, rhs) } else { (rhs, self) };
        let d = small.log_abs - big.log_abs;
        if big.sign == small.sign {
            LogValue { sign: big.sign, log_abs: big.log_abs + d.exp().ln_1p() }
        } else if d == 0.0 {
            Self::ZERO
        } else {
            LogValue { sign: big.sign, log_abs: big.log_abs + (-d.exp()).ln_1p() }
        }
    }
}

impl Sub for LogValue {
    type Output = LogValue;
    fn sub(self, rhs: LogValue) -> LogValue {
        self + (-rhs)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.log_abs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_sentinel() {
        let z = LogValue::from_f64(0.0);
        assert_eq!(z.sign(), 0);
        assert_eq!(z.log_abs(), f64::NEG_INFINITY);
        assert_eq!(LogValue::from_log(f64::NEG_INFINITY), LogValue::ZERO);
        assert_eq!((z * LogValue::from_f64(3.0)).sign(), 0);
    }

    #[test]
    fn cancellation_yields_zero() {
        let a = LogValue::from_f64(2.5);
        assert!((a - a).is_zero());
    }

    #[test]
    fn huge_products_stay_finite() {
        let x = LogValue::from_f64(1e300);
        let y = x.powi(10) * x.powi(-9);
        assert!((y.to_f64() / 1e300 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_handles_empty_and_neg_inf() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 0.0]), 0.0);
        assert!((log_add_exp(1000.0, 1000.0) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn arithmetic_matches_f64(a in -1e6f64..1e6, b in -1e6f64..1e6) {
            let (la, lb) = (LogValue::from_f64(a), LogValue::from_f64(b));
            let tol = 1e-9 * (a.abs() + b.abs()).max(1.0);
            prop_assert!(((la + lb).to_f64() - (a + b)).abs() <= tol);
            prop_assert!(((la - lb).to_f64() - (a - b)).abs() <= tol);
            let prod = a * b;
            prop_assert!(((la * lb).to_f64() - prod).abs() <= 1e-12 * prod.abs().max(1e-300));
            if b != 0.0 {
                let q = a / b;
                prop_assert!(((la / lb).to_f64() - q).abs() <= 1e-12 * q.abs().max(1e-300));
            }
        }
    }
}
