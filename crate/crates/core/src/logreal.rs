//! Signed log-domain reals.
//!
//! The union-bound and tail sums evaluated here involve factors like
//! e^{-c·n^{2r-6}} at n in the thousands, far below f64's underflow
//! threshold, multiplied by counts like binom(n,r)^i far above its overflow
//! threshold. A value is stored as a sign and the natural log of its
//! magnitude; sums use log-sum-exp.

use serde::Serialize;
use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogReal {
    /// −1, 0 or 1.
    pub sign: i8,
    /// ln |x|; meaningless when sign = 0 (kept at 0.0).
    pub ln_abs: f64,
}

impl LogReal {
    pub fn zero() -> Self {
        LogReal { sign: 0, ln_abs: 0.0 }
    }

    pub fn one() -> Self {
        LogReal { sign: 1, ln_abs: 0.0 }
    }

    /// Positive value given by its natural log.
    pub fn from_ln(ln: f64) -> Self {
        if ln == f64::NEG_INFINITY {
            return Self::zero();
        }
        LogReal { sign: 1, ln_abs: ln }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::zero()
        } else if x > 0.0 {
            LogReal { sign: 1, ln_abs: x.ln() }
        } else {
            LogReal { sign: -1, ln_abs: (-x).ln() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// ln of the value; None when negative.
    pub fn ln(&self) -> Option<f64> {
        match self.sign {
            1 => Some(self.ln_abs),
            0 => Some(f64::NEG_INFINITY),
            _ => None,
        }
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln_abs / std::f64::consts::LN_10
    }

    /// Converts to f64, saturating to 0 / ±∞ outside the representable range.
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        self.sign as f64 * self.ln_abs.exp()
    }

    pub fn neg(&self) -> Self {
        LogReal {
            sign: -self.sign,
            ln_abs: self.ln_abs,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.sign == 0 || other.sign == 0 {
            return Self::zero();
        }
        LogReal {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.sign == 0 {
            return *other;
        }
        if other.sign == 0 {
            return *self;
        }
        let (hi, lo) = if self.ln_abs >= other.ln_abs {
            (self, other)
        } else {
            (other, self)
        };
        let d = lo.ln_abs - hi.ln_abs; // <= 0
        if hi.sign == lo.sign {
            LogReal {
                sign: hi.sign,
                ln_abs: hi.ln_abs + d.exp().ln_1p(),
            }
        } else {
            let diff = -d.exp_m1(); // 1 - e^d in [0, 1)
            if diff == 0.0 {
                Self::zero()
            } else {
                LogReal {
                    sign: hi.sign,
                    ln_abs: hi.ln_abs + diff.ln(),
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn sum<I: IntoIterator<Item = LogReal>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |acc, x| acc.add(&x))
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => {}
            ord => return ord,
        }
        match self.sign {
            0 => Ordering::Equal,
            1 => self.ln_abs.partial_cmp(&other.ln_abs).unwrap_or(Ordering::Equal),
            _ => other.ln_abs.partial_cmp(&self.ln_abs).unwrap_or(Ordering::Equal),
        }
    }

    /// value < e^t (for positive thresholds given in log form).
    pub fn below_ln(&self, t: f64) -> bool {
        match self.sign {
            1 => self.ln_abs < t,
            _ => true,
        }
    }
}

impl std::fmt::Display for LogReal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => {
                let log10 = self.log10_abs();
                let exp10 = log10.floor();
                let mant = 10f64.powf(log10 - exp10);
                let sgn = if s < 0 { "-" } else { "" };
                write!(f, "{sgn}{mant:.6}e{exp10:+}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn roundtrip_and_ops_match_f64() {
        let xs = [3.5, 0.0, -2.25, 1e-10, -1e12, 7.0];
        for &a in &xs {
            for &b in &xs {
                let la = LogReal::from_f64(a);
                let lb = LogReal::from_f64(b);
                assert!(close(la.add(&lb).to_f64(), a + b, 1e-12), "{a}+{b}");
                assert!(close(la.mul(&lb).to_f64(), a * b, 1e-12), "{a}*{b}");
                assert!(close(la.sub(&lb).to_f64(), a - b, 1e-12), "{a}-{b}");
            }
        }
    }

    #[test]
    fn extreme_magnitudes_survive() {
        let tiny = LogReal::from_ln(-1.0e6);
        let huge = LogReal::from_ln(1.0e6);
        assert!(close(tiny.mul(&huge).to_f64(), 1.0, 1e-12));
        let sum = LogReal::sum((0..1000).map(|_| tiny));
        assert_eq!(sum.sign, 1);
        assert!(close(sum.ln().unwrap(), -1.0e6 + 1000f64.ln(), 1e-12));
    }

    #[test]
    fn cancellation_to_zero() {
        let a = LogReal::from_f64(5.0);
        let b = LogReal::from_f64(-5.0);
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn ordering() {
        let a = LogReal::from_f64(2.0);
        let b = LogReal::from_f64(3.0);
        let c = LogReal::from_f64(-1.0);
        let z = LogReal::zero();
        assert_eq!(a.cmp_value(&b), Ordering::Less);
        assert_eq!(b.cmp_value(&a), Ordering::Greater);
        assert_eq!(c.cmp_value(&z), Ordering::Less);
        assert_eq!(z.cmp_value(&a), Ordering::Less);
        assert_eq!(c.cmp_value(&c), Ordering::Equal);
    }

    #[test]
    fn below_threshold() {
        let x = LogReal::from_ln(-10.0);
        assert!(x.below_ln(-9.0));
        assert!(!x.below_ln(-11.0));
        assert!(LogReal::zero().below_ln(-1000.0));
    }
}
