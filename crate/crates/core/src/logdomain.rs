//! Log-domain arithmetic for quantities like `(N!)^{4s}` and `λ^N` that
//! leave the range of `f64` long before the interesting regime.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// A real number stored as `sign · exp(ln_abs)`.
///
/// Zero is represented by `sign == 0` and `ln_abs == -inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    pub fn from_parts(sign: i8, ln_abs: f64) -> Self {
        if sign == 0 || ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog {
                sign: sign.signum(),
                ln_abs,
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    /// Back to linear scale; may overflow to `±inf`.
    pub fn to_f64(&self) -> f64 {
        f64::from(self.sign) * self.ln_abs.exp()
    }

    pub fn scale_ln(&self, ln_factor: f64) -> Self {
        Self::from_parts(self.sign, self.ln_abs + ln_factor)
    }

    /// Sums signed log-domain terms; positives and negatives are accumulated
    /// separately (in slice order) and only cancelled at the end.
    pub fn sum(terms: &[SignedLog]) -> SignedLog {
        let pos = log_sum_exp(terms.iter().filter(|t| t.sign > 0).map(|t| t.ln_abs));
        let neg = log_sum_exp(terms.iter().filter(|t| t.sign < 0).map(|t| t.ln_abs));
        match (pos.is_finite(), neg.is_finite()) {
            (false, false) => Self::ZERO,
            (true, false) => Self::from_parts(1, pos),
            (false, true) => Self::from_parts(-1, neg),
            (true, true) => {
                let (hi, lo, sign) = if pos >= neg { (pos, neg, 1) } else { (neg, pos, -1) };
                let rest = -(lo - hi).exp_m1();
                if rest <= 0.0 {
                    Self::ZERO
                } else {
                    Self::from_parts(sign, hi + rest.ln())
                }
            }
        }
    }
}

/// `ln Σ exp(v)`, returning `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let acc: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + acc.ln()
}
