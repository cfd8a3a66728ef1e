//! L²-normalized Hermite functions `h_k(x) = π^{-1/4} (2^k k!)^{-1/2} H_k(x) e^{-x²/2}`.
//!
//! Values come from the three-term recurrence
//! `h_{k+1} = x √(2/(k+1)) h_k − √(k/(k+1)) h_{k−1}`, carried with a running
//! log-scale so that neither the Gaussian factor nor the polynomial growth
//! leaves the `f64` range for `|x| ≤ 50`.

use std::f64::consts::PI;

use crate::error::{Result, TwcError};

/// Beyond this the Gaussian factor underflows for every supported order.
pub const MAX_ABS_X: f64 = 50.0;

const RESCALE_AT: f64 = 1e150;

/// `h_k(x)` for a single order.
pub fn hermite_eval(k: i64, x: f64) -> Result<f64> {
    if k < 0 {
        return Err(TwcError::InvalidArgument(format!("negative Hermite order {k}")));
    }
    if !x.is_finite() {
        return Err(TwcError::InvalidArgument(format!("evaluation point {x}")));
    }
    Ok(*hermite_all(k as usize, x).last().unwrap())
}

/// `[h_0(x), …, h_n(x)]`.
pub fn hermite_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x.abs() > MAX_ABS_X {
        return out;
    }
    let mut ln_scale = -0.5 * x * x - 0.25 * PI.ln();
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    out[0] = ln_scale.exp();
    for k in 0..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            prev /= RESCALE_AT;
            cur /= RESCALE_AT;
            ln_scale += RESCALE_AT.ln();
        }
        out[k + 1] = if ln_scale > -700.0 {
            cur * ln_scale.exp()
        } else if cur == 0.0 {
            0.0
        } else {
            cur.signum() * (cur.abs().ln() + ln_scale).exp()
        };
    }
    out
}

/// Scaled pair `(h_n, h_{n−1})` sharing a common factor `exp(ln_scale)`.
/// Ratios are exact even where the true values underflow.
pub(crate) fn hermite_pair_scaled(n: usize, x: f64) -> (f64, f64, f64) {
    debug_assert!(n >= 1);
    let mut ln_scale = -0.5 * x * x - 0.25 * PI.ln();
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    for k in 0..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > RESCALE_AT || (m < 1.0 / RESCALE_AT && m > 0.0) {
            prev /= m;
            cur /= m;
            ln_scale += m.ln();
        }
    }
    (cur, prev, ln_scale)
}

/// Tensor-product Hermite function `h_α(x) = Π_j h_{α_j}(x_j)` given per-axis
/// tables `tables[j][k] = h_k(x_j)`.
pub(crate) fn tensor_value(tables: &[Vec<f64>], alpha: &[usize]) -> f64 {
    tables.iter().zip(alpha).map(|(t, &a)| t[a]).product()
}
