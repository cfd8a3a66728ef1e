//! The symplectic oscillators
//!
//! * `H_σ = |X|² − ¼Δ_X − i⟨ξ, ∂_x⟩ + i⟨x, ∂_ξ⟩` (i.e. `+⟨ξ,D_x⟩ − ⟨x,D_ξ⟩`
//!   with `D = −i∂`), eigenvalues `2|α₁| + d`;
//! * `H̄_σ`, the same with the rotation term reversed, eigenvalues `2|α₂| + d`;
//! * `T_σ = H_σ H̄_σ`;
//!
//! and the ladder operators that shift the labels of `ϱ_{α₁,α₂}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwcError};
use crate::expansion::HermiteCoeffVector;
use crate::grid::{GridFunction, GridOptions};
use crate::index::IndexSpace;
use crate::phase_space::require_phase_space_d1;
use crate::twisted::kernel_map_a_coeff;
use crate::wong::WongCoeffMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Above this power `T_σ^N` is formed through logarithms.
const LINEAR_POWER_LIMIT: u32 = 20;

fn scale_entries<F: Fn(usize, usize) -> f64>(c: &WongCoeffMatrix, factor: F) -> WongCoeffMatrix {
    let mut out = c.clone();
    let m = out.matrix_mut();
    for r in 0..m.nrows() {
        for k in 0..m.ncols() {
            m[(r, k)] *= factor(r, k);
        }
    }
    out
}

/// `H_σ a`: `c_{α₁,α₂} ↦ (2|α₁| + d) c_{α₁,α₂}`.
pub fn apply_h_sigma_coeff(c: &WongCoeffMatrix) -> WongCoeffMatrix {
    let space = c.space();
    scale_entries(c, |r, _| space.oscillator_eigenvalue(r))
}

/// `H̄_σ a`: `c_{α₁,α₂} ↦ (2|α₂| + d) c_{α₁,α₂}`.
pub fn apply_h_bar_sigma_coeff(c: &WongCoeffMatrix) -> WongCoeffMatrix {
    let space = c.space();
    scale_entries(c, |_, k| space.oscillator_eigenvalue(k))
}

fn t_sigma_ln_factor(space: &IndexSpace, r: usize, k: usize, n: u32) -> f64 {
    n as f64 * (space.oscillator_eigenvalue(r) * space.oscillator_eigenvalue(k)).ln()
}

/// `T_σ^N a`: `c_{α₁,α₂} ↦ ((2|α₁| + d)(2|α₂| + d))^N c_{α₁,α₂}`.
///
/// Fails with a range error if an entry leaves the `f64` range; use
/// [`t_sigma_log_magnitudes`] for large powers.
pub fn apply_t_sigma_coeff(c: &WongCoeffMatrix, n: u32) -> Result<WongCoeffMatrix> {
    let space = c.space();
    let mut out = c.clone();
    let m = out.matrix_mut();
    for r in 0..m.nrows() {
        for k in 0..m.ncols() {
            let v = m[(r, k)];
            if v == ZERO || n == 0 {
                continue;
            }
            let scaled = if n <= LINEAR_POWER_LIMIT {
                v * (space.oscillator_eigenvalue(r) * space.oscillator_eigenvalue(k)).powi(n as i32)
            } else {
                let ln = t_sigma_ln_factor(&space, r, k, n);
                Complex64::from_polar((v.norm().ln() + ln).exp(), v.arg())
            };
            if !scaled.re.is_finite() || !scaled.im.is_finite() {
                return Err(TwcError::Range(format!(
                    "T_sigma^{n} overflows at entry ({r},{k}); use the log-magnitude accessor"
                )));
            }
            m[(r, k)] = scaled;
        }
    }
    Ok(out)
}

/// `ln |(T_σ^N a)_{α₁,α₂}|` in row-major order (`−∞` for zero entries). The
/// phases are those of `c` since the eigenvalues are positive.
pub fn t_sigma_log_magnitudes(c: &WongCoeffMatrix, n: u32) -> Vec<f64> {
    let space = c.space();
    let m = c.matrix();
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for k in 0..m.ncols() {
            let v = m[(r, k)];
            out.push(if v == ZERO {
                f64::NEG_INFINITY
            } else {
                v.norm().ln() + t_sigma_ln_factor(&space, r, k, n)
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LadderFamily {
    /// Lowers `α₂`: `ϱ_{α₁,α₂} ↦ √(2α₂ⱼ) ϱ_{α₁,α₂−e_j}`.
    Z1,
    /// Raises `α₂`: `ϱ_{α₁,α₂} ↦ −√(2α₂ⱼ+2) ϱ_{α₁,α₂+e_j}`.
    Z1Tilde,
    /// Lowers `α₁`: `ϱ_{α₁,α₂} ↦ −√(2α₁ⱼ) ϱ_{α₁−e_j,α₂}`.
    Z2,
    /// Raises `α₁`: `ϱ_{α₁,α₂} ↦ √(2α₁ⱼ+2) ϱ_{α₁+e_j,α₂}`.
    Z2Tilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LadderKind {
    pub family: LadderFamily,
    pub axis: usize,
}

impl LadderKind {
    pub fn new(family: LadderFamily, axis: usize) -> Self {
        LadderKind { family, axis }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LadderResult {
    pub value: WongCoeffMatrix,
    /// A nonzero term was raised past `n_max` and dropped.
    pub truncated: bool,
}

pub fn apply_ladder(c: &WongCoeffMatrix, kind: LadderKind) -> Result<LadderResult> {
    let space = c.space();
    let j = kind.axis;
    if j >= space.d() {
        return Err(TwcError::InvalidArgument(format!(
            "ladder axis {j} for d={}",
            space.d()
        )));
    }
    let mut out = WongCoeffMatrix::zeros(space.d(), space.n_max())?;
    let mut truncated = false;
    let src = c.matrix();
    let dst = out.matrix_mut();
    for r in 0..space.len() {
        for k in 0..space.len() {
            let v = src[(r, k)];
            if v == ZERO {
                continue;
            }
            let (target, factor) = match kind.family {
                LadderFamily::Z1 => {
                    let b = space.coord(k, j) as f64;
                    (space.shifted(k, j, false).map(|t| (r, t)), (2.0 * b).sqrt())
                }
                LadderFamily::Z1Tilde => {
                    let b = space.coord(k, j) as f64;
                    (space.shifted(k, j, true).map(|t| (r, t)), -(2.0 * b + 2.0).sqrt())
                }
                LadderFamily::Z2 => {
                    let a = space.coord(r, j) as f64;
                    (space.shifted(r, j, false).map(|t| (t, k)), -(2.0 * a).sqrt())
                }
                LadderFamily::Z2Tilde => {
                    let a = space.coord(r, j) as f64;
                    (space.shifted(r, j, true).map(|t| (t, k)), (2.0 * a + 2.0).sqrt())
                }
            };
            match target {
                Some(pos) => dst[pos] += v * factor,
                None => {
                    let raising = matches!(kind.family, LadderFamily::Z1Tilde | LadderFamily::Z2Tilde);
                    truncated |= raising;
                }
            }
        }
    }
    Ok(LadderResult { value: out, truncated })
}

fn ladder_oscillator(c: &WongCoeffMatrix, lower: LadderFamily, raise: LadderFamily) -> Result<WongCoeffMatrix> {
    let n_max = c.n_max();
    // One extra level so that raising at n_max is not dropped.
    let padded = c.resized(n_max + 1)?;
    let mut acc = WongCoeffMatrix::zeros(c.d(), n_max + 1)?;
    for j in 0..c.d() {
        let up_down = apply_ladder(
            &apply_ladder(&padded, LadderKind::new(raise, j))?.value,
            LadderKind::new(lower, j),
        )?;
        let down_up = apply_ladder(
            &apply_ladder(&padded, LadderKind::new(lower, j))?.value,
            LadderKind::new(raise, j),
        )?;
        *acc.matrix_mut() += up_down.value.matrix() + down_up.value.matrix();
    }
    acc.resized(n_max).map(|m| m.scaled(Complex64::new(-0.5, 0.0)))
}

/// `H_σ = −½ Σ_j (Z_{2,j} Z̃_{2,j} + Z̃_{2,j} Z_{2,j})`.
pub fn h_sigma_from_ladders(c: &WongCoeffMatrix) -> Result<WongCoeffMatrix> {
    ladder_oscillator(c, LadderFamily::Z2, LadderFamily::Z2Tilde)
}

/// `H̄_σ = −½ Σ_j (Z_{1,j} Z̃_{1,j} + Z̃_{1,j} Z_{1,j})`.
pub fn h_bar_sigma_from_ladders(c: &WongCoeffMatrix) -> Result<WongCoeffMatrix> {
    ladder_oscillator(c, LadderFamily::Z1, LadderFamily::Z1Tilde)
}

/// 4th-order central first and second differences along one axis, with
/// zero extension outside the box.
fn differences(values: &[Complex64], p: usize, stride: usize, base: usize, h: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let at = |i: isize| -> Complex64 {
        if i < 0 || i >= p as isize {
            ZERO
        } else {
            values[base + i as usize * stride]
        }
    };
    let mut d1 = Vec::with_capacity(p);
    let mut d2 = Vec::with_capacity(p);
    for i in 0..p as isize {
        let (m2, m1, c0, p1, p2) = (at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2));
        d1.push((m2 - p2 + (p1 - m1) * 8.0) / (12.0 * h));
        d2.push((-m2 - p2 + (p1 + m1) * 16.0 - c0 * 30.0) / (12.0 * h * h));
    }
    (d1, d2)
}

fn oscillator_grid(a: &GridFunction, opts: &GridOptions, rotation: f64, what: &str) -> Result<GridFunction> {
    let spec = *a.spec();
    require_phase_space_d1(&spec, what)?;
    opts.check_boundary(a, what)?;
    let p = spec.points_per_axis;
    let h = spec.spacing();
    let axis = spec.axis();
    let v = a.values();
    // derivatives along x (first axis, stride p) and ξ (second axis, stride 1)
    let along_x: Vec<(Vec<Complex64>, Vec<Complex64>)> =
        (0..p).into_par_iter().map(|l| differences(v, p, p, l, h)).collect();
    let along_xi: Vec<(Vec<Complex64>, Vec<Complex64>)> =
        (0..p).into_par_iter().map(|i| differences(v, p, 1, i * p, h)).collect();
    let i_unit = Complex64::new(0.0, rotation);
    let mut out = Vec::with_capacity(p * p);
    for i in 0..p {
        for l in 0..p {
            let (x, xi) = (axis[i], axis[l]);
            let (ax, axx) = (along_x[l].0[i], along_x[l].1[i]);
            let (axi, axixi) = (along_xi[i].0[l], along_xi[i].1[l]);
            out.push(v[i * p + l] * (x * x + xi * xi) - (axx + axixi) * 0.25 - i_unit * (ax * xi - axi * x));
        }
    }
    Ok(GridFunction::from_parts_unchecked(spec, out))
}

/// Finite-difference `H_σ a` on a `d = 1` grid (oracle for the coefficient form).
pub fn apply_h_sigma_grid(a: &GridFunction, opts: &GridOptions) -> Result<GridFunction> {
    oscillator_grid(a, opts, 1.0, "apply_h_sigma_grid")
}

/// Finite-difference `H̄_σ a` on a `d = 1` grid.
pub fn apply_h_bar_sigma_grid(a: &GridFunction, opts: &GridOptions) -> Result<GridFunction> {
    oscillator_grid(a, opts, -1.0, "apply_h_bar_sigma_grid")
}

/// Relative Frobenius gap between `A(H_σ^{N₁} H̄_σ^{N₂} a)` and
/// `H_1^{N₁} H_2^{N₂}(Aa)`, the right side computed with the harmonic
/// oscillator acting on each tensor factor of the kernel.
pub fn intertwine_check(c: &WongCoeffMatrix, n1: u32, n2: u32) -> Result<f64> {
    let mut left = c.clone();
    for _ in 0..n1 {
        left = apply_h_sigma_coeff(&left);
    }
    for _ in 0..n2 {
        left = apply_h_bar_sigma_coeff(&left);
    }
    let left = kernel_map_a_coeff(&left);

    let kernel = kernel_map_a_coeff(c);
    let space = c.space();
    let n = space.len();
    let mut right = kernel.matrix().clone();
    // H_1 acts on x: each column is a Hermite expansion in α₁.
    for k in 0..n {
        let mut col =
            HermiteCoeffVector::from_coeffs(space.d(), space.n_max(), right.column(k).iter().copied().collect())?;
        for _ in 0..n1 {
            col = col.apply_h();
        }
        right.set_column(k, &nalgebra::DVector::from_vec(col.coeffs().to_vec()));
    }
    // H_2 acts on y: each row is a Hermite expansion in α₂.
    for r in 0..n {
        let mut row =
            HermiteCoeffVector::from_coeffs(space.d(), space.n_max(), right.row(r).iter().copied().collect())?;
        for _ in 0..n2 {
            row = row.apply_h();
        }
        for (k, v) in row.coeffs().iter().enumerate() {
            right[(r, k)] = *v;
        }
    }
    let scale = left.matrix().norm().max(right.norm());
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((left.matrix() - right).norm() / scale)
}
