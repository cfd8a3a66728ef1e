//! Grid realizations of the phase-space transforms for `d = 1`.
//!
//! Conventions:
//!
//! * Wigner distribution
//!   `W_{f,g}(x,ξ) = (2π)^{-1/2} ∫ f(x − y/2) conj(g(x + y/2)) e^{+iyξ} dy`;
//! * symplectic Fourier transform
//!   `(F_σ a)(X) = π^{-1} ∫ a(Y) e^{2iσ(X,Y)} dY` with `σ(X,Y) = yξ − xη`;
//! * kernel map
//!   `(Aa)(x,y) = (2π)^{-1/2} ∫ a((y − x)/2, ξ) e^{−i(x+y)ξ} dξ`;
//! * Hermite-Wong functions `ϱ_{α₁,α₂} = (−1)^{α₁} W_{h_{α₁}, h_{α₂}}`.
//!
//! All grid transforms are trapezoid-rule quadratures on the sample grid, which
//! is spectrally accurate for the Gaussian-localized inputs they are used on.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, TwcError};
use crate::grid::{GridFunction, GridOptions, GridSpec};
use crate::index::PairIndex;
use crate::logdomain::ln_factorial;

/// Highest per-coordinate Hermite-Wong order supported by the closed form.
pub const MAX_WONG_ORDER: usize = 64;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Normalized associated Laguerre functions
/// `ℓ_j^{(k)}(t) = √(j!/(j+k)!) t^{k/2} e^{−t/2} L_j^{(k)}(t)` for `j = 0..=jmax`.
fn laguerre_functions(k: usize, t: f64, jmax: usize, out: &mut Vec<f64>) {
    out.clear();
    let kf = k as f64;
    let l0 = if k == 0 {
        (-0.5 * t).exp()
    } else if t == 0.0 {
        0.0
    } else {
        (0.5 * kf * t.ln() - 0.5 * t - 0.5 * ln_factorial(k)).exp()
    };
    out.push(l0);
    if jmax == 0 {
        return;
    }
    let mut prev = 0.0;
    let mut cur = l0;
    for j in 0..jmax {
        let jf = j as f64;
        let next = (2.0 * jf + 1.0 + kf - t) * cur / ((jf + 1.0) * (jf + kf + 1.0)).sqrt()
            - (jf * (jf + kf) / ((jf + 1.0) * (jf + kf + 1.0))).sqrt() * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
}

/// All one-dimensional Hermite-Wong values `ϱ_{m,n}(x, ξ)` for `m, n ≤ n_max`,
/// row-major in `(m, n)`.
///
/// With `z = x + iξ = ρ e^{iφ}` and `t = 2ρ²`:
/// `ϱ_{m,n} = √(2/π) e^{i(n−m)φ} ℓ_m^{(n−m)}(t)` for `n ≥ m`, and
/// `ϱ_{m,n} = √(2/π) (−1)^{m−n} e^{−i(m−n)φ} ℓ_n^{(m−n)}(t)` for `m > n`.
pub fn hermite_wong_all(n_max: usize, x: f64, xi: f64) -> Vec<Complex64> {
    let p = n_max + 1;
    let mut out = vec![c64(0.0, 0.0); p * p];
    let t = 2.0 * (x * x + xi * xi);
    let phi = xi.atan2(x);
    let norm = (2.0 / PI).sqrt();
    let mut ell = Vec::with_capacity(p);
    for k in 0..p {
        laguerre_functions(k, t, n_max - k, &mut ell);
        let phase = Complex64::from_polar(1.0, k as f64 * phi);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (j, &l) in ell.iter().enumerate() {
            // (m, n) = (j, j + k): above the diagonal
            out[j * p + j + k] = phase * (norm * l);
            if k > 0 {
                // (m, n) = (j + k, j): below the diagonal
                out[(j + k) * p + j] = phase.conj() * (sign * norm * l);
            }
        }
    }
    out
}

/// `ϱ_α(X)` for `d ∈ {1, 2}`; `X = (x_1..x_d, ξ_1..ξ_d)`.
pub fn hermite_wong_value(alpha: &PairIndex, point: &[f64]) -> Result<Complex64> {
    let d = alpha.dim();
    if point.len() != 2 * d {
        return Err(TwcError::InvalidArgument(format!(
            "phase-space point of length {} for d={d}",
            point.len()
        )));
    }
    let n_max = alpha.first.max_entry().max(alpha.second.max_entry());
    check_order(n_max)?;
    let mut value = c64(1.0, 0.0);
    for j in 0..d {
        let (m, n) = (alpha.first.entries()[j], alpha.second.entries()[j]);
        let table = hermite_wong_all(m.max(n), point[j], point[d + j]);
        value *= table[m * (m.max(n) + 1) + n];
    }
    Ok(value)
}

pub(crate) fn check_order(n: usize) -> Result<()> {
    if n > MAX_WONG_ORDER {
        return Err(TwcError::InvalidArgument(format!(
            "Hermite-Wong order {n} exceeds {MAX_WONG_ORDER}"
        )));
    }
    Ok(())
}

pub(crate) fn require_phase_space_d1(spec: &GridSpec, what: &str) -> Result<()> {
    match spec.dims {
        2 => Ok(()),
        4 => Err(TwcError::UnsupportedDimension(2, "; grid transforms are d=1 only")),
        n => Err(TwcError::GridMismatch(format!(
            "{what}: expected a 2-axis phase-space grid, got {n} axes"
        ))),
    }
}

/// Samples `ϱ_α` (for `d = 1`) on a phase-space grid.
pub fn hermite_wong_eval(alpha: &PairIndex, spec: &GridSpec) -> Result<GridFunction> {
    if alpha.dim() != 1 {
        return Err(TwcError::UnsupportedDimension(
            alpha.dim(),
            "; grid transforms are d=1 only",
        ));
    }
    require_phase_space_d1(spec, "hermite_wong_eval")?;
    let (m, n) = (alpha.first.entries()[0], alpha.second.entries()[0]);
    let top = m.max(n);
    check_order(top)?;
    let axis = spec.axis();
    let p = spec.points_per_axis;
    let values: Vec<Complex64> = (0..p * p)
        .into_par_iter()
        .map(|flat| {
            let table = hermite_wong_all(top, axis[flat / p], axis[flat % p]);
            table[m * (top + 1) + n]
        })
        .collect();
    Ok(GridFunction::from_parts_unchecked(*spec, values))
}

/// Cross-Wigner distribution of two sampled functions on `R`, returned on
/// the tensor grid `(x, ξ)`.
///
/// The `y`-integral is sampled at `y = 2kΔ` so that `x ∓ y/2` fall on the
/// input grid.
pub fn wigner(f: &GridFunction, g: &GridFunction, opts: &GridOptions) -> Result<GridFunction> {
    if f.spec().dims != 1 || g.spec().dims != 1 {
        return Err(TwcError::GridMismatch(format!(
            "wigner expects functions on R (got {} and {} axes)",
            f.spec().dims,
            g.spec().dims
        )));
    }
    f.spec().check_same(g.spec(), "wigner")?;
    opts.check_boundary(f, "wigner: f")?;
    opts.check_boundary(g, "wigner: g")?;
    let spec = f.spec().with_dims(2);
    let p = spec.points_per_axis;
    let h = spec.spacing();
    let axis = spec.axis();
    // phase[(k + p − 1) * p + l] = e^{2ikΔ ξ_l}
    let phase: Vec<Complex64> = (0..2 * p - 1)
        .flat_map(|kk| {
            let k = kk as f64 - (p - 1) as f64;
            axis.iter()
                .map(move |&xi| Complex64::from_polar(1.0, 2.0 * k * h * xi))
                .collect::<Vec<_>>()
        })
        .collect();
    let prefactor = 2.0 * h / (2.0 * PI).sqrt();
    let fv = f.values();
    let gv = g.values();
    let rows: Vec<Vec<Complex64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let reach = i.min(p - 1 - i) as isize;
            let mut row = vec![c64(0.0, 0.0); p];
            for k in -reach..=reach {
                let prod = fv[(i as isize - k) as usize] * gv[(i as isize + k) as usize].conj();
                if prod == c64(0.0, 0.0) {
                    continue;
                }
                let base = (k + p as isize - 1) as usize * p;
                for (r, e) in row.iter_mut().zip(&phase[base..base + p]) {
                    *r += prod * e;
                }
            }
            row.iter_mut().for_each(|v| *v *= prefactor);
            row
        })
        .collect();
    Ok(GridFunction::from_parts_unchecked(spec, rows.concat()))
}

fn fourier_kernel(axis: &[f64], sign: f64) -> DMatrix<Complex64> {
    let p = axis.len();
    DMatrix::from_fn(p, p, |r, c| Complex64::from_polar(1.0, sign * 2.0 * axis[r] * axis[c]))
}

/// Symplectic Fourier transform on a `d = 1` phase-space grid, as two dense
/// one-dimensional transforms evaluated at the grid frequencies.
pub fn symplectic_fourier(a: &GridFunction, opts: &GridOptions) -> Result<GridFunction> {
    let spec = *a.spec();
    require_phase_space_d1(&spec, "symplectic_fourier")?;
    opts.check_boundary(a, "symplectic_fourier")?;
    let p = spec.points_per_axis;
    let h = spec.spacing();
    let axis = spec.axis();
    // input A[p, q] = a(y_p, η_q); output F[i, l] at (x_i, ξ_l)
    let input = DMatrix::from_row_slice(p, p, a.values());
    // B[p, i] = Σ_q A[p, q] e^{−2i x_i η_q}
    let b = &input * fourier_kernel(&axis, -1.0);
    // F[i, l] = Σ_p B[p, i] e^{2i y_p ξ_l}
    let out = b.transpose() * fourier_kernel(&axis, 1.0);
    let scale = h * h / PI;
    let mut values = Vec::with_capacity(p * p);
    for i in 0..p {
        for l in 0..p {
            values.push(out[(i, l)] * scale);
        }
    }
    Ok(GridFunction::from_parts_unchecked(spec, values))
}

/// Band-limited upsampling by two along the first axis: row `k` of the result
/// is the sample at `u = −L + kΔ/2`, `k = 0..2p−1`.
fn upsample_first_axis(a: &GridFunction) -> Vec<Vec<Complex64>> {
    let p = a.spec().points_per_axis;
    let mut planner = FftPlanner::<f64>::new();
    let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(p);
    let inv: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(2 * p);
    let mut out = vec![vec![c64(0.0, 0.0); p]; 2 * p];
    let mut column = vec![c64(0.0, 0.0); p];
    let mut padded = vec![c64(0.0, 0.0); 2 * p];
    #[allow(clippy::needless_range_loop)]
    for l in 0..p {
        for (r, v) in column.iter_mut().enumerate() {
            *v = a.at2(r, l);
        }
        fwd.process(&mut column);
        padded.iter_mut().for_each(|v| *v = c64(0.0, 0.0));
        let half = p / 2;
        if p.is_multiple_of(2) {
            padded[..half].copy_from_slice(&column[..half]);
            padded[2 * p - half + 1..].copy_from_slice(&column[half + 1..]);
            padded[half] = column[half] * 0.5;
            padded[2 * p - half] = column[half] * 0.5;
        } else {
            padded[..=half].copy_from_slice(&column[..=half]);
            padded[2 * p - half..].copy_from_slice(&column[half + 1..]);
        }
        inv.process(&mut padded);
        for (k, v) in padded.iter().enumerate() {
            out[k][l] = v / p as f64;
        }
    }
    out
}

/// Kernel `(Aa)(x, y)` of the operator attached to `a`, on the same grid
/// (axes `(x, y)`).
///
/// The partial inverse Fourier transform in `ξ` is evaluated exactly at the
/// needed arguments `x + y`; the half-integer points `(y − x)/2` of the
/// first variable come from band-limited (FFT) upsampling.
pub fn kernel_map_a_grid(a: &GridFunction, opts: &GridOptions) -> Result<GridFunction> {
    let spec = *a.spec();
    require_phase_space_d1(&spec, "kernel_map_a_grid")?;
    opts.check_boundary(a, "kernel_map_a_grid")?;
    let p = spec.points_per_axis;
    let h = spec.spacing();
    let axis = spec.axis();
    let fine = upsample_first_axis(a);
    // phase[m][l] = e^{−i t_m ξ_l}, t_m = −2L + mΔ
    let phase: Vec<Vec<Complex64>> = (0..2 * p - 1)
        .map(|m| {
            let t = -2.0 * spec.half_width + m as f64 * h;
            axis.iter().map(|&xi| Complex64::from_polar(1.0, -t * xi)).collect()
        })
        .collect();
    let prefactor = h / (2.0 * PI).sqrt();
    let values: Vec<Complex64> = (0..p * p)
        .into_par_iter()
        .map(|flat| {
            let (i, j) = (flat / p, flat % p);
            let k = j + p - 1 - i;
            let m = i + j;
            let s: Complex64 = fine[k].iter().zip(&phase[m]).map(|(u, e)| u * e).sum();
            s * prefactor
        })
        .collect();
    Ok(GridFunction::from_parts_unchecked(spec, values))
}
