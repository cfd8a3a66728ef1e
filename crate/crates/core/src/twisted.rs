//! Twisted convolution, the kernel map and Weyl quantization in the
//! Hermite-Wong basis, plus the grid oracles they are checked against.
//!
//! `ϱ_{α₁,α₂} *_σ ϱ_{β₁,β₂} = δ_{α₂,β₁} ϱ_{α₁,β₂}`, so the twisted product of
//! coefficient matrices is the matrix product and never raises indices: the
//! product at cutoff `n_max` is exact.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Result, TwcError};
use crate::grid::{GridFunction, GridOptions, GridSpec};
use crate::hermite::hermite_all;
use crate::index::IndexSpace;
use crate::phase_space::{check_order, hermite_wong_all, require_phase_space_d1};
use crate::wong::WongCoeffMatrix;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Admissible fraction of `‖a‖²` not captured by the truncated expansion.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

fn require_d1(d: usize) -> Result<()> {
    if d != 1 {
        return Err(TwcError::UnsupportedDimension(d, "; grid transforms are d=1 only"));
    }
    Ok(())
}

/// `c_α = ⟨a, ϱ_α⟩` by phase-space quadrature (`d = 1`).
///
/// Fails with a truncation error when more than `tail_tol` of `‖a‖²` lies
/// outside the span of the retained `ϱ_α`.
pub fn expand(a: &GridFunction, n_max: usize, tail_tol: f64) -> Result<WongCoeffMatrix> {
    let spec = *a.spec();
    require_phase_space_d1(&spec, "expand")?;
    check_order(n_max)?;
    let space = IndexSpace::new(1, n_max)?;
    let p = spec.points_per_axis;
    let m = n_max + 1;
    let axis = spec.axis();
    let vol = spec.cell_volume();
    let rows: Vec<Vec<Complex64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![ZERO; m * m];
            for (l, &xi) in axis.iter().enumerate() {
                let v = a.at2(i, l);
                if v == ZERO {
                    continue;
                }
                let table = hermite_wong_all(n_max, axis[i], xi);
                for (c, t) in acc.iter_mut().zip(&table) {
                    *c += v * t.conj();
                }
            }
            acc
        })
        .collect();
    let mut total = vec![ZERO; m * m];
    for row in &rows {
        for (t, r) in total.iter_mut().zip(row) {
            *t += r * vol;
        }
    }
    let c = WongCoeffMatrix::from_parts(space, DMatrix::from_row_slice(m, m, &total));
    let norm_sq = a.norm_l2().powi(2);
    if norm_sq > 0.0 {
        let fraction = (1.0 - c.frobenius_norm().powi(2) / norm_sq).max(0.0);
        if fraction > tail_tol {
            return Err(TwcError::Truncation {
                what: format!("expansion tail beyond n_max={n_max}"),
                fraction,
                threshold: tail_tol,
            });
        }
    }
    Ok(c)
}

/// `Σ c_α ϱ_α` sampled on a `d = 1` phase-space grid.
pub fn synthesize(c: &WongCoeffMatrix, spec: &GridSpec) -> Result<GridFunction> {
    require_d1(c.d())?;
    require_phase_space_d1(spec, "synthesize")?;
    check_order(c.n_max())?;
    let n_max = c.n_max();
    let m = n_max + 1;
    let mut coeffs: Vec<(usize, Complex64)> = Vec::new();
    for r in 0..m {
        for k in 0..m {
            let v = c.matrix()[(r, k)];
            if v != ZERO {
                coeffs.push((r * m + k, v));
            }
        }
    }
    let axis = spec.axis();
    let p = spec.points_per_axis;
    let values: Vec<Complex64> = (0..p * p)
        .into_par_iter()
        .map(|flat| {
            if coeffs.is_empty() {
                return ZERO;
            }
            let table = hermite_wong_all(n_max, axis[flat / p], axis[flat % p]);
            coeffs.iter().map(|(k, v)| v * table[*k]).sum()
        })
        .collect();
    Ok(GridFunction::from_parts_unchecked(*spec, values))
}

/// Hermite-basis coefficients of an integral kernel
/// `K(x, y) = Σ k_{α₁,α₂} h_{α₁}(x) h_{α₂}(y)`; as a matrix, the operator
/// with kernel `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCoeffMatrix {
    space: IndexSpace,
    entries: DMatrix<Complex64>,
}

impl KernelCoeffMatrix {
    pub fn space(&self) -> IndexSpace {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Samples `K` on a grid over `R^{2d}` with axes `(x_1..x_d, y_1..y_d)`.
    pub fn synthesize_kernel(&self, spec: &GridSpec) -> Result<GridFunction> {
        let d = self.space.d();
        if spec.dims != 2 * d {
            return Err(TwcError::GridMismatch(format!(
                "{}-axis grid for a kernel on R^{d} x R^{d}",
                spec.dims
            )));
        }
        let n_max = self.space.n_max();
        let tables: Vec<Vec<f64>> = spec.axis().iter().map(|&t| hermite_all(n_max, t)).collect();
        let len = self.space.len();
        let basis = |pos: &[usize]| -> Vec<f64> {
            (0..len)
                .map(|k| {
                    let e = self.space.entries_of(k);
                    (0..d).map(|j| tables[pos[j]][e[j]]).product()
                })
                .collect()
        };
        let values: Vec<Complex64> = (0..spec.len())
            .into_par_iter()
            .map(|flat| {
                let pos = spec.unflatten(flat);
                let hx = basis(&pos[..d]);
                let hy = basis(&pos[d..]);
                let mut s = ZERO;
                for (r, &u) in hx.iter().enumerate() {
                    if u == 0.0 {
                        continue;
                    }
                    let row: Complex64 = hy.iter().enumerate().map(|(c, &w)| self.entries[(r, c)] * w).sum();
                    s += row * u;
                }
                s
            })
            .collect();
        Ok(GridFunction::from_parts_unchecked(*spec, values))
    }
}

/// `Aa` in the Hermite basis: the same numbers, relabeled
/// `ϱ_{α₁,α₂} ↦ h_{α₁} ⊗ h_{α₂}`.
pub fn kernel_map_a_coeff(c: &WongCoeffMatrix) -> KernelCoeffMatrix {
    KernelCoeffMatrix {
        space: c.space(),
        entries: c.matrix().clone(),
    }
}

/// `a *_σ b` as the matrix product `C_a C_b`.
pub fn twisted_convolution_coeff(a: &WongCoeffMatrix, b: &WongCoeffMatrix) -> Result<WongCoeffMatrix> {
    a.check_same(b, "twisted convolution")?;
    Ok(WongCoeffMatrix::from_parts(a.space(), a.matrix() * b.matrix()))
}

/// `F_σ a`: each `ϱ_{α₁,α₂}` is an eigenfunction with eigenvalue `(−1)^{|α₁|}`.
pub fn symplectic_fourier_coeff(c: &WongCoeffMatrix) -> WongCoeffMatrix {
    let space = c.space();
    let mut m = c.matrix().clone();
    for r in 0..space.len() {
        if space.order_of(r) % 2 == 1 {
            m.row_mut(r).iter_mut().for_each(|v| *v = -*v);
        }
    }
    WongCoeffMatrix::from_parts(space, m)
}

/// `Op^w(a) = (2π)^{−d/2} A(F_σ a)` as a matrix `M` in the Hermite basis,
/// `Op^w(a) h_β = Σ_γ M_{γβ} h_γ`.
pub fn weyl_quantize(c: &WongCoeffMatrix) -> DMatrix<Complex64> {
    let scale = (2.0 * PI).powf(-(c.d() as f64) / 2.0);
    symplectic_fourier_coeff(c).into_matrix() * Complex64::new(scale, 0.0)
}

/// Inverse of [`weyl_quantize`]: the symbol of an operator matrix.
pub fn weyl_symbol(d: usize, n_max: usize, op: &DMatrix<Complex64>) -> Result<WongCoeffMatrix> {
    let scale = (2.0 * PI).powf(d as f64 / 2.0);
    let c = WongCoeffMatrix::from_matrix(d, n_max, op * Complex64::new(scale, 0.0))?;
    Ok(symplectic_fourier_coeff(&c))
}

/// The Weyl product `a # b`, normalized so that
/// `Op^w(a # b) = Op^w(a) Op^w(b)`: `a # b = (2π)^{−d/2} a *_σ (F_σ b)`.
pub fn weyl_product(a: &WongCoeffMatrix, b: &WongCoeffMatrix) -> Result<WongCoeffMatrix> {
    let scale = (2.0 * PI).powf(-(a.d() as f64) / 2.0);
    Ok(twisted_convolution_coeff(a, &symplectic_fourier_coeff(b))?.scaled(Complex64::new(scale, 0.0)))
}

/// Direct quadrature of
/// `(a *_σ b)(X) = (2/π)^{d/2} ∫ a(X − Y) b(Y) e^{2iσ(X,Y)} dY` (`d = 1`).
///
/// `O(M²)` in the number of grid points; an oracle for small grids. The
/// grid must have an odd number of points per axis so that `X − Y` stays on
/// the grid; `a(X − Y)` is taken as zero outside the box.
pub fn twisted_convolution_grid(a: &GridFunction, b: &GridFunction, opts: &GridOptions) -> Result<GridFunction> {
    let spec = *a.spec();
    require_phase_space_d1(&spec, "twisted_convolution_grid")?;
    spec.check_same(b.spec(), "twisted_convolution_grid")?;
    let p = spec.points_per_axis;
    if p.is_multiple_of(2) {
        return Err(TwcError::GridMismatch(format!(
            "twisted_convolution_grid needs an odd number of points per axis (got {p})"
        )));
    }
    opts.check_boundary(a, "twisted_convolution_grid: a")?;
    opts.check_boundary(b, "twisted_convolution_grid: b")?;
    let c = (p - 1) / 2;
    let h = spec.spacing();
    let axis = spec.axis();
    // e[r * p + s] = e^{2i s_r s_s}
    let e: Vec<Complex64> = (0..p * p)
        .map(|k| Complex64::from_polar(1.0, 2.0 * axis[k / p] * axis[k % p]))
        .collect();
    let av = a.values();
    let bv = b.values();
    let prefactor = (2.0 / PI).sqrt() * h * h;
    let rows: Vec<Vec<Complex64>> = (0..p)
        .into_par_iter()
        .map(|i| {
            // bb[p, q] = b(y_p, η_q) e^{−2i x_i η_q}
            let bb: Vec<Complex64> = (0..p * p).map(|k| bv[k] * e[i * p + k % p].conj()).collect();
            let p_lo = (i + c).saturating_sub(p - 1);
            let p_hi = (i + c).min(p - 1);
            let mut row = vec![ZERO; p];
            for (l, out) in row.iter_mut().enumerate() {
                let q_lo = (l + c).saturating_sub(p - 1);
                let q_hi = (l + c).min(p - 1);
                let mut acc = ZERO;
                for pp in p_lo..=p_hi {
                    let r = i + c - pp;
                    let arow = &av[r * p..(r + 1) * p];
                    let brow = &bb[pp * p..(pp + 1) * p];
                    let mut inner = ZERO;
                    for q in q_lo..=q_hi {
                        inner += arow[l + c - q] * brow[q];
                    }
                    acc += inner * e[pp * p + l];
                }
                *out = acc * prefactor;
            }
            row
        })
        .collect();
    Ok(GridFunction::from_parts_unchecked(spec, rows.concat()))
}

/// `(a *_σ ψ, ψ)_{L²}` on the grid.
pub fn twisted_pairing_grid(a: &GridFunction, psi: &GridFunction, opts: &GridOptions) -> Result<Complex64> {
    twisted_convolution_grid(a, psi, opts)?.inner(psi)
}
