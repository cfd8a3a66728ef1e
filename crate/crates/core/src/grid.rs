//! Uniformly sampled complex functions on a centred box `[-L, L]^dims`.
//!
//! Samples are stored row-major with the first axis slowest. For phase-space
//! functions with `d = 1` the axes are `(x, ξ)`; for operator kernels they are
//! `(x, y)`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwcError};

pub const MIN_POINTS_PER_AXIS: usize = 16;

/// Default relative boundary threshold used in strict mode.
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dims: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl GridSpec {
    pub fn new(dims: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if dims == 0 || dims > 4 {
            return Err(TwcError::InvalidArgument(format!("grid with {dims} axes")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(TwcError::InvalidArgument(format!("box half width {half_width}")));
        }
        if points_per_axis < MIN_POINTS_PER_AXIS {
            return Err(TwcError::Resolution {
                reason: format!("{points_per_axis} points per axis"),
                required: MIN_POINTS_PER_AXIS,
            });
        }
        Ok(GridSpec {
            dims,
            half_width,
            points_per_axis,
        })
    }

    /// The default phase-space grid for `d = 1`: `L = 8`, 256 points per axis.
    pub fn phase_space_default() -> Self {
        GridSpec {
            dims: 2,
            half_width: 8.0,
            points_per_axis: 256,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }

    pub fn axis(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points_per_axis)
            .map(|i| -self.half_width + i as f64 * h)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Volume element `Δ^dims` of the Riemann/trapezoid sum.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dims as i32)
    }

    pub fn with_dims(&self, dims: usize) -> Self {
        GridSpec { dims, ..*self }
    }

    /// Per-axis sample indices of the flat position.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims];
        for slot in idx.iter_mut().rev() {
            *slot = flat % self.points_per_axis;
            flat /= self.points_per_axis;
        }
        idx
    }

    fn same_sampling(&self, other: &GridSpec) -> bool {
        self.points_per_axis == other.points_per_axis
            && (self.half_width - other.half_width).abs() <= 1e-14 * self.half_width
    }

    pub(crate) fn check_same(&self, other: &GridSpec, what: &str) -> Result<()> {
        if self.dims != other.dims || !self.same_sampling(other) {
            return Err(TwcError::GridMismatch(format!("{what}: {self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// How boundary mass is treated by grid transforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Error (rather than warn) when boundary mass exceeds `boundary_tol`.
    pub strict: bool,
    /// Admissible ratio `max |f| on the box faces / max |f|`.
    pub boundary_tol: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            strict: true,
            boundary_tol: DEFAULT_BOUNDARY_TOL,
        }
    }
}

impl GridOptions {
    pub fn permissive() -> Self {
        GridOptions {
            strict: false,
            ..Default::default()
        }
    }

    pub(crate) fn check_boundary(&self, f: &GridFunction, what: &str) -> Result<()> {
        let fraction = f.boundary_fraction();
        if fraction > self.boundary_tol {
            if self.strict {
                return Err(TwcError::Truncation {
                    what: format!("{what}: boundary mass"),
                    fraction,
                    threshold: self.boundary_tol,
                });
            }
            log::warn!(
                "{what}: boundary mass fraction {fraction:.3e} exceeds {:.1e}",
                self.boundary_tol
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(TwcError::ShapeMismatch(format!(
                "{} samples for a grid of {} points",
                values.len(),
                spec.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(TwcError::InvalidArgument(format!(
                "non-finite sample at flat position {pos}"
            )));
        }
        Ok(GridFunction { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        GridFunction {
            values: vec![Complex64::new(0.0, 0.0); spec.len()],
            spec,
        }
    }

    /// Samples `f` at every grid point; the closure receives the coordinates.
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let axis = spec.axis();
        let mut coords = vec![0.0; spec.dims];
        let values = (0..spec.len())
            .map(|flat| {
                for (c, i) in coords.iter_mut().zip(spec.unflatten(flat)) {
                    *c = axis[i];
                }
                f(&coords)
            })
            .collect();
        GridFunction { spec, values }
    }

    pub(crate) fn from_parts_unchecked(spec: GridSpec, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), spec.len());
        GridFunction { spec, values }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at a 2-axis sample position `(i, j)`.
    pub fn at2(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.spec.points_per_axis + j]
    }

    /// `∫ f conj(g)` by the trapezoid rule (endpoint weights are irrelevant
    /// for functions that vanish on the box faces).
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.spec.check_same(&other.spec, "inner product")?;
        let sum: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(sum * self.spec.cell_volume())
    }

    pub fn norm_l2(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (sum * self.spec.cell_volume()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `‖self − other‖₂` on the common grid.
    pub fn distance_l2(&self, other: &GridFunction) -> Result<f64> {
        self.spec.check_same(&other.spec, "distance")?;
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((sum * self.spec.cell_volume()).sqrt())
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.spec.check_same(&other.spec, "distance")?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn scale(&mut self, factor: Complex64) {
        self.values.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn axpy(&mut self, alpha: Complex64, other: &GridFunction) -> Result<()> {
        self.spec.check_same(&other.spec, "axpy")?;
        for (v, o) in self.values.iter_mut().zip(&other.values) {
            *v += alpha * o;
        }
        Ok(())
    }

    /// `max |f|` over samples on the outer faces of the box, relative to
    /// `max |f|`. Zero for the zero function.
    pub fn boundary_fraction(&self) -> f64 {
        let total = self.max_abs();
        if total == 0.0 {
            return 0.0;
        }
        let last = self.spec.points_per_axis - 1;
        let boundary = self
            .values
            .iter()
            .enumerate()
            .filter(|(flat, _)| self.spec.unflatten(*flat).iter().any(|&i| i == 0 || i == last))
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        boundary / total
    }

    /// Value at the grid point closest to the origin, and its distance.
    pub fn value_near_origin(&self) -> (Complex64, f64) {
        let axis = self.spec.axis();
        let (i0, x0) = axis
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, x)| (i, x.abs()))
            .unwrap();
        let flat = (0..self.spec.dims).fold(0, |acc, _| acc * self.spec.points_per_axis + i0);
        (self.values[flat], x0 * (self.spec.dims as f64).sqrt())
    }

    /// Binary layout: `dims` (u32 LE), `L` (f64 LE), `points_per_axis`
    /// (u32 LE), then row-major samples as `(re, im)` f64 LE pairs.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.spec.dims as u32).to_le_bytes())?;
        w.write_all(&self.spec.half_width.to_le_bytes())?;
        w.write_all(&(self.spec.points_per_axis as u32).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut u32buf = [0u8; 4];
        let mut f64buf = [0u8; 8];
        r.read_exact(&mut u32buf)?;
        let dims = u32::from_le_bytes(u32buf) as usize;
        r.read_exact(&mut f64buf)?;
        let half_width = f64::from_le_bytes(f64buf);
        r.read_exact(&mut u32buf)?;
        let points = u32::from_le_bytes(u32buf) as usize;
        let spec = GridSpec::new(dims, half_width, points)?;
        let mut values = Vec::with_capacity(spec.len());
        for _ in 0..spec.len() {
            r.read_exact(&mut f64buf)?;
            let re = f64::from_le_bytes(f64buf);
            r.read_exact(&mut f64buf)?;
            let im = f64::from_le_bytes(f64buf);
            values.push(Complex64::new(re, im));
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)?;
        if !rest.is_empty() {
            return Err(TwcError::Format(format!("{} trailing bytes", rest.len())));
        }
        GridFunction::new(spec, values)
    }

    /// Writes `<path>` (binary) and `<path>.json` (header sidecar).
    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_binary(BufWriter::new(File::create(path)?))?;
        let sidecar = sidecar_path(path);
        std::fs::write(sidecar, serde_json::to_string_pretty(&self.spec)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_binary(BufReader::new(File::open(path)?))
    }
}

pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    s.into()
}
