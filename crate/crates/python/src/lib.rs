//! Python bindings: `import twc`.
//!
//! Coefficient objects are wrapped as classes; grid data crosses the
//! boundary as nested lists of complex numbers (d = 1, so phase-space grids
//! are square). Reports come back as plain dicts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use twc::oscillators::{apply_h_bar_sigma_coeff, apply_h_sigma_coeff, apply_ladder as ladder, apply_t_sigma_coeff};
use twc::phase_space::{hermite_wong_value as wong_value, wigner as wigner_grid};
use twc::positivity::DEFAULT_PSD_TOL;
use twc::regularity::{
    check_regularity_with, classify_decay as decay, t_sigma_origin as origin, verify_regularity_theorem as theorem,
    verify_weyl_positive as weyl_positive, DEFAULT_S_TOL,
};
use twc::twisted::{
    expand as expand_grid, symplectic_fourier_coeff, synthesize as synthesize_grid, twisted_convolution_coeff,
    weyl_product as weyl_mul, weyl_quantize as quantize, weyl_symbol as symbol_of, DEFAULT_TAIL_TOL,
};
use twc::{
    GridFunction, GridOptions, GridSpec, GrowthMode, LadderFamily, LadderKind, MultiIndex, PairIndex, TheoremConfig,
};

create_exception!(
    twc,
    TwcError,
    PyValueError,
    "Raised for every error reported by the twc core."
);

fn err(e: twc::TwcError) -> PyErr {
    TwcError::new_err(e.to_string())
}

fn to_py_json(py: Python<'_>, value: serde_json::Value) -> PyResult<Py<PyAny>> {
    let json = py.import("json")?;
    Ok(json.call_method1("loads", (value.to_string(),))?.unbind())
}

fn pair(a1: Vec<usize>, a2: Vec<usize>) -> PyResult<PairIndex> {
    let first = MultiIndex::new(a1).map_err(err)?;
    let second = MultiIndex::new(a2).map_err(err)?;
    PairIndex::new(first, second).map_err(err)
}

fn options(strict: bool) -> GridOptions {
    if strict {
        GridOptions::default()
    } else {
        GridOptions::permissive()
    }
}

fn rows_of(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<Complex64>]) -> PyResult<DMatrix<Complex64>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(TwcError::new_err("expected a square nested list"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn grid_rows(g: &GridFunction) -> Vec<Vec<Complex64>> {
    g.values()
        .chunks(g.spec().points_per_axis)
        .map(|c| c.to_vec())
        .collect()
}

fn grid_from_rows(rows: &[Vec<Complex64>], half_width: f64) -> PyResult<GridFunction> {
    let spec = GridSpec::new(2, half_width, rows.len()).map_err(err)?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(TwcError::new_err("expected a square nested list"));
    }
    GridFunction::new(spec, rows.concat()).map_err(err)
}

/// Hermite-Wong coefficients `c_{α₁,α₂}` of a phase-space function.
#[pyclass(name = "WongCoeffMatrix", module = "twc", from_py_object)]
#[derive(Clone)]
struct PyWong {
    inner: twc::WongCoeffMatrix,
}

impl From<twc::WongCoeffMatrix> for PyWong {
    fn from(inner: twc::WongCoeffMatrix) -> Self {
        PyWong { inner }
    }
}

#[pymethods]
impl PyWong {
    #[new]
    #[pyo3(signature = (d, n_max, rows=None))]
    fn new(d: usize, n_max: usize, rows: Option<Vec<Vec<Complex64>>>) -> PyResult<Self> {
        let inner = match rows {
            None => twc::WongCoeffMatrix::zeros(d, n_max),
            Some(r) => twc::WongCoeffMatrix::from_matrix(d, n_max, matrix_from_rows(&r)?),
        };
        inner.map(Into::into).map_err(err)
    }

    #[staticmethod]
    fn identity(d: usize, n_max: usize) -> PyResult<Self> {
        twc::WongCoeffMatrix::identity(d, n_max).map(Into::into).map_err(err)
    }

    /// The single basis element `ϱ_{α₁,α₂}`.
    #[staticmethod]
    fn unit(d: usize, n_max: usize, a1: Vec<usize>, a2: Vec<usize>) -> PyResult<Self> {
        twc::WongCoeffMatrix::unit(d, n_max, &pair(a1, a2)?)
            .map(Into::into)
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc: serde_json::Value = serde_json::from_str(text).map_err(|e| TwcError::new_err(e.to_string()))?;
        twc::WongCoeffMatrix::from_json(&doc).map(Into::into).map_err(err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn n_max(&self) -> usize {
        self.inner.n_max()
    }

    fn rows(&self) -> Vec<Vec<Complex64>> {
        rows_of(self.inner.matrix())
    }

    fn get(&self, a1: Vec<usize>, a2: Vec<usize>) -> PyResult<Option<Complex64>> {
        Ok(self.inner.get(&pair(a1, a2)?))
    }

    fn set(&mut self, a1: Vec<usize>, a2: Vec<usize>, value: Complex64) -> PyResult<()> {
        self.inner.set(&pair(a1, a2)?, value).map_err(err)
    }

    fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    fn adjoint(&self) -> Self {
        self.inner.adjoint().into()
    }

    fn is_hermitian(&self, tol: f64) -> bool {
        self.inner.is_hermitian(tol)
    }

    /// Pointwise value at `(x, ξ)`.
    fn evaluate(&self, point: Vec<f64>) -> PyResult<Complex64> {
        self.inner.evaluate(&point).map_err(err)
    }

    fn __matmul__(&self, other: PyRef<'_, PyWong>) -> PyResult<Self> {
        twisted_convolution_coeff(&self.inner, &other.inner)
            .map(Into::into)
            .map_err(err)
    }

    fn __eq__(&self, other: PyRef<'_, PyWong>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "WongCoeffMatrix(d={}, n_max={}, nonzero={})",
            self.inner.d(),
            self.inner.n_max(),
            self.inner.count_nonzero()
        )
    }
}

/// Hermite coefficients of a function on `R^d`.
#[pyclass(name = "HermiteCoeffVector", module = "twc", from_py_object)]
#[derive(Clone)]
struct PyHermite {
    inner: twc::HermiteCoeffVector,
}

#[pymethods]
impl PyHermite {
    #[new]
    #[pyo3(signature = (d, n_max, coeffs=None))]
    fn new(d: usize, n_max: usize, coeffs: Option<Vec<Complex64>>) -> PyResult<Self> {
        let inner = match coeffs {
            None => twc::HermiteCoeffVector::zeros(d, n_max),
            Some(c) => twc::HermiteCoeffVector::from_coeffs(d, n_max, c),
        };
        inner.map(|inner| PyHermite { inner }).map_err(err)
    }

    #[staticmethod]
    fn unit(d: usize, n_max: usize, alpha: Vec<usize>) -> PyResult<Self> {
        let alpha = MultiIndex::new(alpha).map_err(err)?;
        twc::HermiteCoeffVector::unit(d, n_max, &alpha)
            .map(|inner| PyHermite { inner })
            .map_err(err)
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn n_max(&self) -> usize {
        self.inner.n_max()
    }

    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    fn norm_l2(&self) -> f64 {
        self.inner.norm_l2()
    }

    fn inner(&self, other: PyRef<'_, PyHermite>) -> PyResult<Complex64> {
        self.inner.inner(&other.inner).map_err(err)
    }

    /// Harmonic oscillator `H = |x|² − Δ`.
    fn apply_h(&self) -> Self {
        PyHermite {
            inner: self.inner.apply_h(),
        }
    }

    fn evaluate(&self, x: Vec<f64>) -> PyResult<Complex64> {
        self.inner.evaluate(&x).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("HermiteCoeffVector(d={}, n_max={})", self.inner.d(), self.inner.n_max())
    }
}

/// Normalized Hermite function `h_k(x)`.
#[pyfunction]
fn hermite_eval(k: i64, x: f64) -> PyResult<f64> {
    twc::hermite_eval(k, x).map_err(err)
}

/// `[h_0(x), …, h_n(x)]`.
#[pyfunction]
fn hermite_all(n: usize, x: f64) -> Vec<f64> {
    twc::hermite_all(n, x)
}

/// Gauss–Hermite nodes and weights for `∫ f e^{−x²}`.
#[pyfunction]
fn gauss_hermite_rule(n: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let rule = twc::gauss_hermite_rule(n).map_err(err)?;
    Ok((rule.nodes, rule.weights))
}

#[pyfunction]
fn hermite_wong_value(a1: Vec<usize>, a2: Vec<usize>, point: Vec<f64>) -> PyResult<Complex64> {
    wong_value(&pair(a1, a2)?, &point).map_err(err)
}

#[pyfunction]
fn twisted_convolution(a: PyRef<'_, PyWong>, b: PyRef<'_, PyWong>) -> PyResult<PyWong> {
    twisted_convolution_coeff(&a.inner, &b.inner)
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
fn symplectic_fourier(a: PyRef<'_, PyWong>) -> PyWong {
    symplectic_fourier_coeff(&a.inner).into()
}

/// Matrix of the Weyl quantization in the Hermite basis.
#[pyfunction]
fn weyl_quantize(a: PyRef<'_, PyWong>) -> Vec<Vec<Complex64>> {
    rows_of(&quantize(&a.inner))
}

#[pyfunction]
fn weyl_symbol(d: usize, n_max: usize, op: Vec<Vec<Complex64>>) -> PyResult<PyWong> {
    symbol_of(d, n_max, &matrix_from_rows(&op)?)
        .map(Into::into)
        .map_err(err)
}

#[pyfunction]
fn weyl_product(a: PyRef<'_, PyWong>, b: PyRef<'_, PyWong>) -> PyResult<PyWong> {
    weyl_mul(&a.inner, &b.inner).map(Into::into).map_err(err)
}

#[pyfunction]
fn apply_h_sigma(a: PyRef<'_, PyWong>) -> PyWong {
    apply_h_sigma_coeff(&a.inner).into()
}

#[pyfunction]
fn apply_h_bar_sigma(a: PyRef<'_, PyWong>) -> PyWong {
    apply_h_bar_sigma_coeff(&a.inner).into()
}

/// `T_σ^n a`; raises when a coefficient leaves the f64 range.
#[pyfunction]
fn apply_t_sigma(a: PyRef<'_, PyWong>, n: u32) -> PyResult<PyWong> {
    apply_t_sigma_coeff(&a.inner, n).map(Into::into).map_err(err)
}

/// One ladder operator; `family` is `"Z1"`, `"Z1Tilde"`, `"Z2"` or
/// `"Z2Tilde"`. Returns the image and whether terms were dropped at `n_max`.
#[pyfunction]
#[pyo3(signature = (a, family, axis=0))]
fn apply_ladder(a: PyRef<'_, PyWong>, family: &str, axis: usize) -> PyResult<(PyWong, bool)> {
    let family = match family {
        "Z1" => LadderFamily::Z1,
        "Z1Tilde" => LadderFamily::Z1Tilde,
        "Z2" => LadderFamily::Z2,
        "Z2Tilde" => LadderFamily::Z2Tilde,
        other => return Err(TwcError::new_err(format!("unknown ladder family {other:?}"))),
    };
    let r = ladder(&a.inner, LadderKind::new(family, axis)).map_err(err)?;
    Ok((r.value.into(), r.truncated))
}

/// `(T_σ^n a)(0, 0)` as `(sign_re, ln|re|, sign_im, ln|im|)`.
#[pyfunction]
fn t_sigma_origin(a: PyRef<'_, PyWong>, n: u32) -> (i8, f64, i8, f64) {
    let v = origin(&a.inner, n);
    (v.re.sign, v.re.ln_abs, v.im.sign, v.im.ln_abs)
}

/// Positivity with respect to twisted convolution; a dict with `positive`,
/// `min_eigenvalue` and, when not positive, a `witness`.
#[pyfunction]
#[pyo3(signature = (a, tol=DEFAULT_PSD_TOL))]
fn is_positive_twisted<'py>(py: Python<'py>, a: PyRef<'_, PyWong>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let p = twc::is_positive_twisted(&a.inner, tol).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("positive", p.is_positive())?;
    out.set_item("min_eigenvalue", p.min_eigenvalue())?;
    match p.witness() {
        Some(w) => {
            let witness = PyDict::new(py);
            witness.set_item(
                "kind",
                serde_json::to_value(w.kind)
                    .map_err(|e| TwcError::new_err(e.to_string()))?
                    .as_str(),
            )?;
            witness.set_item("pairing", w.pairing)?;
            witness.set_item(
                "vector",
                PyHermite {
                    inner: w.vector.clone(),
                },
            )?;
            out.set_item("witness", witness)?;
        }
        None => out.set_item("witness", py.None())?,
    }
    Ok(out)
}

/// Planted positive element: returns `(matrix, generators)`.
#[pyfunction]
#[pyo3(signature = (d=1, n_max=48, rank=3, planted_s=0.5, planted_r=None, big_n_max=40, seed=0))]
fn random_positive_element(
    d: usize,
    n_max: usize,
    rank: usize,
    planted_s: f64,
    planted_r: Option<f64>,
    big_n_max: u32,
    seed: u64,
) -> PyResult<(PyWong, Vec<PyHermite>)> {
    let cfg = TheoremConfig {
        d,
        n_max,
        big_n_max,
        rank,
        planted_s,
        planted_r,
        seed,
        tolerance: DEFAULT_S_TOL,
    };
    let e = twc::random_positive_element(&cfg.planted_spec()).map_err(err)?;
    let gens = e.generators.into_iter().map(|inner| PyHermite { inner }).collect();
    Ok((e.matrix.into(), gens))
}

#[pyfunction]
fn classify_decay(py: Python<'_>, a: PyRef<'_, PyWong>) -> PyResult<Py<PyAny>> {
    let fit = serde_json::to_value(decay(&a.inner)).map_err(|e| TwcError::new_err(e.to_string()))?;
    to_py_json(py, fit)
}

/// Regularity report of `a`; `mode` is `"origin"` or `"sup"`.
#[pyfunction]
#[pyo3(signature = (a, big_n_max=40, planted_s=None, tol=DEFAULT_S_TOL, mode="origin", half_width=8.0, points=128))]
#[allow(clippy::too_many_arguments)]
fn check_regularity(
    py: Python<'_>,
    a: PyRef<'_, PyWong>,
    big_n_max: u32,
    planted_s: Option<f64>,
    tol: f64,
    mode: &str,
    half_width: f64,
    points: usize,
) -> PyResult<Py<PyAny>> {
    let mode = match mode {
        "origin" => GrowthMode::Origin,
        "sup" => GrowthMode::Sup,
        other => return Err(TwcError::new_err(format!("unknown mode {other:?}"))),
    };
    let grid = GridSpec::new(2 * a.inner.d(), half_width, points).map_err(err)?;
    let report = check_regularity_with(&a.inner, big_n_max, planted_s, tol, mode, Some(&grid)).map_err(err)?;
    to_py_json(
        py,
        serde_json::to_value(report).map_err(|e| TwcError::new_err(e.to_string()))?,
    )
}

/// Generate a planted element and check both recovered orders.
#[pyfunction]
#[pyo3(signature = (d=1, n_max=48, big_n_max=40, rank=3, planted_s=0.5, planted_r=None, seed=0, tol=DEFAULT_S_TOL))]
#[allow(clippy::too_many_arguments)]
fn verify_regularity_theorem(
    py: Python<'_>,
    d: usize,
    n_max: usize,
    big_n_max: u32,
    rank: usize,
    planted_s: f64,
    planted_r: Option<f64>,
    seed: u64,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let cfg = TheoremConfig {
        d,
        n_max,
        big_n_max,
        rank,
        planted_s,
        planted_r,
        seed,
        tolerance: tol,
    };
    let report = theorem(&cfg).map_err(err)?;
    to_py_json(
        py,
        serde_json::to_value(report).map_err(|e| TwcError::new_err(e.to_string()))?,
    )
}

#[pyfunction]
#[pyo3(signature = (symbol, big_n_max=40, planted_s=None, tol=DEFAULT_S_TOL))]
fn verify_weyl_positive(
    py: Python<'_>,
    symbol: PyRef<'_, PyWong>,
    big_n_max: u32,
    planted_s: Option<f64>,
    tol: f64,
) -> PyResult<Py<PyAny>> {
    let report = weyl_positive(&symbol.inner, big_n_max, planted_s, tol).map_err(err)?;
    to_py_json(
        py,
        serde_json::to_value(report).map_err(|e| TwcError::new_err(e.to_string()))?,
    )
}

/// Samples of a `d = 1` element on the `points × points` grid over
/// `[−half_width, half_width]²`, rows indexed by `x`, columns by `ξ`.
#[pyfunction]
#[pyo3(signature = (a, half_width=8.0, points=128))]
fn synthesize(a: PyRef<'_, PyWong>, half_width: f64, points: usize) -> PyResult<Vec<Vec<Complex64>>> {
    let spec = GridSpec::new(2 * a.inner.d(), half_width, points).map_err(err)?;
    Ok(grid_rows(&synthesize_grid(&a.inner, &spec).map_err(err)?))
}

/// Inverse of [`synthesize`] up to `n_max`.
#[pyfunction]
#[pyo3(signature = (samples, half_width, n_max, tail_tol=DEFAULT_TAIL_TOL))]
fn expand(samples: Vec<Vec<Complex64>>, half_width: f64, n_max: usize, tail_tol: f64) -> PyResult<PyWong> {
    let g = grid_from_rows(&samples, half_width)?;
    expand_grid(&g, n_max, tail_tol).map(Into::into).map_err(err)
}

/// Cross-Wigner transform of two sampled functions on `[−half_width, half_width]`.
#[pyfunction]
#[pyo3(signature = (f, g, half_width, strict=false))]
fn wigner(f: Vec<Complex64>, g: Vec<Complex64>, half_width: f64, strict: bool) -> PyResult<Vec<Vec<Complex64>>> {
    let spec = GridSpec::new(1, half_width, f.len()).map_err(err)?;
    let f = GridFunction::new(spec, f).map_err(err)?;
    let g = GridFunction::new(spec, g).map_err(err)?;
    Ok(grid_rows(&wigner_grid(&f, &g, &options(strict)).map_err(err)?))
}

#[pymodule(name = "twc")]
fn twc_python(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", twc::VERSION)?;
    m.add("TwcError", m.py().get_type::<TwcError>())?;
    m.add_class::<PyWong>()?;
    m.add_class::<PyHermite>()?;
    m.add_function(wrap_pyfunction!(hermite_eval, m)?)?;
    m.add_function(wrap_pyfunction!(hermite_all, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_hermite_rule, m)?)?;
    m.add_function(wrap_pyfunction!(hermite_wong_value, m)?)?;
    m.add_function(wrap_pyfunction!(twisted_convolution, m)?)?;
    m.add_function(wrap_pyfunction!(symplectic_fourier, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_quantize, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_product, m)?)?;
    m.add_function(wrap_pyfunction!(apply_h_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(apply_h_bar_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(apply_t_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(apply_ladder, m)?)?;
    m.add_function(wrap_pyfunction!(t_sigma_origin, m)?)?;
    m.add_function(wrap_pyfunction!(is_positive_twisted, m)?)?;
    m.add_function(wrap_pyfunction!(random_positive_element, m)?)?;
    m.add_function(wrap_pyfunction!(classify_decay, m)?)?;
    m.add_function(wrap_pyfunction!(check_regularity, m)?)?;
    m.add_function(wrap_pyfunction!(verify_regularity_theorem, m)?)?;
    m.add_function(wrap_pyfunction!(verify_weyl_positive, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(wigner, m)?)?;
    Ok(())
}
