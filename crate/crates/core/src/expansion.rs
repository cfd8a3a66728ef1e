//! Truncated Hermite expansions `f = Σ c_α h_α` on `R^d`.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::codec::{decode_row, encode_row, read_header};
use crate::error::{Result, TwcError};
use crate::grid::{GridFunction, GridSpec};
use crate::hermite::{hermite_all, tensor_value};
use crate::index::{IndexSpace, MultiIndex};
use crate::quadrature::{default_node_count, gauss_hermite_rule};

#[derive(Debug, Clone, PartialEq)]
pub struct HermiteCoeffVector {
    space: IndexSpace,
    coeffs: Vec<Complex64>,
}

impl HermiteCoeffVector {
    pub fn zeros(d: usize, n_max: usize) -> Result<Self> {
        let space = IndexSpace::new(d, n_max)?;
        Ok(HermiteCoeffVector {
            coeffs: vec![Complex64::new(0.0, 0.0); space.len()],
            space,
        })
    }

    pub fn from_coeffs(d: usize, n_max: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let space = IndexSpace::new(d, n_max)?;
        if coeffs.len() != space.len() {
            return Err(TwcError::ShapeMismatch(format!(
                "{} coefficients for an index set of size {}",
                coeffs.len(),
                space.len()
            )));
        }
        Ok(HermiteCoeffVector { space, coeffs })
    }

    /// The basis vector `h_α`.
    pub fn unit(d: usize, n_max: usize, alpha: &MultiIndex) -> Result<Self> {
        let mut v = Self::zeros(d, n_max)?;
        v.set(alpha, Complex64::new(1.0, 0.0))?;
        Ok(v)
    }

    pub fn space(&self) -> IndexSpace {
        self.space
    }

    pub fn d(&self) -> usize {
        self.space.d()
    }

    pub fn n_max(&self) -> usize {
        self.space.n_max()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn get(&self, alpha: &MultiIndex) -> Option<Complex64> {
        self.space.flat(alpha).map(|i| self.coeffs[i])
    }

    pub fn set(&mut self, alpha: &MultiIndex, value: Complex64) -> Result<()> {
        let i = self
            .space
            .flat(alpha)
            .ok_or_else(|| TwcError::InvalidArgument(format!("index {alpha} outside the truncation")))?;
        self.coeffs[i] = value;
        Ok(())
    }

    /// Euclidean norm of the coefficients, equal to the L² norm of `f`.
    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨f, g⟩ = Σ c_α(f) conj(c_α(g))`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.space != other.space {
            return Err(TwcError::ShapeMismatch(
                "coefficient vectors over different index sets".into(),
            ));
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum())
    }

    /// The harmonic oscillator `H = |x|² − Δ`, acting as `c_α ↦ (2|α| + d) c_α`.
    pub fn apply_h(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.space.oscillator_eigenvalue(i))
            .collect();
        HermiteCoeffVector {
            space: self.space,
            coeffs,
        }
    }

    /// `Σ c_α h_α(x)`.
    pub fn evaluate(&self, x: &[f64]) -> Result<Complex64> {
        if x.len() != self.d() {
            return Err(TwcError::InvalidArgument(format!(
                "point of dimension {} for a d={} expansion",
                x.len(),
                self.d()
            )));
        }
        let tables: Vec<Vec<f64>> = x.iter().map(|&t| hermite_all(self.n_max(), t)).collect();
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(i, c)| c * tensor_value(&tables, self.space.multi(i).entries()))
            .sum())
    }

    /// Samples the expansion on a grid over `R^d`.
    pub fn synthesize(&self, spec: &GridSpec) -> Result<GridFunction> {
        if spec.dims != self.d() {
            return Err(TwcError::GridMismatch(format!(
                "{}-axis grid for a d={} expansion",
                spec.dims,
                self.d()
            )));
        }
        let tables: Vec<Vec<f64>> = spec.axis().iter().map(|&t| hermite_all(self.n_max(), t)).collect();
        let nonzero: Vec<(Vec<usize>, Complex64)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(i, c)| (self.space.multi(i).entries().to_vec(), *c))
            .collect();
        let values = (0..spec.len())
            .map(|flat| {
                let pos = spec.unflatten(flat);
                nonzero
                    .iter()
                    .map(|(alpha, c)| c * alpha.iter().zip(&pos).map(|(&a, &p)| tables[p][a]).product::<f64>())
                    .sum()
            })
            .collect();
        GridFunction::new(*spec, values)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(i, c)| encode_row(self.space.multi(i).entries(), *c))
            .collect();
        json!({ "d": self.d(), "n_max": self.n_max(), "coeffs": rows })
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let (d, n_max) = read_header(doc)?;
        let mut v = Self::zeros(d, n_max)?;
        let rows = doc
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| TwcError::Format("missing \"coeffs\" array".into()))?;
        for row in rows {
            let (index, value) = decode_row(row, d)?;
            let alpha = MultiIndex::new(index)?;
            v.set(&alpha, value).map_err(|e| TwcError::Format(e.to_string()))?;
        }
        Ok(v)
    }
}

/// `c_α = ⟨f, h_α⟩` by tensor Gauss–Hermite quadrature with the Gaussian
/// weight folded back in. `nodes` defaults to `4 (n_max + 1)` per axis.
pub fn project_fn<F>(d: usize, n_max: usize, f: F, nodes: Option<usize>) -> Result<HermiteCoeffVector>
where
    F: Fn(&[f64]) -> Complex64,
{
    let mut out = HermiteCoeffVector::zeros(d, n_max)?;
    let n = nodes.unwrap_or_else(|| default_node_count(n_max));
    if n < n_max + 1 {
        return Err(TwcError::Resolution {
            reason: format!("{n} quadrature nodes cannot integrate h_α h_β up to order {n_max}"),
            required: n_max + 1,
        });
    }
    let rule = gauss_hermite_rule(n)?;
    let tables: Vec<Vec<f64>> = rule.nodes.iter().map(|&x| hermite_all(n_max, x)).collect();
    let space = out.space;
    let mut point = vec![0.0; d];
    let total = n.pow(d as u32);
    for flat in 0..total {
        let mut rest = flat;
        let mut weight = 1.0;
        let mut which = [0usize; 2];
        for j in (0..d).rev() {
            let k = rest % n;
            rest /= n;
            which[j] = k;
            point[j] = rule.nodes[k];
            weight *= rule.scaled_weights[k];
        }
        let fx = f(&point) * weight;
        if fx == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let alpha = space.entries_of(i);
            let h: f64 = (0..d).map(|j| tables[which[j]][alpha[j]]).product();
            *c += fx * h;
        }
    }
    Ok(out)
}

/// `c_α = ⟨f, h_α⟩` for uniformly sampled `f`, by the trapezoid rule.
///
/// The box must contain the oscillatory region of `h_{n_max}` with margin,
/// and the spacing must resolve products `f · h_{n_max}`.
pub fn project_grid(f: &GridFunction, n_max: usize) -> Result<HermiteCoeffVector> {
    let spec = *f.spec();
    let d = spec.dims;
    let mut out = HermiteCoeffVector::zeros(d, n_max)?;
    let turning = (2.0 * n_max as f64 + 1.0).sqrt();
    let min_half_width = turning + 4.0;
    if spec.half_width < min_half_width {
        return Err(TwcError::Resolution {
            reason: format!(
                "box half width {} does not contain h_{n_max} (need {min_half_width:.2})",
                spec.half_width
            ),
            required: spec.points_per_axis,
        });
    }
    // Highest local wavenumber of f · h_{n_max} is about 2√(2n+1); keep a
    // margin for the Gaussian tails of the spectrum.
    let max_spacing = std::f64::consts::PI / (2.0 * turning + 8.0);
    if spec.spacing() > max_spacing {
        let required = (2.0 * spec.half_width / max_spacing).ceil() as usize + 1;
        return Err(TwcError::Resolution {
            reason: format!("grid spacing {:.4} cannot resolve order {n_max}", spec.spacing()),
            required,
        });
    }
    let tables: Vec<Vec<f64>> = spec.axis().iter().map(|&t| hermite_all(n_max, t)).collect();
    let space = out.space;
    let vol = spec.cell_volume();
    for (flat, value) in f.values().iter().enumerate() {
        if *value == Complex64::new(0.0, 0.0) {
            continue;
        }
        let pos = spec.unflatten(flat);
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let alpha = space.entries_of(i);
            let h: f64 = (0..d).map(|j| tables[pos[j]][alpha[j]]).product();
            *c += value * h * vol;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::hermite_eval;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn oscillator_eigenvalues() {
        let v = HermiteCoeffVector::unit(1, 5, &MultiIndex::scalar(0)).unwrap();
        assert_eq!(v.apply_h().coeffs()[0], c(1.0));
        let v = HermiteCoeffVector::unit(1, 5, &MultiIndex::scalar(3)).unwrap();
        assert_eq!(v.apply_h().coeffs()[3], c(7.0));
        let alpha = MultiIndex::new(vec![1, 2]).unwrap();
        let v = HermiteCoeffVector::unit(2, 4, &alpha).unwrap();
        assert_eq!(v.apply_h().get(&alpha).unwrap(), c(8.0));
    }

    #[test]
    fn projects_single_hermite_function() {
        let v = project_fn(1, 8, |x| c(hermite_eval(3, x[0]).unwrap()), None).unwrap();
        for (k, coeff) in v.coeffs().iter().enumerate() {
            let expected = if k == 3 { 1.0 } else { 0.0 };
            assert!((coeff - c(expected)).norm() < 1e-13, "k={k}: {coeff}");
        }
    }

    #[test]
    fn projects_linear_combination() {
        let s = 0.5f64.sqrt();
        let v = project_fn(
            1,
            6,
            |x| c(s * (hermite_eval(0, x[0]).unwrap() + hermite_eval(2, x[0]).unwrap())),
            None,
        )
        .unwrap();
        let expected = [s, 0.0, s, 0.0, 0.0, 0.0, 0.0];
        for (got, want) in v.coeffs().iter().zip(expected) {
            assert!((got - c(want)).norm() < 1e-13);
        }
    }

    #[test]
    fn too_few_nodes_is_a_resolution_error() {
        let err = project_fn(1, 10, |_| c(0.0), Some(5)).unwrap_err();
        assert!(matches!(err, TwcError::Resolution { required: 11, .. }));
    }

    #[test]
    fn grid_projection_checks_resolution() {
        let coarse = GridFunction::zeros(GridSpec::new(1, 12.0, 32).unwrap());
        match project_grid(&coarse, 20) {
            Err(TwcError::Resolution { required, .. }) => assert!(required > 32),
            other => panic!("unexpected {other:?}"),
        }
        let small_box = GridFunction::zeros(GridSpec::new(1, 3.0, 512).unwrap());
        assert!(project_grid(&small_box, 20).is_err());
    }

    #[test]
    fn grid_projection_of_hermite_function() {
        let spec = GridSpec::new(1, 12.0, 401).unwrap();
        let f = GridFunction::from_fn(spec, |x| c(hermite_eval(5, x[0]).unwrap()));
        let v = project_grid(&f, 10).unwrap();
        for (k, coeff) in v.coeffs().iter().enumerate() {
            let expected = if k == 5 { 1.0 } else { 0.0 };
            assert!((coeff - c(expected)).norm() < 1e-12, "k={k}: {coeff}");
        }
    }

    #[test]
    fn synthesize_matches_pointwise_evaluation() {
        let mut v = HermiteCoeffVector::zeros(2, 3).unwrap();
        v.coeffs_mut()[5] = Complex64::new(0.3, -0.2);
        v.coeffs_mut()[14] = c(1.1);
        let spec = GridSpec::new(2, 4.0, 17).unwrap();
        let g = v.synthesize(&spec).unwrap();
        let p = spec.axis();
        assert_relative_eq!(
            (g.values()[3 * 17 + 11] - v.evaluate(&[p[3], p[11]]).unwrap()).norm(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn json_format_and_round_trip() {
        let mut v = HermiteCoeffVector::zeros(2, 3).unwrap();
        v.set(&MultiIndex::new(vec![1, 2]).unwrap(), Complex64::new(0.5, -1.0))
            .unwrap();
        let doc = v.to_json();
        assert_eq!(doc["d"], 2);
        assert_eq!(doc["n_max"], 3);
        assert_eq!(doc["coeffs"], serde_json::json!([[1, 2, 0.5, -1.0]]));
        assert_eq!(HermiteCoeffVector::from_json(&doc).unwrap(), v);

        let bad = serde_json::json!({"d": 1, "n_max": 2, "coeffs": [[5, 1.0, 0.0]]});
        assert!(HermiteCoeffVector::from_json(&bad).is_err());
        let bad = serde_json::json!({"d": 1, "n_max": 2, "coeffs": [[1, 1.0]]});
        assert!(HermiteCoeffVector::from_json(&bad).is_err());
    }
}
