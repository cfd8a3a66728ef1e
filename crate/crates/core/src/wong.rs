//! Hermite-Wong coefficient matrices `a = Σ c_{α₁,α₂} ϱ_{α₁,α₂}`.
//!
//! Rows are indexed by `α₁`, columns by `α₂`, both over the same truncated
//! [`IndexSpace`]. Read as a matrix in the Hermite basis, `C` is also the
//! operator with kernel `Aa`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::codec::{decode_row, encode_row, read_header};
use crate::error::{Result, TwcError};
use crate::index::{IndexSpace, MultiIndex, PairIndex};
use crate::phase_space::hermite_wong_all;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct WongCoeffMatrix {
    space: IndexSpace,
    entries: DMatrix<Complex64>,
}

impl WongCoeffMatrix {
    pub fn zeros(d: usize, n_max: usize) -> Result<Self> {
        let space = IndexSpace::new(d, n_max)?;
        Ok(WongCoeffMatrix {
            entries: DMatrix::from_element(space.len(), space.len(), ZERO),
            space,
        })
    }

    /// Diagonal of ones: the unit of the twisted product at this truncation.
    pub fn identity(d: usize, n_max: usize) -> Result<Self> {
        let space = IndexSpace::new(d, n_max)?;
        Ok(WongCoeffMatrix {
            entries: DMatrix::identity(space.len(), space.len()),
            space,
        })
    }

    pub fn from_matrix(d: usize, n_max: usize, entries: DMatrix<Complex64>) -> Result<Self> {
        let space = IndexSpace::new(d, n_max)?;
        if entries.nrows() != space.len() || entries.ncols() != space.len() {
            return Err(TwcError::ShapeMismatch(format!(
                "{}x{} matrix for an index set of size {}",
                entries.nrows(),
                entries.ncols(),
                space.len()
            )));
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(TwcError::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(WongCoeffMatrix { space, entries })
    }

    pub(crate) fn from_parts(space: IndexSpace, entries: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(entries.nrows(), space.len());
        WongCoeffMatrix { space, entries }
    }

    /// The single basis element `ϱ_α`.
    pub fn unit(d: usize, n_max: usize, alpha: &PairIndex) -> Result<Self> {
        let mut c = Self::zeros(d, n_max)?;
        c.set(alpha, Complex64::new(1.0, 0.0))?;
        Ok(c)
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

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    fn position(&self, alpha: &PairIndex) -> Option<(usize, usize)> {
        Some((self.space.flat(&alpha.first)?, self.space.flat(&alpha.second)?))
    }

    pub fn get(&self, alpha: &PairIndex) -> Option<Complex64> {
        self.position(alpha).map(|p| self.entries[p])
    }

    pub fn set(&mut self, alpha: &PairIndex, value: Complex64) -> Result<()> {
        let p = self
            .position(alpha)
            .ok_or_else(|| TwcError::InvalidArgument(format!("index {alpha} outside the truncation")))?;
        self.entries[p] = value;
        Ok(())
    }

    /// Equal to `‖a‖_{L²}` since the `ϱ_α` are orthonormal.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ c(a) conj(c(b))`, the `L²` inner product of the represented functions.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other, "inner product")?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    /// Coefficients of the function whose operator is the adjoint of `Aa`.
    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.space, self.entries.adjoint())
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::from_parts(self.space, self.entries.map(|c| c * factor))
    }

    /// Re-truncates at a new cutoff, padding with zeros or dropping entries.
    pub fn resized(&self, n_max: usize) -> Result<Self> {
        let mut out = Self::zeros(self.d(), n_max)?;
        let keep = n_max.min(self.n_max());
        for r in 0..self.space.len() {
            let a1 = self.space.multi(r);
            if a1.max_entry() > keep {
                continue;
            }
            let rr = out.space.flat_unchecked(a1.entries());
            for c in 0..self.space.len() {
                let a2 = self.space.multi(c);
                if a2.max_entry() > keep {
                    continue;
                }
                out.entries[(rr, out.space.flat_unchecked(a2.entries()))] = self.entries[(r, c)];
            }
        }
        Ok(out)
    }

    pub fn count_nonzero(&self) -> usize {
        self.entries.iter().filter(|c| **c != ZERO).count()
    }

    /// `‖C − C*‖_F ≤ tol · ‖C‖_F`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        let diff = (&self.entries - self.entries.adjoint()).norm();
        diff <= tol * self.entries.norm()
    }

    pub(crate) fn check_same(&self, other: &Self, what: &str) -> Result<()> {
        if self.space != other.space {
            return Err(TwcError::ShapeMismatch(format!(
                "{what}: (d={}, n_max={}) vs (d={}, n_max={})",
                self.d(),
                self.n_max(),
                other.d(),
                other.n_max()
            )));
        }
        Ok(())
    }

    /// `Σ c_α ϱ_α(X)` at `X = (x_1..x_d, ξ_1..ξ_d)`.
    pub fn evaluate(&self, point: &[f64]) -> Result<Complex64> {
        let d = self.d();
        if point.len() != 2 * d {
            return Err(TwcError::InvalidArgument(format!(
                "phase-space point of length {} for d={d}",
                point.len()
            )));
        }
        let n = self.n_max();
        crate::phase_space::check_order(n)?;
        let tables: Vec<Vec<Complex64>> = (0..d).map(|j| hermite_wong_all(n, point[j], point[d + j])).collect();
        let p = n + 1;
        let mut sum = ZERO;
        for r in 0..self.space.len() {
            let a1 = self.space.entries_of(r);
            for c in 0..self.space.len() {
                let v = self.entries[(r, c)];
                if v == ZERO {
                    continue;
                }
                let a2 = self.space.entries_of(c);
                let basis: Complex64 = (0..d).map(|j| tables[j][a1[j] * p + a2[j]]).product();
                sum += v * basis;
            }
        }
        Ok(sum)
    }

    pub fn to_json(&self) -> Value {
        let mut rows = Vec::new();
        for r in 0..self.space.len() {
            let a1 = self.space.multi(r);
            for c in 0..self.space.len() {
                let v = self.entries[(r, c)];
                if v == ZERO {
                    continue;
                }
                let mut index = a1.entries().to_vec();
                index.extend_from_slice(self.space.multi(c).entries());
                rows.push(encode_row(&index, v));
            }
        }
        json!({ "d": self.d(), "n_max": self.n_max(), "entries": rows })
    }

    pub fn from_json(doc: &Value) -> Result<Self> {
        let (d, n_max) = read_header(doc)?;
        let mut c = Self::zeros(d, n_max)?;
        let rows = doc
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| TwcError::Format("missing \"entries\" array".into()))?;
        for row in rows {
            let (index, value) = decode_row(row, 2 * d)?;
            let alpha = PairIndex::new(
                MultiIndex::new(index[..d].to_vec())?,
                MultiIndex::new(index[d..].to_vec())?,
            )?;
            c.set(&alpha, value).map_err(|e| TwcError::Format(e.to_string()))?;
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_and_identity() {
        let c = WongCoeffMatrix::unit(1, 3, &PairIndex::scalar(1, 2)).unwrap();
        assert_eq!(c.count_nonzero(), 1);
        assert_eq!(c.matrix()[(1, 2)], Complex64::new(1.0, 0.0));
        assert_eq!(c.frobenius_norm(), 1.0);
        let id = WongCoeffMatrix::identity(2, 2).unwrap();
        assert_eq!(id.count_nonzero(), 9);
        assert!(WongCoeffMatrix::unit(1, 3, &PairIndex::scalar(4, 0)).is_err());
    }

    #[test]
    fn from_matrix_checks_shape() {
        let m = DMatrix::from_element(3, 4, ZERO);
        assert!(matches!(
            WongCoeffMatrix::from_matrix(1, 2, m),
            Err(TwcError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn json_round_trip_d2() {
        let mut c = WongCoeffMatrix::zeros(2, 2).unwrap();
        let alpha = PairIndex::new(
            MultiIndex::new(vec![1, 0]).unwrap(),
            MultiIndex::new(vec![2, 2]).unwrap(),
        )
        .unwrap();
        c.set(&alpha, Complex64::new(0.25, -3.0)).unwrap();
        let doc = c.to_json();
        assert_eq!(doc["entries"], json!([[1, 0, 2, 2, 0.25, -3.0]]));
        assert_eq!(WongCoeffMatrix::from_json(&doc).unwrap(), c);
        let bad = json!({"d": 1, "n_max": 1, "entries": [[0, 2, 1.0, 0.0]]});
        assert!(WongCoeffMatrix::from_json(&bad).is_err());
        assert!(WongCoeffMatrix::from_json(&json!({"d": 1, "n_max": 1})).is_err());
    }

    #[test]
    fn evaluate_ground_state_at_origin() {
        let c = WongCoeffMatrix::unit(1, 4, &PairIndex::scalar(0, 0)).unwrap();
        let v = c.evaluate(&[0.0, 0.0]).unwrap();
        assert!((v.re - (2.0 / PI).sqrt()).abs() < 1e-15);
        let c = WongCoeffMatrix::unit(
            2,
            1,
            &PairIndex::new(MultiIndex::zeros(2), MultiIndex::zeros(2)).unwrap(),
        )
        .unwrap();
        assert!((c.evaluate(&[0.0; 4]).unwrap().re - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn hermitian_check() {
        let mut c = WongCoeffMatrix::zeros(1, 1).unwrap();
        c.matrix_mut()[(0, 1)] = Complex64::new(0.0, 1.0);
        assert!(!c.is_hermitian(1e-12));
        c.matrix_mut()[(1, 0)] = Complex64::new(0.0, -1.0);
        assert!(c.is_hermitian(1e-12));
    }
}
