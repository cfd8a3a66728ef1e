//! Positivity of twisted elements and random positive generators.
//!
//! `a` is positive semi-definite for the twisted convolution exactly when
//! the operator `Aa` is, i.e. when its coefficient matrix is Hermitian PSD.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwcError};
use crate::expansion::HermiteCoeffVector;
use crate::index::IndexSpace;
use crate::regularity::Flavor;
use crate::twisted::twisted_convolution_coeff;
use crate::wong::WongCoeffMatrix;

/// Relative to the spectral norm.
pub const DEFAULT_PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    NegativeEigenvalue,
    NotHermitian,
}

/// A test function `ψ` with `(a *_σ ψ, ψ)` negative or non-real.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub kind: WitnessKind,
    /// Unit eigenvector `v` (of the Hermitian or skew part of `C`).
    pub vector: HermiteCoeffVector,
    /// `ψ = Σ_γ v_γ ϱ_{γ,0}`, for which `(a *_σ ψ, ψ) = v* C v`.
    pub probe: WongCoeffMatrix,
    /// `(a *_σ ψ, ψ)` computed in coefficient space.
    pub pairing: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Positivity {
    Positive {
        min_eigenvalue: f64,
        spectral_norm: f64,
    },
    NotPositive {
        min_eigenvalue: f64,
        spectral_norm: f64,
        witness: Box<Witness>,
    },
}

impl Positivity {
    pub fn is_positive(&self) -> bool {
        matches!(self, Positivity::Positive { .. })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            Positivity::Positive { min_eigenvalue, .. } | Positivity::NotPositive { min_eigenvalue, .. } => {
                *min_eigenvalue
            }
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Positivity::NotPositive { witness, .. } => Some(witness),
            Positivity::Positive { .. } => None,
        }
    }
}

fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

fn make_witness(c: &WongCoeffMatrix, kind: WitnessKind, v: DVector<Complex64>) -> Result<Witness> {
    let space = c.space();
    let vector = HermiteCoeffVector::from_coeffs(space.d(), space.n_max(), v.iter().copied().collect())?;
    let mut probe = WongCoeffMatrix::zeros(space.d(), space.n_max())?;
    probe.matrix_mut().set_column(0, &v);
    let pairing = twisted_convolution_coeff(c, &probe)?.inner(&probe)?;
    Ok(Witness {
        kind,
        vector,
        probe,
        pairing,
    })
}

/// Checks Hermitian symmetry and `λ_min ≥ −tol ‖C‖₂`.
pub fn is_positive_twisted(c: &WongCoeffMatrix, tol: f64) -> Result<Positivity> {
    if tol.is_nan() || tol < 0.0 {
        return Err(TwcError::InvalidArgument(format!("tolerance {tol}")));
    }
    let m = c.matrix();
    let norm = spectral_norm(m);
    if norm == 0.0 {
        return Ok(Positivity::Positive {
            min_eigenvalue: 0.0,
            spectral_norm: 0.0,
        });
    }
    let half = Complex64::new(0.5, 0.0);
    let hermitian = (m + m.adjoint()) * half;
    let eig = SymmetricEigen::new(hermitian);
    let (imin, &min_eigenvalue) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty index set");

    // skew part K = (C − C*)/(2i) is Hermitian; v* C v = v* H v + i v* K v
    let skew = (m - m.adjoint()) * Complex64::new(0.0, -0.5);
    if spectral_norm(&skew) > tol * norm {
        let keig = SymmetricEigen::new(skew);
        let (imax, _) = keig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("non-empty index set");
        let witness = make_witness(
            c,
            WitnessKind::NotHermitian,
            keig.eigenvectors.column(imax).into_owned(),
        )?;
        return Ok(Positivity::NotPositive {
            min_eigenvalue,
            spectral_norm: norm,
            witness: Box::new(witness),
        });
    }
    if min_eigenvalue < -tol * norm {
        let witness = make_witness(
            c,
            WitnessKind::NegativeEigenvalue,
            eig.eigenvectors.column(imin).into_owned(),
        )?;
        return Ok(Positivity::NotPositive {
            min_eigenvalue,
            spectral_norm: norm,
            witness: Box::new(witness),
        });
    }
    Ok(Positivity::Positive {
        min_eigenvalue,
        spectral_norm: norm,
    })
}

/// `Σ_k A^{-1}(f_k ⊗ conj(f_k))`, i.e. `C = Σ_k v_k v_k*`.
pub fn gram(vectors: &[HermiteCoeffVector]) -> Result<WongCoeffMatrix> {
    let first = vectors
        .first()
        .ok_or_else(|| TwcError::InvalidArgument("empty generator list".into()))?;
    let space = first.space();
    let n = space.len();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for v in vectors {
        if v.space() != space {
            return Err(TwcError::ShapeMismatch("generators over different index sets".into()));
        }
        let col = DVector::from_column_slice(v.coeffs());
        m += &col * col.adjoint();
    }
    WongCoeffMatrix::from_matrix(space.d(), space.n_max(), m)
}

/// Parameters of a planted positive element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub d: usize,
    pub n_max: usize,
    pub rank: usize,
    pub planted_s: f64,
    pub planted_r: f64,
    pub flavor: Flavor,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveElement {
    pub matrix: WongCoeffMatrix,
    pub generators: Vec<HermiteCoeffVector>,
}

/// Envelope `|c_α(f)|` of the planted generators, `k = |α|`.
///
/// Roumieu: `e^{−r k^{1/(2s)}}`. Beurling: the exponent carries an extra
/// `1 + ln(1 + k)`, so the decay beats `e^{−r' k^{1/(2s)}}` for every `r'`.
pub fn planted_envelope(k: usize, planted_s: f64, planted_r: f64, flavor: Flavor) -> f64 {
    let base = planted_r * (k as f64).powf(1.0 / (2.0 * planted_s));
    match flavor {
        Flavor::Beurling => (-base * (1.0 + (k as f64).ln_1p())).exp(),
        _ => (-base).exp(),
    }
}

/// Rate that puts the dominant level of `(T_σ^{N_max} a)(0,0)` at
/// `n_max / 3`, so the growth fit sees the asymptotic regime without
/// running into the truncation.
pub fn default_planted_rate(planted_s: f64, n_max: usize, big_n_max: u32) -> f64 {
    let k_target = (n_max as f64 / 3.0).max(1.0);
    2.0 * planted_s * big_n_max as f64 / k_target.powf(1.0 / (2.0 * planted_s))
}

/// Draws `rank` generators with envelope [`planted_envelope`] and uniform
/// random phases (ChaCha8 seeded by `seed`) and returns their Gram matrix.
pub fn random_positive_element(spec: &PlantedSpec) -> Result<PositiveElement> {
    if spec.rank == 0 {
        return Err(TwcError::InvalidArgument("rank must be at least 1".into()));
    }
    let positive = |v: f64| v > 0.0 && v.is_finite();
    if !positive(spec.planted_s) || !positive(spec.planted_r) {
        return Err(TwcError::InvalidArgument(format!(
            "planted_s={} and planted_r={} must be positive",
            spec.planted_s, spec.planted_r
        )));
    }
    let space = IndexSpace::new(spec.d, spec.n_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut generators = Vec::with_capacity(spec.rank);
    for _ in 0..spec.rank {
        let coeffs = (0..space.len())
            .map(|i| {
                let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let mag = planted_envelope(space.order_of(i), spec.planted_s, spec.planted_r, spec.flavor);
                Complex64::from_polar(mag, phase)
            })
            .collect();
        generators.push(HermiteCoeffVector::from_coeffs(spec.d, spec.n_max, coeffs)?);
    }
    Ok(PositiveElement {
        matrix: gram(&generators)?,
        generators,
    })
}
