//! Gauss–Hermite quadrature for `∫ p(x) e^{-x²} dx`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TwcError};
use crate::hermite::hermite_pair_scaled;

pub const MAX_NODES: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    /// Weights against `e^{-x²}`. For very large rules the outermost weights
    /// fall below the `f64` range and flush to zero; use `scaled_weights`.
    pub weights: Vec<f64>,
    /// `weights[i] · e^{nodes[i]²}`, the weights for integrating an
    /// unweighted integrand (e.g. a product of Hermite functions).
    pub scaled_weights: Vec<f64>,
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ f(x) e^{-x²} dx`.
    pub fn integrate_weighted<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `∫ f(x) dx` for integrands that decay like `e^{-x²}` times a polynomial.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// The `n`-point Gauss–Hermite rule, exact for polynomials of degree `2n − 1`.
pub fn gauss_hermite_rule(n: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_NODES).contains(&n) {
        return Err(TwcError::InvalidArgument(format!(
            "Gauss-Hermite node count {n} outside 1..={MAX_NODES}"
        )));
    }
    if n == 1 {
        let w = std::f64::consts::PI.sqrt();
        return Ok(QuadratureRule {
            nodes: vec![0.0],
            weights: vec![w],
            scaled_weights: vec![w],
            exact_degree: 1,
        });
    }

    // Golub–Welsch: eigenvalues of the Jacobi matrix give starting nodes.
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);

    // Newton polish on h_n, using h_n' = √(2n) h_{n−1} − x h_n.
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (hn, hm1, _) = hermite_pair_scaled(n, *x);
            let deriv = (2.0 * n as f64).sqrt() * hm1 - *x * hn;
            let step = hn / deriv;
            *x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
    }
    for i in 0..n / 2 {
        let m = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -m;
        nodes[n - 1 - i] = m;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    // w_i e^{x_i²} = 1 / (n h_{n−1}(x_i)²)
    let mut scaled_weights = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x in &nodes {
        let (_, hm1, ln_scale) = hermite_pair_scaled(n, x);
        let ln_scaled = -(n as f64).ln() - 2.0 * (hm1.abs().ln() + ln_scale);
        scaled_weights.push(ln_scaled.exp());
        weights.push((ln_scaled - x * x).exp());
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        scaled_weights,
        exact_degree: 2 * n - 1,
    })
}

/// Default node count for projecting onto Hermite functions up to `n_max`.
pub fn default_node_count(n_max: usize) -> usize {
    (4 * (n_max + 1)).min(MAX_NODES)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn one_and_two_point_rules() {
        let r1 = gauss_hermite_rule(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert_relative_eq!(r1.weights[0], PI.sqrt(), max_relative = 1e-15);

        let r2 = gauss_hermite_rule(2).unwrap();
        let s = 0.5f64.sqrt();
        assert_relative_eq!(r2.nodes[0], -s, max_relative = 1e-15);
        assert_relative_eq!(r2.nodes[1], s, max_relative = 1e-15);
        for w in &r2.weights {
            assert_relative_eq!(*w, PI.sqrt() / 2.0, max_relative = 1e-14);
        }
        assert_eq!(r2.exact_degree, 3);
    }

    #[test]
    fn out_of_range_counts() {
        assert!(gauss_hermite_rule(0).is_err());
        assert!(gauss_hermite_rule(513).is_err());
    }

    #[test]
    fn zeroth_moment_for_many_sizes() {
        for n in [3, 7, 16, 33, 64, 128, 200, 333, 512] {
            let r = gauss_hermite_rule(n).unwrap();
            let total: f64 = r.weights.iter().sum();
            assert!((total - PI.sqrt()).abs() < 1e-12, "n={n}: {total}");
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]), "n={n}");
            assert!(r.scaled_weights.iter().all(|w| *w > 0.0), "n={n}");
        }
    }

    #[test]
    fn raw_weights_positive_while_representable() {
        for n in [10, 100, 256] {
            let r = gauss_hermite_rule(n).unwrap();
            assert!(r.weights.iter().all(|w| *w > 0.0), "n={n}");
        }
    }

    #[test]
    fn monomial_moments_are_exact() {
        // ∫ x^{2m} e^{-x²} dx = Γ(m + 1/2)
        let r = gauss_hermite_rule(12).unwrap();
        let mut gamma_half = PI.sqrt();
        for m in 0..12 {
            let got = r.integrate_weighted(|x| x.powi(2 * m));
            assert_relative_eq!(got, gamma_half, max_relative = 1e-12);
            let odd = r.integrate_weighted(|x| x.powi(2 * m + 1));
            assert!(odd.abs() < 1e-12 * gamma_half);
            gamma_half *= m as f64 + 0.5;
        }
    }
}
