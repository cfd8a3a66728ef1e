//! Multi-index bookkeeping for tensor Hermite bases.
//!
//! Indices live in the hyper-rectangle `{α : α_j ≤ n_max}` and are laid out
//! row-major (first coordinate slowest), so a `d = 1` space is simply
//! `0..=n_max`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TwcError};

/// Largest total order for which `|α|` bookkeeping is guaranteed.
pub const MAX_TOTAL_ORDER: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(TwcError::InvalidArgument("multi-index of dimension 0".into()));
        }
        if entries.iter().sum::<usize>() > MAX_TOTAL_ORDER * entries.len() {
            return Err(TwcError::InvalidArgument(format!(
                "multi-index {entries:?} exceeds the supported order"
            )));
        }
        Ok(MultiIndex(entries))
    }

    /// Convenience for the one-dimensional case.
    pub fn scalar(k: usize) -> Self {
        MultiIndex(vec![k])
    }

    pub fn zeros(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α| = α_1 + … + α_d`.
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn max_entry(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `ln α! = Σ ln α_j!`.
    pub fn ln_factorial(&self) -> f64 {
        self.0.iter().map(|&a| crate::logdomain::ln_factorial(a)).sum()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<usize> for MultiIndex {
    fn from(k: usize) -> Self {
        MultiIndex::scalar(k)
    }
}

/// A Hermite-Wong label `(α₁, α₂)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairIndex {
    pub first: MultiIndex,
    pub second: MultiIndex,
}

impl PairIndex {
    pub fn new(first: MultiIndex, second: MultiIndex) -> Result<Self> {
        if first.dim() != second.dim() {
            return Err(TwcError::InvalidArgument(format!(
                "pair index components have dimensions {} and {}",
                first.dim(),
                second.dim()
            )));
        }
        Ok(PairIndex { first, second })
    }

    pub fn scalar(a1: usize, a2: usize) -> Self {
        PairIndex {
            first: MultiIndex::scalar(a1),
            second: MultiIndex::scalar(a2),
        }
    }

    pub fn dim(&self) -> usize {
        self.first.dim()
    }

    /// `|α| = |α₁| + |α₂|` as a multi-index on `N^{2d}`.
    pub fn order(&self) -> usize {
        self.first.order() + self.second.order()
    }
}

impl fmt::Display for PairIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

/// The truncated index set `{α ∈ N^d : α_j ≤ n_max}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexSpace {
    d: usize,
    n_max: usize,
}

impl IndexSpace {
    pub fn new(d: usize, n_max: usize) -> Result<Self> {
        if !(1..=2).contains(&d) {
            return Err(TwcError::UnsupportedDimension(d, ""));
        }
        if n_max > MAX_TOTAL_ORDER / d {
            return Err(TwcError::InvalidArgument(format!("n_max={n_max} too large")));
        }
        Ok(IndexSpace { d, n_max })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn per_axis(&self) -> usize {
        self.n_max + 1
    }

    pub fn len(&self) -> usize {
        self.per_axis().pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, alpha: &MultiIndex) -> bool {
        alpha.dim() == self.d && alpha.max_entry() <= self.n_max
    }

    pub fn flat(&self, alpha: &MultiIndex) -> Option<usize> {
        if !self.contains(alpha) {
            return None;
        }
        Some(self.flat_unchecked(alpha.entries()))
    }

    pub(crate) fn flat_unchecked(&self, entries: &[usize]) -> usize {
        entries.iter().fold(0, |acc, &a| acc * self.per_axis() + a)
    }

    pub fn multi(&self, mut flat: usize) -> MultiIndex {
        let mut entries = vec![0; self.d];
        for slot in entries.iter_mut().rev() {
            *slot = flat % self.per_axis();
            flat /= self.per_axis();
        }
        MultiIndex(entries)
    }

    /// `|α|` for the flat position `flat`, without allocating.
    pub fn order_of(&self, mut flat: usize) -> usize {
        let mut total = 0;
        for _ in 0..self.d {
            total += flat % self.per_axis();
            flat /= self.per_axis();
        }
        total
    }

    /// Per-coordinate entries of the flat position, without allocating for `d ≤ 2`.
    pub(crate) fn entries_of(&self, flat: usize) -> [usize; 2] {
        let p = self.per_axis();
        match self.d {
            1 => [flat, 0],
            _ => [flat / p, flat % p],
        }
    }

    /// Flat position of `α ± e_j`, if it stays inside the space.
    pub(crate) fn shifted(&self, flat: usize, axis: usize, up: bool) -> Option<usize> {
        let stride = self.per_axis().pow((self.d - 1 - axis) as u32);
        let coord = (flat / stride) % self.per_axis();
        if up {
            (coord < self.n_max).then(|| flat + stride)
        } else {
            (coord > 0).then(|| flat - stride)
        }
    }

    pub(crate) fn coord(&self, flat: usize, axis: usize) -> usize {
        let stride = self.per_axis().pow((self.d - 1 - axis) as u32);
        (flat / stride) % self.per_axis()
    }

    pub fn iter(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..self.len()).map(move |i| self.multi(i))
    }

    /// Eigenvalue `2|α| + d` of the harmonic oscillator at position `flat`.
    pub fn oscillator_eigenvalue(&self, flat: usize) -> f64 {
        (2 * self.order_of(flat) + self.d) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_round_trip_d2() {
        let space = IndexSpace::new(2, 5).unwrap();
        assert_eq!(space.len(), 36);
        for i in 0..space.len() {
            let alpha = space.multi(i);
            assert_eq!(space.flat(&alpha), Some(i));
            assert_eq!(space.order_of(i), alpha.order());
        }
        let alpha = MultiIndex::new(vec![1, 2]).unwrap();
        assert_eq!(space.flat(&alpha), Some(8));
        assert_eq!(space.oscillator_eigenvalue(8), 8.0);
    }

    #[test]
    fn shifts_respect_cutoff() {
        let space = IndexSpace::new(2, 3).unwrap();
        let i = space.flat(&MultiIndex::new(vec![3, 0]).unwrap()).unwrap();
        assert_eq!(space.shifted(i, 0, true), None);
        assert_eq!(space.shifted(i, 1, false), None);
        let up = space.shifted(i, 1, true).unwrap();
        assert_eq!(space.multi(up).entries(), &[3, 1]);
        let down = space.shifted(i, 0, false).unwrap();
        assert_eq!(space.multi(down).entries(), &[2, 0]);
    }

    #[test]
    fn rejects_unsupported_dimension() {
        assert!(matches!(
            IndexSpace::new(3, 4),
            Err(TwcError::UnsupportedDimension(3, _))
        ));
        assert!(IndexSpace::new(0, 4).is_err());
    }

    #[test]
    fn pair_index_dimension_check() {
        let a = MultiIndex::new(vec![1, 0]).unwrap();
        let b = MultiIndex::scalar(2);
        assert!(PairIndex::new(a, b).is_err());
        assert_eq!(PairIndex::scalar(1, 2).to_string(), "((1),(2))");
    }
}
