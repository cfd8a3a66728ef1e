//! Twisted convolution calculus at finite Hermite truncation.
//!
//! Phase-space functions `a` on `R^{2d}` are represented exactly by their
//! Hermite-Wong coefficients ([`WongCoeffMatrix`]); in that basis the
//! twisted convolution is matrix multiplication, the symplectic Fourier
//! transform is a diagonal sign, and the symplectic oscillators are diagonal
//! scalings. The grid transforms in `phase_space` realize the same objects by
//! quadrature and serve as independent oracles.

pub mod error;
pub mod expansion;
pub mod grid;
pub mod hermite;
pub mod index;
pub mod logdomain;
pub mod oscillators;
pub mod phase_space;
pub mod positivity;
pub mod quadrature;
pub mod regularity;
pub mod twisted;
pub mod wong;

mod codec;

pub use error::{Result, TwcError};
pub use expansion::{project_fn, project_grid, HermiteCoeffVector};
pub use grid::{GridFunction, GridOptions, GridSpec};
pub use hermite::{hermite_all, hermite_eval};
pub use index::{IndexSpace, MultiIndex, PairIndex};
pub use logdomain::SignedLog;
pub use oscillators::{LadderFamily, LadderKind};
pub use positivity::{is_positive_twisted, random_positive_element, PlantedSpec, Positivity};
pub use quadrature::{gauss_hermite_rule, QuadratureRule};
pub use regularity::{DecayFit, Flavor, GrowthMode, GrowthSequence, RegularityReport, TheoremConfig};
pub use wong::WongCoeffMatrix;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
