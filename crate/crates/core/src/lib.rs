//! Numerical toolkit for step-two Carnot groups.
//!
//! The crate covers the group law and dilations on `ℝⁿ × ℝᵐ`, the horizontal
//! vector fields `Xᵢ` with their sub-gradient and sub-Laplacian, the
//! homogeneous norm `N = (|x|⁴ + a|z|²)^{1/4}` with closed-form derivatives,
//! Boltzmann measures `e^{-g(N)}/Z`, and Monte-Carlo estimators for
//! U-bound, q-Poincaré and φ-entropy (Log^β-Sobolev) functionals.
//!
//! Modules map onto the layers of the computation:
//!
//! * [`group`]: groups, points, group law, dilations, quasi-distance.
//! * [`scalar`] / [`hcalculus`]: forward-mode AD and the horizontal calculus.
//! * [`norm`]: the homogeneous norm and its gradient/Laplacian geometry.
//! * [`measures`]: radial potentials, growth-condition checks, quadrature and MCMC.
//! * [`lab`]: functionals, test-function catalogs and constant fitting.
//! * [`nogo`]: the bump-function family where Log^β-Sobolev fails.

pub mod error;
pub mod group;
pub mod hcalculus;
pub mod lab;
pub mod measures;
pub mod nogo;
pub mod norm;
pub mod scalar;
pub mod stats;

mod par;

pub use error::{Error, Result};
pub use group::{CarnotGroup, GroupDef, HTypeFlags, Point};
pub use hcalculus::{DiffMode, ScalarField};
pub use measures::{BoltzmannMeasure, Chain, GProfile};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
