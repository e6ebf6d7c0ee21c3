//! Functional-inequality lab: test functions, Monte-Carlo functionals and
//! best-constant fitting.

pub mod catalog;
pub mod fields;
pub mod fit;
pub mod functionals;

pub use catalog::{run_catalog, run_functions, CatalogKind, CatalogOptions, InequalityReport, InequalityRow};
pub use fields::{apply_exterior_cutoff, radial_field, RadialShape, TestFunction};
pub use fit::{fit_constants, FitRow};
pub use functionals::{
    beta_entropy, energy, lq_mean_deviation, phi_entropy, ubound_lhs, PhiProfile,
};
