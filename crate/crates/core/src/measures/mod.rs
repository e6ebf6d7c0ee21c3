//! Boltzmann measures `e^{−g(N)}/Z`: radial potentials, growth-condition
//! checks, a deterministic quadrature oracle and a Metropolis sampler.

pub mod conditions;
pub mod mcmc;
pub mod profile;
pub mod quadrature;

pub use conditions::{
    check_eta_unbounded, check_theorem11_conditions, check_theorem1_condition, ConditionReport,
    Witness,
};
pub use mcmc::{mcmc_sample, mcmc_sample_with, Chain, ChainSummary, MetropolisKernel, SamplerOptions, State};
pub use profile::{GProfile, RadialPotential};
pub use quadrature::BoltzmannMeasure;
