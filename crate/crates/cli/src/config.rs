//! Experiment configuration. Every block rejects unknown keys.

use carnot_core::nogo::NoGoParams;
use carnot_core::{CarnotGroup, Error, GProfile, GroupDef, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub group: GroupSpec,
    #[serde(default)]
    pub profile: Option<GProfile>,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Seeds norm sampling, random test functions, the bootstrap and the no-go driver.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub sampler: SamplerConfig,
    #[serde(default = "default_resolution")]
    pub quad_resolution: usize,
    #[serde(default)]
    pub norm_constants: NormConstantsConfig,
    #[serde(default)]
    pub catalog: CatalogConfig,
    #[serde(default)]
    pub nogo: Option<NoGoConfig>,
}

fn default_q() -> f64 {
    2.0
}
fn default_beta() -> f64 {
    1.0
}
fn default_resolution() -> usize {
    carnot_core::measures::quadrature::DEFAULT_RESOLUTION
}

/// A named preset or an inline `{n, m, lambdas, a}` definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Preset(Preset),
    Inline(GroupDef),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum Preset {
    Heisenberg {
        #[serde(default = "one")]
        d: usize,
        #[serde(default)]
        a: Option<f64>,
    },
    Random {
        n: usize,
        m: usize,
        #[serde(default = "sixteen")]
        a: f64,
        seed: u64,
    },
}

fn one() -> usize {
    1
}
fn sixteen() -> f64 {
    16.0
}

impl GroupSpec {
    /// The raw definition, before validation.
    pub fn definition(&self) -> Result<GroupDef> {
        match self {
            GroupSpec::Inline(def) => Ok(def.clone()),
            GroupSpec::Preset(Preset::Heisenberg { d, a }) => {
                let g = CarnotGroup::heisenberg(*d)?;
                Ok(match a {
                    Some(a) => g.with_a(*a)?,
                    None => g,
                }
                .to_def())
            }
            GroupSpec::Preset(Preset::Random { n, m, a, seed }) => {
                Ok(CarnotGroup::random(*n, *m, *a, *seed)?.to_def())
            }
        }
    }

    pub fn build(&self) -> Result<CarnotGroup> {
        CarnotGroup::from_def(&self.definition()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    /// Falls back to the top-level seed.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_step0")]
    pub step0: f64,
    #[serde(default)]
    pub isotropic: bool,
}

fn default_count() -> usize {
    100_000
}
fn default_step0() -> f64 {
    1.0
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            count: default_count(),
            seed: None,
            step0: default_step0(),
            isotropic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConstantsConfig {
    #[serde(default = "default_count")]
    pub samples: usize,
    #[serde(default = "default_radius_range")]
    pub radius_range: (f64, f64),
}

fn default_radius_range() -> (f64, f64) {
    (0.1, 10.0)
}

impl Default for NormConstantsConfig {
    fn default() -> Self {
        NormConstantsConfig {
            samples: default_count(),
            radius_range: default_radius_range(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogConfig {
    #[serde(default = "default_resamples")]
    pub resamples: usize,
}

fn default_resamples() -> usize {
    carnot_core::lab::catalog::DEFAULT_RESAMPLES
}

impl Default for CatalogConfig {
    fn default() -> Self {
        CatalogConfig {
            resamples: default_resamples(),
        }
    }
}

/// `e^{−αN^p}` bump experiment. `q` and `beta` fall back to the top level;
/// `t_grid` may be given explicitly or as a geometric `t_range` with `t_points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoGoConfig {
    pub p: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default = "default_t_range")]
    pub t_range: (f64, f64),
    #[serde(default = "default_t_points")]
    pub t_points: usize,
    /// Defaults to the first unit vector of the center.
    #[serde(default)]
    pub z0: Option<Vec<f64>>,
    #[serde(default = "default_support")]
    pub support_factor: f64,
    #[serde(default = "default_nogo_samples")]
    pub samples: usize,
}

fn default_alpha() -> f64 {
    1.0
}
fn default_t_range() -> (f64, f64) {
    (4.0, 32.0)
}
fn default_t_points() -> usize {
    8
}
fn default_support() -> f64 {
    2.0
}
fn default_nogo_samples() -> usize {
    200_000
}

impl NoGoConfig {
    pub fn params(&self, g: &CarnotGroup, q: f64, beta: f64) -> Result<NoGoParams> {
        let q = self.q.unwrap_or(q);
        let beta = self.beta.unwrap_or(beta);
        if self.t_points < 2 {
            return Err(Error::InvalidParameter("t_points must be ≥ 2".into()));
        }
        let mut params = NoGoParams::new(g, self.p, self.alpha, q, beta, self.t_range, self.t_points);
        if let Some(grid) = &self.t_grid {
            params.t_grid = grid.clone();
        }
        if let Some(z0) = &self.z0 {
            params.z0 = z0.clone();
        }
        params.support_factor = self.support_factor;
        params.validate(g)?;
        Ok(params)
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Applies `--seed` and `--samples` for `command`.
    pub fn apply_overrides(&mut self, command: &str, seed: Option<u64>, samples: Option<usize>) {
        if let Some(s) = seed {
            self.seed = s;
            self.sampler.seed = Some(s);
        }
        if let Some(n) = samples {
            match command {
                "norm-constants" => self.norm_constants.samples = n,
                "nogo" => {
                    if let Some(ng) = self.nogo.as_mut() {
                        ng.samples = n;
                    }
                }
                _ => self.sampler.count = n,
            }
        }
    }

    pub fn sampler_seed(&self) -> u64 {
        self.sampler.seed.unwrap_or(self.seed)
    }

    pub fn profile(&self) -> Result<GProfile> {
        let p = self
            .profile
            .ok_or_else(|| Error::InvalidParameter("this command needs a `profile` block".into()))?;
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::parse(r#"{"group": {"preset": "heisenberg"}}"#).unwrap();
        assert_eq!(c.q, 2.0);
        assert_eq!(c.sampler.count, 100_000);
        assert_eq!(c.group.build().unwrap(), CarnotGroup::heisenberg(1).unwrap());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::parse(r#"{"group": {"preset": "heisenberg"}, "qq": 2}"#).is_err());
        assert!(ExperimentConfig::parse(r#"{"group": {"preset": "heisenberg", "x": 1}}"#).is_err());
        assert!(
            ExperimentConfig::parse(r#"{"group": {"preset": "heisenberg"}, "sampler": {"cnt": 1}}"#).is_err()
        );
    }

    #[test]
    fn inline_group_and_overrides() {
        let mut c = ExperimentConfig::parse(
            r#"{"group": {"n": 2, "m": 1, "lambdas": [[[0, 1], [-1, 0]]], "a": 16}, "seed": 3}"#,
        )
        .unwrap();
        assert_eq!(c.group.build().unwrap(), CarnotGroup::heisenberg(1).unwrap());
        assert_eq!(c.sampler_seed(), 3);
        c.apply_overrides("poincare", Some(9), Some(20_000));
        assert_eq!((c.seed, c.sampler_seed(), c.sampler.count), (9, 9, 20_000));
    }
}
