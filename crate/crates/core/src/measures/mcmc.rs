//! Random-walk Metropolis for `e^{−g(N)}`.
//!
//! Proposals move `x` by `σ·ξ` and `z` by `σ²/√a·ζ` (ξ, ζ standard normal),
//! which matches the dilation `δ_σ` so acceptance behaves the same at every
//! scale. `σ` is tuned by Robbins–Monro during burn-in and then frozen.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::profile::RadialPotential;
use super::quadrature::BoltzmannMeasure;
use crate::error::{Error, Result};
use crate::group::Point;
use crate::norm::norm_coords;
use crate::stats;

pub const MIN_COUNT: usize = 10_000;
const TARGET_ACCEPTANCE: f64 = 0.3;
const ACCEPTANCE_BOUNDS: (f64, f64) = (0.1, 0.6);

/// Frozen Metropolis transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetropolisKernel {
    pub step: f64,
    /// When set, `z` moves with the same scale as `x`.
    pub isotropic: bool,
}

/// Current position together with its cached `g(N)`.
#[derive(Debug, Clone)]
pub struct State {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub energy: f64,
}

impl State {
    pub fn new(measure: &BoltzmannMeasure, p: &Point) -> Self {
        State {
            x: p.x.clone(),
            z: p.z.clone(),
            energy: measure.profile.g(norm_coords(measure.group.a(), &p.x, &p.z)),
        }
    }
}

impl MetropolisKernel {
    fn z_step(&self, a: f64) -> f64 {
        if self.isotropic {
            self.step
        } else {
            self.step * self.step / a.sqrt()
        }
    }

    /// One transition; returns whether the proposal was accepted.
    /// `scratch` holds the proposal and is swapped in on acceptance.
    pub fn step<R: Rng + ?Sized>(
        &self,
        measure: &BoltzmannMeasure,
        rng: &mut R,
        state: &mut State,
        scratch: &mut State,
    ) -> bool {
        let zs = self.z_step(measure.group.a());
        scratch.x.clear();
        scratch.z.clear();
        for v in &state.x {
            scratch.x.push(v + self.step * rng.sample::<f64, _>(StandardNormal));
        }
        for v in &state.z {
            scratch.z.push(v + zs * rng.sample::<f64, _>(StandardNormal));
        }
        scratch.energy = measure.profile.g(norm_coords(measure.group.a(), &scratch.x, &scratch.z));
        let log_alpha = state.energy - scratch.energy;
        let accept = log_alpha >= 0.0 || rng.random::<f64>().ln() < log_alpha;
        if accept {
            std::mem::swap(state, scratch);
        }
        accept
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerOptions {
    pub count: usize,
    pub seed: u64,
    pub step0: f64,
    #[serde(default)]
    pub isotropic: bool,
}

/// An immutable Markov chain, stored flat as `count × (n + m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    n: usize,
    m: usize,
    data: Vec<f64>,
    norms: Vec<f64>,
    pub acceptance_rate: f64,
    /// Effective sample size of the `N(p)` series.
    pub ess: f64,
    pub seed: u64,
    pub burn_in: usize,
    /// Frozen proposal scale `σ`.
    pub step: f64,
}

/// Scalar summary of a chain for reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub len: usize,
    pub acceptance_rate: f64,
    pub ess: f64,
    pub seed: u64,
    pub burn_in: usize,
    pub step: f64,
}

impl Chain {
    /// Builds a chain from explicit points (e.g. exact samples); `ess` is
    /// computed from the norms.
    pub fn from_points(measure: &BoltzmannMeasure, points: &[Point], seed: u64) -> Self {
        let (n, m) = (measure.group.n(), measure.group.m());
        let mut data = Vec::with_capacity(points.len() * (n + m));
        let mut norms = Vec::with_capacity(points.len());
        for p in points {
            data.extend_from_slice(&p.x);
            data.extend_from_slice(&p.z);
            norms.push(norm_coords(measure.group.a(), &p.x, &p.z));
        }
        let ess = stats::ess(&norms);
        Chain {
            n,
            m,
            data,
            norms,
            acceptance_rate: 1.0,
            ess,
            seed,
            burn_in: 0,
            step: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }
    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }
    pub fn x(&self, i: usize) -> &[f64] {
        let w = self.n + self.m;
        &self.data[i * w..i * w + self.n]
    }
    pub fn z(&self, i: usize) -> &[f64] {
        let w = self.n + self.m;
        &self.data[i * w + self.n..(i + 1) * w]
    }
    pub fn point(&self, i: usize) -> Point {
        Point::new(self.x(i).to_vec(), self.z(i).to_vec())
    }
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }
    /// `N(p)` for every retained point.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn summary(&self) -> ChainSummary {
        ChainSummary {
            len: self.len(),
            acceptance_rate: self.acceptance_rate,
            ess: self.ess,
            seed: self.seed,
            burn_in: self.burn_in,
            step: self.step,
        }
    }

    /// Sample mean and Monte-Carlo standard error of `h` along the chain.
    pub fn mean_and_se<H: Fn(&[f64], &[f64]) -> f64>(&self, h: H) -> (f64, f64) {
        let vals: Vec<f64> = (0..self.len()).map(|i| h(self.x(i), self.z(i))).collect();
        (stats::mean(&vals), stats::mcse(&vals))
    }

    /// CSV with header `idx,x1..xn,z1..zm`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut header = vec!["idx".to_string()];
        header.extend((1..=self.n).map(|i| format!("x{i}")));
        header.extend((1..=self.m).map(|k| format!("z{k}")));
        writeln!(w, "{}", header.join(","))?;
        let width = self.n + self.m;
        for i in 0..self.len() {
            write!(w, "{i}")?;
            for v in &self.data[i * width..(i + 1) * width] {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Random-walk Metropolis with the default (dilation-matched) proposal.
pub fn mcmc_sample(measure: &BoltzmannMeasure, count: usize, seed: u64, step0: f64) -> Result<Chain> {
    mcmc_sample_with(
        measure,
        &SamplerOptions {
            count,
            seed,
            step0,
            isotropic: false,
        },
    )
}

pub fn mcmc_sample_with(measure: &BoltzmannMeasure, opts: &SamplerOptions) -> Result<Chain> {
    if opts.count < MIN_COUNT {
        return Err(Error::InvalidParameter(format!(
            "sampler count {} below the minimum {MIN_COUNT}",
            opts.count
        )));
    }
    if !(opts.step0 > 0.0 && opts.step0.is_finite()) {
        return Err(Error::InvalidParameter(format!("step0 = {} must be > 0", opts.step0)));
    }
    let (n, m) = (measure.group.n(), measure.group.m());
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let origin = Point::origin(n, m);
    let mut state = State::new(measure, &origin);
    let mut scratch = state.clone();
    let mut kernel = MetropolisKernel {
        step: opts.step0,
        isotropic: opts.isotropic,
    };

    let burn_in = opts.count / 5;
    let mut log_step = opts.step0.ln();
    for it in 0..burn_in {
        let acc = kernel.step(measure, &mut rng, &mut state, &mut scratch);
        let gain = 1.0 / (1.0 + it as f64 / 10.0).powf(0.6);
        log_step += gain * (f64::from(u8::from(acc)) - TARGET_ACCEPTANCE);
        log_step = log_step.clamp(-30.0, 30.0);
        kernel.step = log_step.exp();
    }

    let width = n + m;
    let mut data = Vec::with_capacity(opts.count * width);
    let mut norms = Vec::with_capacity(opts.count);
    let mut accepted = 0usize;
    for _ in 0..opts.count {
        if kernel.step(measure, &mut rng, &mut state, &mut scratch) {
            accepted += 1;
        }
        data.extend_from_slice(&state.x);
        data.extend_from_slice(&state.z);
        norms.push(norm_coords(measure.group.a(), &state.x, &state.z));
    }
    let acceptance_rate = accepted as f64 / opts.count as f64;
    if !(ACCEPTANCE_BOUNDS.0..=ACCEPTANCE_BOUNDS.1).contains(&acceptance_rate) {
        return Err(Error::AdaptationFailed {
            acceptance: acceptance_rate,
        });
    }
    let ess = stats::ess(&norms);
    Ok(Chain {
        n,
        m,
        data,
        norms,
        acceptance_rate,
        ess,
        seed: opts.seed,
        burn_in,
        step: kernel.step,
    })
}
