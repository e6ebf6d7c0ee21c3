//! Browser bindings: each export takes plain numbers or JSON and returns JSON.
//!
//! The `*_json` functions are ordinary Rust so they can be tested natively.

use carnot_core::measures::{mcmc_sample, RadialPotential};
use carnot_core::nogo::{run_nogo, NoGoParams};
use carnot_core::norm::{norm, norm_ratios};
use carnot_core::{BoltzmannMeasure, CarnotGroup, Error, GProfile, Point};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Result<T> = std::result::Result<T, Error>;

#[derive(Serialize)]
struct Heatmap {
    width: usize,
    height: usize,
    /// Horizontal axis: `x₁` in `(0, extent]`; vertical: `z₁` in `[−extent², extent²]`.
    extent: f64,
    /// Row-major, `NaN` where the ratio is undefined.
    gradient: Vec<f64>,
    laplacian: Vec<f64>,
    min: f64,
    max: f64,
}

/// `|∇N|²N²/|x|²` and `ΔN N³/|x|²` over the `(x₁, z₁)` plane.
pub fn norm_ratio_heatmap_json(group: &str, width: usize, height: usize, extent: f64) -> Result<String> {
    let g: CarnotGroup = parse(group)?;
    if width < 2 || height < 2 || width * height > 250_000 || !(extent > 0.0) {
        return Err(Error::InvalidParameter("grid must be 2..500 square and extent > 0".into()));
    }
    let mut gradient = Vec::with_capacity(width * height);
    let mut laplacian = Vec::with_capacity(width * height);
    for j in 0..height {
        let z1 = extent * extent * (1.0 - 2.0 * j as f64 / (height - 1) as f64);
        for i in 0..width {
            let x1 = extent * (i + 1) as f64 / width as f64;
            let mut x = vec![0.0; g.n()];
            let mut z = vec![0.0; g.m()];
            x[0] = x1;
            z[0] = z1;
            match norm_ratios(&g, &Point::new(x, z))? {
                Some(r) => {
                    gradient.push(r.gradient);
                    laplacian.push(r.laplacian);
                }
                None => {
                    gradient.push(f64::NAN);
                    laplacian.push(f64::NAN);
                }
            }
        }
    }
    let finite = gradient.iter().copied().filter(|v| v.is_finite());
    let min = finite.clone().fold(f64::INFINITY, f64::min);
    let max = finite.fold(f64::NEG_INFINITY, f64::max);
    to_json(&Heatmap {
        width,
        height,
        extent,
        gradient,
        laplacian,
        min,
        max,
    })
}

#[derive(Serialize)]
struct Histogram {
    edges: Vec<f64>,
    /// Fraction of chain points per bin.
    mcmc: Vec<f64>,
    /// Exact bin mass from the radial law `ρ^{Q−1} e^{−g(ρ)}`.
    exact: Vec<f64>,
    acceptance_rate: f64,
    ess: f64,
}

/// Histogram of `N` along a Metropolis chain for `e^{−g(N)}` against the exact law.
pub fn boltzmann_histogram_json(
    group: &str,
    profile: &str,
    count: usize,
    seed: u64,
    bins: usize,
) -> Result<String> {
    let g: CarnotGroup = parse(group)?;
    let profile: GProfile = parse(profile)?;
    if !(2..=200).contains(&bins) {
        return Err(Error::InvalidParameter("bins must be in 2..=200".into()));
    }
    let q = g.q_hom() as f64;
    let measure = BoltzmannMeasure::new(g, profile)?;
    let chain = mcmc_sample(&measure, count, seed, 1.0)?;

    // Upper edge where the radial density is negligible.
    let log_density = |r: f64| (q - 1.0) * r.ln() - profile.g(r);
    let mode = (1..=4000)
        .map(|i| i as f64 * 0.005)
        .max_by(|a, b| log_density(*a).total_cmp(&log_density(*b)))
        .unwrap_or(1.0);
    let mut hi = mode.max(0.5);
    while log_density(hi) > log_density(mode) - 40.0 {
        hi *= 1.1;
    }
    let edges: Vec<f64> = (0..=bins).map(|i| hi * i as f64 / bins as f64).collect();

    let mut counts = vec![0usize; bins];
    for &nn in chain.norms() {
        let k = ((nn / hi) * bins as f64) as usize;
        if k < bins {
            counts[k] += 1;
        }
    }
    let mcmc = counts.iter().map(|&c| c as f64 / chain.len() as f64).collect();

    // Simpson per bin, shifted by the log-mode to avoid underflow.
    let shift = log_density(mode);
    let dens = |r: f64| if r > 0.0 { (log_density(r) - shift).exp() } else { 0.0 };
    let mut exact: Vec<f64> = edges
        .windows(2)
        .map(|w| {
            let steps = 64;
            let h = (w[1] - w[0]) / steps as f64;
            let mut s = dens(w[0]) + dens(w[1]);
            for i in 1..steps {
                s += dens(w[0] + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        })
        .collect();
    let total: f64 = exact.iter().sum();
    exact.iter_mut().for_each(|v| *v /= total);

    to_json(&Histogram {
        edges,
        mcmc,
        exact,
        acceptance_rate: chain.acceptance_rate,
        ess: chain.ess,
    })
}

#[derive(Serialize)]
struct NoGoCurve {
    t: Vec<f64>,
    log_ratio: Vec<f64>,
    fitted_slope: f64,
    predicted_slope: f64,
    in_failure_regime: bool,
    base_norm: f64,
}

/// `ln(entropy/energy)` against `ln t` for bumps under `e^{−N^p}` on H¹.
pub fn nogo_curve_json(p: f64, beta: f64, q: f64, samples: usize, seed: u64) -> Result<String> {
    let g = CarnotGroup::heisenberg(1)?;
    let params = NoGoParams::new(&g, p, 1.0, q, beta, (4.0, 32.0), 8);
    let measure = params.measure(&g)?;
    let r = run_nogo(&g, &measure, &params, samples, seed)?;
    to_json(&NoGoCurve {
        t: r.rows.iter().map(|row| row.t).collect(),
        log_ratio: r.rows.iter().map(|row| row.log_ratio).collect(),
        fitted_slope: r.fitted_slope,
        predicted_slope: r.predicted_slope,
        in_failure_regime: r.in_failure_regime,
        base_norm: norm(&g, &params.base_point(&g)),
    })
}

fn parse<T: serde::de::DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::InvalidParameter(e.to_string()))
}

fn js(e: Error) -> JsError {
    JsError::new(&format!("{}: {e}", e.reason()))
}

#[wasm_bindgen]
pub fn norm_ratio_heatmap(group: &str, width: usize, height: usize, extent: f64) -> std::result::Result<String, JsError> {
    norm_ratio_heatmap_json(group, width, height, extent).map_err(js)
}

#[wasm_bindgen]
pub fn boltzmann_histogram(
    group: &str,
    profile: &str,
    count: usize,
    seed: u64,
    bins: usize,
) -> std::result::Result<String, JsError> {
    boltzmann_histogram_json(group, profile, count, seed, bins).map_err(js)
}

#[wasm_bindgen]
pub fn nogo_curve(p: f64, beta: f64, q: f64, samples: usize, seed: u64) -> std::result::Result<String, JsError> {
    nogo_curve_json(p, beta, q, samples, seed).map_err(js)
}

/// `CarnotGroup::random` as a group-definition JSON.
#[wasm_bindgen]
pub fn random_group(n: usize, m: usize, a: f64, seed: u64) -> std::result::Result<String, JsError> {
    CarnotGroup::random(n, m, a, seed)
        .and_then(|g| to_json(&g))
        .map_err(js)
}

#[wasm_bindgen]
pub fn version() -> String {
    carnot_core::VERSION.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const H1: &str = r#"{"n":2,"m":1,"lambdas":[[[0,1],[-1,0]]],"a":16}"#;

    #[test]
    fn heisenberg_gradient_ratio_is_one() {
        let v: Value = serde_json::from_str(&norm_ratio_heatmap_json(H1, 8, 9, 2.0).unwrap()).unwrap();
        for x in v["gradient"].as_array().unwrap() {
            assert!((x.as_f64().unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn histogram_tracks_exact_law() {
        let out = boltzmann_histogram_json(H1, r#"{"kind":"power","k":2}"#, 100_000, 3, 20).unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        let mcmc = v["mcmc"].as_array().unwrap();
        let exact = v["exact"].as_array().unwrap();
        let tv: f64 = mcmc
            .iter()
            .zip(exact)
            .map(|(a, b)| (a.as_f64().unwrap() - b.as_f64().unwrap()).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.03, "total variation {tv}");
    }

    #[test]
    fn nogo_curve_rises_in_failure_regime() {
        let v: Value = serde_json::from_str(&nogo_curve_json(2.0, 1.0, 1.5, 50_000, 1).unwrap()).unwrap();
        assert_eq!(v["in_failure_regime"], true);
        assert!(v["fitted_slope"].as_f64().unwrap() > 0.5);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(norm_ratio_heatmap_json("{}", 8, 8, 1.0).is_err());
        assert!(boltzmann_histogram_json(H1, r#"{"kind":"power","k":2}"#, 100_000, 3, 1).is_err());
    }
}
