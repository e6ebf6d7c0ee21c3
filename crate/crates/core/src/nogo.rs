//! Bump functions concentrated near `δ_t(x₀)`, where `∇N(x₀) = 0`, under
//! `dμ = e^{−αN^p}/Z`. For `1 < q < 2pβ/(p−1)` the ratio
//! `μ(|f|^q |log(|f|^q/μ|f|^q)|^β) / μ|∇f|^q` grows like
//! `t^{pβ − q(p−1)/2}`, so no Log^β-Sobolev inequality can hold.
//!
//! With `r = t^{(1−p)/2}` and quasi-distance `d(x, c) = N(c⁻¹∘x)`, the bump is
//! `f = clamp((σr − d)/r, 0, 1)` (σ = `support_factor`, default 2): support
//! radius `σr`, plateau `f ≡ 1` for `d ≤ (σ−1)r`. All integrals are carried
//! as natural logarithms because `μ|f|^q ~ e^{−αt^p N(x₀)^p}` underflows.

use std::io::{self, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{CarnotGroup, Point};
use crate::hcalculus::{Field, ScalarField};
use crate::measures::{BoltzmannMeasure, GProfile, RadialPotential};
use crate::norm::{self, norm_coords};
use crate::par;
use crate::scalar::Scalar;
use crate::stats;

/// Minimum accepted support points per `t`.
pub const MIN_ACCEPTED: usize = 100;
/// Required `t_max / t_min`.
pub const MIN_T_SPAN: f64 = 8.0;

fn default_support_factor() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoGoParams {
    pub p: f64,
    pub alpha: f64,
    pub q: f64,
    pub beta: f64,
    pub t_grid: Vec<f64>,
    pub z0: Vec<f64>,
    #[serde(default = "default_support_factor")]
    pub support_factor: f64,
}

impl NoGoParams {
    /// Geometric grid of `count` values of `t` on `[t_min, t_max]` and `z0 = e₁`.
    pub fn new(g: &CarnotGroup, p: f64, alpha: f64, q: f64, beta: f64, t_range: (f64, f64), count: usize) -> Self {
        let mut z0 = vec![0.0; g.m()];
        z0[0] = 1.0;
        let t_grid = crate::measures::conditions::log_grid(t_range.0, t_range.1, count);
        NoGoParams {
            p,
            alpha,
            q,
            beta,
            t_grid,
            z0,
            support_factor: 2.0,
        }
    }

    /// `e^{−αN^p}` on `g`.
    pub fn measure(&self, g: &CarnotGroup) -> Result<BoltzmannMeasure> {
        BoltzmannMeasure::new(
            g.clone(),
            GProfile::AlphaPower {
                p: self.p,
                alpha: self.alpha,
            },
        )
    }

    pub fn radius(&self, t: f64) -> f64 {
        t.powf((1.0 - self.p) / 2.0)
    }

    pub fn base_point(&self, g: &CarnotGroup) -> Point {
        Point::new(vec![0.0; g.n()], self.z0.clone())
    }

    pub fn center(&self, g: &CarnotGroup, t: f64) -> Point {
        self.base_point(g).dilate(t)
    }

    pub fn predicted_slope(&self) -> f64 {
        self.p * self.beta - self.q * (self.p - 1.0) / 2.0
    }

    pub fn in_failure_regime(&self) -> bool {
        self.p == 1.0 || self.q < 2.0 * self.p * self.beta / (self.p - 1.0)
    }

    pub fn validate(&self, g: &CarnotGroup) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.p >= 1.0) {
            return bad(format!("p = {} must be ≥ 1", self.p));
        }
        if !(self.alpha > 0.0) {
            return bad(format!("alpha = {} must be > 0", self.alpha));
        }
        if !(self.q > 1.0) {
            return bad(format!("q = {} must be > 1", self.q));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return bad(format!("beta = {} must be in (0, 1]", self.beta));
        }
        if !(self.support_factor > 1.0) {
            return bad(format!("support_factor = {} must be > 1", self.support_factor));
        }
        if self.z0.len() != g.m() {
            return bad(format!("z0 has length {}, expected m = {}", self.z0.len(), g.m()));
        }
        let zn = self.z0.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (zn - 1.0).abs() > 1e-12 {
            return bad(format!("|z0| = {zn}, expected 1"));
        }
        if self.t_grid.len() < 2 || self.t_grid.windows(2).any(|w| !(w[1] > w[0])) || !(self.t_grid[0] > 0.0) {
            return bad("t_grid must be positive and strictly increasing".into());
        }
        let span = self.t_grid[self.t_grid.len() - 1] / self.t_grid[0];
        if span < MIN_T_SPAN * (1.0 - 1e-12) {
            return bad(format!("t_grid spans a factor {span}, need ≥ {MIN_T_SPAN}"));
        }
        for &t in &self.t_grid {
            if !(self.radius(t) < 2.0 / 3.0) {
                return bad(format!("r(t = {t}) = {} is not below 2/3", self.radius(t)));
            }
        }
        let grad = norm::grad_norm(g, &self.base_point(g))?;
        if grad.iter().any(|v| *v != 0.0) {
            return bad(format!("∇N(x₀) = {grad:?} is not zero"));
        }
        Ok(())
    }
}

/// The bump as a field (AD-capable; `clamp` has zero derivative off the ramp).
#[derive(Debug, Clone)]
struct Bump {
    group: CarnotGroup,
    center_inv: Point,
    r: f64,
    sigma: f64,
}

impl Field for Bump {
    fn eval<S: Scalar>(&self, x: &[S], z: &[S]) -> S {
        let cx: Vec<S> = self.center_inv.x.iter().map(|v| S::cst(*v)).collect();
        let cz: Vec<S> = self.center_inv.z.iter().map(|v| S::cst(*v)).collect();
        let (yx, yz) = self.group.op_coords(&cx, &cz, x, z);
        let d = norm_coords(self.group.a(), &yx, &yz);
        ((d * -1.0 + self.sigma * self.r) / self.r).clamp_re(0.0, 1.0)
    }
}

/// `f_t(point)`.
pub fn bump_value(g: &CarnotGroup, params: &NoGoParams, t: f64, point: &Point) -> Result<f64> {
    let d = g.quasi_distance(point, &params.center(g, t))?;
    let r = params.radius(t);
    Ok(((params.support_factor * r - d) / r).clamp(0.0, 1.0))
}

/// `f_t` as a [`ScalarField`] with gradient `−(∇N)(c⁻¹∘x)/r` on the ramp.
pub fn bump_field(g: &CarnotGroup, params: &NoGoParams, t: f64) -> ScalarField {
    let r = params.radius(t);
    let sigma = params.support_factor;
    let center_inv = params.center(g, t).inverse();
    let bump = Bump {
        group: g.clone(),
        center_inv: center_inv.clone(),
        r,
        sigma,
    };
    let gg = g.clone();
    ScalarField::new(format!("bump(t={t})"), bump).with_gradient(Arc::new(move |p: &Point| {
        let y = gg.op(&center_inv, p)?;
        let d = norm::norm(&gg, &y);
        if d <= (sigma - 1.0) * r || d >= sigma * r {
            return Ok(vec![0.0; gg.n()]);
        }
        Ok(norm::grad_norm(&gg, &y)?.into_iter().map(|v| -v / r).collect())
    }))
}

/// Log-scale integrals at one `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoGoRow {
    pub t: f64,
    pub r: f64,
    /// `N(δ_t x₀)`
    pub center_norm: f64,
    /// `ln μ|f|^q`
    pub log_mass: f64,
    /// `ln μ(|f|^q |log(|f|^q/μ|f|^q)|^β)`
    pub log_entropy: f64,
    /// `ln μ|∇f|^q`
    pub log_energy: f64,
    pub log_ratio: f64,
    pub ratio: f64,
    pub accepted: usize,
    pub sampled: usize,
    /// Accepted points with `d ≤ (σ−1)r`.
    pub plateau_points: usize,
    /// On every plateau point `f = 1` and `log f^q = 0`.
    pub plateau_ok: bool,
    /// `ln(max/min)` of `e^{−g(N)}` over accepted points (= `2c₂`).
    pub density_log_spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoGoResult {
    pub params: NoGoParams,
    pub rows: Vec<NoGoRow>,
    /// Least-squares slope of `ln ratio` on `ln t` over the top half of the grid.
    pub fitted_slope: f64,
    pub fitted_slope_full: f64,
    pub predicted_slope: f64,
    pub in_failure_regime: bool,
    /// `N(x₀)`
    pub base_norm: f64,
    pub log_z: f64,
    pub sample_count: usize,
    pub seed: u64,
}

/// Formats `e^l` as a decimal `mantissa e exponent` string without
/// underflowing, e.g. `3.100000e-1779`.
pub fn format_log(l: f64) -> String {
    if l == f64::NEG_INFINITY {
        return "0".into();
    }
    if !l.is_finite() {
        return format!("{}", l.exp());
    }
    let l10 = l / std::f64::consts::LN_10;
    let mut e = l10.floor();
    let mut m = 10f64.powf(l10 - e);
    if m >= 9.9999995 {
        m /= 10.0;
        e += 1.0;
    }
    format!("{m:.6}e{}", e as i64)
}

impl NoGoResult {
    /// Header `t,mass,entropy,energy,ratio`; values printed from their logs.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,mass,entropy,energy,ratio")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.t,
                format_log(r.log_mass),
                format_log(r.log_entropy),
                format_log(r.log_energy),
                format_log(r.log_ratio)
            )?;
        }
        Ok(())
    }
}

fn log_sum(logs: &[f64]) -> f64 {
    let mx = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + logs.iter().map(|l| (l - mx).exp()).sum::<f64>().ln()
}

/// `(ln mass, ln entropy, ln energy)` plus diagnostics at one `t`, from
/// `sample_count` uniform draws in the box `[−σr, σr]ⁿ × [−(σr)²/√a, (σr)²/√a]ᵐ`
/// translated to the center.
pub fn local_integrals(
    g: &CarnotGroup,
    measure: &BoltzmannMeasure,
    params: &NoGoParams,
    t: f64,
    log_z: f64,
    sample_count: usize,
    seed: u64,
) -> Result<NoGoRow> {
    let (n, m) = (g.n(), g.m());
    let r = params.radius(t);
    let sigma = params.support_factor;
    let rho = sigma * r;
    let zh = rho * rho / g.a().sqrt();
    let center = params.center(g, t);
    let center_norm = norm::norm(g, &center);
    let g_c = measure.profile.g(center_norm);
    let ln_vol = n as f64 * (2.0 * rho).ln() + m as f64 * (2.0 * zh).ln();
    let q = params.q;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // per-point (ln w, f, |∇N(y)|) for accepted points
    let mut acc: Vec<(f64, f64, f64)> = Vec::new();
    let mut plateau_points = 0;
    let mut plateau_ok = true;
    let mut y = Point::origin(n, m);
    for _ in 0..sample_count {
        for v in y.x.iter_mut() {
            *v = rng.random_range(-rho..rho);
        }
        for v in y.z.iter_mut() {
            *v = rng.random_range(-zh..zh);
        }
        let d = norm::norm(g, &y);
        if d >= rho {
            continue;
        }
        let x = g.op(&center, &y)?;
        let lw = -(measure.profile.g(norm::norm(g, &x)) - g_c);
        let f = ((rho - d) / r).clamp(0.0, 1.0);
        let grad = if d > (sigma - 1.0) * r {
            norm::grad_norm_sq(g, &y)?.sqrt() / r
        } else {
            plateau_points += 1;
            plateau_ok &= f == 1.0 && (f.powf(q)).ln() == 0.0;
            0.0
        };
        acc.push((lw, f, grad));
    }
    if acc.len() < MIN_ACCEPTED {
        return Err(Error::EmptySupportSample { accepted: acc.len() });
    }
    let base = ln_vol - (sample_count as f64).ln() - g_c - log_z;
    let mass_terms: Vec<f64> = acc.iter().map(|(lw, f, _)| lw + q * f.ln()).collect();
    let log_mass = base + log_sum(&mass_terms);
    let ent_terms: Vec<f64> = acc
        .iter()
        .map(|(lw, f, _)| {
            let lf = q * f.ln();
            lw + lf + params.beta * (lf - log_mass).abs().ln()
        })
        .collect();
    let log_entropy = base + log_sum(&ent_terms);
    let en_terms: Vec<f64> = acc.iter().map(|(lw, _, gr)| lw + q * gr.ln()).collect();
    let log_energy = base + log_sum(&en_terms);
    let (lo, hi) = acc
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (lw, _, _)| (lo.min(*lw), hi.max(*lw)));
    let log_ratio = log_entropy - log_energy;
    Ok(NoGoRow {
        t,
        r,
        center_norm,
        log_mass,
        log_entropy,
        log_energy,
        log_ratio,
        ratio: log_ratio.exp(),
        accepted: acc.len(),
        sampled: sample_count,
        plateau_points,
        plateau_ok,
        density_log_spread: hi - lo,
    })
}

/// Evaluates every `t` in the grid and fits the log-log slope of the ratio.
pub fn run_nogo(
    g: &CarnotGroup,
    measure: &BoltzmannMeasure,
    params: &NoGoParams,
    sample_count: usize,
    seed: u64,
) -> Result<NoGoResult> {
    params.validate(g)?;
    let expected = GProfile::AlphaPower {
        p: params.p,
        alpha: params.alpha,
    };
    if measure.profile != expected || measure.group != *g {
        return Err(Error::InvalidParameter(format!(
            "measure must be {} on the given group, got {}",
            expected.label(),
            measure.profile.label()
        )));
    }
    let log_z = match measure.log_z {
        Some(v) => v,
        None => measure.estimate_log_z()?,
    };
    let rows = par::map_indexed(params.t_grid.len(), |i| {
        let mut seeder = ChaCha8Rng::seed_from_u64(seed);
        seeder.set_stream(i as u64 + 1);
        local_integrals(g, measure, params, params.t_grid[i], log_z, sample_count, seeder.random())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let lt: Vec<f64> = rows.iter().map(|r| r.t.ln()).collect();
    let lr: Vec<f64> = rows.iter().map(|r| r.log_ratio).collect();
    let half = rows.len() / 2;
    Ok(NoGoResult {
        params: params.clone(),
        fitted_slope: stats::ols(&lt[half..], &lr[half..]).0,
        fitted_slope_full: stats::ols(&lt, &lr).0,
        predicted_slope: params.predicted_slope(),
        in_failure_regime: params.in_failure_regime(),
        base_norm: norm::norm(g, &params.base_point(g)),
        log_z,
        sample_count,
        seed,
        rows,
    })
}
