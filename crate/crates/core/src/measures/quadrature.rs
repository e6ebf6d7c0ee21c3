//! Deterministic `(|x|, |z|)` quadrature for the Boltzmann measure.
//!
//! The density depends on `(r, s) = (|x|, |z|)` only, so
//! `E[h] = ∬ h(r,s) e^{−g(N)} r^{n−1} s^{m−1} dr ds / (same with h ≡ 1)`.
//! The rectangle is traversed in anisotropic polar coordinates
//! `r = N cos φ`, `s = N² sin φ √(1 + cos²φ) / √a`, for which
//! `r⁴ + a s² = N⁴` and
//! `r^{n−1} s^{m−1} dr ds = N^{Q−1} · 2 cos^{n−1}φ sin^{m−1}φ (1 + cos²φ)^{(m−2)/2} / a^{m/2} dN dφ`.
//! Both factors are smooth, so tensor Gauss–Legendre panels converge fast.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::profile::{GProfile, RadialPotential};
use crate::error::{Error, Result};
use crate::group::{CarnotGroup, Point};
use crate::norm;

/// Gauss–Legendre points per panel.
const GL_ORDER: usize = 20;
/// Default number of panels per axis.
pub const DEFAULT_RESOLUTION: usize = 16;
/// The radial density is cut where it falls below this fraction of its peak.
pub const TAIL_REL: f64 = 1e-14;
const MAX_CUTOFF: f64 = 1e8;

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=order {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite rule with `panels` equal panels on `[lo, hi]`.
fn composite(lo: f64, hi: f64, panels: usize) -> Vec<(f64, f64)> {
    let (xs, ws) = gauss_legendre(GL_ORDER);
    let width = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(panels * GL_ORDER);
    for p in 0..panels {
        let a = lo + p as f64 * width;
        for (x, w) in xs.iter().zip(&ws) {
            out.push((a + 0.5 * width * (x + 1.0), 0.5 * width * w));
        }
    }
    out
}

/// `ln |S^{d−1}|`, with `|S⁰| = 2`.
pub fn ln_sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    (2.0f64).ln() + h * PI.ln() - ln_gamma(h)
}

/// `e^{−g(N)}/Z` on a step-two group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannMeasure {
    pub group: CarnotGroup,
    pub profile: GProfile,
    pub log_z: Option<f64>,
    pub quad_resolution: usize,
}

/// Quadrature nodes in `(r, s)` with log-weights relative to `log_scale`.
struct Nodes {
    r: Vec<f64>,
    s: Vec<f64>,
    w: Vec<f64>,
    log_scale: f64,
}

impl BoltzmannMeasure {
    pub fn new(group: CarnotGroup, profile: GProfile) -> Result<Self> {
        profile.validate()?;
        Ok(BoltzmannMeasure {
            group,
            profile,
            log_z: None,
            quad_resolution: DEFAULT_RESOLUTION,
        })
    }

    pub fn with_resolution(mut self, quad_resolution: usize) -> Self {
        self.quad_resolution = quad_resolution.max(1);
        self
    }

    /// Fills `log_z` from the quadrature.
    pub fn normalized(mut self) -> Result<Self> {
        self.log_z = Some(self.estimate_log_z()?);
        Ok(self)
    }

    /// `−g(N(p))`, the unnormalized log-density.
    pub fn log_density(&self, p: &Point) -> f64 {
        -self.profile.g(norm::norm(&self.group, p))
    }

    /// `ln(N^{Q−1} e^{−g(N)})`.
    fn ln_radial(&self, nn: f64) -> f64 {
        (self.group.q_hom() as f64 - 1.0) * nn.ln() - self.profile.g(nn)
    }

    /// Location of the radial peak and the cutoff where the radial density
    /// drops below `TAIL_REL` of it.
    pub fn radial_cutoff(&self) -> Result<(f64, f64)> {
        let drop = -TAIL_REL.ln();
        let mut nn = 1e-3;
        let mut peak = f64::NEG_INFINITY;
        let mut arg = nn;
        while nn < MAX_CUTOFF {
            let v = self.ln_radial(nn);
            if v.is_nan() {
                return Err(Error::TailNotConverged(format!("density is NaN at N = {nn}")));
            }
            if v > peak {
                peak = v;
                arg = nn;
            } else if v < peak - drop && nn > arg {
                // refine by bisection between the last two scan points
                let (mut lo, mut hi) = (nn / 1.02, nn);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if self.ln_radial(mid) < peak - drop {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return Ok((arg, hi));
            }
            nn *= 1.02;
        }
        Err(Error::TailNotConverged(format!(
            "radial density of {} still above {TAIL_REL:e} of its peak at N = {MAX_CUTOFF:e}",
            self.profile.label()
        )))
    }

    fn nodes(&self, resolution: usize, cut_scale: f64) -> Result<Nodes> {
        let (_, cut) = self.radial_cutoff()?;
        let (n, m) = (self.group.n(), self.group.m());
        let a = self.group.a();
        let radial = composite(0.0, cut * cut_scale, resolution);
        let angular = composite(0.0, FRAC_PI_2, resolution);
        let ang: Vec<(f64, f64, f64)> = angular
            .iter()
            .map(|&(phi, w)| {
                let (sp, cp) = phi.sin_cos();
                let q = 1.0 + cp * cp;
                let dens = 2.0 * cp.powi(n as i32 - 1) * sp.powi(m as i32 - 1) * q.powf((m as f64 - 2.0) / 2.0);
                (cp, sp * q.sqrt() / a.sqrt(), w * dens)
            })
            .collect();
        let log_scale = radial
            .iter()
            .map(|&(nn, _)| self.ln_radial(nn))
            .fold(f64::NEG_INFINITY, f64::max);
        let cap = radial.len() * ang.len();
        let mut out = Nodes {
            r: Vec::with_capacity(cap),
            s: Vec::with_capacity(cap),
            w: Vec::with_capacity(cap),
            log_scale,
        };
        for &(nn, wn) in &radial {
            let lr = self.ln_radial(nn) - log_scale;
            if !lr.is_finite() {
                continue;
            }
            let wr = wn * lr.exp();
            for &(cp, sfac, wa) in &ang {
                out.r.push(nn * cp);
                out.s.push(nn * nn * sfac);
                out.w.push(wr * wa);
            }
        }
        Ok(out)
    }

    /// `ln ∬ h e^{−g} r^{n−1}s^{m−1} dr ds` (no sphere factors) for `h > 0`.
    pub fn ln_integral_with<H: Fn(f64, f64) -> f64>(
        &self,
        h: H,
        resolution: usize,
        cut_scale: f64,
    ) -> Result<f64> {
        let nodes = self.nodes(resolution, cut_scale)?;
        let total: f64 = (0..nodes.w.len()).map(|i| nodes.w[i] * h(nodes.r[i], nodes.s[i])).sum();
        let m = self.group.m() as f64;
        let v = total.ln() + nodes.log_scale - 0.5 * m * self.group.a().ln();
        if !v.is_finite() {
            return Err(Error::TailNotConverged(format!("non-finite integral ({v})")));
        }
        Ok(v)
    }

    /// `E_μ[h(|x|, |z|)]` at an explicit resolution and cutoff scale.
    pub fn expectation_with<H: Fn(f64, f64) -> f64>(
        &self,
        h: H,
        resolution: usize,
        cut_scale: f64,
    ) -> Result<f64> {
        let nodes = self.nodes(resolution, cut_scale)?;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..nodes.w.len() {
            num += nodes.w[i] * h(nodes.r[i], nodes.s[i]);
            den += nodes.w[i];
        }
        let v = num / den;
        if !v.is_finite() {
            return Err(Error::TailNotConverged(format!("non-finite expectation ({v})")));
        }
        Ok(v)
    }

    /// `E_μ[h(|x|, |z|)]`.
    pub fn radial_quadrature<H: Fn(f64, f64) -> f64>(&self, h: H) -> Result<f64> {
        self.expectation_with(h, self.quad_resolution, 1.0)
    }

    /// `log Z = ln(|S^{n−1}| |S^{m−1}|) + ln ∬ e^{−g} r^{n−1}s^{m−1} dr ds`.
    pub fn estimate_log_z(&self) -> Result<f64> {
        self.estimate_log_z_with(self.quad_resolution, 1.0)
    }

    pub fn estimate_log_z_with(&self, resolution: usize, cut_scale: f64) -> Result<f64> {
        let spheres = ln_sphere_area(self.group.n()) + ln_sphere_area(self.group.m());
        Ok(spheres + self.ln_integral_with(|_, _| 1.0, resolution, cut_scale)?)
    }

    /// `N` from `(r, s)` for this group's `a`.
    pub fn norm_rs(&self, r: f64, s: f64) -> f64 {
        (r.powi(4) + self.group.a() * s * s).powf(0.25)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::gamma::gamma;

    fn h1(profile: GProfile) -> BoltzmannMeasure {
        BoltzmannMeasure::new(CarnotGroup::heisenberg(1).unwrap(), profile).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(GL_ORDER);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        // x^38 is exact for a 20-point rule
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(38)).sum();
        assert_relative_eq!(v, 2.0 / 39.0, max_relative = 1e-13);
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(ln_sphere_area(1).exp(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(ln_sphere_area(2).exp(), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(ln_sphere_area(3).exp(), 4.0 * PI, max_relative = 1e-14);
    }

    #[test]
    fn normalization_cancels() {
        let mu = h1(GProfile::Power { k: 4.0 });
        assert_relative_eq!(mu.radial_quadrature(|_, _| 1.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn log_z_matches_gamma_closed_form() {
        // ∫ N^{Q−1} e^{−N^k} dN = Γ(Q/k)/k; angular part ½B(n/4, m/2).
        for (g, k) in [
            (CarnotGroup::heisenberg(1).unwrap(), 4.0),
            (CarnotGroup::heisenberg(2).unwrap(), 2.0),
            (CarnotGroup::random(3, 2, 1.5, 4).unwrap(), 3.0),
        ] {
            let (n, m, q) = (g.n() as f64, g.m() as f64, g.q_hom() as f64);
            let a = g.a();
            let beta = gamma(n / 4.0) * gamma(m / 2.0) / gamma(n / 4.0 + m / 2.0);
            let expected = ln_sphere_area(g.n()) + ln_sphere_area(g.m()) + (gamma(q / k) / k).ln()
                + (0.5 * beta).ln()
                - 0.5 * m * a.ln();
            let mu = BoltzmannMeasure::new(g, GProfile::Power { k }).unwrap();
            assert_relative_eq!(mu.estimate_log_z().unwrap(), expected, epsilon = 1e-12);
        }
        // H¹ with N⁴: Z = π²/8
        let z = h1(GProfile::Power { k: 4.0 }).estimate_log_z().unwrap().exp();
        assert_relative_eq!(z, PI * PI / 8.0, max_relative = 1e-12);
    }

    #[test]
    fn resolution_and_cutoff_convergence() {
        for prof in GProfile::builtin_suite() {
            let mu = h1(prof);
            let h = |r: f64, s: f64| r.powi(4) + 16.0 * s * s;
            let e1 = mu.expectation_with(h, 16, 1.0).unwrap().sqrt();
            let e2 = mu.expectation_with(h, 32, 1.0).unwrap().sqrt();
            assert!((e1 - e2).abs() / e2 < 1e-8, "{prof:?}");
            let l1 = mu.estimate_log_z_with(16, 1.0).unwrap();
            let l2 = mu.estimate_log_z_with(16, 2.0).unwrap();
            assert!((l1 - l2).abs() < 1e-10, "{prof:?}: {l1} {l2}");
        }
    }

    #[test]
    fn cutoff_fails_for_non_decaying_density() {
        let mu = h1(GProfile::Power { k: 1.0 });
        assert!(mu.radial_cutoff().is_ok());
        let mut flat = mu.clone();
        flat.profile = GProfile::AlphaPower { p: 1.0, alpha: 1e-9 };
        assert!(matches!(flat.radial_cutoff(), Err(Error::TailNotConverged(_))));
    }
}
