//! The homogeneous norm `N = (|x|⁴ + a|z|²)^{1/4}` and its horizontal geometry.
//!
//! With `uᵢ = |x|²xᵢ + (a/4) Σ_k (Λ⁽ᵏ⁾x)ᵢ z_k` the closed forms are
//!
//! * `XᵢN = N⁻³ uᵢ`
//! * `|∇N|² = N⁻⁶ (|x|⁶ + (a/2)|x|² Σ_k z_k⟨x, Λ⁽ᵏ⁾x⟩ + (a²/16) Σ_{k,k'} z_k z_{k'} ⟨Λ⁽ᵏ⁾x, Λ⁽ᵏ'⁾x⟩)`
//!   (the middle sum vanishes by skew-symmetry but is kept literally)
//! * `ΔN = (n−1)|x|²/N³ + N⁻³[−3N⁻⁴(−a|z|²|x|² + (a²/16) Σ z_k z_{k'}⟨Λ⁽ᵏ⁾x, Λ⁽ᵏ'⁾x⟩) + (a/8) Σ_k |Λ⁽ᵏ⁾x|²]`
//!
//! On H-type groups with `a = 16` these collapse to `|∇N|² = |x|²/N²` and
//! `ΔN = (Q − 1)|x|²/N³`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{CarnotGroup, Point};
use crate::par;
use crate::scalar::Scalar;

/// Points with `|x|/N` below this are skipped when estimating ratios.
pub const MIN_HORIZONTAL_FRACTION: f64 = 1e-8;

/// `N` on raw coordinates for any scalar type.
pub fn norm_coords<S: Scalar>(a: f64, x: &[S], z: &[S]) -> S {
    let mut x2 = S::zero();
    for v in x {
        x2 += *v * *v;
    }
    let mut z2 = S::zero();
    for v in z {
        z2 += *v * *v;
    }
    let q = x2 * x2 + z2 * a;
    if q.re() == 0.0 {
        return S::zero();
    }
    q.powf(0.25)
}

pub fn norm(g: &CarnotGroup, p: &Point) -> f64 {
    norm_coords(g.a(), &p.x, &p.z)
}

/// Cached pieces shared by the closed forms.
struct Pieces {
    x2: f64,
    z2: f64,
    n_val: f64,
    /// `Λ⁽ᵏ⁾x` for each k.
    lx: Vec<Vec<f64>>,
}

impl Pieces {
    fn new(g: &CarnotGroup, p: &Point) -> Result<Self> {
        g.check_point(p)?;
        let x2 = p.x_norm_sq();
        let z2 = p.z_norm_sq();
        let n_val = (x2 * x2 + g.a() * z2).powf(0.25);
        if n_val == 0.0 {
            return Err(Error::OriginSingular);
        }
        let lx = (0..g.m()).map(|k| g.lambda_apply(k, &p.x)).collect();
        Ok(Pieces { x2, z2, n_val, lx })
    }

    /// `Σ_{k,k'} z_k z_{k'} ⟨Λ⁽ᵏ⁾x, Λ⁽ᵏ'⁾x⟩`.
    fn cross_sum(&self, z: &[f64]) -> f64 {
        let m = self.lx.len();
        let mut s = 0.0;
        for k in 0..m {
            for k2 in 0..m {
                let dot: f64 = self.lx[k].iter().zip(&self.lx[k2]).map(|(u, v)| u * v).sum();
                s += z[k] * z[k2] * dot;
            }
        }
        s
    }
}

/// Closed-form horizontal gradient `∇N`.
pub fn grad_norm(g: &CarnotGroup, p: &Point) -> Result<Vec<f64>> {
    let pc = Pieces::new(g, p)?;
    let a4 = g.a() / 4.0;
    let n3 = pc.n_val.powi(3);
    Ok((0..g.n())
        .map(|i| {
            let skew: f64 = (0..g.m()).map(|k| pc.lx[k][i] * p.z[k]).sum();
            (pc.x2 * p.x[i] + a4 * skew) / n3
        })
        .collect())
}

/// Closed-form `|∇N|²` via the direct triple-sum formula.
pub fn grad_norm_sq(g: &CarnotGroup, p: &Point) -> Result<f64> {
    let pc = Pieces::new(g, p)?;
    let a = g.a();
    let middle: f64 = (0..g.m())
        .map(|k| {
            let xlx: f64 = p.x.iter().zip(&pc.lx[k]).map(|(u, v)| u * v).sum();
            p.z[k] * xlx
        })
        .sum::<f64>()
        * (a / 2.0)
        * pc.x2;
    let x6 = pc.x2 * pc.x2 * pc.x2;
    Ok((x6 + middle + a * a / 16.0 * pc.cross_sum(&p.z)) / pc.n_val.powi(6))
}

/// Closed-form sub-Laplacian `ΔN` in the grouped `(n−1)|x|²/N³ + …` form.
pub fn laplacian_norm(g: &CarnotGroup, p: &Point) -> Result<f64> {
    let pc = Pieces::new(g, p)?;
    let a = g.a();
    let nn = pc.n_val;
    let n3 = nn.powi(3);
    let n4 = nn.powi(4);
    let lam_sq: f64 = pc
        .lx
        .iter()
        .map(|v| v.iter().map(|u| u * u).sum::<f64>())
        .sum();
    let bracket = -3.0 / n4 * (-a * pc.z2 * pc.x2 + a * a / 16.0 * pc.cross_sum(&p.z))
        + a / 8.0 * lam_sq;
    Ok((g.n() as f64 - 1.0) * pc.x2 / n3 + bracket / n3)
}

/// `(x/|x|)·∇N − |x|³/N³`; identically zero by skew-symmetry.
pub fn radial_identity_residual(g: &CarnotGroup, p: &Point) -> Result<f64> {
    g.check_point(p)?;
    let xn = p.x_norm_sq().sqrt();
    if xn == 0.0 {
        return Err(Error::ZeroHorizontal);
    }
    let grad = grad_norm(g, p)?;
    let proj: f64 = p.x.iter().zip(&grad).map(|(u, v)| u * v).sum::<f64>() / xn;
    let nn = norm(g, p);
    Ok(proj - (xn / nn).powi(3))
}

/// Empirical norm-geometry constants over a sample cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormGeometryReport {
    /// inf of `|∇N|² N²/|x|²`.
    pub a_hat: f64,
    /// sup of `|∇N|² N²/|x|²`.
    pub c_hat: f64,
    /// sup of `|ΔN| N³/|x|²`.
    pub b_hat: f64,
    pub sample_count: usize,
    pub seed: u64,
    pub radius_range: (f64, f64),
    /// Points attaining `a_hat`, `c_hat`, `b_hat`.
    pub argmin_a: Point,
    pub argmax_c: Point,
    pub argmax_b: Point,
    /// `ΔN ≥ 0` at every sampled point.
    pub laplacian_nonnegative: bool,
    /// Max of `|radial residual| / (|x|³/N³)` over the sample.
    pub max_radial_residual: f64,
    /// Samples skipped because `|x|/N < 1e−8`.
    pub excluded: usize,
}

/// Per-point ratios used by the estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormRatios {
    /// `|∇N|² N²/|x|²`
    pub gradient: f64,
    /// `ΔN N³/|x|²` (signed)
    pub laplacian: f64,
    /// `|residual| / (|x|³/N³)`
    pub radial_residual: f64,
}

/// The degree-0 ratios at `p`; `None` when `|x|/N < 1e−8`.
pub fn norm_ratios(g: &CarnotGroup, p: &Point) -> Result<Option<NormRatios>> {
    let nn = norm(g, p);
    if nn == 0.0 {
        return Err(Error::OriginSingular);
    }
    let x2 = p.x_norm_sq();
    let xn = x2.sqrt();
    if xn / nn < MIN_HORIZONTAL_FRACTION {
        return Ok(None);
    }
    let gsq = grad_norm_sq(g, p)?;
    let lap = laplacian_norm(g, p)?;
    let res = radial_identity_residual(g, p)?;
    Ok(Some(NormRatios {
        gradient: gsq * nn * nn / x2,
        laplacian: lap * nn.powi(3) / x2,
        radial_residual: res.abs() / (xn / nn).powi(3),
    }))
}

/// Draws a point with `N = radius`: directions uniform on the spheres and
/// `a|z|²/N⁴` uniform on `[0, 1)`, so both ratio extremes are visited.
pub fn sample_on_norm_sphere<R: Rng + ?Sized>(g: &CarnotGroup, rng: &mut R, radius: f64) -> Point {
    let unit = |rng: &mut R, d: usize| -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let len = v.iter().map(|u| u * u).sum::<f64>().sqrt();
            if len > 1e-12 {
                return v.into_iter().map(|u| u / len).collect();
            }
        }
    };
    let xh = unit(rng, g.n());
    let zh = unit(rng, g.m());
    let t: f64 = rng.random::<f64>();
    let xr = radius * (1.0 - t).powf(0.25);
    let zr = radius * radius * (t / g.a()).sqrt();
    Point {
        x: xh.into_iter().map(|u| u * xr).collect(),
        z: zh.into_iter().map(|u| u * zr).collect(),
    }
}

const CHUNK: usize = 4096;

/// The sample cloud used by [`estimate_lemma2_constants`]: `N` log-uniform
/// in `radius_range`, deterministic given `seed` (chunked ChaCha streams).
pub fn lemma2_sample_cloud(
    g: &CarnotGroup,
    sample_count: usize,
    seed: u64,
    radius_range: (f64, f64),
) -> Vec<Point> {
    let (lo, hi) = (radius_range.0.ln(), radius_range.1.ln());
    let chunks = sample_count.div_ceil(CHUNK);
    par::map_indexed(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64 + 1);
        let len = CHUNK.min(sample_count - c * CHUNK);
        (0..len)
            .map(|_| {
                let u: f64 = rng.random::<f64>();
                let radius = (lo + (hi - lo) * u).exp();
                sample_on_norm_sphere(g, &mut rng, radius)
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Inf/sup of the norm-geometry ratios over `sample_count` points, with each
/// extreme refined by a local compass search.
pub fn estimate_lemma2_constants(
    g: &CarnotGroup,
    sample_count: usize,
    seed: u64,
    radius_range: (f64, f64),
) -> Result<NormGeometryReport> {
    if sample_count < 1000 {
        return Err(Error::InvalidParameter(format!(
            "sample_count = {sample_count}, need ≥ 1000"
        )));
    }
    if !(radius_range.0 > 0.0 && radius_range.1 >= radius_range.0) {
        return Err(Error::InvalidParameter(format!(
            "radius range {radius_range:?} must satisfy 0 < lo ≤ hi"
        )));
    }
    let mut cloud = lemma2_sample_cloud(g, sample_count, seed, radius_range);
    let rough = summarize_cloud(g, &cloud, seed, radius_range)?;
    let starts = [
        (rough.argmin_a.clone(), Extreme::MinGradient),
        (rough.argmax_c.clone(), Extreme::MaxGradient),
        (rough.argmax_b.clone(), Extreme::MaxLaplacian),
    ];
    let polished = par::map_indexed(starts.len(), |i| polish(g, &starts[i].0, starts[i].1));
    for p in polished {
        cloud.push(p?);
    }
    let mut report = summarize_cloud(g, &cloud, seed, radius_range)?;
    report.sample_count = sample_count;
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
enum Extreme {
    MinGradient,
    MaxGradient,
    MaxLaplacian,
}

impl Extreme {
    /// Lower is better.
    fn score(self, r: &NormRatios) -> f64 {
        match self {
            Extreme::MinGradient => r.gradient,
            Extreme::MaxGradient => -r.gradient,
            Extreme::MaxLaplacian => -r.laplacian.abs(),
        }
    }
}

/// Compass search on the (0-homogeneous) ratio starting from a sampled
/// extreme, over the sphere coordinates `(x̂, ẑ, t = a|z|²/N⁴)` used by
/// [`sample_on_norm_sphere`]. Extremes typically sit at `t → 1`.
fn polish(g: &CarnotGroup, start: &Point, target: Extreme) -> Result<Point> {
    let n0 = norm(g, start);
    let (n, m) = (g.n(), g.m());
    let unit = |v: &[f64]| -> Option<Vec<f64>> {
        let len = v.iter().map(|u| u * u).sum::<f64>().sqrt();
        (len > 0.0).then(|| v.iter().map(|u| u / len).collect())
    };
    let to_point = |s: &[f64]| -> Option<Point> {
        let t = s[n + m].clamp(0.0, 1.0 - 1e-15);
        let xh = unit(&s[..n])?;
        let zh = unit(&s[n..n + m])?;
        let xr = n0 * (1.0 - t).powf(0.25);
        let zr = n0 * n0 * (t / g.a()).sqrt();
        Some(Point::new(
            xh.into_iter().map(|u| u * xr).collect(),
            zh.into_iter().map(|u| u * zr).collect(),
        ))
    };
    let score = |s: &[f64]| -> Result<f64> {
        match to_point(s) {
            Some(p) => Ok(norm_ratios(g, &p)?.map_or(f64::INFINITY, |r| target.score(&r))),
            None => Ok(f64::INFINITY),
        }
    };
    let mut best: Vec<f64> = unit(&start.x).unwrap_or_else(|| vec![1.0; n]);
    let mut zh = unit(&start.z).unwrap_or_else(|| vec![1.0; m]);
    best.append(&mut zh);
    best.push((g.a() * start.z_norm_sq() / n0.powi(4)).clamp(0.0, 1.0 - 1e-15));
    let mut best_score = score(&best)?;
    let mut step = 0.05;
    let mut iters = 0;
    while step > 1e-12 && iters < 50_000 {
        iters += 1;
        let mut improved = false;
        for k in 0..best.len() {
            for sign in [1.0, -1.0] {
                let mut cand = best.clone();
                cand[k] += sign * step;
                if k == n + m {
                    cand[k] = cand[k].clamp(0.0, 1.0 - 1e-15);
                }
                let s = score(&cand)?;
                if s < best_score {
                    best = cand;
                    best_score = s;
                    improved = true;
                }
            }
        }
        if improved {
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    Ok(to_point(&best).unwrap_or_else(|| start.clone()))
}

/// Reduces a point cloud to a [`NormGeometryReport`].
pub fn summarize_cloud(
    g: &CarnotGroup,
    cloud: &[Point],
    seed: u64,
    radius_range: (f64, f64),
) -> Result<NormGeometryReport> {
    let ratios = par::map_indexed(cloud.len(), |i| norm_ratios(g, &cloud[i]));
    let mut a_hat = f64::INFINITY;
    let mut c_hat = f64::NEG_INFINITY;
    let mut b_hat: f64 = 0.0;
    let (mut ia, mut ic, mut ib) = (0, 0, 0);
    let mut nonneg = true;
    let mut max_res: f64 = 0.0;
    let mut excluded = 0;
    for (i, r) in ratios.into_iter().enumerate() {
        let Some(r) = r? else {
            excluded += 1;
            continue;
        };
        if r.gradient < a_hat {
            a_hat = r.gradient;
            ia = i;
        }
        if r.gradient > c_hat {
            c_hat = r.gradient;
            ic = i;
        }
        if r.laplacian.abs() > b_hat {
            b_hat = r.laplacian.abs();
            ib = i;
        }
        nonneg &= r.laplacian >= 0.0;
        max_res = max_res.max(r.radial_residual);
    }
    if excluded == cloud.len() {
        return Err(Error::InvalidParameter("every sample had |x|/N < 1e-8".into()));
    }
    Ok(NormGeometryReport {
        a_hat,
        c_hat,
        b_hat,
        sample_count: cloud.len(),
        seed,
        radius_range,
        argmin_a: cloud[ia].clone(),
        argmax_c: cloud[ic].clone(),
        argmax_b: cloud[ib].clone(),
        laplacian_nonnegative: nonneg,
        max_radial_residual: max_res,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h1() -> CarnotGroup {
        CarnotGroup::heisenberg(1).unwrap()
    }

    #[test]
    fn norm_examples() {
        let g = h1();
        assert_eq!(norm(&g, &Point::new(vec![1.0, 0.0], vec![0.0])), 1.0);
        assert_eq!(norm(&g, &Point::new(vec![0.0, 0.0], vec![1.0])), 2.0);
        assert_eq!(norm(&g, &Point::origin(2, 1)), 0.0);
    }

    #[test]
    fn gradient_vanishes_on_vertical_axis() {
        let g = CarnotGroup::random(4, 2, 3.0, 5).unwrap();
        let p = Point::new(vec![0.0; 4], vec![0.3, -1.1]);
        assert_eq!(grad_norm(&g, &p).unwrap(), vec![0.0; 4]);
        assert_eq!(laplacian_norm(&g, &p).unwrap(), 0.0);
    }

    #[test]
    fn origin_is_singular() {
        let g = h1();
        assert_eq!(grad_norm(&g, &Point::origin(2, 1)), Err(Error::OriginSingular));
        assert_eq!(grad_norm_sq(&g, &Point::origin(2, 1)), Err(Error::OriginSingular));
        assert_eq!(laplacian_norm(&g, &Point::origin(2, 1)), Err(Error::OriginSingular));
        assert_eq!(
            radial_identity_residual(&g, &Point::new(vec![0.0, 0.0], vec![1.0])),
            Err(Error::ZeroHorizontal)
        );
    }

    #[test]
    fn h1_unit_point_values() {
        let g = h1();
        let p = Point::new(vec![1.0, 0.0], vec![0.0]);
        assert_eq!(grad_norm_sq(&g, &p).unwrap(), 1.0);
        assert_relative_eq!(laplacian_norm(&g, &p).unwrap(), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn radial_residual_zero_on_axis() {
        let g = h1();
        for z in [-3.0, 0.0, 0.25, 10.0] {
            let p = Point::new(vec![1.0, 0.0], vec![z]);
            let r = radial_identity_residual(&g, &p).unwrap();
            assert!(r.abs() <= 1e-15, "z = {z}: {r}");
        }
    }

    #[test]
    fn htype_collapse_on_h2() {
        let g = CarnotGroup::heisenberg(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let p = g.random_point(&mut rng, 1.5);
            let nn = norm(&g, &p);
            let x2 = p.x_norm_sq();
            assert_relative_eq!(grad_norm_sq(&g, &p).unwrap(), x2 / (nn * nn), max_relative = 1e-12);
            let lap = laplacian_norm(&g, &p).unwrap();
            assert_relative_eq!(lap, (g.q_hom() as f64 - 1.0) * x2 / nn.powi(3), max_relative = 1e-12);
        }
    }

    #[test]
    fn sphere_sampler_hits_requested_radius() {
        let g = CarnotGroup::random(4, 2, 2.0, 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for r in [0.1, 1.0, 7.5] {
            let p = sample_on_norm_sphere(&g, &mut rng, r);
            assert_relative_eq!(norm(&g, &p), r, max_relative = 1e-13);
        }
    }

    #[test]
    fn estimator_rejects_tiny_samples() {
        assert!(estimate_lemma2_constants(&h1(), 10, 0, (0.1, 10.0)).is_err());
    }
}
