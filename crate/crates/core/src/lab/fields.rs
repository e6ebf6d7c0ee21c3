//! Built-in test functions: coordinate polynomials, radial functions of `N`,
//! seeded random quadratics and the exterior cutoff `f·χ(N)`.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::group::{CarnotGroup, Point};
use crate::hcalculus::{self, CoordinateX, Field, Polynomial, ScalarField};
use crate::norm::{self, norm_coords};
use crate::scalar::Scalar;

/// A named field together with the parameters that generated it.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub name: String,
    pub field: ScalarField,
    pub family_params: Vec<f64>,
}

impl TestFunction {
    pub fn new(field: ScalarField, family_params: Vec<f64>) -> Self {
        TestFunction {
            name: field.name().to_string(),
            field,
            family_params,
        }
    }
}

/// Radial shapes `ψ(N)` with closed-form `ψ'` and `ψ''`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialShape {
    /// `N`
    Norm,
    /// `N²`
    NormSq,
    /// `log(1 + N²)`
    LogOnePlusSq,
    /// `1/(1 + N)`
    InvOnePlus,
    /// `clamp(N − 1, 0, 1)`
    Cutoff,
}

impl RadialShape {
    pub fn name(self) -> &'static str {
        match self {
            RadialShape::Norm => "N",
            RadialShape::NormSq => "N^2",
            RadialShape::LogOnePlusSq => "log(1+N^2)",
            RadialShape::InvOnePlus => "1/(1+N)",
            RadialShape::Cutoff => "chi(N)",
        }
    }

    pub fn apply<S: Scalar>(self, nn: S) -> S {
        match self {
            RadialShape::Norm => nn,
            RadialShape::NormSq => nn * nn,
            RadialShape::LogOnePlusSq => (nn * nn).ln_1p(),
            RadialShape::InvOnePlus => (nn + 1.0).recip(),
            RadialShape::Cutoff => (nn - 1.0).clamp_re(0.0, 1.0),
        }
    }

    /// `(ψ'(s), ψ''(s))`; the cutoff uses its one-sided interior values.
    pub fn derivatives(self, s: f64) -> (f64, f64) {
        match self {
            RadialShape::Norm => (1.0, 0.0),
            RadialShape::NormSq => (2.0 * s, 2.0),
            RadialShape::LogOnePlusSq => {
                let u = 1.0 + s * s;
                (2.0 * s / u, 2.0 * (1.0 - s * s) / (u * u))
            }
            RadialShape::InvOnePlus => {
                let u = 1.0 + s;
                (-1.0 / (u * u), 2.0 / (u * u * u))
            }
            RadialShape::Cutoff => {
                if s > 1.0 && s < 2.0 {
                    (1.0, 0.0)
                } else {
                    (0.0, 0.0)
                }
            }
        }
    }

    pub fn all_smooth() -> [RadialShape; 4] {
        [
            RadialShape::Norm,
            RadialShape::NormSq,
            RadialShape::LogOnePlusSq,
            RadialShape::InvOnePlus,
        ]
    }
}

/// `ψ(N)` as an AD-capable field.
#[derive(Debug, Clone, Copy)]
pub struct RadialField {
    pub a: f64,
    pub shape: RadialShape,
}

impl Field for RadialField {
    fn eval<S: Scalar>(&self, x: &[S], z: &[S]) -> S {
        self.shape.apply(norm_coords(self.a, x, z))
    }
}

/// `ψ(N)` with closed-form gradient `ψ'(N)∇N` and Laplacian
/// `ψ''(N)|∇N|² + ψ'(N)ΔN`.
pub fn radial_field(g: &CarnotGroup, shape: RadialShape) -> ScalarField {
    let (g1, g2) = (g.clone(), g.clone());
    ScalarField::new(shape.name(), RadialField { a: g.a(), shape })
        .with_gradient(Arc::new(move |p: &Point| {
            let (d1, _) = shape.derivatives(norm::norm(&g1, p));
            if d1 == 0.0 {
                g1.check_point(p)?;
                return Ok(vec![0.0; g1.n()]);
            }
            Ok(norm::grad_norm(&g1, p)?.into_iter().map(|v| d1 * v).collect())
        }))
        .with_laplacian(Arc::new(move |p: &Point| {
            let (d1, d2) = shape.derivatives(norm::norm(&g2, p));
            Ok(d2 * norm::grad_norm_sq(&g2, p)? + d1 * norm::laplacian_norm(&g2, p)?)
        }))
}

/// The coordinate function `xᵢ` (0-based) with its constant gradient.
pub fn coordinate_field(g: &CarnotGroup, i: usize) -> ScalarField {
    let n = g.n();
    ScalarField::new(format!("x{}", i + 1), CoordinateX(i))
        .with_gradient(Arc::new(move |_p: &Point| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            Ok(e)
        }))
        .with_laplacian(Arc::new(|_p: &Point| Ok(0.0)))
}

/// `xᵢxⱼ` (0-based).
pub fn product_field(g: &CarnotGroup, i: usize, j: usize) -> ScalarField {
    let mut exps = vec![0u32; g.n() + g.m()];
    exps[i] += 1;
    exps[j] += 1;
    ScalarField::new(
        format!("x{}*x{}", i + 1, j + 1),
        Polynomial {
            terms: vec![(1.0, exps)],
        },
    )
}

/// `c + Σ bᵢxᵢ + Σ_{i≤j} Aᵢⱼxᵢxⱼ + Σ d_k z_k` with standard normal
/// coefficients drawn from `seed`.
pub fn random_quadratic(g: &CarnotGroup, seed: u64, label: usize) -> (ScalarField, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = g.n() + g.m();
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut terms = Vec::new();
    let mut params = Vec::new();
    let c = draw();
    terms.push((c, vec![0u32; dim]));
    params.push(c);
    for i in 0..g.n() {
        let b = draw();
        let mut e = vec![0u32; dim];
        e[i] = 1;
        terms.push((b, e));
        params.push(b);
    }
    for i in 0..g.n() {
        for j in i..g.n() {
            let a = draw();
            let mut e = vec![0u32; dim];
            e[i] += 1;
            e[j] += 1;
            terms.push((a, e));
            params.push(a);
        }
    }
    for k in 0..g.m() {
        let d = draw();
        let mut e = vec![0u32; dim];
        e[g.n() + k] = 1;
        terms.push((d, e));
        params.push(d);
    }
    (
        ScalarField::new(format!("quad{label}"), Polynomial { terms }),
        params,
    )
}

/// `χ(N) = clamp(N − 1, 0, 1)`.
#[derive(Debug, Clone, Copy)]
struct CutoffField {
    a: f64,
}

impl Field for CutoffField {
    fn eval<S: Scalar>(&self, x: &[S], z: &[S]) -> S {
        (norm_coords(self.a, x, z) - 1.0).clamp_re(0.0, 1.0)
    }
}

/// `f·χ(N)`: zero on `{N ≤ 1}`, equal to `f` on `{N ≥ 2}`. The gradient is
/// assembled by the product rule from `∇f` (any backend) and `∇N`.
pub fn apply_exterior_cutoff(g: &CarnotGroup, f: &TestFunction) -> TestFunction {
    let chi = ScalarField::new("chi(N)", CutoffField { a: g.a() });
    let base = f.field.clone();
    let gg = g.clone();
    let field = f
        .field
        .product(&chi)
        .with_name(format!("cut[{}]", f.name))
        .with_gradient(Arc::new(move |p: &Point| {
            let s = norm::norm(&gg, p);
            if s <= 1.0 {
                gg.check_point(p)?;
                return Ok(vec![0.0; gg.n()]);
            }
            let df = hcalculus::sub_gradient(&gg, &base, p)?;
            if s >= 2.0 {
                return Ok(df);
            }
            let fv = base.eval(p);
            let dn = norm::grad_norm(&gg, p)?;
            Ok(df
                .iter()
                .zip(&dn)
                .map(|(a, b)| (s - 1.0) * a + fv * b)
                .collect())
        }));
    TestFunction {
        name: field.name().to_string(),
        field,
        family_params: f.family_params.clone(),
    }
}

/// Gradient self-check convenience used by the catalogs.
pub fn gradient_error(g: &CarnotGroup, f: &TestFunction, probes: &[Point]) -> Result<f64> {
    hcalculus::check_analytic_gradient(g, &f.field, probes)
}
