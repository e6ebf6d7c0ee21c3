//! Horizontal calculus: the left-invariant fields
//! `Xᵢ = ∂/∂xᵢ + ½ Σ_k Σ_l Λ⁽ᵏ⁾ᵢₗ x_l ∂/∂z_k`, the sub-gradient `∇ = (Xᵢ)` and
//! the sub-Laplacian `Δ = Σ Xᵢ²`.
//!
//! The integral curve of `Xᵢ` through `p` is `t ↦ p ∘ (t eᵢ, 0)`, which is
//! affine in the coordinates. The dual-number backend differentiates along it
//! exactly; `XᵢXⱼ f(p)` is the mixed `ε₁ε₂` coefficient of
//! `f(p ∘ (ε₁eᵢ, 0) ∘ (ε₂eⱼ, 0))`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{CarnotGroup, Point};
use crate::scalar::{Dual, HyperDual, Scalar};

/// Relative central-difference step: `h = FD_STEP · max(1, |p|)`.
pub const FD_STEP: f64 = 1e-5;

/// Differentiation backend preferred by a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffMode {
    /// Closed-form gradient/Laplacian when attached, dual numbers otherwise.
    Analytic,
    DualNumber,
    CentralDifference,
}

impl DiffMode {
    fn label(self) -> &'static str {
        match self {
            DiffMode::Analytic => "analytic",
            DiffMode::DualNumber => "dual_number",
            DiffMode::CentralDifference => "central_difference",
        }
    }
}

/// A smooth field written once for every scalar type.
pub trait Field: Send + Sync {
    fn eval<S: Scalar>(&self, x: &[S], z: &[S]) -> S;
}

/// Scalars a type-erased field can be evaluated with.
pub trait FieldScalar: Scalar {
    fn eval_dyn(f: &dyn DynField, x: &[Self], z: &[Self]) -> Option<Self>;
    /// Evaluates a plain `f64` closure; `None` for derivative-carrying types.
    fn eval_plain(f: &PlainFn, x: &[Self], z: &[Self]) -> Option<Self>;
}

pub type PlainFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

impl FieldScalar for f64 {
    fn eval_dyn(f: &dyn DynField, x: &[f64], z: &[f64]) -> Option<f64> {
        Some(f.value(x, z))
    }
    fn eval_plain(f: &PlainFn, x: &[f64], z: &[f64]) -> Option<f64> {
        Some(f(x, z))
    }
}

impl FieldScalar for Dual {
    fn eval_dyn(f: &dyn DynField, x: &[Dual], z: &[Dual]) -> Option<Dual> {
        f.value_dual(x, z)
    }
    fn eval_plain(_: &PlainFn, _: &[Dual], _: &[Dual]) -> Option<Dual> {
        None
    }
}

impl FieldScalar for HyperDual {
    fn eval_dyn(f: &dyn DynField, x: &[HyperDual], z: &[HyperDual]) -> Option<HyperDual> {
        f.value_hyper(x, z)
    }
    fn eval_plain(_: &PlainFn, _: &[HyperDual], _: &[HyperDual]) -> Option<HyperDual> {
        None
    }
}

/// A field that may only support some scalar types.
pub trait PartialField: Send + Sync {
    fn try_eval<S: FieldScalar>(&self, x: &[S], z: &[S]) -> Option<S>;
}

impl<T: Field> PartialField for T {
    fn try_eval<S: FieldScalar>(&self, x: &[S], z: &[S]) -> Option<S> {
        Some(self.eval(x, z))
    }
}

/// Object-safe evaluation interface.
pub trait DynField: Send + Sync {
    fn value(&self, x: &[f64], z: &[f64]) -> f64;
    fn value_dual(&self, x: &[Dual], z: &[Dual]) -> Option<Dual>;
    fn value_hyper(&self, x: &[HyperDual], z: &[HyperDual]) -> Option<HyperDual>;
}

impl<T: PartialField> DynField for T {
    fn value(&self, x: &[f64], z: &[f64]) -> f64 {
        self.try_eval(x, z).expect("every field evaluates on f64")
    }
    fn value_dual(&self, x: &[Dual], z: &[Dual]) -> Option<Dual> {
        self.try_eval(x, z)
    }
    fn value_hyper(&self, x: &[HyperDual], z: &[HyperDual]) -> Option<HyperDual> {
        self.try_eval(x, z)
    }
}

/// A plain closure; only finite differences can differentiate it.
pub struct FnField(Box<PlainFn>);

impl PartialField for FnField {
    fn try_eval<S: FieldScalar>(&self, x: &[S], z: &[S]) -> Option<S> {
        S::eval_plain(&*self.0, x, z)
    }
}

pub type GradFn = Arc<dyn Fn(&Point) -> Result<Vec<f64>> + Send + Sync>;
pub type LaplacianFn = Arc<dyn Fn(&Point) -> Result<f64> + Send + Sync>;

/// A named scalar field with optional closed-form derivatives.
#[derive(Clone)]
pub struct ScalarField {
    name: String,
    inner: Arc<dyn DynField>,
    grad: Option<GradFn>,
    laplacian: Option<LaplacianFn>,
    mode: DiffMode,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("mode", &self.mode)
            .field("analytic_grad", &self.grad.is_some())
            .field("analytic_laplacian", &self.laplacian.is_some())
            .finish()
    }
}

impl ScalarField {
    /// Wraps an AD-capable field; defaults to dual-number mode.
    pub fn new(name: impl Into<String>, field: impl PartialField + 'static) -> Self {
        ScalarField {
            name: name.into(),
            inner: Arc::new(field),
            grad: None,
            laplacian: None,
            mode: DiffMode::DualNumber,
        }
    }

    pub fn from_dyn(name: impl Into<String>, inner: Arc<dyn DynField>) -> Self {
        ScalarField {
            name: name.into(),
            inner,
            grad: None,
            laplacian: None,
            mode: DiffMode::DualNumber,
        }
    }

    /// A closure field; central-difference mode.
    pub fn from_fn<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        ScalarField {
            name: name.into(),
            inner: Arc::new(FnField(Box::new(f))),
            grad: None,
            laplacian: None,
            mode: DiffMode::CentralDifference,
        }
    }

    /// Attaches a closed-form horizontal gradient and switches to analytic mode.
    pub fn with_gradient(mut self, grad: GradFn) -> Self {
        self.grad = Some(grad);
        self.mode = DiffMode::Analytic;
        self
    }

    pub fn with_laplacian(mut self, lap: LaplacianFn) -> Self {
        self.laplacian = Some(lap);
        self
    }

    pub fn with_mode(mut self, mode: DiffMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn mode(&self) -> DiffMode {
        self.mode
    }
    pub fn has_analytic_gradient(&self) -> bool {
        self.grad.is_some()
    }
    pub fn inner(&self) -> &Arc<dyn DynField> {
        &self.inner
    }
    pub fn analytic_gradient(&self) -> Option<&GradFn> {
        self.grad.as_ref()
    }

    pub fn eval(&self, p: &Point) -> f64 {
        self.inner.value(&p.x, &p.z)
    }

    pub fn eval_coords(&self, x: &[f64], z: &[f64]) -> f64 {
        self.inner.value(x, z)
    }

    fn unsupported(&self, mode: DiffMode) -> Error {
        Error::UnsupportedMode {
            field: self.name.clone(),
            mode: mode.label(),
        }
    }

    /// `f ∘ τ_h`, i.e. `p ↦ f(h ∘ p)`. Closed-form derivatives are dropped.
    pub fn left_translate(&self, g: &CarnotGroup, h: &Point) -> ScalarField {
        ScalarField {
            name: format!("{}∘τ", self.name),
            inner: Arc::new(Translated {
                inner: self.inner.clone(),
                group: g.clone(),
                h: h.clone(),
            }),
            grad: None,
            laplacian: None,
            mode: if self.mode == DiffMode::Analytic {
                DiffMode::DualNumber
            } else {
                self.mode
            },
        }
    }

    /// `c·f`; an analytic gradient is scaled along.
    pub fn scaled(&self, c: f64) -> ScalarField {
        let grad = self.grad.clone().map(|gf| -> GradFn {
            Arc::new(move |p: &Point| Ok(gf(p)?.into_iter().map(|v| c * v).collect()))
        });
        let lap = self.laplacian.clone().map(|lf| -> LaplacianFn {
            Arc::new(move |p: &Point| Ok(c * lf(p)?))
        });
        ScalarField {
            name: format!("{c}·{}", self.name),
            inner: Arc::new(Affine {
                inner: self.inner.clone(),
                scale: c,
                shift: 0.0,
            }),
            grad,
            laplacian: lap,
            mode: self.mode,
        }
    }

    /// `f + c`.
    pub fn shifted(&self, c: f64) -> ScalarField {
        ScalarField {
            name: format!("{}+{c}", self.name),
            inner: Arc::new(Affine {
                inner: self.inner.clone(),
                scale: 1.0,
                shift: c,
            }),
            ..self.clone()
        }
    }

    /// Pointwise product; no closed-form derivatives.
    pub fn product(&self, other: &ScalarField) -> ScalarField {
        let mode = match (self.mode, other.mode) {
            (DiffMode::CentralDifference, _) | (_, DiffMode::CentralDifference) => {
                DiffMode::CentralDifference
            }
            _ => DiffMode::DualNumber,
        };
        ScalarField {
            name: format!("({})·({})", self.name, other.name),
            inner: Arc::new(Product {
                a: self.inner.clone(),
                b: other.inner.clone(),
            }),
            grad: None,
            laplacian: None,
            mode,
        }
    }
}

struct Translated {
    inner: Arc<dyn DynField>,
    group: CarnotGroup,
    h: Point,
}

impl PartialField for Translated {
    fn try_eval<S: FieldScalar>(&self, x: &[S], z: &[S]) -> Option<S> {
        let hx: Vec<S> = self.h.x.iter().map(|v| S::cst(*v)).collect();
        let hz: Vec<S> = self.h.z.iter().map(|v| S::cst(*v)).collect();
        let (tx, tz) = self.group.op_coords(&hx, &hz, x, z);
        S::eval_dyn(&*self.inner, &tx, &tz)
    }
}

struct Affine {
    inner: Arc<dyn DynField>,
    scale: f64,
    shift: f64,
}

impl PartialField for Affine {
    fn try_eval<S: FieldScalar>(&self, x: &[S], z: &[S]) -> Option<S> {
        Some(S::eval_dyn(&*self.inner, x, z)? * self.scale + self.shift)
    }
}

struct Product {
    a: Arc<dyn DynField>,
    b: Arc<dyn DynField>,
}

impl PartialField for Product {
    fn try_eval<S: FieldScalar>(&self, x: &[S], z: &[S]) -> Option<S> {
        Some(S::eval_dyn(&*self.a, x, z)? * S::eval_dyn(&*self.b, x, z)?)
    }
}

fn check_index(g: &CarnotGroup, i: usize) -> Result<()> {
    if i >= g.n() {
        return Err(Error::IndexOutOfRange { index: i, n: g.n() });
    }
    Ok(())
}

/// Central-difference step at `p`.
pub fn fd_step(p: &Point) -> f64 {
    FD_STEP * p.euclidean_norm().max(1.0)
}

/// Coefficient vector of `Xᵢ` at `p` in the `(∂x, ∂z)` basis.
pub fn xi_coefficients(g: &CarnotGroup, i: usize, p: &Point) -> Result<Vec<f64>> {
    check_index(g, i)?;
    g.check_point(p)?;
    let mut v = vec![0.0; g.n() + g.m()];
    v[i] = 1.0;
    for k in 0..g.m() {
        let s: f64 = (0..g.n()).map(|l| g.lambda_entry(k, i, l) * p.x[l]).sum();
        v[g.n() + k] = 0.5 * s;
    }
    Ok(v)
}

fn xi_dual(g: &CarnotGroup, i: usize, f: &ScalarField, p: &Point) -> Result<f64> {
    let px: Vec<Dual> = p.x.iter().map(|v| Dual::cst(*v)).collect();
    let pz: Vec<Dual> = p.z.iter().map(|v| Dual::cst(*v)).collect();
    let mut ex = vec![Dual::cst(0.0); g.n()];
    ex[i] = Dual::new(0.0, 1.0);
    let ez = vec![Dual::cst(0.0); g.m()];
    let (x, z) = g.op_coords(&px, &pz, &ex, &ez);
    f.inner
        .value_dual(&x, &z)
        .map(|d| d.du)
        .ok_or_else(|| f.unsupported(DiffMode::DualNumber))
}

/// `Xᵢ Xⱼ f(p)` from one hyper-dual evaluation.
fn xixj_hyper(g: &CarnotGroup, i: usize, j: usize, f: &ScalarField, p: &Point) -> Result<f64> {
    let px: Vec<HyperDual> = p.x.iter().map(|v| HyperDual::cst(*v)).collect();
    let pz: Vec<HyperDual> = p.z.iter().map(|v| HyperDual::cst(*v)).collect();
    let zero_z = vec![HyperDual::cst(0.0); g.m()];
    let mut e1 = vec![HyperDual::cst(0.0); g.n()];
    e1[i] = HyperDual::new(0.0, 1.0, 0.0, 0.0);
    let (x1, z1) = g.op_coords(&px, &pz, &e1, &zero_z);
    let mut e2 = vec![HyperDual::cst(0.0); g.n()];
    e2[j] = HyperDual::new(0.0, 0.0, 1.0, 0.0);
    let (x2, z2) = g.op_coords(&x1, &z1, &e2, &zero_z);
    f.inner
        .value_hyper(&x2, &z2)
        .map(|d| d.e12)
        .ok_or_else(|| f.unsupported(DiffMode::DualNumber))
}

/// Central-difference partials `(∂f/∂x, ∂f/∂z)` at `p` with step `h`.
pub fn fd_partials(f: &ScalarField, p: &Point, h: f64) -> (Vec<f64>, Vec<f64>) {
    let mut q = p.clone();
    let mut dx = Vec::with_capacity(p.x.len());
    for i in 0..p.x.len() {
        let v = q.x[i];
        q.x[i] = v + h;
        let fp = f.eval(&q);
        q.x[i] = v - h;
        let fm = f.eval(&q);
        q.x[i] = v;
        dx.push((fp - fm) / (2.0 * h));
    }
    let mut dz = Vec::with_capacity(p.z.len());
    for k in 0..p.z.len() {
        let v = q.z[k];
        q.z[k] = v + h;
        let fp = f.eval(&q);
        q.z[k] = v - h;
        let fm = f.eval(&q);
        q.z[k] = v;
        dz.push((fp - fm) / (2.0 * h));
    }
    (dx, dz)
}

/// `Xᵢ f(p)` from central-difference partials with step `h`.
pub fn xi_apply_fd(g: &CarnotGroup, i: usize, f: &ScalarField, p: &Point, h: f64) -> Result<f64> {
    let coeff = xi_coefficients(g, i, p)?;
    let (dx, dz) = fd_partials(f, p, h);
    Ok(dx[i] + (0..g.m()).map(|k| coeff[g.n() + k] * dz[k]).sum::<f64>())
}

/// `Xᵢ f(p)` using the field's preferred backend (`i` is 0-based).
pub fn xi_apply(g: &CarnotGroup, i: usize, f: &ScalarField, p: &Point) -> Result<f64> {
    check_index(g, i)?;
    g.check_point(p)?;
    match f.mode {
        DiffMode::Analytic => match &f.grad {
            Some(gf) => Ok(gf(p)?[i]),
            None => xi_dual(g, i, f, p),
        },
        DiffMode::DualNumber => xi_dual(g, i, f, p),
        DiffMode::CentralDifference => xi_apply_fd(g, i, f, p, fd_step(p)),
    }
}

/// `∇f(p) = (X₁f, …, Xₙf)`.
pub fn sub_gradient(g: &CarnotGroup, f: &ScalarField, p: &Point) -> Result<Vec<f64>> {
    g.check_point(p)?;
    if f.mode == DiffMode::Analytic {
        if let Some(gf) = &f.grad {
            return gf(p);
        }
    }
    (0..g.n()).map(|i| xi_apply(g, i, f, p)).collect()
}

/// Sub-gradient forced through a specific backend (analytic needs a gradient).
pub fn sub_gradient_with(
    g: &CarnotGroup,
    f: &ScalarField,
    p: &Point,
    mode: DiffMode,
) -> Result<Vec<f64>> {
    g.check_point(p)?;
    match mode {
        DiffMode::Analytic => match &f.grad {
            Some(gf) => gf(p),
            None => Err(f.unsupported(DiffMode::Analytic)),
        },
        DiffMode::DualNumber => (0..g.n()).map(|i| xi_dual(g, i, f, p)).collect(),
        DiffMode::CentralDifference => {
            let h = fd_step(p);
            (0..g.n()).map(|i| xi_apply_fd(g, i, f, p, h)).collect()
        }
    }
}

/// `XᵢXⱼ f(p)`: hyper-dual, or nested central differences in FD mode.
pub fn xixj_apply(g: &CarnotGroup, i: usize, j: usize, f: &ScalarField, p: &Point) -> Result<f64> {
    check_index(g, i)?;
    check_index(g, j)?;
    g.check_point(p)?;
    match f.mode {
        DiffMode::CentralDifference => nested_fd(g, i, j, f, p),
        _ => xixj_hyper(g, i, j, f, p),
    }
}

fn nested_fd(g: &CarnotGroup, i: usize, j: usize, f: &ScalarField, p: &Point) -> Result<f64> {
    let h = fd_step(p);
    // Xᵢ applied to q ↦ Xⱼ f(q), both by central differences along Xᵢ's line.
    let mut e = Point::origin(g.n(), g.m());
    e.x[i] = h;
    let fwd = g.op(p, &e)?;
    let bwd = g.op(p, &e.inverse())?;
    let hj_f = xi_apply_fd(g, j, f, &fwd, h)?;
    let hj_b = xi_apply_fd(g, j, f, &bwd, h)?;
    Ok((hj_f - hj_b) / (2.0 * h))
}

/// `[Xᵢ, Xⱼ] f(p) = XᵢXⱼf − XⱼXᵢf`.
pub fn bracket_apply(g: &CarnotGroup, i: usize, j: usize, f: &ScalarField, p: &Point) -> Result<f64> {
    Ok(xixj_apply(g, i, j, f, p)? - xixj_apply(g, j, i, f, p)?)
}

/// `∂f/∂z_k (p)` (dual numbers, or central difference in FD mode).
pub fn z_partial(g: &CarnotGroup, k: usize, f: &ScalarField, p: &Point) -> Result<f64> {
    g.check_point(p)?;
    if k >= g.m() {
        return Err(Error::IndexOutOfRange { index: k, n: g.m() });
    }
    if f.mode == DiffMode::CentralDifference {
        return Ok(fd_partials(f, p, fd_step(p)).1[k]);
    }
    let x: Vec<Dual> = p.x.iter().map(|v| Dual::cst(*v)).collect();
    let mut z: Vec<Dual> = p.z.iter().map(|v| Dual::cst(*v)).collect();
    z[k].du = 1.0;
    f.inner
        .value_dual(&x, &z)
        .map(|d| d.du)
        .ok_or_else(|| f.unsupported(DiffMode::DualNumber))
}

/// `Δf(p) = Σᵢ Xᵢ² f(p)` using the preferred backend.
pub fn sub_laplacian(g: &CarnotGroup, f: &ScalarField, p: &Point) -> Result<f64> {
    g.check_point(p)?;
    if f.mode == DiffMode::Analytic {
        if let Some(lf) = &f.laplacian {
            return lf(p);
        }
    }
    (0..g.n()).map(|i| xixj_apply(g, i, i, f, p)).sum()
}

/// Fourth-order stencil for `Δf` along the affine curves `t ↦ p ∘ (t eᵢ, 0)`.
pub fn sub_laplacian_fd4(g: &CarnotGroup, f: &ScalarField, p: &Point, h: f64) -> Result<f64> {
    g.check_point(p)?;
    let f0 = f.eval(p);
    let mut total = 0.0;
    for i in 0..g.n() {
        let at = |t: f64| -> Result<f64> {
            let mut e = Point::origin(g.n(), g.m());
            e.x[i] = t;
            Ok(f.eval(&g.op(p, &e)?))
        };
        let (p1, m1, p2, m2) = (at(h)?, at(-h)?, at(2.0 * h)?, at(-2.0 * h)?);
        total += (-p2 + 16.0 * p1 - 30.0 * f0 + 16.0 * m1 - m2) / (12.0 * h * h);
    }
    Ok(total)
}

/// Max relative disagreement between an attached analytic gradient and
/// central differences over `probes`.
pub fn check_analytic_gradient(g: &CarnotGroup, f: &ScalarField, probes: &[Point]) -> Result<f64> {
    let gf = f.grad.as_ref().ok_or_else(|| f.unsupported(DiffMode::Analytic))?;
    let mut worst: f64 = 0.0;
    for p in probes {
        let a = gf(p)?;
        let h = fd_step(p);
        let b = (0..g.n())
            .map(|i| xi_apply_fd(g, i, f, p, h))
            .collect::<Result<Vec<_>>>()?;
        let diff = a.iter().zip(&b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        let scale = a
            .iter()
            .map(|u| u * u)
            .sum::<f64>()
            .sqrt()
            .max(b.iter().map(|u| u * u).sum::<f64>().sqrt())
            .max(1e-8);
        worst = worst.max(diff / scale);
    }
    Ok(worst)
}

/// Jacobian at the origin of the left translation by `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeftJacobian {
    /// Row-major `(n+m)×(n+m)`.
    pub matrix: Vec<f64>,
    pub dim: usize,
}

impl LeftJacobian {
    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.dim + col]
    }
    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.dim).map(|r| self.entry(r, col)).collect()
    }
}

pub fn left_jacobian(g: &CarnotGroup, p: &Point) -> Result<LeftJacobian> {
    g.check_point(p)?;
    let (n, m) = (g.n(), g.m());
    let dim = n + m;
    let mut mat = vec![0.0; dim * dim];
    for d in 0..dim {
        mat[d * dim + d] = 1.0;
    }
    for k in 0..m {
        for i in 0..n {
            let s: f64 = (0..n).map(|l| g.lambda_entry(k, i, l) * p.x[l]).sum();
            mat[(n + k) * dim + i] = 0.5 * s;
        }
    }
    Ok(LeftJacobian { matrix: mat, dim })
}

/// Monomial-sum polynomial in `(x, z)`; exact under every backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    /// `(coefficient, exponents over x₁..xₙ, z₁..z_m)`.
    pub terms: Vec<(f64, Vec<u32>)>,
}

impl Field for Polynomial {
    fn eval<S: Scalar>(&self, x: &[S], z: &[S]) -> S {
        let mut acc = S::zero();
        for (c, exps) in &self.terms {
            let mut t = S::cst(*c);
            for (v, e) in x.iter().chain(z).zip(exps) {
                if *e > 0 {
                    t *= v.powi(*e as i32);
                }
            }
            acc += t;
        }
        acc
    }
}

/// The coordinate function `xᵢ`.
#[derive(Debug, Clone, Copy)]
pub struct CoordinateX(pub usize);

impl Field for CoordinateX {
    fn eval<S: Scalar>(&self, x: &[S], _z: &[S]) -> S {
        x[self.0]
    }
}

/// The coordinate function `z_k`.
#[derive(Debug, Clone, Copy)]
pub struct CoordinateZ(pub usize);

impl Field for CoordinateZ {
    fn eval<S: Scalar>(&self, _x: &[S], z: &[S]) -> S {
        z[self.0]
    }
}

/// A constant field.
#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl Field for Constant {
    fn eval<S: Scalar>(&self, _x: &[S], _z: &[S]) -> S {
        S::cst(self.0)
    }
}
