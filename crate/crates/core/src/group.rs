//! Step-two Carnot groups in exponential coordinates.
//!
//! A group is `ℝⁿ × ℝᵐ` with
//! `(x, z) ∘ (x', z') = (x + x', z_j + z'_j + ½⟨Λ⁽ʲ⁾x, x'⟩)`, where the
//! `Λ⁽ʲ⁾` are skew-symmetric and linearly independent. Inversion is negation
//! and `δ_λ(x, z) = (λx, λ²z)` is an automorphism.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm;
use crate::scalar::Scalar;

/// Tolerance on `max |Λ + Λᵀ|`.
pub const SKEW_TOL: f64 = 1e-12;
/// Relative singular-value threshold for the independence test.
pub const RANK_REL_TOL: f64 = 1e-9;

/// An element `(x, z)` of `ℝⁿ × ℝᵐ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
}

impl Point {
    pub fn new(x: Vec<f64>, z: Vec<f64>) -> Self {
        Point { x, z }
    }

    pub fn origin(n: usize, m: usize) -> Self {
        Point {
            x: vec![0.0; n],
            z: vec![0.0; m],
        }
    }

    /// `(x, z)⁻¹ = (−x, −z)`.
    pub fn inverse(&self) -> Point {
        Point {
            x: self.x.iter().map(|v| -v).collect(),
            z: self.z.iter().map(|v| -v).collect(),
        }
    }

    /// `δ_λ(x, z) = (λx, λ²z)`.
    pub fn dilate(&self, lambda: f64) -> Point {
        let l2 = lambda * lambda;
        Point {
            x: self.x.iter().map(|v| lambda * v).collect(),
            z: self.z.iter().map(|v| l2 * v).collect(),
        }
    }

    pub fn x_norm_sq(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }

    pub fn z_norm_sq(&self) -> f64 {
        self.z.iter().map(|v| v * v).sum()
    }

    /// Euclidean length of the full coordinate vector.
    pub fn euclidean_norm(&self) -> f64 {
        (self.x_norm_sq() + self.z_norm_sq()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.z).all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &Point) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.z.iter().zip(&other.z))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// H-type structure flags, computed from the matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HTypeFlags {
    /// Every `Λ⁽ʲ⁾ᵀΛ⁽ʲ⁾ = I`.
    pub orthogonal: bool,
    /// `Λ⁽ⁱ⁾Λ⁽ʲ⁾ = −Λ⁽ʲ⁾Λ⁽ⁱ⁾` for `i ≠ j`.
    pub anticommuting: bool,
}

impl HTypeFlags {
    pub fn is_htype(&self) -> bool {
        self.orthogonal && self.anticommuting
    }
}

/// Outcome of checking a list of structure matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupValidation {
    pub skew_ok: bool,
    pub max_skew_residual: f64,
    pub rank: usize,
    pub independent: bool,
    pub htype: HTypeFlags,
}

/// JSON-compatible group definition `{"n", "m", "lambdas", "a"}`.
///
/// `lambdas[j][i][l]` is entry `(i, l)` of `Λ⁽ʲ⁾`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDef {
    pub n: usize,
    pub m: usize,
    pub lambdas: Vec<Vec<Vec<f64>>>,
    pub a: f64,
}

/// A step-two Carnot group with norm parameter `a`. Serializes as [`GroupDef`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GroupDef", into = "GroupDef")]
pub struct CarnotGroup {
    n: usize,
    m: usize,
    /// `m` dense row-major `n×n` matrices.
    lambdas: Vec<Vec<f64>>,
    a: f64,
    htype: HTypeFlags,
}

impl CarnotGroup {
    /// Heisenberg group `Hᵈ`: `n = 2d`, `m = 1`, block-diagonal `[[0,1],[−1,0]]`, `a = 16`.
    pub fn heisenberg(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::BadDimension("Heisenberg dimension d must be ≥ 1".into()));
        }
        let n = 2 * d;
        let mut lam = vec![vec![0.0; n]; n];
        for b in 0..d {
            lam[2 * b][2 * b + 1] = 1.0;
            lam[2 * b + 1][2 * b] = -1.0;
        }
        Self::step_two(vec![lam], 16.0)
    }

    /// Builds a group from nested matrices, validating skewness, independence and `a > 0`.
    pub fn step_two(lambdas: Vec<Vec<Vec<f64>>>, a: f64) -> Result<Self> {
        let m = lambdas.len();
        if m == 0 {
            return Err(Error::BadDimension("need at least one matrix (m ≥ 1)".into()));
        }
        let n = lambdas[0].len();
        if n < 2 {
            return Err(Error::BadDimension(format!("n = {n}, need n ≥ 2")));
        }
        let mut flat = Vec::with_capacity(m);
        for (j, mat) in lambdas.iter().enumerate() {
            if mat.len() != n || mat.iter().any(|row| row.len() != n) {
                return Err(Error::BadDimension(format!(
                    "matrix {j} is not {n}×{n}"
                )));
            }
            flat.push(mat.iter().flatten().copied().collect::<Vec<f64>>());
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("norm parameter a = {a} must be > 0")));
        }
        let v = validate_matrices(n, &flat);
        if !v.skew_ok {
            let (index, residual) = flat
                .iter()
                .enumerate()
                .map(|(j, l)| (j, skew_residual(n, l)))
                .find(|(_, r)| *r > SKEW_TOL)
                .expect("skew failure has a witness");
            return Err(Error::SkewViolation { index, residual });
        }
        if !v.independent {
            return Err(Error::DependentMatrices { rank: v.rank, m });
        }
        Ok(CarnotGroup {
            n,
            m,
            lambdas: flat,
            a,
            htype: v.htype,
        })
    }

    pub fn from_def(def: &GroupDef) -> Result<Self> {
        if def.lambdas.len() != def.m {
            return Err(Error::BadDimension(format!(
                "m = {} but {} matrices given",
                def.m,
                def.lambdas.len()
            )));
        }
        let g = Self::step_two(def.lambdas.clone(), def.a)?;
        if g.n != def.n {
            return Err(Error::BadDimension(format!(
                "n = {} but matrices are {}×{}",
                def.n, g.n, g.n
            )));
        }
        Ok(g)
    }

    pub fn to_def(&self) -> GroupDef {
        GroupDef {
            n: self.n,
            m: self.m,
            lambdas: self
                .lambdas
                .iter()
                .map(|l| l.chunks(self.n).map(|r| r.to_vec()).collect())
                .collect(),
            a: self.a,
        }
    }

    /// Same matrices with a different norm parameter.
    pub fn with_a(&self, a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("norm parameter a = {a} must be > 0")));
        }
        Ok(CarnotGroup { a, ..self.clone() })
    }

    /// A seeded random step-two group: `m` independent Gaussian skew matrices.
    pub fn random(n: usize, m: usize, a: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambdas = (0..m)
            .map(|_| {
                let mut mat = vec![vec![0.0; n]; n];
                for i in 0..n {
                    for l in (i + 1)..n {
                        let v: f64 = rng.sample(StandardNormal);
                        mat[i][l] = v;
                        mat[l][i] = -v;
                    }
                }
                mat
            })
            .collect();
        Self::step_two(lambdas, a)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    /// Homogeneous dimension `Q = n + 2m`.
    pub fn q_hom(&self) -> usize {
        self.n + 2 * self.m
    }
    pub fn htype(&self) -> HTypeFlags {
        self.htype
    }
    /// Row-major entries of `Λ⁽ᵏ⁾`.
    pub fn lambda(&self, k: usize) -> &[f64] {
        &self.lambdas[k]
    }
    #[inline]
    pub fn lambda_entry(&self, k: usize, i: usize, l: usize) -> f64 {
        self.lambdas[k][i * self.n + l]
    }

    pub fn validate(&self) -> GroupValidation {
        validate_matrices(self.n, &self.lambdas)
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if p.x.len() != self.n || p.z.len() != self.m {
            return Err(Error::DimensionMismatch {
                n: self.n,
                m: self.m,
                got_n: p.x.len(),
                got_m: p.z.len(),
            });
        }
        Ok(())
    }

    /// `(Λ⁽ᵏ⁾ x)` for generic scalars.
    pub fn lambda_apply<S: Scalar>(&self, k: usize, x: &[S]) -> Vec<S> {
        let lam = &self.lambdas[k];
        (0..self.n)
            .map(|i| {
                let row = &lam[i * self.n..(i + 1) * self.n];
                let mut acc = S::zero();
                for (c, xl) in row.iter().zip(x) {
                    if *c != 0.0 {
                        acc += *xl * *c;
                    }
                }
                acc
            })
            .collect()
    }

    /// Group law on raw coordinate slices, generic over the scalar type.
    pub fn op_coords<S: Scalar>(&self, x: &[S], z: &[S], x2: &[S], z2: &[S]) -> (Vec<S>, Vec<S>) {
        let xs = x.iter().zip(x2).map(|(a, b)| *a + *b).collect();
        let zs = (0..self.m)
            .map(|k| {
                let lx = self.lambda_apply(k, x);
                let mut inner = S::zero();
                for (u, v) in lx.iter().zip(x2) {
                    inner += *u * *v;
                }
                z[k] + z2[k] + inner * 0.5
            })
            .collect();
        (xs, zs)
    }

    /// `p ∘ r`.
    pub fn op(&self, p: &Point, r: &Point) -> Result<Point> {
        self.check_point(p)?;
        self.check_point(r)?;
        let (x, z) = self.op_coords(&p.x, &p.z, &r.x, &r.z);
        Ok(Point { x, z })
    }

    /// Left-invariant quasi-distance `N(r⁻¹ ∘ p)`.
    pub fn quasi_distance(&self, p: &Point, r: &Point) -> Result<f64> {
        let y = self.op(&r.inverse(), p)?;
        Ok(norm::norm(self, &y))
    }

    /// `x ~ N(0, scale²)`, `z ~ N(0, scale⁴)` per coordinate.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Point {
        let s2 = scale * scale;
        Point {
            x: (0..self.n)
                .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                .collect(),
            z: (0..self.m)
                .map(|_| s2 * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        }
    }

    /// Deterministic single draw from a seed.
    pub fn random_point_seeded(&self, seed: u64, scale: f64) -> Point {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.random_point(&mut rng, scale)
    }
}

impl TryFrom<GroupDef> for CarnotGroup {
    type Error = Error;
    fn try_from(def: GroupDef) -> Result<Self> {
        CarnotGroup::from_def(&def)
    }
}

impl From<CarnotGroup> for GroupDef {
    fn from(g: CarnotGroup) -> GroupDef {
        g.to_def()
    }
}

fn skew_residual(n: usize, l: &[f64]) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            r = r.max((l[i * n + j] + l[j * n + i]).abs());
        }
    }
    r
}

fn mat_mul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

fn transpose(n: usize, a: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = a[i * n + j];
        }
    }
    t
}

/// Skewness, rank (SVD of the `m × n²` stack) and H-type flags of a matrix list.
pub fn validate_matrices(n: usize, lambdas: &[Vec<f64>]) -> GroupValidation {
    const HTYPE_TOL: f64 = 1e-10;
    let m = lambdas.len();
    let max_skew_residual = lambdas
        .iter()
        .map(|l| skew_residual(n, l))
        .fold(0.0, f64::max);
    let stack = DMatrix::from_fn(m, n * n, |j, e| lambdas[j][e]);
    let sv = stack.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let rank = if smax == 0.0 {
        0
    } else {
        sv.iter().filter(|s| **s > RANK_REL_TOL * smax).count()
    };
    let orthogonal = lambdas.iter().all(|l| {
        let p = mat_mul(n, &transpose(n, l), l);
        (0..n).all(|i| (0..n).all(|j| {
            let want = if i == j { 1.0 } else { 0.0 };
            (p[i * n + j] - want).abs() <= HTYPE_TOL
        }))
    });
    let mut anticommuting = true;
    for i in 0..m {
        for j in (i + 1)..m {
            let ab = mat_mul(n, &lambdas[i], &lambdas[j]);
            let ba = mat_mul(n, &lambdas[j], &lambdas[i]);
            if ab.iter().zip(&ba).any(|(u, v)| (u + v).abs() > HTYPE_TOL) {
                anticommuting = false;
            }
        }
    }
    GroupValidation {
        skew_ok: max_skew_residual <= SKEW_TOL,
        max_skew_residual,
        rank,
        independent: rank == m,
        htype: HTypeFlags {
            orthogonal,
            anticommuting,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h1() -> CarnotGroup {
        CarnotGroup::heisenberg(1).unwrap()
    }

    #[test]
    fn heisenberg_shape() {
        let g = h1();
        assert_eq!((g.n(), g.m(), g.q_hom()), (2, 1, 4));
        assert_eq!(g.a(), 16.0);
        assert!(g.validate().skew_ok);
        let g2 = CarnotGroup::heisenberg(2).unwrap();
        assert_eq!(
            g2.htype(),
            HTypeFlags {
                orthogonal: true,
                anticommuting: true
            }
        );
    }

    #[test]
    fn step_two_matches_heisenberg() {
        let g = CarnotGroup::step_two(vec![vec![vec![0.0, 1.0], vec![-1.0, 0.0]]], 16.0).unwrap();
        assert_eq!(g, h1());
    }

    #[test]
    fn rejects_symmetric_and_dependent() {
        let sym = CarnotGroup::step_two(vec![vec![vec![0.0, 1.0], vec![1.0, 0.0]]], 16.0);
        assert!(matches!(sym, Err(Error::SkewViolation { .. })));
        let l = vec![vec![0.0, 1.0], vec![-1.0, 0.0]];
        let l2 = vec![vec![0.0, 2.0], vec![-2.0, 0.0]];
        let dep = CarnotGroup::step_two(vec![l, l2], 16.0);
        assert!(matches!(dep, Err(Error::DependentMatrices { rank: 1, m: 2 })));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            CarnotGroup::step_two(vec![vec![vec![0.0, 1.0, 0.0], vec![-1.0, 0.0]]], 1.0),
            Err(Error::BadDimension(_))
        ));
        assert!(matches!(CarnotGroup::heisenberg(0), Err(Error::BadDimension(_))));
        assert!(CarnotGroup::heisenberg(1).unwrap().with_a(-1.0).is_err());
    }

    #[test]
    fn group_law_examples() {
        let g = h1();
        let p = Point::new(vec![1.0, 0.0], vec![0.5]);
        assert_eq!(g.op(&p, &Point::origin(2, 1)).unwrap(), p);
        let e1 = Point::new(vec![1.0, 0.0], vec![0.0]);
        let e2 = Point::new(vec![0.0, 1.0], vec![0.0]);
        assert_eq!(g.op(&e1, &e2).unwrap(), Point::new(vec![1.0, 1.0], vec![-0.5]));
        let q = Point::new(vec![1.0, 2.0], vec![3.0]);
        assert_eq!(q.inverse(), Point::new(vec![-1.0, -2.0], vec![-3.0]));
        assert_eq!(g.op(&q, &q.inverse()).unwrap(), Point::origin(2, 1));
        assert_eq!(Point::origin(2, 1).inverse(), Point::origin(2, 1));
    }

    #[test]
    fn dilation_examples() {
        let p = Point::new(vec![1.0, 2.0], vec![4.0]);
        assert_eq!(p.dilate(3.0), Point::new(vec![3.0, 6.0], vec![36.0]));
        assert_eq!(p.dilate(1.0), p);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = h1();
        let bad = Point::new(vec![1.0], vec![0.0]);
        assert!(matches!(
            g.op(&bad, &Point::origin(2, 1)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn quasi_distance_basics() {
        let g = h1();
        let p = Point::new(vec![0.3, -1.2], vec![0.7]);
        assert_eq!(g.quasi_distance(&p, &p).unwrap(), 0.0);
        let d0 = g.quasi_distance(&p, &Point::origin(2, 1)).unwrap();
        assert!((d0 - norm::norm(&g, &p)).abs() < 1e-15);
    }

    #[test]
    fn random_point_is_deterministic() {
        let g = CarnotGroup::random(4, 2, 1.0, 7).unwrap();
        let a = g.random_point_seeded(11, 1.0);
        let b = g.random_point_seeded(11, 1.0);
        assert_eq!(a, b);
        assert!(a.is_finite());
    }

    #[test]
    fn random_skew_pair_is_not_orthogonal() {
        let g = CarnotGroup::random(4, 2, 1.0, 3).unwrap();
        assert!(!g.htype().orthogonal);
    }

    #[test]
    fn def_json_round_trip_is_bit_exact() {
        let g = CarnotGroup::random(5, 3, 0.1 + 0.2, 99).unwrap();
        let json = serde_json::to_string(&g.to_def()).unwrap();
        let back: GroupDef = serde_json::from_str(&json).unwrap();
        let g2 = CarnotGroup::from_def(&back).unwrap();
        for k in 0..3 {
            for (u, v) in g.lambda(k).iter().zip(g2.lambda(k)) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
        assert_eq!(g.a().to_bits(), g2.a().to_bits());
    }

    #[test]
    fn def_rejects_unknown_keys() {
        let r: std::result::Result<GroupDef, _> =
            serde_json::from_str(r#"{"n":2,"m":1,"lambdas":[[[0,1],[-1,0]]],"a":16,"extra":1}"#);
        assert!(r.is_err());
    }
}
