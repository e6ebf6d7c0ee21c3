use carnot_core::hcalculus::{sub_gradient, sub_laplacian, Field};
use carnot_core::norm::{
    estimate_lemma2_constants, grad_norm, grad_norm_sq, laplacian_norm, norm, norm_coords,
    radial_identity_residual,
};
use carnot_core::scalar::Scalar;
use carnot_core::{CarnotGroup, Point, ScalarField};
use nalgebra::DMatrix;
use proptest::prelude::*;

struct NormField(f64);

impl Field for NormField {
    fn eval<S: Scalar>(&self, x: &[S], z: &[S]) -> S {
        norm_coords(self.0, x, z)
    }
}

/// Extreme singular values of `Λ(ẑ) = cos θ Λ₁ + sin θ Λ₂` over a fine θ grid.
fn sigma_range(g: &CarnotGroup) -> (f64, f64) {
    let n = g.n();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let steps = 20_000;
    for k in 0..steps {
        let th = std::f64::consts::PI * k as f64 / steps as f64;
        let m = DMatrix::from_fn(n, n, |i, j| th.cos() * g.lambda_entry(0, i, j) + th.sin() * g.lambda_entry(1, i, j));
        let sv = m.singular_values();
        lo = lo.min(sv.min());
        hi = hi.max(sv.max());
    }
    (lo, hi)
}

#[test]
fn norm_constants_match_singular_value_oracle() {
    // seed 7: the Pfaffian of Λ(ẑ) has no zero on the circle, so a_hat > 0
    let g = CarnotGroup::random(4, 2, 16.0, 7).unwrap();
    let (lo, hi) = sigma_range(&g);
    let r = estimate_lemma2_constants(&g, 20_000, 1, (0.5, 2.0)).unwrap();
    let (a_want, c_want) = ((lo * lo).min(1.0), (hi * hi).max(1.0));
    assert!((r.a_hat - a_want).abs() < 1e-6 * a_want, "{} vs {a_want}", r.a_hat);
    assert!((r.c_hat - c_want).abs() < 1e-6 * c_want, "{} vs {c_want}", r.c_hat);
}

#[test]
fn norm_constants_on_heisenberg_are_exact() {
    let g = CarnotGroup::heisenberg(2).unwrap();
    let r = estimate_lemma2_constants(&g, 5_000, 9, (0.1, 10.0)).unwrap();
    assert!((r.a_hat - 1.0).abs() < 1e-9 && (r.c_hat - 1.0).abs() < 1e-9);
    // ΔN·N³/|x|² = Q − 1
    assert!((r.b_hat - 5.0).abs() < 1e-6);
    assert!(r.laplacian_nonnegative);
    assert!(r.max_radial_residual < 1e-12);
    assert!(estimate_lemma2_constants(&g, 999, 0, (1.0, 2.0)).is_err());
}

#[test]
fn closed_forms_on_heisenberg() {
    let g = CarnotGroup::heisenberg(1).unwrap();
    let p = Point::new(vec![1.0, 0.0], vec![0.5]);
    // N⁴ = 1 + 16·0.25 = 5
    let nn = 5f64.powf(0.25);
    assert!((norm(&g, &p) - nn).abs() < 1e-15);
    assert!((grad_norm_sq(&g, &p).unwrap() - 1.0 / (nn * nn)).abs() < 1e-14);
    assert!((laplacian_norm(&g, &p).unwrap() - 3.0 / nn.powi(3)).abs() < 1e-14);
}

fn group() -> impl Strategy<Value = CarnotGroup> {
    prop_oneof![
        Just(CarnotGroup::heisenberg(1).unwrap()),
        any::<u64>().prop_map(|s| CarnotGroup::random(4, 2, 16.0, s).unwrap()),
        (any::<u64>(), 0.5f64..30.0).prop_map(|(s, a)| CarnotGroup::random(3, 1, a, s).unwrap()),
    ]
}

fn group_and_point() -> impl Strategy<Value = (CarnotGroup, Point)> {
    group().prop_flat_map(|g| {
        let pt = (
            prop::collection::vec(-2.0f64..2.0, g.n()),
            prop::collection::vec(-2.0f64..2.0, g.m()),
        )
            .prop_map(|(x, z)| Point::new(x, z));
        (Just(g), pt)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn homogeneity((g, p) in group_and_point(), lam in 0.05f64..20.0) {
        prop_assume!(p.x_norm_sq() > 1e-6);
        let n1 = norm(&g, &p);
        prop_assert!((norm(&g, &p.dilate(lam)) - lam * n1).abs() < 1e-12 * lam * n1.max(1.0));
        // |∇N|² is 0-homogeneous, ΔN is (−1)-homogeneous
        let g1 = grad_norm_sq(&g, &p).unwrap();
        prop_assert!((grad_norm_sq(&g, &p.dilate(lam)).unwrap() - g1).abs() < 1e-10 * (1.0 + g1));
        let l1 = laplacian_norm(&g, &p).unwrap();
        prop_assert!((lam * laplacian_norm(&g, &p.dilate(lam)).unwrap() - l1).abs() < 1e-9 * (1.0 + l1.abs()));
    }

    #[test]
    fn closed_forms_match_dual_numbers((g, p) in group_and_point()) {
        prop_assume!(p.x_norm_sq() > 1e-4);
        let f = ScalarField::new("N", NormField(g.a()));
        let ad = sub_gradient(&g, &f, &p).unwrap();
        let cf = grad_norm(&g, &p).unwrap();
        for (u, v) in ad.iter().zip(&cf) {
            prop_assert!((u - v).abs() < 1e-10 * (1.0 + v.abs()));
        }
        let lap = sub_laplacian(&g, &f, &p).unwrap();
        let lcf = laplacian_norm(&g, &p).unwrap();
        prop_assert!((lap - lcf).abs() < 1e-8 * (1.0 + lcf.abs()), "{} vs {}", lap, lcf);
    }

    #[test]
    fn radial_identity((g, p) in group_and_point()) {
        prop_assume!(p.x_norm_sq() > 1e-4);
        let r = radial_identity_residual(&g, &p).unwrap();
        prop_assert!(r.abs() < 1e-10, "{}", r);
    }
}
