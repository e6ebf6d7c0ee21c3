//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Runtime budgets are printed next to the
//! measured time for reference only.

use std::time::{Duration, Instant};

use carnot_core::hcalculus::{
    bracket_apply, check_analytic_gradient, sub_laplacian, xi_apply, z_partial, Field, Polynomial,
};
use carnot_core::lab::catalog::run_catalog;
use carnot_core::lab::fields::radial_field;
use carnot_core::lab::fit::grid_search;
use carnot_core::lab::{
    apply_exterior_cutoff, beta_entropy, energy, fit_constants, lq_mean_deviation, ubound_lhs,
    CatalogKind, CatalogOptions, FitRow, RadialShape, TestFunction,
};
use carnot_core::measures::conditions::default_grid;
use carnot_core::measures::{
    check_eta_unbounded, check_theorem11_conditions, check_theorem1_condition, mcmc_sample,
    BoltzmannMeasure, GProfile,
};
use carnot_core::nogo::{run_nogo, NoGoParams};
use carnot_core::norm::{estimate_lemma2_constants, norm_coords, NormGeometryReport};
use carnot_core::scalar::Scalar;
use carnot_core::{CarnotGroup, Point, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_point<R: Rng>(g: &CarnotGroup, rng: &mut R, scale: f64) -> Point {
    Point::new(
        (0..g.n()).map(|_| rng.random_range(-scale..scale)).collect(),
        (0..g.m()).map(|_| rng.random_range(-scale..scale)).collect(),
    )
}

fn random_group<R: Rng>(rng: &mut R) -> CarnotGroup {
    let n = rng.random_range(2..6);
    let m = rng.random_range(1..=(n * (n - 1) / 2).min(3));
    CarnotGroup::random(n, m, rng.random_range(0.5..20.0), rng.random()).unwrap()
}

fn c1_group_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tol = 1e-10;
    let mut worst = [0.0f64; 5];
    for _ in 0..1000 {
        let g = random_group(&mut rng);
        let (p, q, r) = (random_point(&g, &mut rng, 2.0), random_point(&g, &mut rng, 2.0), random_point(&g, &mut rng, 2.0));
        let e = Point::origin(g.n(), g.m());
        let l = g.op(&g.op(&p, &q).unwrap(), &r).unwrap();
        let rr = g.op(&p, &g.op(&q, &r).unwrap()).unwrap();
        worst[0] = worst[0].max(l.max_abs_diff(&rr));
        worst[1] = worst[1]
            .max(g.op(&p, &e).unwrap().max_abs_diff(&p))
            .max(g.op(&e, &p).unwrap().max_abs_diff(&p));
        worst[2] = worst[2]
            .max(g.op(&p, &p.inverse()).unwrap().max_abs_diff(&e))
            .max(g.op(&p.inverse(), &p).unwrap().max_abs_diff(&e));
        let lam: f64 = rng.random_range(0.1..3.0);
        let d1 = g.op(&p, &q).unwrap().dilate(lam);
        let d2 = g.op(&p.dilate(lam), &q.dilate(lam)).unwrap();
        worst[3] = worst[3].max(d1.max_abs_diff(&d2));
        for k in 0..g.m() {
            let lx = g.lambda_apply(k, &p.x);
            let s: f64 = lx.iter().zip(&p.x).map(|(a, b)| a * b).sum();
            worst[4] = worst[4].max(s.abs());
        }
    }
    outcome(
        worst.iter().all(|w| *w <= tol),
        format!(
            "max deviation assoc {:.1e}, identity {:.1e}, inverse {:.1e}, dilation {:.1e}, skew {:.1e} (tol 1e-10, 1000 instances each)",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn random_poly<R: Rng>(rng: &mut R, vars: usize) -> Polynomial {
    let terms = (0..rng.random_range(1..6))
        .map(|_| (rng.random_range(-2.0..2.0), (0..vars).map(|_| rng.random_range(0..3)).collect()))
        .collect();
    Polynomial { terms }
}

fn c2_calculus() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let tol = 1e-8;
    let (mut inv, mut comm) = (0.0f64, 0.0f64);
    for _ in 0..200 {
        let g = random_group(&mut rng);
        let f = ScalarField::new("poly", random_poly(&mut rng, g.n() + g.m()));
        let (p, h) = (random_point(&g, &mut rng, 1.5), random_point(&g, &mut rng, 1.5));
        let ft = f.left_translate(&g, &h);
        let hp = g.op(&h, &p).unwrap();
        for i in 0..g.n() {
            let (a, b) = (xi_apply(&g, i, &ft, &p).unwrap(), xi_apply(&g, i, &f, &hp).unwrap());
            inv = inv.max((a - b).abs() / (1.0 + b.abs()));
            for j in 0..g.n() {
                let lhs = bracket_apply(&g, i, j, &f, &p).unwrap();
                let rhs: f64 = (0..g.m())
                    .map(|k| g.lambda_entry(k, j, i) * z_partial(&g, k, &f, &p).unwrap())
                    .sum();
                comm = comm.max((lhs - rhs).abs() / (1.0 + rhs.abs()));
            }
        }
    }
    let mut grad: f64 = 0.0;
    for g in [CarnotGroup::heisenberg(1).unwrap(), CarnotGroup::random(4, 2, 16.0, 7).unwrap()] {
        let probes: Vec<Point> = (0..100).map(|_| random_point(&g, &mut rng, 2.0)).collect();
        for shape in RadialShape::all_smooth() {
            grad = grad.max(check_analytic_gradient(&g, &radial_field(&g, shape), &probes).unwrap());
        }
    }
    outcome(
        inv <= tol && comm <= tol && grad <= 1e-5,
        format!("left-invariance {inv:.1e}, commutator {comm:.1e} (tol 1e-8); analytic vs FD gradient {grad:.1e} (tol 1e-5)"),
    )
}

fn c3_norm_constants() -> Outcome {
    let h1 = CarnotGroup::heisenberg(1).unwrap();
    let r = estimate_lemma2_constants(&h1, 100_000, 3, (0.1, 10.0)).unwrap();
    let in_band = |v: f64, c: f64, w: f64| (c - w..=c + w).contains(&v);
    let h_ok = in_band(r.a_hat, 1.0, 1e-9)
        && in_band(r.c_hat, 1.0, 1e-9)
        && in_band(r.b_hat, 3.0, 1e-6)
        && r.max_radial_residual <= 1e-12;
    // seed 7 gives a group whose Λ(ẑ) is invertible for every unit ẑ
    let g = CarnotGroup::random(4, 2, 16.0, 7).unwrap();
    let a = estimate_lemma2_constants(&g, 100_000, 3, (0.1, 10.0)).unwrap();
    let b = estimate_lemma2_constants(&g, 100_000, 4, (0.1, 10.0)).unwrap();
    let factor = |u: f64, v: f64| u.max(v) / u.min(v);
    let stab = [factor(a.a_hat, b.a_hat), factor(a.c_hat, b.c_hat), factor(a.b_hat, b.b_hat)]
        .into_iter()
        .fold(1.0, f64::max);
    let ordered = |r: &NormGeometryReport| 0.0 < r.a_hat && r.a_hat <= r.c_hat && r.b_hat.is_finite();
    outcome(
        h_ok && ordered(&a) && ordered(&b) && stab <= 1.05,
        format!(
            "H1: a={:.12} c={:.12} b={:.9} residual {:.1e}; random(4,2): a={:.6} c={:.6} b={:.4}, stability factor {:.6}",
            r.a_hat, r.c_hat, r.b_hat, r.max_radial_residual, a.a_hat, a.c_hat, a.b_hat, stab
        ),
    )
}

fn c4_sampler_vs_quadrature() -> Outcome {
    let g = CarnotGroup::heisenberg(1).unwrap();
    let mut pass = true;
    let (mut worst_rel, mut worst_z, mut worst_conv) = (0.0f64, 0.0f64, 0.0f64);
    for (i, prof) in GProfile::builtin_suite().into_iter().enumerate() {
        let mu = BoltzmannMeasure::new(g.clone(), prof).unwrap();
        let ch = mcmc_sample(&mu, 1_000_000, 100 + i as u64, 1.0).unwrap();
        let a = g.a();
        let moments: [&dyn Fn(f64, f64) -> f64; 3] = [
            &|r, s| (r.powi(4) + a * s * s).powf(0.25),
            &|r, s| (r.powi(4) + a * s * s).sqrt(),
            &|r, _| r * r,
        ];
        for h in moments {
            let want = mu.radial_quadrature(h).unwrap();
            let fine = mu.expectation_with(h, 2 * mu.quad_resolution, 1.0).unwrap();
            worst_conv = worst_conv.max((fine - want).abs() / want.abs());
            let (m, se) = ch.mean_and_se(|x, z| {
                h(x.iter().map(|v| v * v).sum::<f64>().sqrt(), z.iter().map(|v| v * v).sum::<f64>().sqrt())
            });
            let rel = (m - want).abs() / want.abs();
            let z = (m - want).abs() / se;
            worst_rel = worst_rel.max(rel);
            worst_z = worst_z.max(z);
            pass &= rel <= 0.02 && z <= 3.0;
        }
        let lz = mu.estimate_log_z().unwrap();
        let lz2 = mu.estimate_log_z_with(2 * mu.quad_resolution, 1.0).unwrap();
        worst_conv = worst_conv.max((lz2 - lz).abs());
    }
    pass &= worst_conv <= 1e-8;
    outcome(
        pass,
        format!("5 profiles x 3 moments: max rel err {worst_rel:.2e} (tol 2e-2), max |err|/SE {worst_z:.2} (tol 3), quadrature doubling {worst_conv:.1e} (tol 1e-8)"),
    )
}

fn c5_condition_table() -> Outcome {
    let grid = default_grid();
    let mut bad = Vec::new();
    let mut expect = |label: String, got: bool, want: bool| {
        if got != want {
            bad.push(format!("{label}: got {got}"));
        }
    };
    for k in 1..=6 {
        let p = GProfile::Power { k: k as f64 };
        expect(format!("cond power({k})"), check_theorem1_condition(&p, &grid).0, true);
        expect(format!("eta power({k})"), check_eta_unbounded(&p), k >= 4);
    }
    for k in 1..=2 {
        let p = GProfile::CoshPower { k: k as f64 };
        expect(format!("cond cosh({k})"), check_theorem1_condition(&p, &grid).0, true);
        expect(format!("eta cosh({k})"), check_eta_unbounded(&p), true);
    }
    for k in 1..=3 {
        let p = GProfile::PowerLog { k: k as f64 };
        expect(format!("cond power_log({k})"), check_theorem1_condition(&p, &grid).0, true);
        expect(format!("eta power_log({k})"), check_eta_unbounded(&p), k >= 3);
    }
    let mut cells = 0;
    for p in [4.0, 5.0, 6.0] {
        for j in 1..=20 {
            let beta = j as f64 / 20.0;
            let prof = GProfile::AlphaPower { p, alpha: 1.0 };
            let got = check_theorem11_conditions(&prof, beta).theorem11_ok();
            expect(format!("bundle alpha_power({p}) beta {beta}"), got, beta <= (p - 3.0) / p);
            cells += 1;
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("all 22 growth/eta cells and {cells} bundle cells as expected")
        } else {
            format!("mismatches: {}", bad.join("; "))
        },
    )
}

fn c6_homogeneity() -> Outcome {
    let mu = BoltzmannMeasure::new(CarnotGroup::heisenberg(1).unwrap(), GProfile::Power { k: 4.0 }).unwrap();
    let g = mu.group.clone();
    let ch = mcmc_sample(&mu, 100_000, 6, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let fns: Vec<TestFunction> = RadialShape::all_smooth()
        .into_iter()
        .map(|s| apply_exterior_cutoff(&g, &TestFunction::new(radial_field(&g, s), vec![])))
        .collect();
    for f in &fns {
        let f3 = TestFunction::new(f.field.scaled(3.0), vec![]);
        let fc = TestFunction::new(f.field.scaled(-2.5), vec![]);
        for q in [1.0, 1.5, 2.0, 3.0] {
            let s = 3f64.powf(q);
            worst = worst
                .max(rel(energy(&ch, &g, &f3, q).unwrap(), s * energy(&ch, &g, f, q).unwrap()))
                .max(rel(ubound_lhs(&ch, &mu, &f3, q).unwrap(), s * ubound_lhs(&ch, &mu, f, q).unwrap()))
                .max(rel(lq_mean_deviation(&ch, &f3, q).unwrap(), s * lq_mean_deviation(&ch, f, q).unwrap()));
            for beta in [0.25, 1.0] {
                let b = beta_entropy(&ch, f, q, beta).unwrap();
                worst = worst.max(rel(beta_entropy(&ch, &fc, q, beta).unwrap(), 2.5f64.powf(q) * b));
            }
        }
    }
    outcome(worst <= 1e-12, format!("max relative deviation {worst:.1e} (tol 1e-12)"))
}

fn c7_fit_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut worst, mut infeasible) = (0.0f64, 0);
    for _ in 0..100 {
        let rows: Vec<FitRow> = (0..rng.random_range(1..12))
            .map(|_| FitRow::new(rng.random_range(0.0..5.0), rng.random_range(0.01..5.0), rng.random_range(0.01..5.0)))
            .collect();
        let (c, d) = fit_constants(&rows).unwrap();
        if rows.iter().any(|r| r.lhs > c * r.energy + d * r.mass) {
            infeasible += 1;
        }
        let c_max = rows.iter().map(|r| r.lhs / r.energy).fold(0.0, f64::max) + 1e-3;
        worst = worst.max((c + d - grid_search(&rows, c_max, 1e-3)).abs());
    }
    outcome(
        worst <= 2e-3 && infeasible == 0,
        format!("max |(c+d) - grid| {worst:.1e} (tol 2e-3), infeasible fits {infeasible}"),
    )
}

fn c8_ubound() -> Outcome {
    let mu = BoltzmannMeasure::new(CarnotGroup::heisenberg(1).unwrap(), GProfile::Power { k: 4.0 }).unwrap();
    let ch = mcmc_sample(&mu, 1_000_000, 8, 1.0).unwrap();
    let rep = run_catalog(&ch, &mu, CatalogKind::Ubound, &CatalogOptions::new(2.0, 8)).unwrap();
    let (c, d) = (rep.c_fit.unwrap(), rep.d_fit.unwrap());
    let (cl, ch_) = rep.c_ci.unwrap();
    let (dl, dh) = rep.d_ci.unwrap();
    let narrow = |w: f64, v: f64| w < 0.5 * v;
    outcome(
        rep.rows.len() >= 15
            && c.is_finite()
            && d.is_finite()
            && rep.feasible()
            && narrow(ch_ - cl, c)
            && narrow(dh - dl, d),
        format!(
            "{} functions; c_fit {c:.4} CI [{cl:.4}, {ch_:.4}] width/point {:.3}; d_fit {d:.4} CI [{dl:.4}, {dh:.4}] width/point {} (tol < 0.5)",
            rep.rows.len(),
            (ch_ - cl) / c,
            if d > 0.0 { format!("{:.3}", (dh - dl) / d) } else { "undefined (d_fit = 0)".into() }
        ),
    )
}

fn c9_nogo() -> Outcome {
    let g = CarnotGroup::heisenberg(1).unwrap();
    let fail = NoGoParams::new(&g, 2.0, 1.0, 1.5, 1.0, (4.0, 32.0), 8);
    let allow = NoGoParams::new(&g, 4.0, 1.0, 2.0, 0.25, (4.0, 32.0), 8);
    let rf = run_nogo(&g, &fail.measure(&g).unwrap(), &fail, 200_000, 9).unwrap();
    let ra = run_nogo(&g, &allow.measure(&g).unwrap(), &allow, 200_000, 9).unwrap();
    let plateau = rf.rows.iter().chain(&ra.rows).all(|r| r.plateau_ok && r.plateau_points > 0);
    outcome(
        rf.in_failure_regime
            && (rf.fitted_slope - 1.25).abs() <= 0.3
            && !ra.in_failure_regime
            && ra.fitted_slope < 0.0
            && plateau,
        format!(
            "failure regime slope {:.3} (predicted {:.2}, tol 0.3); allowed regime slope {:.3} (predicted {:.2}, needs < 0); plateau {}",
            rf.fitted_slope, rf.predicted_slope, ra.fitted_slope, ra.predicted_slope,
            if plateau { "holds" } else { "violated" }
        ),
    )
}

struct NormPower {
    a: f64,
    exponent: f64,
}

impl Field for NormPower {
    fn eval<S: Scalar>(&self, x: &[S], z: &[S]) -> S {
        norm_coords(self.a, x, z).powf(self.exponent)
    }
}

fn c10_harmonicity() -> Outcome {
    let g = CarnotGroup::heisenberg(1).unwrap();
    let q = g.q_hom() as f64;
    let f = ScalarField::new("N^(2-Q)", NormPower { a: g.a(), exponent: 2.0 - q });
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 50 {
        let p = random_point(&g, &mut rng, 2.0);
        let nn = norm_coords(g.a(), &p.x, &p.z);
        if nn < 0.1 {
            continue;
        }
        count += 1;
        // second derivatives of N^{2−Q} scale like N^{−Q}
        worst = worst.max(sub_laplacian(&g, &f, &p).unwrap().abs() * nn.powf(q));
    }
    outcome(worst <= 1e-3, format!("max |ΔN^(2-Q)|·N^Q over 50 points {worst:.1e} (tol 1e-3)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("group algebra", c1_group_algebra, Duration::from_secs(1)),
        ("calculus", c2_calculus, Duration::from_secs(5)),
        ("norm constants", c3_norm_constants, Duration::from_secs(10)),
        ("sampler vs quadrature", c4_sampler_vs_quadrature, Duration::from_secs(120)),
        ("condition truth table", c5_condition_table, Duration::from_secs(1)),
        ("functional homogeneity", c6_homogeneity, Duration::from_secs(1)),
        ("fit optimality", c7_fit_optimality, Duration::from_secs(5)),
        ("u-bound feasibility", c8_ubound, Duration::from_secs(120)),
        ("no-go slopes", c9_nogo, Duration::from_secs(180)),
        ("harmonicity", c10_harmonicity, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = run();
        let dt = t0.elapsed();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<24} {}  {}  [{:.2?}, budget {:?}]",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            dt,
            budget
        );
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
