//! Test-function catalogs, row evaluation and bootstrap confidence intervals
//! for the fitted constants.
//!
//! Resampling uses non-overlapping blocks of length `⌈len/ESS⌉`. Nonlinear
//! functionals (centered moments, entropies) are bootstrapped through their
//! linearization: each gets a per-sample influence column whose block means
//! move the point estimate, so only block sums are kept in memory.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fields::{
    apply_exterior_cutoff, coordinate_field, product_field, radial_field, random_quadratic,
    RadialShape, TestFunction,
};
use super::fit::{fit_c_only, fit_constants, FitRow};
use super::functionals::{entropy_terms, field_values, gradient_norms, ubound_terms, ENTROPY_FLOOR};
use crate::error::{Error, Result};
use crate::group::CarnotGroup;
use crate::measures::{BoltzmannMeasure, Chain};
use crate::par;
use crate::stats;

pub const DEFAULT_RESAMPLES: usize = 200;
pub const RANDOM_QUADRATICS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogKind {
    /// `μ|f − μf|^q ≤ c μ|∇f|^q`
    Poincare,
    /// `μ(g'(N)/N² |f|^q) ≤ c μ|∇f|^q + d μ|f|^q`, `f` supported in `{N ≥ 1}`
    Ubound,
    /// `μ(|f|^q |log(|f|^q/μ|f|^q)|^β) ≤ c μ|∇f|^q + d μ|f|^q`
    Logsobolev,
}

impl CatalogKind {
    pub fn name(self) -> &'static str {
        match self {
            CatalogKind::Poincare => "poincare",
            CatalogKind::Ubound => "ubound",
            CatalogKind::Logsobolev => "logsobolev",
        }
    }
}

impl std::str::FromStr for CatalogKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poincare" => Ok(CatalogKind::Poincare),
            "ubound" => Ok(CatalogKind::Ubound),
            "logsobolev" => Ok(CatalogKind::Logsobolev),
            other => Err(Error::InvalidParameter(format!("unknown catalog `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalogOptions {
    pub q: f64,
    /// Entropy exponent for the log-Sobolev catalog.
    pub beta: f64,
    /// Seeds the random quadratics and the bootstrap.
    pub seed: u64,
    pub resamples: usize,
}

impl CatalogOptions {
    pub fn new(q: f64, seed: u64) -> Self {
        CatalogOptions {
            q,
            beta: 1.0,
            seed,
            resamples: DEFAULT_RESAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityRow {
    pub name: String,
    pub lhs: f64,
    pub energy: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub catalog: CatalogKind,
    pub q: f64,
    pub beta: Option<f64>,
    pub seed: u64,
    pub rows: Vec<InequalityRow>,
    /// `None` for an empty catalog.
    pub c_fit: Option<f64>,
    pub d_fit: Option<f64>,
    pub c_ci: Option<(f64, f64)>,
    pub d_ci: Option<(f64, f64)>,
    pub block_len: usize,
    pub resamples: usize,
}

impl InequalityReport {
    /// Every row satisfies `lhs ≤ c·energy + d·mass`.
    pub fn feasible(&self) -> bool {
        let (Some(c), Some(d)) = (self.c_fit, self.d_fit) else {
            return self.rows.is_empty();
        };
        self.rows.iter().all(|r| r.lhs <= c * r.energy + d * r.mass)
    }

    /// One line per test function, header `name,lhs,energy,mass`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "name,lhs,energy,mass")?;
        for r in &self.rows {
            let name = if r.name.contains([',', '"']) {
                format!("\"{}\"", r.name.replace('"', "\"\""))
            } else {
                r.name.clone()
            };
            writeln!(w, "{name},{},{},{}", r.lhs, r.energy, r.mass)?;
        }
        Ok(())
    }
}

/// The base family: `xᵢ`, `xᵢxⱼ (i ≤ j)`, radial `N, N², log(1+N²), 1/(1+N)`
/// and seeded random quadratics.
pub fn base_family(g: &CarnotGroup, seed: u64) -> Vec<TestFunction> {
    let mut out = Vec::new();
    for i in 0..g.n() {
        out.push(TestFunction::new(coordinate_field(g, i), vec![i as f64]));
    }
    for i in 0..g.n() {
        for j in i..g.n() {
            out.push(TestFunction::new(product_field(g, i, j), vec![i as f64, j as f64]));
        }
    }
    for shape in RadialShape::all_smooth() {
        out.push(TestFunction::new(radial_field(g, shape), vec![]));
    }
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    seeder.set_stream(0xCA7A);
    for k in 0..RANDOM_QUADRATICS {
        let (field, params) = random_quadratic(g, seeder.random(), k + 1);
        out.push(TestFunction::new(field, params));
    }
    out
}

/// Functions evaluated by a catalog. The U-bound catalog applies the
/// exterior cutoff to every member; the others add cutoff variants of the
/// radial functions.
pub fn catalog_functions(g: &CarnotGroup, kind: CatalogKind, seed: u64) -> Vec<TestFunction> {
    let base = base_family(g, seed);
    match kind {
        CatalogKind::Ubound => base.iter().map(|f| apply_exterior_cutoff(g, f)).collect(),
        _ => {
            let mut out = base.clone();
            for shape in RadialShape::all_smooth() {
                let f = TestFunction::new(radial_field(g, shape), vec![]);
                out.push(apply_exterior_cutoff(g, &f));
            }
            out
        }
    }
}

/// Point estimates plus block sums of the three bootstrap columns.
struct RowColumns {
    row: InequalityRow,
    blocks: [Vec<f64>; 3],
    block_means: [f64; 3],
}

fn block_sums(col: &[f64], block_len: usize, blocks: usize) -> Vec<f64> {
    (0..blocks)
        .map(|b| col[b * block_len..(b + 1) * block_len].iter().sum())
        .collect()
}

fn evaluate_row(
    chain: &Chain,
    measure: &BoltzmannMeasure,
    f: &TestFunction,
    kind: CatalogKind,
    opts: &CatalogOptions,
    block_len: usize,
    blocks: usize,
) -> Result<RowColumns> {
    let q = opts.q;
    let len = chain.len() as f64;
    let vals = field_values(chain, f);
    let energy_col: Vec<f64> = gradient_norms(chain, &measure.group, f)?
        .into_iter()
        .map(|v| v.powf(q))
        .collect();
    let mass_col: Vec<f64> = vals.iter().map(|v| v.abs().powf(q)).collect();
    let (lhs, lhs_col) = match kind {
        CatalogKind::Poincare => {
            let m = vals.iter().sum::<f64>() / len;
            let dev: Vec<f64> = vals.iter().map(|v| (v - m).abs().powf(q)).collect();
            let lhs = dev.iter().sum::<f64>() / len;
            // ∂/∂m of μ|f − m|^q
            let vbar = vals
                .iter()
                .map(|v| q * (v - m).abs().powf(q - 1.0) * (v - m).signum())
                .sum::<f64>()
                / len;
            let col = dev.iter().zip(&vals).map(|(d, v)| d - vbar * v).collect();
            (lhs, col)
        }
        CatalogKind::Ubound => {
            let col = ubound_terms(chain, measure, &vals, q)?;
            (col.iter().sum::<f64>() / len, col)
        }
        CatalogKind::Logsobolev => {
            let beta = opts.beta;
            let (terms, mm) = entropy_terms(&vals, q, |u| u.powf(beta))?;
            let lhs = terms.iter().sum::<f64>() / len;
            // ∂/∂M of F|ln F − ln M|^β is −(F/M)β|u|^{β−1}sgn(u)
            let lm = mm.ln();
            let dk = mass_col
                .iter()
                .map(|&fq| {
                    if fq < ENTROPY_FLOOR {
                        return 0.0;
                    }
                    let u = fq.ln() - lm;
                    if u == 0.0 {
                        0.0
                    } else {
                        -(fq / mm) * beta * u.abs().powf(beta - 1.0) * u.signum()
                    }
                })
                .sum::<f64>()
                / len;
            let col = terms.iter().zip(&mass_col).map(|(t, fq)| t + dk * fq).collect();
            (lhs, col)
        }
    };
    let energy = energy_col.iter().sum::<f64>() / len;
    let mass = mass_col.iter().sum::<f64>() / len;
    let covered = (block_len * blocks) as f64;
    let blocks_arr = [
        block_sums(&lhs_col, block_len, blocks),
        block_sums(&energy_col, block_len, blocks),
        block_sums(&mass_col, block_len, blocks),
    ];
    let block_means = [
        blocks_arr[0].iter().sum::<f64>() / covered,
        blocks_arr[1].iter().sum::<f64>() / covered,
        blocks_arr[2].iter().sum::<f64>() / covered,
    ];
    Ok(RowColumns {
        row: InequalityRow {
            name: f.name.clone(),
            lhs,
            energy,
            mass,
        },
        blocks: blocks_arr,
        block_means,
    })
}

fn fit(kind: CatalogKind, rows: &[FitRow]) -> Result<(f64, f64)> {
    match kind {
        CatalogKind::Poincare => Ok((fit_c_only(rows)?, 0.0)),
        _ => fit_constants(rows),
    }
}

/// Evaluates `functions` on the chain, fits `(c, d)` and bootstraps CIs.
pub fn run_functions(
    chain: &Chain,
    measure: &BoltzmannMeasure,
    functions: &[TestFunction],
    kind: CatalogKind,
    opts: &CatalogOptions,
) -> Result<InequalityReport> {
    if !(opts.q >= 1.0) {
        return Err(Error::InvalidParameter(format!("q = {} must be ≥ 1", opts.q)));
    }
    let len = chain.len();
    let block_len = ((len as f64 / chain.ess.max(1.0)).ceil() as usize).clamp(1, len.max(1));
    let blocks = len / block_len;
    let mut report = InequalityReport {
        catalog: kind,
        q: opts.q,
        beta: (kind == CatalogKind::Logsobolev).then_some(opts.beta),
        seed: opts.seed,
        rows: Vec::new(),
        c_fit: None,
        d_fit: None,
        c_ci: None,
        d_ci: None,
        block_len,
        resamples: opts.resamples,
    };
    if functions.is_empty() {
        return Ok(report);
    }
    let cols = par::map_indexed(functions.len(), |i| {
        evaluate_row(chain, measure, &functions[i], kind, opts, block_len, blocks)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let rows: Vec<FitRow> = cols
        .iter()
        .map(|c| FitRow::new(c.row.lhs, c.row.energy, c.row.mass))
        .collect();
    let (c_fit, d_fit) = fit(kind, &rows)?;

    let covered = (block_len * blocks) as f64;
    let boot = par::map_indexed(opts.resamples, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(b as u64 + 1);
        let picks: Vec<usize> = (0..blocks).map(|_| rng.random_range(0..blocks)).collect();
        let resampled: Vec<FitRow> = cols
            .iter()
            .map(|c| {
                let mut v = [0.0; 3];
                for (k, slot) in v.iter_mut().enumerate() {
                    let s: f64 = picks.iter().map(|&i| c.blocks[k][i]).sum();
                    let point = [c.row.lhs, c.row.energy, c.row.mass][k];
                    *slot = (point + s / covered - c.block_means[k]).max(0.0);
                }
                FitRow::new(v[0], v[1], v[2])
            })
            .collect();
        fit(kind, &resampled)
    });
    let mut cs = Vec::with_capacity(boot.len());
    let mut ds = Vec::with_capacity(boot.len());
    for r in boot {
        let (c, d) = r?;
        cs.push(c);
        ds.push(d);
    }
    cs.sort_by(f64::total_cmp);
    ds.sort_by(f64::total_cmp);
    let ci = |v: &[f64]| (stats::quantile_sorted(v, 0.025), stats::quantile_sorted(v, 0.975));

    report.rows = cols.into_iter().map(|c| c.row).collect();
    report.c_fit = Some(c_fit);
    report.d_fit = Some(d_fit);
    if opts.resamples > 0 {
        report.c_ci = Some(ci(&cs));
        report.d_ci = Some(ci(&ds));
    }
    Ok(report)
}

/// Runs the named built-in catalog.
pub fn run_catalog(
    chain: &Chain,
    measure: &BoltzmannMeasure,
    kind: CatalogKind,
    opts: &CatalogOptions,
) -> Result<InequalityReport> {
    let functions = catalog_functions(&measure.group, kind, opts.seed);
    run_functions(chain, measure, &functions, kind, opts)
}
