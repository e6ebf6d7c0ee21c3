//! Monte-Carlo functionals over a frozen chain.
//!
//! Each functional has a `*_values` form working on precomputed per-sample
//! values so catalogs can evaluate a field once and reuse it.

use serde::{Deserialize, Serialize};

use super::fields::TestFunction;
use crate::error::{Error, Result};
use crate::group::CarnotGroup;
use crate::hcalculus;
use crate::measures::{BoltzmannMeasure, Chain, RadialPotential};
use crate::par;

/// Summands with `|f|^q` below this contribute 0 to entropy functionals.
pub const ENTROPY_FLOOR: f64 = 1e-300;
/// Tolerance for "vanishes inside the unit ball".
pub const SUPPORT_TOL: f64 = 1e-12;
const CHUNK: usize = 8192;

/// Concave non-decreasing `φ` for φ-entropies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiProfile {
    /// `(1 + x)^β`
    OnePlusPow { beta: f64 },
    /// `h⁽ⁿ⁾` with `h⁽¹⁾(x) = log(α + x)`, `h⁽ᵏ⁺¹⁾ = log(α + h⁽ᵏ⁾)`.
    IteratedLog { depth: u32, alpha: f64 },
}

impl PhiProfile {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PhiProfile::OnePlusPow { beta } if !(beta > 0.0 && beta <= 1.0) => Err(
                Error::InvalidParameter(format!("one_plus_pow needs β ∈ (0, 1], got {beta}")),
            ),
            PhiProfile::IteratedLog { depth, alpha } if depth == 0 || !(alpha > 1.0) => {
                Err(Error::InvalidParameter(format!(
                    "iterated_log needs depth ≥ 1 and α > 1, got ({depth}, {alpha})"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_d(x).0
    }

    /// `(φ(x), φ'(x), φ''(x))`.
    pub fn eval_d(&self, x: f64) -> (f64, f64, f64) {
        match *self {
            PhiProfile::OnePlusPow { beta } => {
                let u = 1.0 + x;
                (u.powf(beta), beta * u.powf(beta - 1.0), beta * (beta - 1.0) * u.powf(beta - 2.0))
            }
            PhiProfile::IteratedLog { depth, alpha } => {
                // h = x, h' = 1, h'' = 0, then h ← log(α + h) `depth` times
                let (mut h, mut d1, mut d2) = (x, 1.0, 0.0);
                for _ in 0..depth {
                    let u = alpha + h;
                    let nd1 = d1 / u;
                    let nd2 = d2 / u - d1 * d1 / (u * u);
                    h = u.ln();
                    d1 = nd1;
                    d2 = nd2;
                }
                (h, d1, d2)
            }
        }
    }
}

/// `f(p)` at every chain point, in chain order.
pub fn field_values(chain: &Chain, f: &TestFunction) -> Vec<f64> {
    let len = chain.len();
    par::map_indexed(len.div_ceil(CHUNK), |c| {
        (c * CHUNK..len.min((c + 1) * CHUNK))
            .map(|i| f.field.eval_coords(chain.x(i), chain.z(i)))
            .collect::<Vec<_>>()
    })
    .concat()
}

/// `|∇f(p)|` at every chain point.
pub fn gradient_norms(chain: &Chain, g: &CarnotGroup, f: &TestFunction) -> Result<Vec<f64>> {
    let len = chain.len();
    let chunks = par::map_indexed(len.div_ceil(CHUNK), |c| {
        (c * CHUNK..len.min((c + 1) * CHUNK))
            .map(|i| {
                let p = chain.point(i);
                let grad = hcalculus::sub_gradient(g, &f.field, &p)?;
                Ok(grad.iter().map(|v| v * v).sum::<f64>().sqrt())
            })
            .collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::with_capacity(len);
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}

fn check_q(q: f64) -> Result<()> {
    if q >= 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("q = {q} must be ≥ 1")))
    }
}

/// Neumaier-compensated mean, so `f → cf` scales results to within an ulp or so.
fn mean(v: impl Iterator<Item = f64>, len: usize) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in v {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    (sum + comp) / len as f64
}

pub fn lq_mean_deviation_values(vals: &[f64], q: f64) -> f64 {
    let m = mean(vals.iter().copied(), vals.len());
    mean(vals.iter().map(|v| (v - m).abs().powf(q)), vals.len())
}

/// `μ|f − μf|^q`.
pub fn lq_mean_deviation(chain: &Chain, f: &TestFunction, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(lq_mean_deviation_values(&field_values(chain, f), q))
}

/// `μ|v|^q` for per-sample values `v`.
pub fn lq_mean(vals: &[f64], q: f64) -> f64 {
    mean(vals.iter().map(|v| v.abs().powf(q)), vals.len())
}

/// `μ|∇f|^q`.
pub fn energy(chain: &Chain, g: &CarnotGroup, f: &TestFunction, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(lq_mean(&gradient_norms(chain, g, f)?, q))
}

/// `g'(N)/N²·|f|^q` per sample; errors if `f` is non-zero inside `{N < 1}`.
pub fn ubound_terms(chain: &Chain, measure: &BoltzmannMeasure, vals: &[f64], q: f64) -> Result<Vec<f64>> {
    let norms = chain.norms();
    let mut out = Vec::with_capacity(vals.len());
    for (nn, v) in norms.iter().zip(vals) {
        if *nn < 1.0 {
            if v.abs() > SUPPORT_TOL {
                return Err(Error::SupportViolation { norm: *nn, value: *v });
            }
            out.push(0.0);
        } else {
            out.push(measure.profile.d1(*nn) / (nn * nn) * v.abs().powf(q));
        }
    }
    Ok(out)
}

/// `μ(g'(N)/N² |f|^q)`.
pub fn ubound_lhs(chain: &Chain, measure: &BoltzmannMeasure, f: &TestFunction, q: f64) -> Result<f64> {
    check_q(q)?;
    let terms = ubound_terms(chain, measure, &field_values(chain, f), q)?;
    Ok(mean(terms.iter().copied(), terms.len()))
}

/// Per-sample entropy kernel `F·k(|log(F/M)|)` with `F = |f|^q`,
/// `M = μF`; returns `(terms, M)`.
pub fn entropy_terms<K: Fn(f64) -> f64>(vals: &[f64], q: f64, kernel: K) -> Result<(Vec<f64>, f64)> {
    let fq: Vec<f64> = vals.iter().map(|v| v.abs().powf(q)).collect();
    let m = mean(fq.iter().copied(), fq.len());
    if !(m >= ENTROPY_FLOOR) {
        return Err(Error::DegenerateFunction(m));
    }
    let lm = m.ln();
    let terms = fq
        .iter()
        .map(|&u| if u < ENTROPY_FLOOR { 0.0 } else { u * kernel((u.ln() - lm).abs()) })
        .collect();
    Ok((terms, m))
}

pub fn phi_entropy_values(vals: &[f64], q: f64, phi: &PhiProfile) -> Result<f64> {
    let (t, _) = entropy_terms(vals, q, |u| phi.eval(u))?;
    Ok(mean(t.iter().copied(), t.len()))
}

pub fn beta_entropy_values(vals: &[f64], q: f64, beta: f64) -> Result<f64> {
    let (t, _) = entropy_terms(vals, q, |u| u.powf(beta))?;
    Ok(mean(t.iter().copied(), t.len()))
}

/// `μ(|f|^q φ(|log(|f|^q/μ|f|^q)|))`.
pub fn phi_entropy(chain: &Chain, f: &TestFunction, q: f64, phi: &PhiProfile) -> Result<f64> {
    check_q(q)?;
    phi.validate()?;
    phi_entropy_values(&field_values(chain, f), q, phi)
}

/// `μ(|f|^q |log(|f|^q/μ|f|^q)|^β)`.
pub fn beta_entropy(chain: &Chain, f: &TestFunction, q: f64, beta: f64) -> Result<f64> {
    check_q(q)?;
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("β = {beta} must be in (0, 1]")));
    }
    beta_entropy_values(&field_values(chain, f), q, beta)
}
