//! Radial potentials `g` with closed-form first and second derivatives.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The built-in families of radial potentials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GProfile {
    /// `s^k`
    Power { k: f64 },
    /// `cosh(s^k)`
    CoshPower { k: f64 },
    /// `s^k log(1 + s)`
    PowerLog { k: f64 },
    /// `α s^p`
    AlphaPower { p: f64, alpha: f64 },
}

/// Anything usable as `g` by the condition checks. Log-derivatives are used
/// on the check grid so fast-growing profiles do not overflow.
pub trait RadialPotential {
    fn g(&self, s: f64) -> f64;
    fn d1(&self, s: f64) -> f64;
    fn d2(&self, s: f64) -> f64;

    fn ln_g(&self, s: f64) -> f64 {
        self.g(s).ln()
    }
    fn ln_d1(&self, s: f64) -> f64 {
        self.d1(s).ln()
    }
    /// `ln g''`, or `None` where `g'' ≤ 0`.
    fn ln_d2(&self, s: f64) -> Option<f64> {
        let v = self.d2(s);
        (v > 0.0).then(|| v.ln())
    }

    /// Exact verdict for `g'/s² → ∞`, when known.
    fn eta_unbounded_exact(&self) -> Option<bool> {
        None
    }
    /// Exact verdict for `sup g (s²/g')^{1/β} < ∞` on `s ≥ 1`, when known.
    fn power_bound_exact(&self, _beta: f64) -> Option<bool> {
        None
    }
}

/// `k s^{k−j}·c` with the convention `0·s^{neg} = 0`.
fn mono(c: f64, s: f64, e: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * s.powf(e)
    }
}

/// `ln cosh u` and `ln sinh u` for `u > 0` without overflow.
fn ln_cosh(u: f64) -> f64 {
    u + (-2.0 * u).exp().ln_1p() - LN_2
}
fn ln_sinh(u: f64) -> f64 {
    u + (-(-2.0 * u).exp()).ln_1p() - LN_2
}

impl GProfile {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            GProfile::Power { k } | GProfile::CoshPower { k } | GProfile::PowerLog { k } => {
                if !(k >= 1.0 && k.is_finite()) {
                    return bad(format!("profile exponent k = {k} must be ≥ 1"));
                }
            }
            GProfile::AlphaPower { p, alpha } => {
                if !(p >= 1.0 && p.is_finite()) {
                    return bad(format!("alpha_power exponent p = {p} must be ≥ 1"));
                }
                if !(alpha > 0.0 && alpha.is_finite()) {
                    return bad(format!("alpha_power weight α = {alpha} must be > 0"));
                }
            }
        }
        Ok(())
    }

    /// Short label such as `power(4)`.
    pub fn label(&self) -> String {
        match *self {
            GProfile::Power { k } => format!("power({k})"),
            GProfile::CoshPower { k } => format!("cosh_power({k})"),
            GProfile::PowerLog { k } => format!("power_log({k})"),
            GProfile::AlphaPower { p, alpha } => format!("alpha_power({p},{alpha})"),
        }
    }

    /// The built-in profiles exercised by the sampler/oracle comparisons.
    pub fn builtin_suite() -> Vec<GProfile> {
        vec![
            GProfile::Power { k: 2.0 },
            GProfile::Power { k: 4.0 },
            GProfile::CoshPower { k: 1.0 },
            GProfile::PowerLog { k: 3.0 },
            GProfile::AlphaPower { p: 4.0, alpha: 1.0 },
        ]
    }
}

impl RadialPotential for GProfile {
    fn g(&self, s: f64) -> f64 {
        match *self {
            GProfile::Power { k } => s.powf(k),
            GProfile::CoshPower { k } => s.powf(k).cosh(),
            GProfile::PowerLog { k } => s.powf(k) * s.ln_1p(),
            GProfile::AlphaPower { p, alpha } => alpha * s.powf(p),
        }
    }

    fn d1(&self, s: f64) -> f64 {
        match *self {
            GProfile::Power { k } => mono(k, s, k - 1.0),
            GProfile::CoshPower { k } => mono(k, s, k - 1.0) * s.powf(k).sinh(),
            GProfile::PowerLog { k } => mono(k, s, k - 1.0) * s.ln_1p() + s.powf(k) / (1.0 + s),
            GProfile::AlphaPower { p, alpha } => mono(alpha * p, s, p - 1.0),
        }
    }

    fn d2(&self, s: f64) -> f64 {
        match *self {
            GProfile::Power { k } => mono(k * (k - 1.0), s, k - 2.0),
            GProfile::CoshPower { k } => {
                let u = s.powf(k);
                mono(k * (k - 1.0), s, k - 2.0) * u.sinh() + mono(k * k, s, 2.0 * k - 2.0) * u.cosh()
            }
            GProfile::PowerLog { k } => {
                mono(k * (k - 1.0), s, k - 2.0) * s.ln_1p() + 2.0 * mono(k, s, k - 1.0) / (1.0 + s)
                    - s.powf(k) / (1.0 + s).powi(2)
            }
            GProfile::AlphaPower { p, alpha } => mono(alpha * p * (p - 1.0), s, p - 2.0),
        }
    }

    fn ln_g(&self, s: f64) -> f64 {
        match *self {
            GProfile::CoshPower { k } => ln_cosh(s.powf(k)),
            _ => self.g(s).ln(),
        }
    }

    fn ln_d1(&self, s: f64) -> f64 {
        match *self {
            GProfile::CoshPower { k } => k.ln() + (k - 1.0) * s.ln() + ln_sinh(s.powf(k)),
            _ => self.d1(s).ln(),
        }
    }

    fn ln_d2(&self, s: f64) -> Option<f64> {
        match *self {
            GProfile::CoshPower { k } => {
                // k(k−1)s^{k−2} sinh u + k²s^{2k−2} cosh u, factored by e^u/2.
                let u = s.powf(k);
                let e = (-2.0 * u).exp();
                let inner = mono(k * (k - 1.0), s, k - 2.0) * (1.0 - e)
                    + mono(k * k, s, 2.0 * k - 2.0) * (1.0 + e);
                (inner > 0.0).then(|| u - LN_2 + inner.ln())
            }
            _ => {
                let v = self.d2(s);
                (v > 0.0).then(|| v.ln())
            }
        }
    }

    fn eta_unbounded_exact(&self) -> Option<bool> {
        Some(match *self {
            GProfile::Power { k } => k > 3.0,
            GProfile::PowerLog { k } => k >= 3.0,
            GProfile::CoshPower { .. } => true,
            GProfile::AlphaPower { p, .. } => p > 3.0,
        })
    }

    fn power_bound_exact(&self, beta: f64) -> Option<bool> {
        const EPS: f64 = 1e-12;
        Some(match *self {
            GProfile::Power { k } | GProfile::PowerLog { k } => beta <= (k - 3.0) / k + EPS,
            GProfile::AlphaPower { p, .. } => beta <= (p - 3.0) / p + EPS,
            // g (s²/g')^{1/β} ~ e^{u(1 − 1/β)} s^{(3−k)/β}: bounded for β < 1, and for β = 1 iff k ≥ 3.
            GProfile::CoshPower { k } => beta < 1.0 - EPS || k >= 3.0,
        })
    }
}
