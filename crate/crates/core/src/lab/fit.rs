//! Smallest `(c, d)` with `lhsᵢ ≤ c·energyᵢ + d·massᵢ` for every row.
//!
//! The feasible set is a convex polygon in the quadrant `c, d ≥ 0`, so the
//! linear objective `c + d` is minimized at a vertex. Vertices are among the
//! origin, the axis intercepts of each constraint line and the pairwise
//! intersections of constraint lines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One test function's functional values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub lhs: f64,
    pub energy: f64,
    pub mass: f64,
}

impl FitRow {
    pub fn new(lhs: f64, energy: f64, mass: f64) -> Self {
        FitRow { lhs, energy, mass }
    }
}

const REL_TOL: f64 = 1e-12;

fn feasible(rows: &[FitRow], c: f64, d: f64) -> bool {
    rows.iter()
        .all(|r| r.lhs <= (c * r.energy + d * r.mass) * (1.0 + REL_TOL) + f64::MIN_POSITIVE)
}

fn validate(rows: &[FitRow]) -> Result<()> {
    for (i, r) in rows.iter().enumerate() {
        if !(r.lhs >= 0.0 && r.energy >= 0.0 && r.mass >= 0.0)
            || !(r.lhs.is_finite() && r.energy.is_finite() && r.mass.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "row {i} must be finite and non-negative, got {r:?}"
            )));
        }
        if r.lhs > 0.0 && r.energy == 0.0 && r.mass == 0.0 {
            return Err(Error::Infeasible { row: i });
        }
    }
    Ok(())
}

/// Scales `(c, d)` up just enough to make every row feasible in exact arithmetic.
fn repair(rows: &[FitRow], c: f64, d: f64) -> (f64, f64) {
    let worst = rows
        .iter()
        .filter(|r| r.lhs > 0.0)
        .map(|r| r.lhs / (c * r.energy + d * r.mass))
        .fold(1.0, f64::max);
    let (mut c, mut d) = if worst > 1.0 { (c * worst, d * worst) } else { (c, d) };
    // the rescaled products can still round an ulp or two low
    while rows.iter().any(|r| r.lhs > c * r.energy + d * r.mass) {
        c *= 1.0 + 2.0 * f64::EPSILON;
        d *= 1.0 + 2.0 * f64::EPSILON;
    }
    (c, d)
}

/// Minimizes `c + d` (ties: smallest `c`). Rows with `lhs = 0` never bind.
pub fn fit_constants(rows: &[FitRow]) -> Result<(f64, f64)> {
    validate(rows)?;
    let active: Vec<FitRow> = rows.iter().copied().filter(|r| r.lhs > 0.0).collect();
    if active.is_empty() {
        return Ok((0.0, 0.0));
    }
    let mut cands: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for r in &active {
        if r.energy > 0.0 {
            cands.push((r.lhs / r.energy, 0.0));
        }
        if r.mass > 0.0 {
            cands.push((0.0, r.lhs / r.mass));
        }
    }
    for (i, r) in active.iter().enumerate() {
        for s in &active[i + 1..] {
            let det = r.energy * s.mass - r.mass * s.energy;
            if det == 0.0 {
                continue;
            }
            let c = (r.lhs * s.mass - r.mass * s.lhs) / det;
            let d = (r.energy * s.lhs - r.lhs * s.energy) / det;
            if c >= 0.0 && d >= 0.0 {
                cands.push((c, d));
            }
        }
    }
    let mut best: Option<(f64, f64)> = None;
    for (c, d) in cands {
        if !feasible(&active, c, d) {
            continue;
        }
        best = match best {
            None => Some((c, d)),
            Some((bc, bd)) => {
                let (obj, bobj) = (c + d, bc + bd);
                let tie = (obj - bobj).abs() <= REL_TOL * bobj.max(obj);
                if (!tie && obj < bobj) || (tie && c < bc) {
                    Some((c, d))
                } else {
                    Some((bc, bd))
                }
            }
        };
    }
    let (c, d) = best.expect("the largest intercepts are always feasible");
    Ok(repair(&active, c, d))
}

/// Best `c` with `d` fixed to 0 (inequalities without a defect term).
pub fn fit_c_only(rows: &[FitRow]) -> Result<f64> {
    let mut c: f64 = 0.0;
    for (i, r) in rows.iter().enumerate() {
        if r.lhs > 0.0 {
            if r.energy == 0.0 {
                return Err(Error::Infeasible { row: i });
            }
            c = c.max(r.lhs / r.energy);
        }
    }
    Ok(c)
}

/// Brute-force oracle: for every `c` on a grid of step `h`, the least grid
/// `d` that is feasible. Returns the best `c + d` found.
pub fn grid_search(rows: &[FitRow], c_max: f64, h: f64) -> f64 {
    let steps = (c_max / h).ceil() as usize;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let c = i as f64 * h;
        let mut d_min: f64 = 0.0;
        let mut ok = true;
        for r in rows {
            let rest = r.lhs - c * r.energy;
            if rest <= 0.0 {
                continue;
            }
            if r.mass == 0.0 {
                ok = false;
                break;
            }
            d_min = d_min.max(rest / r.mass);
        }
        if ok {
            let d = (d_min / h).ceil() * h;
            best = best.min(c + d);
        }
    }
    best
}
