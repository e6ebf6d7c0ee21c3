//! Small statistics helpers: moments, FFT autocorrelation, effective sample
//! size, Monte-Carlo standard errors and least-squares slopes.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (divides by `len`).
pub fn variance(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    xs.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / xs.len() as f64
}

/// Normalized autocorrelation `ρ₀ = 1, ρ₁, …` up to lag `len − 1`.
pub fn autocorrelation(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    if n == 0 {
        return Vec::new();
    }
    let mu = mean(xs);
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = xs
        .iter()
        .map(|v| Complex::new(v - mu, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let c0 = buf[0].re;
    if c0 <= 0.0 {
        let mut r = vec![0.0; n];
        r[0] = 1.0;
        return r;
    }
    buf[..n].iter().map(|c| c.re / c0).collect()
}

/// Effective sample size with Geyer's initial positive sequence truncation.
/// Capped at `len`; a constant series counts as fully independent.
pub fn ess(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return n as f64;
    }
    let rho = autocorrelation(xs);
    let mut tau = -1.0;
    let mut k = 0;
    while 2 * k + 1 < n {
        let pair = rho[2 * k] + rho[2 * k + 1];
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        k += 1;
    }
    if tau <= 0.0 {
        return n as f64;
    }
    (n as f64 / tau).min(n as f64)
}

/// Monte-Carlo standard error of the mean, `sd/√ESS`.
pub fn mcse(xs: &[f64]) -> f64 {
    (variance(xs) / ess(xs)).sqrt()
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64) {
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Linear-interpolated quantile of already sorted data, `p ∈ [0, 1]`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn autocorrelation_matches_direct_sum() {
        let xs: Vec<f64> = (0..50).map(|i| ((i * 7) % 11) as f64 - 3.0).collect();
        let rho = autocorrelation(&xs);
        let mu = mean(&xs);
        let c0: f64 = xs.iter().map(|v| (v - mu).powi(2)).sum();
        for lag in [0, 1, 5, 20] {
            let c: f64 = (0..50 - lag).map(|i| (xs[i] - mu) * (xs[i + lag] - mu)).sum();
            assert!((rho[lag] - c / c0).abs() < 1e-12);
        }
    }

    #[test]
    fn iid_ess_is_near_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..20_000).map(|_| rng.sample(StandardNormal)).collect();
        let e = ess(&xs);
        assert!(e > 17_000.0 && e <= 20_000.0, "{e}");
    }

    #[test]
    fn ar1_ess_matches_theory() {
        // AR(1) with φ = 0.9: τ = (1 + φ)/(1 − φ) = 19.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut v = 0.0;
        let xs: Vec<f64> = (0..200_000)
            .map(|_| {
                v = 0.9 * v + rng.sample::<f64, _>(StandardNormal);
                v
            })
            .collect();
        let tau = xs.len() as f64 / ess(&xs);
        assert!((tau - 19.0).abs() < 2.0, "{tau}");
    }

    #[test]
    fn ols_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let (s, b) = ols(&x, &y);
        assert!((s - 2.5).abs() < 1e-14 && (b + 1.0).abs() < 1e-14);
    }

    #[test]
    fn quantiles() {
        let s = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.5), 2.0);
        assert_eq!(quantile_sorted(&s, 0.125), 0.5);
    }
}
