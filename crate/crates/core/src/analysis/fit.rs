use super::timeseries::TimeSeries;
use crate::error::{invalid, Error, Result};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Least-squares fit of `offset + amplitude * exp(-t / tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub tau: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub sigma_tau: f64,
    pub sigma_amplitude: f64,
    pub sigma_offset: f64,
    pub residual_rms: f64,
    /// No decay resolved: flat data, tau at the search boundary or tau
    /// indistinguishable from zero.
    pub degenerate: bool,
}

/// Best linear (offset, amplitude) for a fixed tau, and the residual sum of squares.
fn profile(t: &[f64], y: &[f64], tau: f64) -> (f64, f64, f64) {
    let n = t.len() as f64;
    let (mut se, mut see, mut sy, mut sey) = (0.0, 0.0, 0.0, 0.0);
    for (&ti, &yi) in t.iter().zip(y) {
        let e = (-(ti - t[0]) / tau).exp();
        se += e;
        see += e * e;
        sy += yi;
        sey += e * yi;
    }
    let det = n * see - se * se;
    if det.abs() < 1e-300 {
        let a = sy / n;
        return (a, 0.0, y.iter().map(|v| (v - a).powi(2)).sum());
    }
    let b = (n * sey - se * sy) / det;
    let a = (sy - b * se) / n;
    let ssr = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| (yi - a - b * (-(ti - t[0]) / tau).exp()).powi(2))
        .sum();
    (a, b, ssr)
}

/// Fits a column of a time series; see [`fit_exponential_xy`].
pub fn fit_exponential(ts: &TimeSeries, column: &str) -> Result<FitResult> {
    let y = ts
        .column(column)
        .ok_or_else(|| invalid("column", format!("no column `{column}`")))?;
    fit_exponential_xy(ts.t(), y)
}

/// Fits `A + B exp(-t / tau)` by profiling tau on a log grid and refining
/// with golden-section search; the amplitude refers to `t[0]`.
pub fn fit_exponential_xy(t: &[f64], y: &[f64]) -> Result<FitResult> {
    if t.len() != y.len() || t.len() < 8 {
        return Err(invalid("series", "need at least 8 samples"));
    }
    if y.iter().chain(t).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("fit input"));
    }
    let span = t[t.len() - 1] - t[0];
    let dt_min = t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if !(span > 0.0 && dt_min > 0.0) {
        return Err(invalid("t", "must be strictly increasing"));
    }
    let n = t.len();
    let (lo, hi) = ((0.1 * dt_min).ln(), (100.0 * span).ln());
    let grid = 400;
    let mut best = (0usize, f64::INFINITY);
    for i in 0..=grid {
        let tau = (lo + (hi - lo) * i as f64 / grid as f64).exp();
        let ssr = profile(t, y, tau).2;
        if ssr < best.1 {
            best = (i, ssr);
        }
    }
    let step = (hi - lo) / grid as f64;
    let (mut a, mut b) = (lo + step * (best.0 as f64 - 1.0), lo + step * (best.0 as f64 + 1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if profile(t, y, x1.exp()).2 < profile(t, y, x2.exp()).2 {
            b = x2;
        } else {
            a = x1;
        }
    }
    let log_tau = (0.5 * (a + b)).clamp(lo, hi);
    let tau = log_tau.exp();
    let (offset, amplitude, ssr) = profile(t, y, tau);
    let residual_rms = (ssr / n as f64).sqrt();
    if !(tau.is_finite() && offset.is_finite() && amplitude.is_finite()) {
        return Err(Error::Fit {
            reason: "non-finite parameters".into(),
            residual: residual_rms,
        });
    }

    // covariance from the Gauss-Newton normal matrix at the optimum
    let s2 = ssr / (n as f64 - 3.0);
    let mut jtj = Matrix3::<f64>::zeros();
    for &ti in t {
        let dt = ti - t[0];
        let e = (-dt / tau).exp();
        let j = Vector3::new(1.0, e, amplitude * dt / (tau * tau) * e);
        jtj += j * j.transpose();
    }
    let cov = jtj.try_inverse().map(|m| m * s2);
    let (sigma_offset, sigma_amplitude, sigma_tau) = match cov {
        Some(c) => (c[(0, 0)].max(0.0).sqrt(), c[(1, 1)].max(0.0).sqrt(), c[(2, 2)].max(0.0).sqrt()),
        None => (f64::INFINITY, f64::INFINITY, f64::INFINITY),
    };
    let flat = y.iter().all(|v| *v == y[0]);
    let at_edge = (log_tau - lo) < 2.0 * step || (hi - log_tau) < 2.0 * step;
    let degenerate = flat || at_edge || !(sigma_tau < tau) || amplitude == 0.0;
    Ok(FitResult {
        tau,
        amplitude,
        offset,
        sigma_tau,
        sigma_amplitude,
        sigma_offset,
        residual_rms,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn synth(tau: f64, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.01).collect();
        let y = t.iter().map(|t| a + b * (-t / tau).exp()).collect();
        (t, y)
    }

    #[test]
    fn exact_exponential() {
        let (t, y) = synth(0.1, 2.0, -0.5);
        let f = fit_exponential_xy(&t, &y).unwrap();
        assert_relative_eq!(f.tau, 0.1, max_relative = 1e-6);
        assert_relative_eq!(f.offset, 2.0, max_relative = 1e-6);
        assert_relative_eq!(f.amplitude, -0.5, max_relative = 1e-6);
        assert!(!f.degenerate);
    }

    #[test]
    fn scale_equivariance() {
        let (t, y) = synth(0.13, 1.0, 0.7);
        let noisy: Vec<f64> = y.iter().enumerate().map(|(i, v)| v + 1e-3 * ((i * 7919) % 13) as f64).collect();
        let f1 = fit_exponential_xy(&t, &noisy).unwrap();
        let scaled: Vec<f64> = noisy.iter().map(|v| 3.5 * v).collect();
        let f2 = fit_exponential_xy(&t, &scaled).unwrap();
        assert_relative_eq!(f1.tau, f2.tau, max_relative = 1e-6);
        assert_relative_eq!(3.5 * f1.amplitude, f2.amplitude, max_relative = 1e-5);
        assert_relative_eq!(3.5 * f1.offset, f2.offset, max_relative = 1e-6);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let t: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let f = fit_exponential_xy(&t, &[4.2; 20]).unwrap();
        assert!(f.degenerate);
        assert_relative_eq!(f.offset, 4.2, max_relative = 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(fit_exponential_xy(&[0.0, 1.0, 2.0], &[1.0, 0.5, 0.2]).is_err());
    }
}
