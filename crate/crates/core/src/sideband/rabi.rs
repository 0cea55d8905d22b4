use crate::constants::Constants;
use crate::error::{invalid, Error, Result};

/// Thermal occupation weights `(1 - r) r^n`, cut where the tail drops below 1e-14.
fn thermal_weights(temperature: f64, omega_osc: f64, c: &Constants) -> Vec<f64> {
    if temperature == 0.0 {
        return vec![1.0];
    }
    let r = (-c.hbar * omega_osc / (c.k_b * temperature)).exp();
    let mut w = Vec::new();
    let mut p = 1.0 - r;
    while p > 1e-14 * (1.0 - r) && w.len() < 100_000 {
        w.push(p);
        p *= r;
    }
    w
}

/// Population left in |m=3> after Raman coupling to |m=2, n-1> for time t,
/// thermally averaged: `S(t) = sum_n P(n) cos^2(sqrt(n) Omega_R t / 2)`.
pub fn thermal_rabi_signal(
    omega_r: f64,
    temperature: f64,
    omega_osc: f64,
    t_grid: &[f64],
    c: &Constants,
) -> Result<Vec<f64>> {
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(invalid("temperature", "must be finite and non-negative"));
    }
    if !(omega_osc > 0.0 && omega_r >= 0.0) {
        return Err(invalid("omega_r", "frequencies must be non-negative"));
    }
    let w = thermal_weights(temperature, omega_osc, c);
    Ok(t_grid
        .iter()
        .map(|&t| {
            w.iter()
                .enumerate()
                .map(|(n, p)| p * (0.5 * (n as f64).sqrt() * omega_r * t).cos().powi(2))
                .sum()
        })
        .collect())
}

fn unit_residual(t: &[f64], s: &[f64], omega: f64) -> f64 {
    t.iter()
        .zip(s)
        .map(|(&t, &s)| (s - (0.5 * omega * t).cos().powi(2)).powi(2))
        .sum()
}

/// Least-squares Rabi frequency of a unit-amplitude `cos^2(Omega t / 2)`
/// fitted to `(t, s)`. Searches up to the Nyquist limit of the grid.
pub fn fit_unit_rabi(t: &[f64], s: &[f64]) -> Result<f64> {
    if t.len() != s.len() || t.len() < 4 {
        return Err(invalid("t_grid", "need at least four matching samples"));
    }
    let dt = t.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if !(dt > 0.0) {
        return Err(invalid("t_grid", "must be strictly increasing"));
    }
    let hi = std::f64::consts::PI / dt;
    let steps = 4000;
    let h = hi / steps as f64;
    let (best, _) = (1..=steps)
        .map(|i| (i, unit_residual(t, s, i as f64 * h)))
        .fold((1, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    // golden-section refinement inside the bracketing cells
    let (mut a, mut b) = ((best as f64 - 1.0) * h, (best as f64 + 1.0) * h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if unit_residual(t, s, x1) < unit_residual(t, s, x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let omega = 0.5 * (a + b);
    if !omega.is_finite() {
        return Err(Error::NonFinite("rabi fit"));
    }
    Ok(omega)
}

/// Order-of-magnitude dephasing rate `sqrt(hbar omega / k_B T) Omega_R` of
/// the sqrt(n) spectrum.
pub fn dephasing_rate_estimate(omega_r: f64, temperature: f64, omega_osc: f64, c: &Constants) -> f64 {
    (c.hbar * omega_osc / (c.k_b * temperature)).sqrt() * omega_r
}

/// Dephasing of a thermal Rabi signal about its long-time plateau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiEnvelope {
    pub plateau: f64,
    /// Time at which the envelope of |S - plateau| first falls to 1/e of its start.
    pub decay_time: f64,
    pub decay_rate: f64,
}

/// Envelope decay of `S(t)` sampled on `t` (which must start at 0 and
/// resolve the oscillation). `p0` is the dark n=0 fraction, which sets the
/// plateau `p0 + (1 - p0) / 2`.
pub fn rabi_envelope_decay_rate(t: &[f64], s: &[f64], p0: f64) -> Result<RabiEnvelope> {
    if t.len() != s.len() || t.len() < 3 || t[0] != 0.0 {
        return Err(invalid("t_grid", "need matching samples starting at t = 0"));
    }
    let plateau = p0 + 0.5 * (1.0 - p0);
    let dev: Vec<f64> = s.iter().map(|x| (x - plateau).abs()).collect();
    let target = dev[0] / std::f64::consts::E;
    // local maxima of |S - plateau| trace the envelope
    let mut peaks = vec![(t[0], dev[0])];
    for i in 1..dev.len() - 1 {
        if dev[i] >= dev[i - 1] && dev[i] > dev[i + 1] {
            peaks.push((t[i], dev[i]));
        }
    }
    for w in peaks.windows(2) {
        let ((t0, d0), (t1, d1)) = (w[0], w[1]);
        if d1 <= target {
            let tc = t0 + (t1 - t0) * (d0 - target) / (d0 - d1);
            return Ok(RabiEnvelope {
                plateau,
                decay_time: tc,
                decay_rate: 1.0 / tc,
            });
        }
    }
    Err(Error::Fit {
        reason: "envelope never falls to 1/e within the grid".into(),
        residual: peaks.last().map_or(f64::NAN, |p| p.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid(n: usize, dt: f64) -> Vec<f64> {
        (0..n).map(|i| i as f64 * dt).collect()
    }

    #[test]
    fn zero_temperature_is_dark() {
        let c = Constants::cesium();
        let s = thermal_rabi_signal(2.0 * PI * 6e3, 0.0, 2.0 * PI * 80e3, &grid(50, 1e-6), &c).unwrap();
        assert!(s.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn signal_starts_at_one_and_stays_in_range() {
        let c = Constants::cesium();
        let s = thermal_rabi_signal(2.0 * PI * 6e3, 26e-6, 2.0 * PI * 80e3, &grid(400, 0.5e-6), &c).unwrap();
        assert_relative_eq!(s[0], 1.0, max_relative = 1e-12);
        assert!(s.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
    }

    #[test]
    fn unit_fit_recovers_pure_oscillation() {
        let t = grid(81, 0.5e-6);
        let omega = 2.0 * PI * 7.3e3;
        let s: Vec<f64> = t.iter().map(|t| (0.5 * omega * t).cos().powi(2)).collect();
        assert_relative_eq!(fit_unit_rabi(&t, &s).unwrap(), omega, max_relative = 1e-6);
    }

    #[test]
    fn envelope_of_cold_signal_decays() {
        let c = Constants::cesium();
        let omega_r = 2.0 * PI * 6e3;
        let w = 2.0 * PI * 80e3;
        let t = grid(4000, 0.1e-6);
        let s = thermal_rabi_signal(omega_r, 26e-6, w, &t, &c).unwrap();
        let p0 = 1.0 - (-c.hbar * w / (c.k_b * 26e-6)).exp();
        let env = rabi_envelope_decay_rate(&t, &s, p0).unwrap();
        assert!(env.decay_rate > 0.1 * omega_r && env.decay_rate < 3.0 * omega_r);
    }
}
