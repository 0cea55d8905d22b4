//! Closed-form collisional rates for the classical 3D gas and the
//! quasi-2D gas with a frozen vertical degree of freedom.

use crate::constants::Constants;
use crate::error::{invalid, Result};
use std::f64::consts::PI;

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

/// Per-axis rms velocity `sqrt(k_B T / m)`.
pub fn thermal_velocity(t: f64, c: &Constants) -> f64 {
    (c.k_b * t / c.mass).sqrt()
}

/// Thermal average of `sigma(g) g` with `sigma = 8 pi / k^2`, i.e.
/// `32 sqrt(pi) hbar^2 v_rms / (m k_B T)`.
pub fn thermal_sigma_v(t: f64, c: &Constants) -> Result<f64> {
    positive("temperature", t)?;
    Ok(32.0 * PI.sqrt() * c.hbar * c.hbar * thermal_velocity(t, c) / (c.mass * c.k_b * t))
}

/// Mean collision rate per atom at mean density `n_bar`.
pub fn classical_collision_rate(n_bar: f64, t: f64, c: &Constants) -> Result<f64> {
    positive("n_bar", n_bar)?;
    Ok(n_bar * thermal_sigma_v(t, c)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalThermalization {
    /// 1/e time of a small temperature anisotropy (s).
    pub t_therm: f64,
    /// `1 / (n_bar v_rms T_therm)` (m^2).
    pub observable: f64,
}

/// Cross-dimensional thermalization of a classical gas in a harmonic trap:
/// `1 / (n_bar v_rms T_therm) = (64 sqrt(pi) / 15) hbar^2 / (m k_B T0)`.
pub fn analytic_t_therm_classical(n_bar: f64, t0: f64, c: &Constants) -> Result<ClassicalThermalization> {
    positive("n_bar", n_bar)?;
    positive("temperature", t0)?;
    let observable = 64.0 * PI.sqrt() / 15.0 * c.hbar * c.hbar / (c.mass * c.k_b * t0);
    Ok(ClassicalThermalization {
        t_therm: 1.0 / (n_bar * thermal_velocity(t0, c) * observable),
        observable,
    })
}

/// Exponentially suppressed thermalization time of the quasi-2D gas,
/// `(9 m / 64 hbar) exp(hbar omega / k_B T) / n_2D`. Meant for
/// `k_B T <= hbar omega`.
pub fn analytic_t_therm_quasi2d(n_2d: f64, t: f64, omega_osc: f64, c: &Constants) -> Result<f64> {
    positive("n_2d", n_2d)?;
    positive("temperature", t)?;
    positive("omega_osc", omega_osc)?;
    Ok(9.0 * c.mass / (64.0 * c.hbar) / n_2d * (c.hbar * omega_osc / (c.k_b * t)).exp())
}

/// Whether `k_B T <= hbar omega`, where the quasi-2D estimate applies.
pub fn quasi2d_regime(t: f64, omega_osc: f64, c: &Constants) -> bool {
    c.k_b * t <= c.hbar * omega_osc
}

/// Fraction of 2D collisions with relative energy above `2 hbar omega`.
pub fn suppression_factor(t: f64, omega_osc: f64, c: &Constants) -> Result<f64> {
    positive("temperature", t)?;
    Ok((-2.0 * c.hbar * omega_osc / (c.k_b * t)).exp())
}

/// Quasi-2D collision rate `hbar n_2D / m`.
pub fn collision_rate_2d(n_2d: f64, c: &Constants) -> Result<f64> {
    positive("n_2d", n_2d)?;
    Ok(c.hbar * n_2d / c.mass)
}

/// Distribution of relative collision energy in 2D, `exp(-E / k_B T) / k_B T`.
pub fn energy_distribution_2d(e: f64, t: f64, c: &Constants) -> Result<f64> {
    positive("temperature", t)?;
    if e < 0.0 {
        return Ok(0.0);
    }
    let kt = c.k_b * t;
    Ok((-e / kt).exp() / kt)
}

/// Heating of the vertical motion, `2 hbar omega (hbar n_2D / m) exp(-2 hbar omega / k_B T)` (W).
pub fn de_z_dt(n_2d: f64, t: f64, omega_osc: f64, c: &Constants) -> Result<f64> {
    Ok(2.0 * c.hbar * omega_osc * collision_rate_2d(n_2d, c)? * suppression_factor(t, omega_osc, c)?)
}

/// Vertical energy gained on thermalization, `hbar omega exp(-hbar omega / k_B T)` (J).
pub fn delta_e_z(t: f64, omega_osc: f64, c: &Constants) -> Result<f64> {
    positive("temperature", t)?;
    Ok(c.hbar * omega_osc * (-c.hbar * omega_osc / (c.k_b * t)).exp())
}

/// Linear relaxation rate of the axial ladder under the quantized collision
/// model, in units of the 2D collision rate, at `x = hbar omega / k_B T`.
pub fn quantized_relaxation_rate(x: f64) -> f64 {
    let e = (-x).exp();
    e * (1.0 - e).powi(2) + 0.5 * x * x * e * e
}

/// Classical cross-dimensional rate of a plane with a harmonic vertical
/// confinement, in units of `hbar n_2D / m`: `(32 / 15) x`.
pub fn classical_plane_relaxation_rate(x: f64) -> f64 {
    32.0 / 15.0 * x
}
