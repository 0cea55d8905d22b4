//! Physical constants for cesium-133.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Fundamental constants plus the cesium and laser wavelengths used by the trap.
///
/// Values are CODATA 2018 for `hbar` and `k_b`, and D. A. Steck's cesium
/// reference data for the atomic mass and the D-line wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
    /// Atomic mass of 133Cs, kg.
    pub mass: f64,
    /// D2 line vacuum wavelength, m.
    pub lambda_d2: f64,
    /// D1 line vacuum wavelength, m.
    pub lambda_d1: f64,
    /// Trapping (YAG) laser wavelength, m.
    pub lambda_yag: f64,
}

impl Constants {
    pub const fn cesium() -> Self {
        Self {
            hbar: 1.054_571_817e-34,
            k_b: 1.380_649e-23,
            mass: 2.206_946_95e-25,
            lambda_d2: 852.347_275_82e-9,
            lambda_d1: 894.592_959_86e-9,
            lambda_yag: 1064.0e-9,
        }
    }

    /// Recoil angular frequency `hbar k^2 / 2m` for the D2 transition.
    pub fn recoil_frequency(&self) -> f64 {
        let k = 2.0 * PI / self.lambda_d2;
        self.hbar * k * k / (2.0 * self.mass)
    }

    /// Angular frequency of light with vacuum wavelength `lambda`.
    pub fn optical_frequency(lambda: f64) -> f64 {
        2.0 * PI * SPEED_OF_LIGHT / lambda
    }

    /// Signed detunings (Delta_1, Delta_2) of the YAG light from D1 and D2, rad/s.
    /// Red detuning is negative.
    pub fn yag_detunings(&self) -> (f64, f64) {
        let w = Self::optical_frequency(self.lambda_yag);
        (
            w - Self::optical_frequency(self.lambda_d1),
            w - Self::optical_frequency(self.lambda_d2),
        )
    }

    pub fn is_valid(&self) -> bool {
        [
            self.hbar,
            self.k_b,
            self.mass,
            self.lambda_d2,
            self.lambda_d1,
            self.lambda_yag,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0)
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::cesium()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cesium_constants_are_positive() {
        assert!(Constants::cesium().is_valid());
    }

    #[test]
    fn recoil_frequency_is_about_2_khz() {
        let w = Constants::cesium().recoil_frequency();
        assert!(w > 0.0 && w < 2.0 * PI * 3.0e3);
        // hbar k^2/2m / 2pi = 2.0663 kHz for the D2 line
        assert!((w / (2.0 * PI) - 2066.34).abs() < 0.1);
    }

    #[test]
    fn yag_is_red_of_both_lines() {
        let (d1, d2) = Constants::cesium().yag_detunings();
        assert!(d1 < 0.0 && d2 < 0.0);
        assert!(d2 < d1);
    }
}
