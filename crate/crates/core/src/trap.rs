//! Optical-lattice trap geometry and polarization-angle rescaling.

use crate::constants::Constants;
use crate::error::{invalid, Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// One micro-well of the vertical YAG intensity lattice.
///
/// Frequencies are angular (rad/s). `delta_1` and `delta_2` are the signed
/// detunings of the trapping light from the D1 and D2 lines (red is negative).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapConfig {
    /// Vertical (strongly confined) oscillation frequency.
    pub omega_osc: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    /// Trap depth with parallel linear polarizations, J.
    pub depth: f64,
    /// Angle of the YAG beams with the horizontal, rad.
    pub theta_yag: f64,
    /// Lattice period along z, m.
    pub lattice_period: f64,
    /// Angle of the modified beam's polarization with x, rad.
    pub alpha: f64,
    /// Relative phase of the two polarization components of the modified beam, rad.
    pub pol_phase: f64,
    pub delta_1: f64,
    pub delta_2: f64,
}

impl TrapConfig {
    /// The central micro-trap of the experiment: 80 kHz vertical, 175/140 Hz
    /// horizontal, 140 uK depth, 52 deg beams, 665 nm period, alpha = 20 deg.
    pub fn reference(c: &Constants) -> Self {
        let (delta_1, delta_2) = c.yag_detunings();
        Self {
            omega_osc: 2.0 * PI * 80.0e3,
            omega_x: 2.0 * PI * 175.0,
            omega_y: 2.0 * PI * 140.0,
            depth: 140.0e-6 * c.k_b,
            theta_yag: 52f64.to_radians(),
            lattice_period: 665.0e-9,
            alpha: 20f64.to_radians(),
            pol_phase: 0.0,
            delta_1,
            delta_2,
        }
    }

    /// Horizontal frequencies as an array, in axis order (x, y).
    pub fn horizontal(&self) -> [f64; 2] {
        [self.omega_x, self.omega_y]
    }

    /// Frequencies in axis order (x, y, z).
    pub fn frequencies(&self) -> [f64; 3] {
        [self.omega_x, self.omega_y, self.omega_osc]
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("omega_osc", self.omega_osc),
            ("omega_x", self.omega_x),
            ("omega_y", self.omega_y),
            ("depth", self.depth),
            ("lattice_period", self.lattice_period),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(field, format!("must be positive and finite, got {v}")));
            }
        }
        let weakest = self.omega_x.max(self.omega_y);
        if self.omega_osc / weakest <= 10.0 {
            return Err(invalid(
                "omega_osc",
                format!(
                    "must exceed 10x the horizontal frequencies (ratio {:.3})",
                    self.omega_osc / weakest
                ),
            ));
        }
        if !(0.0..=FRAC_PI_2).contains(&self.alpha) {
            return Err(invalid("alpha", "must lie in [0, pi/2]"));
        }
        if !(0.0..=PI).contains(&self.pol_phase) {
            return Err(invalid("pol_phase", "must lie in [0, pi]"));
        }
        if !(self.theta_yag.is_finite() && self.delta_1.is_finite() && self.delta_2.is_finite()) {
            return Err(invalid("theta_yag", "geometry and detunings must be finite"));
        }
        Ok(())
    }

    /// Trap after an adiabatic rotation of the polarization angle to `alpha_new`.
    ///
    /// The lattice contrast scales as cos(alpha) so the vertical frequency
    /// goes as sqrt(cos alpha); the depth at the lattice maxima goes as
    /// (1 + cos alpha)/2 and the horizontal frequencies as its square root.
    pub fn rescale_frequencies(&self, alpha_new: f64) -> Result<TrapConfig> {
        if !(0.0..FRAC_PI_2).contains(&alpha_new) || alpha_new.cos() <= 1e-12 {
            return Err(Error::DegenerateLattice { alpha: alpha_new });
        }
        let cos_old = self.alpha.cos();
        if cos_old <= 1e-12 {
            return Err(Error::DegenerateLattice { alpha: self.alpha });
        }
        let cos_new = alpha_new.cos();
        let vertical = (cos_new / cos_old).sqrt();
        let depth_ratio = (1.0 + cos_new) / (1.0 + cos_old);
        let horizontal = depth_ratio.sqrt();
        Ok(TrapConfig {
            omega_osc: self.omega_osc * vertical,
            omega_x: self.omega_x * horizontal,
            omega_y: self.omega_y * horizontal,
            depth: self.depth * depth_ratio,
            alpha: alpha_new,
            ..*self
        })
    }
}

/// Predicted `k_B T_h / (hbar omega_z1)` after cooling in `cooled` to
/// `k_B T_h = beta hbar omega_z` and returning adiabatically to `original`.
pub fn two_step_final_temperature(beta: f64, original: &TrapConfig, cooled: &TrapConfig) -> f64 {
    beta * (original.omega_x / cooled.omega_x) * (cooled.omega_osc / original.omega_osc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn trap() -> TrapConfig {
        TrapConfig::reference(&Constants::cesium())
    }

    #[test]
    fn reference_trap_validates() {
        trap().validate().unwrap();
    }

    #[test]
    fn weak_vertical_confinement_is_rejected() {
        let mut t = trap();
        t.omega_osc = 5.0 * t.omega_x;
        assert!(matches!(
            t.validate(),
            Err(Error::InvalidConfig { field: "omega_osc", .. })
        ));
    }

    #[test]
    fn rotation_29_to_63_degrees() {
        let mut t = trap();
        t.alpha = 29f64.to_radians();
        let r = t.rescale_frequencies(63f64.to_radians()).unwrap();
        let closed_z = (63f64.to_radians().cos() / 29f64.to_radians().cos()).sqrt();
        let closed_x =
            ((1.0 + 63f64.to_radians().cos()) / (1.0 + 29f64.to_radians().cos())).sqrt();
        assert_relative_eq!(r.omega_osc / t.omega_osc, closed_z, max_relative = 1e-14);
        assert_relative_eq!(r.omega_x / t.omega_x, closed_x, max_relative = 1e-14);
        // the horizontal ratio is the quoted 0.88
        assert!((r.omega_x / t.omega_x - 0.88).abs() < 0.005);
    }

    #[test]
    fn rotation_identity_and_zero_to_sixty() {
        let t = trap();
        let same = t.rescale_frequencies(t.alpha).unwrap();
        assert_eq!(same, t);
        let mut t0 = trap();
        t0.alpha = 0.0;
        let r = t0.rescale_frequencies(60f64.to_radians()).unwrap();
        assert_relative_eq!(r.omega_osc / t0.omega_osc, 0.5f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn rotation_to_right_angle_is_degenerate() {
        assert!(matches!(
            trap().rescale_frequencies(FRAC_PI_2),
            Err(Error::DegenerateLattice { .. })
        ));
    }

    #[test]
    fn two_step_product() {
        let t1 = trap();
        let mut t2 = t1;
        t2.omega_x = t1.omega_x * 0.88;
        t2.omega_osc = t1.omega_osc * 0.67;
        let v = two_step_final_temperature(0.7, &t1, &t2);
        assert_relative_eq!(v, 0.7 / 0.88 * 0.67, max_relative = 1e-14);
        assert!((v - 0.533).abs() < 1e-3);
        assert_eq!(two_step_final_temperature(0.7, &t1, &t1), 0.7);
        let mut t3 = t1;
        t3.omega_osc *= 0.5;
        assert_relative_eq!(two_step_final_temperature(1.0, &t1, &t3), 0.5);
    }

    proptest::proptest! {
        #[test]
        fn rotation_round_trip(a0 in 0.0f64..1.4, a1 in 0.0f64..1.4) {
            let mut t = trap();
            t.alpha = a0;
            let back = t.rescale_frequencies(a1).unwrap().rescale_frequencies(a0).unwrap();
            for (x, y) in [
                (back.omega_osc, t.omega_osc),
                (back.omega_x, t.omega_x),
                (back.omega_y, t.omega_y),
                (back.depth, t.depth),
            ] {
                proptest::prop_assert!(((x - y) / y).abs() < 1e-12);
            }
        }
    }
}
