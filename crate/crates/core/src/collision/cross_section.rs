use crate::constants::Constants;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Wave vector of the relative motion, `k = |v_rel| m / 2 hbar`.
pub fn relative_wave_vector(v_rel: f64, c: &Constants) -> f64 {
    v_rel.abs() * c.mass / (2.0 * c.hbar)
}

/// Unitarity-limited s-wave cross section `8 pi / k^2` for identical bosons.
pub fn cross_section(v_rel: f64, c: &Constants) -> Result<f64> {
    let k = relative_wave_vector(v_rel, c);
    if k == 0.0 || !k.is_finite() {
        return Err(Error::CrossSectionOverflow);
    }
    Ok(8.0 * PI / (k * k))
}

/// `sigma(g) g` with sigma frozen below `g_min`. The capped product peaks at
/// `g_min`, which makes it the majorant.
#[inline]
pub(crate) fn capped_sigma_g(g: f64, g_min: f64, c: &Constants) -> f64 {
    let a = 32.0 * PI * c.hbar * c.hbar / (c.mass * c.mass);
    if g >= g_min {
        a / g
    } else {
        a * g / (g_min * g_min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hand_value_at_25_mm_per_s() {
        let c = Constants::cesium();
        assert_relative_eq!(relative_wave_vector(0.025, &c), 2.6157e7, max_relative = 1e-3);
        assert_relative_eq!(cross_section(0.025, &c).unwrap(), 3.673e-14, max_relative = 1e-3);
    }

    #[test]
    fn scaling_and_definition() {
        let c = Constants::cesium();
        let s1 = cross_section(0.01, &c).unwrap();
        let s2 = cross_section(0.02, &c).unwrap();
        assert_relative_eq!(s1 / s2, 4.0, max_relative = 1e-12);
        for v in [1e-4, 3e-3, 0.7] {
            let k = relative_wave_vector(v, &c);
            assert_relative_eq!(cross_section(v, &c).unwrap() * k * k, 8.0 * PI, max_relative = 1e-12);
        }
        assert_eq!(cross_section(0.0, &c), Err(Error::CrossSectionOverflow));
    }

    #[test]
    fn cap_is_continuous_and_maximal_at_floor() {
        let c = Constants::cesium();
        let gmin = 1e-3;
        let at = capped_sigma_g(gmin, gmin, &c);
        assert_relative_eq!(at, cross_section(gmin, &c).unwrap() * gmin, max_relative = 1e-12);
        for g in [1e-5, 5e-4, 2e-3, 0.1] {
            assert!(capped_sigma_g(g, gmin, &c) <= at);
        }
    }
}
