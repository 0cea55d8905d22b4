use crate::constants::Constants;
use crate::error::{invalid, Result};
use crate::trap::TrapConfig;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Vertical width of the atoms inside one micro-trap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxialProfile {
    /// `sqrt(k_B T / m omega^2)`.
    Classical,
    /// Thermal oscillator, `l^2 = (hbar / 2 m omega) coth(hbar omega / 2 k_B T)`.
    QuantumThermal,
}

impl AxialProfile {
    pub fn width(self, t: f64, omega: f64, c: &Constants) -> f64 {
        match self {
            AxialProfile::Classical => (c.k_b * t / c.mass).sqrt() / omega,
            AxialProfile::QuantumThermal => {
                let x = c.hbar * omega / (2.0 * c.k_b * t);
                (c.hbar / (2.0 * c.mass * omega) / x.tanh()).sqrt()
            }
        }
    }
}

/// `int n^2 / int n` for a 3D Gaussian cloud of `n` atoms.
pub fn gaussian_mean_density_3d(n: f64, sigma: [f64; 3]) -> f64 {
    n / ((4.0 * PI).powf(1.5) * sigma[0] * sigma[1] * sigma[2])
}

/// `int n^2 / int n` for a 2D Gaussian cloud of `n` atoms.
pub fn gaussian_mean_density_2d(n: f64, sigma: [f64; 2]) -> f64 {
    n / (4.0 * PI * sigma[0] * sigma[1])
}

/// Atom numbers of the lattice planes under a Gaussian vertical profile of
/// rms `sigma_z`, centred on a plane and cut at 6 sigma.
pub fn plane_populations(n_atoms: f64, sigma_z: f64, period: f64) -> Result<Vec<f64>> {
    if !(n_atoms > 0.0 && sigma_z > 0.0 && period > 0.0) {
        return Err(invalid("cloud", "atom number, size and period must be positive"));
    }
    let k = (6.0 * sigma_z / period).ceil() as i64;
    let w: Vec<f64> = (-k..=k)
        .map(|i| (-(i as f64 * period).powi(2) / (2.0 * sigma_z * sigma_z)).exp())
        .collect();
    let s: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| n_atoms * x / s).collect())
}

/// Planes inside the full width at half maximum of the vertical profile.
pub fn occupied_planes(sigma_z: f64, period: f64) -> f64 {
    2.0 * (2.0 * 2f64.ln()).sqrt() * sigma_z / period
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanDensity {
    /// Population-weighted mean 3D density seen by an atom (m^-3).
    pub n_bar: f64,
    /// Population-weighted mean 2D density seen by an atom (m^-2).
    pub n_bar_2d: f64,
    /// Peak 2D density of the central plane (m^-2).
    pub n_peak_2d: f64,
    pub axial_width: f64,
    pub planes: usize,
    pub occupied_planes: f64,
}

/// Mean density seen by an atom of a cloud spread over the lattice planes,
/// each plane a thermal 2D Gaussian at temperature `t` in the horizontal trap.
pub fn mean_density(
    n_atoms: f64,
    sigma_z: f64,
    trap: &TrapConfig,
    t: f64,
    profile: AxialProfile,
    c: &Constants,
) -> Result<MeanDensity> {
    if !(t > 0.0) {
        return Err(invalid("temperature", "must be positive"));
    }
    let pops = plane_populations(n_atoms, sigma_z, trap.lattice_period)?;
    let v = (c.k_b * t / c.mass).sqrt();
    let sig = [v / trap.omega_x, v / trap.omega_y];
    let lz = profile.width(t, trap.omega_osc, c);
    let n_bar_2d = pops.iter().map(|ni| ni * gaussian_mean_density_2d(*ni, sig)).sum::<f64>() / n_atoms;
    let central = pops.iter().cloned().fold(0.0, f64::max);
    Ok(MeanDensity {
        n_bar: n_bar_2d / (2.0 * PI.sqrt() * lz),
        n_bar_2d,
        n_peak_2d: central / (2.0 * PI * sig[0] * sig[1]),
        axial_width: lz,
        planes: pops.iter().filter(|&&p| p >= 1.0).count(),
        occupied_planes: occupied_planes(sigma_z, trap.lattice_period),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_mean_density_matches_grid_integral() {
        let s = [1.0, 2.0, 0.5];
        let n = 1000.0;
        let peak = n / ((2.0 * PI).powf(1.5) * s[0] * s[1] * s[2]);
        let steps = 80;
        let (mut num, mut den) = (0.0, 0.0);
        let h: Vec<f64> = s.iter().map(|si| 12.0 * si / steps as f64).collect();
        for i in 0..steps {
            for j in 0..steps {
                for k in 0..steps {
                    let x = -6.0 * s[0] + (i as f64 + 0.5) * h[0];
                    let y = -6.0 * s[1] + (j as f64 + 0.5) * h[1];
                    let z = -6.0 * s[2] + (k as f64 + 0.5) * h[2];
                    let d = peak
                        * (-0.5 * (x * x / (s[0] * s[0]) + y * y / (s[1] * s[1]) + z * z / (s[2] * s[2]))).exp();
                    num += d * d;
                    den += d;
                }
            }
        }
        assert_relative_eq!(num / den, gaussian_mean_density_3d(n, s), max_relative = 1e-6);
    }

    #[test]
    fn single_plane_closed_form() {
        let c = Constants::cesium();
        let trap = TrapConfig::reference(&c);
        let t = 10e-6;
        // a cloud much thinner than the period fills one plane
        let d = mean_density(1e4, 1e-9, &trap, t, AxialProfile::Classical, &c).unwrap();
        let lz = AxialProfile::Classical.width(t, trap.omega_osc, &c);
        let expected = 1e4 * c.mass * trap.omega_x * trap.omega_y / (8.0 * PI * c.k_b * t * (PI * lz * lz).sqrt());
        assert_relative_eq!(d.n_bar, expected, max_relative = 1e-12);
    }

    #[test]
    fn planes_are_independent() {
        let c = Constants::cesium();
        let trap = TrapConfig::reference(&c);
        let one = mean_density(500.0, 1e-9, &trap, 8e-6, AxialProfile::Classical, &c).unwrap();
        let v = (c.k_b * 8e-6 / c.mass).sqrt();
        let sig = [v / trap.omega_x, v / trap.omega_y];
        let pair = [500.0, 500.0];
        let pair_mean: f64 = pair.iter().map(|n| n * gaussian_mean_density_2d(*n, sig)).sum::<f64>() / 1000.0;
        assert_relative_eq!(pair_mean, one.n_bar_2d, max_relative = 1e-12);
    }

    #[test]
    fn reference_cloud_fills_about_200_planes() {
        let c = Constants::cesium();
        let trap = TrapConfig::reference(&c);
        let d = mean_density(2e5, 60e-6, &trap, 10e-6, AxialProfile::QuantumThermal, &c).unwrap();
        assert!((d.occupied_planes - 200.0).abs() < 20.0, "{}", d.occupied_planes);
    }

    #[test]
    fn quantum_width_tends_to_limits() {
        let c = Constants::cesium();
        let w = 2.0 * PI * 80e3;
        let ground = (c.hbar / (2.0 * c.mass * w)).sqrt();
        assert_relative_eq!(AxialProfile::QuantumThermal.width(1e-9, w, &c), ground, max_relative = 1e-9);
        let hot = 1e-3;
        assert_relative_eq!(
            AxialProfile::QuantumThermal.width(hot, w, &c),
            AxialProfile::Classical.width(hot, w, &c),
            max_relative = 1e-3
        );
    }
}
