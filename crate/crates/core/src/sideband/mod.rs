//! Rate equations for degenerate Raman sideband cooling on the reduced
//! {m=3, m=2} manifold, truncated at `n_max` vibrational quanta.
//!
//! A Raman transfer |3,n> -> |2,n+k> is followed by instantaneous,
//! n-preserving repumping, so it enters the generator as an effective
//! |3,n> -> |3,n+k> rate. Population placed in m=2 by the caller drains to
//! m=3 at the repumping width Gamma'.

mod matrix;
mod rabi;
mod solve;

pub use matrix::{build_rate_matrix, RateMatrix};
pub use rabi::{dephasing_rate_estimate, fit_unit_rabi, rabi_envelope_decay_rate, thermal_rabi_signal, RabiEnvelope};
pub use solve::{ensemble_mean_n, evolve, stationary_limit, steady_state, TrajectoryPoint};

use crate::constants::Constants;
use crate::error::{invalid, Error, Result};
use crate::physics::{lamb_dicke_at, Parity};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters of one atom's rate model. All frequencies are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateModelConfig {
    /// Central trap frequency that the Zeeman splitting is tuned against.
    pub omega_osc: f64,
    /// Rabi frequency of |3,1> -> |2,0>.
    pub omega_r: f64,
    /// Width of |m=2> set by the repumper.
    pub gamma_prime: f64,
    pub zeeman_splitting: f64,
    /// Offset of this atom's oscillation frequency from `omega_osc`.
    pub detuning: f64,
    /// sigma-minus excitation rate of |m=3> in units of Gamma'.
    pub sigma_minus_fraction: f64,
    pub parity: Parity,
    pub n_max: usize,
    pub eta: f64,
}

impl RateModelConfig {
    /// Cooling at the central well: 80 kHz, Omega_R = 2pi x 5 kHz,
    /// Gamma' = 2pi x 4.8 kHz, first-sideband resonance, linear polarization.
    pub fn reference(c: &Constants) -> Self {
        let omega_osc = 2.0 * PI * 80.0e3;
        Self {
            omega_osc,
            omega_r: 2.0 * PI * 5.0e3,
            gamma_prime: 2.0 * PI * 4.8e3,
            zeeman_splitting: omega_osc,
            detuning: 0.0,
            sigma_minus_fraction: 0.0,
            parity: Parity::Odd,
            n_max: 40,
            eta: lamb_dicke_at(omega_osc, c).expect("positive frequency"),
        }
    }

    /// This atom's oscillation frequency.
    pub fn atom_frequency(&self) -> f64 {
        self.omega_osc + self.detuning
    }

    /// Detuning of the Raman transfer |3,n> -> |2,n+k>.
    pub fn sideband_detuning(&self, k: i64) -> f64 {
        self.zeeman_splitting + k as f64 * self.atom_frequency()
    }

    pub fn dimension(&self) -> usize {
        2 * (self.n_max + 1)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("omega_osc", self.omega_osc),
            ("gamma_prime", self.gamma_prime),
            ("eta", self.eta),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(field, format!("must be positive, got {v}")));
            }
        }
        if !(self.omega_r.is_finite() && self.omega_r >= 0.0) {
            return Err(invalid("omega_r", "must be non-negative"));
        }
        if !(self.zeeman_splitting.is_finite() && self.detuning.is_finite()) {
            return Err(invalid("detuning", "must be finite"));
        }
        if self.atom_frequency() <= 0.0 {
            return Err(invalid("detuning", "atom frequency must stay positive"));
        }
        if !(0.0..1.0).contains(&self.sigma_minus_fraction) {
            return Err(invalid("sigma_minus_fraction", "must lie in [0, 1)"));
        }
        if self.n_max < 10 {
            return Err(invalid("n_max", "must be at least 10"));
        }
        if let Parity::Mixed { .. } = self.parity {
            return Err(Error::Unsupported(
                "rate model needs a pure odd or even coupling".into(),
            ));
        }
        Ok(())
    }

    /// Soft checks of the resolved-sideband ordering Omega_R < Gamma' < omega.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.omega_r >= self.gamma_prime {
            out.push(format!(
                "Omega_R ({:.3e}) >= Gamma' ({:.3e}): weak-drive rates are approximate",
                self.omega_r, self.gamma_prime
            ));
        }
        if self.gamma_prime >= self.omega_osc {
            out.push("Gamma' >= omega_osc: sidebands are not resolved".into());
        }
        out
    }
}

/// Lorentzian suppression `Gamma'^2 / (Gamma'^2 + 4 Delta^2)` of a Raman rate.
pub fn lorentzian(gamma_prime: f64, delta: f64) -> f64 {
    let g2 = gamma_prime * gamma_prime;
    g2 / (g2 + 4.0 * delta * delta)
}

/// First-sideband cooling rate `Omega_R^2 / Gamma'`, reduced by the
/// Lorentzian for the detuning of |3,1> -> |2,0>.
pub fn cooling_rate(cfg: &RateModelConfig) -> f64 {
    cfg.omega_r * cfg.omega_r / cfg.gamma_prime
        * lorentzian(cfg.gamma_prime, cfg.sideband_detuning(-1))
}

/// Limiting steady-state population of |3,1> for a resonant atom, `(Gamma'/4 omega)^2`.
pub fn resonant_excited_population(gamma_prime: f64, omega_osc: f64) -> f64 {
    (gamma_prime / (4.0 * omega_osc)).powi(2)
}

/// Limiting steady-state population of |3,1> for detuning `delta > Gamma'`, `(delta/2 omega)^2`.
pub fn detuned_excited_population(delta: f64, omega_osc: f64) -> f64 {
    (delta / (2.0 * omega_osc)).powi(2)
}

/// Occupations p[m][n] for m in {3, 2} and n in [0, n_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationVector {
    n_max: usize,
    /// m=3 ladder followed by the m=2 ladder.
    data: Vec<f64>,
}

impl PopulationVector {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            data: vec![0.0; 2 * (n_max + 1)],
        }
    }

    /// Thermal distribution in |m=3> with mean occupation `mean_n`,
    /// renormalized on the truncated ladder.
    pub fn thermal(n_max: usize, mean_n: f64) -> Self {
        let mut p = Self::zeros(n_max);
        if mean_n <= 0.0 {
            p.data[0] = 1.0;
            return p;
        }
        let r = mean_n / (1.0 + mean_n);
        let mut w = 1.0;
        for n in 0..=n_max {
            p.data[n] = w;
            w *= r;
        }
        p.normalize();
        p
    }

    pub fn from_raw(n_max: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != 2 * (n_max + 1) {
            return Err(invalid("populations", "length must be 2 (n_max + 1)"));
        }
        Ok(Self { n_max, data })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn p3(&self, n: usize) -> f64 {
        self.data[n]
    }

    pub fn p2(&self, n: usize) -> f64 {
        self.data[self.n_max + 1 + n]
    }

    pub fn m3(&self) -> &[f64] {
        &self.data[..=self.n_max]
    }

    pub fn m2(&self) -> &[f64] {
        &self.data[self.n_max + 1..]
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Mean vibrational number over both Zeeman states.
    pub fn mean_n(&self) -> f64 {
        let k = self.n_max + 1;
        self.data
            .iter()
            .enumerate()
            .map(|(i, p)| (i % k) as f64 * p)
            .sum::<f64>()
            / self.total()
    }

    /// Population in excited vibrational states, n >= 1.
    pub fn excited_fraction(&self) -> f64 {
        1.0 - (self.p3(0) + self.p2(0)) / self.total()
    }

    /// `k_B T / hbar omega` of the Bose ladder with the same mean occupation.
    pub fn reduced_temperature(&self) -> f64 {
        let n = self.mean_n();
        if n <= 0.0 {
            0.0
        } else {
            1.0 / (1.0 / n).ln_1p()
        }
    }

    pub(crate) fn normalize(&mut self) {
        let s = self.total();
        self.data.iter_mut().for_each(|p| *p /= s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_forms_at_reference_parameters() {
        let cfg = RateModelConfig::reference(&Constants::cesium());
        let p = resonant_excited_population(cfg.gamma_prime, cfg.omega_osc);
        assert_relative_eq!(p, 2.25e-4, max_relative = 1e-12);
        let d = detuned_excited_population(0.15 * cfg.omega_osc, cfg.omega_osc);
        assert_relative_eq!(d, 0.005625, max_relative = 1e-12);
    }

    #[test]
    fn cooling_rate_values() {
        let mut cfg = RateModelConfig::reference(&Constants::cesium());
        let r = cooling_rate(&cfg);
        // (2pi 5e3)^2 / (2pi 4.8e3) = 3.2725e4 s^-1
        assert_relative_eq!(r, 32_724.9, max_relative = 1e-4);
        cfg.detuning = 2.0 * PI * 12e3;
        let reduction = r / cooling_rate(&cfg);
        assert_relative_eq!(reduction, 1.0 + 4.0 * (12.0f64 / 4.8).powi(2), max_relative = 1e-12);
        cfg.omega_r = 0.0;
        assert_eq!(cooling_rate(&cfg), 0.0);
    }

    #[test]
    fn config_validation() {
        let c = Constants::cesium();
        let mut cfg = RateModelConfig::reference(&c);
        cfg.validate().unwrap();
        // reference parameters sit at Omega_R ~ Gamma'
        assert_eq!(cfg.warnings().len(), 1);
        cfg.n_max = 5;
        assert!(cfg.validate().is_err());
        cfg.n_max = 40;
        cfg.sigma_minus_fraction = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn thermal_population_mean() {
        let p = PopulationVector::thermal(200, 5.8);
        assert_relative_eq!(p.mean_n(), 5.8, max_relative = 1e-9);
        assert_relative_eq!(p.total(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(p.reduced_temperature(), 1.0 / (1.0f64 / 5.8).ln_1p(), max_relative = 1e-9);
    }
}
