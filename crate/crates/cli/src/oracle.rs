//! Direct evaluation of the closed-form operations from `key=value` arguments.
//! Frequencies are cyclic (Hz), temperatures K, densities SI.

use crate::error::{CliError, CliResult};
use crate::scenario::TrapSpec;
use quasi2d_core::collision::oracles as co;
use quasi2d_core::collision::{cross_section, mean_density, relative_wave_vector, AxialProfile};
use quasi2d_core::physics::{
    coupling_parity, ground_state_size, lamb_dicke, raman_coupling, raman_rabi_frequency, temperature_from_ground_fraction,
    temperature_from_mean_n, thermal_state, loss_rate_scaling,
};
use quasi2d_core::sideband::{
    cooling_rate, dephasing_rate_estimate, detuned_excited_population, lorentzian, resonant_excited_population,
    stationary_limit, thermal_rabi_signal, RateModelConfig,
};
use quasi2d_core::analysis::phase_space_density;
use quasi2d_core::trap::two_step_final_temperature;
use quasi2d_core::{Constants, Parity};
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

/// (name, arguments with defaults)
pub const ORACLES: &[(&str, &str)] = &[
    ("lamb_dicke", "omega_osc_hz=80e3"),
    ("ground_state_size", "omega_osc_hz=80e3"),
    ("raman_coupling", "n=1 [trap keys]"),
    ("coupling_parity", "pol_phase=0"),
    ("rescale_frequencies", "alpha_new_deg [trap keys]"),
    ("two_step_final_temperature", "beta alpha1_deg=29 alpha2_deg=63"),
    ("thermal_state", "temperature omega_osc_hz=80e3"),
    ("temperature_from_ground_fraction", "p0 omega_osc_hz=80e3"),
    ("temperature_from_mean_n", "mean_n omega_osc_hz=80e3"),
    ("loss_rate_scaling", "u_ref k_ref u_new"),
    ("lorentzian", "gamma_prime_hz=4.8e3 delta_hz"),
    ("cooling_rate", "omega_r_hz=5e3 gamma_prime_hz=4.8e3 detuning_hz=0 omega_osc_hz=80e3"),
    (
        "steady_state",
        "omega_r_hz=5e3 gamma_prime_hz=4.8e3 detuning_hz=0 sigma_minus_fraction=0 omega_osc_hz=80e3 n_max=40 parity=odd",
    ),
    ("resonant_excited_population", "gamma_prime_hz=4.8e3 omega_osc_hz=80e3"),
    ("detuned_excited_population", "delta_hz omega_osc_hz=80e3"),
    ("thermal_rabi_signal", "t omega_r_hz=6e3 temperature omega_osc_hz=80e3"),
    ("dephasing_rate_estimate", "omega_r_hz=6e3 temperature omega_osc_hz=80e3"),
    ("cross_section", "v_rel"),
    ("thermal_velocity", "temperature"),
    ("classical_collision_rate", "n_bar temperature"),
    ("analytic_t_therm_classical", "n_bar temperature"),
    ("analytic_t_therm_quasi2d", "n_2d temperature omega_osc_hz=80e3"),
    ("suppression_factor", "temperature omega_osc_hz=80e3"),
    ("above_threshold_fraction", "temperature omega_osc_hz=80e3"),
    ("collision_rate_2d", "n_2d"),
    ("energy_distribution_2d", "energy temperature"),
    ("de_z_dt", "n_2d temperature omega_osc_hz=80e3"),
    ("delta_e_z", "temperature omega_osc_hz=80e3"),
    ("quantized_relaxation_rate", "x"),
    ("classical_plane_relaxation_rate", "x"),
    ("mean_density", "n_atoms sigma_z temperature profile=classical [trap keys]"),
    ("phase_space_density", "n_peak temperature"),
];

/// Parsed `key=value` arguments; reading a key marks it used so leftovers
/// can be reported.
pub struct OracleArgs {
    raw: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl OracleArgs {
    pub fn parse<S: AsRef<str>>(args: &[S]) -> CliResult<Self> {
        let mut raw = BTreeMap::new();
        for a in args {
            let a = a.as_ref();
            let (k, v) = a
                .split_once('=')
                .ok_or_else(|| CliError::validation("args", format!("`{a}` is not key=value")))?;
            if raw.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::validation(k.trim(), "given twice"));
            }
        }
        Ok(Self {
            raw,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    fn opt(&self, key: &str) -> CliResult<Option<f64>> {
        self.used.borrow_mut().insert(key.to_string());
        match self.raw.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::validation(key, format!("`{v}` is not a number"))),
        }
    }

    fn get(&self, key: &str, default: Option<f64>) -> CliResult<f64> {
        self.opt(key)?
            .or(default)
            .ok_or_else(|| CliError::validation(key, "is required"))
    }

    fn text(&self, key: &str, default: &str) -> String {
        self.used.borrow_mut().insert(key.to_string());
        self.raw.get(key).cloned().unwrap_or_else(|| default.to_string())
    }

    fn hz(&self, key: &str, default: Option<f64>) -> CliResult<f64> {
        Ok(2.0 * PI * self.get(key, default)?)
    }

    fn trap(&self) -> CliResult<TrapSpec> {
        Ok(TrapSpec {
            omega_osc_hz: self.opt("omega_osc_hz")?,
            omega_x_hz: self.opt("omega_x_hz")?,
            omega_y_hz: self.opt("omega_y_hz")?,
            depth_uk: self.opt("depth_uk")?,
            theta_deg: self.opt("theta_deg")?,
            lattice_period_nm: self.opt("lattice_period_nm")?,
            alpha_deg: self.opt("alpha_deg")?,
            pol_phase: self.opt("pol_phase")?,
        })
    }

    fn finish(&self) -> CliResult<()> {
        let used = self.used.borrow();
        match self.raw.keys().find(|k| !used.contains(*k)) {
            Some(k) => Err(CliError::validation(k.as_str(), "is not an argument of this oracle")),
            None => Ok(()),
        }
    }
}

type Out = BTreeMap<String, f64>;

fn out<const N: usize>(pairs: [(&str, f64); N]) -> Out {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn rate_model(a: &OracleArgs, c: &Constants) -> CliResult<RateModelConfig> {
    let omega_osc = a.hz("omega_osc_hz", Some(80e3))?;
    let parity = match a.text("parity", "odd").as_str() {
        "odd" => Parity::Odd,
        "even" => Parity::Even,
        other => return Err(CliError::validation("parity", format!("`{other}` is not odd or even"))),
    };
    let mut cfg = RateModelConfig::reference(c);
    cfg.omega_osc = omega_osc;
    cfg.zeeman_splitting = omega_osc;
    cfg.eta = quasi2d_core::physics::lamb_dicke_at(omega_osc, c)?;
    cfg.omega_r = a.hz("omega_r_hz", Some(5e3))?;
    cfg.gamma_prime = a.hz("gamma_prime_hz", Some(4.8e3))?;
    cfg.detuning = a.hz("detuning_hz", Some(0.0))?;
    cfg.sigma_minus_fraction = a.get("sigma_minus_fraction", Some(0.0))?;
    let n_max = a.get("n_max", Some(40.0))?;
    if !(n_max >= 0.0 && n_max.fract() == 0.0) {
        return Err(CliError::validation("n_max", "must be a non-negative integer"));
    }
    cfg.n_max = n_max as usize;
    cfg.parity = parity;
    Ok(cfg)
}

/// Integral of the 2D relative-energy distribution above `2 hbar omega`.
fn above_threshold_integral(t: f64, omega: f64, c: &Constants) -> CliResult<f64> {
    let e0 = 2.0 * c.hbar * omega;
    let kt = c.k_b * t;
    let n = 4000;
    let h = 60.0 * kt / n as f64;
    // composite Simpson on [e0, e0 + 60 kT]
    let mut s = co::energy_distribution_2d(e0, t, c)? + co::energy_distribution_2d(e0 + 60.0 * kt, t, c)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * co::energy_distribution_2d(e0 + i as f64 * h, t, c)?;
    }
    Ok(s * h / 3.0)
}

pub fn evaluate<S: AsRef<str>>(name: &str, args: &[S]) -> CliResult<Out> {
    let a = OracleArgs::parse(args)?;
    let c = Constants::cesium();
    let c = &c;
    let w_osc = |a: &OracleArgs| a.hz("omega_osc_hz", Some(80e3));
    let result = match name {
        "lamb_dicke" => {
            let trap = TrapSpec {
                omega_osc_hz: Some(a.get("omega_osc_hz", Some(80e3))?),
                ..Default::default()
            }
            .build(c);
            out([("eta", lamb_dicke(&trap, c)?)])
        }
        "ground_state_size" => out([("l0", ground_state_size(w_osc(&a)?, c)?)]),
        "raman_coupling" => {
            let n = a.get("n", Some(1.0))?;
            if !(n >= 0.0 && n.fract() == 0.0) {
                return Err(CliError::validation("n", "must be a non-negative integer"));
            }
            let trap = a.trap()?.build(c);
            out([
                ("coupling", raman_coupling(&trap, c, n as u32)?),
                ("rabi_frequency_hz", raman_rabi_frequency(&trap, c)? / (2.0 * PI)),
            ])
        }
        "coupling_parity" => {
            let (odd, even) = match coupling_parity(a.get("pol_phase", Some(0.0))?) {
                Parity::Odd => (1.0, 0.0),
                Parity::Even => (0.0, 1.0),
                Parity::Mixed { odd_weight, even_weight } => (odd_weight, even_weight),
            };
            out([("odd_weight", odd), ("even_weight", even)])
        }
        "rescale_frequencies" => {
            let alpha_new = a.get("alpha_new_deg", None)?.to_radians();
            let old = a.trap()?.build(c);
            let new = old.rescale_frequencies(alpha_new)?;
            out([
                ("vertical_ratio", new.omega_osc / old.omega_osc),
                ("horizontal_ratio", new.omega_x / old.omega_x),
                ("omega_osc_hz", new.omega_osc / (2.0 * PI)),
                ("omega_x_hz", new.omega_x / (2.0 * PI)),
                ("omega_y_hz", new.omega_y / (2.0 * PI)),
                ("depth_uk", new.depth / c.k_b * 1e6),
            ])
        }
        "two_step_final_temperature" => {
            let beta = a.get("beta", None)?;
            let t1 = TrapSpec {
                alpha_deg: Some(a.get("alpha1_deg", Some(29.0))?),
                ..Default::default()
            }
            .build(c);
            let t2 = t1.rescale_frequencies(a.get("alpha2_deg", Some(63.0))?.to_radians())?;
            out([
                ("reduced_temperature", two_step_final_temperature(beta, &t1, &t2)),
                ("vertical_ratio", t2.omega_osc / t1.omega_osc),
                ("horizontal_ratio", t2.omega_x / t1.omega_x),
            ])
        }
        "thermal_state" => {
            let s = thermal_state(a.get("temperature", None)?, w_osc(&a)?, c)?;
            out([("mean_n", s.mean_n), ("ground_fraction", s.ground_fraction)])
        }
        "temperature_from_ground_fraction" => {
            let w = w_osc(&a)?;
            let t = temperature_from_ground_fraction(a.get("p0", None)?, w, c)?;
            out([("temperature", t), ("reduced_temperature", c.k_b * t / (c.hbar * w))])
        }
        "temperature_from_mean_n" => {
            let w = w_osc(&a)?;
            let t = temperature_from_mean_n(a.get("mean_n", None)?, w, c)?;
            out([("temperature", t), ("reduced_temperature", c.k_b * t / (c.hbar * w))])
        }
        "loss_rate_scaling" => {
            let (u_ref, k_ref, u_new) = (a.get("u_ref", None)?, a.get("k_ref", None)?, a.get("u_new", None)?);
            let k_new = loss_rate_scaling(u_ref, k_ref, u_new)?;
            out([("k_new", k_new), ("factor", k_new / k_ref)])
        }
        "lorentzian" => {
            let f = lorentzian(a.hz("gamma_prime_hz", Some(4.8e3))?, a.hz("delta_hz", None)?);
            out([("factor", f), ("reduction", 1.0 / f)])
        }
        "cooling_rate" => {
            let cfg = rate_model(&a, c)?;
            out([("rate", cooling_rate(&cfg)), ("time", 1.0 / cooling_rate(&cfg))])
        }
        "steady_state" => {
            let cfg = rate_model(&a, c)?;
            let p = stationary_limit(&cfg)?;
            out([
                ("p3_0", p.p3(0)),
                ("p3_1", p.p3(1)),
                ("mean_n", p.mean_n()),
                ("excited_fraction", p.excited_fraction()),
                ("reduced_temperature", p.reduced_temperature()),
            ])
        }
        "resonant_excited_population" => out([(
            "p3_1",
            resonant_excited_population(a.hz("gamma_prime_hz", Some(4.8e3))?, w_osc(&a)?),
        )]),
        "detuned_excited_population" => {
            out([("p3_1", detuned_excited_population(a.hz("delta_hz", None)?, w_osc(&a)?))])
        }
        "thermal_rabi_signal" => {
            let s = thermal_rabi_signal(
                a.hz("omega_r_hz", Some(6e3))?,
                a.get("temperature", None)?,
                w_osc(&a)?,
                &[a.get("t", None)?],
                c,
            )?;
            out([("signal", s[0])])
        }
        "dephasing_rate_estimate" => out([(
            "rate",
            dephasing_rate_estimate(a.hz("omega_r_hz", Some(6e3))?, a.get("temperature", None)?, w_osc(&a)?, c),
        )]),
        "cross_section" => {
            let v = a.get("v_rel", None)?;
            out([("sigma", cross_section(v, c)?), ("k", relative_wave_vector(v, c))])
        }
        "thermal_velocity" => out([("v_rms", co::thermal_velocity(a.get("temperature", None)?, c))]),
        "classical_collision_rate" => out([(
            "rate",
            co::classical_collision_rate(a.get("n_bar", None)?, a.get("temperature", None)?, c)?,
        )]),
        "analytic_t_therm_classical" => {
            let r = co::analytic_t_therm_classical(a.get("n_bar", None)?, a.get("temperature", None)?, c)?;
            out([("t_therm", r.t_therm), ("observable", r.observable)])
        }
        "analytic_t_therm_quasi2d" => {
            let (t, w) = (a.get("temperature", None)?, w_osc(&a)?);
            out([
                ("t_therm", co::analytic_t_therm_quasi2d(a.get("n_2d", None)?, t, w, c)?),
                ("quasi2d_regime", f64::from(u8::from(co::quasi2d_regime(t, w, c)))),
            ])
        }
        "suppression_factor" => out([(
            "factor",
            co::suppression_factor(a.get("temperature", None)?, w_osc(&a)?, c)?,
        )]),
        "above_threshold_fraction" => {
            let (t, w) = (a.get("temperature", None)?, w_osc(&a)?);
            out([
                ("integral", above_threshold_integral(t, w, c)?),
                ("closed_form", (-2.0 * c.hbar * w / (c.k_b * t)).exp()),
            ])
        }
        "collision_rate_2d" => out([("rate", co::collision_rate_2d(a.get("n_2d", None)?, c)?)]),
        "energy_distribution_2d" => out([(
            "density",
            co::energy_distribution_2d(a.get("energy", None)?, a.get("temperature", None)?, c)?,
        )]),
        "de_z_dt" => out([(
            "power",
            co::de_z_dt(a.get("n_2d", None)?, a.get("temperature", None)?, w_osc(&a)?, c)?,
        )]),
        "delta_e_z" => out([("energy", co::delta_e_z(a.get("temperature", None)?, w_osc(&a)?, c)?)]),
        "quantized_relaxation_rate" => out([("rate", co::quantized_relaxation_rate(a.get("x", None)?))]),
        "classical_plane_relaxation_rate" => {
            out([("rate", co::classical_plane_relaxation_rate(a.get("x", None)?))])
        }
        "mean_density" => {
            let profile = match a.text("profile", "classical").as_str() {
                "classical" => AxialProfile::Classical,
                "quantum_thermal" => AxialProfile::QuantumThermal,
                other => {
                    return Err(CliError::validation(
                        "profile",
                        format!("`{other}` is not classical or quantum_thermal"),
                    ))
                }
            };
            let trap = a.trap()?.build(c);
            let m = mean_density(
                a.get("n_atoms", None)?,
                a.get("sigma_z", None)?,
                &trap,
                a.get("temperature", None)?,
                profile,
                c,
            )?;
            out([
                ("n_bar", m.n_bar),
                ("n_bar_2d", m.n_bar_2d),
                ("n_peak_2d", m.n_peak_2d),
                ("axial_width", m.axial_width),
                ("planes", m.planes as f64),
                ("occupied_planes", m.occupied_planes),
            ])
        }
        "phase_space_density" => out([(
            "psd",
            phase_space_density(a.get("n_peak", None)?, a.get("temperature", None)?, c)?,
        )]),
        other => {
            return Err(CliError::validation(
                "oracle",
                format!("unknown oracle `{other}`; `oracle list` shows the names"),
            ))
        }
    };
    a.finish()?;
    Ok(result)
}
