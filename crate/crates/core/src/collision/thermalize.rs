use super::density::{gaussian_mean_density_2d, gaussian_mean_density_3d};
use super::engine::{collide, pair_probability_bound, CollisionStats, DsmcConfig, Pairing};
use super::free::FreeFlight;
use super::oracles::{analytic_t_therm_classical, quantized_relaxation_rate, thermal_sigma_v, thermal_velocity};
use super::state::{GasState, Mode};
use crate::analysis::{fit_exponential, FitResult, TimeSeries};
use crate::constants::Constants;
use crate::error::{invalid, Error, Result};
use crate::trap::TrapConfig;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One cross-dimensional thermalization experiment in a single micro-trap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalizationConfig {
    pub mode: Mode,
    pub trap: TrapConfig,
    pub n_particles: usize,
    /// Initial temperatures of x, y and z (K).
    pub temperatures: [f64; 3],
    /// Mean collision rate per atom in units of the lower horizontal trap
    /// frequency; sets the particle weight unless `weight` is given.
    pub collision_ratio: f64,
    pub weight: Option<f64>,
    /// Run length (s); defaults to `duration_factor` predicted 1/e times.
    pub duration: Option<f64>,
    pub duration_factor: f64,
    pub samples: usize,
    pub steps_per_period: f64,
    /// Steps per mean collision time at the cloud centre.
    pub steps_per_collision: f64,
    pub cell_fraction: f64,
    pub pairing: Pairing,
    /// Cross-section floor as a fraction of the thermal relative speed.
    pub g_floor_fraction: f64,
}

impl ThermalizationConfig {
    pub fn new(mode: Mode, trap: TrapConfig, n_particles: usize, temperatures: [f64; 3]) -> Self {
        Self {
            mode,
            trap,
            n_particles,
            temperatures,
            collision_ratio: 0.05,
            weight: None,
            duration: None,
            duration_factor: 5.0,
            samples: 60,
            steps_per_period: 50.0,
            steps_per_collision: 20.0,
            cell_fraction: 0.25,
            pairing: Pairing::Ntc,
            g_floor_fraction: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.trap.validate()?;
        if self.n_particles < 10 {
            return Err(invalid("n_particles", "must be at least 10"));
        }
        if self.temperatures.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || self.temperatures[0] <= 0.0 {
            return Err(invalid("temperatures", "must be finite, non-negative, with T_x > 0"));
        }
        for (field, v) in [
            ("collision_ratio", self.collision_ratio),
            ("duration_factor", self.duration_factor),
            ("steps_per_period", self.steps_per_period),
            ("steps_per_collision", self.steps_per_collision),
            ("cell_fraction", self.cell_fraction),
            ("g_floor_fraction", self.g_floor_fraction),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(field, "must be positive"));
            }
        }
        if let Some(w) = self.weight {
            if !(w > 0.0) {
                return Err(invalid("weight", "must be positive"));
            }
        }
        if let Some(d) = self.duration {
            if !(d > 0.0) {
                return Err(invalid("duration", "must be positive"));
            }
        }
        if self.samples < 8 {
            return Err(invalid("samples", "must be at least 8"));
        }
        Ok(())
    }
}

/// Raw output of one replica.
#[derive(Debug, Clone)]
pub struct ThermalizationRun {
    pub series: TimeSeries,
    /// Equilibrium temperature from the conserved energy (K).
    pub t0: f64,
    /// Mean 3D density seen by an atom at T0 (m^-3); in quantized mode the
    /// classical vertical width at T0 is used.
    pub n_bar: f64,
    pub n_bar_2d: f64,
    /// Per-axis rms velocity at T0.
    pub v_rms: f64,
    pub weight: f64,
    pub dt: f64,
    pub predicted_tau: f64,
    /// Measured collisions per atom per second.
    pub collision_rate: f64,
    pub stats: CollisionStats,
    pub final_state: GasState,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalizationResult {
    pub t_therm: f64,
    pub t0: f64,
    pub n_bar: f64,
    pub v_rms: f64,
    /// `1 / (n_bar v_rms T_therm)` (m^2).
    pub observable: f64,
    pub fit_residual: f64,
    pub fit: FitResult,
}

impl ThermalizationResult {
    /// Fits `column` of a (possibly replica-averaged) series.
    pub fn from_series(ts: &TimeSeries, column: &str, t0: f64, n_bar: f64, v_rms: f64) -> Result<Self> {
        let fit = fit_exponential(ts, column)?;
        if fit.degenerate || !(fit.tau > 0.0) {
            return Err(Error::Fit {
                reason: format!("no resolvable decay in `{column}` (tau = {:e})", fit.tau),
                residual: fit.residual_rms,
            });
        }
        Ok(Self {
            t_therm: fit.tau,
            t0,
            n_bar,
            v_rms,
            observable: 1.0 / (n_bar * v_rms * fit.tau),
            fit_residual: fit.residual_rms,
            fit,
        })
    }
}

/// Column that carries the vertical relaxation in each mode.
pub fn relaxation_column(mode: Mode) -> &'static str {
    match mode {
        Mode::Classical3d => "vz_rms",
        Mode::QuantizedAxial => "mean_axial_n",
    }
}

fn cloud_sizes(trap: &TrapConfig, t: f64, c: &Constants) -> [f64; 3] {
    let v = thermal_velocity(t, c);
    trap.frequencies().map(|w| v / w)
}

/// Runs `steps` split steps (collide, then free flight). A step whose pair
/// probability exceeds the bound is retried with half the time step; the
/// possibly reduced step is returned with the collision totals.
pub fn evolve_gas(state: &mut GasState, cfg: &DsmcConfig, dt: f64, duration: f64) -> Result<(f64, CollisionStats)> {
    let mut dt = dt;
    let mut stats = CollisionStats::default();
    let end = state.t + duration;
    let mut flight = FreeFlight::new(state.trap.frequencies(), dt)?;
    let axes = state.mode.moving_axes();
    while state.t < end - 1e-9 * dt {
        match collide(state, cfg, dt) {
            Ok(s) => stats += s,
            Err(Error::TimeStepTooLarge { .. }) if dt > 1e-12 => {
                dt *= 0.5;
                flight = FreeFlight::new(state.trap.frequencies(), dt)?;
                continue;
            }
            Err(e) => return Err(e),
        }
        flight.apply(state, axes);
    }
    Ok((dt, stats))
}

fn record(state: &GasState, cumulative: u64, rows: &mut [Vec<f64>; 6]) {
    let v2 = state.mean_square_velocity();
    let n = state.mean_axial_n();
    let vz = match state.mode {
        Mode::Classical3d => v2[2].sqrt(),
        Mode::QuantizedAxial => {
            (state.constants.hbar * state.trap.omega_osc * (n + 0.5) / state.constants.mass).sqrt()
        }
    };
    let vals = [v2[0].sqrt(), v2[1].sqrt(), vz, n, state.len() as f64, cumulative as f64];
    for (r, v) in rows.iter_mut().zip(vals) {
        r.push(v);
    }
}

/// Equilibrium temperature implied by the configured initial temperatures.
pub fn nominal_temperature(cfg: &ThermalizationConfig, c: &Constants) -> f64 {
    let [tx, ty, tz] = cfg.temperatures;
    match cfg.mode {
        Mode::Classical3d => (tx + ty + tz) / 3.0,
        Mode::QuantizedAxial => {
            let hw = c.hbar * cfg.trap.omega_osc;
            let ez = if tz > 0.0 { hw / (hw / (c.k_b * tz)).exp_m1() } else { 0.0 };
            let target = c.k_b * (tx + ty) + ez;
            let f = |t: f64| 2.0 * c.k_b * t + hw / (hw / (c.k_b * t)).exp_m1() - target;
            let (mut lo, mut hi) = (1e-6 * target / c.k_b, target / (2.0 * c.k_b));
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        }
    }
}

/// Samples a thermal cloud and follows its relaxation towards isotropy.
pub fn simulate(cfg: &ThermalizationConfig, c: &Constants, seed: u64) -> Result<ThermalizationRun> {
    cfg.validate()?;
    let mut state = GasState::thermal(cfg.n_particles, cfg.temperatures, cfg.trap, *c, cfg.mode, 1.0, seed)?;
    // rates and the sampling grid follow the nominal temperature so that
    // replicas share one grid; reported quantities use the sampled energy
    let t_nom = nominal_temperature(cfg, c);
    let t0 = state.equilibrium_temperature();
    let sizes = cloud_sizes(&cfg.trap, t_nom, c);
    let omega_h = cfg.trap.omega_x.min(cfg.trap.omega_y);
    let n = cfg.n_particles as f64;
    let dsmc = DsmcConfig {
        cell_fraction: cfg.cell_fraction,
        pairing: cfg.pairing,
        g_min: cfg.g_floor_fraction * (2.0 * c.k_b * t_nom / c.mass).sqrt(),
        ..DsmcConfig::for_temperature(t_nom, c)
    };
    let sigma_v = match cfg.mode {
        Mode::Classical3d => thermal_sigma_v(t_nom, c)?,
        Mode::QuantizedAxial => dsmc.kernel_2d,
    };
    let unit_density = match cfg.mode {
        Mode::Classical3d => gaussian_mean_density_3d(1.0, sizes),
        Mode::QuantizedAxial => gaussian_mean_density_2d(1.0, [sizes[0], sizes[1]]),
    };
    let weight = match cfg.weight {
        Some(w) => w,
        None => cfg.collision_ratio * omega_h / sigma_v / unit_density / n,
    };
    state.weight = weight;
    let n_real = weight * n;
    let rate = n_real * unit_density * sigma_v;
    let predicted_tau = match cfg.mode {
        Mode::Classical3d => analytic_t_therm_classical(n_real * unit_density, t_nom, c)?.t_therm,
        Mode::QuantizedAxial => {
            let x = c.hbar * cfg.trap.omega_osc / (c.k_b * t_nom);
            1.0 / (rate * quantized_relaxation_rate(x))
        }
    };
    let sizes0 = cloud_sizes(&cfg.trap, t0, c);
    let n_bar_2d = gaussian_mean_density_2d(n_real, [sizes0[0], sizes0[1]]);
    let n_bar = gaussian_mean_density_3d(n_real, sizes0);
    // the central density exceeds the mean by 2^(d/2)
    let peak_rate = rate * 2f64.powf(cfg.mode.moving_axes() as f64 / 2.0);
    let period = 2.0 * PI / cfg.trap.omega_x.max(cfg.trap.omega_y);
    let mut dt = (period / cfg.steps_per_period).min(1.0 / (cfg.steps_per_collision * peak_rate));
    while pair_probability_bound(&state, &dsmc, dt)? > dsmc.max_pair_probability {
        dt *= 0.5;
    }
    let duration = cfg.duration.unwrap_or(cfg.duration_factor * predicted_tau);
    let interval = duration / cfg.samples as f64;

    let mut rows: [Vec<f64>; 6] = Default::default();
    let mut times = vec![0.0];
    let mut stats = CollisionStats::default();
    record(&state, 0, &mut rows);
    for k in 1..=cfg.samples {
        let target = k as f64 * interval;
        let span = target - state.t;
        let steps = (span / dt).round().max(1.0);
        let (used, s) = evolve_gas(&mut state, &dsmc, span / steps, span)?;
        dt = dt.min(used);
        stats += s;
        times.push(target);
        record(&state, stats.collisions, &mut rows);
    }
    let [vx, vy, vz, an, np, coll] = rows;
    let series = TimeSeries::new(times)?
        .with_column("vx_rms", "m/s", vx)?
        .with_column("vy_rms", "m/s", vy)?
        .with_column("vz_rms", "m/s", vz)?
        .with_column("mean_axial_n", "1", an)?
        .with_column("n", "1", np)?
        .with_column("collisions", "1", coll)?;
    Ok(ThermalizationRun {
        series,
        t0,
        n_bar,
        n_bar_2d,
        v_rms: thermal_velocity(t0, c),
        weight,
        dt,
        predicted_tau,
        collision_rate: 2.0 * stats.collisions as f64 / (n * state.t),
        stats,
        final_state: state,
    })
}
