//! Scenario files: one JSON document describes one simulated experiment.

use crate::error::{CliError, CliResult};
use quasi2d_core::collision::{Mode, Pairing, ThermalizationConfig};
use quasi2d_core::physics::lamb_dicke;
use quasi2d_core::sideband::RateModelConfig;
use quasi2d_core::{Constants, Parity, TrapConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioMode {
    Classical3d,
    QuantizedAxial,
    SidebandRateModel,
    AnalyticOnly,
}

impl ScenarioMode {
    pub fn dsmc(self) -> Option<Mode> {
        match self {
            ScenarioMode::Classical3d => Some(Mode::Classical3d),
            ScenarioMode::QuantizedAxial => Some(Mode::QuantizedAxial),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioMode::Classical3d => "classical3d",
            ScenarioMode::QuantizedAxial => "quantized_axial",
            ScenarioMode::SidebandRateModel => "sideband_rate_model",
            ScenarioMode::AnalyticOnly => "analytic_only",
        }
    }
}

/// Trap overrides in lab units; anything left out takes the value of the
/// experiment's central micro-trap.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrapSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_osc_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_x_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_y_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_uk: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_period_nm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pol_phase: Option<f64>,
}

impl TrapSpec {
    pub fn build(&self, c: &Constants) -> TrapConfig {
        let base = TrapConfig::reference(c);
        let hz = |v: Option<f64>, d: f64| v.map_or(d, |f| 2.0 * PI * f);
        TrapConfig {
            omega_osc: hz(self.omega_osc_hz, base.omega_osc),
            omega_x: hz(self.omega_x_hz, base.omega_x),
            omega_y: hz(self.omega_y_hz, base.omega_y),
            depth: self.depth_uk.map_or(base.depth, |u| u * 1e-6 * c.k_b),
            theta_yag: self.theta_deg.map_or(base.theta_yag, f64::to_radians),
            lattice_period: self.lattice_period_nm.map_or(base.lattice_period, |l| l * 1e-9),
            alpha: self.alpha_deg.map_or(base.alpha, f64::to_radians),
            pol_phase: self.pol_phase.unwrap_or(base.pol_phase),
            ..base
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case", deny_unknown_fields)]
pub enum Phase {
    /// Sideband cooling at the current trap.
    Cool {
        duration: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
    },
    /// Collisional relaxation with no cooling light.
    FreeThermalize { duration: f64 },
    /// Adiabatic rotation of the polarization angle over `duration`.
    RescaleAlpha { alpha_deg: f64, duration: f64 },
}

impl Phase {
    pub fn duration(&self) -> f64 {
        match *self {
            Phase::Cool { duration, .. } | Phase::FreeThermalize { duration } | Phase::RescaleAlpha { duration, .. } => {
                duration
            }
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Phase::Cool { .. } => "cool",
            Phase::FreeThermalize { .. } => "free_thermalize",
            Phase::RescaleAlpha { .. } => "rescale_alpha",
        }
    }
}

/// Rate-model overrides. Frequencies are cyclic (Hz).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SidebandSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_r_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_prime_hz: Option<f64>,
    /// Fixed Zeeman splitting; by default it tracks the trap frequency.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeeman_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_minus_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parity: Option<Parity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
}

/// DSMC overrides on top of the engine defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DsmcSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_per_period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps_per_collision: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Pairing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_floor_fraction: Option<f64>,
}

/// Densities for the closed-form rows.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticSpec {
    /// Mean 3D density, m^-3. Default 4e18.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_bar: Option<f64>,
    /// Areal density of one plane, m^-2. Default 1e12.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_2d: Option<f64>,
}

impl AnalyticSpec {
    pub fn n_bar(&self) -> f64 {
        self.n_bar.unwrap_or(4.0e18)
    }
    pub fn n_2d(&self) -> f64 {
        self.n_2d.unwrap_or(1.0e12)
    }
}

fn default_replicas() -> u32 {
    1
}

fn default_particles() -> usize {
    5000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub mode: ScenarioMode,
    #[serde(default)]
    pub trap: TrapSpec,
    #[serde(default = "default_particles")]
    pub n_particles: usize,
    /// Initial temperatures of x, y, z (K).
    pub t_init: [f64; 3],
    #[serde(default)]
    pub schedule: Vec<Phase>,
    /// Parameter grid: dotted config path -> values. Points are the
    /// Cartesian product, keys in sorted order, last key fastest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<BTreeMap<String, Vec<Value>>>,
    #[serde(default = "default_replicas")]
    pub replicas: u32,
    #[serde(default)]
    pub seed: u64,
    /// Time-series columns to write; empty means all.
    #[serde(default)]
    pub outputs: Vec<String>,
    #[serde(default)]
    pub sideband: SidebandSpec,
    #[serde(default)]
    pub dsmc: DsmcSpec,
    #[serde(default)]
    pub analytic: AnalyticSpec,
}

/// One expanded grid point.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub index: usize,
    pub params: Vec<(String, Value)>,
    pub config: ScenarioConfig,
}

pub const DSMC_COLUMNS: [&str; 6] = ["vx_rms", "vy_rms", "vz_rms", "mean_axial_n", "n", "collisions"];
pub const SIDEBAND_COLUMNS: [&str; 8] = [
    "phase",
    "mean_n",
    "p3_0",
    "p3_1",
    "excited_fraction",
    "reduced_temperature",
    "temperature",
    "omega_osc_hz",
];

impl ScenarioConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| CliError::validation("scenario", format!("is not valid JSON: {e}")))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> CliResult<Self> {
        serde_json::from_value(value).map_err(|e| CliError::validation("scenario", e.to_string()))
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("scenario serializes")
    }

    /// Canonical JSON: object keys sorted, no whitespace.
    pub fn canonical_json(&self) -> String {
        // serde_json's default map is ordered, so the round trip sorts keys
        serde_json::to_string(&self.to_value()).expect("scenario serializes")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn config_hash(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Replica seeds `seed + i`.
    pub fn seeds(&self) -> Vec<u64> {
        (0..u64::from(self.replicas)).map(|i| self.seed.wrapping_add(i)).collect()
    }

    /// Returns a copy with `path = value` applied.
    pub fn with_override(&self, path: &str, value: Value) -> CliResult<Self> {
        let mut v = self.to_value();
        set_path(&mut v, path, value)?;
        Self::from_value(v)
    }

    /// Applies a `key=value` string; the value is read as JSON when it parses,
    /// otherwise as a string.
    pub fn with_override_str(&self, spec: &str) -> CliResult<Self> {
        let (key, raw) = spec
            .split_once('=')
            .ok_or_else(|| CliError::validation("override", format!("`{spec}` is not key=value")))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        self.with_override(key.trim(), value)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.name.is_empty() || !self.name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-') {
            return Err(CliError::validation("name", "must be non-empty [A-Za-z0-9_-]"));
        }
        if self.replicas < 1 {
            return Err(CliError::validation("replicas", "must be at least 1"));
        }
        if self.dsmc_mode().is_none() && self.replicas != 1 {
            return Err(CliError::validation("replicas", "deterministic modes take exactly 1"));
        }
        for (i, t) in self.t_init.iter().enumerate() {
            if !(t.is_finite() && *t > 0.0) {
                return Err(CliError::validation(format!("t_init[{i}]"), format!("must be positive, got {t}")));
            }
        }
        for (i, phase) in self.schedule.iter().enumerate() {
            let d = phase.duration();
            if !(d.is_finite() && d > 0.0) {
                return Err(CliError::validation(
                    format!("schedule[{i}].duration"),
                    format!("must be > 0, got {d}"),
                ));
            }
            let allowed = match (self.mode, phase) {
                (ScenarioMode::Classical3d | ScenarioMode::QuantizedAxial, Phase::FreeThermalize { .. }) => true,
                (ScenarioMode::SidebandRateModel, Phase::Cool { .. } | Phase::RescaleAlpha { .. }) => true,
                _ => false,
            };
            if !allowed {
                return Err(CliError::validation(
                    format!("schedule[{i}].phase"),
                    format!("`{}` is not available in {} mode", phase.name(), self.mode.as_str()),
                ));
            }
            if let Phase::Cool { samples: Some(s), .. } = phase {
                if *s < 1 {
                    return Err(CliError::validation(format!("schedule[{i}].samples"), "must be at least 1"));
                }
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.is_empty() {
                return Err(CliError::validation("sweep", "must name at least one parameter"));
            }
            for (key, grid) in sweep {
                if grid.is_empty() {
                    return Err(CliError::validation(format!("sweep.{key}"), "grid must be non-empty"));
                }
                if key.starts_with("sweep") {
                    return Err(CliError::validation(format!("sweep.{key}"), "cannot sweep the sweep"));
                }
            }
        }
        let columns: &[&str] = match self.mode {
            ScenarioMode::Classical3d | ScenarioMode::QuantizedAxial => &DSMC_COLUMNS,
            ScenarioMode::SidebandRateModel => &SIDEBAND_COLUMNS,
            ScenarioMode::AnalyticOnly => &[],
        };
        for name in &self.outputs {
            if !columns.contains(&name.as_str()) {
                return Err(CliError::validation(
                    "outputs",
                    format!("unknown column `{name}` for {} mode", self.mode.as_str()),
                ));
            }
        }
        let c = Constants::cesium();
        match self.sweep {
            Some(_) => {
                for p in self.points()? {
                    p.config.validate_point(&c)?;
                }
                Ok(())
            }
            None => self.validate_point(&c),
        }
    }

    fn validate_point(&self, c: &Constants) -> CliResult<()> {
        let trap = self.trap.build(c);
        trap.validate()?;
        match self.mode {
            ScenarioMode::Classical3d | ScenarioMode::QuantizedAxial => {
                self.thermalization(&trap)?.validate()?;
            }
            ScenarioMode::SidebandRateModel => {
                self.rate_model(&trap, c)?.validate()?;
                for phase in &self.schedule {
                    if let Phase::RescaleAlpha { alpha_deg, .. } = phase {
                        trap.rescale_frequencies(alpha_deg.to_radians())?;
                    }
                }
            }
            ScenarioMode::AnalyticOnly => {
                for (field, v) in [("analytic.n_bar", self.analytic.n_bar()), ("analytic.n_2d", self.analytic.n_2d())] {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(CliError::validation(field, "must be positive"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dsmc_mode(&self) -> Option<Mode> {
        self.mode.dsmc()
    }

    /// Engine configuration for the DSMC modes.
    pub fn thermalization(&self, trap: &TrapConfig) -> CliResult<ThermalizationConfig> {
        let mode = self
            .dsmc_mode()
            .ok_or_else(|| CliError::validation("mode", "not a DSMC mode"))?;
        let mut cfg = ThermalizationConfig::new(mode, *trap, self.n_particles, self.t_init);
        let d = &self.dsmc;
        if let Some(v) = d.collision_ratio {
            cfg.collision_ratio = v;
        }
        cfg.weight = d.weight.or(cfg.weight);
        if let Some(v) = d.duration_factor {
            cfg.duration_factor = v;
        }
        if let Some(v) = d.samples {
            cfg.samples = v;
        }
        if let Some(v) = d.steps_per_period {
            cfg.steps_per_period = v;
        }
        if let Some(v) = d.steps_per_collision {
            cfg.steps_per_collision = v;
        }
        if let Some(v) = d.cell_fraction {
            cfg.cell_fraction = v;
        }
        if let Some(v) = d.pairing {
            cfg.pairing = v;
        }
        if let Some(v) = d.g_floor_fraction {
            cfg.g_floor_fraction = v;
        }
        if !self.schedule.is_empty() {
            cfg.duration = Some(self.schedule.iter().map(Phase::duration).sum());
        }
        Ok(cfg)
    }

    /// Rate model at `trap`. Omega_R defaults to 2pi x 5 kHz and Gamma' to
    /// 2pi x 4.8 kHz.
    pub fn rate_model(&self, trap: &TrapConfig, c: &Constants) -> CliResult<RateModelConfig> {
        let s = &self.sideband;
        let base = RateModelConfig::reference(c);
        let w = |hz: Option<f64>, d: f64| hz.map_or(d, |f| 2.0 * PI * f);
        Ok(RateModelConfig {
            omega_osc: trap.omega_osc,
            omega_r: w(s.omega_r_hz, base.omega_r),
            gamma_prime: w(s.gamma_prime_hz, base.gamma_prime),
            zeeman_splitting: w(s.zeeman_hz, trap.omega_osc),
            detuning: w(s.detuning_hz, 0.0),
            sigma_minus_fraction: s.sigma_minus_fraction.unwrap_or(0.0),
            parity: s.parity.unwrap_or(base.parity),
            n_max: s.n_max.unwrap_or(base.n_max),
            eta: lamb_dicke(trap, c)?,
        })
    }

    /// Expands the sweep grid. Without a sweep there is one point.
    pub fn points(&self) -> CliResult<Vec<SweepPoint>> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![SweepPoint {
                index: 0,
                params: Vec::new(),
                config: self.clone(),
            }]);
        };
        let keys: Vec<&String> = sweep.keys().collect();
        let sizes: Vec<usize> = keys.iter().map(|k| sweep[*k].len()).collect();
        if sizes.contains(&0) {
            return Err(CliError::validation("sweep", "grid must be non-empty"));
        }
        let total: usize = sizes.iter().product();
        let mut base = self.clone();
        base.sweep = None;
        let mut out = Vec::with_capacity(total);
        for index in 0..total {
            let mut rem = index;
            let mut params = vec![(String::new(), Value::Null); keys.len()];
            for k in (0..keys.len()).rev() {
                let i = rem % sizes[k];
                rem /= sizes[k];
                params[k] = (keys[k].clone(), sweep[keys[k]][i].clone());
            }
            let mut v = base.to_value();
            for (key, value) in &params {
                set_path(&mut v, key, value.clone()).map_err(|e| match e {
                    CliError::Validation { reason, .. } => CliError::validation(format!("sweep.{key}"), reason),
                    other => other,
                })?;
            }
            let config = Self::from_value(v).map_err(|e| match e {
                CliError::Validation { reason, .. } => CliError::validation("sweep", reason),
                other => other,
            })?;
            out.push(SweepPoint { index, params, config });
        }
        Ok(out)
    }
}

fn set_path(root: &mut Value, path: &str, value: Value) -> CliResult<()> {
    if path.is_empty() {
        return Err(CliError::validation("override", "empty key"));
    }
    let parts: Vec<&str> = path.split('.').collect();
    let mut cur = root;
    for (depth, part) in parts.iter().enumerate() {
        let last = depth + 1 == parts.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let i: usize = part
                    .parse()
                    .map_err(|_| CliError::validation(path, format!("`{part}` is not an array index")))?;
                let len = items.len();
                let slot = items
                    .get_mut(i)
                    .ok_or_else(|| CliError::validation(path, format!("index {i} out of range ({len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(CliError::validation(path, format!("`{part}` does not address an object"))),
        };
    }
    unreachable!("loop returns on the last segment")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base() -> ScenarioConfig {
        ScenarioConfig::from_value(json!({
            "name": "t",
            "mode": "analytic_only",
            "t_init": [1e-5, 1e-5, 1e-5]
        }))
        .unwrap()
    }

    #[test]
    fn hash_ignores_key_order() {
        let a = ScenarioConfig::from_json(r#"{"name":"t","mode":"analytic_only","t_init":[1e-5,1e-5,1e-5],"seed":3}"#)
            .unwrap();
        let b = ScenarioConfig::from_json(r#"{"seed":3,"t_init":[1e-5,1e-5,1e-5],"mode":"analytic_only","name":"t"}"#)
            .unwrap();
        assert_eq!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash().len(), 64);
        let c = a.with_override("seed", json!(4)).unwrap();
        assert_ne!(a.config_hash(), c.config_hash());
    }

    #[test]
    fn override_nested_and_indexed() {
        let s = base().with_override_str("trap.alpha_deg=29").unwrap();
        assert_eq!(s.trap.alpha_deg, Some(29.0));
        let s = s.with_override_str("t_init.2=2e-5").unwrap();
        assert_eq!(s.t_init[2], 2e-5);
        assert!(s.with_override_str("t_init.7=1").is_err());
        assert!(s.with_override_str("nonsense=1").is_err());
        assert!(s.with_override_str("no_equals").is_err());
    }

    #[test]
    fn sweep_is_a_cartesian_product() {
        let mut s = base();
        let mut grid = BTreeMap::new();
        grid.insert("analytic.n_bar".to_string(), vec![json!(1e18), json!(2e18)]);
        grid.insert("t_init".to_string(), vec![json!([1e-5, 1e-5, 1e-5]), json!([2e-5, 2e-5, 2e-5]), json!([3e-5, 3e-5, 3e-5])]);
        s.sweep = Some(grid);
        let pts = s.points().unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1].config.t_init[0], 2e-5);
        assert_eq!(pts[1].config.analytic.n_bar, Some(1e18));
        assert_eq!(pts[3].config.analytic.n_bar, Some(2e18));
        assert!(pts.iter().all(|p| p.config.sweep.is_none()));
    }

    #[test]
    fn validation_names_the_field() {
        let mut s = base();
        s.sweep = Some(BTreeMap::from([("t_init".to_string(), vec![])]));
        match s.validate() {
            Err(CliError::Validation { field, .. }) => assert_eq!(field, "sweep.t_init"),
            other => panic!("{other:?}"),
        }
        let mut s = base();
        s.mode = ScenarioMode::Classical3d;
        s.schedule = vec![Phase::FreeThermalize { duration: 0.0 }];
        match s.validate() {
            Err(CliError::Validation { field, .. }) => assert_eq!(field, "schedule[0].duration"),
            other => panic!("{other:?}"),
        }
        let mut s = base();
        s.mode = ScenarioMode::Classical3d;
        s.replicas = 0;
        assert!(matches!(s.validate(), Err(CliError::Validation { field, .. }) if field == "replicas"));
        let mut s = base();
        s.mode = ScenarioMode::Classical3d;
        s.schedule = vec![Phase::Cool { duration: 1e-3, samples: None }];
        assert!(matches!(s.validate(), Err(CliError::Validation { field, .. }) if field == "schedule[0].phase"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ScenarioConfig::from_json(r#"{"name":"t","mode":"analytic_only","t_init":[1,1,1],"tinit":3}"#);
        assert!(err.is_err());
    }

    #[test]
    fn trap_defaults_and_units() {
        let c = Constants::cesium();
        let t = TrapSpec::default().build(&c);
        assert_eq!(t, TrapConfig::reference(&c));
        let t = TrapSpec {
            omega_osc_hz: Some(53e3),
            alpha_deg: Some(63.0),
            ..Default::default()
        }
        .build(&c);
        assert!((t.omega_osc - 2.0 * PI * 53e3).abs() < 1e-6);
        assert!((t.alpha - 63f64.to_radians()).abs() < 1e-15);
    }
}
