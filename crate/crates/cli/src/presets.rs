//! Named scenarios shipped as JSON documents.

use crate::error::{CliError, CliResult};
use crate::scenario::ScenarioConfig;

const PRESETS: [(&str, &str); 5] = [
    ("fig7_sweep", include_str!("../presets/fig7_sweep.json")),
    ("fig8_relax", include_str!("../presets/fig8_relax.json")),
    ("freezeout_demo", include_str!("../presets/freezeout_demo.json")),
    ("two_step_cooling", include_str!("../presets/two_step_cooling.json")),
    ("sideband_steady_state", include_str!("../presets/sideband_steady_state.json")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// Loads a preset and applies `key=value` overrides in order.
pub fn preset(name: &str, overrides: &[String]) -> CliResult<ScenarioConfig> {
    let text = preset_text(name).ok_or_else(|| {
        let known: Vec<_> = preset_names().collect();
        CliError::validation("preset", format!("unknown preset `{name}` (known: {})", known.join(", ")))
    })?;
    let mut cfg = ScenarioConfig::from_json(text)?;
    for o in overrides {
        cfg = cfg.with_override_str(o)?;
    }
    Ok(cfg)
}
