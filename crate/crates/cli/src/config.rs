//! `key = value` run configuration for the partition command.

use std::path::Path;

use heatcut::partition::{Backend, BalsepConfig};

/// Applies each `key = value` line of `text` to `cfg`. Blank lines and
/// `#` comments are skipped; unknown keys are errors so typos do not pass silently.
pub fn apply(cfg: &mut BalsepConfig, text: &str) -> Result<(), String> {
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| format!("config line {}: expected key = value, got {raw:?}", no + 1))?;
        let bad = |e: &dyn std::fmt::Display| format!("config line {}: {key}: {e}", no + 1);
        match key {
            "alpha_factor" => cfg.alpha_factor = value.parse().map_err(|e| bad(&e))?,
            "c_factor" => cfg.c_factor = value.parse().map_err(|e| bad(&e))?,
            "c_jl" => cfg.c_jl = value.parse().map_err(|e| bad(&e))?,
            "backend" => cfg.backend = value.parse::<Backend>().map_err(|e| bad(&e))?,
            "seed" => cfg.seed = value.parse().map_err(|e| bad(&e))?,
            "directions" => cfg.directions = Some(value.parse().map_err(|e| bad(&e))?),
            "k_jl" => cfg.k_jl = Some(value.parse().map_err(|e| bad(&e))?),
            _ => return Err(format!("config line {}: unknown key {key:?}", no + 1)),
        }
    }
    Ok(())
}

pub fn load(cfg: &mut BalsepConfig, path: &Path) -> Result<(), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    apply(cfg, &text)
}
