//! Static-analysis front end: the CoM-ratio sweep and the tool-load sweep,
//! rendered as plot-ready CSV.

use crate::config::{ConfigError, RunConfig};
use comshift_core::statics::{rl_sweep_csv, sweep_rl, sweep_tool_load, tool_load_csv};

/// Inclusive grid with exact endpoints: `from + (to - from) * i / n`.
pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, ConfigError> {
    if step <= 0.0 || to < from {
        return Err(ConfigError::Invalid(format!(
            "empty or invalid grid: from {from} to {to} step {step}"
        )));
    }
    let n = ((to - from) / step).round().max(1.0) as usize;
    Ok((0..=n)
        .map(|i| from + (to - from) * i as f64 / n as f64)
        .collect())
}

/// CoM-ratio sweep CSV. `g0_override` substitutes the weight used in the
/// force balance (the round analysis constant, for instance) without
/// touching the platform masses.
pub fn analyze_sweep_rl(
    config: &RunConfig,
    g0_override: Option<f64>,
    t2_override: Option<f64>,
    from: f64,
    to: f64,
    step: f64,
) -> Result<String, ConfigError> {
    let g0 = g0_override.unwrap_or_else(|| config.platform.weight());
    let t2 = t2_override.unwrap_or(config.platform.t2_max);
    let grid = grid(from, to, step)?;
    let rows = sweep_rl(g0, t2, &grid).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(rl_sweep_csv(&rows))
}

/// Tool-load sweep CSV, one curve per operation-point offset.
pub fn analyze_tool_load(
    config: &RunConfig,
    t2_override: Option<f64>,
    l_c_values: &[f64],
    from: f64,
    to: f64,
    step: f64,
) -> Result<String, ConfigError> {
    let t2 = t2_override.unwrap_or(config.platform.t2_max);
    let span = 2.0 * config.platform.rotor_arm;
    let grid = grid(from, to, step)?;
    let rows = sweep_tool_load(t2, span, l_c_values, &grid)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(tool_load_csv(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_101_rows() {
        let g = grid(0.0, 1.0, 0.01).unwrap();
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_grid_is_a_usage_error() {
        assert!(grid(0.0, 1.0, 0.0).is_err());
        assert!(grid(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn sweep_uses_the_g0_override() {
        let cfg = RunConfig::default();
        let csv = analyze_sweep_rl(&cfg, Some(30.0), Some(20.0), 0.0, 1.0, 0.5).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "r_l,f_g,T1,f_c,feasible");
        assert!(lines[1].starts_with("0,0,30,20,1"));
    }
}
