//! Run configuration: a single TOML file covering the platform, contact,
//! controller gains, timing, scenario selection, and the optional arm and
//! custom waypoint blocks. `comshift defaults` prints the complete default
//! file.

use comshift_core::arm::ArmParams;
use comshift_core::contact::ContactConfig;
use comshift_core::control::{
    Activation, AttitudeConfig, ComShiftConfig, ImpedanceConfig, Phase, Ramp, Waypoint,
    WaypointScript, ZTrimConfig,
};
use comshift_core::model::PlatformParams;
use comshift_core::scenario::{ArmSchedule, ControllerGains, ScenarioTiming};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid platform parameters: {0}")]
    Platform(#[from] comshift_core::model::ValidationReport),
    #[error("unknown scenario '{0}': expected task1, task2a, task2b, or custom")]
    Scenario(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Scenario names form a closed set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioName {
    Task1,
    Task2a,
    Task2b,
    Custom,
}

impl ScenarioName {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "task1" => Ok(Self::Task1),
            "task2a" => Ok(Self::Task2a),
            "task2b" => Ok(Self::Task2b),
            "custom" => Ok(Self::Custom),
            other => Err(ConfigError::Scenario(other.to_string())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Task1 => "task1",
            Self::Task2a => "task2a",
            Self::Task2b => "task2b",
            Self::Custom => "custom",
        }
    }
}

/// Contact block without the friction coefficients, which mirror the
/// platform block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactSection {
    pub wall_x: f64,
    pub normal_stiffness: f64,
    pub normal_damping: f64,
    pub tangential_stiffness: f64,
    pub tangential_damping: f64,
    pub stable_force_threshold: f64,
    pub stable_duration: f64,
}

impl Default for ContactSection {
    fn default() -> Self {
        let c = ContactConfig::default();
        Self {
            wall_x: c.wall_x,
            normal_stiffness: c.k_n,
            normal_damping: c.c_n,
            tangential_stiffness: c.k_t,
            tangential_damping: c.c_t,
            stable_force_threshold: c.stable_force_threshold,
            stable_duration: c.stable_duration,
        }
    }
}

impl ContactSection {
    pub fn to_contact_config(&self, platform: &PlatformParams) -> ContactConfig {
        ContactConfig {
            wall_x: self.wall_x,
            k_n: self.normal_stiffness,
            c_n: self.normal_damping,
            k_t: self.tangential_stiffness,
            c_t: self.tangential_damping,
            mu_s: platform.mu_static,
            mu_k: platform.mu_kinetic,
            stable_force_threshold: self.stable_force_threshold,
            stable_duration: self.stable_duration,
        }
    }
}

/// Controller gain block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSection {
    pub impedance: ImpedanceConfig,
    pub attitude: AttitudeConfig,
    pub com_shift: ComShiftConfig,
    pub z_trim: ZTrimConfig,
    pub alpha_rate_limit: f64,
    pub plate_rate_limit: f64,
}

impl Default for GainsSection {
    fn default() -> Self {
        let g = ControllerGains::default();
        Self {
            impedance: g.impedance,
            attitude: g.attitude,
            com_shift: g.com_shift,
            z_trim: g.z_trim,
            alpha_rate_limit: g.limits_alpha_rate,
            plate_rate_limit: g.limits_plate_rate,
        }
    }
}

impl GainsSection {
    pub fn to_gains(&self) -> ControllerGains {
        ControllerGains {
            impedance: self.impedance,
            attitude: self.attitude,
            com_shift: self.com_shift,
            z_trim: self.z_trim,
            limits_alpha_rate: self.alpha_rate_limit,
            limits_plate_rate: self.plate_rate_limit,
        }
    }
}

/// Scenario selection and output shaping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub scenario: ScenarioName,
    /// Keep every n-th trace row when writing CSV.
    pub decimation: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            scenario: ScenarioName::Task1,
            decimation: 1,
        }
    }
}

/// Arm block: geometry plus schedule, used by the task2 scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmSection {
    pub link1: f64,
    pub link2: f64,
    pub mass_link1: f64,
    pub mass_link2: f64,
    pub mass_tool: f64,
    pub base_offset: f64,
    pub base_height: f64,
    pub deploy_begin: f64,
    pub deploy_duration: f64,
    pub press_begin: f64,
    pub press_force: f64,
    pub force_gain: f64,
    pub operation_offset: f64,
    pub park_q1_deg: f64,
    pub park_q2_deg: f64,
}

impl ArmSection {
    pub fn from_parts(arm: &ArmParams, schedule: &ArmSchedule) -> Self {
        Self {
            link1: arm.l1,
            link2: arm.l2,
            mass_link1: arm.m_link1,
            mass_link2: arm.m_link2,
            mass_tool: arm.m_tool,
            base_offset: arm.base_offset,
            base_height: arm.base_height,
            deploy_begin: schedule.deploy_begin,
            deploy_duration: schedule.deploy_duration,
            press_begin: schedule.press_begin,
            press_force: schedule.press_force,
            force_gain: schedule.force_gain,
            operation_offset: schedule.operation_offset,
            park_q1_deg: schedule.park.0.to_degrees(),
            park_q2_deg: schedule.park.1.to_degrees(),
        }
    }

    pub fn arm_params(&self) -> ArmParams {
        ArmParams {
            l1: self.link1,
            l2: self.link2,
            m_link1: self.mass_link1,
            m_link2: self.mass_link2,
            m_tool: self.mass_tool,
            base_offset: self.base_offset,
            base_height: self.base_height,
        }
    }

    pub fn schedule(&self) -> ArmSchedule {
        ArmSchedule {
            deploy_begin: self.deploy_begin,
            deploy_duration: self.deploy_duration,
            press_begin: self.press_begin,
            press_force: self.press_force,
            force_gain: self.force_gain,
            operation_offset: self.operation_offset,
            park: (
                self.park_q1_deg.to_radians(),
                self.park_q2_deg.to_radians(),
            ),
        }
    }
}

/// One waypoint row of a custom scenario script.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaypointRow {
    /// Activation time, s; omit and set `on_stable_contact` instead for a
    /// trigger-activated waypoint.
    pub t: Option<f64>,
    #[serde(default)]
    pub on_stable_contact: bool,
    pub x: f64,
    pub z: f64,
    #[serde(default)]
    pub theta: f64,
    pub phase: String,
    /// "step", "linear", or "contact_gated".
    pub ramp: String,
    #[serde(default)]
    pub ramp_duration: f64,
    #[serde(default)]
    pub ramp_rate: f64,
    #[serde(default)]
    pub complete_phase: Option<String>,
}

fn parse_phase(s: &str) -> Result<Phase, ConfigError> {
    Ok(match s {
        "approach" => Phase::Approach,
        "push" => Phase::Push,
        "self_displace" => Phase::SelfDisplace,
        "shift" => Phase::Shift,
        "deploy" => Phase::Deploy,
        "press" => Phase::Press,
        "retract" => Phase::Retract,
        "hover" => Phase::Hover,
        other => {
            return Err(ConfigError::Invalid(format!(
                "unknown phase '{other}' in waypoint"
            )))
        }
    })
}

impl WaypointRow {
    pub fn to_waypoint(&self) -> Result<Waypoint, ConfigError> {
        let at = match (self.t, self.on_stable_contact) {
            (Some(t), false) => Activation::Time(t),
            (None, true) => Activation::StableContact,
            _ => {
                return Err(ConfigError::Invalid(
                    "waypoint needs exactly one of `t` or `on_stable_contact = true`".into(),
                ))
            }
        };
        let ramp = match self.ramp.as_str() {
            "step" => Ramp::Step,
            "linear" => Ramp::Linear {
                duration: self.ramp_duration,
            },
            "contact_gated" => Ramp::ContactGated {
                rate: self.ramp_rate,
                pause_gap: 0.005,
            },
            other => {
                return Err(ConfigError::Invalid(format!(
                    "unknown ramp '{other}' in waypoint"
                )))
            }
        };
        Ok(Waypoint {
            at,
            x: self.x,
            z: self.z,
            theta: self.theta,
            phase: parse_phase(&self.phase)?,
            ramp,
            complete_phase: self
                .complete_phase
                .as_deref()
                .map(parse_phase)
                .transpose()?,
        })
    }
}

/// The whole run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub platform: PlatformParams,
    pub contact: ContactSection,
    pub gains: GainsSection,
    pub timing: ScenarioTiming,
    pub run: RunSection,
    pub arm: Option<ArmSection>,
    #[serde(rename = "waypoint", skip_serializing_if = "Vec::is_empty")]
    pub waypoints: Vec<WaypointRow>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.platform.validate()?;
        if cfg.run.decimation == 0 {
            return Err(ConfigError::Invalid("decimation must be >= 1".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn contact_config(&self) -> ContactConfig {
        self.contact.to_contact_config(&self.platform)
    }

    /// The custom scenario's waypoint script.
    pub fn custom_script(&self) -> Result<WaypointScript, ConfigError> {
        if self.waypoints.is_empty() {
            return Err(ConfigError::Invalid(
                "custom scenario requires at least one [[waypoint]] block".into(),
            ));
        }
        let waypoints = self
            .waypoints
            .iter()
            .map(|row| row.to_waypoint())
            .collect::<Result<Vec<_>, _>>()?;
        let script = WaypointScript { waypoints };
        script.validate().map_err(ConfigError::Invalid)?;
        Ok(script)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_round_trips() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml();
        let again = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg, again);
        // And the round trip is idempotent at the text level.
        assert_eq!(text, again.to_toml());
    }

    #[test]
    fn bad_scenario_name_is_rejected() {
        assert!(ScenarioName::parse("task3").is_err());
        assert_eq!(ScenarioName::parse("task2a").unwrap(), ScenarioName::Task2a);
    }

    #[test]
    fn invalid_platform_is_rejected_with_details() {
        let mut cfg = RunConfig::default();
        cfg.platform.plate_mass = 5.0; // exceeds total mass
        let text = cfg.to_toml();
        match RunConfig::parse(&text) {
            Err(ConfigError::Platform(report)) => {
                assert!(report.violations.iter().any(|v| v.contains("m_S < m")));
            }
            other => panic!("expected platform error, got {other:?}"),
        }
    }

    #[test]
    fn waypoint_rows_convert() {
        let row = WaypointRow {
            t: Some(1.0),
            on_stable_contact: false,
            x: 0.4,
            z: 1.0,
            theta: 0.0,
            phase: "push".into(),
            ramp: "linear".into(),
            ramp_duration: 2.0,
            ramp_rate: 0.0,
            complete_phase: Some("self_displace".into()),
        };
        let wp = row.to_waypoint().unwrap();
        assert_eq!(wp.phase, Phase::Push);
        assert_eq!(wp.complete_phase, Some(Phase::SelfDisplace));
        let bad = WaypointRow {
            t: None,
            on_stable_contact: false,
            ..row
        };
        assert!(bad.to_waypoint().is_err());
    }

    #[test]
    fn contact_block_mirrors_platform_friction() {
        let mut cfg = RunConfig::default();
        cfg.platform.mu_static = 0.6;
        cfg.platform.mu_kinetic = 0.55;
        let c = cfg.contact_config();
        assert_eq!(c.mu_s, 0.6);
        assert_eq!(c.mu_k, 0.55);
    }
}
