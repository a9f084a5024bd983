//! Scenario execution: builds the configured scenario, runs it, and writes
//! the trace and summary.

use crate::config::{ConfigError, RunConfig, ScenarioName};
use crate::summary::{
    detect_zones, peak_normal_force, peak_torques, steady_window, zones_in_order, Check,
    RunSummary, Zone,
};
use comshift_core::control::{CascadeController, PlatePlan, ZTrimConfig};
use comshift_core::dynamics::{run, ActuatorLimits, SimError};
use comshift_core::model::PlanarState;
use comshift_core::scenario::{
    arm_for_variant, run_task1, run_task2_scenario, PushScript, ScenarioError, TaskTwoVariant,
};
use comshift_core::statics::predict_ideal_plate_position;
use comshift_core::trace::SimTrace;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulation diverged: {0}")]
    Divergence(SimError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl From<SimError> for RunError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NumericalDivergence { .. } => RunError::Divergence(e),
            SimError::BadTimestep { .. } => {
                RunError::Config(ConfigError::Invalid(e.to_string()))
            }
        }
    }
}

impl From<ScenarioError> for RunError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Sim(s) => s.into(),
            ScenarioError::Unreachable(a) => {
                RunError::Config(ConfigError::Invalid(a.to_string()))
            }
            ScenarioError::Statics(s) => RunError::Config(ConfigError::Invalid(s.to_string())),
        }
    }
}

/// Runs the configured scenario and produces its trace and summary.
pub fn sim_task(config: &RunConfig) -> Result<(SimTrace, RunSummary), RunError> {
    let params = config.platform;
    let contact = config.contact_config();
    let gains = config.gains.to_gains();
    let timing = config.timing;

    let trace = match config.run.scenario {
        ScenarioName::Task1 => run_task1(
            &params,
            &contact,
            &gains,
            &PushScript::task1(contact.wall_x),
            &timing,
        )?,
        ScenarioName::Task2a | ScenarioName::Task2b => {
            let variant = if config.run.scenario == ScenarioName::Task2a {
                TaskTwoVariant::DisplacedCom
            } else {
                TaskTwoVariant::NonDisplacedCom
            };
            let (arm, schedule) = match &config.arm {
                Some(section) => (section.arm_params(), section.schedule()),
                None => (
                    arm_for_variant(variant),
                    comshift_core::scenario::ArmSchedule::default(),
                ),
            };
            run_task2_scenario(variant, &params, &contact, &gains, &arm, &schedule, &timing)?
        }
        ScenarioName::Custom => {
            let script = config.custom_script()?;
            let first = script.waypoints[0];
            let mut controller = CascadeController::new(
                gains.impedance,
                gains.attitude,
                gains.com_shift,
                script,
                PlatePlan::TiltFeedback,
                gains.limits_plate_rate,
                ZTrimConfig::default(),
                contact.wall_x,
                None,
                timing.control_dt,
            );
            run(
                PlanarState::at_rest(first.x, first.z),
                &mut controller,
                &params,
                &contact,
                ActuatorLimits {
                    alpha_rate: gains.limits_alpha_rate,
                    plate_rate: gains.limits_plate_rate,
                },
                timing.duration,
                timing.physics_dt,
                timing.control_dt,
            )?
        }
    };

    let summary = summarize(config, &trace);
    Ok((trace, summary))
}

/// Builds the scenario summary with its declared-tolerance checks.
pub fn summarize(config: &RunConfig, trace: &SimTrace) -> RunSummary {
    let (alpha_steady_deg, l_star_achieved) = steady_window(trace);
    let (peak_tau1, peak_tau2) = peak_torques(trace);
    let scenario = config.run.scenario;

    let (l_star_predicted, prediction_note) = if scenario == ScenarioName::Task1 {
        match predict_ideal_plate_position(&config.platform, config.platform.t2_max) {
            Ok(p) => (Some(p.l_star), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, None)
    };

    let zones: Vec<Zone> = if scenario == ScenarioName::Task1 {
        detect_zones(trace)
    } else {
        Vec::new()
    };

    let mut checks = Vec::new();
    match scenario {
        ScenarioName::Task1 => {
            checks.push(Check {
                name: "alpha_steady >= 89 deg".into(),
                value: alpha_steady_deg,
                bound: ">= 89".into(),
                pass: alpha_steady_deg >= 89.0,
            });
            checks.push(Check {
                name: "l_star in [0.24, 0.30] m".into(),
                value: l_star_achieved,
                bound: "[0.24, 0.30]".into(),
                pass: (0.24..=0.30).contains(&l_star_achieved),
            });
            if let Some(pred) = l_star_predicted {
                checks.push(Check {
                    name: "|l_star - prediction| <= 0.02 m".into(),
                    value: (l_star_achieved - pred).abs(),
                    bound: "<= 0.02".into(),
                    pass: (l_star_achieved - pred).abs() <= 0.02,
                });
            }
            checks.push(Check {
                name: "zones ramp/plateau/return/home in order".into(),
                value: zones.len() as f64,
                bound: "= 4".into(),
                pass: zones_in_order(&zones),
            });
        }
        ScenarioName::Task2a | ScenarioName::Task2b => {
            let peak = peak_tau1.max(peak_tau2);
            if scenario == ScenarioName::Task2b {
                checks.push(Check {
                    name: "peak joint torque in [0.3, 0.5] N m".into(),
                    value: peak,
                    bound: "[0.3, 0.5]".into(),
                    pass: (0.3..=0.5).contains(&peak),
                });
            }
            let press: Vec<_> = trace
                .rows
                .iter()
                .filter(|r| r.t >= config.timing.duration - 2.0)
                .collect();
            let mean_force = if press.is_empty() {
                0.0
            } else {
                press.iter().map(|r| r.f_n_ee).sum::<f64>() / press.len() as f64
            };
            checks.push(Check {
                name: "steady EE force near 5 N".into(),
                value: mean_force,
                bound: "5 +- 0.25".into(),
                pass: (mean_force - 5.0).abs() <= 0.25,
            });
        }
        ScenarioName::Custom => {}
    }

    RunSummary {
        scenario: scenario.as_str().to_string(),
        l_star_achieved,
        alpha_steady_deg,
        peak_normal_force: peak_normal_force(trace),
        peak_tau1,
        peak_tau2,
        l_star_predicted,
        prediction_note,
        zones,
        checks,
    }
}

/// Writes the trace CSV and summary TOML into the output directory.
pub fn write_outputs(
    out_dir: &std::path::Path,
    config: &RunConfig,
    trace: &SimTrace,
    summary: &RunSummary,
) -> Result<(), RunError> {
    std::fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let trace_path = out_dir.join("trace.csv");
    std::fs::write(&trace_path, trace.to_csv(config.run.decimation)).map_err(|source| {
        RunError::Io {
            path: trace_path.display().to_string(),
            source,
        }
    })?;
    let summary_path = out_dir.join("summary.toml");
    std::fs::write(&summary_path, summary.to_toml()).map_err(|source| RunError::Io {
        path: summary_path.display().to_string(),
        source,
    })?;
    Ok(())
}
