//! Built-in closed-loop scenarios: the plate-position calibration push
//! (task 1) and the two tool-manipulation variants (task 2).
//!
//! Each builder assembles the waypoint script, controller, and world
//! configuration that reproduce the corresponding task, and returns the
//! simulation trace sampled at the control rate.

use crate::arm::{inverse_kinematics, ArmParams, Elbow};
use crate::contact::ContactConfig;
use crate::control::{
    Activation, ArmPlan, AttitudeConfig, CascadeController, ComShiftConfig, ImpedanceConfig,
    Phase, PlatePlan, Ramp, Waypoint, WaypointScript, ZTrimConfig,
};
use crate::dynamics::{run, ActuatorLimits, SimError};
use crate::model::{PlanarState, PlatformParams};
use crate::statics::predict_ideal_plate_position;
use crate::trace::SimTrace;
use serde::{Deserialize, Serialize};

/// Tool-manipulation variant: displaced CoM with short beams, or
/// non-displaced CoM with long beams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskTwoVariant {
    DisplacedCom,
    NonDisplacedCom,
}

/// Everything a closed-loop scenario needs besides the platform itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTiming {
    /// Total run length, s.
    pub duration: f64,
    /// Physics step, s.
    pub physics_dt: f64,
    /// Control period, s.
    pub control_dt: f64,
}

impl Default for ScenarioTiming {
    fn default() -> Self {
        Self {
            duration: 30.0,
            physics_dt: 1e-3,
            control_dt: 1e-2,
        }
    }
}

/// Gains shared by the built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerGains {
    pub impedance: ImpedanceConfig,
    pub attitude: AttitudeConfig,
    pub com_shift: ComShiftConfig,
    pub z_trim: ZTrimConfig,
    pub limits_alpha_rate: f64,
    pub limits_plate_rate: f64,
}

impl Default for ControllerGains {
    fn default() -> Self {
        Self {
            impedance: ImpedanceConfig::default(),
            attitude: AttitudeConfig::default(),
            com_shift: ComShiftConfig::default(),
            z_trim: ZTrimConfig::default(),
            limits_alpha_rate: 4.0,
            limits_plate_rate: 0.04,
        }
    }
}

/// Script geometry for the pushing tasks, derived from the wall position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PushScript {
    /// Hover start x of the body origin, m.
    pub start_x: f64,
    /// Hover height, m.
    pub start_z: f64,
    /// Approach creep start time, s.
    pub approach_begin: f64,
    /// Approach creep duration, s.
    pub approach_duration: f64,
    /// Dock target: body origin x placing the tip just inside the wall, m.
    pub dock_x: f64,
    /// Deep-push start time, s.
    pub push_begin: f64,
    /// Setpoint advance rate while in contact, m/s.
    pub push_rate: f64,
    /// Total setpoint advance into the wall, m.
    pub push_depth: f64,
    /// Retract start time, s (none to hold the push until the end).
    pub retract_begin: Option<f64>,
    /// Retract target x, m.
    pub retract_x: f64,
    /// Phase reported once the push ramp completes.
    pub push_complete_phase: Phase,
}

impl PushScript {
    /// The calibration-task script for a wall at `wall_x` with the default
    /// platform geometry (tip offset 0.3 m).
    pub fn task1(wall_x: f64) -> Self {
        let tip = 0.3;
        Self {
            start_x: wall_x - tip - 0.03,
            start_z: 1.0,
            approach_begin: 1.0,
            approach_duration: 4.0,
            dock_x: wall_x - tip + 0.002,
            push_begin: 6.0,
            push_rate: 0.06,
            push_depth: 0.6,
            retract_begin: Some(22.0),
            retract_x: wall_x - tip - 0.05,
            push_complete_phase: Phase::SelfDisplace,
        }
    }

    /// The tool-task script: identical docking, then a gentle sustained
    /// press sized for the arm operation.
    pub fn task2(wall_x: f64) -> Self {
        Self {
            push_depth: 0.2,
            retract_begin: None,
            push_complete_phase: Phase::Shift,
            ..Self::task1(wall_x)
        }
    }

    fn to_waypoints(self) -> WaypointScript {
        let mut waypoints = vec![
            Waypoint {
                at: Activation::Time(0.0),
                x: self.start_x,
                z: self.start_z,
                theta: 0.0,
                phase: Phase::Approach,
                ramp: Ramp::Step,
                complete_phase: None,
            },
            Waypoint {
                at: Activation::Time(self.approach_begin),
                x: self.dock_x,
                z: self.start_z,
                theta: 0.0,
                phase: Phase::Approach,
                ramp: Ramp::Linear {
                    duration: self.approach_duration,
                },
                complete_phase: None,
            },
            Waypoint {
                at: Activation::Time(self.push_begin),
                x: self.dock_x + self.push_depth,
                z: self.start_z,
                theta: 0.0,
                phase: Phase::Push,
                ramp: Ramp::ContactGated {
                    rate: self.push_rate,
                    pause_gap: 0.005,
                },
                complete_phase: Some(self.push_complete_phase),
            },
        ];
        if let Some(t_retract) = self.retract_begin {
            waypoints.push(Waypoint {
                at: Activation::Time(t_retract),
                x: self.retract_x,
                z: self.start_z,
                theta: 0.0,
                phase: Phase::Retract,
                ramp: Ramp::Linear { duration: 2.0 },
                complete_phase: None,
            });
        }
        WaypointScript { waypoints }
    }
}

/// Builds and runs the calibration task: push on the wall with the
/// alignment frame and let the tilt-feedback loop find the plate position.
pub fn run_task1(
    params: &PlatformParams,
    contact: &ContactConfig,
    gains: &ControllerGains,
    script: &PushScript,
    timing: &ScenarioTiming,
) -> Result<SimTrace, SimError> {
    let mut controller = CascadeController::new(
        gains.impedance,
        AttitudeConfig {
            theta_ref: 0.0,
            ..gains.attitude
        },
        gains.com_shift,
        script.to_waypoints(),
        PlatePlan::TiltFeedback,
        gains.limits_plate_rate,
        gains.z_trim,
        contact.wall_x,
        None,
        timing.control_dt,
    );
    run(
        PlanarState::at_rest(script.start_x, script.start_z),
        &mut controller,
        params,
        contact,
        ActuatorLimits {
            alpha_rate: gains.limits_alpha_rate,
            plate_rate: gains.limits_plate_rate,
        },
        timing.duration,
        timing.physics_dt,
        timing.control_dt,
    )
}

/// Arm schedule shared by both tool-task variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmSchedule {
    /// Arm deployment start, s.
    pub deploy_begin: f64,
    /// Deployment duration, s.
    pub deploy_duration: f64,
    /// Force-regulation start, s.
    pub press_begin: f64,
    /// Normal-force target at the end-effector, N.
    pub press_force: f64,
    /// Integral gain of the penetration-setpoint law, m/(N s).
    pub force_gain: f64,
    /// Operation-point offset above the frame contact, m.
    pub operation_offset: f64,
    /// Parked joint angles, rad.
    pub park: (f64, f64),
}

impl Default for ArmSchedule {
    fn default() -> Self {
        Self {
            deploy_begin: 14.0,
            deploy_duration: 2.0,
            press_begin: 16.0,
            press_force: 5.0,
            force_gain: 0.002,
            operation_offset: 0.05,
            park: (120f64.to_radians(), -150f64.to_radians()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("arm cannot reach the operation point: {0}")]
    Unreachable(crate::arm::ArmError),
    #[error("plate target unavailable: {0}")]
    Statics(#[from] crate::statics::StaticsError),
}

/// Builds and runs a tool-manipulation scenario: the platform docks and
/// presses gently with the frame, shifts the plate (displaced-CoM variant
/// only), then the arm deploys and regulates a normal push at the
/// operation point.
///
/// The operation point must be reachable by the arm from its mounted base
/// with the plate at the scenario target; an unreachable configuration is
/// rejected before the simulation starts.
pub fn run_task2_scenario(
    variant: TaskTwoVariant,
    params: &PlatformParams,
    contact: &ContactConfig,
    gains: &ControllerGains,
    arm: &ArmParams,
    schedule: &ArmSchedule,
    timing: &ScenarioTiming,
) -> Result<SimTrace, ScenarioError> {
    let plate_target = match variant {
        TaskTwoVariant::DisplacedCom => {
            predict_ideal_plate_position(params, params.t2_max)?.l_star
        }
        TaskTwoVariant::NonDisplacedCom => 0.0,
    };

    // Reachability of the operation point with the docked, settled
    // geometry: frame tip at the wall, plate at its target.
    let wall_body_x = params.tip_offset();
    let target = (
        wall_body_x - (plate_target + arm.base_offset),
        schedule.operation_offset - arm.base_height,
    );
    inverse_kinematics(arm, target, Elbow::Down).map_err(ScenarioError::Unreachable)?;

    let script = PushScript::task2(contact.wall_x);
    let plan = ArmPlan {
        arm: *arm,
        park: schedule.park,
        deploy_begin: schedule.deploy_begin,
        deploy_duration: schedule.deploy_duration,
        press_begin: schedule.press_begin,
        press_force: schedule.press_force,
        force_gain: schedule.force_gain,
        pen_limit: 0.01,
        operation_offset: schedule.operation_offset,
    };
    let mut controller = CascadeController::new(
        gains.impedance,
        gains.attitude,
        gains.com_shift,
        script.to_waypoints(),
        PlatePlan::RampTo(plate_target),
        gains.limits_plate_rate,
        // No vertical trim in the tool task: the platform holds a gentle
        // unsaturated press.
        ZTrimConfig {
            rate: 0.0,
            max: 0.0,
            stop_error: 1.0,
        },
        contact.wall_x,
        Some(plan),
        timing.control_dt,
    );
    run(
        PlanarState::at_rest(script.start_x, script.start_z),
        &mut controller,
        params,
        contact,
        ActuatorLimits {
            alpha_rate: gains.limits_alpha_rate,
            plate_rate: gains.limits_plate_rate,
        },
        timing.duration,
        timing.physics_dt,
        timing.control_dt,
    )
    .map_err(ScenarioError::Sim)
}

/// Default arm variant for a tool-task scenario.
pub fn arm_for_variant(variant: TaskTwoVariant) -> ArmParams {
    match variant {
        TaskTwoVariant::DisplacedCom => ArmParams::short_beams(),
        TaskTwoVariant::NonDisplacedCom => ArmParams::long_beams(),
    }
}
