//! Cascade flight controller: impedance and attitude loops feeding a
//! thrust/tilt allocation, the tilt-feedback plate positioning loop, and a
//! waypoint sequencer that schedules pushing tasks against the wall.

use crate::arm::{
    forward_kinematics, inverse_kinematics, static_joint_torques, ArmParams, Elbow,
};
use crate::dynamics::{ControlOutput, Controller, TickContext};
use crate::model::{com_from_plate, PlatformParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// Task phase labels recorded in the trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Approach,
    Push,
    SelfDisplace,
    Shift,
    Deploy,
    Press,
    Retract,
    Hover,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Approach => "approach",
            Phase::Push => "push",
            Phase::SelfDisplace => "self_displace",
            Phase::Shift => "shift",
            Phase::Deploy => "deploy",
            Phase::Press => "press",
            Phase::Retract => "retract",
            Phase::Hover => "hover",
        }
    }
}

/// Which actuator limits were hit while allocating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SaturationFlags {
    pub t1_clamped: bool,
    pub t2_clamped: bool,
    pub u_clamped: bool,
}

/// Allocated actuation plus the commanded plate position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlCommand {
    /// Front-rotor thrust, N, in [0, t1_max].
    pub t1: f64,
    /// Back-rotor thrust, N, in [0, t2_max].
    pub t2: f64,
    /// Back-rotor tilt command, rad, in [-pi/2, pi/2].
    pub alpha: f64,
    /// Plate position command, m, within the plate bounds.
    pub l_cmd: f64,
    pub saturation: SaturationFlags,
}

/// Virtual spring-damper rendering of the position loops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpedanceConfig {
    /// Horizontal stiffness, N/m.
    pub kp_x: f64,
    /// Horizontal damping, N s/m.
    pub kd_x: f64,
    /// Vertical stiffness, N/m.
    pub kp_z: f64,
    /// Vertical damping, N s/m.
    pub kd_z: f64,
    /// Adds the vehicle weight to the vertical channel.
    pub gravity_ff: bool,
}

impl Default for ImpedanceConfig {
    fn default() -> Self {
        Self {
            kp_x: 50.0,
            kd_x: 30.0,
            kp_z: 150.0,
            kd_z: 40.0,
            gravity_ff: true,
        }
    }
}

/// PD attitude loop on the pitch angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttitudeConfig {
    /// Proportional gain, N m/rad.
    pub kp: f64,
    /// Rate gain, N m s/rad.
    pub kd: f64,
    /// Pitch reference, rad.
    pub theta_ref: f64,
}

impl Default for AttitudeConfig {
    fn default() -> Self {
        Self {
            kp: 150.0,
            kd: 8.0,
            theta_ref: 0.0,
        }
    }
}

/// Gains of the tilt-feedback plate positioning loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComShiftConfig {
    /// Proportional gain, m/rad.
    pub k_alpha: f64,
    /// Integral gain, m/(rad s).
    pub k_alpha_i: f64,
    /// Tilt target, rad.
    pub alpha_max: f64,
    /// Clamp on the integral contribution, m.
    pub integrator_limit: f64,
    /// Requires a stable contact before the loop may engage.
    pub enabled_gate: bool,
}

impl Default for ComShiftConfig {
    fn default() -> Self {
        Self {
            k_alpha: 0.15,
            k_alpha_i: 0.5,
            alpha_max: FRAC_PI_2,
            integrator_limit: 0.4,
            enabled_gate: true,
        }
    }
}

/// Desired planar wrench: horizontal force, vertical force, pitch torque.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wrench {
    pub fx: f64,
    pub fz: f64,
    pub tau: f64,
}

/// Desired wrench from the impedance and attitude loops for a pose
/// setpoint `(x, z, theta)`.
pub fn impedance_wrench(
    state: &crate::model::PlanarState,
    setpoint: (f64, f64, f64),
    imp: &ImpedanceConfig,
    att: &AttitudeConfig,
    params: &PlatformParams,
) -> Wrench {
    let fx = imp.kp_x * (setpoint.0 - state.x) - imp.kd_x * state.vx;
    let mut fz = imp.kp_z * (setpoint.1 - state.z) - imp.kd_z * state.vz;
    if imp.gravity_ff {
        fz += params.weight();
    }
    let tau = att.kp * (setpoint.2 - state.theta) - att.kd * state.omega;
    Wrench { fx, fz, tau }
}

/// Thrusts and tilt realizing a wrench at CoM displacement `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub t1: f64,
    pub t2: f64,
    pub alpha: f64,
    /// Vertical back-thrust share `T2 cos(alpha)` demanded before
    /// saturation, N.
    pub u: f64,
    pub flags: SaturationFlags,
}

/// Maps a desired wrench to `(T1, T2, alpha)` with moment arms `(L - d)`
/// front and `(L + d)` back about the CoM:
///
/// `T1 = (tau + fz (L + d)) / 2L`, `u = (fz (L - d) - tau) / 2L`,
/// `T2 = sqrt(fx^2 + u^2)`, `alpha = atan2(fx, u)`.
///
/// T2 saturates at its limit preserving the tilt; negative T1 or vertical
/// share demands clamp to zero and are flagged.
pub fn allocate(wrench: &Wrench, d: f64, params: &PlatformParams) -> Allocation {
    let two_l = 2.0 * params.rotor_arm;
    let t1_raw = (wrench.tau + wrench.fz * (params.rotor_arm + d)) / two_l;
    let u_raw = (wrench.fz * (params.rotor_arm - d) - wrench.tau) / two_l;
    let mut flags = SaturationFlags::default();
    if !(0.0..=params.t1_max).contains(&t1_raw) {
        flags.t1_clamped = true;
    }
    if u_raw < 0.0 {
        flags.u_clamped = true;
    }
    let t1 = t1_raw.clamp(0.0, params.t1_max);
    let u = u_raw.max(0.0);
    let mut t2 = wrench.fx.hypot(u);
    if t2 > params.t2_max {
        t2 = params.t2_max;
        flags.t2_clamped = true;
    }
    let alpha = wrench.fx.atan2(u).clamp(-FRAC_PI_2, FRAC_PI_2);
    Allocation {
        t1,
        t2,
        alpha,
        u,
        flags,
    }
}

/// Wrench produced by an actuation triple at CoM displacement `d`; the
/// algebraic inverse of [`allocate`] on the unsaturated range.
pub fn forward_wrench(t1: f64, t2: f64, alpha: f64, d: f64, params: &PlatformParams) -> Wrench {
    let u = t2 * alpha.cos();
    Wrench {
        fx: t2 * alpha.sin(),
        fz: t1 + u,
        tau: t1 * (params.rotor_arm - d) - u * (params.rotor_arm + d),
    }
}

/// State of the plate positioning loop. The integral contribution is kept
/// in meters and clamped directly, with integration frozen against the
/// saturated direction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComShift {
    pub cfg: ComShiftConfig,
    integ: f64,
    last_cmd: f64,
}

impl ComShift {
    pub fn new(cfg: ComShiftConfig) -> Self {
        Self {
            cfg,
            integ: 0.0,
            last_cmd: 0.0,
        }
    }

    /// Integral contribution, m.
    pub fn integral(&self) -> f64 {
        self.integ
    }

    /// Advances the loop one control period. While gated the command
    /// follows `k_alpha e + integral`; when the gate drops, command and
    /// integrator ramp home at the plate rate limit.
    pub fn update(&mut self, alpha_meas: f64, dt: f64, gate: bool, l_max: f64, home_rate: f64) -> f64 {
        if gate {
            let e = self.cfg.alpha_max - alpha_meas;
            let against_upper = self.last_cmd >= l_max && e > 0.0;
            let against_lower = self.last_cmd <= 0.0 && e < 0.0;
            if !(against_upper || against_lower) {
                self.integ = (self.integ + self.cfg.k_alpha_i * e * dt)
                    .clamp(-self.cfg.integrator_limit, self.cfg.integrator_limit);
            }
            self.last_cmd = (self.cfg.k_alpha * e + self.integ).clamp(0.0, l_max);
        } else {
            self.last_cmd = (self.last_cmd - home_rate * dt).max(0.0);
            self.integ = self.last_cmd;
        }
        self.last_cmd
    }
}

/// When a waypoint becomes the active target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Activation {
    /// Activates at an absolute time, s.
    Time(f64),
    /// Activates once the frame contact has been stable (and every earlier
    /// waypoint has activated).
    StableContact,
}

/// How the emitted setpoint travels toward the waypoint target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Ramp {
    /// Jump to the target immediately.
    Step,
    /// Interpolate linearly over a fixed duration, s.
    Linear { duration: f64 },
    /// Advance along x at a fixed rate, m/s, pausing whenever the frame tip
    /// retreats more than `pause_gap` m from the wall. Used to load the
    /// contact monotonically while pushing.
    ContactGated { rate: f64, pause_gap: f64 },
}

/// One scripted setpoint. Final push entries may lie "inside" the wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub at: Activation,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
    pub phase: Phase,
    pub ramp: Ramp,
    /// Phase reported once the ramp has reached its target.
    pub complete_phase: Option<Phase>,
}

/// Ordered waypoint list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaypointScript {
    pub waypoints: Vec<Waypoint>,
}

impl WaypointScript {
    /// Validates ordering: activation times must be strictly increasing.
    pub fn validate(&self) -> Result<(), String> {
        if self.waypoints.is_empty() {
            return Err("waypoint script is empty".into());
        }
        let mut last = f64::NEG_INFINITY;
        for wp in &self.waypoints {
            if let Activation::Time(t) = wp.at {
                if t <= last {
                    return Err(format!("waypoint times not strictly increasing at t = {t}"));
                }
                last = t;
            }
        }
        Ok(())
    }
}

/// Runtime of the waypoint script.
#[derive(Debug, Clone)]
struct Sequencer {
    script: WaypointScript,
    active: usize,
    /// Setpoint at the moment the active waypoint took over.
    seg_from: (f64, f64),
    seg_start_t: f64,
    /// Accumulated x-advance of a contact-gated ramp.
    advance: f64,
    emitted: (f64, f64),
}

impl Sequencer {
    fn new(script: WaypointScript) -> Self {
        let first = script.waypoints[0];
        Self {
            script,
            active: 0,
            seg_from: (first.x, first.z),
            seg_start_t: 0.0,
            advance: 0.0,
            emitted: (first.x, first.z),
        }
    }

    /// Emits the current setpoint and phase. `tip_gap` is the frame tip's
    /// signed distance into the wall (positive = penetrating).
    fn sequence(&mut self, t: f64, stable: bool, tip_gap: f64) -> ((f64, f64, f64), Phase) {
        // Activate the next waypoint when its condition fires. Time-based
        // segments are pinned to their scheduled start so the ramp shape
        // does not depend on the tick the activation was noticed.
        while self.active + 1 < self.script.waypoints.len() {
            let next = self.script.waypoints[self.active + 1];
            let start = match next.at {
                Activation::Time(t0) if t >= t0 => t0,
                Activation::StableContact if stable => t,
                _ => break,
            };
            self.active += 1;
            self.seg_from = self.emitted;
            self.seg_start_t = start;
            self.advance = 0.0;
        }

        let wp = self.script.waypoints[self.active];
        let (sp, complete) = match wp.ramp {
            Ramp::Step => ((wp.x, wp.z), true),
            Ramp::Linear { duration } => {
                let f = if duration <= 0.0 {
                    1.0
                } else {
                    ((t - self.seg_start_t) / duration).clamp(0.0, 1.0)
                };
                (
                    (
                        self.seg_from.0 + f * (wp.x - self.seg_from.0),
                        self.seg_from.1 + f * (wp.z - self.seg_from.1),
                    ),
                    f >= 1.0,
                )
            }
            Ramp::ContactGated { rate, pause_gap } => {
                let span = wp.x - self.seg_from.0;
                let dir = span.signum();
                if tip_gap > -pause_gap && self.advance < span.abs() {
                    // One control period of advance; the sequencer is only
                    // consulted at the control rate.
                    self.advance = (self.advance + rate * CONTROL_PERIOD_HINT).min(span.abs());
                }
                (
                    (self.seg_from.0 + dir * self.advance, wp.z),
                    self.advance >= span.abs(),
                )
            }
        };
        self.emitted = sp;
        let phase = if complete {
            wp.complete_phase.unwrap_or(wp.phase)
        } else {
            wp.phase
        };
        ((sp.0, sp.1, wp.theta), phase)
    }
}

/// The sequencer advances contact-gated ramps by one control period per
/// call; scripts are built for the default 100 Hz control rate.
const CONTROL_PERIOD_HINT: f64 = 0.01;

/// Slow upward trim of the vertical reference while the plate loop is
/// engaged, loading the contact friction until the tilt pins at its target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZTrimConfig {
    /// Trim rate, m/s.
    pub rate: f64,
    /// Total trim budget, m.
    pub max: f64,
    /// Tilt error below which trimming stops, rad.
    pub stop_error: f64,
}

impl Default for ZTrimConfig {
    fn default() -> Self {
        Self {
            rate: 0.008,
            max: 0.12,
            stop_error: 0.005,
        }
    }
}

/// Plate command source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlatePlan {
    /// Closed-loop tilt feedback (the self-displacement calibration).
    TiltFeedback,
    /// Open ramp to a fixed target once the push phase completes.
    RampTo(f64),
}

/// End-effector pressing plan for the tool-manipulation scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmPlan {
    pub arm: ArmParams,
    /// Parked joint angles, rad.
    pub park: (f64, f64),
    /// Deployment start and duration, s.
    pub deploy_begin: f64,
    pub deploy_duration: f64,
    /// Force regulation start, s.
    pub press_begin: f64,
    /// Normal-force target at the end-effector, N.
    pub press_force: f64,
    /// Integral gain of the penetration-setpoint law, m/(N s).
    pub force_gain: f64,
    /// Penetration setpoint bound, m.
    pub pen_limit: f64,
    /// Operation-point offset above the frame contact, m.
    pub operation_offset: f64,
}

#[derive(Debug, Clone)]
struct ArmExecutor {
    plan: ArmPlan,
    q: (f64, f64),
    pen_sp: f64,
    deployed: bool,
}

impl ArmExecutor {
    fn new(plan: ArmPlan) -> Self {
        Self {
            q: plan.park,
            pen_sp: 0.0,
            deployed: false,
            plan,
        }
    }

    /// Tracks the deployment schedule and the press-force integral law.
    /// Returns the end-effector attachment in body coordinates (while
    /// deployed) and the signed joint torques from the measured contact
    /// force.
    fn tick(
        &mut self,
        t: f64,
        dt: f64,
        state: &crate::model::PlanarState,
        ee_measured: (f64, f64),
        wall_x: f64,
        gravity: f64,
    ) -> (Option<(f64, f64)>, (f64, f64)) {
        let plan = &self.plan;
        if t >= plan.deploy_begin {
            let f = ((t - plan.deploy_begin) / plan.deploy_duration).clamp(0.0, 1.0);
            if t >= plan.press_begin {
                self.pen_sp = (self.pen_sp
                    + plan.force_gain * (plan.press_force - ee_measured.0) * dt)
                    .clamp(0.0, plan.pen_limit);
            }
            let base_x = state.l + plan.arm.base_offset;
            // Body-frame x of the wall surface (plus pressed setpoint) at
            // the arm-base height.
            let (s, c) = state.theta.sin_cos();
            let wall_body =
                (wall_x + self.pen_sp - state.x + plan.arm.base_height * s) / c;
            let target = (
                wall_body - base_x,
                plan.operation_offset - plan.arm.base_height,
            );
            if let Ok(goal) = inverse_kinematics(&plan.arm, target, Elbow::Down) {
                self.q = (
                    plan.park.0 + f * (goal.0 - plan.park.0),
                    plan.park.1 + f * (goal.1 - plan.park.1),
                );
            }
            self.deployed = f >= 1.0;
        }
        let tau = static_joint_torques(
            &plan.arm,
            self.q.0,
            self.q.1,
            (ee_measured.0, -ee_measured.1),
            gravity,
        );
        let attach = if self.deployed {
            let p = forward_kinematics(&plan.arm, self.q.0, self.q.1);
            Some((
                state.l + plan.arm.base_offset + p.0,
                plan.arm.base_height + p.1,
            ))
        } else {
            None
        };
        (attach, tau)
    }
}

/// The full cascade: sequencer, impedance + attitude loops, allocation with
/// tilt-lag thrust scaling, the plate loop, and optionally an arm plan.
#[derive(Debug, Clone)]
pub struct CascadeController {
    pub impedance: ImpedanceConfig,
    pub attitude: AttitudeConfig,
    seq: Sequencer,
    shift: ComShift,
    plate_plan: PlatePlan,
    plate_rate: f64,
    trim_cfg: ZTrimConfig,
    trim: f64,
    /// Scales the back thrust so its vertical component at the current
    /// servo angle never exceeds the demanded share. Prevents climb
    /// transients while the tilt servo lags the command.
    pub tilt_lag_compensation: bool,
    wall_x: f64,
    arm: Option<ArmExecutor>,
    last_alpha_cmd: f64,
    control_dt: f64,
}

impl CascadeController {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        impedance: ImpedanceConfig,
        attitude: AttitudeConfig,
        shift_cfg: ComShiftConfig,
        script: WaypointScript,
        plate_plan: PlatePlan,
        plate_rate: f64,
        trim_cfg: ZTrimConfig,
        wall_x: f64,
        arm: Option<ArmPlan>,
        control_dt: f64,
    ) -> Self {
        Self {
            impedance,
            attitude,
            seq: Sequencer::new(script),
            shift: ComShift::new(shift_cfg),
            plate_plan,
            plate_rate,
            trim_cfg,
            trim: 0.0,
            tilt_lag_compensation: true,
            wall_x,
            arm: arm.map(ArmExecutor::new),
            last_alpha_cmd: 0.0,
            control_dt,
        }
    }
}

impl Controller for CascadeController {
    fn tick(&mut self, ctx: &TickContext) -> ControlOutput {
        let state = ctx.state;
        let tip_gap = state.world_point(ctx.params.tip_offset(), 0.0).0 - self.wall_x;
        let ((sp_x, sp_z, sp_theta), phase) =
            self.seq.sequence(ctx.t, ctx.stable_contact, tip_gap);

        // Plate command.
        let l_max = ctx.params.plate_max();
        let (gate, l_cmd, integ) = match self.plate_plan {
            PlatePlan::TiltFeedback => {
                let gate = matches!(phase, Phase::Push | Phase::SelfDisplace)
                    && (!self.shift.cfg.enabled_gate || ctx.stable_contact);
                let cmd = self.shift.update(
                    self.last_alpha_cmd,
                    self.control_dt,
                    gate,
                    l_max,
                    self.plate_rate,
                );
                (gate, cmd, self.shift.integral())
            }
            PlatePlan::RampTo(target) => {
                let engaged = matches!(phase, Phase::Shift | Phase::Deploy | Phase::Press);
                let cmd = if engaged { target.clamp(0.0, l_max) } else { 0.0 };
                (false, cmd, 0.0)
            }
        };

        // Vertical reference trim while the plate loop is engaged.
        if gate
            && (self.shift.cfg.alpha_max - self.last_alpha_cmd) > self.trim_cfg.stop_error
            && self.trim < self.trim_cfg.max
        {
            self.trim = (self.trim + self.trim_cfg.rate * self.control_dt).min(self.trim_cfg.max);
        }
        let trimmed_z = if matches!(phase, Phase::Push | Phase::SelfDisplace) {
            sp_z + self.trim
        } else {
            sp_z
        };

        // Wrench and allocation.
        let attitude = AttitudeConfig {
            theta_ref: sp_theta,
            ..self.attitude
        };
        let wrench = impedance_wrench(
            state,
            (sp_x, trimmed_z, sp_theta),
            &self.impedance,
            &attitude,
            ctx.params,
        );
        let alloc = allocate(&wrench, com_from_plate(ctx.params, state.l), ctx.params);
        let mut t2 = alloc.t2;
        if self.tilt_lag_compensation {
            let ca = state.alpha.cos();
            if ca > 1e-9 && t2 * ca > alloc.u {
                t2 = alloc.u / ca;
            }
        }
        self.last_alpha_cmd = alloc.alpha;

        // Arm plan.
        let mut phase = phase;
        let (ee_attachment, joint_torques) = match self.arm.as_mut() {
            Some(exec) => {
                let out = exec.tick(
                    ctx.t,
                    self.control_dt,
                    state,
                    (ctx.ee.normal_force, ctx.ee.tangential_force),
                    self.wall_x,
                    ctx.params.gravity,
                );
                // Label the arm sub-phases once the plate shift is underway.
                if matches!(phase, Phase::Shift | Phase::Deploy | Phase::Press) {
                    if ctx.t >= exec.plan.press_begin {
                        phase = Phase::Press;
                    } else if ctx.t >= exec.plan.deploy_begin {
                        phase = Phase::Deploy;
                    }
                }
                out
            }
            None => (None, (0.0, 0.0)),
        };

        ControlOutput {
            command: ControlCommand {
                t1: alloc.t1,
                t2,
                alpha: alloc.alpha,
                l_cmd,
                saturation: alloc.flags,
            },
            ee_attachment,
            phase,
            gate,
            integ,
            joint_torques,
        }
    }
}

/// A controller that repeats one fixed command; used for open-loop checks.
pub struct FixedCommand(pub ControlCommand);

impl Controller for FixedCommand {
    fn tick(&mut self, _ctx: &TickContext) -> ControlOutput {
        ControlOutput {
            command: self.0,
            ee_attachment: None,
            phase: Phase::Hover,
            gate: false,
            integ: 0.0,
            joint_torques: (0.0, 0.0),
        }
    }
}
