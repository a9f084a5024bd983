//! Fixed-step planar rigid-body simulator.
//!
//! Semi-implicit (symplectic) Euler at a millisecond step: velocities first,
//! then positions. The body carries a prescribed shifting plate (quasi-static,
//! no reaction from plate acceleration), a fixed front-rotor thrust along
//! body z, a tiltable back-rotor thrust, gravity at the combined CoM, and
//! penalty contacts at the alignment-frame tip and, when an arm scenario is
//! active, the end-effector tip.

use crate::contact::{detect_stable_contact, ContactConfig, ContactState};
use crate::control::{ControlCommand, Phase};
use crate::model::{mass_properties_unchecked, PlanarState, PlatformParams};
use crate::trace::{SimTrace, TraceRow};
use thiserror::Error;

/// Rate-limited actuator record: the tilt servo and the plate drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorState {
    /// Current tilt angle, rad.
    pub alpha: f64,
    /// Servo slew limit, rad/s.
    pub alpha_rate_limit: f64,
    /// Current plate position, m.
    pub l: f64,
    /// Plate drive speed limit, m/s.
    pub l_rate_limit: f64,
}

impl ActuatorState {
    pub fn new(alpha: f64, l: f64, limits: ActuatorLimits) -> Self {
        Self {
            alpha,
            alpha_rate_limit: limits.alpha_rate,
            l,
            l_rate_limit: limits.plate_rate,
        }
    }

    /// Moves both actuators toward their commands, respecting rate limits
    /// and position bounds.
    fn track(&mut self, cmd: &ControlCommand, params: &PlatformParams, dt: f64) {
        let da = (cmd.alpha - self.alpha).clamp(
            -self.alpha_rate_limit * dt,
            self.alpha_rate_limit * dt,
        );
        self.alpha = (self.alpha + da).clamp(-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
        let dl = (cmd.l_cmd - self.l).clamp(-self.l_rate_limit * dt, self.l_rate_limit * dt);
        self.l = (self.l + dl).clamp(0.0, params.plate_max());
    }
}

/// Actuator slew limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActuatorLimits {
    pub alpha_rate: f64,
    pub plate_rate: f64,
}

impl Default for ActuatorLimits {
    fn default() -> Self {
        Self {
            alpha_rate: 4.0,
            plate_rate: 0.04,
        }
    }
}

/// Per-step force breakdown for logging and momentum bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepForces {
    pub f_n_frame: f64,
    pub f_t_frame: f64,
    pub f_n_ee: f64,
    pub f_t_ee: f64,
    /// Net world-frame force on the vehicle, N.
    pub total: (f64, f64),
    /// Net pitch torque about the combined CoM, N m.
    pub torque: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("state became non-finite at physics step {step}")]
    NumericalDivergence { step: u64 },
    #[error("control_dt {control_dt} is not an integer multiple of physics_dt {physics_dt}")]
    BadTimestep { control_dt: f64, physics_dt: f64 },
}

/// The simulation world: state, actuators, and both contact points.
#[derive(Debug, Clone)]
pub struct Simulator {
    pub params: PlatformParams,
    pub contact_cfg: ContactConfig,
    pub state: PlanarState,
    pub actuators: ActuatorState,
    pub frame_contact: ContactState,
    pub ee_contact: ContactState,
    step_count: u64,
}

impl Simulator {
    pub fn new(
        params: PlatformParams,
        contact_cfg: ContactConfig,
        initial: PlanarState,
        limits: ActuatorLimits,
    ) -> Self {
        Self {
            params,
            contact_cfg,
            actuators: ActuatorState::new(initial.alpha, initial.l, limits),
            state: initial,
            frame_contact: ContactState::new(),
            ee_contact: ContactState::new(),
            step_count: 0,
        }
    }

    /// World position and velocity of a body-frame point.
    fn point_kinematics(
        state: &PlanarState,
        body: (f64, f64),
        com: (f64, f64),
    ) -> ((f64, f64), (f64, f64)) {
        let p = state.world_point(body.0, body.1);
        let r = (p.0 - com.0, p.1 - com.1);
        let v = (
            state.vx - state.omega * r.1,
            state.vz + state.omega * r.0,
        );
        (p, v)
    }

    /// Advances the world by one physics step under a zero-order-held
    /// command. `ee_attachment` is the end-effector tip in body coordinates
    /// while an arm presses, treated as rigidly attached for the step.
    pub fn step(
        &mut self,
        cmd: &ControlCommand,
        ee_attachment: Option<(f64, f64)>,
        dt: f64,
        t: f64,
    ) -> Result<StepForces, SimError> {
        self.step_count += 1;

        // 1. Rate-limit actuators toward the command.
        self.actuators.track(cmd, &self.params, dt);
        self.state.l = self.actuators.l;
        self.state.alpha = self.actuators.alpha;
        let s = self.state;

        // 2. Mass properties at the current plate position.
        let mp = mass_properties_unchecked(&self.params, s.l);
        let (sin_th, cos_th) = s.theta.sin_cos();
        let com = (s.x + cos_th * mp.d, s.z + sin_th * mp.d);

        // 3. World-frame forces and application points.
        let mut fx = 0.0;
        let mut fz = 0.0;
        let mut torque = 0.0;
        let mut apply = |point: (f64, f64), force: (f64, f64)| {
            fx += force.0;
            fz += force.1;
            let r = (point.0 - com.0, point.1 - com.1);
            torque += r.0 * force.1 - r.1 * force.0;
        };

        // Front thrust along body z at +L.
        let front = s.world_point(self.params.rotor_arm, 0.0);
        apply(front, (-cmd.t1 * sin_th, cmd.t1 * cos_th));
        // Back thrust along the tilted body direction (sin a, cos a) at -L.
        let back = s.world_point(-self.params.rotor_arm, 0.0);
        let (sin_a, cos_a) = s.alpha.sin_cos();
        apply(
            back,
            (
                cmd.t2 * (cos_th * sin_a - sin_th * cos_a),
                cmd.t2 * (sin_th * sin_a + cos_th * cos_a),
            ),
        );
        // Gravity at the combined CoM.
        apply(com, (0.0, -mp.g0));

        // Contact at the alignment-frame tip.
        let (tip, tip_vel) = Self::point_kinematics(&s, (self.params.tip_offset(), 0.0), com);
        let frame_force = self.frame_contact.update(&self.contact_cfg, tip, tip_vel, t);
        apply(tip, frame_force);

        // Contact at the end-effector tip while the arm presses.
        let ee_force = if let Some(body) = ee_attachment {
            let (ee, ee_vel) = Self::point_kinematics(&s, body, com);
            let f = self.ee_contact.update(&self.contact_cfg, ee, ee_vel, t);
            apply(ee, f);
            f
        } else {
            self.ee_contact = ContactState::new();
            (0.0, 0.0)
        };

        // 4.-5. Semi-implicit integration: velocities, then the CoM pose;
        // the body origin is recovered from the CoM and the new attitude.
        let s = &mut self.state;
        s.vx += fx / self.params.mass * dt;
        s.vz += fz / self.params.mass * dt;
        s.omega += torque / mp.i_total * dt;
        let com_next = (com.0 + s.vx * dt, com.1 + s.vz * dt);
        s.theta += s.omega * dt;
        let (sin_n, cos_n) = s.theta.sin_cos();
        s.x = com_next.0 - cos_n * mp.d;
        s.z = com_next.1 - sin_n * mp.d;

        if !s.is_finite() {
            return Err(SimError::NumericalDivergence {
                step: self.step_count,
            });
        }
        Ok(StepForces {
            f_n_frame: self.frame_contact.normal_force,
            f_t_frame: frame_force.1,
            f_n_ee: self.ee_contact.normal_force,
            f_t_ee: ee_force.1,
            total: (fx, fz),
            torque,
        })
    }

    /// Instantaneous contact forces without advancing the world.
    pub fn peek_contact_forces(&self, ee_attachment: Option<(f64, f64)>) -> StepForces {
        let mp = mass_properties_unchecked(&self.params, self.state.l);
        let (sin_th, cos_th) = self.state.theta.sin_cos();
        let com = (self.state.x + cos_th * mp.d, self.state.z + sin_th * mp.d);
        let (tip, tip_vel) =
            Self::point_kinematics(&self.state, (self.params.tip_offset(), 0.0), com);
        let frame = self.frame_contact.peek(&self.contact_cfg, tip, tip_vel);
        let ee = ee_attachment
            .map(|body| {
                let (p, v) = Self::point_kinematics(&self.state, body, com);
                self.ee_contact.peek(&self.contact_cfg, p, v)
            })
            .unwrap_or((0.0, 0.0));
        StepForces {
            f_n_frame: (-frame.0).max(0.0),
            f_t_frame: frame.1,
            f_n_ee: (-ee.0).max(0.0),
            f_t_ee: ee.1,
            total: (0.0, 0.0),
            torque: 0.0,
        }
    }
}

/// What the controller sees at each tick.
pub struct TickContext<'a> {
    pub t: f64,
    pub state: &'a PlanarState,
    pub frame: &'a ContactState,
    pub ee: &'a ContactState,
    pub stable_contact: bool,
    pub params: &'a PlatformParams,
}

/// Controller output for one tick, zero-order-held over the physics
/// substeps.
#[derive(Debug, Clone, Copy)]
pub struct ControlOutput {
    pub command: ControlCommand,
    /// End-effector tip in body coordinates while the arm presses.
    pub ee_attachment: Option<(f64, f64)>,
    pub phase: Phase,
    pub gate: bool,
    /// Integral contribution of the plate loop, m (trace column).
    pub integ: f64,
    /// Signed joint torques, N m; zero without an arm.
    pub joint_torques: (f64, f64),
}

/// A deterministic state machine ticked at the control rate.
pub trait Controller {
    fn tick(&mut self, ctx: &TickContext) -> ControlOutput;
}

/// Runs a closed-loop simulation: the controller is ticked at `control_dt`,
/// physics advances at `physics_dt`, and the trace is sampled at the
/// control rate. Identical inputs produce bit-identical traces.
#[allow(clippy::too_many_arguments)]
pub fn run(
    initial: PlanarState,
    controller: &mut dyn Controller,
    params: &PlatformParams,
    contact_cfg: &ContactConfig,
    limits: ActuatorLimits,
    duration: f64,
    physics_dt: f64,
    control_dt: f64,
) -> Result<SimTrace, SimError> {
    let ratio = control_dt / physics_dt;
    let substeps = ratio.round();
    // Penalty contact demands a small step: dt in (0, 2 ms].
    if physics_dt <= 0.0
        || physics_dt > 2e-3 + 1e-12
        || substeps < 1.0
        || (substeps * physics_dt - control_dt).abs() > 1e-9
    {
        return Err(SimError::BadTimestep {
            control_dt,
            physics_dt,
        });
    }
    let substeps = substeps as u64;
    let n_ticks = (duration / control_dt).round() as u64;

    let mut sim = Simulator::new(*params, *contact_cfg, initial, limits);
    let mut trace = SimTrace {
        rows: Vec::with_capacity(n_ticks as usize + 1),
    };

    for k in 0..=n_ticks {
        let t = k as f64 * control_dt;
        let stable = detect_stable_contact(&sim.frame_contact, contact_cfg, t);
        let out = {
            let ctx = TickContext {
                t,
                state: &sim.state,
                frame: &sim.frame_contact,
                ee: &sim.ee_contact,
                stable_contact: stable,
                params,
            };
            controller.tick(&ctx)
        };

        let forces = sim.peek_contact_forces(out.ee_attachment);
        let mp = mass_properties_unchecked(params, sim.state.l);
        trace.rows.push(TraceRow {
            t,
            x: sim.state.x,
            z: sim.state.z,
            theta: sim.state.theta,
            vx: sim.state.vx,
            vz: sim.state.vz,
            omega: sim.state.omega,
            l: sim.state.l,
            d: mp.d,
            alpha: sim.state.alpha,
            t1: out.command.t1,
            t2: out.command.t2,
            f_n_frame: forces.f_n_frame,
            f_t_frame: forces.f_t_frame,
            f_n_ee: forces.f_n_ee,
            f_t_ee: forces.f_t_ee,
            tau1: out.joint_torques.0.abs(),
            tau2: out.joint_torques.1.abs(),
            phase: out.phase,
            gate: out.gate,
            integ: out.integ,
        });

        if k == n_ticks {
            break;
        }
        for i in 0..substeps {
            sim.step(
                &out.command,
                out.ee_attachment,
                physics_dt,
                t + i as f64 * physics_dt,
            )?;
        }
    }
    Ok(trace)
}

/// Checks whether the vehicle can statically hold a fully horizontal back
/// thrust at plate position `l`: the world is initialized at the analytic
/// equilibrium (front thrust balancing the pitch moment, friction anchor
/// preloaded) and must stay put for `dwell` seconds.
pub fn alpha90_holds(
    params: &PlatformParams,
    contact_cfg: &ContactConfig,
    l: f64,
    dwell: f64,
    physics_dt: f64,
) -> bool {
    let mp = mass_properties_unchecked(params, l);
    let t2 = params.t2_max;
    let t1 = mp.g0 * (params.tip_offset() - mp.d) / params.frame_length;
    if t1 > params.t1_max {
        return false;
    }
    let ft_eq = mp.g0 * (mp.d - params.rotor_arm) / params.frame_length;

    let z0 = 1.0;
    let pen0 = t2 / contact_cfg.k_n;
    let initial = PlanarState {
        x: contact_cfg.wall_x + pen0 - params.tip_offset(),
        z: z0,
        theta: 0.0,
        vx: 0.0,
        vz: 0.0,
        omega: 0.0,
        l,
        alpha: std::f64::consts::FRAC_PI_2,
    };
    let mut sim = Simulator::new(
        *params,
        *contact_cfg,
        initial,
        ActuatorLimits::default(),
    );
    // Preload the stick spring with the equilibrium friction force.
    sim.frame_contact.update(
        contact_cfg,
        (contact_cfg.wall_x + pen0, z0),
        (0.0, 0.0),
        0.0,
    );
    sim.frame_contact.tangential_anchor = Some(z0 + ft_eq / contact_cfg.k_t);

    let cmd = ControlCommand {
        t1,
        t2,
        alpha: std::f64::consts::FRAC_PI_2,
        l_cmd: l,
        saturation: Default::default(),
    };
    let steps = (dwell / physics_dt).round() as u64;
    for k in 0..steps {
        let t = k as f64 * physics_dt;
        match sim.step(&cmd, None, physics_dt, t) {
            Ok(_) => {}
            Err(_) => return false,
        }
        if !sim.frame_contact.in_contact
            || sim.state.theta.abs() > 0.03
            || (sim.state.z - z0).abs() > 0.03
        {
            return false;
        }
    }
    sim.state.theta.abs() < 0.01 && sim.state.omega.abs() < 0.02
}

/// Scans plate positions from zero upward and returns the smallest one at
/// which [`alpha90_holds`], or `None` when no admissible position holds.
pub fn min_plate_for_tilt_hold(
    params: &PlatformParams,
    contact_cfg: &ContactConfig,
    grid_step: f64,
) -> Option<f64> {
    let mut l = 0.0;
    let l_max = params.plate_max();
    while l <= l_max + 1e-12 {
        if alpha90_holds(params, contact_cfg, l, 3.0, 1e-3) {
            return Some(l);
        }
        l += grid_step;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::SaturationFlags;
    use approx::assert_relative_eq;

    fn no_wall() -> ContactConfig {
        ContactConfig {
            wall_x: 1.0e9,
            ..ContactConfig::default()
        }
    }

    fn cmd(t1: f64, t2: f64, alpha: f64, l: f64) -> ControlCommand {
        ControlCommand {
            t1,
            t2,
            alpha,
            l_cmd: l,
            saturation: SaturationFlags::default(),
        }
    }

    #[test]
    fn free_fall_matches_ballistics() {
        let params = PlatformParams::default();
        let dt: f64 = 5e-4;
        let mut sim = Simulator::new(
            params,
            no_wall(),
            PlanarState::at_rest(0.0, 10.0),
            ActuatorLimits::default(),
        );
        let zero = cmd(0.0, 0.0, 0.0, 0.0);
        let steps = (1.0 / dt).round() as u64;
        for k in 0..steps {
            sim.step(&zero, None, dt, k as f64 * dt).unwrap();
        }
        let drop = 10.0 - sim.state.z;
        let expected = 0.5 * params.gravity;
        assert!(
            (drop - expected).abs() / expected < 1e-3,
            "drop {drop} vs {expected}"
        );
        assert_eq!(sim.state.x, 0.0);
        assert_eq!(sim.state.theta, 0.0);
    }

    #[test]
    fn exact_hover_is_stationary() {
        let params = PlatformParams::default();
        let g0 = params.weight();
        let mut sim = Simulator::new(
            params,
            no_wall(),
            PlanarState::at_rest(0.0, 1.0),
            ActuatorLimits::default(),
        );
        let hover = cmd(g0 / 2.0, g0 / 2.0, 0.0, 0.0);
        let mut max_force: f64 = 0.0;
        for k in 0..10_000u64 {
            let f = sim.step(&hover, None, 1e-3, k as f64 * 1e-3).unwrap();
            max_force = max_force.max(f.total.0.hypot(f.total.1));
        }
        // Residual acceleration below 1e-4 m/s^2.
        assert!(max_force / params.mass < 1e-4, "residual {max_force}");
        assert_relative_eq!(sim.state.z, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn momentum_matches_force_integral_exactly() {
        // Semi-implicit Euler applies exactly the logged force each step,
        // so the impulse sum equals m * dv to rounding.
        let params = PlatformParams::default();
        let mut sim = Simulator::new(
            params,
            ContactConfig::default(),
            PlanarState::at_rest(0.38, 1.0),
            ActuatorLimits::default(),
        );
        let push = cmd(16.0, 18.0, 0.9, 0.1);
        let dt = 1e-3;
        let (mut ix, mut iz) = (0.0, 0.0);
        for k in 0..3000u64 {
            let f = sim.step(&push, None, dt, k as f64 * dt).unwrap();
            ix += f.total.0 * dt;
            iz += f.total.1 * dt;
        }
        assert_relative_eq!(params.mass * sim.state.vx, ix, epsilon = 1e-8);
        assert_relative_eq!(params.mass * sim.state.vz, iz, epsilon = 1e-8);
    }

    #[test]
    fn pressing_at_the_static_solution_stays_steady() {
        // Start at the analytic press equilibrium slightly above the
        // friction boundary and verify the dynamics agree with the statics.
        let params = PlatformParams::default();
        let cfg = ContactConfig::default();
        let l = 0.283;
        assert!(alpha90_holds(&params, &cfg, l, 5.0, 1e-3));
    }

    #[test]
    fn pressing_below_the_friction_boundary_fails() {
        let params = PlatformParams::default();
        let cfg = ContactConfig::default();
        // Well below d_min: the needed friction exceeds the static cone.
        assert!(!alpha90_holds(&params, &cfg, 0.2, 3.0, 1e-3));
    }

    #[test]
    fn hold_sweep_brackets_the_static_prediction() {
        let params = PlatformParams::default();
        let cfg = ContactConfig::default();
        let l = min_plate_for_tilt_hold(&params, &cfg, 0.002).unwrap();
        let pred = crate::statics::predict_ideal_plate_position(&params, params.t2_max)
            .unwrap()
            .l_star;
        assert!((l - pred).abs() < 0.01, "sweep {l} vs prediction {pred}");
    }

    #[test]
    fn over_displaced_compound_pitches_away_without_friction() {
        // Force d > L with a heavier plate and no friction: the pitch
        // moment about the contact is unbalanced and |theta| grows.
        let params = PlatformParams {
            plate_mass: 2.0,
            mu_static: 0.0,
            mu_kinetic: 0.0,
            ..PlatformParams::default()
        };
        let cfg = ContactConfig::default().with_friction(0.0, 0.0);
        let l = 0.25; // d = 0.1603 > L = 0.135
        let d = crate::model::com_from_plate(&params, l);
        assert!(d > params.rotor_arm);
        let pen0 = params.t2_max / cfg.k_n;
        let initial = PlanarState {
            x: cfg.wall_x + pen0 - params.tip_offset(),
            z: 1.0,
            theta: 0.0,
            vx: 0.0,
            vz: 0.0,
            omega: 0.0,
            l,
            alpha: std::f64::consts::FRAC_PI_2,
        };
        let mut sim = Simulator::new(params, cfg, initial, ActuatorLimits::default());
        let c = cmd(
            params.weight(),
            params.t2_max,
            std::f64::consts::FRAC_PI_2,
            l,
        );
        let mut samples = Vec::new();
        for k in 0..1500u64 {
            sim.step(&c, None, 1e-3, k as f64 * 1e-3).unwrap();
            if k % 100 == 0 && k >= 200 {
                samples.push(sim.state.theta.abs());
            }
        }
        assert!(
            samples.windows(2).all(|w| w[1] > w[0]),
            "|theta| not monotone: {samples:?}"
        );
        assert!(*samples.last().unwrap() > 0.02);
    }

    #[test]
    fn run_with_zero_duration_has_initial_row_only() {
        struct Hold;
        impl Controller for Hold {
            fn tick(&mut self, ctx: &TickContext) -> ControlOutput {
                ControlOutput {
                    command: ControlCommand {
                        t1: ctx.params.weight() / 2.0,
                        t2: ctx.params.weight() / 2.0,
                        alpha: 0.0,
                        l_cmd: 0.0,
                        saturation: SaturationFlags::default(),
                    },
                    ee_attachment: None,
                    phase: Phase::Hover,
                    gate: false,
                    integ: 0.0,
                    joint_torques: (0.0, 0.0),
                }
            }
        }
        let params = PlatformParams::default();
        let trace = run(
            PlanarState::at_rest(0.0, 1.0),
            &mut Hold,
            &params,
            &no_wall(),
            ActuatorLimits::default(),
            0.0,
            1e-3,
            1e-2,
        )
        .unwrap();
        assert_eq!(trace.rows.len(), 1);
        assert_eq!(trace.rows[0].t, 0.0);
    }

    #[test]
    fn mismatched_timesteps_are_rejected() {
        struct Nop;
        impl Controller for Nop {
            fn tick(&mut self, _: &TickContext) -> ControlOutput {
                unreachable!()
            }
        }
        let params = PlatformParams::default();
        let err = run(
            PlanarState::at_rest(0.0, 1.0),
            &mut Nop,
            &params,
            &no_wall(),
            ActuatorLimits::default(),
            1.0,
            3e-3,
            1e-2,
        )
        .unwrap_err();
        assert!(matches!(err, SimError::BadTimestep { .. }));
    }

    #[test]
    fn divergence_reports_the_step_index() {
        let params = PlatformParams::default();
        let mut sim = Simulator::new(
            params,
            no_wall(),
            PlanarState::at_rest(0.0, 1.0),
            ActuatorLimits::default(),
        );
        let bad = cmd(f64::NAN, 0.0, 0.0, 0.0);
        let err = sim.step(&bad, None, 1e-3, 0.0).unwrap_err();
        assert_eq!(err, SimError::NumericalDivergence { step: 1 });
    }
}
