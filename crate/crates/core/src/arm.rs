//! 2-DoF planar manipulator mounted on the shifting-mass plate: forward and
//! inverse kinematics, the planar Jacobian, and static joint torques.
//!
//! Joint angles are measured from the body x-axis (shoulder) and from the
//! first link (elbow). The arm base rides the plate at `base_offset` along
//! body x from the plate center and `base_height` above the body plane.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Link geometry and masses of one arm variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmParams {
    /// Length of the first beam, m.
    pub l1: f64,
    /// Length of the second beam, m.
    pub l2: f64,
    /// Mass of the first link, kg (CoM at mid-link).
    pub m_link1: f64,
    /// Mass of the second link, kg (CoM at mid-link).
    pub m_link2: f64,
    /// Tool mass carried at the end-effector tip, kg.
    pub m_tool: f64,
    /// Arm-base position on the plate relative to the plate center, m.
    pub base_offset: f64,
    /// Arm-base height above the body plane, m.
    pub base_height: f64,
}

impl ArmParams {
    /// Short-beam variant operated close to the surface.
    pub fn short_beams() -> Self {
        Self {
            l1: 0.05,
            l2: 0.05,
            m_link1: 0.02,
            m_link2: 0.02,
            m_tool: 0.05,
            base_offset: -0.065,
            base_height: 0.03,
        }
    }

    /// Long-beam variant operated from the unshifted plate.
    pub fn long_beams() -> Self {
        Self {
            l1: 0.2,
            l2: 0.2,
            m_link1: 0.02,
            m_link2: 0.02,
            m_tool: 0.05,
            base_offset: -0.08,
            base_height: 0.03,
        }
    }
}

/// Joint configuration with the torque magnitudes it carries.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ArmState {
    pub q1: f64,
    pub q2: f64,
    /// Joint torque magnitudes, N m (signed values live in the solver).
    pub tau1: f64,
    pub tau2: f64,
}

/// Inverse-kinematics branch selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Elbow {
    Up,
    Down,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArmError {
    #[error(
        "target ({x}, {z}) m unreachable: distance {dist} m outside [{min}, {max}] m"
    )]
    Unreachable {
        x: f64,
        z: f64,
        dist: f64,
        min: f64,
        max: f64,
    },
}

/// End-effector position in the arm-base frame.
pub fn forward_kinematics(arm: &ArmParams, q1: f64, q2: f64) -> (f64, f64) {
    (
        arm.l1 * q1.cos() + arm.l2 * (q1 + q2).cos(),
        arm.l1 * q1.sin() + arm.l2 * (q1 + q2).sin(),
    )
}

/// Planar Jacobian d(x, z)/d(q1, q2) of [`forward_kinematics`], row-major.
pub fn jacobian(arm: &ArmParams, q1: f64, q2: f64) -> [[f64; 2]; 2] {
    let (s1, c1) = q1.sin_cos();
    let (s12, c12) = (q1 + q2).sin_cos();
    [
        [-arm.l1 * s1 - arm.l2 * s12, -arm.l2 * s12],
        [arm.l1 * c1 + arm.l2 * c12, arm.l2 * c12],
    ]
}

/// Closed-form two-link inverse kinematics for the selected elbow branch.
pub fn inverse_kinematics(
    arm: &ArmParams,
    target: (f64, f64),
    elbow: Elbow,
) -> Result<(f64, f64), ArmError> {
    let (x, z) = target;
    let dist = (x * x + z * z).sqrt();
    let min = (arm.l1 - arm.l2).abs();
    let max = arm.l1 + arm.l2;
    let c2 = (dist * dist - arm.l1 * arm.l1 - arm.l2 * arm.l2) / (2.0 * arm.l1 * arm.l2);
    if !(-1.0..=1.0).contains(&c2) {
        return Err(ArmError::Unreachable {
            x,
            z,
            dist,
            min,
            max,
        });
    }
    let q2 = match elbow {
        Elbow::Down => -c2.acos(),
        Elbow::Up => c2.acos(),
    };
    let q1 = z.atan2(x) - (arm.l2 * q2.sin()).atan2(arm.l1 + arm.l2 * q2.cos());
    Ok((q1, q2))
}

/// Static joint torques holding the arm with the end-effector applying
/// `f_ee` on the wall, N, plus gravity torques with link CoMs at mid-link
/// and the tool mass at the tip. Pass `g = 0` to exclude gravity.
///
/// The reaction on the arm is `-f_ee`; torques are signed, positive
/// counterclockwise.
pub fn static_joint_torques(
    arm: &ArmParams,
    q1: f64,
    q2: f64,
    f_ee: (f64, f64),
    g: f64,
) -> (f64, f64) {
    let j = jacobian(arm, q1, q2);
    let mut tau1 = j[0][0] * (-f_ee.0) + j[1][0] * (-f_ee.1);
    let mut tau2 = j[0][1] * (-f_ee.0) + j[1][1] * (-f_ee.1);

    let (_, c1) = q1.sin_cos();
    let (_, c12) = (q1 + q2).sin_cos();
    let x_c1 = 0.5 * arm.l1 * c1;
    let x_j2 = arm.l1 * c1;
    let x_c2 = x_j2 + 0.5 * arm.l2 * c12;
    let x_ee = x_j2 + arm.l2 * c12;
    tau1 -= g * (arm.m_link1 * x_c1 + arm.m_link2 * x_c2 + arm.m_tool * x_ee);
    tau2 -= g * (arm.m_link2 * (x_c2 - x_j2) + arm.m_tool * (x_ee - x_j2));
    (tau1, tau2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn arm(l: f64) -> ArmParams {
        ArmParams {
            l1: l,
            l2: l,
            ..ArmParams::long_beams()
        }
    }

    #[test]
    fn fk_fully_extended_and_folded() {
        let a = arm(0.2);
        let (x, z) = forward_kinematics(&a, 0.0, 0.0);
        assert_relative_eq!(x, 0.4, epsilon = 1e-15);
        assert_relative_eq!(z, 0.0, epsilon = 1e-15);
        let (x, z) = forward_kinematics(&a, 0.0, std::f64::consts::PI);
        assert_relative_eq!(x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(z, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn fk_right_angle_configuration() {
        let a = arm(0.2);
        let (x, z) = forward_kinematics(&a, FRAC_PI_2, -FRAC_PI_2);
        assert_relative_eq!(x, 0.2, epsilon = 1e-15);
        assert_relative_eq!(z, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn ik_recovers_the_right_angle_pose() {
        let a = arm(0.2);
        let (q1, q2) = inverse_kinematics(&a, (0.2, 0.2), Elbow::Down).unwrap();
        assert_relative_eq!(q1, FRAC_PI_2, epsilon = 1e-12);
        assert_relative_eq!(q2, -FRAC_PI_2, epsilon = 1e-12);
        let (x, z) = forward_kinematics(&a, q1, q2);
        assert_relative_eq!(x, 0.2, epsilon = 1e-12);
        assert_relative_eq!(z, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn ik_boundary_pose_has_coincident_branches() {
        let a = arm(0.2);
        let down = inverse_kinematics(&a, (0.4, 0.0), Elbow::Down).unwrap();
        let up = inverse_kinematics(&a, (0.4, 0.0), Elbow::Up).unwrap();
        assert_relative_eq!(down.0, 0.0, epsilon = 1e-7);
        assert_relative_eq!(down.1, 0.0, epsilon = 1e-7);
        assert_relative_eq!(up.0, up.0, epsilon = 1e-7);
    }

    #[test]
    fn ik_rejects_unreachable_targets() {
        let a = arm(0.05);
        match inverse_kinematics(&a, (1.0, 0.0), Elbow::Down).unwrap_err() {
            ArmError::Unreachable { dist, max, .. } => {
                assert_relative_eq!(dist, 1.0, epsilon = 1e-12);
                assert_relative_eq!(max, 0.1, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn force_through_both_joints_needs_no_torque() {
        // Fully extended arm pushed along its own axis.
        let a = arm(0.2);
        let (t1, t2) = static_joint_torques(&a, 0.0, 0.0, (5.0, 0.0), 0.0);
        assert_relative_eq!(t1, 0.0, epsilon = 1e-12);
        assert_relative_eq!(t2, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn documented_torque_example() {
        // q = (90, -90) deg, L1 = L2 = 0.2 m, 5 N horizontal push:
        // J^T (-F) = (1.0, 0) N m.
        let a = arm(0.2);
        let (t1, t2) = static_joint_torques(&a, FRAC_PI_2, -FRAC_PI_2, (5.0, 0.0), 0.0);
        assert_relative_eq!(t1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(t2, 0.0, epsilon = 1e-12);
        // The quarter-length arm carries exactly a quarter of the torque.
        let (t1s, t2s) = static_joint_torques(&arm(0.05), FRAC_PI_2, -FRAC_PI_2, (5.0, 0.0), 0.0);
        assert_relative_eq!(t1s, 0.25, epsilon = 1e-12);
        assert_relative_eq!(t2s, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let a = ArmParams {
            l1: 0.17,
            l2: 0.11,
            ..ArmParams::long_beams()
        };
        let h = 1e-7;
        // Deterministic pseudo-random configurations.
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 6.0 - 3.0
        };
        for _ in 0..100 {
            let (q1, q2) = (next(), next());
            let j = jacobian(&a, q1, q2);
            let fd = |f: &dyn Fn(f64, f64) -> f64, wrt1: bool| {
                if wrt1 {
                    (f(q1 + h, q2) - f(q1 - h, q2)) / (2.0 * h)
                } else {
                    (f(q1, q2 + h) - f(q1, q2 - h)) / (2.0 * h)
                }
            };
            let fx = |a1: f64, a2: f64| forward_kinematics(&a, a1, a2).0;
            let fz = |a1: f64, a2: f64| forward_kinematics(&a, a1, a2).1;
            assert!((j[0][0] - fd(&fx, true)).abs() < 1e-6);
            assert!((j[0][1] - fd(&fx, false)).abs() < 1e-6);
            assert!((j[1][0] - fd(&fz, true)).abs() < 1e-6);
            assert!((j[1][1] - fd(&fz, false)).abs() < 1e-6);
        }
    }

    #[test]
    fn torques_scale_exactly_with_link_length() {
        // For matched joint angles and the same tip force, scaling both
        // links by c scales both torques by exactly c; with gravity on and
        // masses fixed the lever arms scale the same way.
        let base = arm(0.05);
        for c in [2.0, 3.0, 4.0] {
            let scaled = arm(0.05 * c);
            for (q1, q2) in [(0.8, -1.1), (FRAC_PI_2, -FRAC_PI_2), (0.3, 0.4)] {
                let f = (5.0, -1.5);
                let (a1, a2) = static_joint_torques(&base, q1, q2, f, 0.0);
                let (b1, b2) = static_joint_torques(&scaled, q1, q2, f, 0.0);
                assert_relative_eq!(b1, c * a1, epsilon = 1e-12);
                assert_relative_eq!(b2, c * a2, epsilon = 1e-12);
                let (g1, g2) = static_joint_torques(&base, q1, q2, f, 9.81);
                let (h1, h2) = static_joint_torques(&scaled, q1, q2, f, 9.81);
                assert_relative_eq!(h1, c * g1, epsilon = 1e-12);
                assert_relative_eq!(h2, c * g2, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn virtual_work_consistency() {
        // J^T F equals the gradient of the work function F . p(q) at fixed
        // F, checked by central differences.
        let a = ArmParams {
            l1: 0.2,
            l2: 0.15,
            ..ArmParams::long_beams()
        };
        let f = (3.0, -2.0);
        let work = |q1: f64, q2: f64| {
            let p = forward_kinematics(&a, q1, q2);
            f.0 * p.0 + f.1 * p.1
        };
        let h = 1e-7;
        for (q1, q2) in [(0.5, -0.9), (1.2, 0.4), (-0.3, 1.0)] {
            let j = jacobian(&a, q1, q2);
            let jt_f = (j[0][0] * f.0 + j[1][0] * f.1, j[0][1] * f.0 + j[1][1] * f.1);
            let grad = (
                (work(q1 + h, q2) - work(q1 - h, q2)) / (2.0 * h),
                (work(q1, q2 + h) - work(q1, q2 - h)) / (2.0 * h),
            );
            assert!((jt_f.0 - grad.0).abs() < 1e-6);
            assert!((jt_f.1 - grad.1).abs() < 1e-6);
        }
    }
}
