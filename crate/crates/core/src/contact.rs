//! Penalty contact at a vertical wall with stick-slip Coulomb friction.
//!
//! Normal force is a dissipative spring-damper on the penetration,
//! `f_n = max(0, k_n * pen + c_n * d(pen)/dt)`, so it vanishes exactly when
//! the tip is outside the wall and never turns adhesive. Tangential force
//! follows a damped anchor spring while sticking, clamped to the static
//! friction cone; on clamp violation it switches to kinetic sliding and
//! re-sticks when the tangential speed crosses zero.

use serde::{Deserialize, Serialize};

/// Wall location and contact-law constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactConfig {
    /// World x of the vertical surface, m. The wall occupies x >= wall_x.
    pub wall_x: f64,
    /// Normal penalty stiffness, N/m.
    pub k_n: f64,
    /// Normal damping on the penetration rate, N s/m.
    pub c_n: f64,
    /// Tangential stick-spring stiffness, N/m.
    pub k_t: f64,
    /// Tangential stick damping, N s/m.
    pub c_t: f64,
    /// Static friction coefficient.
    pub mu_s: f64,
    /// Kinetic friction coefficient.
    pub mu_k: f64,
    /// Normal force a contact must sustain to count as stable, N.
    pub stable_force_threshold: f64,
    /// Time the threshold must hold continuously, s.
    pub stable_duration: f64,
}

impl Default for ContactConfig {
    fn default() -> Self {
        Self {
            wall_x: 0.7,
            k_n: 1.0e4,
            c_n: 200.0,
            k_t: 5.0e3,
            c_t: 100.0,
            mu_s: 0.5,
            mu_k: 0.45,
            stable_force_threshold: 2.0,
            stable_duration: 0.5,
        }
    }
}

impl ContactConfig {
    /// Copies the friction coefficients from platform parameters so the two
    /// stay mirrored.
    pub fn with_friction(mut self, mu_s: f64, mu_k: f64) -> Self {
        self.mu_s = mu_s;
        self.mu_k = mu_k;
        self
    }
}

/// Evolving state of one contact point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContactState {
    pub in_contact: bool,
    /// Penetration depth into the wall, m (0 when separated).
    pub penetration: f64,
    /// Normal force on the vehicle, N, always >= 0.
    pub normal_force: f64,
    /// Tangential (vertical) force on the vehicle, N, signed.
    pub tangential_force: f64,
    /// True while the tip is held by the static anchor spring.
    pub stick: bool,
    /// World z of the stick attachment while anchored.
    pub tangential_anchor: Option<f64>,
    /// Time at which the normal force last rose above the stability
    /// threshold without dropping since.
    pub stable_since: Option<f64>,
    /// Sign of the sliding velocity while slipping.
    slide_dir: f64,
}

impl ContactState {
    pub fn new() -> Self {
        Self {
            stick: true,
            ..Self::default()
        }
    }

    /// Advances the contact law one step given the tip's world position and
    /// velocity, returning the force on the vehicle as `(fx, fz)`.
    pub fn update(
        &mut self,
        cfg: &ContactConfig,
        tip: (f64, f64),
        tip_vel: (f64, f64),
        t: f64,
    ) -> (f64, f64) {
        let pen = tip.0 - cfg.wall_x;
        if pen <= 0.0 {
            *self = Self::new();
            return (0.0, 0.0);
        }
        self.in_contact = true;
        self.penetration = pen;
        // tip_vel.0 is the penetration rate; damping resists penetration
        // and softens the rebound.
        let f_n = (cfg.k_n * pen + cfg.c_n * tip_vel.0).max(0.0);
        self.normal_force = f_n;

        if self.tangential_anchor.is_none() {
            self.tangential_anchor = Some(tip.1);
            self.stick = true;
        }
        let anchor = self.tangential_anchor.unwrap();
        let mut f_t;
        if self.stick {
            f_t = cfg.k_t * (anchor - tip.1) - cfg.c_t * tip_vel.1;
            let limit = cfg.mu_s * f_n;
            if f_t.abs() > limit {
                self.stick = false;
                let dir = if tip_vel.1 != 0.0 {
                    tip_vel.1.signum()
                } else {
                    (tip.1 - anchor).signum()
                };
                self.slide_dir = dir;
                f_t = -cfg.mu_k * f_n * dir;
            }
        } else {
            let dir = if tip_vel.1.abs() > 1e-6 {
                tip_vel.1.signum()
            } else {
                0.0
            };
            if dir == 0.0 || dir != self.slide_dir {
                // Tangential speed crossed zero: re-stick at the current
                // position.
                self.stick = true;
                self.tangential_anchor = Some(tip.1);
                f_t = 0.0;
            } else {
                f_t = -cfg.mu_k * f_n * dir;
            }
        }
        self.tangential_force = f_t;

        if f_n >= cfg.stable_force_threshold {
            self.stable_since.get_or_insert(t);
        } else {
            self.stable_since = None;
        }
        (-f_n, f_t)
    }

    /// Evaluates the contact force at the current state without mutating
    /// the stick bookkeeping. Used to log forces at trace boundaries.
    pub fn peek(&self, cfg: &ContactConfig, tip: (f64, f64), tip_vel: (f64, f64)) -> (f64, f64) {
        let pen = tip.0 - cfg.wall_x;
        if pen <= 0.0 {
            return (0.0, 0.0);
        }
        let f_n = (cfg.k_n * pen + cfg.c_n * tip_vel.0).max(0.0);
        let f_t = match (self.stick, self.tangential_anchor) {
            (true, Some(anchor)) => {
                let raw = cfg.k_t * (anchor - tip.1) - cfg.c_t * tip_vel.1;
                raw.clamp(-cfg.mu_s * f_n, cfg.mu_s * f_n)
            }
            _ => -cfg.mu_k * f_n * self.slide_dir,
        };
        (-f_n, f_t)
    }
}

/// True when the contact has held at least the threshold force continuously
/// for the configured duration.
pub fn detect_stable_contact(contact: &ContactState, cfg: &ContactConfig, t: f64) -> bool {
    contact
        .stable_since
        .map(|since| t - since >= cfg.stable_duration)
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> ContactConfig {
        ContactConfig::default()
    }

    #[test]
    fn no_force_outside_the_wall() {
        let mut c = ContactState::new();
        let f = c.update(&cfg(), (0.699, 1.0), (0.1, 0.0), 0.0);
        assert_eq!(f, (0.0, 0.0));
        assert!(!c.in_contact);
        assert_eq!(c.normal_force, 0.0);
    }

    #[test]
    fn normal_force_is_spring_plus_entry_damping() {
        let mut c = ContactState::new();
        let (fx, _) = c.update(&cfg(), (0.701, 1.0), (0.05, 0.0), 0.0);
        // k_n * 1 mm + c_n * 0.05 m/s = 10 + 10 N, pushing out of the wall.
        assert_relative_eq!(fx, -20.0, epsilon = 1e-9);
        assert!(c.in_contact);
    }

    #[test]
    fn normal_force_never_adhesive_on_fast_exit() {
        let mut c = ContactState::new();
        let (fx, _) = c.update(&cfg(), (0.7001, 1.0), (-1.0, 0.0), 0.0);
        assert_eq!(fx, 0.0);
    }

    #[test]
    fn stick_spring_holds_within_the_cone() {
        let mut c = ContactState::new();
        c.update(&cfg(), (0.702, 1.0), (0.0, 0.0), 0.0); // anchor at z = 1
        let (_, fz) = c.update(&cfg(), (0.702, 1.0005), (0.0, 0.0), 0.001);
        // Spring pulls the tip back toward the anchor: 5e3 * 0.5 mm = 2.5 N.
        assert_relative_eq!(fz, -2.5, epsilon = 1e-9);
        assert!(c.stick);
        assert!(fz.abs() <= cfg().mu_s * c.normal_force + 1e-9);
    }

    #[test]
    fn cone_violation_switches_to_kinetic_sliding() {
        let mut c = ContactState::new();
        c.update(&cfg(), (0.701, 1.0), (0.0, 0.0), 0.0);
        // Move the tip 5 mm up: spring would demand 25 N, cone is 5 N.
        let (_, fz) = c.update(&cfg(), (0.701, 1.005), (0.0, 0.01), 0.001);
        assert!(!c.stick);
        assert_relative_eq!(fz, -cfg().mu_k * 10.0, epsilon = 1e-9);
    }

    #[test]
    fn sliding_resticks_when_velocity_crosses_zero() {
        let mut c = ContactState::new();
        c.update(&cfg(), (0.701, 1.0), (0.0, 0.0), 0.0);
        c.update(&cfg(), (0.701, 1.005), (0.0, 0.01), 0.001);
        assert!(!c.stick);
        c.update(&cfg(), (0.701, 1.005), (0.0, -0.0005), 0.002);
        assert!(c.stick);
        assert_eq!(c.tangential_anchor, Some(1.005));
    }

    #[test]
    fn separation_resets_the_anchor_and_stability() {
        let mut c = ContactState::new();
        c.update(&cfg(), (0.705, 1.0), (0.0, 0.0), 0.0);
        assert!(c.stable_since.is_some());
        c.update(&cfg(), (0.69, 1.0), (0.0, 0.0), 0.1);
        assert_eq!(c.tangential_anchor, None);
        assert_eq!(c.stable_since, None);
        assert_eq!(c.normal_force, 0.0);
    }

    #[test]
    fn stability_gate_needs_sustained_force() {
        let mut c = ContactState::new();
        let cf = cfg();
        // Never in contact: always false.
        assert!(!detect_stable_contact(&c, &cf, 10.0));
        // 5 N held for 0.6 s with threshold 2 N, duration 0.5 s.
        c.update(&cf, (0.7005, 1.0), (0.0, 0.0), 1.0);
        assert!(!detect_stable_contact(&c, &cf, 1.0));
        c.update(&cf, (0.7005, 1.0), (0.0, 0.0), 1.6);
        assert!(detect_stable_contact(&c, &cf, 1.6));
    }

    #[test]
    fn force_dip_resets_the_stability_timer() {
        let mut c = ContactState::new();
        let cf = cfg();
        c.update(&cf, (0.7005, 1.0), (0.0, 0.0), 0.0);
        c.update(&cf, (0.70005, 1.0), (0.0, 0.0), 0.4); // 0.5 N < threshold
        assert_eq!(c.stable_since, None);
        c.update(&cf, (0.7005, 1.0), (0.0, 0.0), 0.45);
        assert!(!detect_stable_contact(&c, &cf, 0.9));
        assert!(detect_stable_contact(&c, &cf, 0.96));
    }
}
