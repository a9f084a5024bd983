//! Physical parameters, planar state, and derived mass properties.
//!
//! The body frame sits at the vehicle's geometric center (CoG) with the
//! x-axis pointing through the alignment frame toward the work surface.
//! Moving the shifting-mass plate to position `l` displaces the combined
//! center of mass to `d = (m_S / m) * l`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fixed physical constants of the vehicle, plate, and rotors.
///
/// Units are SI throughout: kg, m, N, rad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformParams {
    /// Total system mass (body + plate + payload), kg.
    pub mass: f64,
    /// Shifting-mass plate mass, kg. Must be strictly less than `mass`.
    pub plate_mass: f64,
    /// Distance from the body origin to each rotor center along body x, m.
    pub rotor_arm: f64,
    /// Rotor lateral offset along body y, m. Carried for completeness;
    /// the planar model never uses it.
    pub rotor_offset_y: f64,
    /// Alignment-frame length beyond the front rotors, m.
    pub frame_length: f64,
    /// Plate length along body x, m. Bounds the plate travel.
    pub plate_length: f64,
    /// Maximum total front-rotor thrust, N.
    pub t1_max: f64,
    /// Maximum total back-rotor thrust, N.
    pub t2_max: f64,
    /// Gravitational acceleration, m/s^2.
    pub gravity: f64,
    /// Static friction coefficient at the contact tips.
    pub mu_static: f64,
    /// Kinetic friction coefficient at the contact tips.
    pub mu_kinetic: f64,
    /// Pitch inertia of the non-plate body about its own CoM, kg m^2.
    pub inertia_body: f64,
    /// Pitch inertia of the plate about its own CoM, kg m^2.
    pub inertia_plate: f64,
}

impl Default for PlatformParams {
    /// The default parameter set used by every built-in scenario.
    fn default() -> Self {
        Self {
            mass: 3.12,
            plate_mass: 0.9,
            rotor_arm: 0.135,
            rotor_offset_y: 0.1,
            frame_length: 0.165,
            plate_length: 0.03,
            t1_max: 50.0,
            t2_max: 20.0,
            gravity: 9.81,
            mu_static: 0.5,
            mu_kinetic: 0.45,
            inertia_body: 0.06,
            inertia_plate: 0.004,
        }
    }
}

impl PlatformParams {
    /// Total weight `m * g`, N.
    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }

    /// Upper bound of the plate travel, `L + L0 - 0.5 * l_S`, m.
    pub fn plate_max(&self) -> f64 {
        self.rotor_arm + self.frame_length - 0.5 * self.plate_length
    }

    /// Body-x offset of the alignment-frame tip, `L + L0`, m.
    pub fn tip_offset(&self) -> f64 {
        self.rotor_arm + self.frame_length
    }

    /// Checks every parameter invariant, collecting all violations.
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut violations = Vec::new();
        let mut check = |ok: bool, msg: &str| {
            if !ok {
                violations.push(msg.to_string());
            }
        };
        check(self.mass > 0.0, "mass must be strictly positive");
        check(self.plate_mass > 0.0, "plate_mass must be strictly positive");
        check(self.plate_mass < self.mass, "plate_mass must satisfy m_S < m");
        check(self.rotor_arm > 0.0, "rotor_arm must be strictly positive");
        check(
            self.frame_length > 0.0,
            "frame_length must be strictly positive",
        );
        check(
            self.plate_length > 0.0,
            "plate_length must be strictly positive",
        );
        check(
            self.plate_max() > 0.0,
            "plate travel L + L0 - 0.5*l_S must be strictly positive",
        );
        check(self.t1_max > 0.0, "t1_max must be strictly positive");
        check(self.t2_max > 0.0, "t2_max must be strictly positive");
        check(self.gravity > 0.0, "gravity must be strictly positive");
        check(self.mu_static >= 0.0, "mu_static must be non-negative");
        check(self.mu_kinetic >= 0.0, "mu_kinetic must be non-negative");
        check(
            self.mu_kinetic <= self.mu_static,
            "mu_kinetic must satisfy mu_k <= mu_s",
        );
        check(
            self.inertia_body > 0.0,
            "inertia_body must be strictly positive",
        );
        check(
            self.inertia_plate > 0.0,
            "inertia_plate must be strictly positive",
        );
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport { violations })
        }
    }
}

/// Every violated parameter invariant, not just the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid platform parameters: ")?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Pose and velocity of the body plus actuator positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarState {
    /// World x of the body-frame origin, m.
    pub x: f64,
    /// World z of the body-frame origin, m.
    pub z: f64,
    /// Pitch angle, rad, nose-up positive.
    pub theta: f64,
    /// Horizontal velocity, m/s.
    pub vx: f64,
    /// Vertical velocity, m/s.
    pub vz: f64,
    /// Pitch rate, rad/s.
    pub omega: f64,
    /// Plate position along body x relative to the origin, m.
    pub l: f64,
    /// Back-rotor tilt angle, rad, in [-pi/2, pi/2].
    pub alpha: f64,
}

impl PlanarState {
    /// A vehicle at rest at `(x, z)` with all actuators at their home
    /// positions.
    pub fn at_rest(x: f64, z: f64) -> Self {
        Self {
            x,
            z,
            theta: 0.0,
            vx: 0.0,
            vz: 0.0,
            omega: 0.0,
            l: 0.0,
            alpha: 0.0,
        }
    }

    /// World position of a point given in body coordinates.
    pub fn world_point(&self, body_x: f64, body_z: f64) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (
            self.x + c * body_x - s * body_z,
            self.z + s * body_x + c * body_z,
        )
    }

    /// True when every numeric field is finite.
    pub fn is_finite(&self) -> bool {
        [
            self.x, self.z, self.theta, self.vx, self.vz, self.omega, self.l, self.alpha,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Mass properties of the combined body + plate at a given plate position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedMassProperties {
    /// CoM displacement along body x from the origin, m.
    pub d: f64,
    /// Total weight, N.
    pub g0: f64,
    /// Pitch inertia of body + plate about the combined CoM, kg m^2.
    pub i_total: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("plate position {l} m outside the admissible interval [0, {max}] m")]
    PlateOutOfRange { l: f64, max: f64 },
}

/// CoM displacement produced by a plate position: `d = (m_S / m) * l`.
pub fn com_from_plate(params: &PlatformParams, l: f64) -> f64 {
    params.plate_mass / params.mass * l
}

/// Plate position required for a CoM displacement: `l = (m / m_S) * d`.
pub fn plate_from_com(params: &PlatformParams, d: f64) -> f64 {
    params.mass / params.plate_mass * d
}

/// Computes the combined CoM displacement, weight, and pitch inertia for a
/// plate position.
///
/// The inertia applies the parallel-axis theorem with the body CoM at the
/// origin and the plate CoM at `l`, re-referenced about the combined CoM.
pub fn derive_mass_properties(
    params: &PlatformParams,
    l: f64,
) -> Result<DerivedMassProperties, ModelError> {
    let max = params.plate_max();
    if !(0.0..=max).contains(&l) {
        return Err(ModelError::PlateOutOfRange { l, max });
    }
    Ok(mass_properties_unchecked(params, l))
}

/// Same as [`derive_mass_properties`] without the bounds check. The
/// simulator calls this every step with an already-clamped plate position.
pub fn mass_properties_unchecked(params: &PlatformParams, l: f64) -> DerivedMassProperties {
    let d = com_from_plate(params, l);
    let body_mass = params.mass - params.plate_mass;
    let i_total = params.inertia_body
        + body_mass * d * d
        + params.inertia_plate
        + params.plate_mass * (l - d) * (l - d);
    DerivedMassProperties {
        d,
        g0: params.weight(),
        i_total,
    }
}
