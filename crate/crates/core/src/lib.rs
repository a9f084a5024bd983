//! Planar rigid-body simulation and static analysis for an aerial vehicle
//! that shifts an internal mass plate to displace its center of mass while
//! pushing on vertical surfaces with tilting back rotors.
//!
//! The crate is organized around six concerns:
//!
//! - [`model`]: physical parameters, state types, and the plate-to-CoM map
//! - [`statics`]: closed-form equilibrium analysis and the friction-aware
//!   prediction of the ideal plate position
//! - [`contact`]: penalty contact with stick-slip Coulomb friction
//! - [`dynamics`]: fixed-step planar simulator and the simulation loop
//! - [`control`]: impedance/attitude cascade, control allocation, the
//!   tilt-feedback plate positioning loop, and the waypoint sequencer
//! - [`arm`]: 2-DoF manipulator kinematics and joint-torque statics
//!
//! Everything is deterministic: identical inputs produce bit-identical
//! traces.

pub mod arm;
pub mod contact;
pub mod control;
pub mod dynamics;
pub mod model;
pub mod scenario;
pub mod statics;
pub mod trace;

pub use model::{DerivedMassProperties, PlanarState, PlatformParams};
pub use trace::{SimTrace, TraceRow};
