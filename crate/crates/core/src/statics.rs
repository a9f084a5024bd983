//! Closed-form equilibrium analysis.
//!
//! Three families of results live here:
//!
//! - the frictionless CoM sweep: how the contact force budget varies with
//!   the normalized CoM position `r_l`,
//! - the tool-load equilibrium: how much pushing force the platform retains
//!   while the arm presses at an offset operation point,
//! - the friction-aware prediction of the smallest plate position that lets
//!   the back rotors tilt fully horizontal.

use crate::model::PlatformParams;
use thiserror::Error;

/// Force balance of the frictionless pushing equilibrium at one CoM ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticForces {
    /// Back-thrust component opposing gravity, N.
    pub f_g: f64,
    /// Front-rotor thrust, N.
    pub t1: f64,
    /// Contact force along the interaction axis, N.
    pub f_c: f64,
    /// Normalized CoM position l1/(l1+l2), dimensionless.
    pub r_l: f64,
}

/// Force balance with the manipulator pressing at an offset operation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToolLoadForces {
    /// Back-thrust component compensating the tool torque, N.
    pub f_g: f64,
    /// Total horizontal force available, N.
    pub f_h: f64,
    /// End-effector pushing force, N.
    pub f_c1: f64,
    /// Alignment-frame pushing force, N.
    pub f_c2: f64,
    /// Operation-point offset from the frame contact, m.
    pub l_c: f64,
    /// Set when the arm demands more horizontal force than the platform can
    /// supply while the frame stays in compression (f_C2 < 0).
    pub exceeds_capacity: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StaticsError {
    #[error("infeasible equilibrium: required vertical share f_g = {f_g} N exceeds T2 = {t2} N")]
    Infeasible { f_g: f64, t2: f64 },
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("sweep grid must be sorted ascending within [0, 1]")]
    BadGrid,
    #[error(
        "no feasible plate position: alpha = 90 deg needs l >= {l_min} m \
         but the plate is capped at {l_cap} m"
    )]
    NoFeasiblePlatePosition { l_min: f64, l_cap: f64 },
}

/// Frictionless pushing equilibrium at a given CoM ratio.
///
/// `f_g = G0 r_l`, `T1 = G0 (1 - r_l)`, `f_c = sqrt(T2^2 - f_g^2)`.
/// Returns [`StaticsError::Infeasible`] when the back rotors cannot supply
/// the required vertical share (`G0 r_l > T2`).
pub fn equilibrium_frictionless(g0: f64, t2: f64, r_l: f64) -> Result<StaticForces, StaticsError> {
    let f_g = g0 * r_l;
    let t1 = g0 * (1.0 - r_l);
    if f_g > t2 {
        return Err(StaticsError::Infeasible { f_g, t2 });
    }
    let f_c = (t2 * t2 - f_g * f_g).max(0.0).sqrt();
    Ok(StaticForces { f_g, t1, f_c, r_l })
}

/// One row of the CoM-ratio sweep. Infeasible points are flagged rather
/// than dropped; their contact force is NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlSweepRow {
    pub r_l: f64,
    pub f_g: f64,
    pub t1: f64,
    pub f_c: f64,
    pub feasible: bool,
}

/// Sweeps the frictionless equilibrium over a grid of CoM ratios.
pub fn sweep_rl(g0: f64, t2: f64, grid: &[f64]) -> Result<Vec<RlSweepRow>, StaticsError> {
    if grid.is_empty() {
        return Err(StaticsError::EmptyGrid);
    }
    if grid.windows(2).any(|w| w[0] > w[1]) || grid.iter().any(|&r| !(0.0..=1.0).contains(&r)) {
        return Err(StaticsError::BadGrid);
    }
    Ok(grid
        .iter()
        .map(|&r_l| match equilibrium_frictionless(g0, t2, r_l) {
            Ok(f) => RlSweepRow {
                r_l,
                f_g: f.f_g,
                t1: f.t1,
                f_c: f.f_c,
                feasible: true,
            },
            Err(_) => RlSweepRow {
                r_l,
                f_g: g0 * r_l,
                t1: g0 * (1.0 - r_l),
                f_c: f64::NAN,
                feasible: false,
            },
        })
        .collect())
}

/// Renders a CoM-ratio sweep as CSV with columns `r_l,f_g,T1,f_c,feasible`.
pub fn rl_sweep_csv(rows: &[RlSweepRow]) -> String {
    let mut out = String::from("r_l,f_g,T1,f_c,feasible\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.r_l,
            r.f_g,
            r.t1,
            r.f_c,
            if r.feasible { 1 } else { 0 }
        ));
    }
    out
}

/// Equilibrium with the end-effector pressing `f_c1` at offset `l_c` above
/// the frame contact. `span` is the rotor wheelbase `l1 + l2 = 2L`.
///
/// `f_g = f_C1 l_C / span`, `f_h = sqrt(T2^2 - f_g^2)`, `f_C2 = f_h - f_C1`.
/// A negative `f_C2` is returned flagged, not rejected, so sweep plots can
/// show the capacity boundary.
pub fn tool_load_equilibrium(
    t2: f64,
    span: f64,
    f_c1: f64,
    l_c: f64,
) -> Result<ToolLoadForces, StaticsError> {
    let f_g = f_c1 * l_c / span;
    if f_g > t2 {
        return Err(StaticsError::Infeasible { f_g, t2 });
    }
    let f_h = (t2 * t2 - f_g * f_g).max(0.0).sqrt();
    let f_c2 = f_h - f_c1;
    Ok(ToolLoadForces {
        f_g,
        f_h,
        f_c1,
        f_c2,
        l_c,
        exceeds_capacity: f_c2 < 0.0,
    })
}

/// One row of the tool-load sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToolLoadRow {
    pub f_c1: f64,
    pub l_c: f64,
    pub f_g: f64,
    pub f_h: f64,
    pub f_c2: f64,
    pub flag: ToolLoadFlag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToolLoadFlag {
    Ok,
    ExceedsCapacity,
    Infeasible,
}

impl ToolLoadFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            ToolLoadFlag::Ok => "ok",
            ToolLoadFlag::ExceedsCapacity => "exceeds_capacity",
            ToolLoadFlag::Infeasible => "infeasible",
        }
    }
}

/// Sweeps the tool-load equilibrium over a grid of end-effector forces, one
/// curve per operation-point offset.
pub fn sweep_tool_load(
    t2: f64,
    span: f64,
    l_c_values: &[f64],
    f_c1_grid: &[f64],
) -> Result<Vec<ToolLoadRow>, StaticsError> {
    if f_c1_grid.is_empty() || l_c_values.is_empty() {
        return Err(StaticsError::EmptyGrid);
    }
    if f_c1_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(StaticsError::BadGrid);
    }
    let mut rows = Vec::with_capacity(l_c_values.len() * f_c1_grid.len());
    for &l_c in l_c_values {
        for &f_c1 in f_c1_grid {
            match tool_load_equilibrium(t2, span, f_c1, l_c) {
                Ok(f) => rows.push(ToolLoadRow {
                    f_c1,
                    l_c,
                    f_g: f.f_g,
                    f_h: f.f_h,
                    f_c2: f.f_c2,
                    flag: if f.exceeds_capacity {
                        ToolLoadFlag::ExceedsCapacity
                    } else {
                        ToolLoadFlag::Ok
                    },
                }),
                Err(_) => rows.push(ToolLoadRow {
                    f_c1,
                    l_c,
                    f_g: f_c1 * l_c / span,
                    f_h: f64::NAN,
                    f_c2: f64::NAN,
                    flag: ToolLoadFlag::Infeasible,
                }),
            }
        }
    }
    Ok(rows)
}

/// Renders a tool-load sweep as CSV with columns
/// `f_C1,l_C,f_g,f_h,f_C2,flag`.
pub fn tool_load_csv(rows: &[ToolLoadRow]) -> String {
    let mut out = String::from("f_C1,l_C,f_g,f_h,f_C2,flag\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.f_c1,
            r.l_c,
            r.f_g,
            r.f_h,
            r.f_c2,
            r.flag.as_str()
        ));
    }
    out
}

/// Friction-aware prediction of the ideal plate position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlatePrediction {
    /// Smallest plate position enabling a 90-degree tilt, m. This is the
    /// reported ideal position.
    pub l_star: f64,
    /// Lower edge of the feasible range (equals `l_star`), m.
    pub l_min: f64,
    /// Upper edge of the feasible range, m.
    pub l_cap: f64,
    /// CoM displacement at `l_star`, m.
    pub d_min: f64,
}

/// Predicts the smallest plate position at which the vehicle can hold a
/// fully horizontal back thrust against the wall.
///
/// Static planar equilibrium at a 90-degree tilt requires the front rotors
/// to balance the pitch moment about the contact, `T1 L0 = G0 (L + L0 - d)`,
/// leaving a vertical residual `f_fric = G0 (d - L) / L0` for contact
/// friction. Downward static friction of magnitude at most `mu_s T2`
/// carries the deficit, so the tilt is feasible for
/// `d >= d_min = L - mu_s T2 L0 / G0`.
pub fn predict_ideal_plate_position(
    params: &PlatformParams,
    t2: f64,
) -> Result<PlatePrediction, StaticsError> {
    let g0 = params.weight();
    let d_min =
        (params.rotor_arm - params.mu_static * t2 * params.frame_length / g0).max(0.0);
    let l_min = params.mass / params.plate_mass * d_min;
    let l_cap = (params.mass / params.plate_mass * params.rotor_arm).min(params.plate_max());
    if l_min > l_cap {
        return Err(StaticsError::NoFeasiblePlatePosition { l_min, l_cap });
    }
    Ok(PlatePrediction {
        l_star: l_min,
        l_min,
        l_cap,
        d_min,
    })
}
