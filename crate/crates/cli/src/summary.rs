//! Run summaries: steady-state numbers, zone timestamps, and pass/fail
//! checks against the declared tolerances.

use comshift_core::control::Phase;
use comshift_core::trace::SimTrace;
use serde::{Deserialize, Serialize};

/// A named timestamp in the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub label: String,
    pub t: f64,
}

/// One declared-tolerance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: String,
    pub pass: bool,
}

/// Summary of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    /// Mean plate position over the steady window, m.
    pub l_star_achieved: f64,
    /// Mean tilt over the steady window, deg.
    pub alpha_steady_deg: f64,
    pub peak_normal_force: f64,
    pub peak_tau1: f64,
    pub peak_tau2: f64,
    /// Static prediction of the ideal plate position, when feasible.
    pub l_star_predicted: Option<f64>,
    /// Explanation when the static prediction is infeasible.
    pub prediction_note: Option<String>,
    pub zones: Vec<Zone>,
    pub checks: Vec<Check>,
}

impl RunSummary {
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("summary serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Human-readable report, one line per quantity and check.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scenario            {}\n", self.scenario));
        out.push_str(&format!(
            "l_star_achieved     {:.4} m\n",
            self.l_star_achieved
        ));
        if let Some(pred) = self.l_star_predicted {
            out.push_str(&format!("l_star_predicted    {pred:.4} m\n"));
        }
        if let Some(note) = &self.prediction_note {
            out.push_str(&format!("prediction_note     {note}\n"));
        }
        out.push_str(&format!(
            "alpha_steady        {:.2} deg\n",
            self.alpha_steady_deg
        ));
        out.push_str(&format!(
            "peak_normal_force   {:.2} N\n",
            self.peak_normal_force
        ));
        out.push_str(&format!(
            "peak_joint_torques  {:.4} / {:.4} N m\n",
            self.peak_tau1, self.peak_tau2
        ));
        for z in &self.zones {
            out.push_str(&format!("zone {:<14} t = {:.2} s\n", z.label, z.t));
        }
        for c in &self.checks {
            out.push_str(&format!(
                "check {:<28} {:>12.5} {} -> {}\n",
                c.name,
                c.value,
                c.bound,
                if c.pass { "pass" } else { "FAIL" }
            ));
        }
        out
    }
}

/// Steady-window statistics: the last two seconds of the gated
/// (self-displacement) phase, or of the whole run when the gate never
/// engaged.
pub fn steady_window(trace: &SimTrace) -> (f64, f64) {
    let gated: Vec<_> = trace.rows.iter().filter(|r| r.gate).collect();
    let rows: Vec<_> = if gated.is_empty() {
        let t_end = trace.rows.last().map(|r| r.t).unwrap_or(0.0);
        trace.rows.iter().filter(|r| r.t >= t_end - 2.0).collect()
    } else {
        let t_end = gated.last().unwrap().t;
        gated.into_iter().filter(|r| r.t >= t_end - 2.0).collect()
    };
    let n = rows.len().max(1) as f64;
    let alpha = rows.iter().map(|r| r.alpha).sum::<f64>() / n;
    let l = rows.iter().map(|r| r.l).sum::<f64>() / n;
    (alpha.to_degrees(), l)
}

/// Detects the three zones of the calibration task: the gated ramp, the
/// plateau at full tilt, and the return of the plate.
pub fn detect_zones(trace: &SimTrace) -> Vec<Zone> {
    let mut zones = Vec::new();
    let ramp = trace.rows.iter().find(|r| r.gate).map(|r| r.t);
    if let Some(t) = ramp {
        zones.push(Zone {
            label: "ramp".into(),
            t,
        });
        if let Some(t2) = trace
            .rows
            .iter()
            .find(|r| r.t >= t && r.alpha.to_degrees() >= 89.0)
            .map(|r| r.t)
        {
            zones.push(Zone {
                label: "plateau".into(),
                t: t2,
            });
        }
        if let Some(t3) = trace
            .rows
            .iter()
            .find(|r| r.t > t && r.phase == Phase::Retract)
            .map(|r| r.t)
        {
            zones.push(Zone {
                label: "return".into(),
                t: t3,
            });
            if let Some(t4) = trace
                .rows
                .iter()
                .find(|r| r.t > t3 && r.l <= 0.005)
                .map(|r| r.t)
            {
                zones.push(Zone {
                    label: "home".into(),
                    t: t4,
                });
            }
        }
    }
    zones
}

/// True when ramp, plateau, return, and home are all present in ascending
/// order.
pub fn zones_in_order(zones: &[Zone]) -> bool {
    let labels: Vec<_> = zones.iter().map(|z| z.label.as_str()).collect();
    labels == ["ramp", "plateau", "return", "home"]
        && zones.windows(2).all(|w| w[0].t < w[1].t)
}

pub fn peak_normal_force(trace: &SimTrace) -> f64 {
    trace
        .rows
        .iter()
        .map(|r| r.f_n_frame.max(r.f_n_ee))
        .fold(0.0, f64::max)
}

pub fn peak_torques(trace: &SimTrace) -> (f64, f64) {
    trace.rows.iter().fold((0.0, 0.0), |(a, b), r| {
        (f64::max(a, r.tau1), f64::max(b, r.tau2))
    })
}
