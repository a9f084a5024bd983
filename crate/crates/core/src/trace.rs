//! Time-indexed simulation record and its CSV form.

use crate::control::Phase;

/// One sample of the simulation, recorded at every control tick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub x: f64,
    pub z: f64,
    pub theta: f64,
    pub vx: f64,
    pub vz: f64,
    pub omega: f64,
    pub l: f64,
    pub d: f64,
    pub alpha: f64,
    pub t1: f64,
    pub t2: f64,
    pub f_n_frame: f64,
    pub f_t_frame: f64,
    pub f_n_ee: f64,
    pub f_t_ee: f64,
    /// Joint torque magnitudes; zero when no arm is mounted.
    pub tau1: f64,
    pub tau2: f64,
    pub phase: Phase,
    pub gate: bool,
    /// Integral contribution of the plate-positioning loop, m.
    pub integ: f64,
}

/// Full run record sampled at the control rate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub rows: Vec<TraceRow>,
}

impl SimTrace {
    pub const CSV_HEADER: &'static str = "t,x,z,theta,vx,vz,omega,l,d,alpha,T1,T2,\
         f_n_frame,f_t_frame,f_n_ee,f_t_ee,tau1,tau2,phase,gate,integ";

    /// Renders the trace as CSV with LF line endings and shortest
    /// round-trip float formatting. `decimation` keeps every n-th row
    /// (the first row is always kept).
    pub fn to_csv(&self, decimation: usize) -> String {
        let step = decimation.max(1);
        let mut out = String::with_capacity(self.rows.len() / step * 128 + 128);
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for row in self.rows.iter().step_by(step) {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                row.t,
                row.x,
                row.z,
                row.theta,
                row.vx,
                row.vz,
                row.omega,
                row.l,
                row.d,
                row.alpha,
                row.t1,
                row.t2,
                row.f_n_frame,
                row.f_t_frame,
                row.f_n_ee,
                row.f_t_ee,
                row.tau1,
                row.tau2,
                row.phase.as_str(),
                if row.gate { 1 } else { 0 },
                row.integ,
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64) -> TraceRow {
        TraceRow {
            t,
            x: 0.1,
            z: 1.0,
            theta: 0.0,
            vx: 0.0,
            vz: 0.0,
            omega: 0.0,
            l: 0.0,
            d: 0.0,
            alpha: 0.0,
            t1: 15.0,
            t2: 15.0,
            f_n_frame: 0.0,
            f_t_frame: 0.0,
            f_n_ee: 0.0,
            f_t_ee: 0.0,
            tau1: 0.0,
            tau2: 0.0,
            phase: Phase::Hover,
            gate: false,
            integ: 0.0,
        }
    }

    #[test]
    fn csv_has_header_and_lf_endings() {
        let trace = SimTrace {
            rows: vec![row(0.0), row(0.01)],
        };
        let csv = trace.to_csv(1);
        assert!(csv.starts_with("t,x,z,theta"));
        assert!(!csv.contains('\r'));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn decimation_keeps_every_nth_row() {
        let trace = SimTrace {
            rows: (0..10).map(|i| row(i as f64 * 0.01)).collect(),
        };
        let csv = trace.to_csv(4);
        // rows 0, 4, 8 plus the header
        assert_eq!(csv.lines().count(), 4);
    }
}
