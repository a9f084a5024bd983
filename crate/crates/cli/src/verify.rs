//! Golden-file regression: recompute the analysis tables and scenario
//! summaries, byte-compare the CSVs, and tolerance-compare the summaries.

use crate::analyze::{analyze_sweep_rl, analyze_tool_load};
use crate::config::{RunConfig, ScenarioName};
use crate::runner::{sim_task, RunError};
use crate::summary::RunSummary;
use std::path::Path;

/// One verification finding.
#[derive(Debug, Clone, PartialEq)]
pub enum Finding {
    MissingBaseline(String),
    ByteMismatch(String),
    SummaryMismatch {
        file: String,
        field: String,
        golden: f64,
        current: f64,
    },
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Finding::MissingBaseline(name) => write!(f, "{name}: missing baseline"),
            Finding::ByteMismatch(name) => write!(f, "{name}: byte content differs"),
            Finding::SummaryMismatch {
                file,
                field,
                golden,
                current,
            } => write!(
                f,
                "{file}: {field} differs (golden {golden}, current {current})"
            ),
        }
    }
}

const SUMMARY_TOLERANCE: f64 = 1e-9;

fn compare_summary(name: &str, golden: &RunSummary, current: &RunSummary, out: &mut Vec<Finding>) {
    let mut cmp = |field: &str, g: f64, c: f64| {
        if (g - c).abs() > SUMMARY_TOLERANCE {
            out.push(Finding::SummaryMismatch {
                file: name.to_string(),
                field: field.to_string(),
                golden: g,
                current: c,
            });
        }
    };
    cmp(
        "l_star_achieved",
        golden.l_star_achieved,
        current.l_star_achieved,
    );
    cmp(
        "alpha_steady_deg",
        golden.alpha_steady_deg,
        current.alpha_steady_deg,
    );
    cmp(
        "peak_normal_force",
        golden.peak_normal_force,
        current.peak_normal_force,
    );
    cmp("peak_tau1", golden.peak_tau1, current.peak_tau1);
    cmp("peak_tau2", golden.peak_tau2, current.peak_tau2);
    for (i, (gz, cz)) in golden.zones.iter().zip(current.zones.iter()).enumerate() {
        cmp(&format!("zones[{i}].t"), gz.t, cz.t);
    }
    if golden.zones.len() != current.zones.len() {
        out.push(Finding::SummaryMismatch {
            file: name.to_string(),
            field: "zones.len".to_string(),
            golden: golden.zones.len() as f64,
            current: current.zones.len() as f64,
        });
    }
}

/// Everything verify regenerates.
struct Artifacts {
    sweep_rl: String,
    tool_load: String,
    summaries: Vec<(String, RunSummary)>,
}

fn regenerate(config: &RunConfig) -> Result<Artifacts, RunError> {
    let sweep_rl = analyze_sweep_rl(config, None, None, 0.0, 1.0, 0.01)?;
    let tool_load = analyze_tool_load(config, None, &[0.1, 0.15], 0.0, 20.0, 0.1)?;
    let mut summaries = Vec::new();
    for scenario in [ScenarioName::Task1, ScenarioName::Task2a, ScenarioName::Task2b] {
        let mut cfg = config.clone();
        cfg.run.scenario = scenario;
        if scenario != ScenarioName::Task1 {
            cfg.timing.duration = 25.0;
        }
        let (_, summary) = sim_task(&cfg)?;
        summaries.push((format!("{}_summary.toml", scenario.as_str()), summary));
    }
    Ok(Artifacts {
        sweep_rl,
        tool_load,
        summaries,
    })
}

/// Writes fresh baselines into the golden directory.
pub fn update_goldens(config: &RunConfig, golden_dir: &Path) -> Result<(), RunError> {
    let artifacts = regenerate(config)?;
    std::fs::create_dir_all(golden_dir).map_err(|source| RunError::Io {
        path: golden_dir.display().to_string(),
        source,
    })?;
    let write = |name: &str, content: &str| -> Result<(), RunError> {
        let path = golden_dir.join(name);
        std::fs::write(&path, content).map_err(|source| RunError::Io {
            path: path.display().to_string(),
            source,
        })
    };
    write("sweep_rl.csv", &artifacts.sweep_rl)?;
    write("tool_load.csv", &artifacts.tool_load)?;
    for (name, summary) in &artifacts.summaries {
        write(name, &summary.to_toml())?;
    }
    Ok(())
}

/// Recomputes everything and diffs it against the golden directory.
pub fn verify(config: &RunConfig, golden_dir: &Path) -> Result<Vec<Finding>, RunError> {
    let artifacts = regenerate(config)?;
    let mut findings = Vec::new();

    for (name, current) in [
        ("sweep_rl.csv", &artifacts.sweep_rl),
        ("tool_load.csv", &artifacts.tool_load),
    ] {
        match std::fs::read_to_string(golden_dir.join(name)) {
            Ok(golden) => {
                if golden != *current {
                    findings.push(Finding::ByteMismatch(name.to_string()));
                }
            }
            Err(_) => findings.push(Finding::MissingBaseline(name.to_string())),
        }
    }

    for (name, current) in &artifacts.summaries {
        match std::fs::read_to_string(golden_dir.join(name)) {
            Ok(text) => match RunSummary::from_toml(&text) {
                Ok(golden) => compare_summary(name, &golden, current, &mut findings),
                Err(_) => findings.push(Finding::ByteMismatch(name.clone())),
            },
            Err(_) => findings.push(Finding::MissingBaseline(name.clone())),
        }
    }
    Ok(findings)
}
