//! Config-driven runner: builds a scenario, runs it, writes the series,
//! snapshots, events and invariant verdicts, and maps the outcome to an
//! exit status.

pub mod config;
pub mod output;

use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::Serialize;

use smcf_core::diagnostics::{self, check_invariants, InvariantTolerances};
use smcf_core::radial::solve_radial;
use smcf_core::{run, EventKind, FlowState, Geometry, RunReport};

pub use config::RunConfig;

/// Every checked invariant held.
pub const EXIT_OK: i32 = 0;
/// Unusable configuration or a domain error.
pub const EXIT_CONFIG: i32 = 1;
/// At least one invariant failed.
pub const EXIT_INVARIANT: i32 = 2;

#[derive(Debug, Clone, Serialize)]
pub struct InvariantEntry {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FinalState {
    pub time: f64,
    pub step_count: u64,
    pub nodes: usize,
    pub mass: f64,
    pub energy: f64,
    pub area: f64,
    pub min_c: f64,
    pub max_c: f64,
    pub min_h: f64,
    pub max_h: f64,
    /// Radius of the circle or sphere with the same length or area.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Radius from the radial ODE at the same time.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_oracle: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub exit_code: i32,
    pub invariants: Vec<InvariantEntry>,
    pub final_state: FinalState,
    pub rows: usize,
    pub events: Vec<String>,
    pub remesh_count: usize,
    pub substeps: u64,
    pub terminated_by: Option<EventKind>,
}

#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: Summary,
    pub report: RunReport,
    pub out_dir: PathBuf,
}

fn final_state(cfg: &RunConfig, initial: &FlowState, state: &FlowState) -> Result<FinalState> {
    let c = state.geometry.concentration();
    let area = diagnostics::area(state)?;
    let (radius, radius_oracle) = match cfg.scenario {
        config::ScenarioSpec::Radial { dimension, radius, .. } => {
            let r = match state.geometry {
                Geometry::Curve(_) => area / (2.0 * std::f64::consts::PI),
                Geometry::Revolution(_) => (area / (4.0 * std::f64::consts::PI)).sqrt(),
            };
            let m = diagnostics::mass(initial)?;
            let oracle = if state.time > 0.0 {
                solve_radial(&state.density, m, dimension, radius, state.time, state.time)
                    .ok()
                    .and_then(|t| t.samples.last().map(|s| s.1))
            } else {
                Some(radius)
            };
            (Some(r), oracle)
        }
        _ => (None, None),
    };
    Ok(FinalState {
        time: state.time,
        step_count: state.step_count,
        nodes: state.geometry.node_count(),
        mass: diagnostics::mass(state)?,
        energy: diagnostics::energy(state)?,
        area,
        min_c: c.iter().copied().fold(f64::INFINITY, f64::min),
        max_c: c.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min_h: diagnostics::min_mean_curvature(state)?,
        max_h: diagnostics::max_mean_curvature(state)?,
        radius,
        radius_oracle,
    })
}

/// Runs `cfg`, writing all outputs below `out_dir`. `hook` is called after
/// every step and may alter the state (used to test the exit contract).
/// Errors mean exit status [`EXIT_CONFIG`].
pub fn execute(cfg: &RunConfig, out_dir: &Path, hook: Option<&mut dyn FnMut(&mut FlowState)>) -> Result<Outcome> {
    let initial = cfg.build_state()?;
    let mut sink = output::FileSink::create(out_dir, hook)?;
    let report = run(initial.clone(), &cfg.run_options(), &mut sink)?;
    sink.finish()?;
    output::write_json(&out_dir.join("events.json"), &report.events)?;
    let tol = InvariantTolerances::from(&cfg.tolerances);
    let invariants: Vec<InvariantEntry> = check_invariants(&report.rows, &tol)
        .into_iter()
        .map(|v| InvariantEntry {
            name: v.name.to_string(),
            passed: v.passed,
            worst: v.worst,
        })
        .collect();
    let exit_code = if report.terminated_by == Some(EventKind::DomainViolation) {
        EXIT_CONFIG
    } else if invariants.iter().all(|v| v.passed) {
        EXIT_OK
    } else {
        EXIT_INVARIANT
    };
    let summary = Summary {
        scenario: cfg.scenario.name().to_string(),
        exit_code,
        invariants,
        final_state: final_state(cfg, &initial, &report.final_state)?,
        rows: report.rows.len(),
        events: report.events.iter().map(|e| e.kind.name().to_string()).collect(),
        remesh_count: report.remesh_count,
        substeps: report.substeps,
        terminated_by: report.terminated_by,
    };
    output::write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(Outcome {
        exit_code,
        summary,
        report,
        out_dir: out_dir.to_path_buf(),
    })
}

/// Output directory: explicit override, else the config's `output_dir`,
/// else `smcf-out/<config stem>`.
pub fn resolve_out_dir(cfg: &RunConfig, config_path: &Path, override_dir: Option<&Path>) -> PathBuf {
    if let Some(d) = override_dir {
        return d.to_path_buf();
    }
    if let Some(d) = &cfg.output_dir {
        return d.clone();
    }
    let stem = config_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    Path::new("smcf-out").join(stem)
}
