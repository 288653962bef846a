//! Run configuration: a JSON document, unknown keys rejected.
//!
//! ```json
//! {
//!   "scenario": { "kind": "radial", "dimension": 1, "radius": 1.0 },
//!   "density": { "kind": "constant", "value": 1.0 },
//!   "t_end": 0.3,
//!   "dt": 1e-4,
//!   "monitor_every": 100,
//!   "output_dir": "out/radial"
//! }
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use smcf_core::diagnostics::InvariantTolerances;
use smcf_core::flows::{
    build_circle_scenario, build_convexity_scenario, build_self_intersection_scenario, build_sphere_scenario,
    ConvexityScenarioParams, SelfIntersectionScenarioParams,
};
use smcf_core::meshgeom::{Closure, CurveMesh, GeneratingCurve, Orientation, Point, RevolutionProfile};
use smcf_core::radial::unit_sphere_area;
use smcf_core::{EnergyDensity, EventKind, FlowState, Geometry, RunOptions};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    PowerLaw { s: f64, alpha: f64 },
    Constant { value: f64 },
}

impl DensitySpec {
    pub fn build(&self) -> Result<EnergyDensity> {
        Ok(match *self {
            DensitySpec::PowerLaw { s, alpha } => EnergyDensity::power_law(s, alpha)?,
            DensitySpec::Constant { value } => EnergyDensity::constant(value),
        })
    }
}

fn default_dimension() -> u32 {
    1
}
fn default_radius() -> f64 {
    1.0
}
fn default_nodes() -> usize {
    512
}
fn default_inward() -> Orientation {
    Orientation::NormalLeftOfTangent
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioSpec {
    /// Circle (`dimension = 1`) or sphere (`dimension = 2`) with uniform concentration.
    Radial {
        #[serde(default = "default_dimension")]
        dimension: u32,
        #[serde(default = "default_radius")]
        radius: f64,
        /// Total mass; defaults to the value giving `c = 1`.
        #[serde(default)]
        mass: Option<f64>,
        #[serde(default = "default_nodes")]
        nodes: usize,
        /// Circle only.
        #[serde(default = "default_inward")]
        orientation: Orientation,
    },
    Convexity {
        #[serde(default)]
        x: Option<[f64; 6]>,
        #[serde(default)]
        c_inner: Option<f64>,
        #[serde(default)]
        c_outer: Option<f64>,
        #[serde(default)]
        nodes: Option<usize>,
    },
    SelfIntersection {
        #[serde(default)]
        radius: Option<f64>,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        rho0: Option<f64>,
        #[serde(default)]
        c_left: Option<f64>,
        #[serde(default)]
        c_right: Option<f64>,
        #[serde(default)]
        nodes: Option<usize>,
        #[serde(default)]
        t0: Option<f64>,
    },
    CustomCurve {
        nodes: Vec<Point>,
        concentration: Vec<f64>,
        orientation: Orientation,
    },
    CustomRevolution {
        x: Vec<f64>,
        w: Vec<f64>,
        concentration: Vec<f64>,
        closure: Closure,
    },
}

impl ScenarioSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioSpec::Radial { .. } => "radial",
            ScenarioSpec::Convexity { .. } => "convexity",
            ScenarioSpec::SelfIntersection { .. } => "self_intersection",
            ScenarioSpec::CustomCurve { .. } => "custom_curve",
            ScenarioSpec::CustomRevolution { .. } => "custom_revolution",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepperSpec {
    pub cfl: f64,
    pub remesh_ratio: f64,
    pub h_min_rel: f64,
    pub event_tol: f64,
}

impl Default for StepperSpec {
    fn default() -> Self {
        let d = RunOptions::default();
        Self {
            cfl: d.cfl,
            remesh_ratio: d.remesh_ratio,
            h_min_rel: d.h_min_rel,
            event_tol: d.event_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToleranceSpec {
    pub mass_drift: f64,
    pub energy_increase: f64,
    pub min_c_decrease: f64,
    pub mean_convexity: f64,
    pub dissipation_residual: f64,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        let d = InvariantTolerances::default();
        Self {
            mass_drift: d.mass_drift,
            energy_increase: d.energy_increase,
            min_c_decrease: d.min_c_decrease,
            mean_convexity: d.mean_convexity,
            dissipation_residual: d.dissipation_residual,
        }
    }
}

impl From<&ToleranceSpec> for InvariantTolerances {
    fn from(t: &ToleranceSpec) -> Self {
        Self {
            mass_drift: t.mass_drift,
            energy_increase: t.energy_increase,
            min_c_decrease: t.min_c_decrease,
            mean_convexity: t.mean_convexity,
            dissipation_residual: t.dissipation_residual,
        }
    }
}

fn default_monitor_every() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    pub density: DensitySpec,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default = "default_monitor_every")]
    pub monitor_every: usize,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub stepper: StepperSpec,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    /// Non-terminal events that end the run.
    #[serde(default)]
    pub stop_on: Vec<EventKind>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).context("unparseable config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            bail!("t_end must be positive, got {}", self.t_end);
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            bail!("dt must be positive, got {}", self.dt);
        }
        if self.monitor_every == 0 {
            bail!("monitor_every must be at least 1");
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("mass_drift", t.mass_drift),
            ("energy_increase", t.energy_increase),
            ("min_c_decrease", t.min_c_decrease),
            ("mean_convexity", t.mean_convexity),
            ("dissipation_residual", t.dissipation_residual),
        ] {
            if !(v > 0.0) {
                bail!("tolerance {name} must be positive, got {v}");
            }
        }
        Ok(())
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            t_end: self.t_end,
            dt: self.dt,
            monitor_every: self.monitor_every,
            cfl: self.stepper.cfl,
            remesh_ratio: self.stepper.remesh_ratio,
            h_min_rel: self.stepper.h_min_rel,
            event_tol: self.stepper.event_tol,
            stop_on: self.stop_on.clone(),
        }
    }

    /// Initial state; fails on parabolicity violations and invalid geometry.
    pub fn build_state(&self) -> Result<FlowState> {
        let density = self.density.build()?;
        let state = match &self.scenario {
            ScenarioSpec::Radial {
                dimension,
                radius,
                mass,
                nodes,
                orientation,
            } => {
                let m = mass.unwrap_or_else(|| unit_sphere_area(*dimension) * radius.powi(*dimension as i32));
                match dimension {
                    1 => build_circle_scenario(*radius, m, *nodes, *orientation, density)?,
                    2 => build_sphere_scenario(*radius, m, *nodes, density)?,
                    d => bail!("radial scenario supports dimension 1 or 2, got {d}"),
                }
            }
            ScenarioSpec::Convexity {
                x,
                c_inner,
                c_outer,
                nodes,
            } => {
                let d = ConvexityScenarioParams::default();
                let p = ConvexityScenarioParams {
                    x: x.unwrap_or(d.x),
                    c_inner: c_inner.unwrap_or(d.c_inner),
                    c_outer: c_outer.unwrap_or(d.c_outer),
                    n: nodes.unwrap_or(d.n),
                };
                build_convexity_scenario(&p, density)?
            }
            ScenarioSpec::SelfIntersection {
                radius,
                epsilon,
                rho0,
                c_left,
                c_right,
                nodes,
                t0,
            } => {
                let d = SelfIntersectionScenarioParams::default();
                let p = SelfIntersectionScenarioParams {
                    radius: radius.unwrap_or(d.radius),
                    epsilon: epsilon.unwrap_or(d.epsilon),
                    rho0: rho0.unwrap_or(d.rho0),
                    c_left: c_left.unwrap_or(d.c_left),
                    c_right: c_right.unwrap_or(d.c_right),
                    n: nodes.unwrap_or(d.n),
                    t0: t0.unwrap_or(d.t0),
                };
                build_self_intersection_scenario(&p, density)?
            }
            ScenarioSpec::CustomCurve {
                nodes,
                concentration,
                orientation,
            } => {
                let mesh = CurveMesh::new(nodes.clone(), *orientation, concentration.clone())?;
                FlowState::new(Geometry::Curve(mesh), density)?
            }
            ScenarioSpec::CustomRevolution {
                x,
                w,
                concentration,
                closure,
            } => {
                let p = RevolutionProfile::new(x.clone(), w.clone(), concentration.clone(), *closure)?;
                FlowState::new(Geometry::Revolution(GeneratingCurve::from_profile(&p)?), density)?
            }
        };
        check_density(&state)?;
        Ok(state)
    }
}

/// `g > 0` and `G'' ≥ 0` over the initial concentration range. `G'' = 0`
/// is admitted so that constant densities (pure geometric flow) run.
fn check_density(state: &FlowState) -> Result<()> {
    let c = state.geometry.concentration();
    let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi - lo > 1e-12 * hi.abs().max(1.0) {
        (lo, hi)
    } else {
        let pad = 1e-6 * lo.abs().max(1e-12);
        (lo - pad, hi + pad)
    };
    let rep = state.density.check_parabolicity(lo, hi, 257)?;
    if !rep.g_positive || rep.min_second_derivative < 0.0 {
        bail!(
            "parabolicity violation on [{lo}, {hi}]: min g = {}, min G'' = {}",
            rep.min_g,
            rep.min_second_derivative
        );
    }
    Ok(())
}
