//! Coupled time stepping of `V = g(c)·H` and `∂□c = Δ_Γ G'(c) + cHV`.
//!
//! Plane curves move as [`CurveMesh`] markers, axisymmetric surfaces as a
//! [`GeneratingCurve`] in the `(x, r)` half plane. In both cases markers
//! move along the normal only, so the normal time derivative is the
//! material derivative of the node values and `cHV` is absorbed by the
//! change of the lumped area elements.

pub mod remesh;
pub mod scenarios;
mod stepper;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::density::{DensityError, EnergyDensity};
use crate::diagnostics::{self, ConvexityPlateaus, DiagnosticsRow};
use crate::meshgeom::{CurveMesh, DiffusionStencil, GeneratingCurve, GeometryFields, MeshError, SurfaceMesh};

pub use scenarios::{
    build_circle_scenario, build_convexity_scenario, build_self_intersection_scenario, build_sphere_scenario,
    ConvexityScenarioParams, SelfIntersectionScenarioParams,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error("linear solve failed: {0}")]
    Solver(String),
    #[error("concentration {c} left the admissible range at node {index}")]
    DomainViolation { index: usize, c: f64 },
    #[error("pinch-off at node {index} (r = {r})")]
    PinchOff { index: usize, r: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("output sink failed: {0}")]
    Sink(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Curve(CurveMesh),
    Revolution(GeneratingCurve),
}

impl Geometry {
    pub fn mesh(&self) -> &dyn SurfaceMesh {
        match self {
            Geometry::Curve(m) => m,
            Geometry::Revolution(g) => g,
        }
    }

    pub fn node_count(&self) -> usize {
        self.mesh().node_count()
    }

    pub fn concentration(&self) -> &[f64] {
        match self {
            Geometry::Curve(m) => &m.concentration,
            Geometry::Revolution(g) => &g.concentration,
        }
    }

    pub fn concentration_mut(&mut self) -> &mut Vec<f64> {
        match self {
            Geometry::Curve(m) => &mut m.concentration,
            Geometry::Revolution(g) => &mut g.concentration,
        }
    }

    pub fn diffusion_stencil(&self) -> Result<DiffusionStencil, MeshError> {
        match self {
            Geometry::Curve(m) => m.diffusion_stencil(),
            Geometry::Revolution(g) => g.diffusion_stencil(),
        }
    }

    pub fn quality_ratio(&self) -> f64 {
        match self {
            Geometry::Curve(m) => m.quality_ratio(),
            Geometry::Revolution(g) => g.quality_ratio(),
        }
    }

    pub fn min_segment(&self) -> f64 {
        match self {
            Geometry::Curve(m) => m.min_segment(),
            Geometry::Revolution(g) => g.min_segment(),
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Geometry::Curve(m) => m.diameter(),
            Geometry::Revolution(g) => g.diameter(),
        }
    }

    pub fn fields(&self) -> Result<GeometryFields, MeshError> {
        self.mesh().geometry()
    }

    fn validate(&self) -> Result<(), MeshError> {
        match self {
            Geometry::Curve(m) => m.validate(),
            Geometry::Revolution(g) => g.validate(),
        }
    }
}

/// What the run loop watches for besides extinction.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Monitor {
    #[default]
    None,
    Convexity(ConvexityPlateaus),
    /// Gap `ρ(z_l) + ρ(z_r)` of the two marked nodes plus a geometric test.
    SelfIntersection { z_l: usize, z_r: usize },
}

/// The pair (surface, concentration) at one time.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub geometry: Geometry,
    pub density: EnergyDensity,
    pub time: f64,
    pub step_count: u64,
    pub monitor: Monitor,
}

impl FlowState {
    pub fn new(geometry: Geometry, density: EnergyDensity) -> Result<Self, FlowError> {
        geometry.validate()?;
        let range = density.valid_range();
        if let Some((i, &c)) = geometry
            .concentration()
            .iter()
            .enumerate()
            .find(|(_, c)| !range.contains(**c))
        {
            return Err(FlowError::DomainViolation { index: i, c });
        }
        Ok(Self {
            geometry,
            density,
            time: 0.0,
            step_count: 0,
            monitor: Monitor::None,
        })
    }

    pub fn with_monitor(mut self, monitor: Monitor) -> Self {
        self.monitor = monitor;
        self
    }

    /// One semi-implicit step of size `dt`; `dt = 0` returns the state unchanged.
    pub fn step(&self, dt: f64) -> Result<FlowState, FlowError> {
        if !(dt >= 0.0) || !dt.is_finite() {
            return Err(FlowError::InvalidArgument(format!("time step must be finite and non-negative, got {dt}")));
        }
        if dt == 0.0 {
            return Ok(self.clone());
        }
        let geometry = match &self.geometry {
            Geometry::Curve(m) => Geometry::Curve(stepper::step_curve(m, &self.density, dt)?),
            Geometry::Revolution(g) => Geometry::Revolution(stepper::step_generating(g, &self.density, dt)?),
        };
        Ok(FlowState {
            geometry,
            density: self.density.clone(),
            time: self.time + dt,
            step_count: self.step_count + 1,
            monitor: self.monitor.clone(),
        })
    }

    /// Arc-length equidistribution keeping marked nodes in place.
    pub fn remesh(&self) -> Result<FlowState, FlowError> {
        let geometry = match &self.geometry {
            Geometry::Curve(m) => {
                let pins = match self.monitor {
                    Monitor::SelfIntersection { z_l, z_r } => {
                        let mut p = vec![0, z_l, z_r];
                        p.sort_unstable();
                        p.dedup();
                        p
                    }
                    _ => vec![0],
                };
                Geometry::Curve(remesh::remesh_curve(m, &pins)?)
            }
            Geometry::Revolution(g) => Geometry::Revolution(remesh::remesh_generating(g)?),
        };
        Ok(FlowState {
            geometry,
            ..self.clone()
        })
    }

    /// `ρ(z_l) + ρ(z_r)` for a self-intersection monitor.
    pub fn gap(&self) -> Option<f64> {
        let (Monitor::SelfIntersection { z_l, z_r }, Geometry::Curve(m)) = (&self.monitor, &self.geometry) else {
            return None;
        };
        let h = m.heights()?;
        Some(h[*z_l] + h[*z_r])
    }
}

/// `step(state, dt)` as a free function.
pub fn step(state: &FlowState, dt: f64) -> Result<FlowState, FlowError> {
    state.step(dt)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Extinction,
    PinchOff,
    SelfIntersection,
    ConvexityLost,
    DomainViolation,
}

impl EventKind {
    pub fn name(self) -> &'static str {
        match self {
            EventKind::Extinction => "extinction",
            EventKind::PinchOff => "pinch_off",
            EventKind::SelfIntersection => "self_intersection",
            EventKind::ConvexityLost => "convexity_lost",
            EventKind::DomainViolation => "domain_violation",
        }
    }

    /// Events after which the run cannot continue.
    pub fn is_terminal(self) -> bool {
        matches!(self, EventKind::Extinction | EventKind::PinchOff | EventKind::DomainViolation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    #[serde(rename = "type")]
    pub kind: EventKind,
    pub t_event: f64,
    pub payload: BTreeMap<String, f64>,
}

impl Event {
    fn new(kind: EventKind, t_event: f64, payload: &[(&str, f64)]) -> Self {
        Self {
            kind,
            t_event,
            payload: payload.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub t_end: f64,
    pub dt: f64,
    /// Sample a diagnostics row every this many steps.
    pub monitor_every: usize,
    /// Substeps keep `dt_sub ≤ cfl·h_min(t)`.
    pub cfl: f64,
    /// Remesh when longest/shortest segment exceeds this.
    pub remesh_ratio: f64,
    /// Segment floor relative to the initial diameter.
    pub h_min_rel: f64,
    /// Absolute cap on the bisection interval of event times.
    pub event_tol: f64,
    /// Non-terminal events that also end the run.
    pub stop_on: Vec<EventKind>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            dt: 1e-3,
            monitor_every: 10,
            cfl: 0.25,
            remesh_ratio: 3.0,
            h_min_rel: 1e-4,
            event_tol: 1e-6,
            stop_on: Vec::new(),
        }
    }
}

impl RunOptions {
    fn check(&self) -> Result<(), FlowError> {
        let positive = [
            ("t_end", self.t_end),
            ("dt", self.dt),
            ("cfl", self.cfl),
            ("h_min_rel", self.h_min_rel),
            ("event_tol", self.event_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(FlowError::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.remesh_ratio > 1.0) {
            return Err(FlowError::InvalidArgument("remesh_ratio must exceed 1".into()));
        }
        if self.monitor_every == 0 {
            return Err(FlowError::InvalidArgument("monitor_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// Callbacks of [`run`]. Rows arrive with one sample of delay, once the
/// centred energy rate is available.
pub trait Observer {
    fn row(&mut self, _row: &DiagnosticsRow) -> Result<(), FlowError> {
        Ok(())
    }

    fn snapshot(&mut self, _index: usize, _state: &FlowState) -> Result<(), FlowError> {
        Ok(())
    }

    /// Called after every completed step; may modify the state.
    fn after_step(&mut self, _state: &mut FlowState) {}
}

impl Observer for () {}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub rows: Vec<DiagnosticsRow>,
    pub events: Vec<Event>,
    pub final_state: FlowState,
    pub remesh_count: usize,
    pub substeps: u64,
    /// Event that ended the run before `t_end`.
    pub terminated_by: Option<EventKind>,
}

struct Series<'a, O: Observer> {
    rows: Vec<DiagnosticsRow>,
    observer: &'a mut O,
    pending_events: Vec<String>,
}

impl<O: Observer> Series<'_, O> {
    fn sample(&mut self, state: &FlowState) -> Result<(), FlowError> {
        let row = diagnostics::sample(state, std::mem::take(&mut self.pending_events))?;
        self.rows.push(row);
        let k = self.rows.len() - 1;
        self.observer.snapshot(k, state)?;
        if k >= 1 {
            self.rows[k - 1].dissipation_lhs = diagnostics::energy_rate(&self.rows, k - 1);
            self.observer.row(&self.rows[k - 1])?;
        }
        Ok(())
    }

    fn finish(mut self) -> Result<Vec<DiagnosticsRow>, FlowError> {
        if let Some(k) = self.rows.len().checked_sub(1) {
            self.rows[k].dissipation_lhs = diagnostics::energy_rate(&self.rows, k);
            self.observer.row(&self.rows[k])?;
        }
        Ok(self.rows)
    }
}

/// Bisects `[0, h]` for the first step size from `prev` at which `pred`
/// holds; `pred` must hold at `h`. Returns the states at both ends.
fn refine<F>(prev: &FlowState, next: &FlowState, h: f64, tol: f64, pred: F) -> Result<(FlowState, FlowState), FlowError>
where
    F: Fn(&FlowState) -> Result<bool, FlowError>,
{
    let (mut lo, mut hi) = (0.0, h);
    let (mut left, mut right) = (prev.clone(), next.clone());
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let s = prev.step(mid)?;
        if pred(&s)? {
            hi = mid;
            right = s;
        } else {
            lo = mid;
            left = s;
        }
    }
    Ok((left, right))
}

fn convexity_lost(state: &FlowState) -> Result<Option<diagnostics::ConvexityReport>, FlowError> {
    match (&state.monitor, &state.geometry) {
        (Monitor::Convexity(p), Geometry::Revolution(g)) => {
            let rep = diagnostics::convexity_monitor(g, p)?;
            Ok((!rep.convex).then_some(rep))
        }
        _ => Ok(None),
    }
}

fn crossed(state: &FlowState) -> Option<(f64, diagnostics::SegmentCrossing)> {
    let gap = state.gap()?;
    if !(gap < 0.0) {
        return None;
    }
    let Geometry::Curve(m) = &state.geometry else {
        return None;
    };
    diagnostics::detect_self_intersection(m).map(|x| (gap, x))
}

/// Checks the monitors between two consecutive substeps.
fn detect_events(prev: &FlowState, next: &FlowState, h: f64, opts: &RunOptions, fired: &mut Vec<EventKind>) -> Result<Vec<Event>, FlowError> {
    let tol = opts.event_tol.min(1e-4 * next.time);
    let mut out = Vec::new();
    if !fired.contains(&EventKind::ConvexityLost) && convexity_lost(next)?.is_some() {
        let (_, right) = refine(prev, next, h, tol, |s| Ok(convexity_lost(s)?.is_some()))?;
        let rep = convexity_lost(&right)?.expect("predicate holds at the right end");
        let w = rep.witness.expect("non-convex report carries a witness");
        out.push(Event::new(
            EventKind::ConvexityLost,
            right.time,
            &[
                ("x_mid", w.x_mid),
                ("y_end", w.y_end),
                ("gap", w.gap),
                ("curvature_sign_changes", rep.curvature_sign_changes as f64),
            ],
        ));
        fired.push(EventKind::ConvexityLost);
    }
    if !fired.contains(&EventKind::SelfIntersection) && crossed(next).is_some() {
        let (left, right) = refine(prev, next, h, tol, |s| Ok(crossed(s).is_some()))?;
        let (gap, x) = crossed(&right).expect("predicate holds at the right end");
        out.push(Event::new(
            EventKind::SelfIntersection,
            right.time,
            &[
                ("gap_before", left.gap().unwrap_or(f64::NAN)),
                ("gap", gap),
                ("seg_a", x.seg_a as f64),
                ("seg_b", x.seg_b as f64),
                ("x", x.point[0]),
                ("y", x.point[1]),
            ],
        ));
        fired.push(EventKind::SelfIntersection);
    }
    Ok(out)
}

fn terminal_event(err: &FlowError, t: f64) -> Option<Event> {
    match *err {
        FlowError::PinchOff { index, r } => Some(Event::new(EventKind::PinchOff, t, &[("index", index as f64), ("r", r)])),
        FlowError::DomainViolation { index, c } => {
            Some(Event::new(EventKind::DomainViolation, t, &[("index", index as f64), ("c", c)]))
        }
        _ => None,
    }
}

/// Steps `state` to `opts.t_end`, sampling diagnostics every
/// `opts.monitor_every` steps (and at the final time), remeshing when the
/// mesh degrades, and recording events with bisection-refined times.
pub fn run<O: Observer>(state: FlowState, opts: &RunOptions, observer: &mut O) -> Result<RunReport, FlowError> {
    opts.check()?;
    let diameter0 = state.geometry.diameter();
    let h_min = opts.h_min_rel * diameter0;
    let mut state = state;
    let mut series = Series {
        rows: Vec::new(),
        observer,
        pending_events: Vec::new(),
    };
    let mut events: Vec<Event> = Vec::new();
    let mut fired: Vec<EventKind> = Vec::new();
    let (mut remesh_count, mut substeps) = (0usize, 0u64);
    let mut terminated_by = None;
    series.sample(&state)?;
    let t_begin = state.time;
    let t_stop = opts.t_end;
    let n_outer = ((t_stop - t_begin) / opts.dt - 1e-9).ceil().max(0.0) as usize;
    'outer: for outer in 1..=n_outer {
        let t_target = if outer == n_outer { t_stop } else { t_begin + outer as f64 * opts.dt };
        let dt = t_target - state.time;
        let nsub = (dt / (opts.cfl * state.geometry.min_segment())).ceil().max(1.0) as u64;
        let h = dt / nsub as f64;
        for _ in 0..nsub {
            let next = match state.step(h) {
                Ok(s) => s,
                Err(e) => match terminal_event(&e, state.time + h) {
                    Some(ev) => {
                        series.pending_events.push(ev.kind.name().into());
                        terminated_by = Some(ev.kind);
                        events.push(ev);
                        break 'outer;
                    }
                    None => return Err(e),
                },
            };
            substeps += 1;
            let found = detect_events(&state, &next, h, opts, &mut fired)?;
            state = next;
            let stop = found.iter().any(|e| opts.stop_on.contains(&e.kind));
            for ev in found {
                series.pending_events.push(ev.kind.name().into());
                events.push(ev);
            }
            if stop {
                terminated_by = events.last().map(|e| e.kind);
                break 'outer;
            }
            if state.geometry.quality_ratio() > opts.remesh_ratio || state.geometry.min_segment() < h_min {
                state = state.remesh()?;
                remesh_count += 1;
            }
            if state.geometry.min_segment() < h_min || state.geometry.diameter() < 1e-3 * diameter0 {
                let ev = Event::new(
                    EventKind::Extinction,
                    state.time,
                    &[("diameter", state.geometry.diameter()), ("min_segment", state.geometry.min_segment())],
                );
                series.pending_events.push(ev.kind.name().into());
                terminated_by = Some(ev.kind);
                events.push(ev);
                break 'outer;
            }
        }
        state.time = t_target;
        series.observer.after_step(&mut state);
        if outer % opts.monitor_every == 0 {
            series.sample(&state)?;
        }
    }
    if series.rows.last().map(|r| r.time) != Some(state.time) {
        series.sample(&state)?;
    } else if let Some(r) = series.rows.last_mut() {
        r.events.append(&mut series.pending_events);
    }
    let rows = series.finish()?;
    Ok(RunReport {
        rows,
        events,
        final_state: state,
        remesh_count,
        substeps,
        terminated_by,
    })
}
