//! Conserved and monotone quantities of the coupled flow, evaluated on a
//! [`FlowState`], plus the event detectors used by the run loop.
//!
//! The continuum statements are strict (strict positivity, strict area
//! decrease); the tolerances used by [`check_invariants`] are engineering
//! choices and can be overridden.

mod intersect;

pub use intersect::{find_self_intersection, segments_intersect, SegmentCrossing};

use thiserror::Error;

use crate::flows::{FlowError, FlowState, Geometry};
use crate::meshgeom::{CurveMesh, GeneratingCurve, SurfaceMesh};

pub const RESIDUAL_FLOOR: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("need at least {need} rows, got {got}")]
    TooFewRows { need: usize, got: usize },
}

/// One sampled line of the run series.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub time: f64,
    pub mass: f64,
    pub energy: f64,
    pub area: f64,
    pub min_h: f64,
    pub max_h: f64,
    pub min_c: f64,
    /// `dE/dt` from differences of the sampled energy.
    pub dissipation_lhs: f64,
    /// `-(∫|∇G'(c)|² + ∫V²)` at the sample.
    pub dissipation_rhs: f64,
    pub events: Vec<String>,
}

impl DiagnosticsRow {
    pub const CSV_HEADER: &'static str = "t,mass,energy,area,min_H,max_H,min_c,diss_lhs,diss_rhs,events";

    /// One CSV line, 17 significant digits, events joined by `;`.
    pub fn to_csv(&self) -> String {
        let nums = [
            self.time,
            self.mass,
            self.energy,
            self.area,
            self.min_h,
            self.max_h,
            self.min_c,
            self.dissipation_lhs,
            self.dissipation_rhs,
        ];
        let mut line = nums
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(",");
        line.push(',');
        line.push_str(&self.events.join(";"));
        line
    }
}

fn mesh(state: &FlowState) -> &dyn SurfaceMesh {
    match &state.geometry {
        Geometry::Curve(m) => m,
        Geometry::Revolution(g) => g,
    }
}

/// `∫ c dA`.
pub fn mass(state: &FlowState) -> Result<f64, FlowError> {
    Ok(mesh(state).surface_integral(state.geometry.concentration())?)
}

/// `∫ G(c) dA`.
pub fn energy(state: &FlowState) -> Result<f64, FlowError> {
    let g: Vec<f64> = state
        .geometry
        .concentration()
        .iter()
        .map(|&c| state.density.evaluate(c, 0))
        .collect::<Result<_, _>>()?;
    Ok(mesh(state).surface_integral(&g)?)
}

/// Curve length or surface area.
pub fn area(state: &FlowState) -> Result<f64, FlowError> {
    Ok(mesh(state).area_elements()?.iter().sum())
}

pub fn min_mean_curvature(state: &FlowState) -> Result<f64, FlowError> {
    Ok(mesh(state).geometry()?.mean_curvature.into_iter().fold(f64::INFINITY, f64::min))
}

pub fn max_mean_curvature(state: &FlowState) -> Result<f64, FlowError> {
    Ok(mesh(state).geometry()?.mean_curvature.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

pub fn min_concentration(state: &FlowState) -> f64 {
    state.geometry.concentration().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Normal velocity `V = g(c)·H` at every node.
pub fn normal_velocity(state: &FlowState) -> Result<Vec<f64>, FlowError> {
    let fields = mesh(state).geometry()?;
    fields
        .mean_curvature
        .iter()
        .zip(state.geometry.concentration())
        .map(|(h, &c)| Ok(state.density.scaling_factor(c, 0)? * h))
        .collect()
}

/// `-(∫ |∇_Γ G'(c)|² dA + ∫ V² dA)`.
pub fn dissipation_rhs(state: &FlowState) -> Result<f64, FlowError> {
    let stencil = state.geometry.diffusion_stencil()?;
    let gp: Vec<f64> = state
        .geometry
        .concentration()
        .iter()
        .map(|&c| state.density.evaluate(c, 1))
        .collect::<Result<_, _>>()?;
    let v = normal_velocity(state)?;
    let kinetic: f64 = v.iter().zip(&stencil.lumped).map(|(v, a)| v * v * a).sum();
    Ok(-(stencil.dirichlet(&gp) + kinetic))
}

/// Samples every field of a row except `dissipation_lhs`, which needs
/// neighbouring samples (see [`fill_dissipation_lhs`]).
pub fn sample(state: &FlowState, events: Vec<String>) -> Result<DiagnosticsRow, FlowError> {
    let fields = mesh(state).geometry()?;
    let (min_h, max_h) = fields
        .mean_curvature
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &h| (lo.min(h), hi.max(h)));
    Ok(DiagnosticsRow {
        time: state.time,
        mass: mass(state)?,
        energy: energy(state)?,
        area: area(state)?,
        min_h,
        max_h,
        min_c: min_concentration(state),
        dissipation_lhs: 0.0,
        dissipation_rhs: dissipation_rhs(state)?,
        events,
    })
}

/// `dE/dt` at row `i`: three-point centred difference inside (second order
/// on non-uniform spacing too), one-sided at the ends.
pub fn energy_rate(rows: &[DiagnosticsRow], i: usize) -> f64 {
    let n = rows.len();
    if n < 2 {
        return 0.0;
    }
    let slope = |a: usize, b: usize| {
        let dt = rows[b].time - rows[a].time;
        if dt > 0.0 {
            (rows[b].energy - rows[a].energy) / dt
        } else {
            0.0
        }
    };
    if i == 0 {
        return slope(0, 1);
    }
    if i + 1 == n {
        return slope(n - 2, n - 1);
    }
    let h1 = rows[i].time - rows[i - 1].time;
    let h2 = rows[i + 1].time - rows[i].time;
    if !(h1 > 0.0 && h2 > 0.0) {
        return slope(i - 1, i + 1);
    }
    // weighted mean of the one-sided slopes
    (h2 * slope(i - 1, i) + h1 * slope(i, i + 1)) / (h1 + h2)
}

pub fn fill_dissipation_lhs(rows: &mut [DiagnosticsRow]) {
    for i in 0..rows.len() {
        rows[i].dissipation_lhs = energy_rate(rows, i);
    }
}

/// Largest relative mismatch `|dE/dt - rhs| / max(|rhs|, 1e-14)` over the
/// interior rows, with `dE/dt` from centred differences of the energy.
pub fn dissipation_residual(rows: &[DiagnosticsRow]) -> Result<f64, DiagnosticsError> {
    if rows.len() < 3 {
        return Err(DiagnosticsError::TooFewRows {
            need: 3,
            got: rows.len(),
        });
    }
    Ok((1..rows.len() - 1)
        .map(|i| {
            let rhs = rows[i].dissipation_rhs;
            (energy_rate(rows, i) - rhs).abs() / rhs.abs().max(RESIDUAL_FLOOR)
        })
        .fold(0.0, f64::max))
}

/// Axial ranges compared by the convexity monitor.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityPlateaus {
    /// End plateaus (outer concentration, slow shrinking).
    pub ends: Vec<(f64, f64)>,
    /// Middle plateau (inner concentration, fast shrinking).
    pub middle: (f64, f64),
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityWitness {
    pub x_mid: f64,
    pub y_end: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    pub convex: bool,
    /// `max_end w - min_mid w`, whether or not it exceeds `delta`.
    pub gap: f64,
    pub witness: Option<ConvexityWitness>,
    /// Sign changes of the profile curvature along the generating curve.
    pub curvature_sign_changes: usize,
}

/// A convex body of revolution cannot have an end-plateau radius above a
/// radius further in; `convex = false` as soon as the gap exceeds `delta`.
pub fn convexity_monitor(curve: &GeneratingCurve, plateaus: &ConvexityPlateaus) -> Result<ConvexityReport, FlowError> {
    let in_range = |x: f64, (a, b): (f64, f64)| x >= a && x <= b;
    let mut end = (f64::NEG_INFINITY, f64::NAN);
    let mut mid = (f64::INFINITY, f64::NAN);
    for p in &curve.nodes {
        if plateaus.ends.iter().any(|r| in_range(p[0], *r)) && p[1] > end.0 {
            end = (p[1], p[0]);
        }
        if in_range(p[0], plateaus.middle) && p[1] < mid.0 {
            mid = (p[1], p[0]);
        }
    }
    let gap = end.0 - mid.0;
    let convex = !(gap > plateaus.delta);
    let witness = (!convex).then_some(ConvexityWitness {
        x_mid: mid.1,
        y_end: end.1,
        gap,
    });
    let kappa: Vec<f64> = curve.local_frames()?.iter().map(|f| f.planar).collect();
    let scale = kappa.iter().fold(1.0f64, |m, k| m.max(k.abs()));
    let mut last = 0.0;
    let mut changes = 0;
    for k in kappa {
        if k.abs() <= 1e-6 * scale {
            continue;
        }
        if last != 0.0 && (k > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = k;
    }
    Ok(ConvexityReport {
        convex,
        gap,
        witness,
        curvature_sign_changes: changes,
    })
}

/// Self-crossing of a closed curve, if any.
pub fn detect_self_intersection(mesh: &CurveMesh) -> Option<SegmentCrossing> {
    find_self_intersection(&mesh.nodes)
}

/// Tolerances of the runtime invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantTolerances {
    pub mass_drift: f64,
    pub energy_increase: f64,
    pub min_c_decrease: f64,
    pub mean_convexity: f64,
    pub dissipation_residual: f64,
}

impl Default for InvariantTolerances {
    fn default() -> Self {
        Self {
            mass_drift: 1e-4,
            energy_increase: 1e-10,
            min_c_decrease: 1e-10,
            mean_convexity: 1e-8,
            dissipation_residual: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantVerdict {
    pub name: &'static str,
    pub passed: bool,
    /// Worst measured value of the monitored quantity.
    pub worst: f64,
}

/// Evaluates the runtime invariants over a sampled series.
///
/// Mean convexity is only checked when the first row has `min_H >= 0`,
/// positivity and the minimum growth only when `min c(0) >= 0`.
pub fn check_invariants(rows: &[DiagnosticsRow], tol: &InvariantTolerances) -> Vec<InvariantVerdict> {
    let mut out = Vec::new();
    let Some(first) = rows.first() else {
        return out;
    };
    let m0 = first.mass;
    let drift = rows
        .iter()
        .map(|r| (r.mass - m0).abs() / m0.abs().max(RESIDUAL_FLOOR))
        .fold(0.0, f64::max);
    out.push(InvariantVerdict {
        name: "mass_conservation",
        passed: drift <= tol.mass_drift,
        worst: drift,
    });
    let pairs = || rows.windows(2);
    let energy_up = pairs()
        .map(|w| (w[1].energy - w[0].energy) / w[0].energy.abs().max(RESIDUAL_FLOOR))
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(InvariantVerdict {
        name: "energy_non_increasing",
        passed: rows.len() < 2 || energy_up <= tol.energy_increase,
        worst: if rows.len() < 2 { 0.0 } else { energy_up },
    });
    let area_up = pairs()
        .map(|w| (w[1].area - w[0].area) / w[0].area)
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(InvariantVerdict {
        name: "area_strictly_decreasing",
        passed: rows.len() < 2 || area_up < 0.0,
        worst: if rows.len() < 2 { 0.0 } else { area_up },
    });
    if first.min_c >= 0.0 {
        let lowest = rows.iter().map(|r| r.min_c).fold(f64::INFINITY, f64::min);
        if first.min_c > 0.0 {
            out.push(InvariantVerdict {
                name: "positivity",
                passed: lowest > 0.0,
                worst: lowest,
            });
        }
        let drop = pairs()
            .map(|w| (w[0].min_c - w[1].min_c) / w[0].min_c.abs().max(1.0))
            .fold(0.0, f64::max);
        out.push(InvariantVerdict {
            name: "min_concentration_non_decreasing",
            passed: drop <= tol.min_c_decrease,
            worst: drop,
        });
    }
    if first.min_h >= 0.0 {
        let lowest = rows.iter().map(|r| r.min_h).fold(f64::INFINITY, f64::min);
        out.push(InvariantVerdict {
            name: "mean_convexity",
            passed: lowest >= -tol.mean_convexity,
            worst: lowest,
        });
    }
    if let Ok(res) = dissipation_residual(rows) {
        out.push(InvariantVerdict {
            name: "energy_dissipation_identity",
            passed: res <= tol.dissipation_residual,
            worst: res,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::EnergyDensity;
    use crate::meshgeom::{GeneratingClosure, Orientation};
    use std::f64::consts::PI;

    fn circle_state(density: EnergyDensity, c: f64, orientation: Orientation) -> FlowState {
        let m = CurveMesh::circle([0.0, 0.0], 1.0, 2048, orientation, c).unwrap();
        FlowState::new(Geometry::Curve(m), density).unwrap()
    }

    #[test]
    fn mass_and_energy_on_circle() {
        let s = circle_state(EnergyDensity::constant(1.0), 1.0, Orientation::NormalRightOfTangent);
        assert!((mass(&s).unwrap() - 2.0 * PI).abs() < 1e-4);
        assert!((energy(&s).unwrap() - area(&s).unwrap()).abs() < 1e-12);
        let s = circle_state(EnergyDensity::power_law(-2.0, 1.0).unwrap(), 1.0, Orientation::NormalRightOfTangent);
        assert!((energy(&s).unwrap() - 4.0 / 3.0 * 2.0 * PI).abs() < 1e-4);
    }

    #[test]
    fn cylinder_mass() {
        let n = 64;
        let nodes = (0..n).map(|i| [i as f64 / n as f64, 1.0]).collect();
        let g = GeneratingCurve::new(nodes, vec![2.0; n], GeneratingClosure::Periodic { period: 1.0 }).unwrap();
        let s = FlowState::new(Geometry::Revolution(g), EnergyDensity::constant(1.0)).unwrap();
        assert!((mass(&s).unwrap() - 4.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn inward_circle_is_mean_convex() {
        let s = circle_state(EnergyDensity::constant(1.0), 1.0, Orientation::NormalLeftOfTangent);
        assert!((min_mean_curvature(&s).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn stationary_series_has_zero_residual() {
        let row = |t: f64| DiagnosticsRow {
            time: t,
            mass: 1.0,
            energy: 2.0,
            area: 3.0,
            min_h: 0.0,
            max_h: 0.0,
            min_c: 1.0,
            dissipation_lhs: 0.0,
            dissipation_rhs: 0.0,
            events: vec![],
        };
        let rows = vec![row(0.0), row(0.1), row(0.2)];
        assert_eq!(dissipation_residual(&rows).unwrap(), 0.0);
        assert!(dissipation_residual(&rows[..2]).is_err());
    }

    #[test]
    fn csv_row_format() {
        let r = DiagnosticsRow {
            time: 0.5,
            mass: 1.0,
            energy: 2.0,
            area: 3.0,
            min_h: -1.0,
            max_h: 1.0,
            min_c: 0.25,
            dissipation_lhs: -0.1,
            dissipation_rhs: -0.1,
            events: vec!["convexity_lost".into()],
        };
        let line = r.to_csv();
        assert!(line.starts_with("5.0000000000000000e-1,"));
        assert!(line.ends_with(",convexity_lost"));
        assert_eq!(line.split(',').count(), DiagnosticsRow::CSV_HEADER.split(',').count());
    }

    fn profile(w_mid: f64) -> GeneratingCurve {
        // flat-ended barrel on [0, 7] with plateau value 1 and a middle dip
        let n = 141;
        let mut nodes = Vec::with_capacity(n + 2);
        nodes.push([0.0, 0.0]);
        for i in 0..n {
            let x = 0.25 + 6.5 * i as f64 / (n - 1) as f64;
            let dip = if (2.5..=4.5).contains(&x) { 1.0 - w_mid } else { 0.0 };
            nodes.push([x, 1.0 - dip]);
        }
        nodes.push([7.0, 0.0]);
        let c = vec![1.0; nodes.len()];
        GeneratingCurve::new(nodes, c, GeneratingClosure::Capped).unwrap()
    }

    #[test]
    fn convexity_monitor_cases() {
        let p = ConvexityPlateaus {
            ends: vec![(1.0, 2.0), (5.0, 6.0)],
            middle: (3.0, 4.0),
            delta: 1e-6,
        };
        assert!(convexity_monitor(&profile(1.0), &p).unwrap().convex);
        let dipped = convexity_monitor(&profile(0.75), &p).unwrap();
        assert!(!dipped.convex);
        let w = dipped.witness.unwrap();
        assert!((w.gap - 0.25).abs() < 1e-12);
        assert!(dipped.curvature_sign_changes >= 2);

        // sphere: the poles lie below the equator
        let n = 101;
        let nodes: Vec<_> = (0..n)
            .map(|i| {
                let th = PI * i as f64 / (n - 1) as f64;
                let r = if i == 0 || i + 1 == n { 0.0 } else { th.sin() };
                [-th.cos(), r]
            })
            .collect();
        let s = GeneratingCurve::new(nodes, vec![1.0; n], GeneratingClosure::Capped).unwrap();
        let q = ConvexityPlateaus {
            ends: vec![(-0.9, -0.6), (0.6, 0.9)],
            middle: (-0.2, 0.2),
            delta: 1e-6,
        };
        let rep = convexity_monitor(&s, &q).unwrap();
        assert!(rep.convex);
        assert_eq!(rep.curvature_sign_changes, 0);
    }
}
