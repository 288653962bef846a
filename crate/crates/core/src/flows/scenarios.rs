//! Initial data: the convexity-loss barrel, the self-intersecting
//! figure with two balloons, and radially symmetric circles and spheres.

use std::f64::consts::PI;

use crate::density::EnergyDensity;
use crate::diagnostics::{find_self_intersection, ConvexityPlateaus};
use crate::meshgeom::stencil::{norm, rot_left};
use crate::meshgeom::{CurveMesh, GeneratingClosure, GeneratingCurve, Orientation, Point, ReferenceFrame};

use super::remesh::arc_locations;
use super::{FlowError, FlowState, Geometry, Monitor};

/// Points per piece of the dense polylines that get resampled.
const DENSE: usize = 6000;

pub const CONVEXITY_DELTA: f64 = 1e-6;

/// Quintic smoothstep `6t⁵ - 15t⁴ + 10t³` on `[0, 1]`, clamped outside.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (t * (6.0 * t - 15.0) + 10.0)
}

/// `C^∞` step with all derivatives vanishing at 0 and 1.
pub fn exp_step(t: f64) -> f64 {
    let e = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        e(t) / (e(t) + e(1.0 - t))
    }
}

fn lerp(a: Point, b: Point, f: f64) -> Point {
    [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]
}

fn check_parabolicity(density: &EnergyDensity, lo: f64, hi: f64) -> Result<(), FlowError> {
    let rep = density.check_parabolicity(lo, hi, 257)?;
    if !rep.holds() {
        return Err(FlowError::Config(format!(
            "parabolicity fails on [{lo}, {hi}]: min g = {}, min G'' = {}",
            rep.min_g, rep.min_second_derivative
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityScenarioParams {
    /// Increasing breakpoints `x0 < … < x5`, `x0 ≥ 1`.
    pub x: [f64; 6],
    pub c_inner: f64,
    pub c_outer: f64,
    /// Nodes of the generating curve, tips included.
    pub n: usize,
}

impl Default for ConvexityScenarioParams {
    fn default() -> Self {
        Self {
            x: [1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            c_inner: 1.0,
            c_outer: 2.0,
            n: 800,
        }
    }
}

impl ConvexityScenarioParams {
    fn check(&self) -> Result<(), FlowError> {
        let x = self.x;
        if !(x[0] >= 1.0) || x.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(FlowError::Config(format!("breakpoints must increase with x0 >= 1, got {x:?}")));
        }
        if !(0.0 < self.c_inner && self.c_inner < self.c_outer) {
            return Err(FlowError::Config("need 0 < c_inner < c_outer".into()));
        }
        if self.n < 16 {
            return Err(FlowError::Config(format!("need at least 16 nodes, got {}", self.n)));
        }
        Ok(())
    }

    /// Initial profile radius on `[x0 - 1, x5 + 1]`.
    pub fn w0(&self, x: f64) -> f64 {
        let (a, b) = (self.x[0], self.x[5]);
        let cap = |d: f64| (1.0 - d.powi(6)).max(0.0).powf(1.0 / 6.0);
        if x < a {
            cap(a - x)
        } else if x > b {
            cap(x - b)
        } else {
            1.0
        }
    }

    /// Initial concentration: outer plateaus, inner plateau, quintic blends.
    pub fn c0(&self, x: f64) -> f64 {
        let [_, x1, x2, x3, x4, _] = self.x;
        let (ci, co) = (self.c_inner, self.c_outer);
        if x <= x1 || x >= x4 {
            co
        } else if x < x2 {
            co + (ci - co) * smoothstep((x - x1) / (x2 - x1))
        } else if x <= x3 {
            ci
        } else {
            ci + (co - ci) * smoothstep((x - x3) / (x4 - x3))
        }
    }

    pub fn plateaus(&self) -> ConvexityPlateaus {
        let x = self.x;
        ConvexityPlateaus {
            ends: vec![(x[0], x[1]), (x[4], x[5])],
            middle: (x[2], x[3]),
            delta: CONVEXITY_DELTA,
        }
    }

    /// Dense polyline of the generating curve, tip to tip.
    fn dense_profile(&self) -> Vec<Point> {
        let (a, b) = (self.x[0], self.x[5]);
        // below the 45° point the cap is a graph over r, above it over x
        let knee = 0.5f64.powf(1.0 / 6.0);
        let m = DENSE;
        let mut pts = Vec::with_capacity(4 * m + m);
        for k in 0..m {
            let r = knee * k as f64 / m as f64;
            pts.push([a - (1.0 - r.powi(6)).powf(1.0 / 6.0), r]);
        }
        for k in 0..m {
            let x = a - knee + knee * k as f64 / m as f64;
            pts.push([x, self.w0(x)]);
        }
        let plateau = (m as f64 * (b - a)).ceil() as usize;
        for k in 0..plateau {
            pts.push([a + (b - a) * k as f64 / plateau as f64, 1.0]);
        }
        let left: Vec<Point> = pts.iter().take(2 * m).map(|p| [a + b - p[0], p[1]]).collect();
        pts.extend(left.into_iter().rev());
        pts.push([b + 1.0, 0.0]);
        pts
    }
}

/// Barrel of length `x5 - x0 + 2` with superellipse caps; the concentration
/// makes the middle shrink faster (`g_I > g_O`).
pub fn build_convexity_scenario(params: &ConvexityScenarioParams, density: EnergyDensity) -> Result<FlowState, FlowError> {
    params.check()?;
    check_parabolicity(&density, params.c_inner, params.c_outer)?;
    let g_i = density.scaling_factor(params.c_inner, 0)?;
    let g_o = density.scaling_factor(params.c_outer, 0)?;
    if !(g_i > g_o && g_o > 0.0) {
        return Err(FlowError::Config(format!("need g_I > g_O > 0, got g_I = {g_i}, g_O = {g_o}")));
    }
    let dense = params.dense_profile();
    let mut nodes: Vec<Point> = arc_locations(&dense, params.n, true)
        .into_iter()
        .map(|(k, f)| lerp(dense[k], dense[k + 1], f))
        .collect();
    let n = params.n;
    nodes[0] = dense[0];
    nodes[n - 1] = *dense.last().expect("dense profile is non-empty");
    let c = nodes.iter().map(|p| params.c0(p[0])).collect();
    let curve = GeneratingCurve::new(nodes, c, GeneratingClosure::Capped)?;
    Ok(FlowState::new(Geometry::Revolution(curve), density)?.with_monitor(Monitor::Convexity(params.plateaus())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfIntersectionScenarioParams {
    /// Radius of the doubly traversed reference arc.
    pub radius: f64,
    pub epsilon: f64,
    /// Constant initial height over the reference curve.
    pub rho0: f64,
    /// Concentration on the strand through `z_l`.
    pub c_left: f64,
    /// Concentration on the strand through `z_r`.
    pub c_right: f64,
    /// Node count (even).
    pub n: usize,
    /// Horizon by which the crossing must happen.
    pub t0: f64,
}

impl Default for SelfIntersectionScenarioParams {
    fn default() -> Self {
        Self {
            radius: 1.0,
            epsilon: 0.01,
            rho0: 1.0,
            c_left: 1.0,
            c_right: 2.0,
            n: 1024,
            t0: 0.5,
        }
    }
}

impl SelfIntersectionScenarioParams {
    /// `K = g(c_l) - g(c_r)`.
    pub fn speed_gap(&self, density: &EnergyDensity) -> Result<f64, FlowError> {
        Ok(density.scaling_factor(self.c_left, 0)? - density.scaling_factor(self.c_right, 0)?)
    }

    /// First-order crossing time `2ερ₀R/K`.
    pub fn predicted_crossing(&self, density: &EnergyDensity) -> Result<f64, FlowError> {
        Ok(2.0 * self.epsilon * self.rho0 * self.radius / self.speed_gap(density)?)
    }

    fn check(&self, density: &EnergyDensity) -> Result<f64, FlowError> {
        let (r, eps, rho0) = (self.radius, self.epsilon, self.rho0);
        if !(r > 0.0 && rho0 > 0.0 && self.t0 > 0.0) {
            return Err(FlowError::Config("radius, rho0 and t0 must be positive".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(FlowError::Config(format!("epsilon must lie in (0, 1), got {eps}")));
        }
        if self.n < 64 || self.n % 2 != 0 {
            return Err(FlowError::Config(format!("need an even node count >= 64, got {}", self.n)));
        }
        let (lo, hi) = (self.c_left.min(self.c_right), self.c_left.max(self.c_right));
        if lo < hi {
            check_parabolicity(density, lo, hi)?;
        }
        let k = self.speed_gap(density)?;
        if !(k > 0.0) {
            return Err(FlowError::Config(format!("need g(c_left) > g(c_right), got K = {k}")));
        }
        let g_r = density.scaling_factor(self.c_right, 0)?;
        let bound = (r / (2f64.sqrt() * rho0)).min(self.t0 * k * r / (8.0 * rho0 * (r * r + 2.0 * g_r)));
        if eps >= bound {
            return Err(FlowError::Config(format!("epsilon = {eps} too large, must stay below {bound}")));
        }
        Ok(k)
    }

    /// Dense samples `(F, c)` of the reference curve and the dense index of `z_r`.
    fn dense_reference(&self) -> (Vec<Point>, Vec<f64>, usize) {
        let r = self.radius;
        let xi_s = 0.5 * PI * r;
        let r_l = 0.5 * r;
        let centre = xi_s + r_l;
        let tube = |xi: f64, eta: f64| -> Point {
            let a = xi / r;
            [r - (r + eta) * a.cos(), (r + eta) * a.sin()]
        };
        let balloon = |phi: f64, sign: f64| -> Point {
            let xi = centre + r_l * phi.cos();
            let eta = exp_step((xi - xi_s) / r_l) * r_l * phi.sin();
            tube(sign * xi, eta)
        };
        let (cl, cr) = (self.c_left, self.c_right);
        let m = DENSE;
        let mut f = Vec::with_capacity(6 * m);
        let mut c = Vec::with_capacity(6 * m);
        let frac = |k: usize| k as f64 / m as f64;
        // pass A, upper half
        for k in 0..m {
            f.push(tube(xi_s * frac(k), 0.0));
            c.push(cl);
        }
        // top balloon, φ from π to -π
        for k in 0..2 * m {
            let u = k as f64 / (2 * m) as f64;
            f.push(balloon(PI - 2.0 * PI * u, 1.0));
            c.push(cl + (cr - cl) * smoothstep(u));
        }
        // pass B, down to z_r and on to the bottom balloon
        for k in 0..m {
            f.push(tube(xi_s * (1.0 - frac(k)), 0.0));
            c.push(cr);
        }
        let zr = f.len();
        for k in 0..m {
            f.push(tube(-xi_s * frac(k), 0.0));
            c.push(cr);
        }
        // bottom balloon, φ from -π to π
        for k in 0..2 * m {
            let u = k as f64 / (2 * m) as f64;
            f.push(balloon(-PI + 2.0 * PI * u, -1.0));
            c.push(cr + (cl - cr) * smoothstep(u));
        }
        // pass A, lower half back to z_l
        for k in 0..m {
            f.push(tube(-xi_s * (1.0 - frac(k)), 0.0));
            c.push(cl);
        }
        (f, c, zr)
    }
}

/// Curve at constant height `ερ₀` over an immersed reference curve whose
/// two strands through the origin carry different concentrations. Node 0
/// is `z_l`, node `N/2` is `z_r`.
pub fn build_self_intersection_scenario(
    params: &SelfIntersectionScenarioParams,
    density: EnergyDensity,
) -> Result<FlowState, FlowError> {
    params.check(&density)?;
    let (f, c, zr) = params.dense_reference();
    let m = f.len();
    let normals: Vec<Point> = (0..m)
        .map(|k| {
            let a = f[(k + m - 1) % m];
            let b = f[(k + 1) % m];
            let t = [b[0] - a[0], b[1] - a[1]];
            let l = norm(t);
            rot_left([t[0] / l, t[1] / l])
        })
        .collect();
    let h = params.epsilon * params.rho0;
    let p: Vec<Point> = f.iter().zip(&normals).map(|(f, n)| [f[0] + h * n[0], f[1] + h * n[1]]).collect();
    let half = params.n / 2;
    let mut nodes = Vec::with_capacity(params.n);
    let mut frames = Vec::with_capacity(params.n);
    let mut conc = Vec::with_capacity(params.n);
    for (start, end) in [(0, zr), (zr, m)] {
        // indices of the dense half, closing back to node 0 for the second
        let idx: Vec<usize> = (start..=end).map(|k| k % m).collect();
        let pts: Vec<Point> = idx.iter().map(|&k| p[k]).collect();
        for (j, t) in arc_locations(&pts, half, false) {
            let (a, b) = (idx[j], idx[j + 1]);
            nodes.push(lerp(p[a], p[b], t));
            let nu = lerp(normals[a], normals[b], t);
            let l = norm(nu);
            frames.push(ReferenceFrame {
                point: lerp(f[a], f[b], t),
                normal: [nu[0] / l, nu[1] / l],
            });
            conc.push(c[a] + t * (c[b] - c[a]));
        }
    }
    if let Some(x) = find_self_intersection(&nodes) {
        return Err(FlowError::Config(format!(
            "initial curve self-intersects (segments {} and {}); epsilon too large",
            x.seg_a, x.seg_b
        )));
    }
    let mesh = CurveMesh::new(nodes, Orientation::NormalLeftOfTangent, conc)?.with_reference(frames)?;
    Ok(FlowState::new(Geometry::Curve(mesh), density)?.with_monitor(Monitor::SelfIntersection { z_l: 0, z_r: half }))
}

/// Circle of radius `radius` carrying total mass `mass` uniformly.
pub fn build_circle_scenario(
    radius: f64,
    mass: f64,
    n: usize,
    orientation: Orientation,
    density: EnergyDensity,
) -> Result<FlowState, FlowError> {
    if !(radius > 0.0 && mass > 0.0) {
        return Err(FlowError::Config("radius and mass must be positive".into()));
    }
    let c = mass / (2.0 * PI * radius);
    let mesh = CurveMesh::circle([0.0, 0.0], radius, n, orientation, c)?;
    FlowState::new(Geometry::Curve(mesh), density)
}

/// Sphere of radius `radius` as a semicircular generating curve.
pub fn build_sphere_scenario(radius: f64, mass: f64, n: usize, density: EnergyDensity) -> Result<FlowState, FlowError> {
    if !(radius > 0.0 && mass > 0.0) {
        return Err(FlowError::Config("radius and mass must be positive".into()));
    }
    let nodes: Vec<Point> = (0..n)
        .map(|i| {
            let th = PI * i as f64 / (n - 1) as f64;
            let r = if i == 0 || i + 1 == n { 0.0 } else { radius * th.sin() };
            [-radius * th.cos(), r]
        })
        .collect();
    let c = mass / (4.0 * PI * radius * radius);
    let curve = GeneratingCurve::new(nodes, vec![c; n], GeneratingClosure::Capped)?;
    FlowState::new(Geometry::Revolution(curve), density)
}
