//! One semi-implicit step: purely normal marker motion followed by a
//! conservative implicit update of the concentration.

use crate::density::EnergyDensity;
use crate::linalg::{solve_cyclic_tridiagonal, solve_tridiagonal};
use crate::meshgeom::{CurveMesh, DiffusionStencil, GeneratingCurve, MeshError, Point};
use crate::meshgeom::stencil::{dot, three_point};

use super::FlowError;

const NEWTON_MAX_ITER: usize = 60;
const NEWTON_TOL: f64 = 1e-13;

/// Per-node data for the normal-displacement system.
struct Row {
    h_prev: f64,
    h_next: f64,
    normal: Point,
    mean_curvature: f64,
    /// Weight of the implicit in-plane curvature in `H` (2 at axis tips).
    implicit: f64,
}

fn scaling(density: &EnergyDensity, c: &[f64]) -> Result<Vec<f64>, FlowError> {
    c.iter()
        .enumerate()
        .map(|(i, &ci)| {
            density
                .scaling_factor(ci, 0)
                .map_err(|_| FlowError::DomainViolation { index: i, c: ci })
        })
        .collect()
}

/// Solves `δ_i - dt·g_i·m_i·ν_i·D²(δν)_i = dt·g_i·H_i` for the normal
/// displacement. `nb_dot[i] = (ν_i·ν_{i-1}, ν_i·ν_{i+1})`.
fn normal_displacement(
    rows: &[Row],
    nb_dot: &[(f64, f64)],
    g: &[f64],
    dt: f64,
    cyclic: bool,
    mirrored_tips: bool,
) -> Result<Vec<f64>, FlowError> {
    let n = rows.len();
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for (i, r) in rows.iter().enumerate() {
        let k = dt * g[i] * r.implicit * 2.0 / (r.h_prev + r.h_next);
        diag[i] = 1.0 + k * (1.0 / r.h_prev + 1.0 / r.h_next);
        let lo = -k * nb_dot[i].0 / r.h_prev;
        let up = -k * nb_dot[i].1 / r.h_next;
        rhs[i] = dt * g[i] * r.mean_curvature;
        if mirrored_tips && i == 0 {
            upper[i] = lo + up;
        } else if mirrored_tips && i + 1 == n {
            lower[i] = lo + up;
        } else {
            lower[i] = lo;
            upper[i] = up;
        }
    }
    let sol = if cyclic {
        solve_cyclic_tridiagonal(&lower, &diag, &upper, &rhs)
    } else {
        solve_tridiagonal(&lower, &diag, &upper, &rhs)
    };
    sol.map_err(|e| FlowError::Solver(e.to_string()))
}

pub(crate) fn step_curve(
    mesh: &CurveMesh,
    density: &EnergyDensity,
    dt: f64,
) -> Result<CurveMesh, FlowError> {
    let n = mesh.len();
    let g = scaling(density, &mesh.concentration)?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let tp = three_point(mesh.nodes[(i + n - 1) % n], mesh.nodes[i], mesh.nodes[(i + 1) % n], (i + n - 1) % n)?;
        let nu = mesh.orientation.normal_of(tp.tangent);
        rows.push(Row {
            h_prev: tp.h_prev,
            h_next: tp.h_next,
            normal: nu,
            mean_curvature: dot(tp.second, nu),
            implicit: 1.0,
        });
    }
    let nb_dot: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let nu = rows[i].normal;
            (dot(nu, rows[(i + n - 1) % n].normal), dot(nu, rows[(i + 1) % n].normal))
        })
        .collect();
    let delta = normal_displacement(&rows, &nb_dot, &g, dt, true, false)?;
    let old_area = mesh.diffusion_stencil()?.lumped;
    let mut out = mesh.clone();
    for (i, p) in out.nodes.iter_mut().enumerate() {
        p[0] += delta[i] * rows[i].normal[0];
        p[1] += delta[i] * rows[i].normal[1];
    }
    out.validate()?;
    let stencil = out.diffusion_stencil()?;
    out.concentration = update_concentration(&mesh.concentration, &old_area, &stencil, density, dt)?;
    Ok(out)
}

pub(crate) fn step_generating(
    curve: &GeneratingCurve,
    density: &EnergyDensity,
    dt: f64,
) -> Result<GeneratingCurve, FlowError> {
    let n = curve.len();
    let g = scaling(density, &curve.concentration)?;
    let frames = curve.local_frames()?;
    let capped = curve.is_capped();
    let rows: Vec<Row> = frames
        .iter()
        .enumerate()
        .map(|(i, f)| Row {
            h_prev: f.h_prev,
            h_next: f.h_next,
            normal: f.normal,
            mean_curvature: f.mean_curvature,
            implicit: if capped && (i == 0 || i + 1 == n) { 2.0 } else { 1.0 },
        })
        .collect();
    let nb_dot: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let nu = rows[i].normal;
            if capped && i == 0 {
                let d = dot(nu, rows[1].normal);
                (d, d)
            } else if capped && i + 1 == n {
                let d = dot(nu, rows[n - 2].normal);
                (d, d)
            } else {
                (dot(nu, rows[(i + n - 1) % n].normal), dot(nu, rows[(i + 1) % n].normal))
            }
        })
        .collect();
    let delta = normal_displacement(&rows, &nb_dot, &g, dt, !capped, capped)?;
    let old_area = curve.diffusion_stencil()?.lumped;
    let mut out = curve.clone();
    for (i, p) in out.nodes.iter_mut().enumerate() {
        p[0] += delta[i] * rows[i].normal[0];
        p[1] += delta[i] * rows[i].normal[1];
    }
    if capped {
        out.nodes[0][1] = 0.0;
        out.nodes[n - 1][1] = 0.0;
    }
    out.validate().map_err(|e| match e {
        MeshError::PinchOff { index, w } => FlowError::PinchOff { index, r: w },
        other => other.into(),
    })?;
    let stencil = out.diffusion_stencil()?;
    out.concentration = update_concentration(&curve.concentration, &old_area, &stencil, density, dt)?;
    Ok(out)
}

/// Newton solve of `A' c' - dt·K·G'(c') = A c`, `K` the stiffness of the
/// new mesh. Columns of `K` sum to zero, so `Σ A' c' = Σ A c` exactly.
pub(crate) fn update_concentration(
    c_old: &[f64],
    area_old: &[f64],
    stencil: &DiffusionStencil,
    density: &EnergyDensity,
    dt: f64,
) -> Result<Vec<f64>, FlowError> {
    if dt == 0.0 {
        return Ok(c_old.to_vec());
    }
    let n = c_old.len();
    let range = density.valid_range();
    let mass_old: Vec<f64> = c_old.iter().zip(area_old).map(|(c, a)| c * a).collect();
    let mut c: Vec<f64> = mass_old
        .iter()
        .zip(&stencil.lumped)
        .map(|(m, a)| m / a)
        .collect();
    if let Some(i) = c.iter().position(|x| !range.contains(*x)) {
        return Err(FlowError::DomainViolation { index: i, c: c[i] });
    }
    let cyclic = stencil.closed;
    for _ in 0..NEWTON_MAX_ITER {
        let mut gp = Vec::with_capacity(n);
        let mut gpp = Vec::with_capacity(n);
        for &ci in &c {
            gp.push(density.evaluate(ci, 1)?);
            gpp.push(density.evaluate(ci, 2)?);
        }
        let flux = stencil.apply_stiffness(&gp);
        let residual: Vec<f64> = (0..n)
            .map(|i| stencil.lumped[i] * c[i] - dt * flux[i] - mass_old[i])
            .collect();
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut diag = stencil.lumped.clone();
        for (j, w) in stencil.weights.iter().enumerate() {
            let (a, b) = stencil.edge(j);
            let k = dt * w;
            diag[a] += k * gpp[a];
            diag[b] += k * gpp[b];
            // b = a + 1 (mod n): row a couples to c_b, row b to c_a
            upper[a] = -k * gpp[b];
            lower[b] = -k * gpp[a];
        }
        let rhs: Vec<f64> = residual.iter().map(|r| -r).collect();
        let step = if cyclic {
            solve_cyclic_tridiagonal(&lower, &diag, &upper, &rhs)
        } else {
            solve_tridiagonal(&lower, &diag, &upper, &rhs)
        }
        .map_err(|e| FlowError::Solver(e.to_string()))?;
        let mut lambda = 1.0;
        let trial = loop {
            let t: Vec<f64> = c.iter().zip(&step).map(|(c, d)| c + lambda * d).collect();
            if t.iter().all(|x| x.is_finite() && range.contains(*x)) {
                break t;
            }
            lambda *= 0.5;
            if lambda < 1e-6 {
                let i = t.iter().position(|x| !range.contains(*x)).unwrap_or(0);
                return Err(FlowError::DomainViolation { index: i, c: t[i] });
            }
        };
        let size = c.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
        let change = step.iter().fold(0.0f64, |m, x| m.max(x.abs())) * lambda;
        c = trial;
        if change <= NEWTON_TOL * size {
            return Ok(c);
        }
    }
    Err(FlowError::Solver("concentration Newton iteration did not converge".into()))
}
