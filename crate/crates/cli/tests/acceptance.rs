//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p smcf-cli --test acceptance`.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use smcf_cli::{execute, RunConfig, EXIT_CONFIG, EXIT_INVARIANT};
use smcf_core::diagnostics::dissipation_residual;
use smcf_core::flows::{
    build_circle_scenario, build_convexity_scenario, build_self_intersection_scenario, ConvexityScenarioParams,
    SelfIntersectionScenarioParams,
};
use smcf_core::meshgeom::{
    curve_geometry, CurveMesh, GeneratingClosure, GeneratingCurve, Orientation, Point, SurfaceMesh,
};
use smcf_core::radial::{extinction_time, solve_radial, ExtinctionStatus};
use smcf_core::{run, EnergyDensity, EventKind, Geometry, RunOptions, ValidRange};

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn power(s: f64, alpha: f64) -> EnergyDensity {
    EnergyDensity::power_law(s, alpha).unwrap()
}

// 1 ---------------------------------------------------------------------

fn radial_oracle() -> Verdict {
    let d1 = EnergyDensity::constant(1.0);
    let mut worst_r = 0.0f64;
    let mut worst_t = 0.0f64;
    for d in [1u32, 2] {
        let t_ext = 1.0 / (2.0 * d as f64);
        let m = if d == 1 { 2.0 * PI } else { 4.0 * PI };
        let traj = solve_radial(&d1, m, d, 1.0, 0.95 * t_ext, t_ext / 200.0).map_err(|e| e.to_string())?;
        for &(t, r) in &traj.samples {
            worst_r = worst_r.max((r - (1.0 - 2.0 * d as f64 * t).sqrt()).abs());
        }
        let ext = extinction_time(&d1, m, d, 1.0).map_err(|e| e.to_string())?;
        match ext.status {
            ExtinctionStatus::Finite(t) => worst_t = worst_t.max((t - t_ext).abs()),
            ExtinctionStatus::Divergent => return Err(format!("d = {d}: extinction reported divergent")),
        }
    }
    check(
        worst_r <= 1e-6 && worst_t <= 1e-8,
        format!("max |R - sqrt(1 - 2dt)| = {worst_r:.2e}, max |T - 1/(2d)| = {worst_t:.2e}"),
    )
}

// 2 ---------------------------------------------------------------------

/// The power law `c^s/(1-s) + c` supplied as a tabulated density, which
/// forces the generic quadrature path.
fn tabulated_power(s: f64) -> EnergyDensity {
    EnergyDensity::tabulated(format!("power {s}"), ValidRange::new(1e-12, f64::INFINITY), move |c, k| match k {
        0 => c.powf(s) / (1.0 - s) + c,
        1 => s / (1.0 - s) * c.powf(s - 1.0) + 1.0,
        2 => -s * c.powf(s - 2.0),
        _ => -s * (s - 2.0) * c.powf(s - 3.0),
    })
    .unwrap()
}

fn infinite_lifetime() -> Verdict {
    let mut wrong = Vec::new();
    for s in [-3.0, -2.5, -2.1, -2.0, -1.9, -1.5, -1.0] {
        let expect_divergent = s + 2.0 <= 0.0;
        for (label, dens) in [("closed form", power(s, 1.0)), ("quadrature", tabulated_power(s))] {
            let got = extinction_time(&dens, 2.0 * PI, 1, 1.0).map_err(|e| format!("s = {s}: {e}"))?;
            let divergent = got.status == ExtinctionStatus::Divergent;
            if divergent != expect_divergent {
                wrong.push(format!("s = {s} ({label})"));
            }
            if let (ExtinctionStatus::Finite(t), false) = (got.status, expect_divergent) {
                // c = 1/R, g = R^{-s}: T = ∫ z^{1+s} dz = 1/(s+2)
                let exact = 1.0 / (s + 2.0);
                if (t - exact).abs() > 1e-6 * exact {
                    wrong.push(format!("s = {s} ({label}): T = {t}, expected {exact}"));
                }
            }
        }
    }
    check(
        wrong.is_empty(),
        if wrong.is_empty() {
            "divergent exactly for s <= -2, finite T = 1/(s+2) otherwise, both code paths".into()
        } else {
            format!("mismatches: {}", wrong.join(", "))
        },
    )
}

// 3 ---------------------------------------------------------------------

fn full_vs_radial() -> Verdict {
    let m = 2.0 * PI;
    let state = build_circle_scenario(1.0, m, 512, Orientation::NormalLeftOfTangent, power(-1.0, 1.0)).map_err(|e| e.to_string())?;
    let opts = RunOptions {
        t_end: 0.5,
        dt: 2.5e-4,
        monitor_every: 200,
        ..Default::default()
    };
    let rep = run(state, &opts, &mut ()).map_err(|e| e.to_string())?;
    let Geometry::Curve(mesh) = &rep.final_state.geometry else {
        return Err("wrong geometry".into());
    };
    // g(c) = 1/c = R, so R' = -1
    let r_exact = 1.0 - 0.5;
    let r_ode = solve_radial(&power(-1.0, 1.0), m, 1, 1.0, 0.5, 0.5).map_err(|e| e.to_string())?.samples.last().unwrap().1;
    let r_err = mesh
        .nodes
        .iter()
        .map(|p| (p[0].hypot(p[1]) - r_exact).abs() / r_exact)
        .fold(0.0, f64::max);
    let c_exact = m / (2.0 * PI) / r_exact;
    let c_err = mesh.concentration.iter().map(|c| (c - c_exact).abs() / c_exact).fold(0.0, f64::max);
    check(
        r_err <= 1e-3 && c_err <= 1e-3 && (r_ode - r_exact).abs() < 1e-9,
        format!("radius rel. error {r_err:.2e}, concentration rel. error {c_err:.2e}"),
    )
}

// 4 and 5 -----------------------------------------------------------------

struct ConvexityRun {
    rows: Vec<smcf_core::diagnostics::DiagnosticsRow>,
    events: Vec<smcf_core::Event>,
}

fn convexity_run(n: usize) -> Result<ConvexityRun, String> {
    let p = ConvexityScenarioParams { n, ..Default::default() };
    let state = build_convexity_scenario(&p, power(-1.0, 1.0)).map_err(|e| e.to_string())?;
    // dt ∝ h and a fixed sampling cadence in steps
    let opts = RunOptions {
        t_end: 0.05,
        dt: 1e-4 * 800.0 / n as f64,
        monitor_every: 25,
        ..Default::default()
    };
    let rep = run(state, &opts, &mut ()).map_err(|e| e.to_string())?;
    Ok(ConvexityRun {
        rows: rep.rows,
        events: rep.events,
    })
}

fn conservation_suite(coarse: &ConvexityRun, fine: &ConvexityRun) -> Verdict {
    let rows = &coarse.rows;
    let m0 = rows[0].mass;
    let drift = rows.iter().map(|r| (r.mass - m0).abs() / m0).fold(0.0, f64::max);
    let energy_ok = rows.windows(2).all(|w| w[1].energy <= w[0].energy + 1e-10 * w[0].energy.abs());
    let area_ok = rows.windows(2).all(|w| w[1].area < w[0].area);
    let min_c_ok = rows.windows(2).all(|w| w[1].min_c >= w[0].min_c - 1e-10);
    let res = dissipation_residual(rows).map_err(|e| e.to_string())?;
    let res_fine = dissipation_residual(&fine.rows).map_err(|e| e.to_string())?;
    check(
        drift <= 1e-4 && energy_ok && area_ok && min_c_ok && res <= 0.05 && res_fine < res,
        format!(
            "mass drift {drift:.1e}, energy non-increasing {energy_ok}, area decreasing {area_ok}, \
             min c non-decreasing {min_c_ok}, residual {res:.2e} (N = 800) -> {res_fine:.2e} (N = 1600)"
        ),
    )
}

fn convexity_loss(r: &ConvexityRun) -> Verdict {
    let Some(ev) = r.events.iter().find(|e| e.kind == EventKind::ConvexityLost) else {
        return Err("no convexity_lost event".into());
    };
    let t = ev.t_event;
    let gap = ev.payload["gap"];
    // g(c) = 1/c
    let (g_i, g_o) = (1.0 / 1.0, 1.0 / 2.0);
    let bound = 0.5 * (g_i - g_o) * t;
    check(
        t > 0.0 && t <= 0.05 && gap >= bound,
        format!("t* = {t:.3e}, witness gap {gap:.3e} >= {bound:.3e}"),
    )
}

// 6 ---------------------------------------------------------------------

fn self_intersection() -> Verdict {
    let p = SelfIntersectionScenarioParams::default();
    let dens = power(-1.0, 1.0);
    let g = |c: f64| 1.0 / c;
    let k = g(p.c_left) - g(p.c_right);
    let predicted = 2.0 * p.epsilon * p.rho0 * p.radius / k;
    let state = build_self_intersection_scenario(&p, dens).map_err(|e| e.to_string())?;
    let opts = RunOptions {
        t_end: p.t0,
        dt: 1e-4,
        monitor_every: 50,
        stop_on: vec![EventKind::SelfIntersection],
        ..Default::default()
    };
    let rep = run(state, &opts, &mut ()).map_err(|e| e.to_string())?;
    let Some(ev) = rep.events.iter().find(|e| e.kind == EventKind::SelfIntersection) else {
        return Err("no self_intersection event".into());
    };
    let t1 = ev.t_event;
    let (before, after) = (ev.payload["gap_before"], ev.payload["gap"]);
    let ratio = t1 / predicted;
    check(
        t1 > 0.0 && t1 < p.t0 && (0.5..=2.0).contains(&ratio) && before > 0.0 && after <= 0.0,
        format!("T1 = {t1:.4e}, predicted {predicted:.4e} (ratio {ratio:.3}), gap {before:.2e} -> {after:.2e}"),
    )
}

// 7 ---------------------------------------------------------------------

fn order(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| w[0] / w[1]).collect()
}

fn max_err(a: &[f64], b: &[f64], skip: impl Fn(usize) -> bool) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .filter(|(i, _)| !skip(*i))
        .map(|(_, (x, y))| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Periodic surface of revolution `r(x) = 1 + 0.3 cos x`.
fn wavy(x: f64) -> (f64, f64, f64) {
    (1.0 + 0.3 * x.cos(), -0.3 * x.sin(), -0.3 * x.cos())
}

fn wavy_curve(n: usize) -> GeneratingCurve {
    let nodes: Vec<Point> = (0..n)
        .map(|i| {
            let x = 2.0 * PI * i as f64 / n as f64;
            [x, wavy(x).0]
        })
        .collect();
    GeneratingCurve::new(nodes, vec![1.0; n], GeneratingClosure::Periodic { period: 2.0 * PI }).unwrap()
}

/// Mean curvature and `Δ cos x` on the wavy surface, from the graph formulas.
fn wavy_exact(x: f64) -> (f64, f64) {
    let (r, rp, rpp) = wavy(x);
    let s = (1.0 + rp * rp).sqrt();
    let h = rpp / (s * s * s) - 1.0 / (r * s);
    let (f1, f2) = (-x.sin(), -x.cos());
    let sp = rp * rpp / s;
    let dq = (rp * f1 + r * f2) / s - r * f1 * sp / (s * s);
    (h, dq / (r * s))
}

fn ellipse(n: usize) -> CurveMesh {
    let nodes: Vec<Point> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [2.0 * t.cos(), t.sin()]
        })
        .collect();
    CurveMesh::new(nodes, Orientation::NormalRightOfTangent, vec![1.0; n]).unwrap()
}

fn graded_circle(n: usize) -> (CurveMesh, Vec<f64>) {
    let theta: Vec<f64> = (0..n)
        .map(|i| {
            let u = i as f64 / n as f64;
            2.0 * PI * u + 0.15 * (2.0 * PI * u).sin()
        })
        .collect();
    let nodes = theta.iter().map(|t| [t.cos(), t.sin()]).collect();
    let f = theta.iter().map(|t| (2.0 * t).cos()).collect();
    (CurveMesh::new(nodes, Orientation::NormalRightOfTangent, vec![1.0; n]).unwrap(), f)
}

fn convergence() -> Verdict {
    let sizes = [64usize, 128, 256, 512];
    let mut curve_h = Vec::new();
    let mut curve_lb = Vec::new();
    let mut rev_h = Vec::new();
    let mut rev_lb = Vec::new();
    for &n in &sizes {
        let e = ellipse(n);
        let h = curve_geometry(&e).unwrap().mean_curvature;
        let exact: Vec<f64> = (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                -2.0 / (4.0 * t.sin().powi(2) + t.cos().powi(2)).powf(1.5)
            })
            .collect();
        curve_h.push(max_err(&h, &exact, |_| false));

        let (c, f) = graded_circle(n);
        let lb = c.laplace_beltrami(&f).unwrap();
        let exact: Vec<f64> = f.iter().map(|v| -4.0 * v).collect();
        curve_lb.push(max_err(&lb, &exact, |_| false));

        let g = wavy_curve(n);
        let xs: Vec<f64> = g.nodes.iter().map(|p| p[0]).collect();
        let h = g.geometry().unwrap().mean_curvature;
        let f: Vec<f64> = xs.iter().map(|x| x.cos()).collect();
        let lb = g.laplace_beltrami(&f).unwrap();
        let (eh, elb): (Vec<f64>, Vec<f64>) = xs.iter().map(|&x| wavy_exact(x)).unzip();
        rev_h.push(max_err(&h, &eh, |_| false));
        rev_lb.push(max_err(&lb, &elb, |_| false));
    }
    let groups = [
        ("curve H", order(&curve_h)),
        ("curve LB", order(&curve_lb)),
        ("axisymmetric H", order(&rev_h)),
        ("axisymmetric LB", order(&rev_lb)),
    ];
    let ok = groups.iter().all(|(_, r)| r.iter().all(|q| (3.5..=4.5).contains(q)));
    let detail = groups
        .iter()
        .map(|(name, r)| format!("{name} {}", r.iter().map(|q| format!("{q:.2}")).collect::<Vec<_>>().join("/")))
        .collect::<Vec<_>>()
        .join(", ");
    check(ok, format!("error ratios {detail}"))
}

// 8 ---------------------------------------------------------------------

/// Brute-force cotangent Laplacian of `f` on a triangulated surface, with
/// barycentric (one third) vertex areas.
fn cotan_laplacian(verts: &[[f64; 3]], tris: &[[usize; 3]], f: &[f64]) -> Vec<f64> {
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cross = |a: [f64; 3], b: [f64; 3]| [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let n = verts.len();
    let mut acc = vec![0.0; n];
    let mut area = vec![0.0; n];
    for t in tris {
        let p = [verts[t[0]], verts[t[1]], verts[t[2]]];
        let twice = {
            let c = cross(sub(p[1], p[0]), sub(p[2], p[0]));
            dot(c, c).sqrt()
        };
        for k in 0..3 {
            area[t[k]] += twice / 6.0;
            // angle at corner k is opposite edge (k+1, k+2)
            let (a, b) = ((k + 1) % 3, (k + 2) % 3);
            let u = sub(p[a], p[k]);
            let v = sub(p[b], p[k]);
            let cot = dot(u, v) / dot(cross(u, v), cross(u, v)).sqrt();
            let w = 0.5 * cot;
            acc[t[a]] += w * (f[t[b]] - f[t[a]]);
            acc[t[b]] += w * (f[t[a]] - f[t[b]]);
        }
    }
    acc.iter().zip(&area).map(|(a, m)| a / m).collect()
}

/// Rings of `m` vertices at the given `(x, r)` profile points, every quad
/// split along the same diagonal. Optional pole vertices close the ends.
fn revolve(profile: &[Point], m: usize, poles: Option<(Point, Point)>) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let rings = profile.len();
    let mut verts = Vec::new();
    for p in profile {
        for j in 0..m {
            let phi = 2.0 * PI * j as f64 / m as f64;
            verts.push([p[0], p[1] * phi.cos(), p[1] * phi.sin()]);
        }
    }
    let id = |i: usize, j: usize| i * m + j % m;
    let mut tris = Vec::new();
    for i in 0..rings - 1 {
        for j in 0..m {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    if let Some((south, north)) = poles {
        let s = verts.len();
        verts.push([south[0], 0.0, 0.0]);
        let nn = verts.len();
        verts.push([north[0], 0.0, 0.0]);
        for j in 0..m {
            tris.push([s, id(0, j + 1), id(0, j)]);
            tris.push([nn, id(rings - 1, j), id(rings - 1, j + 1)]);
        }
    }
    (verts, tris)
}

/// Largest deviation over the listed rings of the 3-D
/// operator from the per-ring value `reference[i]`.
fn ring_mismatch(lb3: &[f64], m: usize, rings: impl Iterator<Item = (usize, f64)>) -> (f64, f64) {
    let mut err = 0.0f64;
    let mut scale = 0.0f64;
    for (ring, reference) in rings {
        for v in &lb3[ring * m..(ring + 1) * m] {
            err = err.max((v - reference).abs());
            scale = scale.max(v.abs());
        }
    }
    (err, scale)
}

fn cotangent_oracle() -> Verdict {
    // wavy periodic surface, f = cos x; the 3-D band is one period padded
    // by a few rings on each side so every compared ring is interior
    let n = 128;
    let g = wavy_curve(n);
    let f1: Vec<f64> = g.nodes.iter().map(|p| p[0].cos()).collect();
    let lb1 = g.laplace_beltrami(&f1).unwrap();
    let pad = 4;
    let band: Vec<Point> = (0..n + 2 * pad)
        .map(|k| {
            let x = 2.0 * PI * (k as f64 - pad as f64) / n as f64;
            [x, wavy(x).0]
        })
        .collect();
    let m = 512;
    let (verts, tris) = revolve(&band, m, None);
    let f3: Vec<f64> = verts.iter().map(|v| v[0].cos()).collect();
    let lb3 = cotan_laplacian(&verts, &tris, &f3);
    let (err, scale) = ring_mismatch(&lb3, m, (0..n).map(|i| (i + pad, lb1[i])));
    let err_wavy = err / scale;

    // unit sphere, f = cos x, compared on the cap with polar angle in [π/6, 5π/6]
    let k = 161;
    let th: Vec<f64> = (0..k).map(|i| PI * i as f64 / (k - 1) as f64).collect();
    let nodes: Vec<Point> = th
        .iter()
        .enumerate()
        .map(|(i, t)| [-t.cos(), if i == 0 || i + 1 == k { 0.0 } else { t.sin() }])
        .collect();
    let sphere = GeneratingCurve::new(nodes.clone(), vec![1.0; k], GeneratingClosure::Capped).unwrap();
    let fs: Vec<f64> = nodes.iter().map(|p| p[0].cos()).collect();
    let lbs = sphere.laplace_beltrami(&fs).unwrap();
    let m = 640;
    let (verts, tris) = revolve(&nodes[1..k - 1], m, Some((nodes[0], nodes[k - 1])));
    let f3: Vec<f64> = verts.iter().map(|v| v[0].cos()).collect();
    let lb3 = cotan_laplacian(&verts, &tris, &f3);
    let cap = (1..k - 1)
        .filter(|&i| th[i] >= PI / 6.0 - 1e-12 && th[i] <= 5.0 * PI / 6.0 + 1e-12)
        .map(|i| (i - 1, lbs[i]));
    let (err, scale) = ring_mismatch(&lb3, m, cap);
    let err_sphere = err / scale;
    check(
        err_wavy <= 0.02 && err_sphere <= 0.02,
        format!("relative max-norm mismatch: wavy surface {err_wavy:.2e}, sphere cap {err_sphere:.2e}"),
    )
}

// 9 ---------------------------------------------------------------------

const RADIAL_CONFIG: &str = r#"{
  "scenario": { "kind": "radial", "dimension": 1, "radius": 1.0, "nodes": 256 },
  "density": { "kind": "power_law", "s": -1.0, "alpha": 1.0 },
  "t_end": 0.1,
  "dt": 5e-4,
  "monitor_every": 10
}"#;

const VIOLATING_CONFIG: &str = r#"{
  "scenario": { "kind": "radial", "dimension": 1 },
  "density": { "kind": "power_law", "s": 2.0, "alpha": 0.0 },
  "t_end": 0.1,
  "dt": 1e-3
}"#;

fn smcf(config: &Path, out: &Path) -> Result<i32, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_smcf"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .status()
        .map_err(|e| e.to_string())?;
    status.code().ok_or_else(|| "terminated by signal".to_string())
}

fn determinism_and_exit_codes() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("radial.json");
    std::fs::write(&cfg, RADIAL_CONFIG).map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let codes = (smcf(&cfg, &a)?, smcf(&cfg, &b)?);
    let sa = std::fs::read(a.join("series.csv")).map_err(|e| e.to_string())?;
    let sb = std::fs::read(b.join("series.csv")).map_err(|e| e.to_string())?;
    let identical = sa == sb && !sa.is_empty();

    let bad = dir.path().join("violating.json");
    std::fs::write(&bad, VIOLATING_CONFIG).map_err(|e| e.to_string())?;
    let bad_code = smcf(&bad, &dir.path().join("c"))?;

    let parsed = RunConfig::from_json(RADIAL_CONFIG).map_err(|e| e.to_string())?;
    let mut steps = 0;
    let mut perturb = |s: &mut smcf_core::FlowState| {
        steps += 1;
        if steps == 50 {
            for c in s.geometry.concentration_mut() {
                *c *= 1.01;
            }
        }
    };
    let outcome = execute(&parsed, &dir.path().join("d"), Some(&mut perturb)).map_err(|e| e.to_string())?;
    let mass_failed = outcome.summary.invariants.iter().any(|v| v.name == "mass_conservation" && !v.passed);
    check(
        codes == (0, 0) && identical && bad_code == EXIT_CONFIG && outcome.exit_code == EXIT_INVARIANT && mass_failed,
        format!(
            "exit codes {codes:?}, series identical {identical}, parabolicity violation exit {bad_code}, \
             injected mass perturbation exit {}",
            outcome.exit_code
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut failed = 0;
    let mut report = |id: u32, name: &str, t: Instant, v: Verdict| {
        let secs = t.elapsed().as_secs_f64();
        match v {
            Ok(d) => println!("criterion {id} PASS  {name}: {d} [{secs:.2}s]"),
            Err(d) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {d} [{secs:.2}s]");
            }
        }
    };
    let t = Instant::now();
    report(1, "radial oracle agreement", t, radial_oracle());
    let t = Instant::now();
    report(2, "infinite-lifetime boundary", t, infinite_lifetime());
    let t = Instant::now();
    report(3, "full solver vs radial oracle", t, full_vs_radial());
    let t = Instant::now();
    let runs = convexity_run(800).and_then(|a| convexity_run(1600).map(|b| (a, b)));
    match &runs {
        Ok((coarse, fine)) => {
            report(4, "conservation suite", t, conservation_suite(coarse, fine));
            report(5, "convexity loss", Instant::now(), convexity_loss(coarse));
        }
        Err(e) => {
            report(4, "conservation suite", t, Err(e.clone()));
            report(5, "convexity loss", t, Err(e.clone()));
        }
    }
    let t = Instant::now();
    report(6, "self-intersection", t, self_intersection());
    let t = Instant::now();
    report(7, "discrete geometry convergence", t, convergence());
    let t = Instant::now();
    report(8, "cotangent Laplacian oracle", t, cotangent_oracle());
    let t = Instant::now();
    report(9, "determinism and exit status", t, determinism_and_exit_codes());
    println!("{} of 9 criteria passed in {:.1}s", 9 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
