//! Fixtures shared by the criterion benches.

use std::f64::consts::PI;

use smcf_core::meshgeom::{CurveMesh, GeneratingClosure, GeneratingCurve, Orientation, Point};

/// Ellipse with semi-axes 2 and 1, unit concentration.
pub fn ellipse(n: usize) -> CurveMesh {
    let nodes: Vec<Point> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [2.0 * t.cos(), t.sin()]
        })
        .collect();
    CurveMesh::new(nodes, Orientation::NormalRightOfTangent, vec![1.0; n]).unwrap()
}

/// Unit sphere profile, tip to tip.
pub fn sphere(n: usize) -> GeneratingCurve {
    let nodes: Vec<Point> = (0..n)
        .map(|i| {
            let t = PI * i as f64 / (n - 1) as f64;
            let r = if i == 0 || i + 1 == n { 0.0 } else { t.sin() };
            [-t.cos(), r]
        })
        .collect();
    GeneratingCurve::new(nodes, vec![1.0; n], GeneratingClosure::Capped).unwrap()
}

/// `cos x` sampled at the first coordinate of every point.
pub fn cos_field(nodes: &[Point]) -> Vec<f64> {
    nodes.iter().map(|p| p[0].cos()).collect()
}
