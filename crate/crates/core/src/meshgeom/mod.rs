//! Discrete differential geometry for closed polygonal plane curves and for
//! axisymmetric surfaces in R³.
//!
//! Sign convention throughout: `H = -div ν`, so with an outward normal a
//! convex curve or surface has negative mean curvature and a circle of
//! radius `R` has `H = -1/R`. In practice every discretisation computes
//! `H = κ⃗ · ν` from the curvature vector `κ⃗`, which makes the curvature
//! independent of how the normal was chosen except for its sign.
//!
//! Axisymmetric surfaces come in two representations:
//!
//! * [`RevolutionProfile`]: a graph `w(x)` over a strictly increasing grid,
//!   the form in which the surface-of-revolution formulas are stated;
//! * [`GeneratingCurve`]: the profile as a parametric polyline in the
//!   `(x, r)` half-plane whose end nodes sit on the axis. The flow solver
//!   moves these nodes, which lets the caps travel along the axis.

mod curve;
mod generating;
mod profile;
pub(crate) mod stencil;

pub use curve::{curve_geometry, CurveMesh, Orientation, ReferenceFrame};
pub use generating::{GeneratingClosure, GeneratingCurve};
pub use profile::{normal_velocity_revolution, revolution_geometry, Closure, RevolutionProfile};

use thiserror::Error;

pub type Point = [f64; 2];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh needs at least {min} nodes, got {got}")]
    TooFewNodes { min: usize, got: usize },
    #[error("degenerate segment {0} (zero or non-finite length)")]
    DegenerateSegment(usize),
    #[error("field length {got} does not match node count {expected}")]
    FieldLength { expected: usize, got: usize },
    #[error("grid is not strictly increasing at node {0}")]
    NonMonotoneGrid(usize),
    #[error("profile radius is non-positive at interior node {index} (w = {w})")]
    PinchOff { index: usize, w: f64 },
    #[error("capped profile must vanish at both ends")]
    OpenCap,
    #[error("invalid mesh: {0}")]
    Invalid(String),
}

/// Per-node geometric fields.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryFields {
    /// Mean curvature, `H = -div ν`.
    pub mean_curvature: Vec<f64>,
    /// Unit normal, in the plane of the curve (or of the profile).
    pub normal: Vec<Point>,
    /// Lumped measure carried by each node.
    pub area_element: Vec<f64>,
}

/// Conservative diffusion operator on a chain of nodes.
///
/// `weights[j]` belongs to edge `j`, joining node `j` and `j + 1`
/// (`j + 1` taken mod `n` when `closed`). The discrete Laplace–Beltrami
/// operator is `(Σ_edges weight·(f_other - f_i)) / lumped[i]`, so
/// `Σ_i lumped[i]·Δf_i = 0` holds exactly.
#[derive(Debug, Clone)]
pub struct DiffusionStencil {
    pub weights: Vec<f64>,
    pub lumped: Vec<f64>,
    pub closed: bool,
}

impl DiffusionStencil {
    pub fn len(&self) -> usize {
        self.lumped.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lumped.is_empty()
    }

    /// `(a, b)` endpoints of edge `j`.
    #[inline]
    pub fn edge(&self, j: usize) -> (usize, usize) {
        (j, (j + 1) % self.len())
    }

    /// Unscaled flux balance `Σ weight·(f_other - f_i)` at every node.
    pub fn apply_stiffness(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (j, w) in self.weights.iter().enumerate() {
            let (a, b) = self.edge(j);
            let flux = w * (f[b] - f[a]);
            out[a] += flux;
            out[b] -= flux;
        }
        out
    }

    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        self.apply_stiffness(f)
            .into_iter()
            .zip(&self.lumped)
            .map(|(s, m)| if *m > 0.0 { s / m } else { 0.0 })
            .collect()
    }

    /// Discrete Dirichlet energy `Σ_edges weight·(f_b - f_a)²`, the
    /// counterpart of `∫ |∇f|²`.
    pub fn dirichlet(&self, f: &[f64]) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(j, w)| {
                let (a, b) = self.edge(j);
                w * (f[b] - f[a]).powi(2)
            })
            .sum()
    }
}

/// Common interface of every surface representation.
pub trait SurfaceMesh {
    fn node_count(&self) -> usize;
    fn geometry(&self) -> Result<GeometryFields, MeshError>;
    fn laplace_beltrami(&self, field: &[f64]) -> Result<Vec<f64>, MeshError>;
    fn area_elements(&self) -> Result<Vec<f64>, MeshError>;

    fn surface_integral(&self, field: &[f64]) -> Result<f64, MeshError> {
        if field.len() != self.node_count() {
            return Err(MeshError::FieldLength {
                expected: self.node_count(),
                got: field.len(),
            });
        }
        Ok(self
            .area_elements()?
            .iter()
            .zip(field)
            .map(|(a, f)| a * f)
            .sum())
    }
}

pub fn laplace_beltrami(field: &[f64], mesh: &dyn SurfaceMesh) -> Result<Vec<f64>, MeshError> {
    mesh.laplace_beltrami(field)
}

pub fn surface_integral(field: &[f64], mesh: &dyn SurfaceMesh) -> Result<f64, MeshError> {
    mesh.surface_integral(field)
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<(), MeshError> {
    if expected == got {
        Ok(())
    } else {
        Err(MeshError::FieldLength { expected, got })
    }
}
