use std::f64::consts::PI;

use super::stencil::fd_derivatives;
use super::{check_len, DiffusionStencil, GeometryFields, MeshError, Point, SurfaceMesh};

pub const MIN_PROFILE_NODES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    /// `w = 0` at both end nodes.
    CappedEnds,
    /// Node `N-1` is followed by node 0 shifted by `period` in `x`.
    Periodic { period: f64 },
}

/// Surface of revolution about the `x` axis, `(x, w(x) cos φ, w(x) sin φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RevolutionProfile {
    pub x_grid: Vec<f64>,
    pub w: Vec<f64>,
    pub concentration: Vec<f64>,
    pub closure: Closure,
}

impl RevolutionProfile {
    pub fn new(
        x_grid: Vec<f64>,
        w: Vec<f64>,
        concentration: Vec<f64>,
        closure: Closure,
    ) -> Result<Self, MeshError> {
        let p = Self {
            x_grid,
            w,
            concentration,
            closure,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let n = self.x_grid.len();
        if n < MIN_PROFILE_NODES {
            return Err(MeshError::TooFewNodes {
                min: MIN_PROFILE_NODES,
                got: n,
            });
        }
        check_len(n, self.w.len())?;
        check_len(n, self.concentration.len())?;
        for i in 1..n {
            if !(self.x_grid[i] > self.x_grid[i - 1]) {
                return Err(MeshError::NonMonotoneGrid(i));
            }
        }
        let interior = match self.closure {
            Closure::CappedEnds => {
                if self.w[0] != 0.0 || self.w[n - 1] != 0.0 {
                    return Err(MeshError::OpenCap);
                }
                1..n - 1
            }
            Closure::Periodic { period } => {
                if !(self.x_grid[0] + period > self.x_grid[n - 1]) {
                    return Err(MeshError::NonMonotoneGrid(0));
                }
                0..n
            }
        };
        for i in interior {
            if !(self.w[i] > 0.0) {
                return Err(MeshError::PinchOff {
                    index: i,
                    w: self.w[i],
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.x_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_grid.is_empty()
    }

    fn is_interior(&self, i: usize) -> bool {
        match self.closure {
            Closure::CappedEnds => i > 0 && i + 1 < self.len(),
            Closure::Periodic { .. } => true,
        }
    }

    /// Spacing to the previous and next node (wrapping for periodic closure).
    fn spacing(&self, i: usize) -> (f64, f64) {
        let n = self.len();
        let x = &self.x_grid;
        match self.closure {
            Closure::Periodic { period } => {
                let hm = if i == 0 { x[0] + period - x[n - 1] } else { x[i] - x[i - 1] };
                let hp = if i + 1 == n { x[0] + period - x[n - 1] } else { x[i + 1] - x[i] };
                (hm, hp)
            }
            Closure::CappedEnds => (x[i] - x[i - 1], x[i + 1] - x[i]),
        }
    }

    /// `(w_x, w_xx)` at an interior node.
    fn derivatives(&self, i: usize) -> (f64, f64) {
        let n = self.len();
        let (hm, hp) = self.spacing(i);
        let (im, ip) = ((i + n - 1) % n, (i + 1) % n);
        fd_derivatives(hm, hp, self.w[im], self.w[i], self.w[ip])
    }

    /// Per-node slope `w_x`; one-sided at capped ends.
    pub fn slopes(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                if self.is_interior(i) {
                    self.derivatives(i).0
                } else if i == 0 {
                    (self.w[1] - self.w[0]) / (self.x_grid[1] - self.x_grid[0])
                } else {
                    (self.w[n - 1] - self.w[n - 2]) / (self.x_grid[n - 1] - self.x_grid[n - 2])
                }
            })
            .collect()
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                if self.is_interior(i) {
                    self.spacing(i).1
                } else if i == 0 {
                    self.x_grid[1] - self.x_grid[0]
                } else {
                    f64::INFINITY
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Conservative flux stencil; edges touching a capped end carry no flux.
    pub fn diffusion_stencil(&self) -> Result<DiffusionStencil, MeshError> {
        let n = self.len();
        let fields = revolution_geometry(self)?;
        let (closed, n_edges) = match self.closure {
            Closure::Periodic { .. } => (true, n),
            Closure::CappedEnds => (false, n - 1),
        };
        let weights = (0..n_edges)
            .map(|j| {
                let capped_edge = !closed && (j == 0 || j + 2 == n);
                if capped_edge {
                    return 0.0;
                }
                let dx = self.spacing(j).1;
                let b = (j + 1) % n;
                let s = (self.w[b] - self.w[j]) / dx;
                let wbar = 0.5 * (self.w[b] + self.w[j]);
                2.0 * PI * wbar / (dx * (1.0 + s * s).sqrt())
            })
            .collect();
        Ok(DiffusionStencil {
            weights,
            lumped: fields.area_element,
            closed,
        })
    }

    pub fn as_points(&self) -> Vec<Point> {
        self.x_grid.iter().zip(&self.w).map(|(x, w)| [*x, *w]).collect()
    }
}

/// Mean curvature, outward profile normal `(-w_x, 1)/√(1+w_x²)` and area
/// element `2π w √(1+w_x²) Δx` (trapezoidal) of a surface of revolution.
///
/// Capped end nodes carry zero measure, copy `H` from their neighbour and
/// get the axial normal `(∓1, 0)`.
pub fn revolution_geometry(p: &RevolutionProfile) -> Result<GeometryFields, MeshError> {
    let n = p.len();
    let mut mean_curvature = vec![0.0; n];
    let mut normal = vec![[0.0, 0.0]; n];
    let mut area_element = vec![0.0; n];
    for i in (0..n).filter(|&i| p.is_interior(i)) {
        let w = p.w[i];
        if !(w > 0.0) {
            return Err(MeshError::PinchOff { index: i, w });
        }
        let (wx, wxx) = p.derivatives(i);
        let q = 1.0 + wx * wx;
        let sq = q.sqrt();
        mean_curvature[i] = (wxx / q - 1.0 / w) / sq;
        normal[i] = [-wx / sq, 1.0 / sq];
        let (hm, hp) = p.spacing(i);
        area_element[i] = 2.0 * PI * w * sq * 0.5 * (hm + hp);
    }
    if p.closure == Closure::CappedEnds {
        mean_curvature[0] = mean_curvature[1];
        mean_curvature[n - 1] = mean_curvature[n - 2];
        normal[0] = [-1.0, 0.0];
        normal[n - 1] = [1.0, 0.0];
    }
    Ok(GeometryFields {
        mean_curvature,
        normal,
        area_element,
    })
}

/// `V = ∂_t w / √(1 + w_x²)`.
pub fn normal_velocity_revolution(dw_dt: &[f64], w_x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(dw_dt.len(), w_x.len());
    dw_dt
        .iter()
        .zip(w_x)
        .map(|(v, s)| v / (1.0 + s * s).sqrt())
        .collect()
}

impl SurfaceMesh for RevolutionProfile {
    fn node_count(&self) -> usize {
        self.len()
    }

    fn geometry(&self) -> Result<GeometryFields, MeshError> {
        revolution_geometry(self)
    }

    fn laplace_beltrami(&self, field: &[f64]) -> Result<Vec<f64>, MeshError> {
        check_len(self.len(), field.len())?;
        Ok(self.diffusion_stencil()?.laplacian(field))
    }

    fn area_elements(&self) -> Result<Vec<f64>, MeshError> {
        Ok(revolution_geometry(self)?.area_element)
    }
}
