use std::f64::consts::PI;

use super::profile::{Closure, RevolutionProfile};
use super::stencil::{dist, dot, rot_left, three_point};
use super::{check_len, DiffusionStencil, GeometryFields, MeshError, Point, SurfaceMesh};

pub const MIN_GENERATING_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratingClosure {
    /// Open polyline from tip to tip; both end nodes lie on the axis `r = 0`.
    Capped,
    /// Node `N-1` is followed by node 0 shifted by `period` along `x`.
    Periodic { period: f64 },
}

/// Profile of a surface of revolution as a polyline in the `(x, r)`
/// half-plane, traversed so that the outward normal lies to the left of the
/// tangent.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingCurve {
    pub nodes: Vec<Point>,
    pub concentration: Vec<f64>,
    pub closure: GeneratingClosure,
}

/// Per-node local data shared by geometry and the flow stepper.
#[derive(Debug, Clone, Copy)]
pub struct LocalFrame {
    pub h_prev: f64,
    pub h_next: f64,
    pub normal: Point,
    /// In-plane curvature `D²X · ν`.
    pub planar: f64,
    /// Full mean curvature including the azimuthal part.
    pub mean_curvature: f64,
}

impl GeneratingCurve {
    pub fn new(
        nodes: Vec<Point>,
        concentration: Vec<f64>,
        closure: GeneratingClosure,
    ) -> Result<Self, MeshError> {
        let g = Self {
            nodes,
            concentration,
            closure,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let n = self.nodes.len();
        if n < MIN_GENERATING_NODES {
            return Err(MeshError::TooFewNodes {
                min: MIN_GENERATING_NODES,
                got: n,
            });
        }
        check_len(n, self.concentration.len())?;
        let interior = match self.closure {
            GeneratingClosure::Capped => {
                if self.nodes[0][1] != 0.0 || self.nodes[n - 1][1] != 0.0 {
                    return Err(MeshError::OpenCap);
                }
                1..n - 1
            }
            GeneratingClosure::Periodic { period } => {
                if !(period > 0.0) {
                    return Err(MeshError::Invalid(format!("period {period}")));
                }
                0..n
            }
        };
        for i in interior {
            let r = self.nodes[i][1];
            if !(r > 0.0) {
                return Err(MeshError::PinchOff { index: i, w: r });
            }
        }
        for (j, s) in self.segment_lengths().into_iter().enumerate() {
            if !(s > 0.0) || !s.is_finite() {
                return Err(MeshError::DegenerateSegment(j));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_capped(&self) -> bool {
        self.closure == GeneratingClosure::Capped
    }

    pub fn edge_count(&self) -> usize {
        match self.closure {
            GeneratingClosure::Capped => self.len() - 1,
            GeneratingClosure::Periodic { .. } => self.len(),
        }
    }

    /// Endpoint positions of edge `j`, with the periodic shift applied.
    pub fn edge_points(&self, j: usize) -> (Point, Point) {
        let n = self.len();
        let a = self.nodes[j];
        if j + 1 < n {
            return (a, self.nodes[j + 1]);
        }
        match self.closure {
            GeneratingClosure::Periodic { period } => (a, [self.nodes[0][0] + period, self.nodes[0][1]]),
            GeneratingClosure::Capped => (a, a),
        }
    }

    pub fn segment_lengths(&self) -> Vec<f64> {
        (0..self.edge_count())
            .map(|j| {
                let (a, b) = self.edge_points(j);
                dist(a, b)
            })
            .collect()
    }

    pub fn quality_ratio(&self) -> f64 {
        let segs = self.segment_lengths();
        let (lo, hi) = segs
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        hi / lo
    }

    pub fn min_segment(&self) -> f64 {
        self.segment_lengths()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &self.nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        // the surface spans [-r, r] transversally
        (hi[0] - lo[0]).hypot(2.0 * hi[1])
    }

    /// Neighbours of node `i`; tips use the mirror image of their neighbour.
    fn neighbours(&self, i: usize) -> (Point, Point) {
        let n = self.len();
        match self.closure {
            GeneratingClosure::Capped => {
                if i == 0 {
                    let q = self.nodes[1];
                    ([q[0], -q[1]], q)
                } else if i + 1 == n {
                    let q = self.nodes[n - 2];
                    (q, [q[0], -q[1]])
                } else {
                    (self.nodes[i - 1], self.nodes[i + 1])
                }
            }
            GeneratingClosure::Periodic { period } => {
                let prev = if i == 0 {
                    let q = self.nodes[n - 1];
                    [q[0] - period, q[1]]
                } else {
                    self.nodes[i - 1]
                };
                let next = if i + 1 == n {
                    let q = self.nodes[0];
                    [q[0] + period, q[1]]
                } else {
                    self.nodes[i + 1]
                };
                (prev, next)
            }
        }
    }

    pub fn local_frames(&self) -> Result<Vec<LocalFrame>, MeshError> {
        let n = self.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let (prev, next) = self.neighbours(i);
            let tp = three_point(prev, self.nodes[i], next, i.saturating_sub(1))?;
            let nu = rot_left(tp.tangent);
            let planar = dot(tp.second, nu);
            let r = self.nodes[i][1];
            let tip = self.is_capped() && (i == 0 || i + 1 == n);
            let mean_curvature = if tip {
                2.0 * planar
            } else {
                if !(r > 0.0) {
                    return Err(MeshError::PinchOff { index: i, w: r });
                }
                planar - nu[1] / r
            };
            out.push(LocalFrame {
                h_prev: tp.h_prev,
                h_next: tp.h_next,
                normal: nu,
                planar,
                mean_curvature,
            });
        }
        Ok(out)
    }

    /// Lumped P1 area on the frusta plus the cotangent-free stiffness
    /// `2π r̄ / ℓ` per edge.
    pub fn diffusion_stencil(&self) -> Result<DiffusionStencil, MeshError> {
        let n = self.len();
        let mut lumped = vec![0.0; n];
        let mut weights = Vec::with_capacity(self.edge_count());
        for j in 0..self.edge_count() {
            let (a, b) = self.edge_points(j);
            let l = dist(a, b);
            if !(l > 0.0) {
                return Err(MeshError::DegenerateSegment(j));
            }
            let (ra, rb) = (a[1], b[1]);
            lumped[j] += 2.0 * PI * l * (2.0 * ra + rb) / 6.0;
            lumped[(j + 1) % n] += 2.0 * PI * l * (ra + 2.0 * rb) / 6.0;
            weights.push(PI * (ra + rb) / l);
        }
        Ok(DiffusionStencil {
            weights,
            lumped,
            closed: !self.is_capped(),
        })
    }

    /// Enclosed volume (capped only; periodic gives the volume of one period).
    pub fn volume(&self) -> f64 {
        (0..self.edge_count())
            .map(|j| {
                let (a, b) = self.edge_points(j);
                PI * (b[0] - a[0]) * (a[1] * a[1] + a[1] * b[1] + b[1] * b[1]) / 3.0
            })
            .sum()
    }

    pub fn from_profile(p: &RevolutionProfile) -> Result<Self, MeshError> {
        let closure = match p.closure {
            Closure::CappedEnds => GeneratingClosure::Capped,
            Closure::Periodic { period } => GeneratingClosure::Periodic { period },
        };
        Self::new(p.as_points(), p.concentration.clone(), closure)
    }

    /// Back to graph form; fails if the curve is no longer a graph over `x`.
    pub fn to_profile(&self) -> Result<RevolutionProfile, MeshError> {
        let closure = match self.closure {
            GeneratingClosure::Capped => Closure::CappedEnds,
            GeneratingClosure::Periodic { period } => Closure::Periodic { period },
        };
        RevolutionProfile::new(
            self.nodes.iter().map(|p| p[0]).collect(),
            self.nodes.iter().map(|p| p[1]).collect(),
            self.concentration.clone(),
            closure,
        )
    }
}

impl SurfaceMesh for GeneratingCurve {
    fn node_count(&self) -> usize {
        self.len()
    }

    fn geometry(&self) -> Result<GeometryFields, MeshError> {
        let frames = self.local_frames()?;
        Ok(GeometryFields {
            mean_curvature: frames.iter().map(|f| f.mean_curvature).collect(),
            normal: frames.iter().map(|f| f.normal).collect(),
            area_element: self.diffusion_stencil()?.lumped,
        })
    }

    fn laplace_beltrami(&self, field: &[f64]) -> Result<Vec<f64>, MeshError> {
        check_len(self.len(), field.len())?;
        Ok(self.diffusion_stencil()?.laplacian(field))
    }

    fn area_elements(&self) -> Result<Vec<f64>, MeshError> {
        Ok(self.diffusion_stencil()?.lumped)
    }
}
