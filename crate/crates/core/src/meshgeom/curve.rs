use super::stencil::{dist, dot, rot_left, rot_right, three_point};
use super::{check_len, DiffusionStencil, GeometryFields, MeshError, Point, SurfaceMesh};

pub const MIN_CURVE_NODES: usize = 8;

/// Which side of the traversal direction the unit normal points to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    NormalLeftOfTangent,
    NormalRightOfTangent,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::NormalLeftOfTangent => Orientation::NormalRightOfTangent,
            Orientation::NormalRightOfTangent => Orientation::NormalLeftOfTangent,
        }
    }

    #[inline]
    pub fn normal_of(self, tangent: Point) -> Point {
        match self {
            Orientation::NormalLeftOfTangent => rot_left(tangent),
            Orientation::NormalRightOfTangent => rot_right(tangent),
        }
    }
}

/// Reference position and reference normal of a node, for tracking the
/// height `ρ = (X - F)·ν_ref` of the moving curve over a fixed reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceFrame {
    pub point: Point,
    pub normal: Point,
}

impl ReferenceFrame {
    pub fn height(&self, x: Point) -> f64 {
        dot([x[0] - self.point[0], x[1] - self.point[1]], self.normal)
    }
}

/// Closed polygonal curve in the plane; node `i` connects to `i + 1 mod N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveMesh {
    pub nodes: Vec<Point>,
    pub orientation: Orientation,
    pub concentration: Vec<f64>,
    pub reference: Option<Vec<ReferenceFrame>>,
}

impl CurveMesh {
    pub fn new(
        nodes: Vec<Point>,
        orientation: Orientation,
        concentration: Vec<f64>,
    ) -> Result<Self, MeshError> {
        let mesh = Self {
            nodes,
            orientation,
            concentration,
            reference: None,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Uniformly sampled circle traversed counter-clockwise starting at
    /// angle 0, so `NormalRightOfTangent` is the outward normal.
    pub fn circle(
        center: Point,
        radius: f64,
        n: usize,
        orientation: Orientation,
        concentration: f64,
    ) -> Result<Self, MeshError> {
        let nodes = (0..n)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            })
            .collect();
        Self::new(nodes, orientation, vec![concentration; n])
    }

    pub fn with_reference(mut self, frames: Vec<ReferenceFrame>) -> Result<Self, MeshError> {
        check_len(self.nodes.len(), frames.len())?;
        self.reference = Some(frames);
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), MeshError> {
        let n = self.nodes.len();
        if n < MIN_CURVE_NODES {
            return Err(MeshError::TooFewNodes {
                min: MIN_CURVE_NODES,
                got: n,
            });
        }
        check_len(n, self.concentration.len())?;
        for (j, len) in self.segment_lengths().into_iter().enumerate() {
            if !(len > 0.0) || !len.is_finite() {
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

    #[inline]
    fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    #[inline]
    fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    /// Length of segment `j` (node `j` to node `j+1`).
    pub fn segment_lengths(&self) -> Vec<f64> {
        (0..self.len())
            .map(|j| dist(self.nodes[j], self.nodes[self.next(j)]))
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.segment_lengths().iter().sum()
    }

    /// Longest over shortest segment.
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

    pub fn check_min_segment(&self, h_min: f64) -> Result<(), MeshError> {
        for (j, s) in self.segment_lengths().into_iter().enumerate() {
            if s < h_min {
                return Err(MeshError::DegenerateSegment(j));
            }
        }
        Ok(())
    }

    /// Diameter of the node set's bounding box.
    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for p in &self.nodes {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (hi[0] - lo[0]).hypot(hi[1] - lo[1])
    }

    /// Node heights over the reference curve, if one is attached.
    pub fn heights(&self) -> Option<Vec<f64>> {
        self.reference.as_ref().map(|frames| {
            frames
                .iter()
                .zip(&self.nodes)
                .map(|(f, x)| f.height(*x))
                .collect()
        })
    }

    pub fn diffusion_stencil(&self) -> Result<DiffusionStencil, MeshError> {
        let segs = self.segment_lengths();
        let n = self.len();
        let mut lumped = vec![0.0; n];
        let mut weights = Vec::with_capacity(n);
        for (j, &s) in segs.iter().enumerate() {
            if !(s > 0.0) {
                return Err(MeshError::DegenerateSegment(j));
            }
            weights.push(1.0 / s);
            lumped[j] += 0.5 * s;
            lumped[self.next(j)] += 0.5 * s;
        }
        Ok(DiffusionStencil {
            weights,
            lumped,
            closed: true,
        })
    }

    /// Reverse the traversal direction, keeping every geometric quantity.
    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.nodes.reverse();
        out.concentration.reverse();
        if let Some(r) = out.reference.as_mut() {
            r.reverse();
        }
        out.orientation = self.orientation.flipped();
        out
    }
}

/// Curvature, unit normal and lumped length at every node of a closed curve.
///
/// `H` is the osculating-parabola curvature vector projected on the normal
/// selected by the orientation flag; exact on uniformly sampled circles.
pub fn curve_geometry(mesh: &CurveMesh) -> Result<GeometryFields, MeshError> {
    let n = mesh.len();
    let mut mean_curvature = Vec::with_capacity(n);
    let mut normal = Vec::with_capacity(n);
    let mut area_element = Vec::with_capacity(n);
    for i in 0..n {
        let tp = three_point(
            mesh.nodes[mesh.prev(i)],
            mesh.nodes[i],
            mesh.nodes[mesh.next(i)],
            mesh.prev(i),
        )?;
        let nu = mesh.orientation.normal_of(tp.tangent);
        mean_curvature.push(dot(tp.second, nu));
        normal.push(nu);
        area_element.push(0.5 * (tp.h_prev + tp.h_next));
    }
    Ok(GeometryFields {
        mean_curvature,
        normal,
        area_element,
    })
}

impl SurfaceMesh for CurveMesh {
    fn node_count(&self) -> usize {
        self.len()
    }

    fn geometry(&self) -> Result<GeometryFields, MeshError> {
        curve_geometry(self)
    }

    /// Three-point divided difference in arc length on nonuniform spacing.
    fn laplace_beltrami(&self, field: &[f64]) -> Result<Vec<f64>, MeshError> {
        check_len(self.len(), field.len())?;
        Ok(self.diffusion_stencil()?.laplacian(field))
    }

    fn area_elements(&self) -> Result<Vec<f64>, MeshError> {
        Ok(self.diffusion_stencil()?.lumped)
    }
}
