//! Arc-length equidistribution with mass-exact concentration transfer.
//!
//! Node masses `A_i·c_i` are spread uniformly over each node's dual cell
//! (half of each adjacent segment), integrated into a piecewise-linear
//! cumulative mass `Φ(s)` along the old polyline, and differenced over the
//! dual cells of the new nodes. The new masses telescope to the old total.

use crate::meshgeom::stencil::{dist, norm};
use crate::meshgeom::{CurveMesh, GeneratingClosure, GeneratingCurve, Point, ReferenceFrame};

use super::FlowError;

struct Polyline {
    /// Nodes, followed by the closing point for closed curves.
    pts: Vec<Point>,
    /// Arc length at each entry of `pts`.
    s: Vec<f64>,
    closed: bool,
}

impl Polyline {
    fn new(nodes: &[Point], closing: Option<Point>) -> Self {
        let mut pts = nodes.to_vec();
        if let Some(p) = closing {
            pts.push(p);
        }
        let mut s = Vec::with_capacity(pts.len());
        s.push(0.0);
        for k in 1..pts.len() {
            s.push(s[k - 1] + dist(pts[k - 1], pts[k]));
        }
        Self {
            pts,
            s,
            closed: closing.is_some(),
        }
    }

    fn node_count(&self) -> usize {
        if self.closed {
            self.pts.len() - 1
        } else {
            self.pts.len()
        }
    }

    fn total(&self) -> f64 {
        *self.s.last().expect("non-empty polyline")
    }

    /// Segment index and fraction of arc position `t`.
    fn locate(&self, t: f64) -> (usize, f64) {
        let k = match self.s.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(k) => k.min(self.s.len() - 2),
            Err(k) => k.saturating_sub(1).min(self.s.len() - 2),
        };
        let len = self.s[k + 1] - self.s[k];
        let f = if len > 0.0 { ((t - self.s[k]) / len).clamp(0.0, 1.0) } else { 0.0 };
        (k, f)
    }

    fn point(&self, (k, f): (usize, f64)) -> Point {
        let (a, b) = (self.pts[k], self.pts[k + 1]);
        [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]
    }

    /// Arc positions equidistributed between consecutive pins; pins keep
    /// their index and position.
    fn equidistribute(&self, pins: &[usize]) -> Vec<f64> {
        let n = self.node_count();
        let mut stops: Vec<usize> = pins.to_vec();
        if self.closed {
            stops.push(n);
        }
        let mut out = vec![0.0; n];
        for w in stops.windows(2) {
            let (a, b) = (w[0], w[1]);
            for j in a..b.min(n) {
                let f = (j - a) as f64 / (b - a) as f64;
                out[j] = self.s[a] + f * (self.s[b] - self.s[a]);
            }
        }
        if !self.closed {
            out[n - 1] = self.s[n - 1];
        }
        out
    }
}

/// Dual-cell boundaries `b_{-1}, b_0, …, b_{n-1}` for arc positions `s`.
fn cell_bounds(s: &[f64], total: f64, closed: bool) -> Vec<f64> {
    let n = s.len();
    let mut b = Vec::with_capacity(n + 1);
    if closed {
        b.push(0.5 * (s[n - 1] + total) - total);
    } else {
        b.push(s[0]);
    }
    for i in 0..n {
        let next = if i + 1 < n {
            0.5 * (s[i] + s[i + 1])
        } else if closed {
            0.5 * (s[i] + total)
        } else {
            s[i]
        };
        b.push(next);
    }
    b
}

fn cumulative(knots: &[f64], cum: &[f64], total_len: f64, total_mass: f64, closed: bool, t: f64) -> f64 {
    let (mut t, mut base) = (t, 0.0);
    if closed {
        let k = ((t - knots[0]) / total_len).floor();
        t -= k * total_len;
        base = k * total_mass;
    }
    let last = knots.len() - 1;
    if t <= knots[0] {
        return base + cum[0];
    }
    if t >= knots[last] {
        return base + cum[last];
    }
    let k = knots.partition_point(|x| *x <= t) - 1;
    let len = knots[k + 1] - knots[k];
    let f = if len > 0.0 { (t - knots[k]) / len } else { 1.0 };
    base + cum[k] + f * (cum[k + 1] - cum[k])
}

/// New node masses after moving nodes from arc positions `old_s` to `new_s`.
fn transfer_mass(old_s: &[f64], new_s: &[f64], masses: &[f64], total_len: f64, closed: bool) -> Vec<f64> {
    let knots = cell_bounds(old_s, total_len, closed);
    let mut cum = Vec::with_capacity(knots.len());
    cum.push(0.0);
    for m in masses {
        cum.push(cum.last().unwrap() + m);
    }
    let total_mass = *cum.last().unwrap();
    let bounds = cell_bounds(new_s, total_len, closed);
    let phi: Vec<f64> = bounds
        .iter()
        .map(|&t| cumulative(&knots, &cum, total_len, total_mass, closed, t))
        .collect();
    phi.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Locations `(segment, fraction)` of `n` points at equal arc length along
/// the open polyline `pts`, starting at `pts[0]`. The last point of `pts` is
/// included only when `with_end` is set.
pub(crate) fn arc_locations(pts: &[Point], n: usize, with_end: bool) -> Vec<(usize, f64)> {
    let poly = Polyline::new(pts, None);
    let total = poly.total();
    let div = if with_end { n.saturating_sub(1).max(1) } else { n };
    (0..n).map(|i| poly.locate(total * i as f64 / div as f64)).collect()
}

fn lerp_frame(a: &ReferenceFrame, b: &ReferenceFrame, f: f64) -> ReferenceFrame {
    let p = [a.point[0] + f * (b.point[0] - a.point[0]), a.point[1] + f * (b.point[1] - a.point[1])];
    let v = [a.normal[0] + f * (b.normal[0] - a.normal[0]), a.normal[1] + f * (b.normal[1] - a.normal[1])];
    let l = norm(v);
    ReferenceFrame {
        point: p,
        normal: if l > 0.0 { [v[0] / l, v[1] / l] } else { a.normal },
    }
}

/// Equidistributes a closed curve between the pinned node indices
/// (`pins` sorted, starting with 0).
pub fn remesh_curve(mesh: &CurveMesh, pins: &[usize]) -> Result<CurveMesh, FlowError> {
    let n = mesh.len();
    let poly = Polyline::new(&mesh.nodes, Some(mesh.nodes[0]));
    let new_s = poly.equidistribute(pins);
    let locs: Vec<(usize, f64)> = new_s.iter().map(|&t| poly.locate(t)).collect();
    let nodes: Vec<Point> = locs.iter().map(|&l| poly.point(l)).collect();
    let reference = mesh.reference.as_ref().map(|frames| {
        locs.iter()
            .map(|&(k, f)| lerp_frame(&frames[k], &frames[(k + 1) % n], f))
            .collect::<Vec<_>>()
    });
    let old_area = mesh.diffusion_stencil()?.lumped;
    let masses: Vec<f64> = old_area.iter().zip(&mesh.concentration).map(|(a, c)| a * c).collect();
    let new_mass = transfer_mass(&poly.s[..n], &new_s, &masses, poly.total(), true);
    let mut out = CurveMesh {
        nodes,
        orientation: mesh.orientation,
        concentration: vec![0.0; n],
        reference,
    };
    out.validate()?;
    let area = out.diffusion_stencil()?.lumped;
    out.concentration = new_mass.iter().zip(&area).map(|(m, a)| m / a).collect();
    Ok(out)
}

/// Equidistributes a generating curve; tips (or node 0 when periodic) stay put.
pub fn remesh_generating(curve: &GeneratingCurve) -> Result<GeneratingCurve, FlowError> {
    let n = curve.len();
    let (closing, pins) = match curve.closure {
        GeneratingClosure::Capped => (None, vec![0, n - 1]),
        GeneratingClosure::Periodic { period } => (Some([curve.nodes[0][0] + period, curve.nodes[0][1]]), vec![0]),
    };
    let closed = closing.is_some();
    let poly = Polyline::new(&curve.nodes, closing);
    let new_s = poly.equidistribute(&pins);
    let mut nodes: Vec<Point> = new_s.iter().map(|&t| poly.point(poly.locate(t))).collect();
    if !closed {
        nodes[0] = curve.nodes[0];
        nodes[n - 1] = curve.nodes[n - 1];
    }
    let old_area = curve.diffusion_stencil()?.lumped;
    let masses: Vec<f64> = old_area.iter().zip(&curve.concentration).map(|(a, c)| a * c).collect();
    let new_mass = transfer_mass(&poly.s[..n], &new_s, &masses, poly.total(), closed);
    let mut out = GeneratingCurve {
        nodes,
        concentration: vec![0.0; n],
        closure: curve.closure,
    };
    out.validate()?;
    let area = out.diffusion_stencil()?.lumped;
    out.concentration = new_mass.iter().zip(&area).map(|(m, a)| m / a).collect();
    Ok(out)
}
