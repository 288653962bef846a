use std::collections::HashMap;

use crate::meshgeom::stencil::{cross, dist, sub};
use crate::meshgeom::Point;

/// First crossing found between two non-adjacent segments of a closed
/// polyline. Segment `j` joins node `j` and node `j + 1 mod N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCrossing {
    pub seg_a: usize,
    pub seg_b: usize,
    pub point: Point,
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Closed-segment intersection test; returns a point of contact.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> Option<Point> {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        let t = d1 / (d1 - d2);
        return Some([p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1])]);
    }
    if d1 == 0.0 && on_segment(q1, q2, p1) {
        return Some(p1);
    }
    if d2 == 0.0 && on_segment(q1, q2, p2) {
        return Some(p2);
    }
    if d3 == 0.0 && on_segment(p1, p2, q1) {
        return Some(q1);
    }
    if d4 == 0.0 && on_segment(p1, p2, q2) {
        return Some(q2);
    }
    None
}

/// Spatial-hash search for a self-crossing of a closed polyline. Among all
/// crossing pairs the lexicographically smallest `(seg_a, seg_b)` is
/// returned, so the result does not depend on hash iteration order.
pub fn find_self_intersection(nodes: &[Point]) -> Option<SegmentCrossing> {
    let n = nodes.len();
    if n < 4 {
        return None;
    }
    let seg = |j: usize| (nodes[j], nodes[(j + 1) % n]);
    let max_len = (0..n).map(|j| dist(nodes[j], nodes[(j + 1) % n])).fold(0.0, f64::max);
    if !(max_len > 0.0) || !max_len.is_finite() {
        return None;
    }
    let cell = 2.0 * max_len;
    let key = |v: f64| (v / cell).floor() as i64;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for j in 0..n {
        let (a, b) = seg(j);
        for ix in key(a[0].min(b[0]))..=key(a[0].max(b[0])) {
            for iy in key(a[1].min(b[1]))..=key(a[1].max(b[1])) {
                grid.entry((ix, iy)).or_default().push(j);
            }
        }
    }
    let adjacent = |i: usize, j: usize| {
        let d = i.abs_diff(j);
        d <= 1 || d == n - 1
    };
    let mut best: Option<SegmentCrossing> = None;
    for members in grid.values() {
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                let (a, b) = (i.min(j), i.max(j));
                if adjacent(a, b) {
                    continue;
                }
                if best.is_some_and(|x| (x.seg_a, x.seg_b) <= (a, b)) {
                    continue;
                }
                let (p1, p2) = seg(a);
                let (q1, q2) = seg(b);
                if let Some(point) = segments_intersect(p1, p2, q1, q2) {
                    best = Some(SegmentCrossing { seg_a: a, seg_b: b, point });
                }
            }
        }
    }
    best
}
