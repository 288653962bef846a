use super::{MeshError, Point};

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Rotation by +90°.
#[inline]
pub fn rot_left(a: Point) -> Point {
    [-a[1], a[0]]
}

/// Rotation by -90°.
#[inline]
pub fn rot_right(a: Point) -> Point {
    [a[1], -a[0]]
}

/// Osculating-parabola data at a node from its two neighbours, using chord
/// lengths as the local parameter.
#[derive(Debug, Clone, Copy)]
pub struct ThreePoint {
    pub h_prev: f64,
    pub h_next: f64,
    /// Unit tangent (second-order accurate on smoothly graded spacing).
    pub tangent: Point,
    /// Second divided difference; the curvature vector.
    pub second: Point,
}

pub fn three_point(prev: Point, cur: Point, next: Point, seg: usize) -> Result<ThreePoint, MeshError> {
    let a = sub(cur, prev);
    let b = sub(next, cur);
    let hm = norm(a);
    let hp = norm(b);
    if !(hm > 0.0) || !hm.is_finite() {
        return Err(MeshError::DegenerateSegment(seg));
    }
    if !(hp > 0.0) || !hp.is_finite() {
        return Err(MeshError::DegenerateSegment(seg + 1));
    }
    let denom = hm * hp * (hm + hp);
    let d = scale(add(scale(b, hm * hm), scale(a, hp * hp)), 1.0 / denom);
    let dn = norm(d);
    if !(dn > 0.0) {
        return Err(MeshError::DegenerateSegment(seg));
    }
    let second = scale(sub(scale(b, 1.0 / hp), scale(a, 1.0 / hm)), 2.0 / (hm + hp));
    Ok(ThreePoint {
        h_prev: hm,
        h_next: hp,
        tangent: scale(d, 1.0 / dn),
        second,
    })
}

/// Nonuniform second-order first and second derivatives of samples `f`
/// at the middle of three abscissae.
#[inline]
pub fn fd_derivatives(hm: f64, hp: f64, fm: f64, f0: f64, fp: f64) -> (f64, f64) {
    let d1 = (hm * hm * (fp - f0) + hp * hp * (f0 - fm)) / (hm * hp * (hm + hp));
    let d2 = 2.0 * ((fp - f0) / hp - (f0 - fm) / hm) / (hm + hp);
    (d1, d2)
}
