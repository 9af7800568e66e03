//! Planar geometry primitives.
//!
//! All arithmetic is `f64`. Predicates use [`tol::GEOM`](crate::tol::GEOM);
//! the configurations this crate builds stay far from degeneracy, so no
//! robust-predicate machinery is needed.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A point (or vector) in the plane. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Like [`Point::new`] but rejects NaN and infinities.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        let p = Point { x, y };
        p.check_finite("point")?;
        Ok(p)
    }

    /// Unit vector at angle `phi` from the positive x-axis.
    pub fn polar(phi: f64) -> Self {
        Point::new(phi.cos(), phi.sin())
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub(crate) fn check_finite(self, what: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite(what))
        }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// `self / |self|`, or `None` for the zero vector.
    pub fn normalized(self) -> Option<Point> {
        let n = self.norm();
        (n > 0.0).then(|| self / n)
    }

    /// Rotation about the origin by `phi` radians, counterclockwise.
    pub fn rotate(self, phi: f64) -> Point {
        let (s, c) = phi.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Quarter turn counterclockwise.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    /// Reflection in the x-axis.
    pub fn mirror(self) -> Point {
        Point::new(self.x, -self.y)
    }

    pub fn midpoint(self, o: Point) -> Point {
        (self + o) * 0.5
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point {
    fn add_assign(&mut self, o: Point) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Point {
    fn sub_assign(&mut self, o: Point) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Point {
    type Output = Point;
    fn div(self, s: f64) -> Point {
        Point::new(self.x / s, self.y / s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// The line `{p : p . normal = offset}`; `normal` points to the positive side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientedLine {
    normal: Point,
    offset: f64,
}

impl OrientedLine {
    /// Builds a line from any nonzero normal; the normal is rescaled to unit
    /// length together with the offset, so the point set is unchanged.
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        normal.check_finite("line normal")?;
        if !offset.is_finite() {
            return Err(Error::NonFinite("line offset"));
        }
        let n = normal.norm();
        if n <= tol::ALGEBRAIC {
            return Err(Error::Degenerate("line normal is zero".into()));
        }
        Ok(OrientedLine { normal: normal / n, offset: offset / n })
    }

    /// Line through `p` with unit normal direction `normal`.
    pub fn through(p: Point, normal: Point) -> Result<Self> {
        let n = normal
            .normalized()
            .ok_or_else(|| Error::Degenerate("line normal is zero".into()))?;
        OrientedLine::new(n, p.dot(n))
    }

    /// The vertical line `x = d`, positive side `x > d`.
    pub fn vertical(d: f64) -> Self {
        OrientedLine { normal: Point::new(1.0, 0.0), offset: d }
    }

    /// The horizontal line `y = c`, positive side `y > c`.
    pub fn horizontal(c: f64) -> Self {
        OrientedLine { normal: Point::new(0.0, 1.0), offset: c }
    }

    pub fn normal(&self) -> Point {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Checks the unit-normal invariant; deserialized lines may violate it.
    pub fn validate(&self) -> Result<()> {
        self.normal.check_finite("line normal")?;
        if !self.offset.is_finite() {
            return Err(Error::NonFinite("line offset"));
        }
        if (self.normal.norm() - 1.0).abs() > tol::ALGEBRAIC {
            return Err(Error::Degenerate("line normal is not a unit vector".into()));
        }
        Ok(())
    }

    /// Rescales a possibly unnormalized line (e.g. read from JSON).
    pub fn normalize(self) -> Result<Self> {
        OrientedLine::new(self.normal, self.offset)
    }

    /// A point on the line.
    pub fn anchor(&self) -> Point {
        self.normal * self.offset
    }
}

/// A closed segment `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn direction(&self) -> Point {
        self.b - self.a
    }

    /// Same point set, endpoints in canonical (lexicographic) order.
    pub fn canonical(self) -> Segment {
        if (self.a.x, self.a.y) <= (self.b.x, self.b.y) {
            self
        } else {
            Segment::new(self.b, self.a)
        }
    }

    /// Hausdorff-style closeness of two segments as point sets.
    pub fn close_to(&self, o: &Segment, eps: f64) -> bool {
        (self.a.dist(o.a) <= eps && self.b.dist(o.b) <= eps)
            || (self.a.dist(o.b) <= eps && self.b.dist(o.a) <= eps)
    }
}

/// Which side of a directed segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// `p . normal - offset`; positive on the normal side.
pub fn signed_distance(p: Point, l: &OrientedLine) -> f64 {
    p.dot(l.normal) - l.offset
}

/// Orthogonal projection of `p` on `l`.
pub fn perpendicular_foot(p: Point, l: &OrientedLine) -> Point {
    p - l.normal * signed_distance(p, l)
}

/// Third vertex of the equilateral triangle erected on `ab`.
pub fn equilateral_third(a: Point, b: Point, side: Side) -> Result<Point> {
    if a.dist(b) <= tol::GEOM {
        return Err(Error::Degenerate("equilateral triangle on a zero-length base".into()));
    }
    let phi = match side {
        Side::Left => PI / 3.0,
        Side::Right => -PI / 3.0,
    };
    Ok(a + (b - a).rotate(phi))
}

/// Unsigned angle `pvq` in `[0, pi]`.
pub fn angle_between(v: Point, p: Point, q: Point) -> Result<f64> {
    let (u, w) = (p - v, q - v);
    if u.norm() <= tol::GEOM || w.norm() <= tol::GEOM {
        return Err(Error::Degenerate("angle arm of zero length".into()));
    }
    Ok(u.cross(w).abs().atan2(u.dot(w)))
}

/// Angle between two nonzero direction vectors, in `[0, pi]`.
pub(crate) fn angle_of(u: Point, w: Point) -> f64 {
    u.cross(w).abs().atan2(u.dot(w))
}

/// The Fermat point of a triangle: the point minimizing the summed distance
/// to the three vertices.
///
/// When every angle is below 120 degrees this is the interior point seeing
/// each side under 120 degrees, found by the equilateral-triangle
/// construction: erect an equilateral triangle `abe` on the far side of
/// `ab` from `c`; the answer is where segment `ce` meets the circle through
/// `a`, `b`, `e`. Otherwise it is the vertex with the wide angle (the middle
/// point for collinear input).
pub fn torricelli_point(a: Point, b: Point, c: Point) -> Result<Point> {
    for p in [a, b, c] {
        p.check_finite("triangle vertex")?;
    }
    if a.dist(b) <= tol::GEOM || b.dist(c) <= tol::GEOM || a.dist(c) <= tol::GEOM {
        return Err(Error::Degenerate("triangle vertices must be pairwise distinct".into()));
    }
    let wide = 2.0 * PI / 3.0;
    for (v, p, q) in [(a, b, c), (b, c, a), (c, a, b)] {
        if angle_of(p - v, q - v) >= wide {
            return Ok(v);
        }
    }
    let away = if (b - a).cross(c - a) > 0.0 { Side::Right } else { Side::Left };
    let e = equilateral_third(a, b, away)?;
    let center = (a + b + e) / 3.0;
    let dir = (c - e).normalized().expect("c differs from e");
    let t = 2.0 * (center - e).dot(dir);
    Ok(e + dir * t)
}

/// Counterclockwise convex hull (Andrew's monotone chain). Collinear
/// boundary points are dropped; coincident input collapses to one point.
pub fn convex_hull(pts: &[Point]) -> Vec<Point> {
    let mut p: Vec<Point> = pts.to_vec();
    p.sort_by(|u, v| u.x.total_cmp(&v.x).then(u.y.total_cmp(&v.y)));
    p.dedup_by(|u, v| u.dist(*v) <= tol::ALGEBRAIC);
    if p.len() <= 2 {
        return p;
    }
    let turn = |o: Point, a: Point, b: Point| (a - o).cross(b - o);
    let mut hull: Vec<Point> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while hull.len() >= start + 2
                && turn(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0
            {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

/// Whether `q` lies in the convex polygon `hull` (counterclockwise), with
/// slack `eps`. Degenerate hulls (point, segment) are handled.
pub fn hull_contains(hull: &[Point], q: Point, eps: f64) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0].dist(q) <= eps,
        2 => point_segment_distance(q, hull[0], hull[1]) <= eps,
        n => (0..n).all(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            let len = a.dist(b);
            (b - a).cross(q - a) / len >= -eps
        }),
    }
}

pub fn point_segment_distance(q: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return q.dist(a);
    }
    let t = ((q - a).dot(d) / len2).clamp(0.0, 1.0);
    q.dist(a + d * t)
}

/// Perimeter of a closed polygon.
pub fn perimeter(poly: &[Point]) -> f64 {
    match poly.len() {
        0 | 1 => 0.0,
        2 => 2.0 * poly[0].dist(poly[1]),
        n => (0..n).map(|i| poly[i].dist(poly[(i + 1) % n])).sum(),
    }
}
