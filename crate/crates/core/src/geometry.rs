//! Exact planar geometry for the shape families used by the model: disks,
//! stadiums ("disk-rectangles"), pair-disks and convex polygons.
//!
//! Every shape exposes its boundary as a counterclockwise sequence of
//! [`Piece`]s (circular arcs and straight segments). Overlap areas and
//! boundary-arc lengths are computed by splitting those pieces where they
//! cross the other shape's boundary and integrating Green's area form over
//! the retained sub-pieces, so the results are exact up to rounding.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use smallvec::SmallVec;
use thiserror::Error;

/// Relative tolerance used for boundary membership.
const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("elongation must be non-negative and finite, got {0}")]
    BadElongation(f64),
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertices must be finite, counterclockwise and convex")]
    NotConvexCcw,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Unit vector at angle `theta`.
    pub fn unit(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point { x: c, y: s }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Rotates counterclockwise by `angle` about the origin.
    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point {
            x: c * self.x - s * self.y,
            y: s * self.x + c * self.y,
        }
    }

    /// Left-hand perpendicular.
    pub fn perp(self) -> Self {
        Point {
            x: -self.y,
            y: self.x,
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Undirected line `{x : x·n(θ) = p}` where `n(θ) = (cos θ, sin θ)`.
///
/// `(θ, p)` and `(θ + π, −p)` are the same line; [`Line::new`] stores the
/// canonical form with `θ ∈ [0, π)`. Points on the line are addressed by a
/// signed parameter `t` along the direction `n(θ + π/2)`, measured from the
/// foot of the perpendicular from the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    theta: f64,
    p: f64,
}

impl Line {
    pub fn new(theta: f64, p: f64) -> Self {
        let mut theta = theta.rem_euclid(TAU);
        let mut p = p;
        if theta >= PI {
            theta -= PI;
            p = -p;
        }
        // rem_euclid can return TAU itself for tiny negative inputs
        if theta >= PI {
            theta = 0.0;
        }
        Line { theta, p }
    }

    /// Line through `point` with unit normal at angle `theta`.
    pub fn through(point: Point, theta: f64) -> Self {
        Line::new(theta, point.dot(Point::unit(theta)))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn normal(&self) -> Point {
        Point::unit(self.theta)
    }

    pub fn direction(&self) -> Point {
        self.normal().perp()
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.normal() * self.p + self.direction() * t
    }

    pub fn param_of(&self, point: Point) -> f64 {
        point.dot(self.direction())
    }

    /// Signed distance of `point` from the line along the normal.
    pub fn offset_of(&self, point: Point) -> f64 {
        point.dot(self.normal()) - self.p
    }
}

/// Closed parameter interval along a line.
pub type Interval = (f64, f64);

pub type Intervals = SmallVec<[Interval; 2]>;

/// Area and perimeter of a set, the only inputs the kinematic formulas need.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measures {
    pub area: f64,
    pub perimeter: f64,
}

impl Measures {
    /// A single point: zero area and zero perimeter.
    pub const POINT: Measures = Measures {
        area: 0.0,
        perimeter: 0.0,
    };

    pub fn new(area: f64, perimeter: f64) -> Self {
        Measures { area, perimeter }
    }

    /// `L / 2π`, the radius of a disk with the same perimeter.
    pub fn equivalent_radius(&self) -> f64 {
        self.perimeter / TAU
    }
}

/// The pair-disk elongation `a` is the distance from the shape's center to
/// each disk center, so the two disks are `2a` apart. Every pair-disk
/// formula goes through this conversion.
pub fn pair_disk_center_separation(elongation: f64) -> f64 {
    2.0 * elongation
}

/// Lens area of two radius-`r` disks whose centers are `d` apart.
pub fn equal_disk_lens_area(r: f64, d: f64) -> f64 {
    if d >= 2.0 * r {
        return 0.0;
    }
    2.0 * r * r * (d / (2.0 * r)).acos() - 0.5 * d * (4.0 * r * r - d * d).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConvexShape {
    Disk {
        center: Point,
        radius: f64,
    },
    /// Rectangle of length `2a` and width `2r` capped by two half-disks.
    Stadium {
        center: Point,
        radius: f64,
        elongation: f64,
        orientation: f64,
    },
    /// Union of two radius-`r` disks centered at `center ± a·u(orientation)`.
    /// Not convex for `a > 0` but accepted everywhere.
    PairDisk {
        center: Point,
        radius: f64,
        elongation: f64,
        orientation: f64,
    },
    /// Convex polygon, vertices counterclockwise.
    Polygon { vertices: Vec<Point> },
}

fn check_radius(r: f64) -> Result<(), GeometryError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::BadRadius(r))
    }
}

fn check_elongation(a: f64) -> Result<(), GeometryError> {
    if a >= 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::BadElongation(a))
    }
}

impl ConvexShape {
    pub fn disk(center: Point, radius: f64) -> Result<Self, GeometryError> {
        check_radius(radius)?;
        Ok(ConvexShape::Disk { center, radius })
    }

    pub fn stadium(
        center: Point,
        radius: f64,
        elongation: f64,
        orientation: f64,
    ) -> Result<Self, GeometryError> {
        check_radius(radius)?;
        check_elongation(elongation)?;
        Ok(ConvexShape::Stadium {
            center,
            radius,
            elongation,
            orientation,
        })
    }

    pub fn pair_disk(
        center: Point,
        radius: f64,
        elongation: f64,
        orientation: f64,
    ) -> Result<Self, GeometryError> {
        check_radius(radius)?;
        check_elongation(elongation)?;
        Ok(ConvexShape::PairDisk {
            center,
            radius,
            elongation,
            orientation,
        })
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        if !vertices.iter().all(|v| v.is_finite()) {
            return Err(GeometryError::NotConvexCcw);
        }
        let scale = vertices
            .iter()
            .map(|v| (*v - vertices[0]).norm())
            .fold(0.0, f64::max);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).cross(c - b) < -MEMBERSHIP_TOL * scale * scale {
                return Err(GeometryError::NotConvexCcw);
            }
        }
        let shape = ConvexShape::Polygon { vertices };
        if shape.area() <= 0.0 {
            return Err(GeometryError::NotConvexCcw);
        }
        Ok(shape)
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeometryError> {
        ConvexShape::polygon(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn area(&self) -> f64 {
        match *self {
            ConvexShape::Disk { radius, .. } => PI * radius * radius,
            ConvexShape::Stadium {
                radius, elongation, ..
            } => PI * radius * radius + 4.0 * elongation * radius,
            ConvexShape::PairDisk {
                radius, elongation, ..
            } => {
                let d = pair_disk_center_separation(elongation);
                TAU * radius * radius - equal_disk_lens_area(radius, d)
            }
            ConvexShape::Polygon { ref vertices } => {
                let n = vertices.len();
                0.5 * (0..n)
                    .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
                    .sum::<f64>()
            }
        }
    }

    pub fn perimeter(&self) -> f64 {
        match *self {
            ConvexShape::Disk { radius, .. } => TAU * radius,
            ConvexShape::Stadium {
                radius, elongation, ..
            } => TAU * radius + 4.0 * elongation,
            ConvexShape::PairDisk {
                radius, elongation, ..
            } => {
                let d = pair_disk_center_separation(elongation);
                if d < 2.0 * radius {
                    4.0 * radius * (PI - (d / (2.0 * radius)).acos())
                } else {
                    4.0 * PI * radius
                }
            }
            ConvexShape::Polygon { ref vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| vertices[i].distance(vertices[(i + 1) % n]))
                    .sum()
            }
        }
    }

    pub fn measures(&self) -> Measures {
        Measures::new(self.area(), self.perimeter())
    }

    /// Reference point: the symmetry center, or the centroid of a polygon.
    pub fn center(&self) -> Point {
        match *self {
            ConvexShape::Disk { center, .. }
            | ConvexShape::Stadium { center, .. }
            | ConvexShape::PairDisk { center, .. } => center,
            ConvexShape::Polygon { ref vertices } => polygon_centroid(vertices),
        }
    }

    pub fn orientation(&self) -> f64 {
        match *self {
            ConvexShape::Stadium { orientation, .. } | ConvexShape::PairDisk { orientation, .. } => {
                orientation
            }
            _ => 0.0,
        }
    }

    /// Radius of the smallest disk about [`center`](Self::center) holding the shape.
    pub fn bounding_radius(&self) -> f64 {
        match *self {
            ConvexShape::Disk { radius, .. } => radius,
            ConvexShape::Stadium {
                radius, elongation, ..
            }
            | ConvexShape::PairDisk {
                radius, elongation, ..
            } => radius + elongation,
            ConvexShape::Polygon { ref vertices } => {
                let c = polygon_centroid(vertices);
                vertices.iter().map(|v| v.distance(c)).fold(0.0, f64::max)
            }
        }
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bbox(&self) -> (Point, Point) {
        match *self {
            ConvexShape::Disk { center, radius } => (
                Point::new(center.x - radius, center.y - radius),
                Point::new(center.x + radius, center.y + radius),
            ),
            ConvexShape::Stadium {
                center,
                radius,
                elongation,
                orientation,
            }
            | ConvexShape::PairDisk {
                center,
                radius,
                elongation,
                orientation,
            } => {
                let u = Point::unit(orientation) * elongation;
                let hx = u.x.abs() + radius;
                let hy = u.y.abs() + radius;
                (
                    Point::new(center.x - hx, center.y - hy),
                    Point::new(center.x + hx, center.y + hy),
                )
            }
            ConvexShape::Polygon { ref vertices } => {
                let mut lo = vertices[0];
                let mut hi = vertices[0];
                for v in vertices {
                    lo = Point::new(lo.x.min(v.x), lo.y.min(v.y));
                    hi = Point::new(hi.x.max(v.x), hi.y.max(v.y));
                }
                (lo, hi)
            }
        }
    }

    /// `false` only for a pair-disk whose disks are apart (`a > 0`).
    pub fn is_convex(&self) -> bool {
        !matches!(*self, ConvexShape::PairDisk { elongation, .. } if elongation > 0.0)
    }

    /// Copy of this shape moved so its reference point is `position` and
    /// rotated by `rotation` about that point.
    pub fn placed(&self, position: Point, rotation: f64) -> ConvexShape {
        match *self {
            ConvexShape::Disk { radius, .. } => ConvexShape::Disk {
                center: position,
                radius,
            },
            ConvexShape::Stadium {
                radius,
                elongation,
                orientation,
                ..
            } => ConvexShape::Stadium {
                center: position,
                radius,
                elongation,
                orientation: orientation + rotation,
            },
            ConvexShape::PairDisk {
                radius,
                elongation,
                orientation,
                ..
            } => ConvexShape::PairDisk {
                center: position,
                radius,
                elongation,
                orientation: orientation + rotation,
            },
            ConvexShape::Polygon { ref vertices } => {
                let c = polygon_centroid(vertices);
                ConvexShape::Polygon {
                    vertices: vertices
                        .iter()
                        .map(|v| (*v - c).rotate(rotation) + position)
                        .collect(),
                }
            }
        }
    }

    /// Closed membership; points on the boundary are inside.
    pub fn contains(&self, x: Point) -> bool {
        match *self {
            ConvexShape::Disk { center, radius } => in_disk(center, radius, x),
            ConvexShape::Stadium {
                center,
                radius,
                elongation,
                orientation,
            } => {
                let q = (x - center).rotate(-orientation);
                let nearest = Point::new(q.x.clamp(-elongation, elongation), 0.0);
                in_disk(nearest, radius, q)
            }
            ConvexShape::PairDisk {
                center,
                radius,
                elongation,
                orientation,
            } => {
                let u = Point::unit(orientation) * elongation;
                in_disk(center + u, radius, x) || in_disk(center - u, radius, x)
            }
            ConvexShape::Polygon { ref vertices } => {
                let n = vertices.len();
                let scale = self.bounding_radius();
                (0..n).all(|i| {
                    let a = vertices[i];
                    let e = vertices[(i + 1) % n] - a;
                    e.cross(x - a) >= -MEMBERSHIP_TOL * scale * e.norm()
                })
            }
        }
    }

    /// Parameter intervals (sorted, disjoint) of `self ∩ line`.
    ///
    /// A tangent line yields a single zero-length interval. Only the
    /// pair-disk can produce two intervals.
    pub fn chord_intervals(&self, line: &Line) -> Intervals {
        let mut out = Intervals::new();
        match *self {
            ConvexShape::Disk { center, radius } => {
                if let Some(iv) = disk_interval(center, radius, line) {
                    out.push(iv);
                }
            }
            ConvexShape::Stadium {
                center,
                radius,
                elongation,
                orientation,
            } => {
                let u = Point::unit(orientation) * elongation;
                let mut hull: Option<Interval> = None;
                let mut absorb = |iv: Interval| {
                    hull = Some(match hull {
                        None => iv,
                        Some((a, b)) => (a.min(iv.0), b.max(iv.1)),
                    });
                };
                if let Some(iv) = disk_interval(center + u, radius, line) {
                    absorb(iv);
                }
                if let Some(iv) = disk_interval(center - u, radius, line) {
                    absorb(iv);
                }
                if elongation > 0.0 {
                    let v = Point::unit(orientation).perp() * radius;
                    let rect = [
                        center - u - v,
                        center + u - v,
                        center + u + v,
                        center - u + v,
                    ];
                    if let Some(iv) = convex_polygon_interval(&rect, line) {
                        absorb(iv);
                    }
                }
                if let Some(iv) = hull {
                    out.push(iv);
                }
            }
            ConvexShape::PairDisk {
                center,
                radius,
                elongation,
                orientation,
            } => {
                let u = Point::unit(orientation) * elongation;
                let mut parts: SmallVec<[Interval; 2]> = [
                    disk_interval(center + u, radius, line),
                    disk_interval(center - u, radius, line),
                ]
                .into_iter()
                .flatten()
                .collect();
                parts.sort_by(|a, b| a.0.total_cmp(&b.0));
                for iv in parts {
                    match out.last_mut() {
                        Some(last) if iv.0 <= last.1 => last.1 = last.1.max(iv.1),
                        _ => out.push(iv),
                    }
                }
            }
            ConvexShape::Polygon { ref vertices } => {
                if let Some(iv) = convex_polygon_interval(vertices, line) {
                    out.push(iv);
                }
            }
        }
        out
    }

    /// Total length of `self ∩ line` (one-dimensional measure).
    pub fn chord_length(&self, line: &Line) -> f64 {
        self.chord_intervals(line)
            .iter()
            .map(|(a, b)| (b - a).max(0.0))
            .sum()
    }

    /// Points where `line` crosses the boundary, sorted along the line.
    /// A tangency contributes one point.
    pub fn boundary_line_intersections(&self, line: &Line) -> Vec<Point> {
        let tangent_tol = 1e-12 * self.bounding_radius();
        let mut points = Vec::new();
        for (a, b) in self.chord_intervals(line) {
            points.push(line.point_at(a));
            if b - a > tangent_tol {
                points.push(line.point_at(b));
            }
        }
        points
    }

    /// Counterclockwise boundary pieces.
    pub fn boundary_pieces(&self) -> Vec<Piece> {
        match *self {
            ConvexShape::Disk { center, radius } => vec![Piece::Arc {
                center,
                radius,
                start: 0.0,
                sweep: TAU,
            }],
            ConvexShape::Stadium {
                center,
                radius,
                elongation,
                orientation,
            } => {
                let u = Point::unit(orientation) * elongation;
                let v = Point::unit(orientation).perp() * radius;
                let mut pieces = Vec::with_capacity(4);
                if elongation > 0.0 {
                    pieces.push(Piece::Segment {
                        from: center - u - v,
                        to: center + u - v,
                    });
                }
                pieces.push(Piece::Arc {
                    center: center + u,
                    radius,
                    start: orientation - PI / 2.0,
                    sweep: PI,
                });
                if elongation > 0.0 {
                    pieces.push(Piece::Segment {
                        from: center + u + v,
                        to: center - u + v,
                    });
                }
                pieces.push(Piece::Arc {
                    center: center - u,
                    radius,
                    start: orientation + PI / 2.0,
                    sweep: PI,
                });
                pieces
            }
            ConvexShape::PairDisk {
                center,
                radius,
                elongation,
                orientation,
            } => {
                let u = Point::unit(orientation) * elongation;
                let d = pair_disk_center_separation(elongation);
                if d >= 2.0 * radius {
                    vec![
                        Piece::Arc {
                            center: center + u,
                            radius,
                            start: 0.0,
                            sweep: TAU,
                        },
                        Piece::Arc {
                            center: center - u,
                            radius,
                            start: 0.0,
                            sweep: TAU,
                        },
                    ]
                } else {
                    // half-angle of the arc each disk hides inside the other
                    let alpha = (d / (2.0 * radius)).acos();
                    vec![
                        Piece::Arc {
                            center: center + u,
                            radius,
                            start: orientation + PI + alpha,
                            sweep: TAU - 2.0 * alpha,
                        },
                        Piece::Arc {
                            center: center - u,
                            radius,
                            start: orientation + alpha,
                            sweep: TAU - 2.0 * alpha,
                        },
                    ]
                }
            }
            ConvexShape::Polygon { ref vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| Piece::Segment {
                        from: vertices[i],
                        to: vertices[(i + 1) % n],
                    })
                    .collect()
            }
        }
    }

    /// Uniform point in the shape by rejection from its bounding box.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        if let ConvexShape::Disk { center, radius } = *self {
            loop {
                let x = rng.random::<f64>() * 2.0 - 1.0;
                let y = rng.random::<f64>() * 2.0 - 1.0;
                if x * x + y * y <= 1.0 {
                    return center + Point::new(x, y) * radius;
                }
            }
        }
        let (lo, hi) = self.bbox();
        loop {
            let p = Point::new(
                lo.x + (hi.x - lo.x) * rng.random::<f64>(),
                lo.y + (hi.y - lo.y) * rng.random::<f64>(),
            );
            if self.contains(p) {
                return p;
            }
        }
    }
}

fn in_disk(center: Point, radius: f64, x: Point) -> bool {
    let bound = radius * (1.0 + MEMBERSHIP_TOL);
    (x - center).norm_sq() <= bound * bound
}

fn polygon_centroid(vertices: &[Point]) -> Point {
    let n = vertices.len();
    let mut area2 = 0.0;
    let mut acc = Point::ORIGIN;
    let origin = vertices[0];
    for i in 0..n {
        let a = vertices[i] - origin;
        let b = vertices[(i + 1) % n] - origin;
        let w = a.cross(b);
        area2 += w;
        acc = acc + (a + b) * w;
    }
    origin + acc * (1.0 / (3.0 * area2))
}

fn disk_interval(center: Point, radius: f64, line: &Line) -> Option<Interval> {
    let q = line.offset_of(center);
    if q.abs() > radius {
        return None;
    }
    let half = (radius * radius - q * q).max(0.0).sqrt();
    let t0 = line.param_of(center);
    Some((t0 - half, t0 + half))
}

/// Cyrus–Beck clipping of a line against a counterclockwise convex polygon.
fn convex_polygon_interval(vertices: &[Point], line: &Line) -> Option<Interval> {
    let n = vertices.len();
    let base = line.point_at(0.0);
    let dir = line.direction();
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..n {
        let a = vertices[i];
        let e = vertices[(i + 1) % n] - a;
        // outward normal of a CCW edge
        let out = Point::new(e.y, -e.x);
        let num = (base - a).dot(out);
        let den = dir.dot(out);
        if den == 0.0 {
            if num > 0.0 {
                return None;
            }
        } else {
            let t = -num / den;
            if den > 0.0 {
                hi = hi.min(t);
            } else {
                lo = lo.max(t);
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// A counterclockwise boundary piece: straight segment or circular arc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Piece {
    Segment {
        from: Point,
        to: Point,
    },
    /// Arc of the circle `(center, radius)` from angle `start` sweeping
    /// counterclockwise by `sweep > 0`.
    Arc {
        center: Point,
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Piece {
    pub fn length(&self) -> f64 {
        match *self {
            Piece::Segment { from, to } => from.distance(to),
            Piece::Arc { radius, sweep, .. } => radius * sweep,
        }
    }

    /// Point at normalized parameter `s ∈ [0, 1]`.
    pub fn point_at(&self, s: f64) -> Point {
        match *self {
            Piece::Segment { from, to } => from + (to - from) * s,
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => center + Point::unit(start + sweep * s) * radius,
        }
    }

    /// Unit normal pointing to the left of the direction of travel, i.e.
    /// into the interior of a counterclockwise boundary.
    pub fn left_normal_at(&self, s: f64) -> Point {
        match *self {
            Piece::Segment { from, to } => {
                let d = to - from;
                d.perp() * (1.0 / d.norm())
            }
            Piece::Arc { start, sweep, .. } => -Point::unit(start + sweep * s),
        }
    }

    /// `½ ∫ (x dy − y dx)` over the sub-piece `[s0, s1]`.
    pub fn area_term(&self, s0: f64, s1: f64) -> f64 {
        match *self {
            Piece::Segment { .. } => {
                let a = self.point_at(s0);
                let b = self.point_at(s1);
                0.5 * a.cross(b)
            }
            Piece::Arc {
                center,
                radius,
                start,
                sweep,
            } => {
                let p0 = start + sweep * s0;
                let p1 = start + sweep * s1;
                0.5 * (radius * radius * (p1 - p0)
                    + radius * (center.x * (p1.sin() - p0.sin()) - center.y * (p1.cos() - p0.cos())))
            }
        }
    }

    /// Parameters in `(0, 1)` where this piece meets the supporting line or
    /// circle of `other`.
    fn crossings_with(&self, other: &Piece, out: &mut Vec<f64>) {
        let mut hits: SmallVec<[Point; 2]> = SmallVec::new();
        match (*self, *other) {
            (Piece::Segment { from, to }, Piece::Segment { from: q, to: q2 }) => {
                let v = to - from;
                let w = q2 - q;
                let den = v.cross(w);
                if den != 0.0 {
                    out.push((q - from).cross(w) / den);
                }
                return;
            }
            (Piece::Segment { from, to }, Piece::Arc { center, radius, .. }) => {
                let v = to - from;
                let f = from - center;
                let a = v.norm_sq();
                let b = 2.0 * f.dot(v);
                let c = f.norm_sq() - radius * radius;
                let disc = b * b - 4.0 * a * c;
                if disc >= 0.0 && a > 0.0 {
                    let sq = disc.sqrt();
                    out.push((-b - sq) / (2.0 * a));
                    out.push((-b + sq) / (2.0 * a));
                }
                return;
            }
            (Piece::Arc { center, radius, .. }, Piece::Segment { from, to }) => {
                let dir = to - from;
                let len = dir.norm();
                if len > 0.0 {
                    let line = Line::through(from, dir.perp().y.atan2(dir.perp().x));
                    if let Some((a, b)) = disk_interval(center, radius, &line) {
                        hits.push(line.point_at(a));
                        hits.push(line.point_at(b));
                    }
                }
            }
            (
                Piece::Arc { center, radius, .. },
                Piece::Arc {
                    center: c2,
                    radius: r2,
                    ..
                },
            ) => {
                let delta = c2 - center;
                let d = delta.norm();
                if d > 0.0 && d <= radius + r2 && d >= (radius - r2).abs() {
                    let a = (radius * radius - r2 * r2 + d * d) / (2.0 * d);
                    let h = (radius * radius - a * a).max(0.0).sqrt();
                    let mid = center + delta * (a / d);
                    let off = delta.perp() * (h / d);
                    hits.push(mid + off);
                    hits.push(mid - off);
                }
            }
        }
        if let Piece::Arc {
            center,
            start,
            sweep,
            ..
        } = *self
        {
            for h in hits {
                let phi = (h.y - center.y).atan2(h.x - center.x);
                out.push((phi - start).rem_euclid(TAU) / sweep);
            }
        }
    }
}

/// Sub-pieces of `piece` split wherever it crosses the boundary of `other`.
fn split_against(piece: &Piece, other: &[Piece]) -> Vec<f64> {
    let mut cuts = vec![0.0, 1.0];
    for q in other {
        piece.crossings_with(q, &mut cuts);
    }
    cuts.retain(|s| s.is_finite() && *s >= 0.0 && *s <= 1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    cuts
}

fn offset_scale(s1: &ConvexShape, s2: &ConvexShape) -> f64 {
    1e-9 * s1.bounding_radius().max(s2.bounding_radius())
}

fn disks_of(s: &ConvexShape) -> Option<(Point, f64)> {
    match *s {
        ConvexShape::Disk { center, radius } => Some((center, radius)),
        _ => None,
    }
}

/// Area of intersection of two disks.
pub fn disk_overlap_area(c1: Point, r1: f64, c2: Point, r2: f64) -> f64 {
    let d = c1.distance(c2);
    if d >= r1 + r2 {
        return 0.0;
    }
    if d <= (r1 - r2).abs() {
        let r = r1.min(r2);
        return PI * r * r;
    }
    let a1 = ((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1)).clamp(-1.0, 1.0).acos();
    let a2 = ((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2)).clamp(-1.0, 1.0).acos();
    let k = ((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)).max(0.0);
    r1 * r1 * a1 + r2 * r2 * a2 - 0.5 * k.sqrt()
}

/// `|s1 ∩ s2|`.
///
/// Disk pairs use the lens formula; everything else integrates Green's area
/// form over the boundary of the intersection.
pub fn overlap_area(s1: &ConvexShape, s2: &ConvexShape) -> f64 {
    if let (Some((c1, r1)), Some((c2, r2))) = (disks_of(s1), disks_of(s2)) {
        return disk_overlap_area(c1, r1, c2, r2);
    }
    if s1.center().distance(s2.center()) > s1.bounding_radius() + s2.bounding_radius() {
        return 0.0;
    }
    let eps = offset_scale(s1, s2);
    let b1 = s1.boundary_pieces();
    let b2 = s2.boundary_pieces();
    let mut total = 0.0;
    for piece in &b1 {
        let cuts = split_against(piece, &b2);
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let m = piece.point_at(mid);
            let inward = piece.left_normal_at(mid);
            if s2.contains(m + inward * eps) {
                total += piece.area_term(w[0], w[1]);
            }
        }
    }
    for piece in &b2 {
        let cuts = split_against(piece, &b1);
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let m = piece.point_at(mid);
            let inward = piece.left_normal_at(mid);
            if s1.contains(m + inward * eps) && s1.contains(m - inward * eps) {
                total += piece.area_term(w[0], w[1]);
            }
        }
    }
    total.clamp(0.0, s1.area().min(s2.area()))
}

/// Length of `∂s1 ∩ s2`.
pub fn boundary_arc_in(s1: &ConvexShape, s2: &ConvexShape) -> f64 {
    if s1.center().distance(s2.center()) > s1.bounding_radius() + s2.bounding_radius() {
        return 0.0;
    }
    let b2 = s2.boundary_pieces();
    let mut total = 0.0;
    for piece in s1.boundary_pieces() {
        let cuts = split_against(&piece, &b2);
        let len = piece.length();
        for w in cuts.windows(2) {
            if s2.contains(piece.point_at(0.5 * (w[0] + w[1]))) {
                total += len * (w[1] - w[0]);
            }
        }
    }
    total
}

/// Whether the two shapes share interior area (touching does not count).
pub fn intersects(s1: &ConvexShape, s2: &ConvexShape) -> bool {
    if let (Some((c1, r1)), Some((c2, r2))) = (disks_of(s1), disks_of(s2)) {
        return c1.distance(c2) < r1 + r2;
    }
    if s1.center().distance(s2.center()) > s1.bounding_radius() + s2.bounding_radius() {
        return false;
    }
    s1.contains(s2.center()) || s2.contains(s1.center()) || overlap_area(s1, s2) > 0.0
}
