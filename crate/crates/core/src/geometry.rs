//! Planar primitives: points, circles, circle–circle intersection and
//! tolerance-based containment.
//!
//! All classification thresholds are relative: see [`tolerance`].

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative factor used by [`tolerance`].
pub const REL_TOL: f64 = 1e-9;

/// Classification tolerance for quantities of the given magnitudes:
/// `1e-9 * max(1, |s| for s in scales)`.
pub fn tolerance(scales: &[f64]) -> f64 {
    REL_TOL * scales.iter().fold(1.0_f64, |m, s| m.max(s.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite(), "non-finite point ({x}, {y})");
        Point2 { x, y }
    }

    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point2 { x, y })
        } else {
            Err(Error::invalid(format!("non-finite point ({x}, {y})")))
        }
    }

    #[inline]
    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    #[inline]
    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Counter-clockwise quarter turn.
    #[inline]
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    /// Rotates about the origin by `angle` radians.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

/// An anchor position together with an estimated range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    /// Panics if `radius` is negative or not finite.
    pub fn new(center: Point2, radius: f64) -> Self {
        Self::try_new(center, radius).expect("invalid circle")
    }

    pub fn try_new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidDistance(radius));
        }
        Ok(Circle { center, radius })
    }

    /// Signed gap between `p` and the circle boundary (negative inside).
    #[inline]
    pub fn residual(&self, p: Point2) -> f64 {
        p.distance(self.center) - self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntersectionResult {
    /// Circles are disjoint or one lies strictly inside the other.
    Empty,
    /// Circles touch at a single point on the line of centers.
    Tangent(Point2),
    /// Two distinct crossing points. The first lies to the left of the
    /// directed line from the first center to the second.
    Two(Point2, Point2),
    /// Identical circles; infinitely many common points.
    Coincident,
}

impl IntersectionResult {
    pub fn points(&self) -> impl Iterator<Item = Point2> {
        let (a, b) = match *self {
            IntersectionResult::Tangent(p) => (Some(p), None),
            IntersectionResult::Two(p, q) => (Some(p), Some(q)),
            _ => (None, None),
        };
        a.into_iter().chain(b)
    }
}

/// Intersects two circles with `tau = tolerance(&[r_a, r_b, d])`.
///
/// Circles further than `tau` apart (outside or nested) are `Empty`. Within
/// that band the result is `Tangent` when the half-chord is at most `tau`,
/// otherwise `Two`.
pub fn circle_intersections(a: &Circle, b: &Circle) -> IntersectionResult {
    let delta = b.center - a.center;
    let d = delta.norm();
    let (ra, rb) = (a.radius, b.radius);
    let tau = tolerance(&[ra, rb, d]);

    if d <= tau {
        // concentric: either the same circle or nested without contact
        return if (ra - rb).abs() <= tau {
            IntersectionResult::Coincident
        } else {
            IntersectionResult::Empty
        };
    }

    let outer = ra + rb;
    let inner = (ra - rb).abs();
    if d > outer + tau || d < inner - tau {
        return IntersectionResult::Empty;
    }

    let u = delta * (1.0 / d);
    // signed distance from a.center to the radical line along u
    let along = 0.5 * (d + (ra - rb) * (ra + rb) / d);
    let foot = a.center + u * along;

    // Contact is decided on the half-chord, not on the gap: a gap of tau on
    // the crossing side still leaves points about sqrt(2 r tau) apart.
    let h = ((ra - along) * (ra + along)).max(0.0).sqrt();
    if h <= tau {
        return IntersectionResult::Tangent(contact_point(a, b, u, along));
    }
    let offset = u.perp() * h;
    IntersectionResult::Two(foot + offset, foot - offset)
}

/// Midpoint of the nearest points of two touching circles. The radical-line
/// foot is not used here: for nested circles of similar size it slides far
/// along the centre line when the gap changes slightly.
fn contact_point(a: &Circle, b: &Circle, u: Point2, along: f64) -> Point2 {
    let on_a = a.center + u * along.signum() * a.radius;
    let off = on_a - b.center;
    let len = off.norm();
    if len == 0.0 {
        return on_a;
    }
    let on_b = b.center + off * (b.radius / len);
    (on_a + on_b) * 0.5
}

/// Inclusive containment: `|p - c.center| <= c.radius + eps`.
#[inline]
pub fn point_in_circle(p: Point2, c: &Circle, eps: f64) -> bool {
    p.distance(c.center) <= c.radius + eps
}

/// Component-wise arithmetic mean.
pub fn centroid(points: &[Point2]) -> Result<Point2> {
    if points.is_empty() {
        return Err(Error::EmptyCluster);
    }
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Ok(Point2::new(sx / n, sy / n))
}
