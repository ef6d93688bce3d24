//! Planar orientation and segment-intersection predicates, plus the
//! barrier test built on them.
//!
//! Orientation uses a signed cross product rather than slope comparison so
//! vertical segments need no special casing. Collinear overlap counts as
//! intersection: a barrier lying along the line between two agents still
//! separates them.

use crate::scene::{Point2, SemanticMap};

/// Tolerance on the signed area below which three points count as collinear.
pub const ORIENTATION_EPS: f64 = 1e-9;

/// Turn direction of the ordered triple (a, b, c).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
    Collinear,
}

/// Orientation of c relative to the directed line a -> b.
pub fn orientation(a: Point2, b: Point2, c: Point2) -> Orientation {
    let cross = b.sub(a).cross(c.sub(a));
    if cross.abs() <= ORIENTATION_EPS {
        Orientation::Collinear
    } else if cross > 0.0 {
        Orientation::Counterclockwise
    } else {
        Orientation::Clockwise
    }
}

/// True iff `p` lies within the axis-aligned bounding box of segment (a, b).
/// Only meaningful when p is already collinear with the segment.
fn on_segment(p: Point2, a: Point2, b: Point2) -> bool {
    p.x >= a.x.min(b.x) - ORIENTATION_EPS
        && p.x <= a.x.max(b.x) + ORIENTATION_EPS
        && p.y >= a.y.min(b.y) - ORIENTATION_EPS
        && p.y <= a.y.max(b.y) + ORIENTATION_EPS
}

/// True iff the closed segments share at least one point.
pub fn segments_intersect(s1: (Point2, Point2), s2: (Point2, Point2)) -> bool {
    let (a, b) = s1;
    let (c, d) = s2;

    let o1 = orientation(a, b, c);
    let o2 = orientation(a, b, d);
    let o3 = orientation(c, d, a);
    let o4 = orientation(c, d, b);

    if o1 != o2 && o3 != o4 {
        return true;
    }

    // Collinear cases: an endpoint of one segment lying on the other.
    (o1 == Orientation::Collinear && on_segment(c, a, b))
        || (o2 == Orientation::Collinear && on_segment(d, a, b))
        || (o3 == Orientation::Collinear && on_segment(a, c, d))
        || (o4 == Orientation::Collinear && on_segment(b, c, d))
}

/// Distance from `p` to the closed segment (a, b).
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b.sub(a);
    let len_sq = ab.dot(ab);
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = (p.sub(a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.distance(a.add(ab.scale(t)))
}

/// Closest point on the closed segment (a, b) to `p`, with its parameter
/// `t in [0, 1]` along the segment.
pub fn project_on_segment(p: Point2, a: Point2, b: Point2) -> (Point2, f64) {
    let ab = b.sub(a);
    let len_sq = ab.dot(ab);
    if len_sq == 0.0 {
        return (a, 0.0);
    }
    let t = (p.sub(a).dot(ab) / len_sq).clamp(0.0, 1.0);
    (a.add(ab.scale(t)), t)
}

/// True iff any barrier polyline segment crosses the straight line between
/// the two positions.
pub fn barrier_between(pi: Point2, pj: Point2, map: &SemanticMap) -> bool {
    map.barriers()
        .any(|barrier| barrier.segments().any(|seg| segments_intersect((pi, pj), seg)))
}
