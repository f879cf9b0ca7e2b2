//! Geometric kernel: vectors, planes in the (u, rho) chart, lines, convex
//! polyhedral domains and plane sections.
//!
//! All predicates use the relative tolerance [`EPS_GEOM`]. Anything that falls
//! inside it is reported as [`Error::Degeneracy`](crate::Error::Degeneracy).

mod domain;
mod polygon;
mod vector;

pub use domain::{build_domain, Domain, DomainEdge, Facet, Halfspace};
pub use polygon::{intersect_plane_domain, Location, Polygon2};
pub use vector::{solve2, solve3, Vec2, Vec3};

use crate::error::{degenerate, invalid, Result};
use serde::{Deserialize, Serialize};

/// Relative tolerance for parallelism, coplanarity and incidence tests.
pub const EPS_GEOM: f64 = 1e-9;

/// The plane {x : <x,u> = rho} with |u| = 1 and rho >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub u: Vec3,
    pub rho: f64,
}

/// The plane with unit normal `u` at distance `rho` from the origin.
///
/// For `rho == 0` the normal is flipped to the lexicographically larger of
/// `u` and `-u`, so every plane has exactly one chart.
pub fn plane_from_chart(u: Vec3, rho: f64) -> Result<Plane> {
    if !u.is_finite() || !rho.is_finite() {
        return invalid("plane chart must be finite");
    }
    if (u.norm() - 1.0).abs() > EPS_GEOM {
        return invalid(format!("plane normal must be a unit vector, |u| = {}", u.norm()));
    }
    if rho < 0.0 {
        return invalid(format!("plane distance must be nonnegative, got {rho}"));
    }
    let mut u = u;
    if rho == 0.0 && (-u).lex_cmp(u).is_gt() {
        u = -u;
    }
    Ok(Plane { u, rho })
}

impl Plane {
    /// Plane through `point` with normal direction `normal` (any length).
    pub fn through(point: Vec3, normal: Vec3) -> Result<Plane> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() || !point.is_finite() {
            return invalid("plane normal must be finite and nonzero");
        }
        let u = normal / n;
        let rho = u.dot(point);
        if rho < 0.0 {
            plane_from_chart(-u, -rho)
        } else {
            plane_from_chart(u, rho)
        }
    }

    pub fn chart(&self) -> (Vec3, f64) {
        (self.u, self.rho)
    }

    pub fn signed_distance(&self, x: Vec3) -> f64 {
        x.dot(self.u) - self.rho
    }

    /// Orthogonal projection of `x` onto the plane.
    pub fn project(&self, x: Vec3) -> Vec3 {
        x - self.u * self.signed_distance(x)
    }

    /// Orthonormal in-plane basis (e1, e2) with e1 x e2 = u.
    pub fn basis(&self) -> (Vec3, Vec3) {
        let u = self.u;
        let axis = if u.x.abs() <= u.y.abs() && u.x.abs() <= u.z.abs() {
            Vec3::new(1.0, 0.0, 0.0)
        } else if u.y.abs() <= u.z.abs() {
            Vec3::new(0.0, 1.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        let e1 = axis.cross(u).normalized();
        let e2 = u.cross(e1);
        (e1, e2)
    }

    /// Whether the two planes coincide within tolerance (scaled by `scale`).
    pub fn coincides(&self, o: &Plane, scale: f64) -> bool {
        let s = self.u.dot(o.u);
        let tol = EPS_GEOM * scale.max(1.0);
        if (s - 1.0).abs() <= EPS_GEOM {
            (self.rho - o.rho).abs() <= tol
        } else if (s + 1.0).abs() <= EPS_GEOM {
            (self.rho + o.rho).abs() <= tol
        } else {
            false
        }
    }
}

/// A line {point + s * direction}; `point` is the foot of the perpendicular
/// from the origin and `direction` is lexicographically positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line3 {
    pub point: Vec3,
    pub direction: Vec3,
}

impl Line3 {
    pub fn new(point: Vec3, direction: Vec3) -> Result<Line3> {
        let n = direction.norm();
        if !(n > 0.0) || !n.is_finite() {
            return invalid("line direction must be nonzero");
        }
        let mut d = direction / n;
        if d.lex_cmp(-d).is_lt() {
            d = -d;
        }
        let foot = point - d * point.dot(d);
        Ok(Line3 { point: foot, direction: d })
    }

    pub fn at(&self, s: f64) -> Vec3 {
        self.point + self.direction * s
    }

    pub fn param_of(&self, x: Vec3) -> f64 {
        (x - self.point).dot(self.direction)
    }
}

/// The common point of three planes.
pub fn triple_point(p1: &Plane, p2: &Plane, p3: &Plane) -> Result<Vec3> {
    let scale = 1.0 + p1.rho.max(p2.rho).max(p3.rho);
    match solve3(p1.u, p2.u, p3.u, Vec3::new(p1.rho, p2.rho, p3.rho), EPS_GEOM) {
        Some(x) if x.max_abs() <= scale / EPS_GEOM => Ok(x),
        _ => degenerate("plane normals are linearly dependent"),
    }
}

/// The intersection line of two planes.
pub fn line_of(p1: &Plane, p2: &Plane) -> Result<Line3> {
    let d = p1.u.cross(p2.u);
    if d.norm() <= EPS_GEOM {
        return degenerate("planes are parallel");
    }
    let c = p1.u.dot(p2.u);
    let den = 1.0 - c * c;
    let point = (p1.u * (p1.rho - p2.rho * c) + p2.u * (p2.rho - p1.rho * c)) / den;
    Line3::new(point, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    #[test]
    fn chart_axis_aligned() {
        let p = plane_from_chart(Vec3::new(0.0, 0.0, 1.0), 2.0).unwrap();
        assert_eq!(p.signed_distance(Vec3::new(5.0, -3.0, 2.0)), 0.0);
        assert_eq!(p.chart(), (Vec3::new(0.0, 0.0, 1.0), 2.0));
    }

    #[test]
    fn chart_zero_rho_canonical() {
        let p = plane_from_chart(Vec3::new(0.0, 0.0, -1.0), 0.0).unwrap();
        assert_eq!(p.u, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(p.rho, 0.0);
    }

    #[test]
    fn chart_rejects_non_unit() {
        assert!(matches!(plane_from_chart(Vec3::new(0.0, 0.0, 2.0), 1.0), Err(Error::Input(_))));
        assert!(matches!(plane_from_chart(Vec3::new(0.0, 0.0, 1.0), -1.0), Err(Error::Input(_))));
    }

    #[test]
    fn triple_point_axes() {
        let px = plane_from_chart(Vec3::new(1.0, 0.0, 0.0), 0.0).unwrap();
        let py = plane_from_chart(Vec3::new(0.0, 1.0, 0.0), 0.0).unwrap();
        let pz = plane_from_chart(Vec3::new(0.0, 0.0, 1.0), 0.0).unwrap();
        assert_eq!(triple_point(&px, &py, &pz).unwrap(), Vec3::ZERO);
    }

    #[test]
    fn line_of_two_planes() {
        let px = plane_from_chart(Vec3::new(1.0, 0.0, 0.0), 1.0).unwrap();
        let py = plane_from_chart(Vec3::new(0.0, 1.0, 0.0), 2.0).unwrap();
        let l = line_of(&px, &py).unwrap();
        assert!(l.point.dist(Vec3::new(1.0, 2.0, 0.0)) < 1e-15);
        assert_eq!(l.direction, Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn parallel_planes_degenerate() {
        let a = plane_from_chart(Vec3::new(1.0, 0.0, 0.0), 0.0).unwrap();
        let b = plane_from_chart(Vec3::new(1.0, 0.0, 0.0), 1.0).unwrap();
        assert!(matches!(line_of(&a, &b), Err(Error::Degeneracy(_))));
        let c = plane_from_chart(Vec3::new(0.0, 1.0, 0.0), 1.0).unwrap();
        assert!(matches!(triple_point(&a, &b, &c), Err(Error::Degeneracy(_))));
    }

    #[test]
    fn basis_is_right_handed() {
        let p = Plane::through(Vec3::new(0.2, 0.1, 0.3), Vec3::new(0.3, -0.4, 0.8)).unwrap();
        let (e1, e2) = p.basis();
        assert!((e1.cross(e2) - p.u).norm() < 1e-15);
        assert!(e1.dot(p.u).abs() < 1e-15);
    }
}
