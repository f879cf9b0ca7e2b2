//! Kinematics of planar sections in the sweep: section lines, their normal
//! velocities, vertex velocities, birth stability and the wedge angle.
//!
//! A plane with unit normal (u_t, u_s) meets the slice at time t in the line
//! {y : <m, y> = c(t)} with m = u_s / |u_s| and c(t) = (rho - u_t t) / |u_s|,
//! so the line moves with normal speed -u_t / |u_s|.

use crate::error::{degenerate, invalid, Result};
use crate::geometry::{solve2, Halfspace, Plane, Vec2, Vec3, EPS_GEOM};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The section {y : <normal, y> = offset + speed * t} of a plane by the
/// spatial slice at time t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceLine {
    pub normal: Vec2,
    pub offset: f64,
    pub speed: f64,
}

impl SliceLine {
    pub fn from_plane(p: &Plane) -> Result<SliceLine> {
        let us = p.u.spatial();
        let n = us.norm();
        if n <= EPS_GEOM {
            return degenerate("plane is parallel to the spatial slices");
        }
        Ok(SliceLine { normal: us / n, offset: p.rho / n, speed: -p.u.x / n })
    }

    /// Section of the boundary plane of a halfspace; `normal` points outward.
    pub fn from_halfspace(h: &Halfspace) -> Result<SliceLine> {
        let ns = h.normal.spatial();
        let n = ns.norm();
        if n <= EPS_GEOM {
            return degenerate("facet is parallel to the spatial slices");
        }
        Ok(SliceLine { normal: ns / n, offset: h.offset / n, speed: -h.normal.x / n })
    }

    pub fn offset_at(&self, t: f64) -> f64 {
        self.offset + self.speed * t
    }

    pub fn velocity(&self) -> Vec2 {
        self.normal * self.speed
    }

    /// Unit direction along the line (normal rotated counter-clockwise).
    pub fn direction(&self) -> Vec2 {
        self.normal.perp()
    }

    /// Signed distance of `y` from the line at time t.
    pub fn distance(&self, y: Vec2, t: f64) -> f64 {
        self.normal.dot(y) - self.offset_at(t)
    }

    /// Point of the line closest to the origin at time t.
    pub fn foot(&self, t: f64) -> Vec2 {
        self.normal * self.offset_at(t)
    }

    /// Intersection with another line at time t.
    pub fn meet(&self, o: &SliceLine, t: f64) -> Result<Vec2> {
        match solve2(self.normal, o.normal, Vec2::new(self.offset_at(t), o.offset_at(t)), EPS_GEOM) {
            Some(y) => Ok(y),
            None => degenerate("section lines are parallel"),
        }
    }
}

/// Velocity of the section of a plane: the normal velocity of its slice line.
pub fn face_velocity(p: &Plane) -> Result<Vec2> {
    Ok(SliceLine::from_plane(p)?.velocity())
}

/// Planar section of one face at a fixed time: its line and the parameter
/// intervals (along [`SliceLine::direction`]) covered by the face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiEdge {
    pub plane: Plane,
    pub line: SliceLine,
    pub velocity: Vec2,
    pub segments: Vec<(f64, f64)>,
    pub boundary: bool,
}

impl MultiEdge {
    pub fn new(plane: Plane, segments: Vec<(f64, f64)>, boundary: bool) -> Result<MultiEdge> {
        let line = SliceLine::from_plane(&plane)?;
        if boundary && segments.len() != 1 {
            return invalid("a boundary multi-edge has exactly one segment");
        }
        Ok(MultiEdge { plane, line, velocity: line.velocity(), segments, boundary })
    }
}

/// Velocity of the crossing point of two section lines, from the normal form
/// <w, m_i> = <v_i, m_i>.
pub fn vertex_velocity(e1: &SliceLine, e2: &SliceLine) -> Result<Vec2> {
    match solve2(e1.normal, e2.normal, Vec2::new(e1.speed, e2.speed), EPS_GEOM) {
        Some(w) => Ok(w),
        None => degenerate("section lines are parallel"),
    }
}

/// Crossing-point velocity written as a v1 + b v2 with the Gram system
/// G (a, b) = (|v1|^2, |v2|^2). Singular when a velocity vanishes.
pub fn vertex_velocity_gram(v1: Vec2, v2: Vec2) -> Result<Vec2> {
    let g11 = v1.dot(v1);
    let g22 = v2.dot(v2);
    // Cramer's rule; det = g11 g22 - g12^2 is evaluated as (v1 x v2)^2 and
    // g11 - g12 as <v1, v1 - v2> to avoid cancellation for nearly parallel
    // velocities
    let c = v1.cross(v2);
    let det = c * c;
    if !(det > EPS_GEOM * EPS_GEOM * g11 * g22) {
        return degenerate("Gram matrix is singular");
    }
    let a = g22 * v1.dot(v1 - v2) / det;
    let b = g11 * v2.dot(v2 - v1) / det;
    Ok(v1 * a + v2 * b)
}

/// The triangle condition <v_i, n_i> > <w_jk, n_i> for every i, where n_i are
/// the chosen normals and w_jk the velocity of the crossing of lines j and k.
///
/// With n_i the outward normals of a newborn triangle this is the stability of
/// an IT birth. With n_1 pointing away from where a new angle appears on edge 1
/// and n_2, n_3 outward of that angle it is the stability of an IA birth.
/// All three indices are checked: the single-index shortcut is only valid when
/// the normals are already known to belong to one consistent triangle.
pub fn triangle_condition(lines: [&SliceLine; 3], normals: [Vec2; 3]) -> Result<bool> {
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let w = vertex_velocity(lines[j], lines[k])?;
        if !(lines[i].velocity().dot(normals[i]) > w.dot(normals[i])) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn stable_it(lines: [&SliceLine; 3], outward: [Vec2; 3]) -> Result<bool> {
    triangle_condition(lines, outward)
}

pub fn stable_ia(existing: &SliceLine, new: [&SliceLine; 2], normals: [Vec2; 3]) -> Result<bool> {
    triangle_condition([existing, new[0], new[1]], normals)
}

/// Outward normals of the triangle the three lines form just after they meet
/// at time `t0`.
pub fn newborn_triangle_normals(lines: [&SliceLine; 3]) -> Result<[Vec2; 3]> {
    let mut w = [Vec2::ZERO; 3];
    for i in 0..3 {
        w[i] = vertex_velocity(lines[(i + 1) % 3], lines[(i + 2) % 3])?;
    }
    // w[i] is the corner opposite line i; the centroid moves with the mean.
    let c = (w[0] + w[1] + w[2]) / 3.0;
    let mut n = [Vec2::ZERO; 3];
    for i in 0..3 {
        let m = lines[i].normal;
        let corner = w[(i + 1) % 3];
        n[i] = if (corner - c).dot(m) > 0.0 { m } else { -m };
    }
    Ok(n)
}

/// Result of inserting a new line through a vertex of two existing segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IeOutcome {
    /// The new segment cuts both rays: a corner cut.
    CornerCut,
    /// The new line cuts only the first ray; the second face extends past the
    /// old vertex and becomes reflex there.
    ExtendsSecond,
    /// The new line cuts only the second ray.
    ExtendsFirst,
    /// The new segment would have zero lifetime.
    Unstable,
}

impl IeOutcome {
    pub fn is_stable(self) -> bool {
        self != IeOutcome::Unstable
    }
}

/// Stability of an IE birth at the crossing of `e1` and `e2`, whose segments
/// leave the crossing along the unit directions `u1` and `u2`; `e3` is the new
/// line through the crossing point.
///
/// The birth survives iff at least one of the new crossings (e1 with e3, e2
/// with e3) runs out along its existing ray. The corner-cut case is exactly
/// <v3, n3> > <w12, n3> with n3 pointing into the convex angle.
pub fn stable_ie(e1: &SliceLine, e2: &SliceLine, u1: Vec2, u2: Vec2, e3: &SliceLine) -> Result<IeOutcome> {
    let w = vertex_velocity(e1, e2)?;
    let p1 = vertex_velocity(e1, e3)?;
    let p2 = vertex_velocity(e2, e3)?;
    let a = (p1 - w).dot(u1) > 0.0;
    let b = (p2 - w).dot(u2) > 0.0;
    Ok(match (a, b) {
        (true, true) => IeOutcome::CornerCut,
        (true, false) => IeOutcome::ExtendsSecond,
        (false, true) => IeOutcome::ExtendsFirst,
        (false, false) => IeOutcome::Unstable,
    })
}

/// An edge line with the two face half-planes attached to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    /// Direction of the edge line (either orientation).
    pub direction: Vec3,
    /// Unit vectors in each face plane, orthogonal to the edge, pointing into the face.
    pub sides: [Vec3; 2],
}

impl Wedge {
    /// Slice data of the wedge: the future-pointing unit edge direction and
    /// the directions of the two face sections leaving the crossing point.
    pub fn slice_rays(&self) -> Result<(Vec3, Vec2, Vec2)> {
        let mut d = self.direction.normalized();
        if d.x.abs() <= EPS_GEOM {
            return degenerate("edge lies in a spatial slice");
        }
        if d.x < 0.0 {
            d = -d;
        }
        let ray = |h: Vec3| -> Result<Vec2> {
            let u = (h - d * (h.x / d.x)).spatial();
            let n = u.norm();
            if n <= EPS_GEOM {
                return degenerate("face half-plane has no spatial section");
            }
            Ok(u / n)
        };
        Ok((d, ray(self.sides[0])?, ray(self.sides[1])?))
    }

    pub fn angle(&self) -> Result<f64> {
        let (d, ua, ub) = self.slice_rays()?;
        wedge_angle_slice(d, ua, ub)
    }
}

/// The wedge angle, defined as 2 pi times the probability that a typical
/// plane through the edge (normal density proportional to |cos| against the
/// edge) gives an unstable IE birth.
pub fn wedge_angle(w: &Wedge) -> Result<f64> {
    w.angle()
}

/// Wedge angle from slice data: `d` the unit edge direction with d_t > 0, and
/// the two section rays `ua`, `ub` leaving the crossing point.
///
/// A plane with normal n, oriented so that <n, d> > 0, is unstable exactly
/// when n lies in the spherical triangle T = {<n,d> >= 0, <n,(0,ua)> >= 0,
/// <n,(0,ub)> >= 0}. The unstable probability is (1/pi) times the integral of
/// <n,d> over T, and the integral of n over a spherical triangle is given in
/// closed form by summing arc length times the unit normal of each side.
pub fn wedge_angle_slice(d: Vec3, ua: Vec2, ub: Vec2) -> Result<f64> {
    if ua.cross(ub).abs() <= EPS_GEOM {
        return degenerate("faces are coplanar");
    }
    let ka = Vec3::new(0.0, ua.x, ua.y);
    let kb = Vec3::new(0.0, ub.x, ub.y);
    // generators of the cone {G n >= 0} are the columns of G^{-1}
    // only the sign of the determinant matters once the generators are normalized
    let det = Vec3::triple(d, ka, kb);
    if det == 0.0 || !det.is_finite() {
        return degenerate("wedge is degenerate");
    }
    let sg = det.signum();
    let mut v = [ka.cross(kb) * sg, kb.cross(d) * sg, d.cross(ka) * sg].map(|r| r.normalized());
    if Vec3::triple(v[0], v[1], v[2]) < 0.0 {
        v.swap(1, 2);
    }
    let mut flux = Vec3::ZERO;
    for i in 0..3 {
        let (p, q) = (v[i], v[(i + 1) % 3]);
        let c = p.cross(q);
        let arc = c.norm().atan2(p.dot(q));
        flux += c.normalized() * (0.5 * arc);
    }
    let angle = 2.0 * flux.dot(d);
    Ok(angle.clamp(0.0, 2.0 * PI))
}
