use super::{Domain, Plane, Vec2, Vec3};
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Planar polygon with holes. Cycles are stored as time-space points lying
/// on `plane`; the outer cycle turns counter-clockwise about `plane.u`,
/// holes clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon2 {
    pub plane: Plane,
    pub outer: Vec<Vec3>,
    pub holes: Vec<Vec<Vec3>>,
}

/// Where a point sits relative to a polygon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

impl Polygon2 {
    /// Orients the cycles (outer CCW, holes CW) and checks for positive area.
    pub fn new(plane: Plane, mut outer: Vec<Vec3>, mut holes: Vec<Vec<Vec3>>) -> Result<Polygon2> {
        if outer.len() < 3 || holes.iter().any(|h| h.len() < 3) {
            return invalid("polygon cycles need at least three vertices");
        }
        let frame = plane.basis();
        if signed_area(&frame, &outer) < 0.0 {
            outer.reverse();
        }
        for h in holes.iter_mut() {
            if signed_area(&frame, h) > 0.0 {
                h.reverse();
            }
        }
        let p = Polygon2 { plane, outer, holes };
        if !(p.area() > 0.0) {
            return invalid("polygon has no area");
        }
        Ok(p)
    }

    /// Local 2D coordinates in the plane's basis.
    pub fn local(&self, x: Vec3) -> Vec2 {
        let (e1, e2) = self.plane.basis();
        Vec2::new(x.dot(e1), x.dot(e2))
    }

    pub fn area(&self) -> f64 {
        let frame = self.plane.basis();
        signed_area(&frame, &self.outer) + self.holes.iter().map(|h| signed_area(&frame, h)).sum::<f64>()
    }

    pub fn cycles(&self) -> impl Iterator<Item = &Vec<Vec3>> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    pub fn vertex_count(&self) -> usize {
        self.cycles().map(|c| c.len()).sum()
    }

    /// Classifies a point of the carrier plane; `tol` is an absolute distance.
    pub fn locate(&self, x: Vec3, tol: f64) -> Location {
        let q = self.local(x);
        let mut inside = false;
        for c in self.cycles() {
            let pts: Vec<Vec2> = c.iter().map(|&p| self.local(p)).collect();
            for i in 0..pts.len() {
                let a = pts[i];
                let b = pts[(i + 1) % pts.len()];
                if point_segment_distance(q, a, b) <= tol {
                    return Location::Boundary;
                }
                if (a.y > q.y) != (b.y > q.y) {
                    let xc = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
                    if xc > q.x {
                        inside = !inside;
                    }
                }
            }
        }
        if inside {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// Parameter intervals where the in-plane line `p + s d` lies in the
    /// closed polygon.
    pub fn line_intervals(&self, p: Vec3, d: Vec3) -> Vec<(f64, f64)> {
        let lp = self.local(p);
        let (e1, e2) = self.plane.basis();
        let ld = Vec2::new(d.dot(e1), d.dot(e2));
        let n = ld.perp();
        let mut cuts = Vec::new();
        for c in self.cycles() {
            for i in 0..c.len() {
                let a = self.local(c[i]) - lp;
                let b = self.local(c[(i + 1) % c.len()]) - lp;
                let (sa, sb) = (a.dot(n), b.dot(n));
                if (sa > 0.0) != (sb > 0.0) {
                    let w = sa / (sa - sb);
                    let x = a + (b - a) * w;
                    cuts.push(x.dot(ld) / ld.norm_sq());
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.chunks(2).filter(|w| w.len() == 2).map(|w| (w[0], w[1])).collect()
    }
}

fn signed_area(frame: &(Vec3, Vec3), c: &[Vec3]) -> f64 {
    let (e1, e2) = *frame;
    let pts: Vec<Vec2> = c.iter().map(|p| Vec2::new(p.dot(e1), p.dot(e2))).collect();
    let o = pts[0];
    let mut s = 0.0;
    for i in 1..pts.len() {
        s += (pts[i] - o).cross(pts[(i + 1) % pts.len()] - o);
    }
    0.5 * s
}

fn point_segment_distance(q: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let l2 = ab.norm_sq();
    let w = if l2 > 0.0 { ((q - a).dot(ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
    (a + ab * w - q).norm()
}

/// Section of the closed domain by a plane, or `None` when empty or of zero area.
pub fn intersect_plane_domain(p: &Plane, d: &Domain) -> Option<Polygon2> {
    let tol = d.tol();
    let vs = d.vertices();
    let s: Vec<f64> = vs.iter().map(|&v| p.signed_distance(v)).collect();
    if !s.iter().any(|&x| x > tol) || !s.iter().any(|&x| x < -tol) {
        return None;
    }
    let mut pts: Vec<Vec3> = Vec::new();
    let push = |x: Vec3, pts: &mut Vec<Vec3>| {
        if !pts.iter().any(|q| q.dist(x) <= tol) {
            pts.push(x);
        }
    };
    for (i, &v) in vs.iter().enumerate() {
        if s[i].abs() <= tol {
            push(p.project(v), &mut pts);
        }
    }
    for e in d.edges() {
        let (a, b) = (e.ends[0], e.ends[1]);
        if (s[a] > tol && s[b] < -tol) || (s[a] < -tol && s[b] > tol) {
            let w = s[a] / (s[a] - s[b]);
            push(p.project(vs[a] + (vs[b] - vs[a]) * w), &mut pts);
        }
    }
    if pts.len() < 3 {
        return None;
    }
    let (e1, e2) = p.basis();
    let c = pts.iter().fold(Vec3::ZERO, |a, &b| a + b) / pts.len() as f64;
    let mut keyed: Vec<(f64, Vec3)> = pts
        .into_iter()
        .map(|x| {
            let r = x - c;
            (r.dot(e2).atan2(r.dot(e1)), x)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let outer: Vec<Vec3> = keyed.into_iter().map(|(_, x)| x).collect();
    let poly = Polygon2 { plane: *p, outer, holes: Vec::new() };
    if poly.area() <= tol * d.scale() {
        return None;
    }
    Some(poly)
}
