//! Admissibility checks (P1)-(P6), computed from the geometry rather than
//! from the stored incidence lists wherever possible.

use super::PolyConfig;
use crate::geometry::{line_of, Domain, Location, Vec3, EPS_GEOM};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Tolerance of incidence tests, relative to the domain scale.
pub const VALIDATE_EPS: f64 = 10.0 * EPS_GEOM;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    /// Faces do not intersect except along shared edges.
    P1,
    /// Each internal edge is shared by exactly two faces.
    P2,
    /// Each boundary edge belongs to exactly one face.
    P3,
    /// Internal vertices: three faces, three edges.
    P4,
    /// Boundary vertices: two faces, one internal and two boundary edges.
    P5,
    /// No two faces are coplanar.
    P6,
    /// Indices, containment in the domain and face connectivity.
    Structure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub message: String,
    /// Offending faces, edges or vertices, as named by the message.
    pub elements: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, c: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == c)
    }

    fn push(&mut self, condition: Condition, message: String, elements: Vec<usize>) {
        self.violations.push(Violation { condition, message, elements });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{:?}: {} {:?}", v.condition, v.message, v.elements)?;
        }
        Ok(())
    }
}

/// Faces whose closure contains `x`.
fn faces_at(cfg: &PolyConfig, x: Vec3, tol: f64) -> Vec<usize> {
    (0..cfg.faces.len())
        .filter(|&i| {
            let p = &cfg.faces[i].polygon;
            p.plane.signed_distance(x).abs() <= tol && p.locate(p.plane.project(x), tol) != Location::Outside
        })
        .collect()
}

fn on_domain_vertex(d: &Domain, x: Vec3, tol: f64) -> bool {
    d.vertices().iter().any(|v| v.dist(x) <= tol)
}

pub fn validate(cfg: &PolyConfig, d: &Domain) -> ValidationReport {
    let mut r = ValidationReport::default();
    let tol = VALIDATE_EPS * d.scale();
    let nv = cfg.vertices.len();
    let nf = cfg.faces.len();

    // structure
    for (i, e) in cfg.internal_edges.iter().enumerate() {
        if e.ends.iter().any(|&v| v >= nv) || e.faces.iter().any(|&f| f >= nf) {
            r.push(Condition::Structure, format!("internal edge {i} has dangling indices"), vec![i]);
        }
    }
    for (i, e) in cfg.boundary_edges.iter().enumerate() {
        if e.ends.iter().any(|&v| v >= nv) || e.face >= nf || e.facet >= d.facets().len() {
            r.push(Condition::Structure, format!("boundary edge {i} has dangling indices"), vec![i]);
        }
    }
    if !r.is_ok() {
        return r;
    }
    for (i, f) in cfg.faces.iter().enumerate() {
        let p = &f.polygon;
        if !(p.area() > 0.0) {
            r.push(Condition::Structure, format!("face {i} has no area"), vec![i]);
        }
        for c in p.cycles() {
            for &x in c {
                if p.plane.signed_distance(x).abs() > tol || d.depth(x) < -tol {
                    r.push(Condition::Structure, format!("face {i} leaves its plane or the domain"), vec![i]);
                    break;
                }
            }
        }
        let outer = crate::geometry::Polygon2 { plane: p.plane, outer: p.outer.clone(), holes: Vec::new() };
        for h in &p.holes {
            let c = h.iter().fold(Vec3::ZERO, |a, &b| a + b) / h.len() as f64;
            if outer.locate(c, tol) != Location::Inside {
                r.push(Condition::Structure, format!("face {i} is not connected"), vec![i]);
            }
        }
    }

    // P6
    for i in 0..nf {
        for j in i + 1..nf {
            if cfg.faces[i].polygon.plane.coincides(&cfg.faces[j].polygon.plane, d.scale()) {
                r.push(Condition::P6, format!("faces {i} and {j} are coplanar"), vec![i, j]);
            }
        }
    }

    // P1: along the crossing line of two face planes, the closures may only
    // overlap on edges the two faces share
    for i in 0..nf {
        for j in i + 1..nf {
            let (pi, pj) = (&cfg.faces[i].polygon, &cfg.faces[j].polygon);
            let Ok(l) = line_of(&pi.plane, &pj.plane) else { continue };
            let a = pi.line_intervals(l.point, l.direction);
            let b = pj.line_intervals(l.point, l.direction);
            let mut shared: Vec<(f64, f64)> = cfg
                .internal_edges
                .iter()
                .filter(|e| e.faces == [i, j] || e.faces == [j, i])
                .map(|e| {
                    let s0 = l.param_of(cfg.vertices[e.ends[0]].point);
                    let s1 = l.param_of(cfg.vertices[e.ends[1]].point);
                    (s0.min(s1), s0.max(s1))
                })
                .collect();
            shared.sort_by(|x, y| x.0.total_cmp(&y.0));
            let mut bad = 0.0;
            for &(a0, a1) in &a {
                for &(b0, b1) in &b {
                    let (lo, hi) = (a0.max(b0), a1.min(b1));
                    if hi - lo <= tol {
                        continue;
                    }
                    // subtract the shared edges
                    let mut cur = lo;
                    for &(s0, s1) in &shared {
                        if s1 <= cur || s0 >= hi {
                            continue;
                        }
                        if s0 > cur {
                            bad += s0 - cur;
                        }
                        cur = cur.max(s1);
                    }
                    if hi > cur {
                        bad += hi - cur;
                    }
                }
            }
            if bad > 2.0 * tol {
                r.push(Condition::P1, format!("faces {i} and {j} intersect over length {bad:.3e}"), vec![i, j]);
            }
        }
    }

    // P2
    for (k, e) in cfg.internal_edges.iter().enumerate() {
        let (p, q) = (cfg.vertices[e.ends[0]].point, cfg.vertices[e.ends[1]].point);
        let m = (p + q) * 0.5;
        if d.depth(m) <= tol {
            r.push(Condition::P2, format!("internal edge {k} lies on the domain boundary"), vec![k]);
            continue;
        }
        let mut at = faces_at(cfg, m, tol);
        at.sort();
        let mut want = e.faces.to_vec();
        want.sort();
        if at != want {
            r.push(Condition::P2, format!("internal edge {k} is shared by faces {at:?}"), vec![k]);
        }
    }

    // P3
    for (k, e) in cfg.boundary_edges.iter().enumerate() {
        let (p, q) = (cfg.vertices[e.ends[0]].point, cfg.vertices[e.ends[1]].point);
        let h = d.facets()[e.facet].halfspace;
        if h.slack(p).abs() > tol || h.slack(q).abs() > tol {
            r.push(Condition::P3, format!("boundary edge {k} is not on its facet"), vec![k]);
            continue;
        }
        let at = faces_at(cfg, (p + q) * 0.5, tol);
        if at != vec![e.face] {
            r.push(Condition::P3, format!("boundary edge {k} belongs to faces {at:?}"), vec![k]);
        }
    }

    // P4 / P5 by incidence counts
    for (v, cv) in cfg.vertices.iter().enumerate() {
        let x = cv.point;
        let used = cfg.internal_edges.iter().any(|e| e.ends.contains(&v))
            || cfg.boundary_edges.iter().any(|e| e.ends.contains(&v));
        if !used {
            continue;
        }
        let near = |w: usize| cfg.vertices[w].point.dist(x) <= tol;
        let n_int = cfg.internal_edges.iter().filter(|e| near(e.ends[0]) || near(e.ends[1])).count();
        let n_bnd = cfg.boundary_edges.iter().filter(|e| near(e.ends[0]) || near(e.ends[1])).count();
        let n_faces = faces_at(cfg, x, tol).len();
        if d.depth(x) > tol {
            if n_faces != 3 || n_int != 3 || n_bnd != 0 {
                r.push(
                    Condition::P4,
                    format!("internal vertex {v}: {n_faces} faces, {n_int} internal and {n_bnd} boundary edges"),
                    vec![v],
                );
            }
        } else if n_int == 0 && n_faces == 1 && n_bnd == 2 {
            // a bend of one face's boundary trace, not a vertex
        } else if on_domain_vertex(d, x, tol) {
            // every trace that survives to a pointed end of the domain meets there
        } else if n_faces != 2 || n_int != 1 || n_bnd != 2 {
            r.push(
                Condition::P5,
                format!("boundary vertex {v}: {n_faces} faces, {n_int} internal and {n_bnd} boundary edges"),
                vec![v],
            );
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldmodel::{Creator, Face};
    use crate::geometry::{intersect_plane_domain, plane_from_chart, Plane};
    use crate::stochgeom::StreamKey;

    fn face(p: Plane, d: &Domain) -> Face {
        Face {
            polygon: intersect_plane_domain(&p, d).unwrap(),
            creator: Creator::Static,
            key: StreamKey(0),
            origin: Vec3::ZERO,
        }
    }

    #[test]
    fn empty_is_ok() {
        let d = Domain::cube(1.0).unwrap();
        assert!(validate(&PolyConfig::empty(), &d).is_ok());
    }

    #[test]
    fn coplanar_faces_are_p6() {
        let d = Domain::cube(1.0).unwrap();
        let p = plane_from_chart(Vec3::new(0.0, 0.0, 1.0), 0.5).unwrap();
        let cfg = PolyConfig { faces: vec![face(p, &d), face(p, &d)], ..Default::default() };
        let r = validate(&cfg, &d);
        let v = r.violations.iter().find(|v| v.condition == Condition::P6).unwrap();
        assert_eq!(v.elements, vec![0, 1]);
    }

    #[test]
    fn crossing_faces_are_p1() {
        let d = Domain::cube(1.0).unwrap();
        let a = plane_from_chart(Vec3::new(0.0, 0.0, 1.0), 0.5).unwrap();
        let b = plane_from_chart(Vec3::new(0.0, 1.0, 0.0), 0.5).unwrap();
        let cfg = PolyConfig { faces: vec![face(a, &d), face(b, &d)], ..Default::default() };
        assert!(validate(&cfg, &d).has(Condition::P1));
    }
}
