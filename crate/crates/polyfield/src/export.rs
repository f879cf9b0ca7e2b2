//! Wavefront OBJ output (v and f records only).

use crate::fieldmodel::PolyConfig;
use crate::geometry::{Vec3, EPS_GEOM};
use std::fmt::Write;

/// Mesh of a configuration: deduplicated vertices and faces as 0-based
/// vertex index lists.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Vec<usize>>,
}

/// Builds the mesh. Points closer than EPS_GEOM times the coordinate scale
/// share a vertex. A face without holes becomes one polygon; a face with
/// holes is triangulated by ear clipping.
pub fn mesh(cfg: &PolyConfig) -> Mesh {
    let scale = cfg.faces.iter().flat_map(|f| f.polygon.cycles().flatten()).map(|p| p.max_abs()).fold(1.0, f64::max);
    let tol = EPS_GEOM * scale;
    let mut m = Mesh::default();
    let index = |m: &mut Mesh, p: Vec3| match m.vertices.iter().position(|q| q.dist(p) <= tol) {
        Some(i) => i,
        None => {
            m.vertices.push(p);
            m.vertices.len() - 1
        }
    };
    for f in &cfg.faces {
        let poly = &f.polygon;
        let ids: Vec<usize> = poly.cycles().flatten().map(|&p| index(&mut m, p)).collect();
        if poly.holes.is_empty() {
            let mut face = ids;
            face.dedup();
            if face.len() > 1 && face.first() == face.last() {
                face.pop();
            }
            m.faces.push(face);
            continue;
        }
        let mut flat = Vec::with_capacity(2 * ids.len());
        let mut starts = Vec::new();
        let mut n = 0;
        for (k, c) in poly.cycles().enumerate() {
            if k > 0 {
                starts.push(n);
            }
            for &p in c {
                let l = poly.local(p);
                flat.push(l.x);
                flat.push(l.y);
            }
            n += c.len();
        }
        // an ear-clipping failure falls back to the outer cycle alone
        match earcutr::earcut(&flat, &starts, 2) {
            Ok(tri) if !tri.is_empty() => {
                for t in tri.chunks(3) {
                    m.faces.push(vec![ids[t[0]], ids[t[1]], ids[t[2]]]);
                }
            }
            _ => m.faces.push(ids[..poly.outer.len()].to_vec()),
        }
    }
    m
}

/// OBJ text of the mesh. Each line of `header` is written as a comment.
pub fn to_obj(cfg: &PolyConfig, header: &str) -> String {
    let m = mesh(cfg);
    let mut s = String::new();
    for line in header.lines() {
        let _ = writeln!(s, "# {line}");
    }
    for v in &m.vertices {
        let _ = writeln!(s, "v {} {} {}", v.x, v.y, v.z);
    }
    for f in &m.faces {
        s.push('f');
        for i in f {
            let _ = write!(s, " {}", i + 1);
        }
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldmodel::{Creator, Face};
    use crate::geometry::{Plane, Polygon2};
    use crate::stochgeom::StreamKey;

    #[test]
    fn square_with_hole_is_triangulated() {
        let plane = Plane::through(Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let sq = |a: f64, b: f64| vec![Vec3::new(a, a, 0.0), Vec3::new(b, a, 0.0), Vec3::new(b, b, 0.0), Vec3::new(a, b, 0.0)];
        let polygon = Polygon2::new(plane, sq(0.0, 3.0), vec![sq(1.0, 2.0)]).unwrap();
        let cfg = PolyConfig {
            faces: vec![Face { polygon, creator: Creator::Static, key: StreamKey(0), origin: Vec3::ZERO }],
            ..PolyConfig::empty()
        };
        let m = mesh(&cfg);
        assert_eq!(m.vertices.len(), 8);
        assert_eq!(m.faces.len(), 8);
        let area: f64 = m
            .faces
            .iter()
            .map(|f| {
                let [a, b, c] = [m.vertices[f[0]], m.vertices[f[1]], m.vertices[f[2]]];
                0.5 * (b - a).cross(c - a).norm()
            })
            .sum();
        assert!((area - 8.0).abs() < 1e-12);
    }
}
