use super::{BoundaryEdge, ConfigVertex, Creator, Face, InternalEdge, PolyConfig, VertexKind, VALIDATE_EPS};
use crate::error::{degenerate, invalid, Result};
use crate::geometry::{line_of, triple_point, Domain, Plane, Polygon2, Vec3, EPS_GEOM};
use crate::kinematics::Wedge;
use crate::stochgeom::StreamKey;

/// Clips a convex planar polygon to the closed domain.
fn clip(mut poly: Vec<Vec3>, d: &Domain) -> Vec<Vec3> {
    for f in d.facets() {
        let h = f.halfspace;
        let n = poly.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            let (sa, sb) = (h.slack(a), h.slack(b));
            if sa >= 0.0 {
                out.push(a);
            }
            if (sa >= 0.0) != (sb >= 0.0) {
                out.push(a + (b - a) * (sa / (sa - sb)));
            }
        }
        poly = out;
        if poly.is_empty() {
            break;
        }
    }
    poly
}

/// The configuration of a single interior triangle birth at the common point
/// of three planes with no later births: in each plane, the sector between
/// the two crossing lines with the other planes, all three edges running
/// forward in time from the apex, truncated by the domain.
pub fn stable_cone(d: &Domain, planes: [Plane; 3]) -> Result<PolyConfig> {
    let tol = VALIDATE_EPS * d.scale();
    let apex = triple_point(&planes[0], &planes[1], &planes[2])?;
    if d.depth(apex) <= tol {
        return invalid("the planes do not meet inside the domain");
    }
    // ray k lies on the two planes other than k
    let mut rays = [Vec3::ZERO; 3];
    let mut ends = [Vec3::ZERO; 3];
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let mut r = line_of(&planes[i], &planes[j])?.direction;
        if r.x.abs() <= EPS_GEOM {
            return degenerate("a cone edge lies in a spatial slice");
        }
        if r.x < 0.0 {
            r = -r;
        }
        let (_, s1) = d.clip_line(apex, r).expect("apex is inside");
        rays[k] = r;
        ends[k] = apex + r * s1;
    }
    let mut vertices = vec![ConfigVertex { point: apex, kind: VertexKind::Internal }];
    for e in ends {
        vertices.push(ConfigVertex { point: e, kind: VertexKind::Boundary });
    }
    let mut internal_edges = Vec::new();
    for k in 0..3 {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let side = |other: Vec3| (other - rays[k] * rays[k].dot(other)).normalized();
        let (si, sj) = (side(rays[j]), side(rays[i]));
        let w = Wedge { direction: rays[k], sides: [si, sj] };
        internal_edges.push(InternalEdge {
            ends: [0, k + 1],
            faces: [i.min(j), i.max(j)],
            sides: if i < j { [si, sj] } else { [sj, si] },
            angle: w.angle()?,
            length: apex.dist(ends[k]),
        });
    }
    let far = 4.0 * (d.radius() + apex.dist(d.center()));
    let mut faces = Vec::new();
    let mut boundary_edges = Vec::new();
    for f in 0..3 {
        let (a, b) = ((f + 1) % 3, (f + 2) % 3);
        let raw = clip(vec![apex, apex + rays[a] * far, apex + rays[b] * far], d);
        // snap to the shared vertices where they exist
        let mut ids = Vec::new();
        for x in raw {
            let i = match vertices.iter().position(|v| v.point.dist(x) <= tol) {
                Some(i) => i,
                None => {
                    vertices.push(ConfigVertex { point: x, kind: VertexKind::Bend });
                    vertices.len() - 1
                }
            };
            if ids.last() != Some(&i) && ids.first() != Some(&i) {
                ids.push(i);
            }
        }
        let pts: Vec<Vec3> = ids.iter().map(|&i| planes[f].project(vertices[i].point)).collect();
        let polygon = Polygon2::new(planes[f], pts, Vec::new())?;
        let m = ids.len();
        for q in 0..m {
            let (u, v) = (ids[q], ids[(q + 1) % m]);
            if u == 0 || v == 0 {
                continue;
            }
            let (pu, pv) = (vertices[u].point, vertices[v].point);
            let facet = (0..d.facets().len())
                .min_by(|&x, &y| {
                    let s = |k: usize| {
                        let h = d.facets()[k].halfspace;
                        h.slack(pu).abs().max(h.slack(pv).abs())
                    };
                    s(x).total_cmp(&s(y))
                })
                .expect("domain has facets");
            boundary_edges.push(BoundaryEdge { ends: [u, v], face: f, facet });
        }
        faces.push(Face { polygon, creator: Creator::Static, key: StreamKey(0), origin: apex });
    }
    Ok(PolyConfig { vertices, internal_edges, boundary_edges, faces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldmodel::validate;

    #[test]
    fn forward_cone_is_valid() {
        let d = Domain::cube(1.0).unwrap();
        let c = Vec3::new(0.3, 0.5, 0.5);
        let planes = [
            Plane::through(c, Vec3::new(0.5, 1.0, 0.2)).unwrap(),
            Plane::through(c, Vec3::new(0.4, -0.7, 0.8)).unwrap(),
            Plane::through(c, Vec3::new(0.6, -0.3, -1.0)).unwrap(),
        ];
        let cfg = stable_cone(&d, planes).unwrap();
        assert_eq!(cfg.faces.len(), 3);
        assert_eq!(cfg.internal_edges.len(), 3);
        assert!(validate(&cfg, &d).is_ok(), "{}", validate(&cfg, &d));
        for e in &cfg.internal_edges {
            assert!(cfg.vertices[e.ends[1]].point.x > c.x);
        }
    }

    #[test]
    fn apex_outside_is_rejected() {
        let d = Domain::cube(1.0).unwrap();
        let c = Vec3::new(2.0, 0.5, 0.5);
        let planes = [
            Plane::through(c, Vec3::new(0.5, 1.0, 0.2)).unwrap(),
            Plane::through(c, Vec3::new(0.4, -0.7, 0.8)).unwrap(),
            Plane::through(c, Vec3::new(0.6, -0.3, -1.0)).unwrap(),
        ];
        assert!(stable_cone(&d, planes).is_err());
    }
}
