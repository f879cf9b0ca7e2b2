use super::{solve3, Plane, Vec3, EPS_GEOM};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// The closed halfspace {x : <normal, x> <= offset}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Vec3,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec3, offset: f64) -> Self {
        Halfspace { normal, offset }
    }

    /// Positive inside, zero on the boundary plane.
    pub fn slack(&self, x: Vec3) -> f64 {
        self.offset - self.normal.dot(x)
    }

    pub fn plane(&self) -> Plane {
        Plane::through(self.normal * self.offset, self.normal).expect("unit normal")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainEdge {
    pub ends: [usize; 2],
    pub facets: [usize; 2],
    pub length: f64,
    /// Interior dihedral angle in (0, pi).
    pub dihedral: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub halfspace: Halfspace,
    /// Vertex indices, counter-clockwise seen from outside.
    pub cycle: Vec<usize>,
    pub area: f64,
}

/// A bounded convex polyhedron with nonempty interior, stored with its full
/// boundary complex.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    input: Vec<Halfspace>,
    vertices: Vec<Vec3>,
    edges: Vec<DomainEdge>,
    facets: Vec<Facet>,
    volume: f64,
    center: Vec3,
    radius: f64,
}

/// Builds the domain bounded by the given halfspaces. Normals need not be
/// unit length; redundant halfspaces are dropped.
pub fn build_domain(halfspaces: &[Halfspace]) -> Result<Domain> {
    let mut hs = Vec::with_capacity(halfspaces.len());
    for h in halfspaces {
        let n = h.normal.norm();
        if !(n > 0.0) || !n.is_finite() || !h.offset.is_finite() {
            return Err(Error::Construction("halfspace normal must be finite and nonzero".into()));
        }
        hs.push(Halfspace::new(h.normal / n, h.offset / n));
    }
    if hs.len() < 4 {
        return Err(Error::Construction(format!(
            "need at least 4 halfspaces for a bounded polytope, got {}",
            hs.len()
        )));
    }
    let scale = hs.iter().fold(1.0f64, |m, h| m.max(h.offset.abs()));
    let big = 1e4 * scale;
    let mut all = hs.clone();
    for axis in [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)] {
        all.push(Halfspace::new(axis, big));
        all.push(Halfspace::new(-axis, big));
    }
    let n_in = hs.len();

    let mut verts: Vec<Vec3> = Vec::new();
    let mut on_box = false;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            for k in j + 1..all.len() {
                let (a, b, c) = (&all[i], &all[j], &all[k]);
                let Some(x) = solve3(a.normal, b.normal, c.normal, Vec3::new(a.offset, b.offset, c.offset), 1e-12)
                else {
                    continue;
                };
                let tol = EPS_GEOM * scale.max(x.max_abs());
                if all.iter().any(|h| h.slack(x) < -tol) {
                    continue;
                }
                if verts.iter().any(|v| v.dist(x) <= tol) {
                    continue;
                }
                if k >= n_in || all[n_in..].iter().any(|h| h.slack(x).abs() <= tol) {
                    on_box = true;
                }
                verts.push(x);
            }
        }
    }
    if on_box {
        return Err(Error::Construction("halfspace intersection is unbounded".into()));
    }
    if verts.len() < 4 {
        return Err(Error::Construction("halfspace intersection has empty interior".into()));
    }
    let tol = EPS_GEOM * scale;

    let mut facets: Vec<Facet> = Vec::new();
    for h in &hs {
        if facets.iter().any(|f| (f.halfspace.normal - h.normal).norm() <= EPS_GEOM
            && (f.halfspace.offset - h.offset).abs() <= tol)
        {
            continue;
        }
        let on: Vec<usize> = (0..verts.len()).filter(|&i| h.slack(verts[i]).abs() <= tol).collect();
        if on.len() < 3 {
            continue;
        }
        let c = on.iter().fold(Vec3::ZERO, |s, &i| s + verts[i]) / on.len() as f64;
        let plane = Plane { u: h.normal, rho: 0.0 };
        let (e1, e2) = plane.basis();
        let mut keyed: Vec<(f64, usize)> = on
            .iter()
            .map(|&i| {
                let d = verts[i] - c;
                (d.dot(e2).atan2(d.dot(e1)), i)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        let cycle: Vec<usize> = keyed.into_iter().map(|(_, i)| i).collect();
        let area = cycle_area(&verts, &cycle, h.normal);
        if area <= tol * scale {
            continue;
        }
        facets.push(Facet { halfspace: *h, cycle, area });
    }

    let mut edge_map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (fi, f) in facets.iter().enumerate() {
        for w in 0..f.cycle.len() {
            let a = f.cycle[w];
            let b = f.cycle[(w + 1) % f.cycle.len()];
            edge_map.entry((a.min(b), a.max(b))).or_default().push(fi);
        }
    }
    let mut edges = Vec::with_capacity(edge_map.len());
    for ((a, b), fs) in edge_map {
        if fs.len() != 2 {
            return Err(Error::Construction(format!(
                "boundary edge ({a},{b}) has {} incident facets",
                fs.len()
            )));
        }
        let n1 = facets[fs[0]].halfspace.normal;
        let n2 = facets[fs[1]].halfspace.normal;
        let dihedral = std::f64::consts::PI - n1.dot(n2).clamp(-1.0, 1.0).acos();
        edges.push(DomainEdge {
            ends: [a, b],
            facets: [fs[0], fs[1]],
            length: verts[a].dist(verts[b]),
            dihedral,
        });
    }

    let euler = verts.len() as i64 - edges.len() as i64 + facets.len() as i64;
    if euler != 2 {
        return Err(Error::Construction(format!(
            "boundary complex fails Euler relation (V-E+F = {euler})"
        )));
    }

    let volume = facets.iter().map(|f| f.halfspace.offset * f.area).sum::<f64>() / 3.0;
    if !(volume > tol * scale * scale) {
        return Err(Error::Construction("domain has zero volume".into()));
    }
    let center = verts.iter().fold(Vec3::ZERO, |s, &v| s + v) / verts.len() as f64;
    let radius = verts.iter().map(|v| v.dist(center)).fold(0.0, f64::max);

    Ok(Domain { input: hs, vertices: verts, edges, facets, volume, center, radius })
}

fn cycle_area(verts: &[Vec3], cycle: &[usize], normal: Vec3) -> f64 {
    let mut s = Vec3::ZERO;
    for w in 0..cycle.len() {
        s += verts[cycle[w]].cross(verts[cycle[(w + 1) % cycle.len()]]);
    }
    0.5 * s.dot(normal)
}

impl Domain {
    /// Axis-aligned box [x0,x1] x [y0,y1] x [z0,z1].
    pub fn cuboid(lo: Vec3, hi: Vec3) -> Result<Domain> {
        build_domain(&[
            Halfspace::new(Vec3::new(-1.0, 0.0, 0.0), -lo.x),
            Halfspace::new(Vec3::new(1.0, 0.0, 0.0), hi.x),
            Halfspace::new(Vec3::new(0.0, -1.0, 0.0), -lo.y),
            Halfspace::new(Vec3::new(0.0, 1.0, 0.0), hi.y),
            Halfspace::new(Vec3::new(0.0, 0.0, -1.0), -lo.z),
            Halfspace::new(Vec3::new(0.0, 0.0, 1.0), hi.z),
        ])
    }

    /// Cube [0,a]^3.
    pub fn cube(a: f64) -> Result<Domain> {
        Domain::cuboid(Vec3::ZERO, Vec3::new(a, a, a))
    }

    /// The halfspaces as supplied (normalized), including redundant ones.
    pub fn input_halfspaces(&self) -> &[Halfspace] {
        &self.input
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn edges(&self) -> &[DomainEdge] {
        &self.edges
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Vertex centroid; an interior point.
    pub fn center(&self) -> Vec3 {
        self.center
    }

    /// Largest distance from [`Domain::center`] to a vertex.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Length scale used to make tolerances relative.
    pub fn scale(&self) -> f64 {
        (self.radius + self.center.max_abs()).max(1e-300)
    }

    pub fn tol(&self) -> f64 {
        EPS_GEOM * self.scale()
    }

    /// Range of the time coordinate over the domain.
    pub fn t_range(&self) -> (f64, f64) {
        self.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v.x), hi.max(v.x)))
    }

    /// Support function h(u) = max over the domain of <x,u>.
    pub fn support(&self, u: Vec3) -> f64 {
        self.vertices.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Minimal slack over facets: positive inside, zero on the boundary.
    pub fn depth(&self, x: Vec3) -> f64 {
        self.facets.iter().map(|f| f.halfspace.slack(x)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: Vec3) -> bool {
        self.depth(x) > 0.0
    }

    /// Facets whose plane passes within tolerance of `x`.
    pub fn facets_at(&self, x: Vec3) -> Vec<usize> {
        let tol = self.tol();
        (0..self.facets.len()).filter(|&i| self.facets[i].halfspace.slack(x).abs() <= tol).collect()
    }

    /// Parameter interval of the line `p + s d` inside the closed domain.
    pub fn clip_line(&self, p: Vec3, d: Vec3) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for f in &self.facets {
            let nd = f.halfspace.normal.dot(d);
            let sl = f.halfspace.slack(p);
            if nd.abs() < 1e-300 {
                if sl < 0.0 {
                    return None;
                }
                continue;
            }
            let s = sl / nd;
            if nd > 0.0 {
                hi = hi.min(s);
            } else {
                lo = lo.max(s);
            }
        }
        (lo < hi).then_some((lo, hi))
    }

    /// Facet indices whose normals are (anti)parallel to the time axis.
    pub fn is_temporal_facet(&self, k: usize) -> bool {
        let n = self.facets[k].halfspace.normal;
        n.y.hypot(n.z) <= EPS_GEOM
    }
}
