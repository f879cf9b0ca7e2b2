//! Turns the traces recorded during a sweep into a configuration.

use super::sweep::EvolutionState;
use crate::error::{Error, Result};
use crate::fieldmodel::{BoundaryEdge, ConfigVertex, Face, InternalEdge, PolyConfig, VertexKind};
use crate::geometry::{Polygon2, Vec3};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub(crate) struct Output {
    pub vertices: Vec<ConfigVertex>,
    pub internal: Vec<InternalEdge>,
    pub boundary: Vec<BoundaryEdge>,
}

impl Output {
    pub fn vertex(&mut self, point: Vec3, kind: VertexKind) -> usize {
        self.vertices.push(ConfigVertex { point, kind });
        self.vertices.len() - 1
    }

    /// Reuses a vertex of the same location, upgrading a bend to a boundary vertex.
    pub fn vertex_dedup(&mut self, point: Vec3, kind: VertexKind, tol: f64) -> usize {
        if let Some(i) = self.vertices.iter().position(|v| v.point.dist(point) <= tol) {
            if kind == VertexKind::Boundary {
                self.vertices[i].kind = VertexKind::Boundary;
            }
            return i;
        }
        self.vertex(point, kind)
    }

    pub fn internal(&mut self, start: usize, end: usize, faces: [usize; 2], sides: [Vec3; 2], angle: f64) {
        let length = self.vertices[start].point.dist(self.vertices[end].point);
        self.internal.push(InternalEdge { ends: [start, end], faces, sides, angle, length });
    }

    pub fn boundary(&mut self, start: usize, end: usize, face: usize, facet: usize) {
        self.boundary.push(BoundaryEdge { ends: [start, end], face, facet });
    }
}

/// Splits the edge set of one face into closed vertex cycles.
pub(crate) fn face_cycles(edges: &[[usize; 2]]) -> Result<Vec<Vec<usize>>> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        adj.entry(e[0]).or_default().push(i);
        adj.entry(e[1]).or_default().push(i);
    }
    if let Some((v, l)) = adj.iter().find(|(_, l)| l.len() != 2) {
        return Err(Error::Degeneracy(format!("face boundary has degree {} at vertex {v}", l.len())));
    }
    let mut used = vec![false; edges.len()];
    let mut cycles = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        let mut cyc = vec![edges[start][0]];
        let mut cur = edges[start][1];
        used[start] = true;
        let mut last = start;
        while cur != cyc[0] {
            cyc.push(cur);
            let next = *adj[&cur].iter().find(|&&e| e != last && !used[e]).ok_or_else(|| {
                Error::Degeneracy("face boundary does not close".into())
            })?;
            used[next] = true;
            last = next;
            cur = if edges[next][0] == cur { edges[next][1] } else { edges[next][0] };
        }
        cycles.push(cyc);
    }
    Ok(cycles)
}

pub(crate) fn assemble(st: &EvolutionState) -> Result<PolyConfig> {
    let out = &st.out;
    // drop vertices no edge refers to (none for a complete sweep)
    let mut per_face: Vec<Vec<[usize; 2]>> = vec![Vec::new(); st.faces.len()];
    for e in &out.internal {
        per_face[e.faces[0]].push(e.ends);
        per_face[e.faces[1]].push(e.ends);
    }
    for e in &out.boundary {
        per_face[e.face].push(e.ends);
    }
    let mut faces = Vec::with_capacity(st.faces.len());
    for (f, rec) in st.faces.iter().enumerate() {
        let edges: Vec<[usize; 2]> = per_face[f].iter().copied().filter(|e| e[0] != e[1]).collect();
        if edges.is_empty() {
            return Err(Error::Degeneracy(format!("face {f} left no trace")));
        }
        let cycles = face_cycles(&edges)?;
        let pts: Vec<Vec<Vec3>> = cycles
            .iter()
            .map(|c| c.iter().map(|&v| rec.plane.project(out.vertices[v].point)).collect())
            .collect();
        let probe = |c: &Vec<Vec3>| {
            Polygon2 { plane: rec.plane, outer: c.clone(), holes: Vec::new() }.area().abs()
        };
        let outer_i = (0..pts.len())
            .max_by(|&a, &b| probe(&pts[a]).total_cmp(&probe(&pts[b])))
            .expect("nonempty");
        let holes: Vec<Vec<Vec3>> = (0..pts.len()).filter(|&i| i != outer_i).map(|i| pts[i].clone()).collect();
        let polygon = Polygon2::new(rec.plane, pts[outer_i].clone(), holes)
            .map_err(|e| Error::Degeneracy(format!("face {f}: {e}")))?;
        faces.push(Face { polygon, creator: rec.creator.clone(), key: rec.key, origin: rec.origin });
    }
    Ok(PolyConfig {
        vertices: out.vertices.clone(),
        internal_edges: out.internal.clone(),
        boundary_edges: out.boundary.clone(),
        faces,
    })
}
