use super::{PolyConfig, VertexKind};
use serde::{Deserialize, Serialize};

/// Summary counts and measures of a configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigStats {
    pub face_count: usize,
    pub internal_edge_count: usize,
    pub boundary_edge_count: usize,
    pub internal_vertex_count: usize,
    pub boundary_vertex_count: usize,
    pub total_area: f64,
    pub total_edge_length: f64,
    pub face_areas: Vec<f64>,
}

impl ConfigStats {
    /// Vertices of the configuration proper (bends excluded).
    pub fn vertex_count(&self) -> usize {
        self.internal_vertex_count + self.boundary_vertex_count
    }
}

pub fn stats(cfg: &PolyConfig) -> ConfigStats {
    let count = |k: VertexKind| cfg.vertices.iter().filter(|v| v.kind == k).count();
    let face_areas: Vec<f64> = cfg.faces.iter().map(|f| f.polygon.area()).collect();
    ConfigStats {
        face_count: cfg.faces.len(),
        internal_edge_count: cfg.internal_edges.len(),
        boundary_edge_count: cfg.boundary_edges.len(),
        internal_vertex_count: count(VertexKind::Internal),
        boundary_vertex_count: count(VertexKind::Boundary),
        total_area: face_areas.iter().sum(),
        total_edge_length: cfg.total_edge_length(),
        face_areas,
    }
}
