use crate::geometry::{Polygon2, Vec3};
use crate::stochgeom::StreamKey;
use serde::{Deserialize, Serialize};

/// How a configuration vertex sits in the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexKind {
    /// Interior point where three faces and three edges meet.
    Internal,
    /// Point of the domain boundary where two faces, one internal edge and two
    /// boundary edges meet.
    Boundary,
    /// Point where a single face's boundary trace turns from one domain facet
    /// to the next. Not a vertex of the configuration proper.
    Bend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigVertex {
    pub point: Vec3,
    pub kind: VertexKind,
}

/// Edge shared by two faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InternalEdge {
    pub ends: [usize; 2],
    pub faces: [usize; 2],
    /// Unit vectors in each face plane, orthogonal to the edge, pointing into the face.
    pub sides: [Vec3; 2],
    pub angle: f64,
    pub length: f64,
}

/// Edge of one face lying on the domain boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub ends: [usize; 2],
    pub face: usize,
    pub facet: usize,
}

/// Genealogy of a face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Creator {
    /// One of the three faces of an interior triangle birth.
    It { package: StreamKey, slot: u8 },
    /// One of the two faces of an angle birth on face `parent`.
    Ia { parent: usize, index: u32, slot: u8 },
    /// The face of an edge birth at the crossing of `parents`.
    Ie { parents: [usize; 2], index: u32 },
    /// A face born in the boundary event `entry` of the entry set.
    Entry { entry: usize, slot: u8 },
    /// Built by hand, outside the dynamics.
    Static,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub polygon: Polygon2,
    pub creator: Creator,
    pub key: StreamKey,
    /// Earliest point of the face (its birth point for dynamic faces).
    pub origin: Vec3,
}

/// A polyhedral configuration: faces, their shared and boundary edges, and
/// vertices.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PolyConfig {
    pub vertices: Vec<ConfigVertex>,
    pub internal_edges: Vec<InternalEdge>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub faces: Vec<Face>,
}

impl PolyConfig {
    pub fn empty() -> PolyConfig {
        PolyConfig::default()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.faces.iter().map(|f| f.polygon.area()).sum()
    }

    pub fn total_edge_length(&self) -> f64 {
        self.internal_edges.iter().map(|e| e.length).sum()
    }
}
