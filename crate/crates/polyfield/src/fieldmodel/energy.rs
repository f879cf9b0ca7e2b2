use super::PolyConfig;
use crate::error::{invalid, Result};
use crate::geometry::Domain;
use crate::kinematics::Wedge;
use crate::stochgeom::{I3, I4};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The three parts of the Gibbs energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTerms {
    /// Half the sum over internal edges of (2 pi - wedge angle) times length.
    pub edges: f64,
    /// pi^3/4 times the total face area.
    pub faces: f64,
    /// pi^4/6 times the domain volume.
    pub volume: f64,
}

impl EnergyTerms {
    pub fn total(&self) -> f64 {
        self.edges + self.faces + self.volume
    }
}

pub fn energy_terms(cfg: &PolyConfig, d: &Domain) -> Result<EnergyTerms> {
    let nv = cfg.vertices.len();
    let mut edges = 0.0;
    for (i, e) in cfg.internal_edges.iter().enumerate() {
        if e.ends.iter().any(|&v| v >= nv) || e.faces.iter().any(|&f| f >= cfg.faces.len()) {
            return invalid(format!("internal edge {i} has dangling indices"));
        }
        let (p, q) = (cfg.vertices[e.ends[0]].point, cfg.vertices[e.ends[1]].point);
        let w = Wedge { direction: q - p, sides: e.sides };
        let angle = w.angle().or_else(|err| invalid(format!("internal edge {i}: {err}")))?;
        edges += 0.5 * (2.0 * PI - angle) * p.dist(q);
    }
    let area: f64 = cfg.faces.iter().map(|f| f.polygon.area()).sum();
    Ok(EnergyTerms { edges, faces: I3 * area, volume: I4 * d.volume() })
}

/// Gibbs energy of a configuration in `d`. Wedge angles are recomputed from
/// the edge geometry rather than read from the stored values.
pub fn energy(cfg: &PolyConfig, d: &Domain) -> Result<f64> {
    energy_terms(cfg, d).map(|t| t.total())
}
