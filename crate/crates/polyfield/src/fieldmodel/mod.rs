//! Static configurations: admissibility, Gibbs energy, boundary births and
//! summaries.

mod cone;
mod config;
mod energy;
mod entries;
pub mod serial;
mod stats;
mod validate;

pub use cone::stable_cone;
pub use config::{BoundaryEdge, ConfigVertex, Creator, Face, InternalEdge, PolyConfig, VertexKind};
pub use energy::{energy, energy_terms, EnergyTerms};
pub use entries::entry_events;
pub use stats::{stats, ConfigStats};
pub use validate::{validate, Condition, ValidationReport, Violation, VALIDATE_EPS};
