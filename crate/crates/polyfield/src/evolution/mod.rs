//! Event-driven construction of configurations.
//!
//! A spatial slice sweeps the domain along the time axis. Each face appears in
//! the slice as a set of collinear segments on a moving line; segment endpoints
//! are crossings with other faces or with the domain boundary. Between events
//! every endpoint moves linearly, so event times are exact roots of linear
//! functions. Births come from interior triangle sites (packages), angle births
//! on faces, edge births at crossings, and user-supplied entry events.
//!
//! All randomness downstream of a package is drawn from streams keyed by the
//! package key and the event path, so the output is a deterministic function of
//! (domain, entries, packages).

mod assemble;
mod sweep;

pub use sweep::{next_kinematic_event, EvolutionState, EventKind, KinematicEvent};

use crate::error::{invalid, Error, Result};
use crate::fieldmodel::PolyConfig;
use crate::geometry::{Domain, Plane, Vec3};
use crate::stochgeom::{sample_vertex_frame, RngStream, StreamKey, VertexFrame, I4};
use serde::{Deserialize, Serialize};

pub(crate) mod tag {
    pub const IT_FRAME: u64 = 1;
    pub const IT_FACE: u64 = 2;
    pub const IA_CLOCK: u64 = 3;
    pub const IA_FRAME: u64 = 4;
    pub const IA_FACE: u64 = 5;
    pub const IE_PAIR: u64 = 6;
    pub const IE_CLOCK: u64 = 7;
    pub const IE_DRAW: u64 = 8;
    pub const IE_FACE: u64 = 9;
    pub const ENTRY_FACE: u64 = 10;
    pub const SIMULATE: u64 = 11;
    pub const PACKAGE: u64 = 12;
}

/// An interior triangle birth site together with the key of the stream that
/// supplies all randomness of its progeny.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BirthPackage {
    pub site: Vec3,
    pub key: StreamKey,
}

impl BirthPackage {
    /// Normals of the three planes born at the site.
    pub fn frame(&self) -> VertexFrame {
        sample_vertex_frame(&mut self.key.child(&[tag::IT_FRAME]).stream())
    }

    pub fn planes(&self) -> Result<[Plane; 3]> {
        let f = self.frame();
        Ok([
            Plane::through(self.site, f.n1)?,
            Plane::through(self.site, f.n2)?,
            Plane::through(self.site, f.n3)?,
        ])
    }

    /// Total order used to process packages independently of insertion order.
    pub(crate) fn order(a: &BirthPackage, b: &BirthPackage) -> std::cmp::Ordering {
        a.site.x.total_cmp(&b.site.x).then(a.key.cmp(&b.key))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    /// Two planes born at a point inside a domain facet.
    Ia,
    /// One plane born at a point of a domain edge.
    Ie,
}

/// A birth on the domain boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryEvent {
    pub kind: EntryKind,
    pub time: f64,
    pub location: Vec3,
    pub planes: Vec<Plane>,
}

impl EntryEvent {
    pub fn new(kind: EntryKind, location: Vec3, planes: Vec<Plane>) -> Result<EntryEvent> {
        let need = match kind {
            EntryKind::Ia => 2,
            EntryKind::Ie => 1,
        };
        if planes.len() != need {
            return invalid(format!("{kind:?} entry needs {need} plane(s), got {}", planes.len()));
        }
        Ok(EntryEvent { kind, time: location.x, location, planes })
    }

    /// Content hash used to key the entry's faces.
    pub fn key(&self) -> StreamKey {
        let mut bytes = Vec::new();
        bytes.push(self.kind as u8);
        for v in [self.location.x, self.location.y, self.location.z] {
            bytes.extend_from_slice(&v.to_bits().to_le_bytes());
        }
        for p in &self.planes {
            for v in [p.u.x, p.u.y, p.u.z, p.rho] {
                bytes.extend_from_slice(&v.to_bits().to_le_bytes());
            }
        }
        StreamKey(0x656e747279).child_bytes(&bytes)
    }

    /// Equality up to the geometric tolerance at length scale `scale`.
    pub fn approx_eq(&self, o: &EntryEvent, scale: f64) -> bool {
        let tol = 1e-7 * scale.max(1.0);
        self.kind == o.kind
            && (self.time - o.time).abs() <= tol
            && self.location.dist(o.location) <= tol
            && self.planes.len() == o.planes.len()
            && self.planes.iter().all(|p| o.planes.iter().any(|q| (p.u - q.u).norm() <= 1e-7 && (p.rho - q.rho).abs() <= tol))
    }
}

/// Rate multipliers of the spontaneous births. Both are 1 for the field
/// itself; other values exist for sensitivity controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub ia_rate_scale: f64,
    pub ie_rate_scale: f64,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        EvolutionParams { ia_rate_scale: 1.0, ie_rate_scale: 1.0 }
    }
}

/// Counters collected during one sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepStats {
    pub kinematic_events: usize,
    pub it_births: usize,
    pub ia_births: usize,
    pub ie_births: usize,
    pub ie_candidates: usize,
    pub entry_births: usize,
    /// Face areas integrated over the sweep, indexed like the output faces.
    pub swept_areas: Vec<f64>,
}

impl SweepStats {
    pub fn births(&self) -> usize {
        self.it_births + self.ia_births + self.ie_births + self.entry_births
    }
}

/// The configuration determined by the domain, the entry events and the
/// birth packages.
pub fn resolve(d: &Domain, entries: &[EntryEvent], packages: &[BirthPackage]) -> Result<PolyConfig> {
    resolve_with(d, entries, packages, EvolutionParams::default()).map(|r| r.0)
}

pub fn resolve_with(
    d: &Domain,
    entries: &[EntryEvent],
    packages: &[BirthPackage],
    params: EvolutionParams,
) -> Result<(PolyConfig, SweepStats)> {
    for p in packages {
        if !d.contains(p.site) {
            return invalid(format!("package site {:?} lies outside the domain", p.site));
        }
    }
    let mut pk = packages.to_vec();
    pk.sort_by(BirthPackage::order);
    let mut en = entries.to_vec();
    en.sort_by(|a, b| a.time.total_cmp(&b.time));
    sweep::run(d, &en, &pk, params)
}

/// Uniform point of the domain by rejection from its bounding box.
pub fn uniform_point(d: &Domain, rng: &mut RngStream) -> Vec3 {
    let (mut lo, mut hi) = (Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY), Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY));
    for v in d.vertices() {
        lo = Vec3::new(lo.x.min(v.x), lo.y.min(v.y), lo.z.min(v.z));
        hi = Vec3::new(hi.x.max(v.x), hi.y.max(v.y), hi.z.max(v.z));
    }
    loop {
        let x = Vec3::new(rng.uniform_in(lo.x, hi.x), rng.uniform_in(lo.y, hi.y), rng.uniform_in(lo.z, hi.z));
        if d.contains(x) {
            return x;
        }
    }
}

/// Draws interior birth packages as a Poisson process of intensity pi^4/6.
pub fn sample_packages(d: &Domain, key: StreamKey) -> Vec<BirthPackage> {
    let mut rng = key.stream();
    let n = rng.poisson(I4 * d.volume());
    (0..n)
        .map(|i| BirthPackage { site: uniform_point(d, &mut rng), key: key.child(&[tag::PACKAGE, i]) })
        .collect()
}

const MAX_ATTEMPTS: u64 = 32;

/// A random configuration together with the packages that reproduce it
/// through [`resolve`].
///
/// A null-probability degeneracy (simultaneous events, parallel planes) is
/// handled by redrawing from a fresh child stream.
pub fn simulate_field(d: &Domain, entries: &[EntryEvent], rng: &mut RngStream) -> Result<(PolyConfig, Vec<BirthPackage>)> {
    simulate_field_with(d, entries, rng, EvolutionParams::default())
}

pub fn simulate_field_with(
    d: &Domain,
    entries: &[EntryEvent],
    rng: &mut RngStream,
    params: EvolutionParams,
) -> Result<(PolyConfig, Vec<BirthPackage>)> {
    let base = StreamKey(rng.next_word() as u128 | ((rng.next_word() as u128) << 64));
    let mut last = None;
    for attempt in 0..MAX_ATTEMPTS {
        let key = base.child(&[tag::SIMULATE, attempt]);
        let pk = sample_packages(d, key);
        match resolve_with(d, entries, &pk, params) {
            Ok((cfg, _)) => return Ok((cfg, pk)),
            Err(e @ Error::Degeneracy(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Degeneracy("repeated degeneracies".into())))
}
