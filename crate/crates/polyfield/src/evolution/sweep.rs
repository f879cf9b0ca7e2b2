//! The slice state and its event loop.
//!
//! Segments live on face lines and end at nodes. An inner node is the
//! crossing of two face lines; a bound node is the crossing of a face line
//! with a facet line of the domain slice. Certificates for every possible
//! change are recomputed from scratch after each event.

use super::assemble::Output;
use super::{tag, BirthPackage, EntryEvent, EntryKind, EvolutionParams, SweepStats};
use crate::error::{degenerate, invalid, Result};
use crate::fieldmodel::{Creator, PolyConfig, VertexKind};
use crate::geometry::{intersect_plane_domain, line_of, Domain, Plane, Vec2, Vec3};
use crate::kinematics::{
    newborn_triangle_normals, stable_ie, stable_it, vertex_velocity, wedge_angle_slice, IeOutcome, SliceLine,
};
use crate::stochgeom::{sample_normal_hitting_line, sample_vertex_frame_given, RngStream, StreamKey, I3};
use serde::{Deserialize, Serialize};
use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::f64::consts::PI;

const NONE: usize = usize::MAX;
/// Certificates whose two objects are already within this many scale units
/// of each other are ignored: they were just created together.
const TOUCH: f64 = 1e-12;
const MAX_IE_DRAWS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NodeKind {
    Inner([usize; 2]),
    Bound { face: usize, facet: usize },
}

#[derive(Debug, Clone)]
pub(crate) struct Node {
    pub kind: NodeKind,
    /// Segment on each face of the node (slot 1 unused for bound nodes).
    pub segs: [usize; 2],
    pub start: usize,
}

impl Node {
    fn slot(&self, face: usize) -> usize {
        match self.kind {
            NodeKind::Inner([a, _]) if a == face => 0,
            NodeKind::Inner([_, b]) if b == face => 1,
            NodeKind::Bound { face: f, .. } if f == face => 0,
            _ => panic!("node is not on face {face}"),
        }
    }

    fn other_face(&self, face: usize) -> usize {
        match self.kind {
            NodeKind::Inner([a, b]) => {
                if a == face {
                    b
                } else {
                    a
                }
            }
            NodeKind::Bound { .. } => NONE,
        }
    }

    fn has_face(&self, f: usize) -> bool {
        match self.kind {
            NodeKind::Inner([a, b]) => a == f || b == f,
            NodeKind::Bound { face, .. } => face == f,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Seg {
    pub face: usize,
    /// End nodes, ordered along the face line direction.
    pub ends: [usize; 2],
}

#[derive(Debug, Clone)]
pub(crate) struct FaceRec {
    pub plane: Plane,
    pub line: SliceLine,
    pub key: StreamKey,
    pub creator: Creator,
    pub origin: Vec3,
    /// 1/|u_s|: converts slice length times dt into face area.
    pub area_factor: f64,
    pub swept: f64,
}

/// Kind of the next change of a slice state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// A segment shrinks to a point.
    SegmentExtinction,
    /// The gap between two segments of one face closes.
    SegmentMerge,
    /// A crossing point meets a segment of a third face.
    VertexCollision,
    /// An endpoint reaches the boundary of the domain slice, or two endpoints
    /// on the same facet meet, or an endpoint passes a slice corner.
    BoundaryContact,
    /// The combinatorics of the domain slice changes.
    DomainChange,
    /// The slice leaves the domain. Also the sentinel for an empty state.
    EndOfSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicEvent {
    pub time: f64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ev {
    Extinct(usize),
    Gap(usize, usize),
    Hit(usize, usize),
    Exit(usize, usize),
    Merge(usize, usize),
    Corner(usize, usize),
    Domain,
    End,
}

impl Ev {
    fn rank(&self) -> (u8, usize, usize) {
        match *self {
            Ev::Extinct(s) => (0, s, 0),
            Ev::Gap(a, b) => (1, a, b),
            Ev::Hit(a, b) => (2, a, b),
            Ev::Exit(a, b) => (3, a, b),
            Ev::Merge(a, b) => (4, a, b),
            Ev::Corner(a, b) => (5, a, b),
            Ev::Domain => (6, 0, 0),
            Ev::End => (7, 0, 0),
        }
    }

    fn kind(&self) -> EventKind {
        match self {
            Ev::Extinct(_) => EventKind::SegmentExtinction,
            Ev::Gap(..) => EventKind::SegmentMerge,
            Ev::Hit(..) => EventKind::VertexCollision,
            Ev::Exit(..) | Ev::Merge(..) | Ev::Corner(..) => EventKind::BoundaryContact,
            Ev::Domain => EventKind::DomainChange,
            Ev::End => EventKind::EndOfSweep,
        }
    }
}

#[derive(Debug, Clone)]
enum Birth {
    It(usize),
    Ia { face: usize, index: u32, point: Vec3 },
    Ie { pair: [usize; 2], key: StreamKey, index: u32, point: Vec3 },
    Entry(usize),
}

#[derive(Debug, Clone)]
struct Queued {
    t: f64,
    seq: u64,
    birth: Birth,
}

impl PartialEq for Queued {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Queued {
    fn cmp(&self, o: &Self) -> Ordering {
        self.t.total_cmp(&o.t).then(self.seq.cmp(&o.seq))
    }
}

/// Slice state of an evolution: faces, nodes, segments and the domain slice
/// at the current time.
#[derive(Debug, Clone)]
pub struct EvolutionState {
    domain: Domain,
    t: f64,
    t_end: f64,
    pub(crate) faces: Vec<FaceRec>,
    pub(crate) nodes: Vec<Option<Node>>,
    pub(crate) segs: Vec<Option<Seg>>,
    pairs: BTreeMap<(usize, usize), usize>,
    facet_lines: Vec<Option<SliceLine>>,
    ring: Vec<usize>,
    ring_until: f64,
    dom_times: Vec<f64>,
    pub(crate) out: Output,
    tol: f64,
    tie: f64,
    // birth machinery; inactive for hand-built states
    clocks: bool,
    params: EvolutionParams,
    queue: BinaryHeap<Reverse<Queued>>,
    seq: u64,
    ie_seen: BTreeSet<(usize, usize)>,
    stats: SweepStats,
}

fn pair(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn lam(line: &SliceLine, p: Vec2) -> f64 {
    line.direction().dot(p)
}

impl EvolutionState {
    /// Empty state of the slice of `d` at time `t`.
    pub fn new(d: &Domain, t: f64) -> Result<EvolutionState> {
        let (t0, t1) = d.t_range();
        if !(t >= t0 && t <= t1) {
            return invalid(format!("time {t} is outside the domain range [{t0}, {t1}]"));
        }
        let facet_lines = (0..d.facets().len())
            .map(|k| {
                if d.is_temporal_facet(k) {
                    None
                } else {
                    SliceLine::from_halfspace(&d.facets()[k].halfspace).ok()
                }
            })
            .collect();
        let mut times: Vec<f64> = d.vertices().iter().map(|v| v.x).collect();
        times.sort_by(f64::total_cmp);
        let tol = d.tol();
        times.dedup_by(|a, b| (*a - *b).abs() <= tol);
        let mut s = EvolutionState {
            domain: d.clone(),
            t,
            t_end: t1,
            faces: Vec::new(),
            nodes: Vec::new(),
            segs: Vec::new(),
            pairs: BTreeMap::new(),
            facet_lines,
            ring: Vec::new(),
            ring_until: t,
            dom_times: times,
            out: Output::default(),
            tol,
            tie: 1e-12 * d.scale(),
            clocks: false,
            params: EvolutionParams::default(),
            queue: BinaryHeap::new(),
            seq: 0,
            ie_seen: BTreeSet::new(),
            stats: SweepStats::default(),
        };
        s.refresh_ring();
        Ok(s)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn segment_count(&self) -> usize {
        self.segs.iter().flatten().count()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.iter().flatten().count()
    }

    /// Adds a face without any section yet; returns its id.
    pub fn add_face(&mut self, plane: Plane) -> Result<usize> {
        self.push_face(plane, StreamKey(0), Creator::Static, Vec3::from_time_space(self.t, Vec2::ZERO))
    }

    /// Adds a closed polygon of sections: consecutive faces (cyclically) meet
    /// at inner nodes.
    pub fn add_closed_chain(&mut self, faces: &[usize]) -> Result<()> {
        let n = faces.len();
        if n < 3 {
            return invalid("a closed chain needs at least three faces");
        }
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (faces[i], faces[(i + 1) % n]);
            let p = self.pos_of(NodeKind::Inner([a, b]))?;
            let v = self.out.vertex(Vec3::from_time_space(self.t, p), VertexKind::Internal);
            nodes.push(self.new_node(NodeKind::Inner([a, b]), v)?);
        }
        for i in 0..n {
            let ends = self.ordered(faces[i], nodes[(i + n - 1) % n], nodes[i])?;
            self.new_seg(faces[i], ends);
        }
        Ok(())
    }

    /// Adds an open polyline of sections from facet `first` to facet `last`.
    pub fn add_open_chain(&mut self, first: usize, faces: &[usize], last: usize) -> Result<()> {
        let n = faces.len();
        if n == 0 {
            return invalid("an open chain needs at least one face");
        }
        for k in [first, last] {
            if k >= self.facet_lines.len() || self.facet_lines[k].is_none() {
                return invalid(format!("facet {k} has no slice line"));
            }
        }
        let mut nodes = Vec::with_capacity(n + 1);
        let kind = NodeKind::Bound { face: faces[0], facet: first };
        let v = self.out.vertex(Vec3::from_time_space(self.t, self.pos_of(kind)?), VertexKind::Bend);
        nodes.push(self.new_node(kind, v)?);
        for i in 0..n - 1 {
            let kind = NodeKind::Inner([faces[i], faces[i + 1]]);
            let v = self.out.vertex(Vec3::from_time_space(self.t, self.pos_of(kind)?), VertexKind::Internal);
            nodes.push(self.new_node(kind, v)?);
        }
        let kind = NodeKind::Bound { face: faces[n - 1], facet: last };
        let v = self.out.vertex(Vec3::from_time_space(self.t, self.pos_of(kind)?), VertexKind::Bend);
        nodes.push(self.new_node(kind, v)?);
        for i in 0..n {
            let ends = self.ordered(faces[i], nodes[i], nodes[i + 1])?;
            self.new_seg(faces[i], ends);
        }
        Ok(())
    }

    // ---- basic accessors -------------------------------------------------

    fn node(&self, n: usize) -> &Node {
        self.nodes[n].as_ref().expect("live node")
    }

    fn seg(&self, s: usize) -> &Seg {
        self.segs[s].as_ref().expect("live segment")
    }

    fn face_line(&self, f: usize) -> &SliceLine {
        &self.faces[f].line
    }

    fn lines_of(&self, k: NodeKind) -> (SliceLine, SliceLine) {
        match k {
            NodeKind::Inner([a, b]) => (self.faces[a].line, self.faces[b].line),
            NodeKind::Bound { face, facet } => (self.faces[face].line, self.facet_lines[facet].expect("facet line")),
        }
    }

    fn pos_of(&self, k: NodeKind) -> Result<Vec2> {
        let (l1, l2) = self.lines_of(k);
        l1.meet(&l2, self.t)
    }

    fn pos(&self, n: usize) -> Vec2 {
        self.pos_of(self.node(n).kind).expect("nodes have transversal lines")
    }

    fn vel(&self, n: usize) -> Vec2 {
        let (l1, l2) = self.lines_of(self.node(n).kind);
        vertex_velocity(&l1, &l2).expect("nodes have transversal lines")
    }

    fn seg_on(&self, n: usize, face: usize) -> usize {
        let nd = self.node(n);
        nd.segs[nd.slot(face)]
    }

    fn other_end(&self, s: usize, n: usize) -> usize {
        let e = self.seg(s).ends;
        if e[0] == n {
            e[1]
        } else {
            debug_assert_eq!(e[1], n);
            e[0]
        }
    }

    fn bound_facet(&self, n: usize) -> Option<usize> {
        match self.node(n).kind {
            NodeKind::Bound { facet, .. } => Some(facet),
            _ => None,
        }
    }

    /// Orders two nodes on a face line by position, then by velocity.
    fn ordered(&self, face: usize, p: usize, q: usize) -> Result<[usize; 2]> {
        let l = self.face_line(face);
        let (a, b) = (lam(l, self.pos(p)), lam(l, self.pos(q)));
        if (a - b).abs() > self.tol {
            return Ok(if a < b { [p, q] } else { [q, p] });
        }
        let (va, vb) = (lam(l, self.vel(p)), lam(l, self.vel(q)));
        if (va - vb).abs() <= 1e-12 {
            return degenerate("coincident segment ends with equal velocity");
        }
        Ok(if va < vb { [p, q] } else { [q, p] })
    }

    // ---- mutation --------------------------------------------------------

    fn push_face(&mut self, plane: Plane, key: StreamKey, creator: Creator, origin: Vec3) -> Result<usize> {
        let line = SliceLine::from_plane(&plane)?;
        let area_factor = 1.0 / plane.u.spatial().norm();
        for (k, fl) in self.facet_lines.iter().enumerate() {
            if fl.is_some() && plane.coincides(&self.domain.facets()[k].halfspace.plane(), self.domain.scale()) {
                return degenerate("face plane coincides with a domain facet");
            }
        }
        let id = self.faces.len();
        self.faces.push(FaceRec { plane, line, key, creator, origin, area_factor, swept: 0.0 });
        if self.clocks {
            self.ia_clock(id)?;
        }
        Ok(id)
    }

    fn new_node(&mut self, kind: NodeKind, start: usize) -> Result<usize> {
        let (l1, l2) = self.lines_of(kind);
        vertex_velocity(&l1, &l2)?;
        let id = self.nodes.len();
        if let NodeKind::Inner([a, b]) = kind {
            if a == b {
                return degenerate("node on a single face");
            }
            if self.pairs.insert(pair(a, b), id).is_some() {
                return degenerate("two crossings of the same face pair");
            }
        }
        self.nodes.push(Some(Node { kind, segs: [NONE; 2], start }));
        if let NodeKind::Inner([a, b]) = kind {
            if self.clocks && self.ie_seen.insert(pair(a, b)) {
                self.ie_clock(a, b)?;
            }
        }
        Ok(id)
    }

    fn new_seg(&mut self, face: usize, ends: [usize; 2]) -> usize {
        let id = self.segs.len();
        self.segs.push(Some(Seg { face, ends }));
        for n in ends {
            let nd = self.nodes[n].as_mut().expect("live node");
            let sl = nd.slot(face);
            nd.segs[sl] = id;
        }
        id
    }

    /// Points segment `s` at `new` instead of `old`.
    fn reattach(&mut self, s: usize, old: usize, new: usize) {
        let face = self.seg(s).face;
        let sg = self.segs[s].as_mut().expect("live segment");
        for e in sg.ends.iter_mut() {
            if *e == old {
                *e = new;
            }
        }
        let nd = self.nodes[new].as_mut().expect("live node");
        let sl = nd.slot(face);
        nd.segs[sl] = s;
    }

    fn kill_seg(&mut self, s: usize) {
        self.segs[s] = None;
    }

    fn kill_node(&mut self, n: usize) {
        if let NodeKind::Inner([a, b]) = self.node(n).kind {
            self.pairs.remove(&pair(a, b));
        }
        self.nodes[n] = None;
    }

    /// Records the edge traced by node `n` from its start to vertex `end`.
    fn emit(&mut self, n: usize, end: usize) -> Result<()> {
        let nd = self.node(n).clone();
        match nd.kind {
            NodeKind::Inner([a, b]) => {
                let ray = |s: usize| -> Vec2 {
                    let dir = self.face_line(self.seg(s).face).direction();
                    if self.seg(s).ends[0] == n {
                        dir
                    } else {
                        -dir
                    }
                };
                let (ua, ub) = (ray(nd.segs[0]), ray(nd.segs[1]));
                let w = self.vel(n);
                let d = Vec3::new(1.0, w.x, w.y).normalized();
                let angle = wedge_angle_slice(d, ua, ub)?;
                let side = |u: Vec2| {
                    let h = Vec3::new(0.0, u.x, u.y);
                    (h - d * h.dot(d)).normalized()
                };
                self.out.internal(nd.start, end, [a, b], [side(ua), side(ub)], angle);
            }
            NodeKind::Bound { face, facet } => self.out.boundary(nd.start, end, face, facet),
        }
        Ok(())
    }

    // ---- domain slice ------------------------------------------------------

    /// Recomputes the facet cycle of the domain slice for the open interval
    /// of domain-vertex times containing the current time.
    fn refresh_ring(&mut self) {
        let next = self.dom_times.iter().copied().find(|&x| x > self.t + self.tie).unwrap_or(self.t_end);
        let prev = self.dom_times.iter().copied().filter(|&x| x <= self.t + self.tie).last().unwrap_or(self.t);
        let mid = 0.5 * (prev.max(self.domain.t_range().0) + next);
        self.ring_until = next;
        self.ring = self.slice_ring(mid);
    }

    /// Facets bounding the domain slice at time `t`, counter-clockwise.
    fn slice_ring(&self, t: f64) -> Vec<usize> {
        let big = 4.0 * self.domain.scale() + 1.0;
        let mut poly: Vec<(Vec2, usize)> = vec![
            (Vec2::new(-big, -big), NONE),
            (Vec2::new(big, -big), NONE),
            (Vec2::new(big, big), NONE),
            (Vec2::new(-big, big), NONE),
        ];
        for (k, fl) in self.facet_lines.iter().enumerate() {
            let Some(l) = fl else { continue };
            let mut out = Vec::with_capacity(poly.len() + 1);
            for i in 0..poly.len() {
                let (p, lp) = poly[i];
                let (q, _) = poly[(i + 1) % poly.len()];
                let (dp, dq) = (l.distance(p, t), l.distance(q, t));
                if dp <= 0.0 {
                    if dq <= 0.0 {
                        out.push((p, lp));
                    } else {
                        out.push((p, lp));
                        out.push((p + (q - p) * (dp / (dp - dq)), k));
                    }
                } else if dq <= 0.0 {
                    out.push((p + (q - p) * (dp / (dp - dq)), lp));
                }
            }
            poly = out;
            if poly.is_empty() {
                return Vec::new();
            }
        }
        // drop zero-length sides
        let n = poly.len();
        let mut ring = Vec::new();
        for i in 0..n {
            let (p, l) = poly[i];
            let q = poly[(i + 1) % n].0;
            if (q - p).norm() > self.tol * 1e-3 && l != NONE && ring.last() != Some(&l) {
                ring.push(l);
            }
        }
        while ring.len() > 1 && ring.first() == ring.last() {
            ring.pop();
        }
        ring
    }

    fn ring_neighbours(&self, k: usize) -> Option<[usize; 2]> {
        let i = self.ring.iter().position(|&x| x == k)?;
        let n = self.ring.len();
        Some([self.ring[(i + n - 1) % n], self.ring[(i + 1) % n]])
    }

    /// Whether the slice point `y` is strictly inside the domain slice.
    fn inside_slice(&self, y: Vec2) -> bool {
        self.ring
            .iter()
            .all(|&k| self.facet_lines[k].expect("facet line").distance(y, self.t) < -self.tol)
    }

    // ---- certificates ----------------------------------------------------

    fn next_event(&self) -> Result<(f64, Ev)> {
        let t = self.t;
        let touch = TOUCH * self.domain.scale();
        let mut best = (self.t_end, Ev::End);
        let consider = |tt: f64, ev: Ev, best: &mut (f64, Ev)| {
            let tt = tt.max(t);
            if tt < best.0 || (tt == best.0 && ev.rank() < best.1.rank()) {
                *best = (tt, ev);
            }
        };
        if self.ring_until < self.t_end {
            consider(self.ring_until, Ev::Domain, &mut best);
        }
        let live_nodes: Vec<usize> = (0..self.nodes.len()).filter(|&n| self.nodes[n].is_some()).collect();
        let pos: BTreeMap<usize, (Vec2, Vec2)> = live_nodes.iter().map(|&n| (n, (self.pos(n), self.vel(n)))).collect();
        let live_segs: Vec<usize> = (0..self.segs.len()).filter(|&s| self.segs[s].is_some()).collect();

        // per-face segment lists ordered along the line
        let mut by_face: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &s in &live_segs {
            by_face.entry(self.seg(s).face).or_default().push(s);
        }
        for (f, list) in by_face.iter_mut() {
            let l = self.face_line(*f);
            list.sort_by(|&a, &b| lam(l, pos[&self.seg(a).ends[0]].0).total_cmp(&lam(l, pos[&self.seg(b).ends[0]].0)));
        }

        for &s in &live_segs {
            let sg = self.seg(s);
            let l = self.face_line(sg.face);
            let (p0, v0) = pos[&sg.ends[0]];
            let (p1, v1) = pos[&sg.ends[1]];
            let len = lam(l, p1) - lam(l, p0);
            let rate = lam(l, v1) - lam(l, v0);
            if rate < 0.0 {
                consider(t + len.max(0.0) / -rate, Ev::Extinct(s), &mut best);
            }
        }
        for (f, list) in &by_face {
            let l = self.face_line(*f);
            for w in list.windows(2) {
                let (a, b) = (self.seg(w[0]).ends[1], self.seg(w[1]).ends[0]);
                if self.bound_facet(a).is_some() || self.bound_facet(b).is_some() {
                    continue;
                }
                let gap = lam(l, pos[&b].0) - lam(l, pos[&a].0);
                let rate = lam(l, pos[&b].1) - lam(l, pos[&a].1);
                if rate < 0.0 && gap > touch {
                    consider(t + gap / -rate, Ev::Gap(w[0], w[1]), &mut best);
                }
            }
        }
        for &n in &live_nodes {
            let nd = self.node(n);
            let (p, v) = pos[&n];
            match nd.kind {
                NodeKind::Inner([a, b]) => {
                    // collision with a segment of a third face
                    for (g, list) in &by_face {
                        if *g == a || *g == b {
                            continue;
                        }
                        let l = self.face_line(*g);
                        let d0 = l.distance(p, t);
                        let rate = v.dot(l.normal) - l.speed;
                        if d0.abs() <= touch || d0 * rate >= 0.0 {
                            continue;
                        }
                        let tau = -d0 / rate;
                        let x = lam(l, p + v * tau);
                        for &s in list {
                            let e = self.seg(s).ends;
                            if e.iter().any(|&m| {
                                let k = self.node(m);
                                k.has_face(a) || k.has_face(b)
                            }) {
                                continue;
                            }
                            let (q0, w0) = pos[&e[0]];
                            let (q1, w1) = pos[&e[1]];
                            let lo = lam(l, q0 + w0 * tau);
                            let hi = lam(l, q1 + w1 * tau);
                            if x > lo && x < hi {
                                consider(t + tau, Ev::Hit(n, s), &mut best);
                            }
                        }
                    }
                    // leaving the domain slice
                    for &k in &self.ring {
                        // a segment capped on k dies first, through its own certificate
                        if nd.segs.iter().any(|&s| self.bound_facet(self.other_end(s, n)) == Some(k)) {
                            continue;
                        }
                        let l = self.facet_lines[k].expect("facet line");
                        let d0 = l.distance(p, t);
                        let rate = v.dot(l.normal) - l.speed;
                        if rate > 0.0 && d0 < -touch {
                            consider(t + -d0 / rate, Ev::Exit(n, k), &mut best);
                        }
                    }
                }
                NodeKind::Bound { face, facet } => {
                    if let Some(nb) = self.ring_neighbours(facet) {
                        for k in nb {
                            if k == facet || self.bound_facet(self.other_end(nd.segs[0], n)) == Some(k) {
                                continue;
                            }
                            let l = self.facet_lines[k].expect("facet line");
                            let d0 = l.distance(p, t);
                            let rate = v.dot(l.normal) - l.speed;
                            if rate > 0.0 && d0 < -touch {
                                let tt = t + -d0 / rate;
                                if tt < self.ring_until {
                                    consider(tt, Ev::Corner(n, k), &mut best);
                                }
                            }
                        }
                    }
                    // meeting another bound node on the same facet
                    let fl = self.facet_lines[facet].expect("facet line");
                    let s = nd.segs[0];
                    for &m in &live_nodes {
                        if m <= n {
                            continue;
                        }
                        let NodeKind::Bound { face: g, facet: k } = self.node(m).kind else { continue };
                        if k != facet || g == face {
                            continue;
                        }
                        let sm = self.node(m).segs[0];
                        if self.other_end(s, n) == self.other_end(sm, m) {
                            continue;
                        }
                        let (q, w) = pos[&m];
                        let gap = lam(&fl, q) - lam(&fl, p);
                        let rate = lam(&fl, w) - lam(&fl, v);
                        if gap.abs() > touch && gap * rate < 0.0 {
                            consider(t + -gap / rate, Ev::Merge(n, m), &mut best);
                        }
                    }
                }
            }
        }
        Ok(best)
    }

    /// Checks the slice invariants: positive segment lengths, nodes inside
    /// the slice, disjoint segments on each face line, consistent links.
    pub(crate) fn audit(&self) -> Result<()> {
        let tol = 1e3 * self.tol;
        let mut by_face: BTreeMap<usize, Vec<(f64, f64, usize)>> = BTreeMap::new();
        for s in 0..self.segs.len() {
            let Some(sg) = &self.segs[s] else { continue };
            let l = self.face_line(sg.face);
            for (i, &n) in sg.ends.iter().enumerate() {
                let Some(nd) = &self.nodes[n] else { return degenerate(format!("segment {s} ends at dead node {n}")) };
                if !nd.has_face(sg.face) || nd.segs[nd.slot(sg.face)] != s {
                    return degenerate(format!("segment {s} end {i} is not linked back"));
                }
            }
            let (a, b) = (lam(l, self.pos(sg.ends[0])), lam(l, self.pos(sg.ends[1])));
            if b - a < -tol {
                return degenerate(format!("segment {s} has negative length {}", b - a));
            }
            by_face.entry(sg.face).or_default().push((a, b, s));
        }
        for (f, mut v) in by_face {
            v.sort_by(|x, y| x.0.total_cmp(&y.0));
            for w in v.windows(2) {
                if w[1].0 < w[0].1 - tol {
                    return degenerate(format!("segments {} and {} of face {f} overlap", w[0].2, w[1].2));
                }
            }
        }
        for n in 0..self.nodes.len() {
            let Some(nd) = &self.nodes[n] else { continue };
            let p = self.pos(n);
            for &k in &self.ring {
                let dd = self.facet_lines[k].expect("facet line").distance(p, self.t);
                if dd > tol {
                    return degenerate(format!("node {n} ({:?}) is outside facet {k} by {dd}", nd.kind));
                }
            }
            if let NodeKind::Bound { facet, .. } = nd.kind {
                if !self.ring.contains(&facet) {
                    return degenerate(format!("node {n} sits on facet {facet} outside the slice"));
                }
            }
            let (_, cnt) = match nd.kind {
                NodeKind::Inner(f) => (f, 2),
                NodeKind::Bound { face, .. } => ([face, NONE], 1),
            };
            for i in 0..cnt {
                let s = nd.segs[i];
                if s == NONE || self.segs[s].as_ref().is_none_or(|sg| !sg.ends.contains(&n)) {
                    return degenerate(format!("node {n} slot {i} is not linked"));
                }
            }
        }
        Ok(())
    }

    // ---- time advance ------------------------------------------------------

    fn advance(&mut self, t1: f64) {
        let dt = t1 - self.t;
        if dt > 0.0 {
            for s in 0..self.segs.len() {
                let Some(sg) = &self.segs[s] else { continue };
                let l = self.faces[sg.face].line;
                let (p0, p1) = (self.pos(sg.ends[0]), self.pos(sg.ends[1]));
                let (v0, v1) = (self.vel(sg.ends[0]), self.vel(sg.ends[1]));
                let len0 = lam(&l, p1) - lam(&l, p0);
                let len1 = len0 + (lam(&l, v1) - lam(&l, v0)) * dt;
                let f = sg.face;
                self.faces[f].swept += 0.5 * (len0 + len1) * dt * self.faces[f].area_factor;
            }
        }
        self.t = t1;
    }

    fn point3(&self, y: Vec2) -> Vec3 {
        Vec3::from_time_space(self.t, y)
    }

    // ---- kinematic handlers -------------------------------------------------

    fn process(&mut self, ev: Ev) -> Result<()> {
        self.stats.kinematic_events += 1;
        match ev {
            Ev::Extinct(s) => self.on_extinct(s),
            Ev::Gap(a, b) => self.on_gap(a, b),
            Ev::Hit(n, s) => self.on_hit(n, s),
            Ev::Exit(n, k) => self.on_exit(n, k),
            Ev::Merge(a, b) => self.on_merge(a, b),
            Ev::Corner(n, k) => self.on_corner(n, k),
            Ev::Domain => {
                self.refresh_ring();
                for n in 0..self.nodes.len() {
                    if let Some(Node { kind: NodeKind::Bound { facet, .. }, .. }) = self.nodes[n] {
                        if !self.ring.contains(&facet) {
                            return degenerate("boundary crossing on a vanishing facet");
                        }
                    }
                }
                Ok(())
            }
            Ev::End => self.on_end(),
        }
    }

    fn on_extinct(&mut self, s: usize) -> Result<()> {
        let sg = self.seg(s).clone();
        let f = sg.face;
        let [p, q] = sg.ends;
        let x = self.point3((self.pos(p) + self.pos(q)) * 0.5);
        match (self.node(p).kind, self.node(q).kind) {
            (NodeKind::Inner(_), NodeKind::Inner(_)) => {
                let a = self.node(p).other_face(f);
                let b = self.node(q).other_face(f);
                if a == b {
                    return degenerate("segment bounded twice by the same face");
                }
                let sa = self.seg_on(p, a);
                let sb = self.seg_on(q, b);
                let ra = self.other_end(sa, p);
                let rb = self.other_end(sb, q);
                if ra == rb {
                    // the whole triangle collapses
                    let v = self.out.vertex(x, VertexKind::Internal);
                    for n in [p, q, ra] {
                        self.emit(n, v)?;
                    }
                    for z in [s, sa, sb] {
                        self.kill_seg(z);
                    }
                    for n in [p, q, ra] {
                        self.kill_node(n);
                    }
                    return Ok(());
                }
                if let Some(&r) = self.pairs.get(&pair(a, b)) {
                    let (a_mat, b_mat) = (ra == r, rb == r);
                    let (keep_face, keep_seg, keep_node) = match (a_mat, b_mat) {
                        (true, false) => (b, sb, q),
                        (false, true) => (a, sa, p),
                        _ => return degenerate("collapse with gaps on both sides"),
                    };
                    let v = self.out.vertex(x, VertexKind::Internal);
                    for n in [p, q, r] {
                        self.emit(n, v)?;
                    }
                    let rseg = self.seg_on(r, keep_face);
                    let far1 = self.other_end(keep_seg, keep_node);
                    let far2 = self.other_end(rseg, r);
                    let dead = if a_mat { sa } else { sb };
                    for z in [s, dead, keep_seg, rseg] {
                        self.kill_seg(z);
                    }
                    for n in [p, q, r] {
                        self.kill_node(n);
                    }
                    let ends = self.ordered(keep_face, far1, far2)?;
                    self.new_seg(keep_face, ends);
                    return Ok(());
                }
                let v = self.out.vertex(x, VertexKind::Internal);
                self.emit(p, v)?;
                self.emit(q, v)?;
                self.kill_seg(s);
                self.kill_node(p);
                self.kill_node(q);
                let n = self.new_node(NodeKind::Inner([a, b]), v)?;
                self.reattach(sa, p, n);
                self.reattach(sb, q, n);
                Ok(())
            }
            (NodeKind::Inner(_), NodeKind::Bound { facet, .. }) => self.extinct_mixed(s, p, q, facet, x),
            (NodeKind::Bound { facet, .. }, NodeKind::Inner(_)) => self.extinct_mixed(s, q, p, facet, x),
            (NodeKind::Bound { .. }, NodeKind::Bound { .. }) => {
                let v = self.out.vertex(x, VertexKind::Bend);
                self.emit(p, v)?;
                self.emit(q, v)?;
                self.kill_seg(s);
                self.kill_node(p);
                self.kill_node(q);
                Ok(())
            }
        }
    }

    /// Extinction of a segment from inner node `p` to bound node `q` on facet `k`.
    fn extinct_mixed(&mut self, s: usize, p: usize, q: usize, k: usize, x: Vec3) -> Result<()> {
        let f = self.seg(s).face;
        let a = self.node(p).other_face(f);
        let sa = self.seg_on(p, a);
        let ra = self.other_end(sa, p);
        if self.bound_facet(ra) == Some(k) {
            // a cap cut off by the facet
            let v = self.out.vertex(x, VertexKind::Boundary);
            for n in [p, q, ra] {
                self.emit(n, v)?;
            }
            self.kill_seg(s);
            self.kill_seg(sa);
            for n in [p, q, ra] {
                self.kill_node(n);
            }
            return Ok(());
        }
        let v = self.out.vertex(x, VertexKind::Boundary);
        self.emit(p, v)?;
        self.emit(q, v)?;
        self.kill_seg(s);
        self.kill_node(p);
        self.kill_node(q);
        let nb = self.new_node(NodeKind::Bound { face: a, facet: k }, v)?;
        self.reattach(sa, p, nb);
        Ok(())
    }

    fn on_gap(&mut self, s1: usize, s2: usize) -> Result<()> {
        let f = self.seg(s1).face;
        let (v1, v2) = (self.seg(s1).ends[1], self.seg(s2).ends[0]);
        let (e0, e1) = (self.seg(s1).ends[0], self.seg(s2).ends[1]);
        let b = self.node(v1).other_face(f);
        let c = self.node(v2).other_face(f);
        if b == c {
            return degenerate("gap closed by the same face");
        }
        let sb = self.seg_on(v1, b);
        let sc = self.seg_on(v2, c);
        let x = self.point3((self.pos(v1) + self.pos(v2)) * 0.5);
        if let Some(&r) = self.pairs.get(&pair(b, c)) {
            if self.other_end(sb, v1) != r || self.other_end(sc, v2) != r {
                return degenerate("gap closes against an existing crossing");
            }
            let v = self.out.vertex(x, VertexKind::Internal);
            for n in [v1, v2, r] {
                self.emit(n, v)?;
            }
            for z in [s1, s2, sb, sc] {
                self.kill_seg(z);
            }
            for n in [v1, v2, r] {
                self.kill_node(n);
            }
            let ends = self.ordered(f, e0, e1)?;
            self.new_seg(f, ends);
            return Ok(());
        }
        let v = self.out.vertex(x, VertexKind::Internal);
        self.emit(v1, v)?;
        self.emit(v2, v)?;
        self.kill_seg(s1);
        self.kill_seg(s2);
        self.kill_node(v1);
        self.kill_node(v2);
        let n = self.new_node(NodeKind::Inner([b, c]), v)?;
        self.reattach(sb, v1, n);
        self.reattach(sc, v2, n);
        let ends = self.ordered(f, e0, e1)?;
        self.new_seg(f, ends);
        Ok(())
    }

    fn on_hit(&mut self, n: usize, g: usize) -> Result<()> {
        let NodeKind::Inner([a, b]) = self.node(n).kind else { unreachable!() };
        let fg = self.seg(g).face;
        if self.pairs.contains_key(&pair(a, fg)) || self.pairs.contains_key(&pair(b, fg)) {
            return degenerate("crossing hits a face it already crosses");
        }
        let [g0, g1] = self.seg(g).ends;
        let (sa, sb) = (self.seg_on(n, a), self.seg_on(n, b));
        let x = self.point3(self.pos(n));
        let v = self.out.vertex(x, VertexKind::Internal);
        self.emit(n, v)?;
        self.kill_node(n);
        self.kill_seg(g);
        let xa = self.new_node(NodeKind::Inner([a, fg]), v)?;
        let xb = self.new_node(NodeKind::Inner([b, fg]), v)?;
        self.reattach(sa, n, xa);
        self.reattach(sb, n, xb);
        let [lo, hi] = self.ordered(fg, xa, xb)?;
        let e = self.ordered(fg, g0, lo)?;
        self.new_seg(fg, e);
        let e = self.ordered(fg, hi, g1)?;
        self.new_seg(fg, e);
        Ok(())
    }

    fn on_exit(&mut self, n: usize, k: usize) -> Result<()> {
        let NodeKind::Inner([a, b]) = self.node(n).kind else { unreachable!() };
        let (sa, sb) = (self.seg_on(n, a), self.seg_on(n, b));
        let x = self.point3(self.pos(n));
        let v = self.out.vertex(x, VertexKind::Boundary);
        self.emit(n, v)?;
        self.kill_node(n);
        let ba = self.new_node(NodeKind::Bound { face: a, facet: k }, v)?;
        let bb = self.new_node(NodeKind::Bound { face: b, facet: k }, v)?;
        self.reattach(sa, n, ba);
        self.reattach(sb, n, bb);
        Ok(())
    }

    fn on_merge(&mut self, p: usize, q: usize) -> Result<()> {
        let NodeKind::Bound { face: f, .. } = self.node(p).kind else { unreachable!() };
        let NodeKind::Bound { face: g, .. } = self.node(q).kind else { unreachable!() };
        if self.pairs.contains_key(&pair(f, g)) {
            return degenerate("boundary crossing of faces that already cross");
        }
        let (sf, sg) = (self.node(p).segs[0], self.node(q).segs[0]);
        let x = self.point3((self.pos(p) + self.pos(q)) * 0.5);
        let v = self.out.vertex(x, VertexKind::Boundary);
        self.emit(p, v)?;
        self.emit(q, v)?;
        self.kill_node(p);
        self.kill_node(q);
        let n = self.new_node(NodeKind::Inner([f, g]), v)?;
        self.reattach(sf, p, n);
        self.reattach(sg, q, n);
        Ok(())
    }

    fn on_corner(&mut self, n: usize, k2: usize) -> Result<()> {
        let NodeKind::Bound { face, facet } = self.node(n).kind else { unreachable!() };
        let s = self.node(n).segs[0];
        let l1 = self.facet_lines[facet].expect("facet line");
        let l2 = self.facet_lines[k2].expect("facet line");
        let x = self.point3(l1.meet(&l2, self.t)?);
        let v = self.out.vertex(x, VertexKind::Bend);
        self.emit(n, v)?;
        self.kill_node(n);
        let nb = self.new_node(NodeKind::Bound { face, facet: k2 }, v)?;
        self.reattach(s, n, nb);
        Ok(())
    }

    fn on_end(&mut self) -> Result<()> {
        let top = (0..self.domain.facets().len()).find(|&k| {
            let h = self.domain.facets()[k].halfspace;
            self.domain.is_temporal_facet(k) && h.normal.x > 0.0
        });
        let live: Vec<usize> = (0..self.nodes.len()).filter(|&n| self.nodes[n].is_some()).collect();
        let mut end = BTreeMap::new();
        for &n in &live {
            let x = self.point3(self.pos(n));
            let kind = match self.node(n).kind {
                NodeKind::Inner(_) => VertexKind::Boundary,
                NodeKind::Bound { .. } => VertexKind::Bend,
            };
            let v = if top.is_some() { self.out.vertex(x, kind) } else { self.out.vertex_dedup(x, kind, self.tol) };
            end.insert(n, v);
            self.emit(n, v)?;
        }
        for s in 0..self.segs.len() {
            let Some(sg) = self.segs[s].clone() else { continue };
            match top {
                Some(k) => self.out.boundary(end[&sg.ends[0]], end[&sg.ends[1]], sg.face, k),
                None => {
                    let l = self.face_line(sg.face);
                    if (lam(l, self.pos(sg.ends[1])) - lam(l, self.pos(sg.ends[0]))).abs() > 1e3 * self.tol {
                        return degenerate("sections remain where the domain ends in a point or an edge");
                    }
                }
            }
        }
        for n in live {
            self.kill_node(n);
        }
        for s in 0..self.segs.len() {
            self.segs[s] = None;
        }
        Ok(())
    }

    // ---- births ------------------------------------------------------------

    fn enqueue(&mut self, t: f64, birth: Birth) {
        self.seq += 1;
        self.queue.push(Reverse(Queued { t, seq: self.seq, birth }));
    }

    /// Angle-birth candidates on the whole section of the face with the domain.
    fn ia_clock(&mut self, f: usize) -> Result<()> {
        let rate = I3 * self.params.ia_rate_scale;
        if rate <= 0.0 {
            return Ok(());
        }
        let Some(poly) = intersect_plane_domain(&self.faces[f].plane, &self.domain) else { return Ok(()) };
        let o = poly.outer.clone();
        let mut cum = Vec::with_capacity(o.len());
        let mut total = 0.0;
        for i in 1..o.len() - 1 {
            total += 0.5 * (o[i] - o[0]).cross(o[i + 1] - o[0]).norm();
            cum.push(total);
        }
        let mut rng = self.faces[f].key.child(&[tag::IA_CLOCK]).stream();
        let n = rng.poisson(rate * total);
        let t0 = self.faces[f].origin.x;
        for j in 0..n {
            let u = rng.uniform() * total;
            let i = cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1);
            let (r1, r2) = (rng.uniform().sqrt(), rng.uniform());
            let x = o[0] * (1.0 - r1) + o[i + 1] * (r1 * (1.0 - r2)) + o[i + 2] * (r1 * r2);
            if x.x > t0 {
                self.enqueue(x.x, Birth::Ia { face: f, index: j as u32, point: x });
            }
        }
        Ok(())
    }

    /// Edge-birth candidates along the whole crossing line of two faces.
    fn ie_clock(&mut self, a: usize, b: usize) -> Result<()> {
        let rate = PI * self.params.ie_rate_scale;
        if rate <= 0.0 {
            return Ok(());
        }
        let (ka, kb) = (self.faces[a].key, self.faces[b].key);
        let (k1, k2) = if ka <= kb { (ka, kb) } else { (kb, ka) };
        let key = k1.child(&[tag::IE_PAIR, k2.0 as u64, (k2.0 >> 64) as u64]);
        let line = line_of(&self.faces[a].plane, &self.faces[b].plane)?;
        let Some((s0, s1)) = self.domain.clip_line(line.point, line.direction) else { return Ok(()) };
        let mut rng = key.child(&[tag::IE_CLOCK]).stream();
        let n = rng.poisson(rate * (s1 - s0));
        for j in 0..n {
            let x = line.at(rng.uniform_in(s0, s1));
            if x.x > self.t {
                self.enqueue(x.x, Birth::Ie { pair: [a, b], key, index: j as u32, point: x });
            }
        }
        Ok(())
    }

    fn birth_it(&mut self, pk: &BirthPackage) -> Result<()> {
        let y = pk.site.spatial();
        if !self.inside_slice(y) {
            return invalid("package site is not inside the domain");
        }
        for s in 0..self.segs.len() {
            let Some(sg) = &self.segs[s] else { continue };
            let l = self.face_line(sg.face);
            let (p0, p1) = (self.pos(sg.ends[0]), self.pos(sg.ends[1]));
            if l.distance(y, self.t).abs() <= self.tol && lam(l, y) >= lam(l, p0) - self.tol && lam(l, y) <= lam(l, p1) + self.tol {
                return degenerate("package site lies on an existing face");
            }
        }
        let planes = pk.planes()?;
        let mut f = [0usize; 3];
        for (i, pl) in planes.iter().enumerate() {
            let key = pk.key.child(&[tag::IT_FACE, i as u64]);
            f[i] = self.push_face(*pl, key, Creator::It { package: pk.key, slot: i as u8 }, pk.site)?;
        }
        let lines = [self.faces[f[0]].line, self.faces[f[1]].line, self.faces[f[2]].line];
        let normals = newborn_triangle_normals([&lines[0], &lines[1], &lines[2]])?;
        if !stable_it([&lines[0], &lines[1], &lines[2]], normals)? {
            return degenerate("newborn triangle is not expanding");
        }
        let v = self.out.vertex(pk.site, VertexKind::Internal);
        let n01 = self.new_node(NodeKind::Inner([f[0], f[1]]), v)?;
        let n12 = self.new_node(NodeKind::Inner([f[1], f[2]]), v)?;
        let n20 = self.new_node(NodeKind::Inner([f[2], f[0]]), v)?;
        for (face, p, q) in [(f[0], n20, n01), (f[1], n01, n12), (f[2], n12, n20)] {
            let e = self.ordered(face, p, q)?;
            self.new_seg(face, e);
        }
        self.stats.it_births += 1;
        Ok(())
    }

    fn birth_ia(&mut self, f: usize, index: u32, x: Vec3) -> Result<()> {
        let l = self.faces[f].line;
        let y = x.spatial();
        let mx = lam(&l, y);
        let mut host = None;
        for s in 0..self.segs.len() {
            let Some(sg) = &self.segs[s] else { continue };
            if sg.face != f {
                continue;
            }
            let (a, b) = (lam(&l, self.pos(sg.ends[0])), lam(&l, self.pos(sg.ends[1])));
            if mx > a && mx < b {
                if mx - a <= self.tol || b - mx <= self.tol {
                    return degenerate("angle birth at a segment end");
                }
                host = Some(s);
            }
        }
        let Some(s) = host else { return Ok(()) };
        let key = self.faces[f].key;
        let frame = sample_vertex_frame_given(self.faces[f].plane.u, &mut key.child(&[tag::IA_FRAME, index as u64]).stream())?;
        let c2 = self.push_face(
            Plane::through(x, frame.n2)?,
            key.child(&[tag::IA_FACE, index as u64, 0]),
            Creator::Ia { parent: f, index, slot: 0 },
            x,
        )?;
        let c3 = self.push_face(
            Plane::through(x, frame.n3)?,
            key.child(&[tag::IA_FACE, index as u64, 1]),
            Creator::Ia { parent: f, index, slot: 1 },
            x,
        )?;
        let [e0, e1] = self.seg(s).ends;
        let v = self.out.vertex(x, VertexKind::Internal);
        let x2 = self.new_node(NodeKind::Inner([f, c2]), v)?;
        let x23 = self.new_node(NodeKind::Inner([c2, c3]), v)?;
        let x3 = self.new_node(NodeKind::Inner([c3, f]), v)?;
        let [lo, hi] = self.ordered(f, x2, x3)?;
        // the newborn wedge must open away from both host pieces
        let (vl, vh) = (lam(&l, self.vel(lo)), lam(&l, self.vel(hi)));
        let l2 = self.faces[c2].line;
        let l3 = self.faces[c3].line;
        let tn = newborn_triangle_normals([&l, &l2, &l3])?;
        if !stable_it([&l, &l2, &l3], tn)? || !(vh > vl) {
            return degenerate("angle birth is not expanding");
        }
        self.kill_seg(s);
        self.new_seg(f, [e0, lo]);
        self.new_seg(f, [hi, e1]);
        let e = self.ordered(c2, x2, x23)?;
        self.new_seg(c2, e);
        let e = self.ordered(c3, x23, x3)?;
        self.new_seg(c3, e);
        self.stats.ia_births += 1;
        Ok(())
    }

    fn birth_ie(&mut self, ab: [usize; 2], key: StreamKey, index: u32, x: Vec3) -> Result<()> {
        let [a, b] = ab;
        let Some(&n) = self.pairs.get(&pair(a, b)) else { return Ok(()) };
        self.stats.ie_candidates += 1;
        let (sa, sb) = (self.seg_on(n, a), self.seg_on(n, b));
        let ray = |s: usize| {
            let dir = self.face_line(self.seg(s).face).direction();
            if self.seg(s).ends[0] == n {
                dir
            } else {
                -dir
            }
        };
        let (ua, ub) = (ray(sa), ray(sb));
        let w = self.vel(n);
        let d = Vec3::new(1.0, w.x, w.y).normalized();
        let angle = wedge_angle_slice(d, ua, ub)?;
        let mut rng: RngStream = key.child(&[tag::IE_DRAW, index as u64]).stream();
        if rng.uniform() >= (2.0 * PI - angle) / (2.0 * PI) {
            return Ok(());
        }
        let (la, lb) = (self.faces[a].line, self.faces[b].line);
        let p = self.point3(self.pos(n));
        let mut plane = None;
        for _ in 0..MAX_IE_DRAWS {
            let nrm = sample_normal_hitting_line(d, &mut rng);
            let Ok(pl) = Plane::through(p, nrm) else { continue };
            let Ok(lc) = SliceLine::from_plane(&pl) else { continue };
            if let Ok(o) = stable_ie(&la, &lb, ua, ub, &lc) {
                if o.is_stable() {
                    plane = Some(pl);
                    break;
                }
            }
        }
        let Some(plane) = plane else { return degenerate("no stable edge-birth direction found") };
        let (p0, p1) = if a < b { (a, b) } else { (b, a) };
        let c = self.push_face(
            plane,
            key.child(&[tag::IE_FACE, index as u64]),
            Creator::Ie { parents: [p0, p1], index },
            p,
        )?;
        let v = self.out.vertex(p, VertexKind::Internal);
        self.emit(n, v)?;
        self.kill_node(n);
        let ya = self.new_node(NodeKind::Inner([a, c]), v)?;
        let yb = self.new_node(NodeKind::Inner([b, c]), v)?;
        self.reattach(sa, n, ya);
        self.reattach(sb, n, yb);
        let e = self.ordered(c, ya, yb)?;
        self.new_seg(c, e);
        let _ = x;
        self.stats.ie_births += 1;
        Ok(())
    }

    fn birth_entry(&mut self, idx: usize, e: &EntryEvent) -> Result<()> {
        let y = e.location.spatial();
        let on: Vec<usize> = self
            .ring
            .iter()
            .copied()
            .filter(|&k| self.facet_lines[k].expect("facet line").distance(y, self.t).abs() <= 1e3 * self.tol)
            .collect();
        let key = e.key();
        let mut faces = Vec::new();
        for (i, pl) in e.planes.iter().enumerate() {
            if pl.signed_distance(e.location).abs() > 1e3 * self.tol {
                return invalid("entry plane does not pass through the entry location");
            }
            faces.push(self.push_face(
                *pl,
                key.child(&[tag::ENTRY_FACE, i as u64]),
                Creator::Entry { entry: idx, slot: i as u8 },
                e.location,
            )?);
        }
        match e.kind {
            EntryKind::Ia => {
                let [k] = on[..] else {
                    return invalid("angle entry must lie inside exactly one lateral domain facet");
                };
                let lk = self.facet_lines[k].expect("facet line");
                let (c2, c3) = (faces[0], faces[1]);
                let (l2, l3) = (self.faces[c2].line, self.faces[c3].line);
                let tn = newborn_triangle_normals([&lk, &l2, &l3])?;
                if !stable_it([&lk, &l2, &l3], tn)? || tn[0].dot(lk.normal) <= 0.0 {
                    return invalid("angle entry is not a stable birth into the domain");
                }
                let v = self.out.vertex(e.location, VertexKind::Boundary);
                let b2 = self.new_node(NodeKind::Bound { face: c2, facet: k }, v)?;
                let m = self.new_node(NodeKind::Inner([c2, c3]), v)?;
                let b3 = self.new_node(NodeKind::Bound { face: c3, facet: k }, v)?;
                let s = self.ordered(c2, b2, m)?;
                self.new_seg(c2, s);
                let s = self.ordered(c3, m, b3)?;
                self.new_seg(c3, s);
            }
            EntryKind::Ie => {
                let [k1, k2] = on[..] else {
                    return invalid("edge entry must lie on exactly one lateral domain edge");
                };
                let nb = self.ring_neighbours(k1).unwrap_or([NONE; 2]);
                if !nb.contains(&k2) {
                    return invalid("edge entry facets are not adjacent in the slice");
                }
                let (l1, l2) = (self.facet_lines[k1].expect("facet line"), self.facet_lines[k2].expect("facet line"));
                let into = |l: &SliceLine, o: &SliceLine| {
                    let d = l.direction();
                    if d.dot(o.normal) < 0.0 {
                        d
                    } else {
                        -d
                    }
                };
                let (u1, u2) = (into(&l1, &l2), into(&l2, &l1));
                let c = faces[0];
                let lc = self.faces[c].line;
                if stable_ie(&l1, &l2, u1, u2, &lc)? != IeOutcome::CornerCut {
                    return invalid("edge entry does not cut the domain corner");
                }
                let v = self.out.vertex(e.location, VertexKind::Bend);
                let b1 = self.new_node(NodeKind::Bound { face: c, facet: k1 }, v)?;
                let b2 = self.new_node(NodeKind::Bound { face: c, facet: k2 }, v)?;
                let s = self.ordered(c, b1, b2)?;
                self.new_seg(c, s);
            }
        }
        self.stats.entry_births += 1;
        Ok(())
    }
}

/// The earliest kinematic event of a slice state, or the end of the sweep
/// when nothing happens before the slice leaves the domain.
pub fn next_kinematic_event(state: &EvolutionState) -> Result<KinematicEvent> {
    let (time, ev) = state.next_event()?;
    Ok(KinematicEvent { time, kind: ev.kind() })
}

pub(crate) fn run(
    d: &Domain,
    entries: &[EntryEvent],
    packages: &[BirthPackage],
    params: EvolutionParams,
) -> Result<(PolyConfig, SweepStats)> {
    let (t0, t1) = d.t_range();
    let mut st = EvolutionState::new(d, t0)?;
    st.clocks = true;
    st.params = params;
    for (i, e) in entries.iter().enumerate() {
        if !(e.time > t0 && e.time < t1) {
            return invalid("entry time must lie strictly inside the time range of the domain");
        }
        st.enqueue(e.time, Birth::Entry(i));
    }
    for (i, p) in packages.iter().enumerate() {
        st.enqueue(p.site.x, Birth::It(i));
    }
    let mut last: Option<f64> = None;
    loop {
        let (tk, ev) = st.next_event()?;
        let birth_first = st.queue.peek().is_some_and(|q| q.0.t < tk);
        let t_next = if birth_first { st.queue.peek().expect("queued birth").0.t } else { tk };
        let tie_sensitive = birth_first || !matches!(ev, Ev::End | Ev::Domain);
        if let Some(l) = last {
            if tie_sensitive && t_next - l < st.tie {
                return degenerate(format!("simultaneous events near t = {t_next}"));
            }
        }
        if birth_first {
            let q = st.queue.pop().expect("queued birth").0;
            st.advance(q.t);
            let before = st.stats.births();
            match q.birth {
                Birth::It(i) => st.birth_it(&packages[i])?,
                Birth::Ia { face, index, point } => st.birth_ia(face, index, point)?,
                Birth::Ie { pair, key, index, point } => st.birth_ie(pair, key, index, point)?,
                Birth::Entry(i) => st.birth_entry(i, &entries[i])?,
            }
            // a candidate that did not materialize cannot tie with anything
            if st.stats.births() > before {
                last = Some(q.t);
            }
            if cfg!(debug_assertions) {
                st.audit().map_err(|e| crate::Error::Degeneracy(format!("after birth at {}: {e}", q.t)))?;
            }
            continue;
        }
        st.advance(tk);
        st.process(ev)?;
        if cfg!(debug_assertions) {
            st.audit().map_err(|e| crate::Error::Degeneracy(format!("after {ev:?} at {tk}: {e}")))?;
        }
        if ev == Ev::End {
            break;
        }
        last = tie_sensitive.then_some(tk).or(last);
    }
    st.stats.swept_areas = st.faces.iter().map(|f| f.swept).collect();
    let stats = std::mem::take(&mut st.stats);
    let cfg = super::assemble::assemble(&st)?;
    Ok((cfg, stats))
}
