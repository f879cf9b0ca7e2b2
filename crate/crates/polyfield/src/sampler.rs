//! Birth-site jump chains over package sets.
//!
//! The plain chain (BS) adds a package at total rate (pi^4/6) Vol(D) with a
//! uniform site and removes each existing package at rate 1. Its modification
//! BS[H] accepts a proposed move from g to h with probability
//! min(1, exp(H(g) - H(h))). Both chains draw exactly the same random words
//! per jump, so BS[0] reproduces BS bit for bit.

use crate::error::{invalid, Error, Result};
use crate::evolution::{resolve_with, uniform_point, BirthPackage, EntryEvent, EvolutionParams};
use crate::fieldmodel::{energy, stats, PolyConfig};
use crate::geometry::Domain;
use crate::stochgeom::{RngStream, StreamKey, I4};
use serde::{Deserialize, Serialize};

/// Energy-like functional for the Gibbsian modification. Implementations
/// must satisfy H(g) >= -A Vol(D) - B with the constants from `bounds`.
pub trait Hamiltonian: Send + Sync {
    fn name(&self) -> String;
    /// The constants (A, B).
    fn bounds(&self) -> (f64, f64);
    fn eval(&self, cfg: &PolyConfig, d: &Domain) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroHamiltonian;

impl Hamiltonian for ZeroHamiltonian {
    fn name(&self) -> String {
        "zero".into()
    }
    fn bounds(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
    fn eval(&self, _: &PolyConfig, _: &Domain) -> f64 {
        0.0
    }
}

/// beta times the total face area, beta >= 0.
#[derive(Debug, Clone, Copy)]
pub struct AreaHamiltonian {
    pub beta: f64,
}

impl Hamiltonian for AreaHamiltonian {
    fn name(&self) -> String {
        format!("area:{}", self.beta)
    }
    fn bounds(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
    fn eval(&self, cfg: &PolyConfig, _: &Domain) -> f64 {
        self.beta * cfg.total_area()
    }
}

/// -min(total area, A Vol(D) + B): rewards surface until the lower bound is
/// reached exactly.
#[derive(Debug, Clone, Copy)]
pub struct VolumeClampHamiltonian {
    pub a: f64,
    pub b: f64,
}

impl Hamiltonian for VolumeClampHamiltonian {
    fn name(&self) -> String {
        format!("volume-clamp:{},{}", self.a, self.b)
    }
    fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }
    fn eval(&self, cfg: &PolyConfig, d: &Domain) -> f64 {
        -cfg.total_area().min(self.a * d.volume() + self.b)
    }
}

/// Built-in Hamiltonians by name: `zero`, `area:BETA`, `volume-clamp:A,B`.
pub fn hamiltonian_from_spec(spec: &str) -> Result<Box<dyn Hamiltonian>> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums = || -> Result<Vec<f64>> {
        args.split(',')
            .map(|x| x.trim().parse::<f64>().or_else(|_| invalid(format!("bad hamiltonian parameter {x:?} in {spec:?}"))))
            .collect()
    };
    match name {
        "zero" if args.is_empty() => Ok(Box::new(ZeroHamiltonian)),
        "area" => match nums()?[..] {
            [beta] if beta >= 0.0 && beta.is_finite() => Ok(Box::new(AreaHamiltonian { beta })),
            _ => invalid(format!("area hamiltonian takes one nonnegative parameter, got {spec:?}")),
        },
        "volume-clamp" => match nums()?[..] {
            [a, b] if a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite() => {
                Ok(Box::new(VolumeClampHamiltonian { a, b }))
            }
            _ => invalid(format!("volume-clamp hamiltonian takes two nonnegative parameters, got {spec:?}")),
        },
        _ => invalid(format!("unknown hamiltonian {spec:?}")),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    /// Simulation time.
    pub s: f64,
    /// Packages in processing order.
    pub packages: Vec<BirthPackage>,
    pub entries: Vec<EntryEvent>,
    pub cfg: PolyConfig,
    /// Hamiltonian of `cfg` (0 for the plain chain).
    pub h: f64,
    pub jumps: u64,
}

impl ChainState {
    /// The empty package set.
    pub fn new(d: &Domain, entries: &[EntryEvent], params: EvolutionParams, h: Option<&dyn Hamiltonian>) -> Result<ChainState> {
        let (cfg, _) = resolve_with(d, entries, &[], params)?;
        let hv = eval_h(h, &cfg, d)?;
        Ok(ChainState { s: 0.0, packages: Vec::new(), entries: entries.to_vec(), cfg, h: hv, jumps: 0 })
    }
}

fn eval_h(h: Option<&dyn Hamiltonian>, cfg: &PolyConfig, d: &Domain) -> Result<f64> {
    let Some(h) = h else { return Ok(0.0) };
    let v = h.eval(cfg, d);
    if !v.is_finite() {
        return Err(Error::Hamiltonian(format!("{} returned {v}", h.name())));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Birth,
    Death,
}

/// What happened in one jump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub kind: MoveKind,
    pub accepted: bool,
    /// Time spent in the state before the jump.
    pub holding: f64,
    pub packages_before: usize,
    pub h_before: f64,
    /// Whether the proposal could be resolved; an unresolvable proposal is
    /// rejected.
    pub proposed: bool,
    /// Hamiltonian of the proposal (equal to `h_before` when there is none).
    pub h_proposed: f64,
}

/// Options of the chain dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ChainParams {
    pub evolution: EvolutionParams,
}

/// One jump of BS.
pub fn bs_step(d: &Domain, state: &mut ChainState, rng: &mut RngStream, params: ChainParams) -> Result<Jump> {
    step(d, state, None, rng, params)
}

/// One jump of BS[H].
pub fn bs_h_step(
    d: &Domain,
    state: &mut ChainState,
    h: &dyn Hamiltonian,
    rng: &mut RngStream,
    params: ChainParams,
) -> Result<Jump> {
    step(d, state, Some(h), rng, params)
}

const MAX_SITE_DRAWS: usize = 64;

type Proposal = (Vec<BirthPackage>, PolyConfig, f64);

/// Draws the next jump without applying it.
fn propose(
    d: &Domain,
    state: &ChainState,
    h: Option<&dyn Hamiltonian>,
    rng: &mut RngStream,
    params: ChainParams,
) -> Result<(Jump, Option<Proposal>)> {
    let birth_rate = I4 * d.volume();
    let k = state.packages.len();
    let total = birth_rate + k as f64;
    let holding = rng.exponential(total);
    let is_birth = rng.uniform() * total < birth_rate;
    let mut proposal = None;
    let kind;
    if is_birth {
        kind = MoveKind::Birth;
        // a degenerate site is a null event: redraw it
        for _ in 0..MAX_SITE_DRAWS {
            let site = uniform_point(d, rng);
            let key = StreamKey(rng.next_word() as u128 | ((rng.next_word() as u128) << 64));
            let mut pk = state.packages.clone();
            let p = BirthPackage { site, key };
            let at = pk.partition_point(|q| BirthPackage::order(q, &p).is_lt());
            pk.insert(at, p);
            match resolve_with(d, &state.entries, &pk, params.evolution) {
                Ok((cfg, _)) => {
                    proposal = Some((pk, cfg));
                    break;
                }
                Err(Error::Degeneracy(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    } else {
        kind = MoveKind::Death;
        let victim = rng.below(k as u64) as usize;
        let mut pk = state.packages.clone();
        pk.remove(victim);
        // a degenerate removal is rejected
        match resolve_with(d, &state.entries, &pk, params.evolution) {
            Ok((cfg, _)) => proposal = Some((pk, cfg)),
            Err(Error::Degeneracy(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let u = rng.uniform();
    let h_before = state.h;
    let mut jump = Jump { kind, accepted: false, holding, packages_before: k, h_before, proposed: false, h_proposed: h_before };
    let mut accepted = None;
    if let Some((pk, cfg)) = proposal {
        let hn = eval_h(h, &cfg, d)?;
        jump.proposed = true;
        jump.h_proposed = hn;
        jump.accepted = h.is_none() || u < (h_before - hn).exp().min(1.0);
        if jump.accepted {
            accepted = Some((pk, cfg, hn));
        }
    }
    Ok((jump, accepted))
}

fn apply(state: &mut ChainState, jump: &Jump, next: Option<Proposal>) {
    if let Some((pk, cfg, hn)) = next {
        state.packages = pk;
        state.cfg = cfg;
        state.h = hn;
    }
    state.s += jump.holding;
    state.jumps += 1;
}

fn step(
    d: &Domain,
    state: &mut ChainState,
    h: Option<&dyn Hamiltonian>,
    rng: &mut RngStream,
    params: ChainParams,
) -> Result<Jump> {
    let (jump, next) = propose(d, state, h, rng, params)?;
    apply(state, &jump, next);
    Ok(jump)
}

/// Scalar summaries recorded at each observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationStats {
    pub package_count: usize,
    pub face_count: usize,
    pub total_area: f64,
    pub total_edge_length: f64,
    pub energy: f64,
    pub hamiltonian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub s: f64,
    pub stats: ObservationStats,
    /// Serialized configuration, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainOptions {
    pub s_max: f64,
    /// Spacing of observations in simulation time.
    pub thin: f64,
    /// Time of the first observation.
    pub burn_in: f64,
    pub seed: u64,
    pub keep_configs: bool,
    pub params: ChainParams,
}

impl ChainOptions {
    pub fn new(s_max: f64, thin: f64, seed: u64) -> ChainOptions {
        ChainOptions { s_max, thin, burn_in: 0.0, seed, keep_configs: false, params: ChainParams::default() }
    }
}

fn observe(state: &ChainState, d: &Domain, s: f64, keep: bool) -> Result<Observation> {
    let st = stats(&state.cfg);
    Ok(Observation {
        s,
        stats: ObservationStats {
            package_count: state.packages.len(),
            face_count: st.face_count,
            total_area: st.total_area,
            total_edge_length: st.total_edge_length,
            energy: energy(&state.cfg, d)?,
            hamiltonian: state.h,
        },
        config: keep.then(|| crate::fieldmodel::serial::to_json(&state.cfg)),
    })
}

/// Runs BS (or BS[H] when `h` is given) from the empty package set and
/// records the state at times burn_in, burn_in + thin, ... up to s_max.
pub fn run_chain(
    d: &Domain,
    entries: &[EntryEvent],
    h: Option<&dyn Hamiltonian>,
    opts: &ChainOptions,
) -> Result<Vec<Observation>> {
    if !(opts.s_max >= 0.0) || !opts.s_max.is_finite() {
        return invalid("s_max must be a finite nonnegative time");
    }
    if !(opts.thin > 0.0) || !(opts.burn_in >= 0.0) {
        return invalid("thinning interval must be positive and burn-in nonnegative");
    }
    let mut rng = StreamKey::from_seed(opts.seed).child(&[CHAIN_TAG]).stream();
    let mut state = ChainState::new(d, entries, opts.params.evolution, h)?;
    let mut out = Vec::new();
    let obs_time = |i: usize| opts.burn_in + i as f64 * opts.thin;
    let mut i = 0;
    while obs_time(i) <= opts.s_max {
        let (jump, next) = propose(d, &state, h, &mut rng, opts.params)?;
        // the current state holds until the jump
        while obs_time(i) <= opts.s_max && obs_time(i) < state.s + jump.holding {
            out.push(observe(&state, d, obs_time(i), opts.keep_configs)?);
            i += 1;
        }
        apply(&mut state, &jump, next);
    }
    Ok(out)
}

const CHAIN_TAG: u64 = 0xc4a1;
