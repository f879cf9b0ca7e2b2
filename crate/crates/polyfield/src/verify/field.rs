//! Checks on whole configurations: the empty-field probability, the
//! truncated partition identity, structural admissibility and the chains.

use super::{ks_critical, ks_statistic, kolmogorov_q, mean_se, replicate, rotated_cube, rotation, TestReport};
use crate::error::{invalid, Error, Result};
use crate::evolution::{resolve, simulate_field, uniform_point, BirthPackage, EntryEvent, EntryKind, EvolutionParams};
use crate::fieldmodel::serial::to_json;
use crate::fieldmodel::{energy, energy_terms, entry_events, stable_cone, stats, validate, PolyConfig};
use crate::geometry::{triple_point, Domain, Plane, Vec3};
use crate::sampler::{bs_h_step, bs_step, run_chain, AreaHamiltonian, ChainOptions, ChainParams, ChainState, MoveKind, ZeroHamiltonian};
use crate::stochgeom::{kappa, sample_plane_hitting, uniform_sphere, RngStream, StreamKey, I4};
use serde::{Deserialize, Serialize};
use std::time::Instant;

const EMPTY_TAG: u64 = 0xe0;
const PART_TAG: u64 = 0xa0;
const PART_BOUND_TAG: u64 = 0xa1;
const EQ_FRESH_TAG: u64 = 0xb0;
const EQ_CHAIN_TAG: u64 = 0xb1;
const STRUCT_TAG: u64 = 0xc0;
const ENTRY_TAG: u64 = 0xc1;
const DET_TAG: u64 = 0xc2;
const ISO_TAG: u64 = 0xc3;
const BS_TAG: u64 = 0xd0;
const DB_TAG: u64 = 0xd1;
const DB_ORACLE_TAG: u64 = 0xd2;
const PC_TAG: u64 = 0xd3;

fn random_key(rng: &mut RngStream) -> StreamKey {
    StreamKey(rng.next_word() as u128 | ((rng.next_word() as u128) << 64))
}

/// Fraction of simulated fields that are empty, against exp(-pi^4/6 Vol(D)).
pub fn check_empty_probability(d: &Domain, runs: u64, key: StreamKey) -> Result<TestReport> {
    if runs < 2 {
        return invalid("at least two runs are needed");
    }
    let t0 = Instant::now();
    let res = replicate(key, EMPTY_TAG, runs, |_, mut rng| simulate_field(d, &[], &mut rng).map(|(c, _)| c.is_empty()));
    let mut empty = 0u64;
    for r in res {
        if r? {
            empty += 1;
        }
    }
    let n = runs as f64;
    let p = empty as f64 / n;
    let reference = (-I4 * d.volume()).exp();
    Ok(TestReport::new("empty field probability", runs, p, (p * (1.0 - p) / n).sqrt(), reference)
        .provenance("no interior triangle birth: exp(-pi^4/6 Vol)")
        .detail("volume", d.volume())
        .timed(t0))
}

/// Upper bound on the strata with four or more planes, which equal
/// exp(-kappa) times the probability that the field uses four or more
/// planes: at least two interior triangle births, or one birth followed by
/// a further birth. The latter has conditional probability
/// 1 - E exp(-lambda) <= E lambda, lambda being the edge and face energy of
/// the cone at a uniform site. Returns (bound, E lambda, its standard error).
pub fn partition_truncation_bound(d: &Domain, samples: u64, key: StreamKey) -> Result<(f64, f64, f64)> {
    let c4v = I4 * d.volume();
    let lam = replicate(key, PART_BOUND_TAG, samples, |_, mut rng| loop {
        let p = BirthPackage { site: uniform_point(d, &mut rng), key: random_key(&mut rng) };
        let Ok(planes) = p.planes() else { continue };
        match stable_cone(d, planes).and_then(|c| energy_terms(&c, d)) {
            Ok(t) => return Ok(t.edges + t.faces),
            Err(Error::Degeneracy(_)) => continue,
            Err(e) => return Err(e),
        }
    });
    let lam: Vec<f64> = lam.into_iter().collect::<Result<_>>()?;
    let (m, se) = mean_se(&lam);
    let ek = (-kappa(d)).exp();
    let two = 1.0 - (-c4v).exp() * (1.0 + c4v);
    let bound = ek * two + ek * c4v * (-c4v).exp() * (m + 3.0 * se);
    Ok((bound, m, se))
}

/// Stratified estimate of E sum exp(-Phi) over configurations on the
/// Poisson planes hitting `d`, truncated to no planes (the empty
/// configuration) and three planes (the stable cone when the triple point is
/// inside), compared to exp(-kappa) with tolerance 3 s.e. plus the
/// truncation bound.
pub fn check_partition_truncated(d: &Domain, replicates: u64, key: StreamKey) -> Result<TestReport> {
    if replicates < 2 {
        return invalid("at least two replicates are needed");
    }
    let t0 = Instant::now();
    let k = kappa(d);
    let ek = (-k).exp();
    let c4v = I4 * d.volume();
    let w = replicate(key, PART_TAG, replicates, |_, mut rng| {
        let planes: [Plane; 3] = std::array::from_fn(|_| sample_plane_hitting(d, &mut rng));
        let Ok(x) = triple_point(&planes[0], &planes[1], &planes[2]) else { return Ok((0.0, true)) };
        if !d.contains(x) {
            return Ok((0.0, false));
        }
        match stable_cone(d, planes).and_then(|c| energy(&c, d)) {
            Ok(phi) => Ok(((-phi).exp(), false)),
            Err(Error::Degeneracy(_)) => Ok((0.0, true)),
            Err(e) => Err(e),
        }
    });
    let w: Vec<(f64, bool)> = w.into_iter().collect::<Result<_>>()?;
    let skipped = w.iter().filter(|x| x.1).count();
    let vals: Vec<f64> = w.iter().map(|x| x.0).collect();
    let inside = vals.iter().filter(|&&v| v > 0.0).count();
    let (m, se) = mean_se(&vals);
    let p3 = ek * k.powi(3) / 6.0;
    let empty_term = ek * (-c4v).exp();
    let cone_term = p3 * m;
    let est = empty_term + cone_term;
    let se = p3 * se;
    let (bound, lam, lam_se) = partition_truncation_bound(d, (replicates / 10).max(1000), key)?;
    Ok(TestReport::new("truncated partition identity", replicates, est, se, ek)
        .provenance("exp(-kappa)")
        .tolerance(3.0 * se + bound, "3 standard errors plus truncation bound")
        .detail("empty_stratum", empty_term)
        .detail("cone_stratum", cone_term)
        .detail("truncation_bound", bound)
        .detail("mean_cone_lambda", lam)
        .detail("mean_cone_lambda_se", lam_se)
        .detail("triple_point_inside_fraction", inside as f64 / replicates as f64)
        .detail("degenerate_skipped", skipped as f64)
        .timed(t0))
}

/// Sizes of the equivalence check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceOptions {
    /// Number of fresh dynamic draws.
    pub fresh: u64,
    /// Number of independent chains.
    pub chains: u64,
    /// Observations per chain.
    pub per_chain: u64,
    pub burn_in: f64,
    pub thin: f64,
    /// IE rate multiplier on the chain side; 1 for the real check.
    pub ie_rate_scale: f64,
    /// Family-wise significance across the three marginals.
    pub alpha: f64,
}

impl Default for EquivalenceOptions {
    fn default() -> Self {
        EquivalenceOptions { fresh: 10_000, chains: 40, per_chain: 250, burn_in: 50.0, thin: 5.0, ie_rate_scale: 1.0, alpha: 0.01 }
    }
}

/// (face count, total area, total edge length) of a configuration.
fn summaries(c: &PolyConfig) -> [f64; 3] {
    let s = stats(c);
    [s.face_count as f64, s.total_area, s.total_edge_length]
}

const MARGINALS: [&str; 3] = ["face count", "total area", "total edge length"];

/// Two-sample tests on the three summaries, Bonferroni-corrected.
fn ks_reports(prefix: &str, a: &[[f64; 3]], b: &[[f64; 3]], alpha: f64, t0: Instant) -> Vec<TestReport> {
    let crit = ks_critical(alpha / 3.0, a.len(), b.len());
    let ne = (a.len() * b.len()) as f64 / (a.len() + b.len()) as f64;
    (0..3)
        .map(|m| {
            let xa: Vec<f64> = a.iter().map(|s| s[m]).collect();
            let xb: Vec<f64> = b.iter().map(|s| s[m]).collect();
            let dn = ks_statistic(&xa, &xb);
            let s = ne.sqrt();
            let (ma, _) = mean_se(&xa);
            let (mb, _) = mean_se(&xb);
            TestReport::new(format!("{prefix}: {}", MARGINALS[m]), (a.len() + b.len()) as u64, dn, 0.0, 0.0)
                .provenance("equal laws give a statistic near 0")
                .tolerance(crit, format!("KS critical value at {} (Bonferroni over 3)", alpha))
                .detail("p_value", kolmogorov_q((s + 0.12 + 0.11 / s) * dn))
                .detail("mean_first", ma)
                .detail("mean_second", mb)
                .timed(t0)
        })
        .collect()
}

/// Fresh dynamic draws against thinned stationary samples of BS chains.
pub fn check_equivalence(d: &Domain, entries: &[EntryEvent], o: &EquivalenceOptions, key: StreamKey) -> Result<Vec<TestReport>> {
    if o.fresh < 2 || o.chains == 0 || o.per_chain == 0 || !(o.thin > 0.0) || !(o.burn_in >= 0.0) {
        return invalid("equivalence check needs positive sample sizes and spacing");
    }
    let t0 = Instant::now();
    let fresh = replicate(key, EQ_FRESH_TAG, o.fresh, |_, mut rng| simulate_field(d, entries, &mut rng).map(|(c, _)| summaries(&c)));
    let fresh: Vec<[f64; 3]> = fresh.into_iter().collect::<Result<_>>()?;
    let params = ChainParams { evolution: EvolutionParams { ie_rate_scale: o.ie_rate_scale, ..EvolutionParams::default() } };
    let chains = replicate(key, EQ_CHAIN_TAG, o.chains, |_, mut rng| {
        let mut opts = ChainOptions::new(o.burn_in + o.thin * (o.per_chain - 1) as f64, o.thin, rng.next_word());
        opts.burn_in = o.burn_in;
        opts.params = params;
        run_chain(d, entries, None, &opts)
    });
    let mut chain = Vec::new();
    for c in chains {
        for ob in c? {
            chain.push([ob.stats.face_count as f64, ob.stats.total_area, ob.stats.total_edge_length]);
        }
    }
    let prefix = if o.ie_rate_scale == 1.0 {
        "equivalence".to_string()
    } else {
        format!("equivalence, chain IE rate x{}", o.ie_rate_scale)
    };
    Ok(ks_reports(&prefix, &fresh, &chain, o.alpha, t0))
}

/// Fraction of simulated fields failing validation (or the simulation).
pub fn check_admissibility(name: &str, d: &Domain, runs: u64, key: StreamKey) -> Result<TestReport> {
    if runs == 0 {
        return invalid("at least one run is needed");
    }
    let t0 = Instant::now();
    let res = replicate(key.child_bytes(name.as_bytes()), STRUCT_TAG, runs, |_, mut rng| match simulate_field(d, &[], &mut rng) {
        Ok((c, _)) => (validate(&c, d).is_ok(), false, c.faces.len()),
        Err(_) => (false, true, 0),
    });
    let failed = res.iter().filter(|r| !r.0).count() as f64;
    let errors = res.iter().filter(|r| r.1).count() as f64;
    let faces = res.iter().map(|r| r.2 as f64).sum::<f64>() / runs as f64;
    Ok(TestReport::new(format!("admissibility {name}"), runs, failed, 0.0, 0.0)
        .provenance("every simulated field is admissible")
        .tolerance(0.0, "no failures")
        .detail("simulation_errors", errors)
        .detail("mean_faces", faces)
        .timed(t0))
}

/// A random stable angle entry at `x` (on a single non-temporal facet),
/// found by rejection.
pub fn random_ia_entry(d: &Domain, x: Vec3, rng: &mut RngStream) -> Result<EntryEvent> {
    for _ in 0..10_000 {
        let planes = vec![Plane::through(x, uniform_sphere(rng))?, Plane::through(x, uniform_sphere(rng))?];
        let e = EntryEvent::new(EntryKind::Ia, x, planes)?;
        if resolve(d, std::slice::from_ref(&e), &[]).is_ok() {
            return Ok(e);
        }
    }
    invalid("no stable angle entry found at the point")
}

/// A random stable edge entry at `x` (on an edge between two non-temporal
/// facets), found by rejection.
pub fn random_ie_entry(d: &Domain, x: Vec3, rng: &mut RngStream) -> Result<EntryEvent> {
    for _ in 0..10_000 {
        let e = EntryEvent::new(EntryKind::Ie, x, vec![Plane::through(x, uniform_sphere(rng))?])?;
        if resolve(d, std::slice::from_ref(&e), &[]).is_ok() {
            return Ok(e);
        }
    }
    invalid("no stable edge entry found at the point")
}

/// A point inside non-temporal facet `k`: a random convex combination of
/// its vertices pulled towards the centroid.
fn facet_point(d: &Domain, k: usize, rng: &mut RngStream) -> Vec3 {
    let f = &d.facets()[k];
    let vs: Vec<Vec3> = f.cycle.iter().map(|&i| d.vertices()[i]).collect();
    let c = vs.iter().fold(Vec3::ZERO, |a, &v| a + v) / vs.len() as f64;
    let w: Vec<f64> = vs.iter().map(|_| rng.uniform()).collect();
    let s: f64 = w.iter().sum();
    let p = vs.iter().zip(&w).fold(Vec3::ZERO, |a, (&v, &wi)| a + v * (wi / s));
    c + (p - c) * 0.6
}

/// Entry round trip: for random stable entries E, the entries recovered
/// from a field simulated with E are E again. The estimate is the number of
/// mismatches.
pub fn check_entry_roundtrip(count: u64, key: StreamKey) -> Result<TestReport> {
    let t0 = Instant::now();
    let d = Domain::cube(0.6)?;
    let lateral: Vec<usize> = (0..d.facets().len()).filter(|&k| !d.is_temporal_facet(k)).collect();
    let edges: Vec<usize> = (0..d.edges().len())
        .filter(|&e| d.edges()[e].facets.iter().all(|&k| !d.is_temporal_facet(k)))
        .collect();
    let res = replicate(key, ENTRY_TAG, count, |i, mut rng| -> Result<bool> {
        let e = if i % 2 == 0 {
            let k = lateral[rng.below(lateral.len() as u64) as usize];
            random_ia_entry(&d, facet_point(&d, k, &mut rng), &mut rng)?
        } else {
            let de = &d.edges()[edges[rng.below(edges.len() as u64) as usize]];
            let s = rng.uniform_in(0.2, 0.8);
            let (a, b) = (d.vertices()[de.ends[0]], d.vertices()[de.ends[1]]);
            random_ie_entry(&d, a + (b - a) * s, &mut rng)?
        };
        let (cfg, _) = simulate_field(&d, std::slice::from_ref(&e), &mut rng)?;
        let got = entry_events(&cfg, &d)?;
        Ok(validate(&cfg, &d).is_ok() && got.len() == 1 && got[0].approx_eq(&e, d.scale()))
    });
    let res: Vec<bool> = res.into_iter().collect::<Result<_>>()?;
    let bad = res.iter().filter(|&&ok| !ok).count() as f64;
    Ok(TestReport::new("entry round trip", count, bad, 0.0, 0.0)
        .provenance("entries of a field conditioned on E are E")
        .tolerance(0.0, "no mismatches")
        .timed(t0))
}

/// Byte-level determinism of resolve: the configuration of a simulated
/// field, re-resolved from its packages in the given and in reversed order,
/// serializes to the same bytes.
pub fn check_resolve_determinism(d: &Domain, count: u64, key: StreamKey) -> Result<TestReport> {
    let t0 = Instant::now();
    let res = replicate(key, DET_TAG, count, |_, mut rng| -> Result<bool> {
        let (cfg, pk) = simulate_field(d, &[], &mut rng)?;
        let a = to_json(&cfg);
        let b = to_json(&resolve(d, &[], &pk)?);
        let mut rev = pk.clone();
        rev.reverse();
        let c = to_json(&resolve(d, &[], &rev)?);
        Ok(a == b && b == c)
    });
    let res: Vec<bool> = res.into_iter().collect::<Result<_>>()?;
    let bad = res.iter().filter(|&&ok| !ok).count() as f64;
    Ok(TestReport::new("resolve determinism", count, bad, 0.0, 0.0)
        .provenance("resolve is a function of (domain, entries, packages)")
        .tolerance(0.0, "no mismatches")
        .timed(t0))
}

/// Fresh draws in the cube [0,a]^3 against draws in the same cube rotated
/// about its center: two-sample tests on the three summaries.
pub fn check_isometry(a: f64, draws: u64, key: StreamKey) -> Result<Vec<TestReport>> {
    if draws < 2 {
        return invalid("at least two draws are needed");
    }
    let t0 = Instant::now();
    let d0 = Domain::cube(a)?;
    let d1 = rotated_cube(a, rotation(Vec3::new(1.0, 2.0, 3.0).normalized(), 0.7));
    let draw = |d: &Domain, tag: u64| -> Result<Vec<[f64; 3]>> {
        replicate(key.child(&[tag]), ISO_TAG, draws, |_, mut rng| simulate_field(d, &[], &mut rng).map(|(c, _)| summaries(&c)))
            .into_iter()
            .collect()
    };
    let x0 = draw(&d0, 0)?;
    let x1 = draw(&d1, 1)?;
    Ok(ks_reports("isometry", &x0, &x1, 0.01, t0))
}

/// BS and BS[0] from the same seeds: the estimate is the number of
/// observations (including serialized configurations) that differ.
pub fn check_bs_identity(d: &Domain, s_max: f64, key: StreamKey) -> Result<TestReport> {
    let t0 = Instant::now();
    let seeds: Vec<u64> = (0..4).map(|i| key.child(&[BS_TAG, i]).stream().next_word()).collect();
    let mut diff = 0usize;
    let mut total = 0usize;
    for s in seeds {
        let mut o = ChainOptions::new(s_max, 1.0, s);
        o.keep_configs = true;
        let a = run_chain(d, &[], None, &o)?;
        let b = run_chain(d, &[], Some(&ZeroHamiltonian), &o)?;
        total += a.len().max(b.len());
        diff += a.len().abs_diff(b.len());
        diff += a.iter().zip(&b).filter(|(x, y)| serde_json::to_string(x).ok() != serde_json::to_string(y).ok()).count();
    }
    Ok(TestReport::new("BS[0] identical to BS", total as u64, diff as f64, 0.0, 0.0)
        .provenance("acceptance probability exp(0) = 1 with shared random words")
        .tolerance(0.0, "bitwise")
        .timed(t0))
}

/// Time spent at each package count and accepted moves leaving it.
#[derive(Debug, Clone, Default)]
struct LevelTally {
    time: Vec<f64>,
    up: Vec<u64>,
    down: Vec<u64>,
    audit_sum: f64,
    audit_var: f64,
    proposals: u64,
}

impl LevelTally {
    fn at(&mut self, k: usize) {
        if self.time.len() <= k {
            self.time.resize(k + 1, 0.0);
            self.up.resize(k + 1, 0);
            self.down.resize(k + 1, 0);
        }
    }
}

/// Detailed balance of BS[H] with H = beta * area on a small domain.
///
/// Returns three reports: the occupation ratio of one package against no
/// package, compared to lambda E exp(-beta A) computed from independent
/// single-package resolves (lambda = pi^4/6 Vol); the death rate out of the
/// one-package level against 1; and the acceptance audit, the mean of
/// accepted - min(1, exp(H(g) - H(h))) over resolved proposals, against 0.
pub fn check_detailed_balance(d: &Domain, beta: f64, jumps: u64, key: StreamKey) -> Result<Vec<TestReport>> {
    if !(beta >= 0.0) || jumps < 32 {
        return invalid("detailed balance needs beta >= 0 and at least 32 jumps");
    }
    let t0 = Instant::now();
    let h = AreaHamiltonian { beta };
    let chains = 16u64;
    let per = jumps / chains;
    let tallies = replicate(key, DB_TAG, chains, |_, mut rng| -> Result<LevelTally> {
        let mut st = ChainState::new(d, &[], EvolutionParams::default(), Some(&h))?;
        let mut t = LevelTally::default();
        for _ in 0..per {
            let j = bs_h_step(d, &mut st, &h, &mut rng, ChainParams::default())?;
            let k = j.packages_before;
            t.at(k + 1);
            t.time[k] += j.holding;
            if j.accepted {
                match j.kind {
                    MoveKind::Birth => t.up[k] += 1,
                    MoveKind::Death => t.down[k] += 1,
                }
            }
            if j.proposed {
                let p = (j.h_before - j.h_proposed).exp().min(1.0);
                t.audit_sum += if j.accepted { 1.0 } else { 0.0 } - p;
                t.audit_var += p * (1.0 - p);
                t.proposals += 1;
            }
        }
        Ok(t)
    });
    let tallies: Vec<LevelTally> = tallies.into_iter().collect::<Result<_>>()?;
    let ratios: Vec<f64> = tallies.iter().map(|t| t.time.get(1).copied().unwrap_or(0.0) / t.time[0]).collect();
    let (ratio, ratio_se) = mean_se(&ratios);

    // independent oracle: single-package configurations
    let lambda = I4 * d.volume();
    let oracle_n = (jumps / 20).max(1000);
    let w = replicate(key, DB_ORACLE_TAG, oracle_n, |_, mut rng| loop {
        let p = BirthPackage { site: uniform_point(d, &mut rng), key: random_key(&mut rng) };
        match resolve(d, &[], &[p]) {
            Ok(c) => return Ok((-beta * c.total_area()).exp()),
            Err(Error::Degeneracy(_)) => continue,
            Err(e) => return Err(e),
        }
    });
    let w: Vec<f64> = w.into_iter().collect::<Result<_>>()?;
    let (ew, ew_se) = mean_se(&w);
    let reference = lambda * ew;
    let ref_se = lambda * ew_se;
    let comb = (ratio_se * ratio_se + ref_se * ref_se).sqrt();

    let sum = |f: &dyn Fn(&LevelTally) -> f64| tallies.iter().map(f).sum::<f64>();
    let t0_tot = sum(&|t| t.time[0]);
    let t1_tot = sum(&|t| t.time.get(1).copied().unwrap_or(0.0));
    let up01 = sum(&|t| t.up[0] as f64);
    let down10 = sum(&|t| t.down.get(1).copied().unwrap_or(0) as f64);

    let occupancy = TestReport::new(format!("detailed balance occupancy, area:{beta}"), per * chains, ratio, comb, reference)
        .provenance("lambda E exp(-beta A) from independent single-package resolves")
        .tolerance(3.0 * comb, "3 combined standard errors")
        .detail("chain_se", ratio_se)
        .detail("oracle_se", ref_se)
        .detail("oracle_samples", oracle_n as f64)
        .detail("rate_up_0", up01 / t0_tot)
        .detail("flux_up_0_1", up01)
        .detail("flux_down_1_0", down10)
        .timed(t0);
    let q10 = if t1_tot > 0.0 { down10 / t1_tot } else { 0.0 };
    let q10_se = if t1_tot > 0.0 { down10.sqrt() / t1_tot } else { 0.0 };
    let death = TestReport::new("detailed balance death rate from one package", down10 as u64, q10, q10_se, 1.0)
        .provenance("unit death rate, acceptance min(1, exp(beta A)) = 1")
        .timed(t0);
    let props = sum(&|t| t.proposals as f64);
    let audit_mean = sum(&|t| t.audit_sum) / props;
    let audit_se = sum(&|t| t.audit_var).sqrt() / props;
    let audit = TestReport::new("acceptance audit", props as u64, audit_mean, audit_se, 0.0)
        .provenance("acceptance probability min(1, exp(H(g) - H(h)))")
        .timed(t0);
    Ok(vec![occupancy, death, audit])
}

/// Time-averaged package count of BS against its stationary mean
/// pi^4/6 Vol(D); also reports the time average of exp(-area).
pub fn check_package_count(d: &Domain, jumps: u64, key: StreamKey) -> Result<TestReport> {
    if jumps < 32 {
        return invalid("at least 32 jumps are needed");
    }
    let t0 = Instant::now();
    let chains = 16u64;
    let per = jumps / chains;
    let res = replicate(key, PC_TAG, chains, |_, mut rng| -> Result<(f64, f64)> {
        let mut st = ChainState::new(d, &[], EvolutionParams::default(), None)?;
        let (mut tk, mut tz, mut tt) = (0.0, 0.0, 0.0);
        for _ in 0..per {
            let k = st.packages.len() as f64;
            let z = (-st.cfg.total_area()).exp();
            let j = bs_step(d, &mut st, &mut rng, ChainParams::default())?;
            tk += k * j.holding;
            tz += z * j.holding;
            tt += j.holding;
        }
        Ok((tk / tt, tz / tt))
    });
    let res: Vec<(f64, f64)> = res.into_iter().collect::<Result<_>>()?;
    let (m, se) = mean_se(&res.iter().map(|r| r.0).collect::<Vec<_>>());
    let (z, _) = mean_se(&res.iter().map(|r| r.1).collect::<Vec<_>>());
    Ok(TestReport::new("stationary package count", per * chains, m, se, I4 * d.volume())
        .provenance("Poisson(pi^4/6 Vol) package count")
        .detail("mean_exp_minus_area", z)
        .timed(t0))
}
