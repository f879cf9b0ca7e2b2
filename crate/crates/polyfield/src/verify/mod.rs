//! Monte Carlo checks of the analytic constants, the partition identity and
//! the equivalence of the dynamic and chain representations.
//!
//! Every check returns [`TestReport`]s whose verdict is exactly
//! |estimate - reference| <= tolerance. Replicates run on the rayon pool with
//! per-replicate streams split from the master key, so results do not depend
//! on scheduling.

mod field;
mod integral;
mod kin;
mod twosample;

pub use field::{
    check_admissibility, check_bs_identity, check_detailed_balance, check_empty_probability, check_entry_roundtrip,
    check_equivalence, check_isometry, check_package_count, check_partition_truncated, check_resolve_determinism,
    partition_truncation_bound, random_ia_entry, random_ie_entry, EquivalenceOptions,
};
pub use integral::{check_i1, check_i2, check_i3, check_i4, check_kappa, mc_hit_measure};
pub use kin::{check_ie_fraction, check_octants, check_vertex_velocity_forms, random_wedge, OctantLaw};
pub use twosample::{kolmogorov_q, ks_critical, ks_statistic};

use crate::error::{invalid, Result};
use crate::geometry::{Domain, Vec3};
use crate::stochgeom::{RngStream, StreamKey};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub samples: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub reference: f64,
    /// Where the reference value comes from.
    pub provenance: String,
    pub tolerance: f64,
    /// Human-readable tolerance rule.
    pub rule: String,
    pub pass: bool,
    pub wall_ms: u64,
    /// Auxiliary numbers (dispersion indices, counts, bounds, ...).
    #[serde(default)]
    pub details: BTreeMap<String, f64>,
}

impl TestReport {
    pub(crate) fn new(name: impl Into<String>, samples: u64, estimate: f64, std_error: f64, reference: f64) -> TestReport {
        TestReport {
            name: name.into(),
            samples,
            estimate,
            std_error,
            reference,
            provenance: String::new(),
            tolerance: 3.0 * std_error,
            rule: "3 standard errors".into(),
            pass: false,
            wall_ms: 0,
            details: BTreeMap::new(),
        }
        .judged()
    }

    pub(crate) fn provenance(mut self, p: impl Into<String>) -> TestReport {
        self.provenance = p.into();
        self
    }

    pub(crate) fn tolerance(mut self, tol: f64, rule: impl Into<String>) -> TestReport {
        self.tolerance = tol;
        self.rule = rule.into();
        self.judged()
    }

    pub(crate) fn detail(mut self, k: &str, v: f64) -> TestReport {
        self.details.insert(k.into(), v);
        self
    }

    pub(crate) fn timed(mut self, t0: Instant) -> TestReport {
        self.wall_ms = t0.elapsed().as_millis() as u64;
        self
    }

    fn judged(mut self) -> TestReport {
        self.pass = (self.estimate - self.reference).abs() <= self.tolerance;
        self
    }

    /// The same estimate judged against another reference value, with the
    /// tolerance unchanged. Used to confirm that a check is not vacuous.
    pub fn with_reference(&self, reference: f64) -> TestReport {
        TestReport { reference, ..self.clone() }.judged()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Fixed-width summary, one line per report.
pub fn summary_table(reports: &[TestReport]) -> String {
    let mut s = format!(
        "{:<52} {:>9} {:>14} {:>12} {:>14} {:>12} {:>6}\n",
        "test", "n", "estimate", "s.e.", "reference", "tolerance", "result"
    );
    for r in reports {
        s += &format!(
            "{:<52} {:>9} {:>14.6} {:>12.3e} {:>14.6} {:>12.3e} {:>6}\n",
            r.name,
            r.samples,
            r.estimate,
            r.std_error,
            r.reference,
            r.tolerance,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    s
}

/// Mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Variance-to-mean ratio.
pub fn dispersion(xs: &[f64]) -> f64 {
    let (m, se) = mean_se(xs);
    let n = xs.len() as f64;
    if m == 0.0 {
        return f64::NAN;
    }
    se * se * n / m
}

/// Runs `f(i, stream)` for replicates i = 0..n on streams `key.child([tag, i])`
/// in parallel; the output is in replicate order.
pub(crate) fn replicate<T: Send>(key: StreamKey, tag: u64, n: u64, f: impl Fn(u64, RngStream) -> T + Sync) -> Vec<T> {
    (0..n).into_par_iter().map(|i| f(i, key.child(&[tag, i]).stream())).collect()
}

/// Named groups of checks runnable from the command line.
pub const SUITES: &[&str] = &["prop1", "kappa", "empty", "partition", "kinematics", "structural", "equivalence", "chain"];

/// Sizes of a suite run. `replicates` scales the Monte Carlo sample sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub replicates: u64,
    pub seed: u64,
}

/// Test domains: cubes, a rotated cube, a tetrahedron and a box.
pub fn test_domains() -> Vec<(String, Domain)> {
    let rot = rotation(Vec3::new(1.0, 2.0, 3.0).normalized(), 0.7);
    vec![
        ("cube 0.5".into(), Domain::cube(0.5).expect("cube")),
        ("rotated cube 0.5".into(), rotated_cube(0.5, rot)),
        ("tetrahedron 0.9".into(), tetrahedron(0.9)),
        ("box 0.4x0.6x0.5".into(), Domain::cuboid(Vec3::ZERO, Vec3::new(0.4, 0.6, 0.5)).expect("box")),
        ("cube 0.3".into(), Domain::cube(0.3).expect("cube")),
    ]
}

/// Polytopes for the hit-measure check, starting with the unit cube.
pub fn kappa_domains() -> Vec<(String, Domain)> {
    let rot = rotation(Vec3::new(-2.0, 1.0, 0.5).normalized(), 1.1);
    let mut cut = Domain::cube(1.0).expect("cube").input_halfspaces().to_vec();
    cut.push(crate::geometry::Halfspace::new(Vec3::new(1.0, 1.0, 1.0).normalized(), 2.2 / 3f64.sqrt()));
    vec![
        ("unit cube".into(), Domain::cube(1.0).expect("cube")),
        ("rotated unit cube".into(), rotated_cube(1.0, rot)),
        ("tetrahedron 1.5".into(), tetrahedron(1.5)),
        ("box 0.5x1x2".into(), Domain::cuboid(Vec3::ZERO, Vec3::new(0.5, 1.0, 2.0)).expect("box")),
        ("truncated cube".into(), crate::geometry::build_domain(&cut).expect("truncated cube")),
    ]
}

/// Rotation matrix (rows) about a unit axis.
pub fn rotation(axis: Vec3, angle: f64) -> [Vec3; 3] {
    let (s, c) = angle.sin_cos();
    let (x, y, z) = (axis.x, axis.y, axis.z);
    let t = 1.0 - c;
    [
        Vec3::new(t * x * x + c, t * x * y - s * z, t * x * z + s * y),
        Vec3::new(t * x * y + s * z, t * y * y + c, t * y * z - s * x),
        Vec3::new(t * x * z - s * y, t * y * z + s * x, t * z * z + c),
    ]
}

pub fn rotate(r: &[Vec3; 3], v: Vec3) -> Vec3 {
    Vec3::new(r[0].dot(v), r[1].dot(v), r[2].dot(v))
}

/// Cube [0,a]^3 rotated about its center.
pub fn rotated_cube(a: f64, r: [Vec3; 3]) -> Domain {
    let c = Vec3::new(a / 2.0, a / 2.0, a / 2.0);
    let hs: Vec<_> = Domain::cube(a)
        .expect("cube")
        .facets()
        .iter()
        .map(|f| {
            let n = rotate(&r, f.halfspace.normal);
            crate::geometry::Halfspace::new(n, f.halfspace.offset - f.halfspace.normal.dot(c) + n.dot(c))
        })
        .collect();
    crate::geometry::build_domain(&hs).expect("rotated cube")
}

/// Regular tetrahedron with edge length `a`, centered at (a, a, a).
pub fn tetrahedron(a: f64) -> Domain {
    let c = Vec3::new(a, a, a);
    let ns = [Vec3::new(1.0, 1.0, 1.0), Vec3::new(1.0, -1.0, -1.0), Vec3::new(-1.0, 1.0, -1.0), Vec3::new(-1.0, -1.0, 1.0)];
    // inradius of the regular tetrahedron
    let r = a / (24.0f64).sqrt();
    let hs: Vec<_> = ns
        .iter()
        .map(|n| {
            let u = n.normalized();
            crate::geometry::Halfspace::new(u, u.dot(c) + r)
        })
        .collect();
    crate::geometry::build_domain(&hs).expect("tetrahedron")
}

/// Runs one named suite with sizes scaled from the acceptance defaults by
/// `replicates / 10^4`.
pub fn run_suite(name: &str, opts: SuiteOptions) -> Result<Vec<TestReport>> {
    let n = opts.replicates.max(1);
    let key = StreamKey::from_seed(opts.seed);
    let scaled = |base: u64| (base * n / 10_000).max(1);
    Ok(match name {
        "prop1" => vec![
            check_i1(10.0, n, key)?,
            check_i2(1.0, n, key)?,
            check_i3(1.0, n, key)?,
            check_i4(1.0, n, key)?,
        ],
        "kappa" => kappa_domains()
            .iter()
            .map(|(nm, d)| check_kappa(nm, d, scaled(10_000_000), key))
            .collect::<Result<Vec<_>>>()?,
        "empty" => vec![check_empty_probability(&Domain::cube(0.3)?, n, key)?],
        "partition" => vec![check_partition_truncated(&Domain::cube(0.1)?, scaled(1_000_000), key)?],
        "kinematics" => {
            let mut v = vec![check_vertex_velocity_forms(scaled(100_000), key)];
            v.extend(check_ie_fraction(5, scaled(1_000_000) / 5, key)?);
            v.push(check_octants(OctantLaw::It, n, key)?);
            v.push(check_octants(OctantLaw::Ia, n, key)?);
            v
        }
        "structural" => {
            let mut v = Vec::new();
            for (nm, d) in test_domains() {
                v.push(check_admissibility(&nm, &d, scaled(200), key)?);
            }
            v.push(check_entry_roundtrip(scaled(20), key)?);
            v.push(check_resolve_determinism(&Domain::cube(0.6)?, scaled(20), key)?);
            v.extend(check_isometry(0.5, scaled(2000), key)?);
            v
        }
        "equivalence" => {
            let d = Domain::cube(0.3)?;
            let mut o = EquivalenceOptions::default();
            o.fresh = scaled(o.fresh);
            o.chains = scaled(o.chains);
            let mut v = check_equivalence(&d, &[], &o, key)?;
            o.ie_rate_scale = 2.0;
            v.extend(check_equivalence(&d, &[], &o, key)?);
            v
        }
        "chain" => {
            let mut v = vec![
                check_bs_identity(&Domain::cube(0.3)?, 200.0, key)?,
                check_package_count(&Domain::cube(0.3)?, scaled(100_000), key)?,
            ];
            v.extend(check_detailed_balance(&Domain::cube(0.2)?, 20.0, scaled(1_000_000), key)?);
            v
        }
        _ => return invalid(format!("unknown suite {name:?}; known suites: {}", SUITES.join(", "))),
    })
}
