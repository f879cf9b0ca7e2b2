//! Checks of the kinematic formulas against independent routes.

use super::{replicate, TestReport};
use crate::error::{invalid, Result};
use crate::geometry::{Plane, Vec2, Vec3};
use crate::kinematics::{
    newborn_triangle_normals, stable_ia, stable_ie, stable_it, vertex_velocity, vertex_velocity_gram, SliceLine, Wedge,
};
use crate::stochgeom::{sample_normal_hitting_line, sample_vertex_frame, sample_vertex_frame_given, uniform_sphere, RngStream, StreamKey};
use std::f64::consts::PI;
use std::time::Instant;

const GRAM_TAG: u64 = 0x67;
const IE_TAG: u64 = 0x69;
const IE_WEDGE_TAG: u64 = 0x6a;
const OCT_TAG: u64 = 0x6f;

fn random_line(rng: &mut RngStream) -> SliceLine {
    loop {
        let p = Plane::through(Vec3::new(rng.uniform(), rng.uniform(), rng.uniform()), uniform_sphere(rng)).expect("unit normal");
        if let Ok(l) = SliceLine::from_plane(&p) {
            return l;
        }
    }
}

/// Crossing velocities from the normal form against the Gram form on random
/// pairs of section lines. The estimate is the largest relative discrepancy.
pub fn check_vertex_velocity_forms(instances: u64, key: StreamKey) -> TestReport {
    let t0 = Instant::now();
    let errs = replicate(key, GRAM_TAG, instances, |_, mut rng| {
        let (a, b) = (random_line(&mut rng), random_line(&mut rng));
        match (vertex_velocity(&a, &b), vertex_velocity_gram(a.velocity(), b.velocity())) {
            (Ok(w), Ok(g)) => Some((w - g).norm() / w.norm().max(f64::MIN_POSITIVE)),
            _ => None,
        }
    });
    let skipped = errs.iter().filter(|e| e.is_none()).count();
    let worst = errs.iter().flatten().fold(0.0, |m: f64, &e| m.max(e));
    TestReport::new("vertex velocity normal vs Gram form", instances, worst, 0.0, 0.0)
        .provenance("the two linear systems have the same solution")
        .tolerance(1e-9, "max relative difference <= 1e-9")
        .detail("singular_instances", skipped as f64)
        .timed(t0)
}

/// A uniformly random wedge: unit edge direction and two unit side vectors
/// orthogonal to it.
pub fn random_wedge(rng: &mut RngStream) -> Wedge {
    let d = uniform_sphere(rng);
    let side = |rng: &mut RngStream| loop {
        let v = uniform_sphere(rng);
        let s = v - d * d.dot(v);
        if s.norm() > 1e-3 {
            return s.normalized();
        }
    };
    let a = side(rng);
    let b = side(rng);
    Wedge { direction: d, sides: [a, b] }
}

/// For each of `wedges` random wedges, the fraction of typical planes
/// through the edge giving a stable edge birth, against (2 pi - angle) / 2 pi.
pub fn check_ie_fraction(wedges: u64, draws: u64, key: StreamKey) -> Result<Vec<TestReport>> {
    if draws < 2 {
        return invalid("at least two draws per wedge are needed");
    }
    let mut out = Vec::new();
    let mut wr = key.child(&[IE_WEDGE_TAG]).stream();
    let mut made = 0;
    while made < wedges {
        let t0 = Instant::now();
        let w = random_wedge(&mut wr);
        let (Ok(angle), Ok((d, ua, ub))) = (w.angle(), w.slice_rays()) else { continue };
        let la = SliceLine::from_plane(&Plane::through(Vec3::ZERO, d.cross(w.sides[0]))?)?;
        let lb = SliceLine::from_plane(&Plane::through(Vec3::ZERO, d.cross(w.sides[1]))?)?;
        let chunks = 100.min(draws);
        let per = draws / chunks;
        let res = replicate(key.child(&[made]), IE_TAG, chunks, |_, mut rng| {
            let (mut stable, mut n) = (0u64, 0u64);
            while n < per {
                let nrm = sample_normal_hitting_line(d, &mut rng);
                let Ok(p) = Plane::through(Vec3::ZERO, nrm) else { continue };
                let Ok(lc) = SliceLine::from_plane(&p) else { continue };
                let Ok(o) = stable_ie(&la, &lb, ua, ub, &lc) else { continue };
                n += 1;
                if o.is_stable() {
                    stable += 1;
                }
            }
            stable
        });
        let n = (per * chunks) as f64;
        let p = res.iter().sum::<u64>() as f64 / n;
        let se = (p * (1.0 - p) / n).sqrt();
        out.push(
            TestReport::new(format!("stable edge birth fraction, wedge {made}"), n as u64, p, se, (2.0 * PI - angle) / (2.0 * PI))
                .provenance("closed-form wedge angle")
                .detail("angle", angle)
                .timed(t0),
        );
        made += 1;
    }
    Ok(out)
}

/// Frame laws for the octant check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OctantLaw {
    /// Typical vertex frame of an interior triangle birth.
    It,
    /// Frame of an angle birth: first normal uniform, the other two from the
    /// conditional vertex law.
    Ia,
}

/// Number of the eight normal sign patterns for which the stability
/// condition holds, and whether the stable one matches the normals of the
/// newborn triangle.
fn stable_patterns(law: OctantLaw, lines: [SliceLine; 3]) -> Result<(usize, bool)> {
    let m = [lines[0].normal, lines[1].normal, lines[2].normal];
    let tn = newborn_triangle_normals([&lines[0], &lines[1], &lines[2]])?;
    let mut count = 0;
    let mut matches = false;
    for s in 0..8u32 {
        let sg = |i: u32| if s >> i & 1 == 1 { -1.0 } else { 1.0 };
        let ns: [Vec2; 3] = [m[0] * sg(0), m[1] * sg(1), m[2] * sg(2)];
        let ok = match law {
            OctantLaw::It => stable_it([&lines[0], &lines[1], &lines[2]], ns)?,
            OctantLaw::Ia => stable_ia(&lines[0], [&lines[1], &lines[2]], ns)?,
        };
        if ok {
            count += 1;
            matches = (0..3).all(|i| ns[i].dot(tn[i]) > 0.0);
        }
    }
    Ok((count, matches))
}

/// Fraction of random frames with exactly one stable sign pattern.
pub fn check_octants(law: OctantLaw, frames: u64, key: StreamKey) -> Result<TestReport> {
    if frames == 0 {
        return invalid("at least one frame is needed");
    }
    let t0 = Instant::now();
    let tag = match law {
        OctantLaw::It => 0,
        OctantLaw::Ia => 1,
    };
    let res = replicate(key.child(&[tag]), OCT_TAG, frames, |_, mut rng| loop {
        let f = match law {
            OctantLaw::It => sample_vertex_frame(&mut rng),
            OctantLaw::Ia => sample_vertex_frame_given(uniform_sphere(&mut rng), &mut rng).expect("unit normal"),
        };
        let lines: Result<Vec<SliceLine>> =
            [f.n1, f.n2, f.n3].iter().map(|&n| SliceLine::from_plane(&Plane::through(Vec3::ZERO, n)?)).collect();
        let Ok(lines) = lines else { continue };
        if let Ok(r) = stable_patterns(law, [lines[0], lines[1], lines[2]]) {
            return r;
        }
    });
    let one = res.iter().filter(|r| r.0 == 1).count() as f64;
    let none = res.iter().filter(|r| r.0 == 0).count() as f64;
    let matched = res.iter().filter(|r| r.0 == 1 && r.1).count() as f64;
    let n = frames as f64;
    let name = match law {
        OctantLaw::It => "one stable octant per triangle frame",
        OctantLaw::Ia => "one stable octant per angle frame",
    };
    Ok(TestReport::new(name, frames, one / n, 0.0, 1.0)
        .provenance("exactly one octant contains the newborn triangle")
        .tolerance(0.0, "every frame")
        .detail("frames_without_stable_octant", none)
        .detail("frames_with_several", n - one - none)
        .detail("matches_newborn_normals", matched / n)
        .timed(t0))
}
