//! Plane-process intensities and the hit measure.

use super::{dispersion, mean_se, replicate, TestReport};
use crate::error::{invalid, Result};
use crate::geometry::{line_of, triple_point, Domain, Vec3};
use crate::stochgeom::{i2_disc_hits, kappa, sample_hitting_planes, uniform_sphere, StreamKey, I1, I3, I4};
use std::f64::consts::PI;
use std::time::Instant;

const I1_TAG: u64 = 0x11;
const I2_TAG: u64 = 0x12;
const I3_TAG: u64 = 0x13;
const I4_TAG: u64 = 0x14;
const KAPPA_TAG: u64 = 0x4b;

fn positive_replicates(n: u64) -> Result<()> {
    if n < 2 {
        return invalid("at least two replicates are needed for a standard error");
    }
    Ok(())
}

/// Box around `[lo, hi]` widened by `w` in every direction.
fn bounding_box(lo: Vec3, hi: Vec3, w: f64) -> Result<Domain> {
    let m = Vec3::new(w, w, w);
    Domain::cuboid(lo - m, hi + m)
}

fn counts_report(name: &str, counts: &[f64], reference: f64, provenance: &str, t0: Instant) -> TestReport {
    let (m, se) = mean_se(counts);
    TestReport::new(name, counts.len() as u64, m, se, reference)
        .provenance(provenance)
        .detail("dispersion", dispersion(counts))
        .timed(t0)
}

/// Number of planes crossing the segment from the origin to (L, 0, 0).
pub fn check_i1(length: f64, replicates: u64, key: StreamKey) -> Result<TestReport> {
    if !(length >= 0.0) || !length.is_finite() {
        return invalid("segment length must be finite and nonnegative");
    }
    positive_replicates(replicates)?;
    let t0 = Instant::now();
    let (a, b) = (Vec3::ZERO, Vec3::new(length, 0.0, 0.0));
    let bx = bounding_box(a, b, 0.05)?;
    let counts = replicate(key, I1_TAG, replicates, |_, mut rng| {
        let planes = sample_hitting_planes(&bx, &mut rng);
        planes.iter().filter(|p| (p.signed_distance(a) < 0.0) != (p.signed_distance(b) < 0.0)).count() as f64
    });
    Ok(counts_report(&format!("I1 line hits, L={length}"), &counts, I1 * length, "pi per unit length", t0)
        .detail("length", length))
}

/// Number of section lines in the plane {z = 0} hitting the disc of radius
/// R centered at the origin.
pub fn check_i2(radius: f64, replicates: u64, key: StreamKey) -> Result<TestReport> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return invalid("disc radius must be finite and nonnegative");
    }
    positive_replicates(replicates)?;
    let t0 = Instant::now();
    let bx = bounding_box(Vec3::new(-radius, -radius, 0.0), Vec3::new(radius, radius, 0.0), 0.05)?;
    let counts = replicate(key, I2_TAG, replicates, |_, mut rng| {
        let planes = sample_hitting_planes(&bx, &mut rng);
        planes
            .iter()
            .filter(|p| {
                // the section is {<(x, y), u_xy> = rho}, at distance rho / |u_xy| from the origin
                let s = p.u.x.hypot(p.u.y);
                s > 0.0 && p.rho <= radius * s
            })
            .count() as f64
    });
    Ok(counts_report(&format!("I2 disc hits, R={radius}"), &counts, i2_disc_hits(radius), "pi/2 dphi dr over lines hitting the disc", t0)
        .detail("radius", radius))
}

/// Number of pairwise plane intersections meeting the square window
/// [0, a]^2 x {0} with a^2 = `area`, compared to pi^3/4 per unit area.
pub fn check_i3(area: f64, replicates: u64, key: StreamKey) -> Result<TestReport> {
    if !(area >= 0.0) || !area.is_finite() {
        return invalid("window area must be finite and nonnegative");
    }
    positive_replicates(replicates)?;
    let t0 = Instant::now();
    let a = area.sqrt();
    let bx = bounding_box(Vec3::ZERO, Vec3::new(a, a, 0.0), 0.05)?;
    let counts = replicate(key, I3_TAG, replicates, |_, mut rng| {
        let planes = sample_hitting_planes(&bx, &mut rng);
        let mut c = 0;
        for i in 0..planes.len() {
            for j in i + 1..planes.len() {
                let Ok(l) = line_of(&planes[i], &planes[j]) else { continue };
                if l.direction.z == 0.0 {
                    continue;
                }
                let x = l.at(-l.point.z / l.direction.z);
                if (0.0..a).contains(&x.x) && (0.0..a).contains(&x.y) {
                    c += 1;
                }
            }
        }
        c as f64
    });
    Ok(counts_report(&format!("I3 pair points, area={area}"), &counts, I3 * area, "pi^3/4 per unit area", t0)
        .detail("area", area))
}

/// Number of triple points in the cube of volume `volume`, compared to
/// pi^4/6 per unit volume.
pub fn check_i4(volume: f64, replicates: u64, key: StreamKey) -> Result<TestReport> {
    if !(volume >= 0.0) || !volume.is_finite() {
        return invalid("volume must be finite and nonnegative");
    }
    positive_replicates(replicates)?;
    let t0 = Instant::now();
    let a = volume.cbrt();
    let bx = bounding_box(Vec3::ZERO, Vec3::new(a, a, a), 0.05)?;
    let inside = |x: Vec3| [x.x, x.y, x.z].iter().all(|c| (0.0..a).contains(c));
    let counts = replicate(key, I4_TAG, replicates, |_, mut rng| {
        let planes = sample_hitting_planes(&bx, &mut rng);
        let n = planes.len();
        let mut c = 0;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if let Ok(x) = triple_point(&planes[i], &planes[j], &planes[k]) {
                        if inside(x) {
                            c += 1;
                        }
                    }
                }
            }
        }
        c as f64
    });
    Ok(counts_report(&format!("I4 triple points, V={volume}"), &counts, I4 * volume, "pi^4/6 per unit volume", t0)
        .detail("volume", volume))
}

/// Monte Carlo mu-measure of the planes hitting `d`: u uniform on the
/// sphere, rho uniform on [0, R] around the vertex centroid, a hit when rho
/// lies between the smallest and largest projection of a vertex. Returns the
/// estimate and its standard error.
pub fn mc_hit_measure(d: &Domain, samples: u64, key: StreamKey) -> (f64, f64) {
    let c = d.center();
    let vs: Vec<Vec3> = d.vertices().iter().map(|&v| v - c).collect();
    let r = vs.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let chunks = 1000.min(samples.max(1));
    let per = samples / chunks;
    let extra = samples % chunks;
    let hits: u64 = replicate(key, KAPPA_TAG, chunks, |i, mut rng| {
        let m = per + if i == 0 { extra } else { 0 };
        let mut h = 0u64;
        for _ in 0..m {
            let u = uniform_sphere(&mut rng);
            let rho = r * rng.uniform();
            let (lo, hi) = vs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                let s = v.dot(u);
                (lo.min(s), hi.max(s))
            });
            if lo <= rho && rho <= hi {
                h += 1;
            }
        }
        h
    })
    .into_iter()
    .sum();
    let n = samples as f64;
    let p = hits as f64 / n;
    let total = 4.0 * PI * r;
    (total * p, total * (p * (1.0 - p) / n).sqrt())
}

/// kappa from the edge formula against [`mc_hit_measure`], 1% relative tolerance.
pub fn check_kappa(name: &str, d: &Domain, samples: u64, key: StreamKey) -> Result<TestReport> {
    if samples < 2 {
        return invalid("at least two samples are needed");
    }
    let t0 = Instant::now();
    let (est, se) = mc_hit_measure(d, samples, key);
    let k = kappa(d);
    Ok(TestReport::new(format!("kappa {name}"), samples, est, se, k)
        .provenance("half the sum of exterior dihedral angle times edge length")
        .tolerance(0.01 * k, "1% relative")
        .timed(t0))
}
