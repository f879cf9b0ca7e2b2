//! The motion-invariant plane measure, its hit measure kappa, Poisson plane
//! sampling and the directional laws of newborn vertices and edges.
//!
//! The plane measure is mu(du, drho) = sigma(du) drho over the chart (u, rho)
//! with u on the full sphere and rho >= 0, so a segment of length l is hit
//! by pi * l planes on average.

mod rng;

pub use rng::{philox4x32_10, RngStream, StreamKey};

use crate::error::{invalid, Result};
use crate::geometry::{Domain, Line3, Plane, Vec3, EPS_GEOM};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Hit intensity of a line per unit length.
pub const I1: f64 = PI;
/// Intensity of intersection points of the planes with a fixed plane, per unit area.
pub const I3: f64 = PI * PI * PI / 4.0;
/// Intensity of triple points per unit volume.
pub const I4: f64 = PI * PI * PI * PI / 6.0;

/// I2 reference: expected number of section lines hitting a disc of radius `r`.
pub fn i2_disc_hits(r: f64) -> f64 {
    PI * PI * r
}

/// mu-measure of planes hitting the domain: half the sum over domain edges of
/// exterior dihedral angle times length.
pub fn kappa(d: &Domain) -> f64 {
    0.5 * d.edges().iter().map(|e| (PI - e.dihedral) * e.length).sum::<f64>()
}

/// Uniform direction on the unit sphere.
pub fn uniform_sphere(rng: &mut RngStream) -> Vec3 {
    let z = 2.0 * rng.uniform() - 1.0;
    let phi = 2.0 * PI * rng.uniform();
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// One plane from the normalized plane measure restricted to planes hitting `d`.
///
/// Planes are drawn as {<x - c, u> = s} with c the domain center, u uniform and
/// s uniform on [0, R]; the draw is kept when s does not exceed the support
/// function of d - c in direction u.
pub fn sample_plane_hitting(d: &Domain, rng: &mut RngStream) -> Plane {
    let c = d.center();
    let r = d.radius();
    loop {
        let u = uniform_sphere(rng);
        let s = r * rng.uniform();
        if s < d.support(u) - c.dot(u) {
            return Plane::through(c + u * s, u).expect("unit normal");
        }
    }
}

/// Poisson plane process restricted to planes hitting `d`.
pub fn sample_hitting_planes(d: &Domain, rng: &mut RngStream) -> Vec<Plane> {
    let n = rng.poisson(kappa(d));
    (0..n).map(|_| sample_plane_hitting(d, rng)).collect()
}

/// Unit normals of three planes meeting at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexFrame {
    pub n1: Vec3,
    pub n2: Vec3,
    pub n3: Vec3,
}

impl VertexFrame {
    /// Density of the typical vertex frame relative to uniform normals.
    pub fn density(&self) -> f64 {
        Vec3::triple(self.n1, self.n2, self.n3).abs()
    }
}

/// Typical vertex frame: density proportional to |<n1, n2 x n3>| with respect
/// to three independent uniform normals. Returns the frame and the number of
/// proposals used.
pub fn sample_vertex_frame_counted(rng: &mut RngStream) -> (VertexFrame, u32) {
    let mut tries = 0;
    loop {
        tries += 1;
        let f = VertexFrame { n1: uniform_sphere(rng), n2: uniform_sphere(rng), n3: uniform_sphere(rng) };
        if rng.uniform() < f.density() {
            return (f, tries);
        }
    }
}

pub fn sample_vertex_frame(rng: &mut RngStream) -> VertexFrame {
    sample_vertex_frame_counted(rng).0
}

/// Typical vertex frame conditioned on the first normal.
pub fn sample_vertex_frame_given(n1: Vec3, rng: &mut RngStream) -> Result<VertexFrame> {
    if (n1.norm() - 1.0).abs() > EPS_GEOM {
        return invalid("conditioning normal must be a unit vector");
    }
    loop {
        let f = VertexFrame { n1, n2: uniform_sphere(rng), n3: uniform_sphere(rng) };
        if rng.uniform() < f.density() {
            return Ok(f);
        }
    }
}

/// Normal of a typical plane hitting a line with direction `dir` (unit):
/// density proportional to |<n, dir>|.
pub fn sample_normal_hitting_line(dir: Vec3, rng: &mut RngStream) -> Vec3 {
    loop {
        let n = uniform_sphere(rng);
        if rng.uniform() < n.dot(dir).abs() {
            return n;
        }
    }
}

/// Typical plane hitting `line` at a point drawn uniformly from the parameter
/// range `range`. Returns the plane and the hit parameter.
pub fn sample_plane_hitting_line(line: &Line3, range: (f64, f64), rng: &mut RngStream) -> (Plane, f64) {
    let s = rng.uniform_in(range.0, range.1);
    let n = sample_normal_hitting_line(line.direction, rng);
    (Plane::through(line.at(s), n).expect("unit normal"), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_domain;
    use crate::geometry::Halfspace;

    #[test]
    fn kappa_unit_cube() {
        let d = Domain::cube(1.0).unwrap();
        assert!((kappa(&d) - 3.0 * PI).abs() < 1e-13);
        let h = Domain::cube(0.5).unwrap();
        assert!((kappa(&h) - 1.5 * PI).abs() < 1e-13);
    }

    #[test]
    fn kappa_regular_tetrahedron() {
        // edge length 2*sqrt(2): vertices (1,1,1),(1,-1,-1),(-1,1,-1),(-1,-1,1)
        let hs: Vec<Halfspace> = [
            Vec3::new(1.0, 1.0, -1.0),
            Vec3::new(1.0, -1.0, 1.0),
            Vec3::new(-1.0, 1.0, 1.0),
            Vec3::new(-1.0, -1.0, -1.0),
        ]
        .iter()
        .map(|&n| Halfspace::new(n, 1.0))
        .collect();
        let d = build_domain(&hs).unwrap();
        let edge = 8f64.sqrt();
        let expect = 0.5 * 6.0 * (PI - (1.0f64 / 3.0).acos()) * edge;
        assert!((kappa(&d) - expect).abs() < 1e-12);
    }

    #[test]
    fn sampled_planes_hit_domain() {
        let d = Domain::cube(1.0).unwrap();
        let mut r = RngStream::from_seed(5);
        for _ in 0..2000 {
            let p = sample_plane_hitting(&d, &mut r);
            let s: Vec<f64> = d.vertices().iter().map(|&v| p.signed_distance(v)).collect();
            assert!(s.iter().any(|&x| x >= 0.0) && s.iter().any(|&x| x <= 0.0));
        }
    }

    #[test]
    fn orthonormal_frame_has_unit_density() {
        let f = VertexFrame {
            n1: Vec3::new(1.0, 0.0, 0.0),
            n2: Vec3::new(0.0, 1.0, 0.0),
            n3: Vec3::new(0.0, 0.0, 1.0),
        };
        assert_eq!(f.density(), 1.0);
    }

    #[test]
    fn hitting_planes_reproducible() {
        let d = Domain::cube(1.0).unwrap();
        let a = sample_hitting_planes(&d, &mut RngStream::from_seed(9));
        let b = sample_hitting_planes(&d, &mut RngStream::from_seed(9));
        assert_eq!(a, b);
    }
}
