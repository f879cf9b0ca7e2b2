use polyfield::geometry::{Plane, Vec2, Vec3};
use polyfield::kinematics::*;
use polyfield::verify::random_wedge;
use polyfield::stochgeom::StreamKey;
use proptest::prelude::*;
use std::f64::consts::PI;

fn unit(v: (f64, f64, f64)) -> Option<Vec3> {
    let v = Vec3::new(v.0, v.1, v.2);
    (v.norm() > 0.1).then(|| v.normalized())
}

fn coord() -> impl Strategy<Value = (f64, f64, f64)> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
}

fn slice(p: (f64, f64, f64), n: (f64, f64, f64)) -> Option<SliceLine> {
    let n = unit(n)?;
    let spatial = Vec2::new(n.y, n.z).norm();
    if spatial < 0.2 {
        return None;
    }
    SliceLine::from_plane(&Plane::through(Vec3::new(p.0, p.1, p.2), n).unwrap()).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// The foot of the section line moves with the face velocity.
    #[test]
    fn face_velocity_is_foot_derivative(p in coord(), n in coord(), t in -1.0..1.0f64) {
        let Some(l) = slice(p, n) else { return Ok(()) };
        let h = 1e-6;
        let fd = (l.foot(t + h) - l.foot(t - h)) * (0.5 / h);
        prop_assert!((fd - l.velocity()).norm() < 1e-6 * (1.0 + l.velocity().norm()));
        prop_assert!(l.distance(l.foot(t), t).abs() < 1e-9);
    }

    /// Crossing point velocity against a central difference of the crossing.
    #[test]
    fn vertex_velocity_is_crossing_derivative(p1 in coord(), n1 in coord(), p2 in coord(), n2 in coord(), t in -1.0..1.0f64) {
        let (Some(a), Some(b)) = (slice(p1, n1), slice(p2, n2)) else { return Ok(()) };
        if a.normal.cross(b.normal).abs() < 0.2 {
            return Ok(());
        }
        let h = 1e-6;
        let fd = (a.meet(&b, t + h).unwrap() - a.meet(&b, t - h).unwrap()) * (0.5 / h);
        let w = vertex_velocity(&a, &b).unwrap();
        prop_assert!((fd - w).norm() < 1e-5 * (1.0 + w.norm()));
        let g = vertex_velocity_gram(a.velocity(), b.velocity());
        if let Ok(g) = g {
            prop_assert!((g - w).norm() < 1e-8 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn wedge_angle_range_and_symmetry(seed in any::<u64>()) {
        let mut rng = StreamKey::from_seed(seed).stream();
        let w = random_wedge(&mut rng);
        let Ok(a) = w.angle() else { return Ok(()) };
        prop_assert!(a > 0.0 && a < 2.0 * PI);
        let sw = Wedge { direction: w.direction, sides: [w.sides[1], w.sides[0]] };
        prop_assert!((sw.angle().unwrap() - a).abs() < 1e-9);
        let flipped = Wedge { direction: -w.direction, ..w };
        prop_assert!((flipped.angle().unwrap() - a).abs() < 1e-9);
    }
}

#[test]
fn time_parallel_plane_has_no_slice_line() {
    let p = Plane::through(Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0)).unwrap();
    assert!(SliceLine::from_plane(&p).is_err());
    assert!(face_velocity(&p).is_err());
}

#[test]
fn parallel_lines_have_no_crossing_velocity() {
    let a = SliceLine::from_plane(&Plane::through(Vec3::ZERO, Vec3::new(0.3, 1.0, 0.0)).unwrap()).unwrap();
    let b = SliceLine::from_plane(&Plane::through(Vec3::new(0.0, 1.0, 0.0), Vec3::new(-0.5, 1.0, 0.0)).unwrap()).unwrap();
    assert!(vertex_velocity(&a, &b).is_err());
}
