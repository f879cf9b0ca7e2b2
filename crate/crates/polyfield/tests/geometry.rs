use polyfield::geometry::*;
use polyfield::verify::{rotate, rotation};
use proptest::prelude::*;
use std::f64::consts::PI;

fn unit(v: (f64, f64, f64)) -> Option<Vec3> {
    let v = Vec3::new(v.0, v.1, v.2);
    (v.norm() > 0.1).then(|| v.normalized())
}

fn coord() -> impl Strategy<Value = (f64, f64, f64)> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn chart_roundtrip(p in coord(), n in coord()) {
        let Some(n) = unit(n) else { return Ok(()) };
        let pl = Plane::through(Vec3::new(p.0, p.1, p.2), n).unwrap();
        let (u, rho) = pl.chart();
        prop_assert!(rho >= 0.0);
        let back = plane_from_chart(u, rho).unwrap();
        prop_assert!(back.coincides(&pl, 1.0));
        prop_assert!(back.signed_distance(Vec3::new(p.0, p.1, p.2)).abs() < 1e-12);
    }

    #[test]
    fn triple_point_is_on_all_planes(a in coord(), b in coord(), c in coord(), x in coord()) {
        let (Some(a), Some(b), Some(c)) = (unit(a), unit(b), unit(c)) else { return Ok(()) };
        if Vec3::triple(a, b, c).abs() < 0.05 {
            return Ok(());
        }
        let x = Vec3::new(x.0, x.1, x.2);
        let ps = [Plane::through(x, a).unwrap(), Plane::through(x, b).unwrap(), Plane::through(x, c).unwrap()];
        let t = triple_point(&ps[0], &ps[1], &ps[2]).unwrap();
        prop_assert!(t.dist(x) < 1e-9);
        let l = line_of(&ps[0], &ps[1]).unwrap();
        for s in [-1.0, 0.3, 2.0] {
            prop_assert!(ps[0].signed_distance(l.at(s)).abs() < 1e-9);
            prop_assert!(ps[1].signed_distance(l.at(s)).abs() < 1e-9);
        }
    }

    /// Central sections of the unit cube have area in [1, sqrt 2].
    #[test]
    fn central_cube_sections(n in coord()) {
        let Some(n) = unit(n) else { return Ok(()) };
        let d = Domain::cube(1.0).unwrap();
        let pl = Plane::through(d.center(), n).unwrap();
        let a = intersect_plane_domain(&pl, &d).unwrap().area();
        prop_assert!(a >= 1.0 - 1e-9 && a <= 2f64.sqrt() + 1e-9, "area {}", a);
    }

    #[test]
    fn clipped_chords_end_on_the_boundary(p in coord(), v in coord()) {
        let Some(v) = unit(v) else { return Ok(()) };
        let d = Domain::cube(1.0).unwrap();
        let p = Vec3::new(0.5 + 0.4 * p.0, 0.5 + 0.4 * p.1, 0.5 + 0.4 * p.2);
        let (s0, s1) = d.clip_line(p, v).unwrap();
        prop_assert!(s0 < 0.0 && s1 > 0.0);
        prop_assert!(d.depth(p + v * s0).abs() < 1e-9);
        prop_assert!(d.depth(p + v * s1).abs() < 1e-9);
        prop_assert!(d.contains(p + v * (0.5 * (s0 + s1))));
    }

    #[test]
    fn rotated_cube_keeps_volume(axis in coord(), angle in 0.0..(2.0 * PI), a in 0.2..2.0f64) {
        let Some(axis) = unit(axis) else { return Ok(()) };
        let r = rotation(axis, angle);
        let hs: Vec<Halfspace> = Domain::cube(a).unwrap().input_halfspaces().iter()
            .map(|h| Halfspace::new(rotate(&r, h.normal), h.offset))
            .collect();
        let d = build_domain(&hs).unwrap();
        prop_assert!((d.volume() - a * a * a).abs() < 1e-9 * a * a * a);
        prop_assert_eq!(d.vertices().len(), 8);
        prop_assert_eq!(d.edges().len(), 12);
        prop_assert_eq!(d.facets().len(), 6);
    }

    /// A polytope circumscribed about the unit ball contains it.
    #[test]
    fn circumscribed_polytope_contains_ball(ns in prop::collection::vec(coord(), 12..30)) {
        let mut hs: Vec<Halfspace> = ns.iter().filter_map(|&n| unit(n)).map(|n| Halfspace::new(n, 1.0)).collect();
        for e in [Vec3::new(1.0, 1.0, 1.0), Vec3::new(-1.0, 1.0, 1.0), Vec3::new(1.0, -1.0, 1.0), Vec3::new(1.0, 1.0, -1.0),
                  Vec3::new(-1.0, -1.0, -1.0), Vec3::new(1.0, -1.0, -1.0), Vec3::new(-1.0, 1.0, -1.0), Vec3::new(-1.0, -1.0, 1.0)] {
            hs.push(Halfspace::new(e.normalized(), 1.0));
        }
        let d = build_domain(&hs).unwrap();
        prop_assert!(d.volume() >= 4.0 * PI / 3.0);
        prop_assert!(d.volume() <= 4.0 / 3.0 * 3f64.powf(1.5) + 1e-9);
        for f in d.facets() {
            let c = f.cycle.iter().fold(Vec3::ZERO, |s, &i| s + d.vertices()[i]) / f.cycle.len() as f64;
            prop_assert!(d.depth(c).abs() < 1e-9);
        }
    }
}

#[test]
fn box_volume_and_support() {
    let d = Domain::cuboid(Vec3::new(-1.0, 0.0, 2.0), Vec3::new(1.0, 3.0, 2.5)).unwrap();
    assert!((d.volume() - 3.0).abs() < 1e-12);
    assert!((d.support(Vec3::new(0.0, 1.0, 0.0)) - 3.0).abs() < 1e-12);
    assert_eq!(d.t_range(), (-1.0, 1.0));
}

#[test]
fn bad_halfspaces_are_rejected() {
    assert!(build_domain(&[Halfspace::new(Vec3::ZERO, 1.0); 4]).is_err());
    assert!(Domain::cube(-1.0).is_err());
}
