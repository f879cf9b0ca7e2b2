use polyfield::evolution::{resolve, resolve_with, simulate_field, BirthPackage, EntryEvent, EntryKind, EvolutionParams};
use polyfield::fieldmodel::serial::{from_json, to_json};
use polyfield::fieldmodel::*;
use polyfield::geometry::{Domain, Plane, Vec3};
use polyfield::kinematics::{stable_ie, IeOutcome, SliceLine};
use polyfield::stochgeom::{uniform_sphere, RngStream, StreamKey, I3, I4};
use polyfield::Error;
use std::f64::consts::PI;

fn cube() -> Domain {
    Domain::cube(1.0).unwrap()
}

fn tri_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    0.5 * (b - a).cross(c - a).norm()
}

/// Angle of a wedge by brute-force quadrature of the unstable edge-birth
/// fraction over plane normals, weighted by |<n, d>|.
fn quadrature_angle(d: Vec3, sides: [Vec3; 2]) -> f64 {
    let d = if d.x < 0.0 { -d } else { d };
    let d = d.normalized();
    let ray = |h: Vec3| {
        let u = (h - d * (h.x / d.x)).spatial();
        u.normalized()
    };
    let (ua, ub) = (ray(sides[0]), ray(sides[1]));
    let la = SliceLine::from_plane(&Plane::through(Vec3::ZERO, d.cross(sides[0])).unwrap()).unwrap();
    let lb = SliceLine::from_plane(&Plane::through(Vec3::ZERO, d.cross(sides[1])).unwrap()).unwrap();
    let (nt, np) = (600, 1200);
    let (mut tot, mut bad) = (0.0, 0.0);
    for i in 0..nt {
        let th = PI * (i as f64 + 0.5) / nt as f64;
        for j in 0..np {
            let ph = 2.0 * PI * (j as f64 + 0.5) / np as f64;
            let n = Vec3::new(th.cos(), th.sin() * ph.cos(), th.sin() * ph.sin());
            let w = n.dot(d).abs() * th.sin();
            let Ok(pl) = Plane::through(Vec3::ZERO, n) else { continue };
            let Ok(lc) = SliceLine::from_plane(&pl) else { continue };
            let Ok(o) = stable_ie(&la, &lb, ua, ub, &lc) else { continue };
            tot += w;
            if o == IeOutcome::Unstable {
                bad += w;
            }
        }
    }
    2.0 * PI * bad / tot
}

fn cone_planes() -> [Plane; 3] {
    let c = Vec3::new(0.25, 0.45, 0.55);
    [
        Plane::through(c, Vec3::new(0.5, 1.0, 0.2)).unwrap(),
        Plane::through(c, Vec3::new(0.4, -0.7, 0.8)).unwrap(),
        Plane::through(c, Vec3::new(0.6, -0.3, -1.0)).unwrap(),
    ]
}

#[test]
fn empty_energy_is_the_volume_term() {
    let e = energy(&PolyConfig::empty(), &cube()).unwrap();
    assert!((e - PI.powi(4) / 6.0).abs() < 1e-12);
    assert!((e - 16.2348).abs() < 1e-4);
}

#[test]
fn cone_energy_matches_raw_recomputation() {
    let d = cube();
    let cfg = stable_cone(&d, cone_planes()).unwrap();
    let mut edges = 0.0;
    for e in &cfg.internal_edges {
        let (p, q) = (cfg.vertices[e.ends[0]].point, cfg.vertices[e.ends[1]].point);
        edges += 0.5 * (2.0 * PI - quadrature_angle(q - p, e.sides)) * (q - p).norm();
    }
    let mut area = 0.0;
    for f in &cfg.faces {
        let c = &f.polygon.outer;
        for i in 1..c.len() - 1 {
            area += tri_area(c[0], c[i], c[i + 1]);
        }
    }
    let oracle = edges + I3 * area + I4;
    let e = energy(&d, &cfg);
    // quadrature resolution bounds the agreement
    assert!((e - oracle).abs() < 2e-3 * oracle, "{e} vs {oracle}");

    fn energy(d: &Domain, c: &PolyConfig) -> f64 {
        polyfield::fieldmodel::energy(c, d).unwrap()
    }
}

#[test]
fn energy_difference_drops_the_constant() {
    let d = cube();
    let cfg = stable_cone(&d, cone_planes()).unwrap();
    let t = energy_terms(&cfg, &d).unwrap();
    let diff = energy(&cfg, &d).unwrap() - energy(&PolyConfig::empty(), &d).unwrap();
    assert!((diff - (t.edges + t.faces)).abs() < 1e-12);
    let big = Domain::cube(2.0).unwrap();
    let cfg2 = stable_cone(&big, cone_planes()).unwrap();
    let t2 = energy_terms(&cfg2, &big).unwrap();
    assert!((t2.volume - 8.0 * t.volume).abs() < 1e-9);
}

#[test]
fn edge_terms_are_bounded() {
    let d = Domain::cube(0.6).unwrap();
    for seed in 0..20 {
        let (cfg, _) = simulate_field(&d, &[], &mut RngStream::from_seed(seed)).unwrap();
        for e in &cfg.internal_edges {
            let w = polyfield::kinematics::Wedge {
                direction: cfg.vertices[e.ends[1]].point - cfg.vertices[e.ends[0]].point,
                sides: e.sides,
            };
            let a = w.angle().unwrap();
            assert!((0.0..=2.0 * PI).contains(&(2.0 * PI - a)));
        }
    }
}

#[test]
fn invalid_indices_are_an_input_error() {
    let d = cube();
    let mut cfg = stable_cone(&d, cone_planes()).unwrap();
    cfg.internal_edges[0].ends[1] = 99;
    assert!(matches!(energy(&cfg, &d), Err(Error::Input(_))));
}

/// A package whose stream produces no angle or edge births is resolved to
/// the stable cone of its three planes.
#[test]
fn single_package_is_the_static_cone() {
    let d = Domain::cube(0.3).unwrap();
    let mut found = 0;
    for i in 0..200u64 {
        let site = Vec3::new(0.05 + 0.001 * i as f64, 0.15, 0.15);
        let p = BirthPackage { site, key: StreamKey::from_seed(1000 + i) };
        let (cfg, st) = resolve_with(&d, &[], &[p], EvolutionParams::default()).unwrap();
        if st.ia_births + st.ie_births > 0 {
            continue;
        }
        found += 1;
        let oracle = stable_cone(&d, p.planes().unwrap()).unwrap();
        let (a, b) = (stats(&cfg), stats(&oracle));
        assert_eq!(a.face_count, 3);
        assert_eq!(a.internal_edge_count, 3);
        assert_eq!(a.internal_vertex_count, 1);
        assert!((a.total_area - b.total_area).abs() < 1e-9, "{} {}", a.total_area, b.total_area);
        assert!((a.total_edge_length - b.total_edge_length).abs() < 1e-9);
        let (ea, eb) = (energy(&cfg, &d).unwrap(), energy(&oracle, &d).unwrap());
        assert!((ea - eb).abs() < 1e-9);
        assert!(validate(&oracle, &d).is_ok());
        assert!(entry_events(&cfg, &d).unwrap().is_empty());
        if found == 5 {
            break;
        }
    }
    assert!(found >= 1);
}

#[test]
fn stats_of_empty_and_cone() {
    let s = stats(&PolyConfig::empty());
    assert_eq!(s, ConfigStats::default());
    let d = cube();
    let s = stats(&stable_cone(&d, cone_planes()).unwrap());
    assert_eq!((s.face_count, s.internal_edge_count, s.internal_vertex_count), (3, 3, 1));
    assert_eq!(s.boundary_vertex_count, 3);
}

#[test]
fn stats_are_invariant_under_rigid_motion() {
    // translation plus a rotation of the spatial coordinates
    let (c, s) = (0.6f64.cos(), 0.6f64.sin());
    let mv = |x: Vec3| Vec3::new(x.x + 0.7, c * x.y - s * x.z - 1.1, s * x.y + c * x.z + 2.0);
    let rot = |n: Vec3| Vec3::new(n.x, c * n.y - s * n.z, s * n.y + c * n.z);
    let d0 = cube();
    let hs: Vec<_> = d0
        .facets()
        .iter()
        .map(|f| {
            let n = rot(f.halfspace.normal);
            let p = mv(f.halfspace.normal * f.halfspace.offset);
            polyfield::geometry::Halfspace::new(n, n.dot(p))
        })
        .collect();
    let d1 = polyfield::geometry::build_domain(&hs).unwrap();
    let apex = Vec3::new(0.25, 0.45, 0.55);
    let p0 = cone_planes();
    let p1 = p0.map(|p| Plane::through(mv(apex), rot(p.u)).unwrap());
    let (a, b) = (stats(&stable_cone(&d0, p0).unwrap()), stats(&stable_cone(&d1, p1).unwrap()));
    assert_eq!(a.face_count, b.face_count);
    assert!((a.total_area - b.total_area).abs() < 1e-9);
    assert!((a.total_edge_length - b.total_edge_length).abs() < 1e-9);
}

#[test]
fn serialization_roundtrip() {
    let d = Domain::cube(0.6).unwrap();
    for seed in 0..10 {
        let (cfg, _) = simulate_field(&d, &[], &mut RngStream::from_seed(seed)).unwrap();
        let s = to_json(&cfg);
        let back = from_json(&s).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(to_json(&back), s);
    }
    assert!(from_json("{\"format\":\"other\",\"version\":1,\"config\":{}}").is_err());
}

#[test]
fn simulated_fields_have_no_entries() {
    let d = Domain::cube(0.6).unwrap();
    for seed in 0..10 {
        let (cfg, _) = simulate_field(&d, &[], &mut RngStream::from_seed(seed)).unwrap();
        assert!(entry_events(&cfg, &d).unwrap().is_empty());
    }
}

/// First random angle entry at `x` that the evolution accepts.
pub fn find_ia_entry(d: &Domain, x: Vec3, seed: u64) -> EntryEvent {
    let mut rng = RngStream::from_seed(seed);
    loop {
        let planes = vec![Plane::through(x, uniform_sphere(&mut rng)).unwrap(), Plane::through(x, uniform_sphere(&mut rng)).unwrap()];
        let e = EntryEvent::new(EntryKind::Ia, x, planes).unwrap();
        if resolve(d, std::slice::from_ref(&e), &[]).is_ok() {
            return e;
        }
    }
}

pub fn find_ie_entry(d: &Domain, x: Vec3, seed: u64) -> EntryEvent {
    let mut rng = RngStream::from_seed(seed);
    loop {
        let e = EntryEvent::new(EntryKind::Ie, x, vec![Plane::through(x, uniform_sphere(&mut rng)).unwrap()]).unwrap();
        if resolve(d, std::slice::from_ref(&e), &[]).is_ok() {
            return e;
        }
    }
}

#[test]
fn angle_entry_roundtrip() {
    let d = cube();
    let x = Vec3::new(0.3, 1.0, 0.4);
    for seed in 0..5 {
        let e = find_ia_entry(&d, x, seed);
        for s in 0..5 {
            let (cfg, _) = simulate_field(&d, std::slice::from_ref(&e), &mut RngStream::from_seed(s)).unwrap();
            assert!(validate(&cfg, &d).is_ok());
            let got = entry_events(&cfg, &d).unwrap();
            assert_eq!(got.len(), 1, "{got:?}");
            assert!(got[0].approx_eq(&e, d.scale()));
        }
    }
}

#[test]
fn edge_entry_roundtrip() {
    let d = cube();
    let x = Vec3::new(0.35, 1.0, 1.0);
    for seed in 0..5 {
        let e = find_ie_entry(&d, x, seed);
        for s in 0..5 {
            let (cfg, _) = simulate_field(&d, std::slice::from_ref(&e), &mut RngStream::from_seed(s)).unwrap();
            assert!(validate(&cfg, &d).is_ok());
            let got = entry_events(&cfg, &d).unwrap();
            assert_eq!(got.len(), 1, "{got:?}");
            assert!(got[0].approx_eq(&e, d.scale()));
        }
    }
}
