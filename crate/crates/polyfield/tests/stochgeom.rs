use polyfield::geometry::{intersect_plane_domain, Domain, Vec3};
use polyfield::stochgeom::*;
use polyfield::verify::{mean_se, tetrahedron};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn same_key_same_stream() {
    let k = StreamKey::from_seed(7).child(&[1, 2, 3]);
    let a: Vec<u64> = (0..100).scan(k.stream(), |r, _| Some(r.next_word())).collect();
    let b: Vec<u64> = (0..100).scan(k.stream(), |r, _| Some(r.next_word())).collect();
    assert_eq!(a, b);
    let c: Vec<u64> = (0..100).scan(StreamKey::from_seed(8).child(&[1, 2, 3]).stream(), |r, _| Some(r.next_word())).collect();
    assert_ne!(a, c);
}

#[test]
fn random_access_matches_sequential() {
    let k = StreamKey::from_seed(3);
    let mut r = k.stream();
    let seq: Vec<u64> = (0..10).map(|_| r.next_word()).collect();
    for (i, w) in seq.iter().enumerate() {
        assert_eq!(RngStream::at(k, i as u64).next_word(), *w);
    }
}

/// For three independent uniform unit vectors, E|det| = pi/8 (the Gaussian
/// determinant factorizes into chi means).
#[test]
fn vertex_frame_acceptance_rate() {
    let mut rng = StreamKey::from_seed(11).stream();
    let n = 200_000;
    let tries: Vec<f64> = (0..n).map(|_| sample_vertex_frame_counted(&mut rng).1 as f64).collect();
    let (m, se) = mean_se(&tries);
    assert!((m - 8.0 / PI).abs() < 4.0 * se, "{m} +- {se}");
}

/// Under density |<n, d>| the mean of |<n, d>| is E[c^2] / E|c| = 2/3.
#[test]
fn line_hitting_normals() {
    let mut rng = StreamKey::from_seed(12).stream();
    let d = Vec3::new(1.0, 2.0, -2.0).normalized();
    let xs: Vec<f64> = (0..200_000).map(|_| sample_normal_hitting_line(d, &mut rng).dot(d).abs()).collect();
    let (m, se) = mean_se(&xs);
    assert!((m - 2.0 / 3.0).abs() < 4.0 * se, "{m} +- {se}");
}

#[test]
fn sphere_is_centered() {
    let mut rng = StreamKey::from_seed(13).stream();
    let n = 100_000;
    let mut s = Vec3::ZERO;
    for _ in 0..n {
        let u = uniform_sphere(&mut rng);
        assert!((u.norm() - 1.0).abs() < 1e-12);
        s = s + u;
    }
    // each coordinate has variance 1/3
    let tol = 4.0 * (n as f64 / 3.0).sqrt();
    assert!(s.x.abs() < tol && s.y.abs() < tol && s.z.abs() < tol);
}

#[test]
fn plane_count_is_poisson_kappa() {
    let d = tetrahedron(1.2);
    let k = kappa(&d);
    let counts: Vec<f64> = (0..20_000u64)
        .map(|i| sample_hitting_planes(&d, &mut StreamKey::from_seed(14).child(&[i]).stream()).len() as f64)
        .collect();
    let (m, se) = mean_se(&counts);
    assert!((m - k).abs() < 4.0 * se);
    let var = counts.iter().map(|c| (c - m) * (c - m)).sum::<f64>() / (counts.len() - 1) as f64;
    assert!((var / m - 1.0).abs() < 0.05, "dispersion {}", var / m);
}

#[test]
fn constants() {
    assert_eq!(I1, PI);
    assert!((I3 - PI.powi(3) / 4.0).abs() < 1e-12);
    assert!((I4 - PI.powi(4) / 6.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hitting_planes_hit(seed in any::<u64>(), a in 0.1..3.0f64) {
        let d = Domain::cube(a).unwrap();
        let mut rng = StreamKey::from_seed(seed).stream();
        for _ in 0..20 {
            let p = sample_plane_hitting(&d, &mut rng);
            prop_assert!(intersect_plane_domain(&p, &d).is_some());
        }
    }

    /// The hit measure scales linearly with the domain.
    #[test]
    fn kappa_scales_linearly(a in 0.1..5.0f64) {
        let k1 = kappa(&Domain::cube(1.0).unwrap());
        prop_assert!((kappa(&Domain::cube(a).unwrap()) - a * k1).abs() < 1e-9 * a);
    }

    #[test]
    fn exponential_and_uniform_ranges(seed in any::<u64>()) {
        let mut rng = StreamKey::from_seed(seed).stream();
        for _ in 0..100 {
            let u = rng.uniform();
            prop_assert!((0.0..1.0).contains(&u));
            let o = rng.open01();
            prop_assert!(o > 0.0 && o < 1.0);
            prop_assert!(rng.exponential(2.0) > 0.0);
            prop_assert!(rng.below(7) < 7);
        }
    }
}
