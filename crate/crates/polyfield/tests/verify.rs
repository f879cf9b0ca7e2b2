use polyfield::geometry::Domain;
use polyfield::stochgeom::{kappa, StreamKey};
use polyfield::verify::*;

fn key(n: u64) -> StreamKey {
    StreamKey::from_seed(0xbeef).child(&[n])
}

/// A check judged against a reference 25% off must fail.
fn detects_shift(r: &TestReport) {
    assert!(r.pass, "{}", r.to_json_line());
    assert!(!r.with_reference(1.25 * r.reference).pass, "{} accepts a 25% shift", r.name);
    assert!(!r.with_reference(0.75 * r.reference).pass, "{} accepts a -25% shift", r.name);
}

#[test]
fn intensity_checks_detect_shifts() {
    detects_shift(&check_i1(3.0, 4000, key(1)).unwrap());
    detects_shift(&check_i2(1.0, 4000, key(2)).unwrap());
    detects_shift(&check_i3(1.0, 4000, key(3)).unwrap());
    detects_shift(&check_i4(1.0, 4000, key(4)).unwrap());
}

#[test]
fn zero_length_segment_is_never_hit() {
    let r = check_i1(0.0, 100, key(5)).unwrap();
    assert_eq!(r.estimate, 0.0);
    assert!(r.pass);
    assert!(check_i1(-1.0, 100, key(5)).is_err());
    assert!(check_i1(1.0, 1, key(5)).is_err());
}

#[test]
fn doubling_the_segment_doubles_the_hits() {
    let a = check_i1(2.0, 8000, key(6)).unwrap();
    let b = check_i1(4.0, 8000, key(7)).unwrap();
    let diff = b.estimate - 2.0 * a.estimate;
    let se = (b.std_error.powi(2) + 4.0 * a.std_error.powi(2)).sqrt();
    assert!(diff.abs() < 4.0 * se, "{diff} +- {se}");
}

#[test]
fn hit_measure_detects_shifts() {
    let d = tetrahedron(1.5);
    let r = check_kappa("tetrahedron", &d, 1_000_000, key(8)).unwrap();
    assert!(r.pass);
    assert!((r.reference - kappa(&d)).abs() < 1e-15);
    assert!(!r.with_reference(1.25 * r.reference).pass);
}

#[test]
fn empty_probability_detects_shifts() {
    let r = check_empty_probability(&Domain::cube(0.3).unwrap(), 3000, key(9)).unwrap();
    detects_shift(&r);
}

#[test]
fn partition_identity() {
    let r = check_partition_truncated(&Domain::cube(0.1).unwrap(), 100_000, key(10)).unwrap();
    detects_shift(&r);
    assert!(r.details["cone_stratum"] >= 0.0);
    assert!(r.details["empty_stratum"] > 0.0);
}

#[test]
fn truncation_bound_shrinks_with_the_domain() {
    let (b1, _, _) = partition_truncation_bound(&Domain::cube(0.1).unwrap(), 5000, key(11)).unwrap();
    let (b2, _, _) = partition_truncation_bound(&Domain::cube(0.05).unwrap(), 5000, key(11)).unwrap();
    assert!(b2 < b1, "{b2} >= {b1}");
    let r = check_partition_truncated(&Domain::cube(0.05).unwrap(), 50_000, key(12)).unwrap();
    assert!(r.pass);
    assert!(r.tolerance < 0.5 * b1);
}

#[test]
fn gram_form_agrees() {
    let r = check_vertex_velocity_forms(20_000, key(13));
    assert!(r.pass, "{}", r.to_json_line());
}

#[test]
fn octants() {
    for law in [OctantLaw::It, OctantLaw::Ia] {
        let r = check_octants(law, 2000, key(14)).unwrap();
        assert!(r.pass, "{}", r.to_json_line());
        assert_eq!(r.details["matches_newborn_normals"], 1.0);
    }
}

#[test]
fn ie_fraction_detects_shifts() {
    for r in check_ie_fraction(3, 100_000, key(15)).unwrap() {
        assert!(r.pass, "{}", r.to_json_line());
        let off = r.reference + 0.05;
        assert!(!r.with_reference(off).pass);
    }
}

#[test]
fn ks_statistic_and_critical_values() {
    let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
    let b: Vec<f64> = a.iter().map(|x| x + 0.1).collect();
    assert!((ks_statistic(&a, &b) - 0.1).abs() < 2e-3);
    assert_eq!(ks_statistic(&a, &a), 0.0);
    assert!(ks_critical(0.01, 1000, 1000) > ks_critical(0.05, 1000, 1000));
    assert!(ks_critical(0.05, 4000, 4000) < ks_critical(0.05, 1000, 1000));
    // large-sample 5% point of the Kolmogorov distribution
    assert!((kolmogorov_q(1.3581) - 0.05).abs() < 1e-3);
}

#[test]
fn reports_serialize() {
    let r = check_i2(0.5, 100, key(16)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&r.to_json_line()).unwrap();
    for k in ["name", "samples", "estimate", "std_error", "reference", "provenance", "tolerance", "pass", "wall_ms"] {
        assert!(v.get(k).is_some(), "{k}");
    }
    let table = summary_table(&[r.clone(), r.with_reference(100.0)]);
    assert_eq!(table.lines().count(), 3);
    assert!(table.contains("FAIL"));
}

#[test]
fn unknown_suite() {
    assert!(run_suite("nope", SuiteOptions { replicates: 10, seed: 0 }).is_err());
}

#[test]
fn small_suites_pass() {
    for s in ["prop1", "empty", "structural"] {
        for r in run_suite(s, SuiteOptions { replicates: 1000, seed: 3 }).unwrap() {
            assert!(r.pass, "{}", r.to_json_line());
        }
    }
}
