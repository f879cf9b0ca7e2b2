use std::path::Path;
use std::process::{Command, Output};

fn polyfield(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyfield")).current_dir(dir).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

const SAMPLE_CFG: &str = "# sample run\ndomain = cube 0.7\nseed = 42\nout = run\nobj = true\n";

#[test]
fn sample_is_byte_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        std::fs::write(d.path().join("run.cfg"), SAMPLE_CFG).unwrap();
        let o = polyfield(d.path(), &["sample", "--config", "run.cfg"]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let fa = read_dir_sorted(&a.path().join("run"));
    let names: Vec<&str> = fa.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(names, ["config.json", "field.obj", "stats.jsonl"]);
    assert_eq!(fa, read_dir_sorted(&b.path().join("run")));
}

#[test]
fn seed_changes_the_sample() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("run.cfg"), SAMPLE_CFG).unwrap();
    assert!(polyfield(d.path(), &["sample", "--config", "run.cfg"]).status.success());
    let first = std::fs::read(d.path().join("run/config.json")).unwrap();
    assert!(polyfield(d.path(), &["sample", "--config", "run.cfg", "--seed", "43"]).status.success());
    assert_ne!(first, std::fs::read(d.path().join("run/config.json")).unwrap());
}

#[test]
fn sample_output_is_loadable() {
    let d = tempfile::tempdir().unwrap();
    let o = polyfield(d.path(), &["sample", "--seed", "5", "--out", "s"]);
    // no domain given
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    std::fs::write(d.path().join("c.cfg"), "domain = box 0 0 0 0.5 0.6 0.4\n").unwrap();
    let o = polyfield(d.path(), &["sample", "--config", "c.cfg", "--seed", "5", "--out", "s"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(d.path().join("s/config.json")).unwrap();
    let cfg = polyfield::fieldmodel::serial::from_json(&text).unwrap();
    let dom = polyfield::geometry::Domain::cuboid(
        polyfield::geometry::Vec3::ZERO,
        polyfield::geometry::Vec3::new(0.5, 0.6, 0.4),
    )
    .unwrap();
    assert!(polyfield::fieldmodel::validate(&cfg, &dom).is_ok());
    let stats = std::fs::read_to_string(d.path().join("s/stats.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = stats.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["record"], "header");
    assert_eq!(lines[0]["library_version"], polyfield::VERSION);
    assert_eq!(lines[1]["face_count"], cfg.faces.len());
}

#[test]
fn malformed_value_names_the_key() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("c.cfg"), "domain = cube 1\nseed = 1\nthin = fast\nout = o\n").unwrap();
    let o = polyfield(d.path(), &["chain", "--config", "c.cfg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`thin`"), "{}", stderr(&o));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn unknown_and_repeated_keys() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("a.cfg"), "domain = cube 1\nseed = 1\ncolour = red\n").unwrap();
    let o = polyfield(d.path(), &["sample", "--config", "a.cfg", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`colour`"));
    std::fs::write(d.path().join("b.cfg"), "seed = 1\nseed = 2\n").unwrap();
    let o = polyfield(d.path(), &["sample", "--config", "b.cfg", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`seed`"));
}

#[test]
fn bad_domain_and_hamiltonian() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("a.cfg"), "domain = halfspaces 1 0 0 1; -1 0 0 1\nseed = 1\n").unwrap();
    let o = polyfield(d.path(), &["sample", "--config", "a.cfg", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`domain`"));
    std::fs::write(d.path().join("b.cfg"), "domain = cube 1\nseed = 1\n").unwrap();
    let o = polyfield(d.path(), &["chain", "--config", "b.cfg", "--out", "o", "--hamiltonian", "area:-3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`hamiltonian`"));
}

#[test]
fn missing_seed() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("a.cfg"), "domain = cube 1\n").unwrap();
    let o = polyfield(d.path(), &["sample", "--config", "a.cfg", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`seed`"));
}

#[test]
fn chain_run() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("c.cfg"), "domain = cube 0.4\nseed = 8\ns_max = 20\nthin = 2\nburn_in = 4\nhamiltonian = area:0.5\n").unwrap();
    let o = polyfield(d.path(), &["chain", "--config", "c.cfg", "--out", "ch"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(d.path().join("ch/chain.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["record"], "header");
    assert_eq!(lines[0]["run_config"]["hamiltonian"], "area:0.5");
    let s: Vec<f64> = lines[1..].iter().map(|l| l["s"].as_f64().unwrap()).collect();
    assert_eq!(s, vec![4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0, 18.0, 20.0]);
    let o = polyfield(d.path(), &["chain", "--config", "c.cfg", "--out", "ch2"]);
    assert!(o.status.success());
    // the header records the output directory; the observations must agree
    let again = std::fs::read_to_string(d.path().join("ch2/chain.jsonl")).unwrap();
    assert_eq!(text.lines().skip(1).collect::<Vec<_>>(), again.lines().skip(1).collect::<Vec<_>>());
}

#[test]
fn verify_one_suite() {
    let d = tempfile::tempdir().unwrap();
    let o = polyfield(d.path(), &["verify", "--seed", "1", "--suite", "prop1", "--replicates", "2000", "--out", "v"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(d.path().join("v/reports.jsonl")).unwrap();
    let reports: Vec<serde_json::Value> =
        text.lines().skip(1).map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r["pass"] == true && r["suite"] == "prop1"));
    let o = polyfield(d.path(), &["verify", "--seed", "1", "--suite", "prop2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`suite`"));
}

#[test]
fn export_serialized_configuration() {
    let d = tempfile::tempdir().unwrap();
    let empty = polyfield::fieldmodel::serial::to_json(&polyfield::fieldmodel::PolyConfig::empty());
    std::fs::write(d.path().join("empty.json"), empty).unwrap();
    let o = polyfield(d.path(), &["export", "--seed", "0", "--input", "empty.json", "--out", "e"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let obj = std::fs::read_to_string(d.path().join("e/field.obj")).unwrap();
    assert!(obj.lines().all(|l| l.starts_with('#')));

    std::fs::write(d.path().join("c.cfg"), "domain = cube 0.8\nseed = 3\nout = s\nobj = true\n").unwrap();
    assert!(polyfield(d.path(), &["sample", "--config", "c.cfg"]).status.success());
    let o = polyfield(d.path(), &["export", "--seed", "3", "--input", "s/config.json", "--out", "e2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let strip = |s: String| s.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect::<String>();
    assert_eq!(
        strip(std::fs::read_to_string(d.path().join("e2/field.obj")).unwrap()),
        strip(std::fs::read_to_string(d.path().join("s/field.obj")).unwrap())
    );
}
