//! Acceptance run: one line per criterion, nonzero exit if any fails.
//!
//! Statistical checks run at the full sizes (10^4 replicates as the base
//! scale). Runtime budgets are checked against wall time of each criterion.

use polyfield::verify::{run_suite, summary_table, SuiteOptions, TestReport};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

const SEED: u64 = 1;
const REPLICATES: u64 = 10_000;

struct Outcome {
    pass: bool,
    summary: String,
}

fn suite(name: &str) -> Vec<TestReport> {
    match run_suite(name, SuiteOptions { replicates: REPLICATES, seed: SEED }) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("suite {name} failed to run: {e}");
            Vec::new()
        }
    }
}

fn all_pass(reports: &[TestReport]) -> bool {
    !reports.is_empty() && reports.iter().all(|r| r.pass)
}

fn counted(reports: &[TestReport]) -> String {
    format!("{}/{} checks pass", reports.iter().filter(|r| r.pass).count(), reports.len())
}

fn within(elapsed: Duration, budget_s: u64) -> (bool, String) {
    (elapsed.as_secs_f64() < budget_s as f64, format!("{:.1}s of {}s", elapsed.as_secs_f64(), budget_s))
}

fn statistical(name: &str, budget_s: u64, printed: &mut Vec<TestReport>) -> Outcome {
    let t0 = Instant::now();
    let r = suite(name);
    let (fast, time) = within(t0.elapsed(), budget_s);
    let out = Outcome { pass: all_pass(&r) && fast, summary: format!("{}, {time}", counted(&r)) };
    printed.extend(r);
    out
}

fn equivalence(printed: &mut Vec<TestReport>) -> Outcome {
    let t0 = Instant::now();
    let r = suite("equivalence");
    let (fast, time) = within(t0.elapsed(), 30 * 60);
    let (control, mutated): (Vec<_>, Vec<_>) = r.iter().cloned().partition(|r| !r.name.contains("x2"));
    let detected = mutated.iter().any(|r| !r.pass);
    let out = Outcome {
        pass: all_pass(&control) && !mutated.is_empty() && detected && fast,
        summary: format!(
            "{} on the field, mutation control {}, {time}",
            counted(&control),
            if detected { "rejected" } else { "NOT rejected" }
        ),
    };
    printed.extend(r);
    out
}

fn cli(dir: &Path, args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_polyfield"))
        .current_dir(dir)
        .args(args)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .map(|it| {
            it.flatten()
                .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap_or_default()))
                .collect()
        })
        .unwrap_or_default();
    v.sort();
    v
}

/// Full sample, chain and export runs in two fresh working directories
/// compared byte for byte.
fn cli_determinism() -> bool {
    let cfg = "domain = box 0 0 0 0.8 0.7 0.6\nseed = 2718\nobj = true\ns_max = 40\nthin = 4\nkeep_configs = true\n";
    let mut trees = Vec::new();
    for _ in 0..2 {
        let Ok(d) = tempfile::tempdir() else { return false };
        if std::fs::write(d.path().join("run.cfg"), cfg).is_err() {
            return false;
        }
        let ok = cli(d.path(), &["sample", "--config", "run.cfg", "--out", "sample"])
            && cli(d.path(), &["chain", "--config", "run.cfg", "--out", "chain"])
            && cli(d.path(), &["export", "--config", "run.cfg", "--out", "export"]);
        if !ok {
            return false;
        }
        trees.push(["sample", "chain", "export"].map(|s| read_tree(&d.path().join(s))));
    }
    trees[0].iter().all(|t| !t.is_empty()) && trees[0] == trees[1]
}

fn structural(printed: &mut Vec<TestReport>) -> Outcome {
    let t0 = Instant::now();
    let r = suite("structural");
    let det = cli_determinism();
    let out = Outcome {
        pass: all_pass(&r) && det,
        summary: format!(
            "{}, CLI runs {}, {:.1}s",
            counted(&r),
            if det { "byte-identical" } else { "NOT byte-identical" },
            t0.elapsed().as_secs_f64()
        ),
    };
    printed.extend(r);
    out
}

fn main() -> ExitCode {
    let mut reports = Vec::new();
    let criteria: Vec<(&str, Outcome)> = vec![
        ("1 plane-process intensities", statistical("prop1", 5 * 60, &mut reports)),
        ("2 hit measure", statistical("kappa", 2 * 60, &mut reports)),
        ("3 empty-field probability", statistical("empty", 2 * 60, &mut reports)),
        ("4 chain/field equivalence", equivalence(&mut reports)),
        ("5 truncated partition identity", statistical("partition", 15 * 60, &mut reports)),
        ("6 structural", structural(&mut reports)),
        ("7 kinematics", {
            let t0 = Instant::now();
            let r = suite("kinematics");
            let o = Outcome { pass: all_pass(&r), summary: format!("{}, {:.1}s", counted(&r), t0.elapsed().as_secs_f64()) };
            reports.extend(r);
            o
        }),
        ("8 chain identity and detailed balance", {
            let t0 = Instant::now();
            let r = suite("chain");
            let o = Outcome { pass: all_pass(&r), summary: format!("{}, {:.1}s", counted(&r), t0.elapsed().as_secs_f64()) };
            reports.extend(r);
            o
        }),
    ];
    print!("{}", summary_table(&reports));
    println!();
    for (name, o) in &criteria {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.summary);
    }
    if criteria.iter().all(|c| c.1.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
