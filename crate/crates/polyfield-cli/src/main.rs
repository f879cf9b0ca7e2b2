//! `polyfield`: sample fields, run birth-site chains, run the verification
//! suites and export meshes.

mod config;

use clap::{Args, Parser, Subcommand};
use config::{load_entries, resolve_config, CliError, Mode, Overrides, RunConfig};
use polyfield::evolution::simulate_field;
use polyfield::export::to_obj;
use polyfield::fieldmodel::serial::{from_json, to_json_with_meta};
use polyfield::fieldmodel::{energy, stats};
use polyfield::sampler::{hamiltonian_from_spec, run_chain, ChainOptions};
use polyfield::stochgeom::StreamKey;
use polyfield::verify::{run_suite, summary_table, SuiteOptions};
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "polyfield", version, about = "Polyhedral Markov fields: sampling, chains, verification, export")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one field and write its configuration and statistics.
    Sample(Common),
    /// Run the birth-site chain and write thinned observations.
    Chain(Common),
    /// Run verification suites; exits nonzero if any test fails.
    Verify(Common),
    /// Write an OBJ mesh of a sampled or serialized configuration.
    Export {
        #[command(flatten)]
        common: Common,
        /// Serialized configuration to convert instead of sampling.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Run configuration file (flat key = value).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Verification suite: all or a comma-separated list.
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    replicates: Option<u64>,
    #[arg(long = "s-max")]
    s_max: Option<f64>,
    #[arg(long)]
    thin: Option<f64>,
    #[arg(long = "burn-in")]
    burn_in: Option<f64>,
    /// zero, area:BETA or volume-clamp:A,B
    #[arg(long)]
    hamiltonian: Option<String>,
}

impl Common {
    fn overrides(&self, input: Option<PathBuf>) -> Overrides {
        Overrides {
            seed: self.seed,
            out: self.out.clone(),
            suite: self.suite.clone(),
            replicates: self.replicates,
            s_max: self.s_max,
            thin: self.thin,
            burn_in: self.burn_in,
            hamiltonian: self.hamiltonian.clone(),
            input,
        }
    }
}

fn provenance(rc: &RunConfig) -> Value {
    json!({ "library_version": polyfield::VERSION, "run_config": rc })
}

fn header_line(rc: &RunConfig) -> String {
    let mut h = provenance(rc);
    h["record"] = json!("header");
    h.to_string()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let p = dir.join(name);
    std::fs::write(&p, contents).map_err(|e| CliError::io(&p, e))?;
    Ok(p)
}

fn out_dir(rc: &RunConfig) -> &Path {
    rc.out.as_deref().expect("validated")
}

fn field_rng(rc: &RunConfig) -> polyfield::stochgeom::RngStream {
    StreamKey::from_seed(rc.seed).child(&[0x5a]).stream()
}

fn cmd_sample(rc: &RunConfig) -> Result<bool, CliError> {
    let d = rc.domain.as_ref().expect("validated").build()?;
    let entries = load_entries(rc)?;
    let (cfg, packages) = simulate_field(&d, &entries, &mut field_rng(rc))?;
    let dir = out_dir(rc);
    let mut meta = provenance(rc);
    meta["package_count"] = json!(packages.len());
    write_file(dir, "config.json", &to_json_with_meta(&cfg, meta))?;
    let st = stats(&cfg);
    let line = json!({
        "record": "stats",
        "face_count": st.face_count,
        "internal_edge_count": st.internal_edge_count,
        "boundary_edge_count": st.boundary_edge_count,
        "internal_vertex_count": st.internal_vertex_count,
        "boundary_vertex_count": st.boundary_vertex_count,
        "total_area": st.total_area,
        "total_edge_length": st.total_edge_length,
        "energy": energy(&cfg, &d)?,
        "package_count": packages.len(),
    });
    write_file(dir, "stats.jsonl", &format!("{}\n{}\n", header_line(rc), line))?;
    if rc.obj {
        write_file(dir, "field.obj", &to_obj(&cfg, &provenance(rc).to_string()))?;
    }
    println!("{line}");
    Ok(true)
}

fn cmd_chain(rc: &RunConfig) -> Result<bool, CliError> {
    let d = rc.domain.as_ref().expect("validated").build()?;
    let entries = load_entries(rc)?;
    let h = rc.hamiltonian.as_deref().map(hamiltonian_from_spec).transpose()?;
    let mut opts = ChainOptions::new(rc.s_max, rc.thin, rc.seed);
    opts.burn_in = rc.burn_in;
    opts.keep_configs = rc.keep_configs;
    let obs = run_chain(&d, &entries, h.as_deref(), &opts)?;
    let mut s = header_line(rc) + "\n";
    for o in &obs {
        let mut v = serde_json::to_value(o).expect("observations serialize");
        v["record"] = json!("observation");
        s += &v.to_string();
        s.push('\n');
    }
    write_file(out_dir(rc), "chain.jsonl", &s)?;
    println!("{} observations", obs.len());
    Ok(true)
}

fn cmd_verify(rc: &RunConfig) -> Result<bool, CliError> {
    let mut all = Vec::new();
    let mut lines = header_line(rc) + "\n";
    for suite in &rc.suites {
        let reports = run_suite(suite, SuiteOptions { replicates: rc.replicates, seed: rc.seed })?;
        for r in &reports {
            let mut v = serde_json::to_value(r).expect("reports serialize");
            v["record"] = json!("report");
            v["suite"] = json!(suite);
            lines += &v.to_string();
            lines.push('\n');
        }
        all.extend(reports);
    }
    if let Some(dir) = &rc.out {
        write_file(dir, "reports.jsonl", &lines)?;
    }
    print!("{}", summary_table(&all));
    let failed = all.iter().filter(|r| !r.pass).count();
    println!("{} tests, {} failed", all.len(), failed);
    Ok(failed == 0)
}

fn cmd_export(rc: &RunConfig) -> Result<bool, CliError> {
    let cfg = match &rc.input {
        Some(p) => from_json(&std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?)?,
        None => {
            let d = rc.domain.as_ref().expect("validated").build()?;
            simulate_field(&d, &load_entries(rc)?, &mut field_rng(rc))?.0
        }
    };
    let p = write_file(out_dir(rc), "field.obj", &to_obj(&cfg, &provenance(rc).to_string()))?;
    println!("{}", p.display());
    Ok(true)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let (mode, common, input) = match cli.command {
        Command::Sample(c) => (Mode::Sample, c, None),
        Command::Chain(c) => (Mode::Chain, c, None),
        Command::Verify(c) => (Mode::Verify, c, None),
        Command::Export { common, input } => (Mode::Export, common, input),
    };
    let rc = resolve_config(mode, common.config.as_deref(), &common.overrides(input))?;
    match mode {
        Mode::Sample => cmd_sample(&rc),
        Mode::Chain => cmd_chain(&rc),
        Mode::Verify => cmd_verify(&rc),
        Mode::Export => cmd_export(&rc),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "polyfield: {e}");
            ExitCode::from(match e {
                CliError::Config { .. } => 2,
                _ => 1,
            })
        }
    }
}
