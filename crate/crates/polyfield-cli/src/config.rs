//! Run configuration: a flat `key = value` file merged with command-line
//! flags.
//!
//! Grammar, one entry per line, `#` starts a comment:
//!
//! ```text
//! domain       = cube A | box T0 Y0 Z0 T1 Y1 Z1 | halfspaces NT NY NZ C; NT NY NZ C; ...
//! seed         = unsigned 64-bit integer
//! entries      = empty | PATH           (JSON array of entry events)
//! mode         = sample | chain | verify | export
//! hamiltonian  = zero | area:BETA | volume-clamp:A,B
//! s_max        = nonnegative real
//! thin         = positive real
//! burn_in      = nonnegative real
//! replicates   = positive integer
//! suite        = all | NAME[,NAME...]
//! out          = DIR
//! obj          = true | false
//! keep_configs = true | false
//! ```
//!
//! Halfspaces are {x : <n, x> <= C} in (t, y, z) coordinates. Unknown and
//! repeated keys are errors.

use polyfield::evolution::EntryEvent;
use polyfield::geometry::{build_domain, Domain, Halfspace, Vec3};
use polyfield::sampler::hamiltonian_from_spec;
use polyfield::verify::SUITES;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: key `{key}`{}: {msg}", .line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config { key: String, line: Option<usize>, msg: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Lib(#[from] polyfield::Error),
}

impl CliError {
    pub fn key(key: &str, line: Option<usize>, msg: impl Into<String>) -> CliError {
        CliError::Config { key: key.into(), line, msg: msg.into() }
    }

    pub fn io(path: &Path, source: std::io::Error) -> CliError {
        CliError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Sample,
    Chain,
    Verify,
    Export,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Cube { side: f64 },
    Box { lo: [f64; 3], hi: [f64; 3] },
    Halfspaces { halfspaces: Vec<[f64; 4]> },
}

impl DomainSpec {
    pub fn build(&self) -> polyfield::Result<Domain> {
        match self {
            DomainSpec::Cube { side } => Domain::cube(*side),
            DomainSpec::Box { lo, hi } => Domain::cuboid(Vec3::new(lo[0], lo[1], lo[2]), Vec3::new(hi[0], hi[1], hi[2])),
            DomainSpec::Halfspaces { halfspaces } => {
                let hs: Vec<Halfspace> =
                    halfspaces.iter().map(|h| Halfspace::new(Vec3::new(h[0], h[1], h[2]), h[3])).collect();
                build_domain(&hs)
            }
        }
    }
}

/// Everything a run depends on. Embedded verbatim in every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub seed: u64,
    pub domain: Option<DomainSpec>,
    /// `None` for no entries.
    pub entries: Option<PathBuf>,
    pub hamiltonian: Option<String>,
    pub s_max: f64,
    pub thin: f64,
    pub burn_in: f64,
    pub replicates: u64,
    pub suites: Vec<String>,
    pub out: Option<PathBuf>,
    pub obj: bool,
    pub keep_configs: bool,
    /// Serialized configuration to export instead of sampling one.
    pub input: Option<PathBuf>,
}

/// Values given on the command line; they override the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub suite: Option<String>,
    pub replicates: Option<u64>,
    pub s_max: Option<f64>,
    pub thin: Option<f64>,
    pub burn_in: Option<f64>,
    pub hamiltonian: Option<String>,
    pub input: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "domain",
    "seed",
    "entries",
    "mode",
    "hamiltonian",
    "s_max",
    "thin",
    "burn_in",
    "replicates",
    "suite",
    "out",
    "obj",
    "keep_configs",
];

/// Key-value pairs with their line numbers.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, (String, usize)>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        let Some((k, v)) = s.split_once('=') else {
            let k = s.split_whitespace().next().unwrap_or(s);
            return Err(CliError::key(k, Some(line), "expected `key = value`"));
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(CliError::key(k, Some(line), format!("unknown key; known keys: {}", KEYS.join(", "))));
        }
        if map.insert(k.to_string(), (v.to_string(), line)).is_some() {
            return Err(CliError::key(k, Some(line), "repeated key"));
        }
    }
    Ok(map)
}

fn numbers(key: &str, line: Option<usize>, s: &str) -> Result<Vec<f64>, CliError> {
    s.split_whitespace()
        .map(|w| match w.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(CliError::key(key, line, format!("`{w}` is not a finite number"))),
        })
        .collect()
}

pub fn parse_domain(s: &str, line: Option<usize>) -> Result<DomainSpec, CliError> {
    let k = "domain";
    let (kind, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
    let spec = match kind {
        "cube" => match numbers(k, line, rest)?[..] {
            [a] => DomainSpec::Cube { side: a },
            _ => return Err(CliError::key(k, line, "`cube` takes one side length")),
        },
        "box" => match numbers(k, line, rest)?[..] {
            [a, b, c, d, e, f] => DomainSpec::Box { lo: [a, b, c], hi: [d, e, f] },
            _ => return Err(CliError::key(k, line, "`box` takes six numbers: t0 y0 z0 t1 y1 z1")),
        },
        "halfspaces" => {
            let mut hs = Vec::new();
            for part in rest.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                match numbers(k, line, part)?[..] {
                    [a, b, c, d] => hs.push([a, b, c, d]),
                    _ => return Err(CliError::key(k, line, format!("halfspace `{part}` needs four numbers nt ny nz c"))),
                }
            }
            DomainSpec::Halfspaces { halfspaces: hs }
        }
        _ => return Err(CliError::key(k, line, format!("unknown domain kind `{kind}`; use cube, box or halfspaces"))),
    };
    spec.build().map_err(|e| CliError::key(k, line, e.to_string()))?;
    Ok(spec)
}

fn parse_bool(key: &str, line: Option<usize>, s: &str) -> Result<bool, CliError> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::key(key, line, format!("expected true or false, got `{s}`"))),
    }
}

fn parse_real(key: &str, line: Option<usize>, s: &str, positive: bool) -> Result<f64, CliError> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && (x > 0.0 || (!positive && x == 0.0)) => Ok(x),
        _ => Err(CliError::key(key, line, format!("expected a {} real, got `{s}`", if positive { "positive" } else { "nonnegative" }))),
    }
}

fn parse_u64(key: &str, line: Option<usize>, s: &str) -> Result<u64, CliError> {
    s.parse::<u64>().map_err(|_| CliError::key(key, line, format!("expected an unsigned 64-bit integer, got `{s}`")))
}

fn check_hamiltonian(s: &str, line: Option<usize>) -> Result<String, CliError> {
    hamiltonian_from_spec(s).map_err(|e| CliError::key("hamiltonian", line, e.to_string()))?;
    Ok(s.to_string())
}

fn parse_suites(s: &str, line: Option<usize>) -> Result<Vec<String>, CliError> {
    if s == "all" {
        return Ok(SUITES.iter().map(|s| s.to_string()).collect());
    }
    let v: Vec<String> = s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
    for x in &v {
        if !SUITES.contains(&x.as_str()) {
            return Err(CliError::key("suite", line, format!("unknown suite `{x}`; known suites: all, {}", SUITES.join(", "))));
        }
    }
    if v.is_empty() {
        return Err(CliError::key("suite", line, "no suite given"));
    }
    Ok(v)
}

/// Merges the config file (if any) with the flags and validates the result.
pub fn resolve_config(mode: Mode, file: Option<&Path>, o: &Overrides) -> Result<RunConfig, CliError> {
    let text = match file {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
        None => String::new(),
    };
    let kv = parse_pairs(&text)?;
    let get = |k: &str| kv.get(k).map(|(v, l)| (v.as_str(), Some(*l)));

    if let Some((m, l)) = get("mode") {
        let want = serde_json::to_value(mode).expect("mode serializes");
        if want.as_str() != Some(m) {
            return Err(CliError::key("mode", l, format!("file says `{m}` but the command is `{}`", want.as_str().unwrap_or(""))));
        }
    }
    let seed = match (o.seed, get("seed")) {
        (Some(s), _) => s,
        (None, Some((v, l))) => parse_u64("seed", l, v)?,
        (None, None) => return Err(CliError::key("seed", None, "a seed is required (--seed N or `seed = N`)")),
    };
    let domain = get("domain").map(|(v, l)| parse_domain(v, l)).transpose()?;
    let entries = match get("entries") {
        None | Some(("empty", _)) => None,
        Some((p, _)) => Some(PathBuf::from(p)),
    };
    let hamiltonian = match (&o.hamiltonian, get("hamiltonian")) {
        (Some(h), _) => Some(check_hamiltonian(h, None)?),
        (None, Some((v, l))) => Some(check_hamiltonian(v, l)?),
        (None, None) => None,
    };
    let real = |flag: Option<f64>, key: &str, default: f64, positive: bool| -> Result<f64, CliError> {
        match (flag, get(key)) {
            (Some(x), _) => parse_real(key, None, &x.to_string(), positive),
            (None, Some((v, l))) => parse_real(key, l, v, positive),
            (None, None) => Ok(default),
        }
    };
    let s_max = real(o.s_max, "s_max", 100.0, false)?;
    let thin = real(o.thin, "thin", 1.0, true)?;
    let burn_in = real(o.burn_in, "burn_in", 0.0, false)?;
    let replicates = match (o.replicates, get("replicates")) {
        (Some(n), _) => n,
        (None, Some((v, l))) => parse_u64("replicates", l, v)?,
        (None, None) => 10_000,
    };
    if replicates == 0 {
        return Err(CliError::key("replicates", get("replicates").and_then(|x| x.1), "must be positive"));
    }
    let suites = match (&o.suite, get("suite")) {
        (Some(s), _) => parse_suites(s, None)?,
        (None, Some((v, l))) => parse_suites(v, l)?,
        (None, None) => SUITES.iter().map(|s| s.to_string()).collect(),
    };
    let out = o.out.clone().or_else(|| get("out").map(|(v, _)| PathBuf::from(v)));
    let obj = get("obj").map(|(v, l)| parse_bool("obj", l, v)).transpose()?.unwrap_or(false);
    let keep_configs = get("keep_configs").map(|(v, l)| parse_bool("keep_configs", l, v)).transpose()?.unwrap_or(false);

    let rc = RunConfig {
        mode,
        seed,
        domain,
        entries,
        hamiltonian,
        s_max,
        thin,
        burn_in,
        replicates,
        suites,
        out,
        obj,
        keep_configs,
        input: o.input.clone(),
    };
    let needs_domain = matches!(mode, Mode::Sample | Mode::Chain) || (mode == Mode::Export && rc.input.is_none());
    if needs_domain && rc.domain.is_none() {
        return Err(CliError::key("domain", None, "a domain is required for this command"));
    }
    if mode != Mode::Verify && rc.out.is_none() {
        return Err(CliError::key("out", None, "an output directory is required (--out DIR or `out = DIR`)"));
    }
    Ok(rc)
}

pub fn load_entries(rc: &RunConfig) -> Result<Vec<EntryEvent>, CliError> {
    let Some(p) = &rc.entries else { return Ok(Vec::new()) };
    let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::key("entries", None, format!("{}: {e}", p.display())))
}
