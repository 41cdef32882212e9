//! Scenario runner behind the `atomlaser` binary.

pub mod cases;
mod commands;
pub mod harness;

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::Instant;

use atomlaser::config::{Config, DISPLAY_LENGTH};
use atomlaser::io::{solve_cached, Csv};
use atomlaser::Trap;
use serde_json::{json, Map, Value};

pub use commands::run_command;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Hfb,
    Spectrum,
    Density,
    G1,
    G2,
    Evolve,
    OracleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Hfb => "hfb",
            Command::Spectrum => "spectrum",
            Command::Density => "density",
            Command::G1 => "g1",
            Command::G2 => "g2",
            Command::Evolve => "evolve",
            Command::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

/// Wraps a module error with the step that produced it.
pub(crate) fn numerical<E: Display>(context: impl Display) -> impl FnOnce(E) -> CliError {
    move |e| CliError::Numerical(format!("{context}: {e}"))
}

/// Reads `path` (if given) and applies `KEY=VALUE` overrides in order.
pub fn load_config(path: Option<&Path>, overrides: &[String]) -> Result<Config, CliError> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|_| CliError::Usage(format!("config not found: {}", p.display())))?;
            Config::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
        }
        None => Config::default(),
    };
    for o in overrides {
        let (k, v) = o.split_once('=').ok_or_else(|| CliError::Usage(format!("override '{o}' is not KEY=VALUE")))?;
        cfg.set(k.trim(), v.trim()).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

/// Per-run state: output location, solved traps, and manifest contents.
pub struct Run<'a> {
    pub cfg: &'a Config,
    pub out: PathBuf,
    pub cache: PathBuf,
    traps: BTreeMap<u64, Trap>,
    pub files: Vec<String>,
    pub timings: Map<String, Value>,
    pub results: Map<String, Value>,
}

impl<'a> Run<'a> {
    pub fn new(cfg: &'a Config, out: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(out)
            .map_err(|e| CliError::Usage(format!("cannot create output directory {}: {e}", out.display())))?;
        let cache = cfg.cache_dir.as_ref().map_or_else(|| out.join("cache"), PathBuf::from);
        Ok(Self {
            cfg,
            out: out.to_path_buf(),
            cache,
            traps: BTreeMap::new(),
            files: vec![],
            timings: Map::new(),
            results: Map::new(),
        })
    }

    /// HFB solution at `temperature`, from memory, the disk cache, or a fresh solve.
    pub fn trap(&mut self, temperature: f64) -> Result<&Trap, CliError> {
        let key = temperature.to_bits();
        if !self.traps.contains_key(&key) {
            let start = Instant::now();
            let (sol, hit) = solve_cached(self.cfg, temperature, Some(&self.cache))
                .map_err(numerical(format!("hfb solve at T = {temperature}")))?;
            let label = format!("T{temperature}");
            self.timings.insert(format!("hfb_{label}"), json!(start.elapsed().as_secs_f64()));
            self.results.insert(
                format!("hfb_{label}"),
                json!({
                    "temperature": temperature,
                    "mu": sol.mu(),
                    "n0": sol.n0(),
                    "noncondensate_fraction": sol.noncondensate_fraction(),
                    "iterations": sol.iterations(),
                    "modes": sol.modes.len(),
                    "e_cut": sol.e_cut,
                    "gpe_residual": sol.condensate.residual,
                    "from_cache": hit,
                }),
            );
            self.traps.insert(key, sol);
        }
        Ok(&self.traps[&key])
    }

    pub fn write(&mut self, name: &str, csv: &Csv) -> Result<(), CliError> {
        let path = self.out.join(name);
        csv.write(&path).map_err(|e| CliError::Usage(e.to_string()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn time<R>(&mut self, label: &str, f: impl FnOnce(&mut Self) -> R) -> R {
        let start = Instant::now();
        let r = f(self);
        self.timings.insert(label.to_string(), json!(start.elapsed().as_secs_f64()));
        r
    }

    pub fn manifest(&self, command: Command) -> Value {
        let cfg: Map<String, Value> = self.cfg.entries().into_iter().map(|(k, v)| (k, Value::String(v))).collect();
        let grid = self.cfg.spatial();
        let solver = self.cfg.solver();
        json!({
            "command": command.name(),
            "code_version": env!("CARGO_PKG_VERSION"),
            "config": cfg,
            "derived": {
                "dx": grid.spacing(),
                "e_cut_rule": "max(10, 5T) unless e_cut is set",
                "e_cut_T10": solver.cutoff(10.0),
                "e_cut_T150": solver.cutoff(150.0),
                "mixing": solver.mixing,
                "scf_tol": solver.scf_tol,
                "gpe_tol": solver.gpe_tol,
                "cache_dir": self.cache.display().to_string(),
            },
            "units": {
                "natural": "hbar = m = omega = k_B = 1",
                "display_length_per_natural_length": 1.0 / DISPLAY_LENGTH,
            },
            "results": self.results,
            "files": self.files,
            "timings_s": self.timings,
        })
    }
}

/// Runs one command and writes `manifest_<command>.json` next to its CSV files.
pub fn run(command: Command, cfg: &Config, out: &Path) -> Result<Value, CliError> {
    let mut r = Run::new(cfg, out)?;
    let start = Instant::now();
    run_command(command, &mut r)?;
    r.timings.insert("total".into(), json!(start.elapsed().as_secs_f64()));
    let manifest = r.manifest(command);
    let path = out.join(format!("manifest_{}.json", command.name().replace('-', "_")));
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(manifest)
}
