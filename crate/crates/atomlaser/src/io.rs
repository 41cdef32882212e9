//! On-disk HFB cache and deterministic CSV output.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::hfb::{self_consistent_solve, HfbError, HfbSolution};

/// Bumped whenever the cached layout or the solver's fixed point changes.
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: malformed cache ({reason})")]
    Format { path: PathBuf, reason: String },
    #[error(transparent)]
    Hfb(#[from] HfbError),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

/// Hex SHA-256 over every input that fixes the HFB solution.
pub fn hfb_cache_key(cfg: &Config, temperature: f64) -> String {
    let e = cfg.entries();
    let mut s = format!("v{CACHE_VERSION};temperature={temperature:e};");
    for k in [
        "n_atoms",
        "interaction_tt",
        "interaction_tf",
        "extent",
        "n_points",
        "mixing",
        "e_cut",
        "scf_tol",
        "scf_max_iter",
        "gpe_dtau",
        "gpe_tol",
    ] {
        s.push_str(k);
        s.push('=');
        s.push_str(&e[k]);
        s.push(';');
    }
    Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct Header {
    version: u32,
    n_points: usize,
    skeleton: HfbSolution<f64>,
}

fn paths(dir: &Path, key: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("hfb-{key}.json")), dir.join(format!("hfb-{key}.bin")))
}

/// Writes the JSON header and the little-endian f64 arrays x, ψ0, n̄, then u_j, v_j.
pub fn save_hfb(dir: &Path, key: &str, sol: &HfbSolution<f64>) -> Result<PathBuf, IoError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let (jp, bp) = paths(dir, key);
    let mut skeleton = sol.clone();
    let mut data: Vec<f64> = Vec::new();
    data.extend(std::mem::take(&mut skeleton.x));
    data.extend(std::mem::take(&mut skeleton.condensate.psi0));
    data.extend(std::mem::take(&mut skeleton.nbar));
    for m in skeleton.modes.iter_mut() {
        data.extend(std::mem::take(&mut m.u));
        data.extend(std::mem::take(&mut m.v));
    }
    let header = Header { version: CACHE_VERSION, n_points: sol.x.len(), skeleton };
    let bytes: Vec<u8> = data.iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(&bp, bytes).map_err(io_err(&bp))?;
    let json = serde_json::to_string(&header).expect("header serializes");
    fs::write(&jp, json).map_err(io_err(&jp))?;
    Ok(jp)
}

/// `Ok(None)` when no cache entry exists for `key`.
pub fn load_hfb(dir: &Path, key: &str) -> Result<Option<HfbSolution<f64>>, IoError> {
    let (jp, bp) = paths(dir, key);
    if !jp.exists() || !bp.exists() {
        return Ok(None);
    }
    let fmt = |reason: String| IoError::Format { path: jp.clone(), reason };
    let text = fs::read_to_string(&jp).map_err(io_err(&jp))?;
    let header: Header = serde_json::from_str(&text).map_err(|e| fmt(e.to_string()))?;
    if header.version != CACHE_VERSION {
        return Ok(None);
    }
    let bytes = fs::read(&bp).map_err(io_err(&bp))?;
    let n = header.n_points;
    let mut sol = header.skeleton;
    let want = (3 + 2 * sol.modes.len()) * n * 8;
    if bytes.len() != want {
        return Err(fmt(format!("binary holds {} bytes, expected {want}", bytes.len())));
    }
    let mut it = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let mut take = || (&mut it).take(n).collect::<Vec<f64>>();
    sol.x = take();
    sol.condensate.psi0 = take();
    sol.nbar = take();
    for m in sol.modes.iter_mut() {
        m.u = take();
        m.v = take();
    }
    Ok(Some(sol))
}

/// Loads the solution from `dir` if cached, otherwise solves and stores it.
/// Returns the solution and whether it came from the cache.
pub fn solve_cached(cfg: &Config, temperature: f64, dir: Option<&Path>) -> Result<(HfbSolution<f64>, bool), IoError> {
    let key = hfb_cache_key(cfg, temperature);
    if let Some(d) = dir {
        if let Some(sol) = load_hfb(d, &key)? {
            return Ok((sol, true));
        }
    }
    let setup = cfg.setup(temperature)?;
    let sol = self_consistent_solve(&setup, &cfg.solver())?;
    if let Some(d) = dir {
        save_hfb(d, &key, &sol)?;
    }
    Ok((sol, false))
}

/// One CSV field; `Empty` encodes an undefined value such as a coherence node.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_value(*v),
            Cell::Text(t) => t.clone(),
            Cell::Empty => String::new(),
        }
    }
}

/// Table with a header row, rendered with a fixed float format.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Csv {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn push_nums(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| Cell::Num(v)).collect());
    }

    pub fn render(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::render).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), IoError> {
        fs::write(path, self.render()).map_err(io_err(path))
    }
}

/// 15 significant digits; −0 prints as 0.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.14e}")
    }
}
