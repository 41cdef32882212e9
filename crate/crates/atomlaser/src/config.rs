//! Units, physical parameters, grids and the key=value configuration format.
//!
//! Internal units are ħ = m = ω = k_B = 1. Lengths are displayed in units of
//! 2√(ħ/mω), so a display length is half the natural one.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Display length unit in natural units.
pub const DISPLAY_LENGTH: f64 = 2.0;

pub fn to_display_length<T: Scalar>(x: T) -> T {
    x / T::of(DISPLAY_LENGTH)
}

pub fn from_display_length<T: Scalar>(x: T) -> T {
    x * T::of(DISPLAY_LENGTH)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("line {line}: expected key=value, got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("{key}: cannot parse '{value}'")]
    Value { key: String, value: String },
}

fn invalid(field: &str, reason: &str) -> ConfigError {
    ConfigError::Invalid { field: field.into(), reason: reason.into() }
}

/// N_t, U0, U1 and T. The trap frequency is 1 by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams<T> {
    pub n_atoms: T,
    pub interaction_tt: T,
    pub interaction_tf: T,
    pub temperature: T,
}

impl<T: Scalar> PhysicalParams<T> {
    pub const TRAP_FREQUENCY: f64 = 1.0;

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.n_atoms >= T::one()) {
            return Err(invalid("n_atoms", "must be at least 1"));
        }
        if !(self.interaction_tt >= T::zero()) {
            return Err(invalid("interaction_tt", "must be nonnegative"));
        }
        if !self.interaction_tf.is_finite() {
            return Err(invalid("interaction_tf", "must be finite"));
        }
        if !(self.temperature >= T::zero()) {
            return Err(invalid("temperature", "must be nonnegative"));
        }
        Ok(())
    }
}

/// Box of width `extent` centred on the trap, sampled at cell centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid<T> {
    pub extent: T,
    pub n_points: usize,
}

impl<T: Scalar> SpatialGrid<T> {
    pub fn spacing(&self) -> T {
        self.extent / T::of_usize(self.n_points)
    }

    /// x_i = (i − (N−1)/2)·dx, symmetric about 0 with no node at the origin.
    pub fn coordinates(&self) -> Vec<T> {
        let dx = self.spacing();
        let c = T::of((self.n_points as f64 - 1.0) / 2.0);
        (0..self.n_points).map(|i| (T::of_usize(i) - c) * dx).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.extent > T::zero()) || !self.extent.is_finite() {
            return Err(invalid("extent", "extent must be positive"));
        }
        if self.n_points < 16 {
            return Err(invalid("n_points", "must be at least 16"));
        }
        if self.n_points % 2 != 0 {
            return Err(invalid("n_points", "must be even so the grid splits into parity halves"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputModeKind {
    /// Scattering eigenfunctions of −½∂² + U1 n_t(x).
    MeanField,
    PlaneWave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityOfStates {
    /// ρ = 1 per unit energy, ½ per branch.
    Flat,
    /// ρ = 1/(2π v_k) per branch for box-normalized modes.
    Physical,
}

/// Output-mode sampling. `None` cutoffs are filled from the HFB cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputModeGrid<T> {
    pub omega_max: Option<T>,
    pub n_omega: Option<usize>,
    pub kind: OutputModeKind,
    pub density_of_states: DensityOfStates,
}

impl<T: Scalar> Default for OutputModeGrid<T> {
    fn default() -> Self {
        Self {
            omega_max: None,
            n_omega: None,
            kind: OutputModeKind::MeanField,
            density_of_states: DensityOfStates::Flat,
        }
    }
}

impl<T: Scalar> OutputModeGrid<T> {
    pub const BRANCHES: usize = 2;

    /// Total state weight per unit energy under the flat measure.
    pub fn total_weight(&self) -> T {
        T::one()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if let Some(w) = self.omega_max {
            if !(w > T::zero()) {
                return Err(invalid("omega_max", "must be positive"));
            }
        }
        if let Some(n) = self.n_omega {
            if n < 2 {
                return Err(invalid("n_omega", "must be at least 2"));
            }
        }
        Ok(())
    }
}

/// Validated bundle shared read-only by every solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSetup<T> {
    pub params: PhysicalParams<T>,
    pub grid: SpatialGrid<T>,
    pub modes: OutputModeGrid<T>,
    pub x: Vec<T>,
    pub dx: T,
    /// Diagonal and off-diagonal weights of −½∂² (second-order central difference).
    pub lap_diag: T,
    pub lap_off: T,
    pub potential: Vec<T>,
    pub display_length: T,
}

pub fn build_setup<T: Scalar>(
    params: PhysicalParams<T>,
    grid: SpatialGrid<T>,
    modes: OutputModeGrid<T>,
) -> Result<SimSetup<T>, ConfigError> {
    params.validate()?;
    grid.validate()?;
    modes.validate()?;
    let x = grid.coordinates();
    let dx = grid.spacing();
    let potential = x.iter().map(|&xi| xi * xi * T::of(0.5)).collect();
    Ok(SimSetup {
        params,
        grid,
        modes,
        x,
        dx,
        lap_diag: T::one() / (dx * dx),
        lap_off: -T::of(0.5) / (dx * dx),
        potential,
        display_length: T::of(DISPLAY_LENGTH),
    })
}

impl<T: Scalar> SimSetup<T> {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Applies the discretized −½∂² + V (Dirichlet outside the box).
    pub fn apply_single_particle(&self, f: &[T], out: &mut [T]) {
        let n = f.len();
        for i in 0..n {
            let mut s = (self.lap_diag + self.potential[i]) * f[i];
            if i > 0 {
                s += self.lap_off * f[i - 1];
            }
            if i + 1 < n {
                s += self.lap_off * f[i + 1];
            }
            out[i] = s;
        }
    }

    pub fn integrate(&self, f: &[T]) -> T {
        f.iter().copied().sum::<T>() * self.dx
    }
}

/// Solver controls for the self-consistent loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams<T> {
    pub mixing: T,
    pub e_cut: Option<T>,
    pub scf_tol: T,
    pub scf_max_iter: usize,
    pub gpe_dtau: T,
    pub gpe_tol: T,
    pub gpe_max_iter: usize,
}

impl<T: Scalar> Default for SolverParams<T> {
    fn default() -> Self {
        Self {
            mixing: T::of(0.3),
            e_cut: None,
            scf_tol: T::of(1e-6),
            scf_max_iter: 400,
            gpe_dtau: T::of(0.1),
            gpe_tol: T::of(1e-8),
            gpe_max_iter: 200_000,
        }
    }
}

impl<T: Scalar> SolverParams<T> {
    /// E_cut = max(10, 5T) unless overridden.
    pub fn cutoff(&self, temperature: T) -> T {
        self.e_cut.unwrap_or_else(|| T::of(10.0).max(T::of(5.0) * temperature))
    }
}

/// Per-atom U0 whose total U0·N_t reproduces the quoted 1D demonstration.
pub fn default_interaction() -> f64 {
    5.0 * 2f64.sqrt() / 2000.0
}

/// Flat configuration, one field per accepted key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub n_atoms: f64,
    pub interaction_tt: f64,
    pub interaction_tf: Option<f64>,
    pub temperature: f64,
    pub extent: f64,
    pub n_points: usize,
    pub omega_max: Option<f64>,
    pub n_omega: Option<usize>,
    pub output_modes: OutputModeKind,
    pub density_of_states: DensityOfStates,
    pub mixing: f64,
    pub e_cut: Option<f64>,
    pub scf_tol: f64,
    pub scf_max_iter: usize,
    pub gpe_dtau: f64,
    pub gpe_tol: f64,
    pub coupling_amplitude: f64,
    pub kick: f64,
    pub field_window_nodes: usize,
    pub time: f64,
    pub t_max: f64,
    pub n_samples: usize,
    pub ode_rtol: f64,
    pub cache_dir: Option<String>,
    pub scan_min: f64,
    pub scan_max: f64,
    pub scan_step: f64,
    pub density_times: Vec<f64>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            n_atoms: 2000.0,
            interaction_tt: default_interaction(),
            interaction_tf: None,
            temperature: 150.0,
            extent: 40.0,
            n_points: 1024,
            omega_max: None,
            n_omega: None,
            output_modes: OutputModeKind::MeanField,
            density_of_states: DensityOfStates::Flat,
            mixing: 0.3,
            e_cut: None,
            scf_tol: 1e-6,
            scf_max_iter: 400,
            gpe_dtau: 0.1,
            gpe_tol: 1e-8,
            coupling_amplitude: 0.1,
            kick: 0.0,
            field_window_nodes: 200,
            time: 100.0,
            t_max: 200.0,
            n_samples: 201,
            ode_rtol: 1e-9,
            cache_dir: None,
            scan_min: -10.0,
            scan_max: 12.0,
            scan_step: 0.1,
            density_times: vec![1.0, 10.0, 100.0],
        }
    }
}

/// (key, symbol, meaning) for every accepted key.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("n_atoms", "N_t", "total atom number"),
    ("interaction_tt", "U0", "trapped-trapped interaction per atom"),
    ("interaction_tf", "U1", "trapped-free interaction; auto = U0"),
    ("temperature", "T", "temperature (k_B = 1)"),
    ("extent", "L", "box width in natural lengths"),
    ("n_points", "N_x", "grid points (even)"),
    ("omega_max", "omega_max", "output-mode energy cutoff; auto = 1.2 E_cut + 40"),
    ("n_omega", "n_omega", "background output-mode samples; auto = uniform in k with dk = 0.01"),
    ("output_modes", "phi_k", "mean_field | plane_wave"),
    ("density_of_states", "rho", "flat | physical"),
    ("mixing", "alpha", "density mixing fraction"),
    ("e_cut", "E_cut", "quasiparticle cutoff; auto = max(10, 5T)"),
    ("scf_tol", "", "self-consistency tolerance on mu and relative nbar"),
    ("scf_max_iter", "", "self-consistency iteration budget"),
    ("gpe_dtau", "dtau", "imaginary-time step of the ground-state flow"),
    ("gpe_tol", "", "ground-state residual bound"),
    ("coupling_amplitude", "lambda", "uniform coupling for the detuning scan"),
    ("kick", "k_em", "momentum kick"),
    ("field_window_nodes", "", "refined output-mode nodes per open resonance"),
    ("time", "t", "evaluation time for coherence commands"),
    ("t_max", "", "end time of population trajectories"),
    ("n_samples", "", "samples per trajectory"),
    ("ode_rtol", "", "trajectory relative tolerance"),
    ("cache_dir", "", "directory for cached trap solutions; none disables"),
    ("scan_min", "Delta_em", "detuning scan start"),
    ("scan_max", "Delta_em", "detuning scan end"),
    ("scan_step", "Delta_em", "detuning scan step"),
    ("density_times", "t", "comma-separated times for output densities"),
];

fn parse_num<V: std::str::FromStr>(key: &str, value: &str) -> Result<V, ConfigError> {
    value.parse().map_err(|_| ConfigError::Value { key: key.into(), value: value.into() })
}

fn parse_auto<V: std::str::FromStr>(key: &str, value: &str) -> Result<Option<V>, ConfigError> {
    if value == "auto" {
        Ok(None)
    } else {
        parse_num(key, value).map(Some)
    }
}

fn show_opt<V: fmt::Display>(v: &Option<V>) -> String {
    v.as_ref().map_or_else(|| "auto".to_string(), |x| x.to_string())
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key.trim() {
            "n_atoms" => self.n_atoms = parse_num(key, v)?,
            "interaction_tt" => self.interaction_tt = parse_num(key, v)?,
            "interaction_tf" => self.interaction_tf = parse_auto(key, v)?,
            "temperature" => self.temperature = parse_num(key, v)?,
            "extent" => self.extent = parse_num(key, v)?,
            "n_points" => self.n_points = parse_num(key, v)?,
            "omega_max" => self.omega_max = parse_auto(key, v)?,
            "n_omega" => self.n_omega = parse_auto(key, v)?,
            "output_modes" => {
                self.output_modes = match v {
                    "mean_field" => OutputModeKind::MeanField,
                    "plane_wave" => OutputModeKind::PlaneWave,
                    _ => return Err(ConfigError::Value { key: key.into(), value: v.into() }),
                }
            }
            "density_of_states" => {
                self.density_of_states = match v {
                    "flat" => DensityOfStates::Flat,
                    "physical" => DensityOfStates::Physical,
                    _ => return Err(ConfigError::Value { key: key.into(), value: v.into() }),
                }
            }
            "mixing" => self.mixing = parse_num(key, v)?,
            "e_cut" => self.e_cut = parse_auto(key, v)?,
            "scf_tol" => self.scf_tol = parse_num(key, v)?,
            "scf_max_iter" => self.scf_max_iter = parse_num(key, v)?,
            "gpe_dtau" => self.gpe_dtau = parse_num(key, v)?,
            "gpe_tol" => self.gpe_tol = parse_num(key, v)?,
            "coupling_amplitude" => self.coupling_amplitude = parse_num(key, v)?,
            "kick" => self.kick = parse_num(key, v)?,
            "field_window_nodes" => self.field_window_nodes = parse_num(key, v)?,
            "time" => self.time = parse_num(key, v)?,
            "t_max" => self.t_max = parse_num(key, v)?,
            "n_samples" => self.n_samples = parse_num(key, v)?,
            "ode_rtol" => self.ode_rtol = parse_num(key, v)?,
            "cache_dir" => self.cache_dir = if v == "none" || v.is_empty() { None } else { Some(v.to_string()) },
            "scan_min" => self.scan_min = parse_num(key, v)?,
            "scan_max" => self.scan_max = parse_num(key, v)?,
            "scan_step" => self.scan_step = parse_num(key, v)?,
            "density_times" => {
                self.density_times = v.split(',').map(|s| parse_num(key, s.trim())).collect::<Result<Vec<f64>, _>>()?
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) =
                line.split_once('=').ok_or_else(|| ConfigError::Syntax { line: i + 1, text: raw.to_string() })?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every key with its effective textual value, in documentation order.
    pub fn entries(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("n_atoms", self.n_atoms.to_string());
        put("interaction_tt", self.interaction_tt.to_string());
        put("interaction_tf", show_opt(&self.interaction_tf));
        put("temperature", self.temperature.to_string());
        put("extent", self.extent.to_string());
        put("n_points", self.n_points.to_string());
        put("omega_max", show_opt(&self.omega_max));
        put("n_omega", show_opt(&self.n_omega));
        put(
            "output_modes",
            match self.output_modes {
                OutputModeKind::MeanField => "mean_field",
                OutputModeKind::PlaneWave => "plane_wave",
            }
            .into(),
        );
        put(
            "density_of_states",
            match self.density_of_states {
                DensityOfStates::Flat => "flat",
                DensityOfStates::Physical => "physical",
            }
            .into(),
        );
        put("mixing", self.mixing.to_string());
        put("e_cut", show_opt(&self.e_cut));
        put("scf_tol", self.scf_tol.to_string());
        put("scf_max_iter", self.scf_max_iter.to_string());
        put("gpe_dtau", self.gpe_dtau.to_string());
        put("gpe_tol", self.gpe_tol.to_string());
        put("coupling_amplitude", self.coupling_amplitude.to_string());
        put("kick", self.kick.to_string());
        put("field_window_nodes", self.field_window_nodes.to_string());
        put("time", self.time.to_string());
        put("t_max", self.t_max.to_string());
        put("n_samples", self.n_samples.to_string());
        put("ode_rtol", self.ode_rtol.to_string());
        put("cache_dir", self.cache_dir.clone().unwrap_or_else(|| "none".into()));
        put("scan_min", self.scan_min.to_string());
        put("scan_max", self.scan_max.to_string());
        put("scan_step", self.scan_step.to_string());
        put("density_times", self.density_times.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","));
        m
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.physical(self.temperature).validate()?;
        self.spatial().validate()?;
        self.output_grid().validate()?;
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(invalid("mixing", "must lie in (0, 1]"));
        }
        if !(self.scan_step > 0.0) || self.scan_max < self.scan_min {
            return Err(invalid("scan_step", "scan range must be nonempty with positive step"));
        }
        if !(self.t_max > 0.0) || self.n_samples < 2 {
            return Err(invalid("t_max", "trajectory span must be positive with at least 2 samples"));
        }
        if !(self.time >= 0.0) {
            return Err(invalid("time", "must be nonnegative"));
        }
        Ok(())
    }

    pub fn physical(&self, temperature: f64) -> PhysicalParams<f64> {
        PhysicalParams {
            n_atoms: self.n_atoms,
            interaction_tt: self.interaction_tt,
            interaction_tf: self.interaction_tf.unwrap_or(self.interaction_tt),
            temperature,
        }
    }

    pub fn spatial(&self) -> SpatialGrid<f64> {
        SpatialGrid { extent: self.extent, n_points: self.n_points }
    }

    pub fn output_grid(&self) -> OutputModeGrid<f64> {
        OutputModeGrid {
            omega_max: self.omega_max,
            n_omega: self.n_omega,
            kind: self.output_modes,
            density_of_states: self.density_of_states,
        }
    }

    pub fn solver(&self) -> SolverParams<f64> {
        SolverParams {
            mixing: self.mixing,
            e_cut: self.e_cut,
            scf_tol: self.scf_tol,
            scf_max_iter: self.scf_max_iter,
            gpe_dtau: self.gpe_dtau,
            gpe_tol: self.gpe_tol,
            ..SolverParams::default()
        }
    }

    pub fn setup(&self, temperature: f64) -> Result<SimSetup<f64>, ConfigError> {
        build_setup(self.physical(temperature), self.spatial(), self.output_grid())
    }
}
