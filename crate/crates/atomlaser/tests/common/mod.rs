#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use atomlaser::config::Config;
use atomlaser::io::solve_cached;
use atomlaser::outcoupling::{matrix_elements, resonance_table, CouplingSpec};
use atomlaser::{Table, Trap};

/// Disk cache shared by every test binary of this crate.
pub fn cache_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("hfb-cache")
}

pub fn solve(cfg: &Config, temperature: f64) -> Trap {
    solve_cached(cfg, temperature, Some(&cache_dir())).expect("hfb solve").0
}

pub fn trap10() -> &'static Trap {
    static T: OnceLock<Trap> = OnceLock::new();
    T.get_or_init(|| solve(&Config::default(), 10.0))
}

pub fn trap150() -> &'static Trap {
    static T: OnceLock<Trap> = OnceLock::new();
    T.get_or_init(|| solve(&Config::default(), 150.0))
}

/// Default interacting gas at T = 0.
pub fn trap0() -> &'static Trap {
    static T: OnceLock<Trap> = OnceLock::new();
    T.get_or_init(|| solve(&Config::default(), 0.0))
}

pub fn table(trap: &Trap, lambda: f64, detuning: f64) -> Table {
    let cp = CouplingSpec::uniform(lambda, trap.x.len(), detuning);
    matrix_elements(&cp, trap, &Config::default().output_grid()).expect("matrix elements")
}

pub fn resonances(trap: &Trap, lambda: f64, detuning: f64) -> Table {
    let cp = CouplingSpec::uniform(lambda, trap.x.len(), detuning);
    resonance_table(&cp, trap, &Config::default().output_grid()).expect("resonance table")
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
