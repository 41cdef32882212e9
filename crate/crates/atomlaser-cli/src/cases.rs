//! Parameter sets of the figure scenarios.

/// Temperatures of the detuning scan.
pub const SPECTRUM_TEMPERATURES: [f64; 2] = [10.0, 150.0];

/// Output-density cases (Δ_em, λ) at T = 150.
pub const DENSITY_TEMPERATURE: f64 = 150.0;
pub const DENSITY_CASES: [(f64, f64); 3] = [(-5.0, 0.5), (0.0, 0.2), (8.0, 2.0)];

/// Coherence cases (T, Δ_em), evaluated at t = `COHERENCE_TIME`.
pub const COHERENCE_CASES: [(f64, f64); 4] = [(10.0, 0.0), (150.0, 0.0), (150.0, -5.0), (150.0, 8.0)];
pub const COHERENCE_TIME: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveCase {
    pub label: &'static str,
    pub temperature: f64,
    pub detuning: f64,
    pub coupling: f64,
}

pub const EVOLVE_CASES: [EvolveCase; 4] = [
    EvolveCase { label: "a", temperature: 10.0, detuning: 0.0, coupling: 0.02 },
    EvolveCase { label: "b", temperature: 150.0, detuning: 0.0, coupling: 0.02 },
    EvolveCase { label: "c", temperature: 150.0, detuning: -5.0, coupling: 0.5 },
    EvolveCase { label: "d", temperature: 10.0, detuning: 8.0, coupling: 0.2 },
];

/// Oracle harness: trap temperature and Λ = √(∫λ̄² dx).
pub const ORACLE_TEMPERATURE: f64 = 10.0;
pub const ORACLE_STRENGTH: f64 = 0.01;
/// Two-mode Rabi coupling.
pub const RABI_COUPLING: f64 = 0.3;

/// File-name fragment for a number: "m5" for −5, "0.5" for 0.5.
pub fn tag(v: f64) -> String {
    let s = format!("{}", v.abs());
    if v < 0.0 {
        format!("m{s}")
    } else {
        s
    }
}
