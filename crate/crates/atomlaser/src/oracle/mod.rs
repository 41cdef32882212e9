//! Brute-force coupled-mode reference: trapped amplitudes linearly coupled to a
//! discretized bath, propagated exactly with the matrix exponential.

mod compare;
mod integrate;
mod system;

pub use compare::{compare_to_quasi_steady, spectrum_comparison, ComparisonReport, ObservableError, Validity};
pub use integrate::{
    bath_counts, fit_decay_rate, integrate_coupled_modes, oscillation_frequency, perturbative_populations,
    OracleTrajectory,
};
pub use system::{BathMode, CombSpec, Trapped, TrappedRow, TruncatedSystem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LuError),
    #[error("σ3 norm drift {drift:e} at t = {t}; truncation inadequate")]
    NormDrift { t: f64, drift: f64 },
    #[error("parameter mismatch: {0}")]
    Mismatch(String),
    #[error("output times must start at 0 and increase")]
    Times,
    #[error("channel {0} has zero resonant rate; no comb can be built")]
    NoRate(String),
    #[error("fit window holds fewer than two usable samples")]
    Fit,
}
