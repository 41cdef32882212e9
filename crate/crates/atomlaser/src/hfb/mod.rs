//! Self-consistent HFB-Popov trap states.

mod bdg;
mod gpe;
mod solve;
mod thermal;

pub use bdg::{solve_bdg, ExcitationMode, Parity};
pub use gpe::{solve_gpe, CondensateState, GpeOptions};
pub use solve::{self_consistent_solve, HfbSolution, IterationRecord};
pub use thermal::{noncondensate_density, thermal_occupation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HfbError {
    #[error("ground-state flow did not converge after {iterations} steps, residual {residual:e}")]
    GpeNotConverged { iterations: usize, residual: f64 },
    #[error("ground-state flow converged to a state with nodes")]
    Nodal,
    #[error("invalid input: {0}")]
    Input(String),
    #[error("anomalous mode {index} in the {parity:?} sector: E^2 = {e2:e}")]
    Anomalous { parity: Parity, index: usize, e2: f64 },
    #[error("operator S has a negative eigenvalue {0:e} besides the condensate")]
    Unstable(f64),
    #[error("excitation energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
    #[error("self-consistency failed after {iterations} iterations: {summary}")]
    NotConverged { iterations: usize, summary: String },
    #[error("condensate number became negative ({0}); the gas is above the transition")]
    NegativeCondensate(f64),
}
