//! Trap population dynamics under output coupling.

mod adiabatic;
mod bookkeeping;
mod perturbative;
mod rates;
mod vectors;

pub use adiabatic::{evolve_adiabatic, AdiabaticOptions, PopulationTrajectory};
pub use bookkeeping::{bookkeeping_deltas, energy_rate, BookkeepingDeltas};
pub use perturbative::{evolve_perturbative, node_weights, PerturbativeResult};
pub use rates::{decay_rates, decay_rates_with_shifts, DecayRates};
pub use vectors::{channel_vectors, metric_products, ChannelVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Ode(#[from] crate::ode::OdeError),
    #[error(transparent)]
    Outcoupling(#[from] crate::outcoupling::OutcouplingError),
    #[error("population {index} undershot to {value:e}, beyond tolerance")]
    Undershoot { index: usize, value: f64 },
    #[error("rates describe {rates} modes, trap has {trap}")]
    Mismatch { rates: usize, trap: usize },
}
