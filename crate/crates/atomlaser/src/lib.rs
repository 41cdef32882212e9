//! Output coupling from a one-dimensional trapped Bose gas at finite temperature.
//!
//! The trapped gas is described in the Hartree–Fock–Bogoliubov (Popov)
//! approximation; output is computed in the quasi-steady-state picture and
//! cross-checked against an exact linear coupled-mode integrator. Units are
//! natural oscillator units (ħ = m = ω = k_B = 1). Core types are generic over
//! `T: Scalar` (f32 or f64); the aliases below fix f64.

pub mod coherence;
pub mod config;
pub mod dynamics;
pub mod hfb;
pub mod io;
pub mod linalg;
pub mod ode;
pub mod oracle;
pub mod outcoupling;
pub mod scalar;
pub mod special;

pub use scalar::Scalar;

pub type Trap = hfb::HfbSolution<f64>;
pub type Mode = hfb::ExcitationMode<f64>;
pub type Setup = config::SimSetup<f64>;
pub type Table = outcoupling::MatrixElementTable<f64>;
pub type Fields = outcoupling::OutputFieldSet<f64>;
pub type Rates = dynamics::DecayRates<f64>;
pub type Trajectory = dynamics::PopulationTrajectory<f64>;
pub type Oracle = oracle::TruncatedSystem<f64>;
