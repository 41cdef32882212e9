//! Quasi-steady output observables: matrix elements, kernels, spectra,
//! golden-rule rates, output fields and the bound component.

mod bound;
mod elements;
mod field;
mod kernel;
mod modes;
mod quadrature;
mod rates;
mod spectrum;
mod widths;

pub use bound::{bound_component, pv_integral, pv_regularized, BoundComponent};
pub use elements::{channel_source, matrix_elements, resonance_table, to_branches, ChannelSource, MatrixElementTable};
pub use field::{channel_field, output_field, resonant_field, OutputFieldSet};
pub use kernel::{d2_kernel, d_kernel, d_kernel_sq, filon_h_weights, filon_sq_weights, sinc2_form};
pub use modes::{default_omega_max, mirror, ModeBasis, ModeNode};
pub use quadrature::{channel_grid, ChannelGrid, NodeOrigin, MIN_WINDOW_NODES};
pub use rates::{detuning_scan, golden_rule_rates, rates_at, resonant_strength, ChannelRate, RateSummary};
pub use spectrum::{branch_elements, channel_totals, output_spectrum, total_spectrum, SpectrumPoint};
pub use widths::{raman_effective_coupling, rms_width, spectral_width_estimates, width_estimates};

use serde::{Deserialize, Serialize};

use crate::hfb::HfbSolution;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OutcouplingError {
    #[error("output-mode grid tops out at omega = {omega_max}; uncovered resonances: {uncovered:?}")]
    Uncovered { omega_max: f64, uncovered: Vec<f64> },
    #[error(
        "resolution near resonance omega = {omega} is {spacing:e}, needs < pi/t = {needed:e}; use n_omega >= {n_omega}"
    )]
    Resolution { omega: f64, spacing: f64, needed: f64, n_omega: usize },
    #[error("refined window needs at least {0} nodes to resolve pi/t")]
    Window(usize),
    #[error("resonance at threshold (omega_out = 0) for channel {0}; principal value undefined")]
    Threshold(String),
    #[error("intermediate detuning must be nonzero")]
    ResonantIntermediate,
    #[error("time must be nonnegative")]
    NegativeTime,
    #[error("coupling profile has {got} points, grid has {want}")]
    Profile { got: usize, want: usize },
}

/// λ(x, t) = λ̄(x) e^{i(k_em x − Δ_em t)}, switched on suddenly at t = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec<T> {
    pub amplitude: Vec<T>,
    pub detuning: T,
    pub kick: T,
}

impl<T: Scalar> CouplingSpec<T> {
    pub fn uniform(lambda: T, n_points: usize, detuning: T) -> Self {
        Self { amplitude: vec![lambda; n_points], detuning, kick: T::zero() }
    }

    /// Λ = √(∫|λ̄|² dx).
    pub fn strength(&self, dx: T) -> T {
        (crate::scalar::norm2(&self.amplitude) * dx).sqrt()
    }

    /// Λ ≪ Δω_0, taken as Λ < Δω_0/10. Diagnostic only.
    pub fn weak_coupling(&self, trap: &HfbSolution<T>) -> bool {
        let (width, _) = spectral_width_estimates(trap, self.kick);
        self.strength(trap.dx) < width * T::of(0.1)
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self { amplitude: self.amplitude.iter().map(|&a| a * factor).collect(), ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelKind {
    Condensate,
    /// j+: stimulated quantum evaporation from mode j.
    Sqe(usize),
    /// j−: pair breaking with mode j.
    Pb(usize),
}

impl ChannelKind {
    pub fn label(&self) -> String {
        match self {
            ChannelKind::Condensate => "0".into(),
            ChannelKind::Sqe(j) => format!("{}+", j + 1),
            ChannelKind::Pb(j) => format!("{}-", j + 1),
        }
    }
}

/// Output channel η with E_η and trap population n^t_η.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel<T> {
    pub kind: ChannelKind,
    pub energy: T,
    pub population: T,
}

impl<T: Scalar> Channel<T> {
    /// ω_out^η = μ + Δ_em + E_η.
    pub fn omega_out(&self, mu: T, detuning: T) -> T {
        mu + detuning + self.energy
    }

    pub fn is_open(&self, mu: T, detuning: T) -> bool {
        self.omega_out(mu, detuning) > T::zero()
    }

    /// ψ_t^η: ψ0, u_j or v_j* (real here).
    pub fn trapped<'a>(&self, trap: &'a HfbSolution<T>) -> &'a [T] {
        match self.kind {
            ChannelKind::Condensate => &trap.condensate.psi0,
            ChannelKind::Sqe(j) => &trap.modes[j].u,
            ChannelKind::Pb(j) => &trap.modes[j].v,
        }
    }
}

/// Channels in the order 0, 1+, 1−, 2+, 2−, … with n^t = (N0, n_j, n_j + 1).
pub fn channels<T: Scalar>(trap: &HfbSolution<T>) -> Vec<Channel<T>> {
    let mut out = vec![Channel { kind: ChannelKind::Condensate, energy: T::zero(), population: trap.n0() }];
    for (j, m) in trap.modes.iter().enumerate() {
        out.push(Channel { kind: ChannelKind::Sqe(j), energy: m.energy, population: m.occupation });
        out.push(Channel { kind: ChannelKind::Pb(j), energy: -m.energy, population: m.occupation + T::one() });
    }
    out
}
