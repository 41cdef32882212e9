use serde::{Deserialize, Serialize};

use crate::outcoupling::{pv_integral, resonant_strength, ChannelKind, MatrixElementTable};
use crate::scalar::{Scalar, C};

/// Real parts γ of the diagonal Γ, and PV level shifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRates<T> {
    pub gamma0: T,
    pub gamma_plus: Vec<T>,
    pub gamma_minus: Vec<T>,
    /// Im Γ_jj per mode; empty unless requested.
    pub level_shift: Vec<T>,
    pub level_shift0: Option<T>,
}

impl<T: Scalar> DecayRates<T> {
    /// γ_j = γ_{j+} + γ_{j−}.
    pub fn gamma(&self, j: usize) -> T {
        self.gamma_plus[j] + self.gamma_minus[j]
    }

    pub fn zero(modes: usize) -> Self {
        Self {
            gamma0: T::zero(),
            gamma_plus: vec![T::zero(); modes],
            gamma_minus: vec![T::zero(); modes],
            level_shift: vec![],
            level_shift0: None,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.gamma_plus.len()
    }
}

/// γ0 = πΣρ|λ_0|², γ_{j±} = ±πΣρ|λ_{j±}|² at resonance; closed channels give 0.
pub fn decay_rates<T: Scalar>(table: &MatrixElementTable<T>) -> DecayRates<T> {
    let mut r = DecayRates::zero(table.channels.len() / 2);
    for c in 0..table.n_channels() {
        let g = T::PI() * resonant_strength(table, c, table.detuning);
        match table.channels[c].kind {
            ChannelKind::Condensate => r.gamma0 = g,
            ChannelKind::Sqe(j) => r.gamma_plus[j] = g,
            ChannelKind::Pb(j) => r.gamma_minus[j] = -g,
        }
    }
    r
}

/// PV∫dω ρΣ|λ|²/(ω_out − ω) on the background nodes.
fn shift<T: Scalar>(table: &MatrixElementTable<T>, c: usize) -> T {
    let w0 = table.omega_out(c);
    let omegas: Vec<T> = table.nodes.iter().map(|n| n.omega).collect();
    let f: Vec<C<T>> =
        (0..table.nodes.len()).map(|i| C::new(table.nodes[i].rho * table.strength(c, i), T::zero())).collect();
    let f0 = if w0 > T::zero() {
        let (e, o) = table.elements_at(c, w0);
        table.basis.node(w0).rho * (e.norm_sqr() + o.norm_sqr())
    } else {
        T::zero()
    };
    -pv_integral(&omegas, &f, w0, C::new(f0, T::zero())).re
}

/// Rates plus level shifts Im Γ_00 and Im Γ_jj = s_{j+} − s_{j−}.
pub fn decay_rates_with_shifts<T: Scalar>(table: &MatrixElementTable<T>) -> DecayRates<T> {
    let mut r = decay_rates(table);
    let modes = r.n_modes();
    r.level_shift = vec![T::zero(); modes];
    for c in 0..table.n_channels() {
        let s = shift(table, c);
        match table.channels[c].kind {
            ChannelKind::Condensate => r.level_shift0 = Some(s),
            ChannelKind::Sqe(j) => r.level_shift[j] += s,
            ChannelKind::Pb(j) => r.level_shift[j] -= s,
        }
    }
    r
}
