use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::elements::MatrixElementTable;
use super::ChannelKind;
use crate::scalar::Scalar;

/// Golden-rule data for one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelRate<T> {
    pub kind: ChannelKind,
    pub omega_out: T,
    pub open: bool,
    /// Σ_branch ρ|λ_{k_res}|².
    pub strength: T,
    /// γ_η = ±π·strength (negative for pair breaking).
    pub gamma: T,
    /// Output rate 2π·strength·n^t_η.
    pub rate: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSummary<T> {
    pub detuning: T,
    pub channels: Vec<ChannelRate<T>>,
    pub condensate: T,
    pub sqe: T,
    pub pb: T,
}

impl<T: Scalar> RateSummary<T> {
    /// dN_out/dt.
    pub fn total(&self) -> T {
        self.condensate + self.sqe + self.pb
    }
}

/// Σ_branch ρ|λ|² at ω_out of channel `c` for the given detuning; zero if closed.
pub fn resonant_strength<T: Scalar>(table: &MatrixElementTable<T>, c: usize, detuning: T) -> T {
    let w0 = table.channels[c].omega_out(table.mu, detuning);
    if w0 <= T::zero() {
        return T::zero();
    }
    let (e, o) = table.elements_at(c, w0);
    table.basis.node(w0).rho * (e.norm_sqr() + o.norm_sqr())
}

/// Per-channel golden-rule rates and the condensate / SQE / PB aggregates.
pub fn golden_rule_rates<T: Scalar>(table: &MatrixElementTable<T>) -> RateSummary<T> {
    rates_at(table, table.detuning)
}

/// Golden-rule rates at another detuning, reusing the table's sources.
pub fn rates_at<T: Scalar>(table: &MatrixElementTable<T>, detuning: T) -> RateSummary<T> {
    let channels: Vec<ChannelRate<T>> = (0..table.n_channels())
        .into_par_iter()
        .map(|c| {
            let ch = table.channels[c];
            let strength = resonant_strength(table, c, detuning);
            let omega_out = ch.omega_out(table.mu, detuning);
            let sign = if matches!(ch.kind, ChannelKind::Pb(_)) { -T::one() } else { T::one() };
            ChannelRate {
                kind: ch.kind,
                omega_out,
                open: omega_out > T::zero(),
                strength,
                gamma: sign * T::PI() * strength,
                rate: T::of(2.0) * T::PI() * strength * ch.population,
            }
        })
        .collect();
    let mut s = RateSummary { detuning, channels, condensate: T::zero(), sqe: T::zero(), pb: T::zero() };
    for r in &s.channels {
        match r.kind {
            ChannelKind::Condensate => s.condensate += r.rate,
            ChannelKind::Sqe(_) => s.sqe += r.rate,
            ChannelKind::Pb(_) => s.pb += r.rate,
        }
    }
    s
}

/// Rates over a detuning scan.
pub fn detuning_scan<T: Scalar>(table: &MatrixElementTable<T>, detunings: &[T]) -> Vec<RateSummary<T>> {
    detunings.iter().map(|&d| rates_at(table, d)).collect()
}
