use serde::{Deserialize, Serialize};

use super::DynamicsError;
use crate::outcoupling::{channel_grid, d2_kernel, d_kernel_sq, ChannelKind, MatrixElementTable, ModeNode};
use crate::scalar::Scalar;

/// Second-order populations at one time, with per-channel loss and output sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeResult<T> {
    pub t: T,
    pub n0: T,
    pub n_modes: Vec<T>,
    /// Σ_k|λ_kη|²·2Re D⁽²⁾_kηη per channel.
    pub loss_fraction: Vec<T>,
    /// Σ_k n_k^η from |D|² on the same nodes.
    pub output_counts: Vec<T>,
    /// Largest relative population change.
    pub max_change: T,
    pub warning: Option<String>,
}

/// Trapezoid weights of a sorted ω node list.
pub fn node_weights<T: Scalar>(nodes: &[ModeNode<T>]) -> Vec<T> {
    let n = nodes.len();
    let half = T::of(0.5);
    (0..n)
        .map(|i| {
            let lo = if i > 0 { nodes[i].omega - nodes[i - 1].omega } else { T::zero() };
            let hi = if i + 1 < n { nodes[i + 1].omega - nodes[i].omega } else { T::zero() };
            half * (lo + hi)
        })
        .collect()
}

/// N0(t) = N0(1 − S_0), n_j(t) = n_j − n_j S_{j+} + (n_j + 1) S_{j−}, with S
/// from the second-order kernel.
pub fn evolve_perturbative<T: Scalar>(
    table: &MatrixElementTable<T>,
    t: T,
    window_nodes: usize,
) -> Result<PerturbativeResult<T>, DynamicsError> {
    let nc = table.n_channels();
    let two = T::of(2.0);
    let mut loss = vec![T::zero(); nc];
    let mut counts = vec![T::zero(); nc];
    for c in 0..nc {
        let g = channel_grid(table, c, t, window_nodes)?;
        let w = node_weights(&g.nodes);
        let w0 = table.omega_out(c);
        let f = g.strengths();
        for i in 0..g.nodes.len() {
            let wi = w[i] * f[i];
            loss[c] += wi * two * d2_kernel(g.nodes[i].omega, w0, t).re;
            counts[c] += wi * d_kernel_sq(g.nodes[i].omega, w0, t);
        }
        counts[c] *= table.channels[c].population;
    }
    let nm = nc / 2;
    let mut n0 = T::zero();
    let mut n0_init = T::one();
    let mut init = vec![T::zero(); nm];
    let mut modes = vec![T::zero(); nm];
    for c in 0..nc {
        let ch = &table.channels[c];
        match ch.kind {
            ChannelKind::Condensate => {
                n0_init = ch.population;
                n0 = ch.population * (T::one() - loss[c]);
            }
            ChannelKind::Sqe(j) => {
                init[j] = ch.population;
                modes[j] -= ch.population * loss[c];
            }
            ChannelKind::Pb(j) => modes[j] += ch.population * loss[c],
        }
    }
    let mut max_change = (n0 - n0_init).abs() / n0_init;
    for j in 0..nm {
        let d = modes[j];
        modes[j] += init[j];
        if init[j] > T::zero() {
            max_change = max_change.max(d.abs() / init[j]);
        }
    }
    let warning = (max_change > T::of(0.1))
        .then(|| format!("population change {:.3} exceeds 10%; second order is unreliable", max_change.f64()));
    Ok(PerturbativeResult { t, n0, n_modes: modes, loss_fraction: loss, output_counts: counts, max_change, warning })
}
