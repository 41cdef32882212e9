use rayon::prelude::*;

use super::elements::{to_branches, MatrixElementTable};
use super::kernel::{d_kernel_sq, filon_sq_weights};
use super::quadrature::channel_grid;
use super::OutcouplingError;
use crate::scalar::Scalar;

/// Output spectral density per branch, dN/dω = ρ|λ_±|²|D|² n^t_η.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint<T> {
    pub omega: T,
    pub k: T,
    pub plus: T,
    pub minus: T,
}

impl<T: Scalar> SpectrumPoint<T> {
    pub fn total(&self) -> T {
        self.plus + self.minus
    }
}

/// n_k^η(t) on the background nodes for every channel.
pub fn output_spectrum<T: Scalar>(
    table: &MatrixElementTable<T>,
    t: T,
) -> Result<Vec<Vec<SpectrumPoint<T>>>, OutcouplingError> {
    if t < T::zero() {
        return Err(OutcouplingError::NegativeTime);
    }
    Ok((0..table.n_channels())
        .into_par_iter()
        .map(|c| {
            let w0 = table.omega_out(c);
            let pop = table.channels[c].population;
            table
                .nodes
                .iter()
                .enumerate()
                .map(|(i, n)| {
                    let (lp, lm) = table.branches(c, i);
                    let f = n.rho * d_kernel_sq(n.omega, w0, t) * pop;
                    SpectrumPoint { omega: n.omega, k: n.k, plus: f * lp.norm_sqr(), minus: f * lm.norm_sqr() }
                })
                .collect()
        })
        .collect())
}

/// Channel sum of per-channel spectra, node by node.
pub fn total_spectrum<T: Scalar>(per_channel: &[Vec<SpectrumPoint<T>>]) -> Vec<SpectrumPoint<T>> {
    let mut out = per_channel[0].clone();
    for ch in &per_channel[1..] {
        for (o, p) in out.iter_mut().zip(ch) {
            o.plus += p.plus;
            o.minus += p.minus;
        }
    }
    out
}

/// Σ_k n_k^η(t) per channel: ∫dω ρ Σ_branch|λ|² |D|² n^t_η, exact in t for
/// piecewise-linear ρ|λ|².
pub fn channel_totals<T: Scalar>(
    table: &MatrixElementTable<T>,
    t: T,
    window_nodes: usize,
) -> Result<Vec<T>, OutcouplingError> {
    if t < T::zero() {
        return Err(OutcouplingError::NegativeTime);
    }
    (0..table.n_channels())
        .into_par_iter()
        .map(|c| {
            let g = channel_grid(table, c, t, window_nodes)?;
            let w0 = table.omega_out(c);
            let w = filon_sq_weights(&g.deltas(w0), t);
            let s: T = g.strengths().iter().zip(&w).map(|(&f, &wi)| f * wi).sum();
            Ok(s * table.channels[c].population)
        })
        .collect()
}

/// Branch-resolved elements at a node, for callers that need λ_± directly.
pub fn branch_elements<T: Scalar>(
    table: &MatrixElementTable<T>,
    c: usize,
    node: usize,
) -> (crate::scalar::C<T>, crate::scalar::C<T>) {
    let (e, o) = table.lam_eo(c, node);
    to_branches(e, o)
}
