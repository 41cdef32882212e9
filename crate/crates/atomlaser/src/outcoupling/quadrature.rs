//! Per-channel ω quadrature grid: the shared background plus a refined
//! window of ±20π/t around an open resonance.

use rayon::prelude::*;

use super::elements::MatrixElementTable;
use super::modes::ModeNode;
use super::OutcouplingError;
use crate::scalar::{Scalar, C};

/// Minimum window size that resolves π/t.
pub const MIN_WINDOW_NODES: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeOrigin {
    Background(usize),
    /// Index into `extra_phi`.
    Window(usize),
}

#[derive(Debug, Clone)]
pub struct ChannelGrid<T> {
    pub nodes: Vec<ModeNode<T>>,
    pub lam_e: Vec<C<T>>,
    pub lam_o: Vec<C<T>>,
    pub origin: Vec<NodeOrigin>,
    pub extra_phi: Vec<(Vec<T>, Vec<T>)>,
}

impl<T: Scalar> ChannelGrid<T> {
    pub fn deltas(&self, omega0: T) -> Vec<T> {
        self.nodes.iter().map(|n| n.omega - omega0).collect()
    }

    /// Half-grid φ_e, φ_o of node `i`.
    pub fn phi<'a>(&'a self, table: &'a MatrixElementTable<T>, i: usize) -> &'a (Vec<T>, Vec<T>) {
        match self.origin[i] {
            NodeOrigin::Background(b) => &table.phi[b],
            NodeOrigin::Window(w) => &self.extra_phi[w],
        }
    }

    /// ρ Σ_branch |λ|² per node.
    pub fn strengths(&self) -> Vec<T> {
        self.nodes
            .iter()
            .zip(self.lam_e.iter().zip(&self.lam_o))
            .map(|(n, (e, o))| n.rho * (e.norm_sqr() + o.norm_sqr()))
            .collect()
    }
}

fn local_spacing<T: Scalar>(nodes: &[ModeNode<T>], omega: T) -> T {
    let i = nodes.partition_point(|n| n.omega < omega);
    let lo = i.saturating_sub(1);
    let hi = (i + 1).min(nodes.len() - 1);
    if hi > lo {
        (nodes[hi].omega - nodes[lo].omega) / T::of_usize(hi - lo)
    } else {
        T::infinity()
    }
}

/// Builds the grid for channel `c` at time `t` with `window_nodes` refined nodes.
pub fn channel_grid<T: Scalar>(
    table: &MatrixElementTable<T>,
    c: usize,
    t: T,
    window_nodes: usize,
) -> Result<ChannelGrid<T>, OutcouplingError> {
    let bg = &table.nodes;
    let omega0 = table.omega_out(c);
    let mut window = None;
    if table.is_open(c) && t > T::zero() && !bg.is_empty() {
        let half = T::of(20.0) * T::PI() / t;
        let lo = (omega0 - half).max(bg[0].omega);
        let hi = (omega0 + half).min(bg[bg.len() - 1].omega);
        let step = T::of(2.0) * half / T::of_usize(window_nodes.max(1));
        let spacing = local_spacing(bg, omega0);
        if step < spacing && hi > lo {
            if window_nodes < MIN_WINDOW_NODES {
                return Err(OutcouplingError::Window(MIN_WINDOW_NODES));
            }
            window = Some((lo, hi, step));
        } else if spacing >= T::PI() / t {
            let k_max = bg[bg.len() - 1].k;
            let needed = (k_max * table.basis.velocity(table.basis.k_of(omega0)) * t / T::PI()).ceil();
            return Err(OutcouplingError::Resolution {
                omega: omega0.f64(),
                spacing: spacing.f64(),
                needed: (T::PI() / t).f64(),
                n_omega: needed.to_usize().unwrap_or(usize::MAX),
            });
        }
    }
    let mut nodes = Vec::with_capacity(bg.len() + window_nodes);
    let mut origin = Vec::with_capacity(nodes.capacity());
    let mut lam_e = Vec::with_capacity(nodes.capacity());
    let mut lam_o = Vec::with_capacity(nodes.capacity());
    let mut extra_phi = Vec::new();
    let push_bg = |i: usize,
                   nodes: &mut Vec<ModeNode<T>>,
                   origin: &mut Vec<NodeOrigin>,
                   le: &mut Vec<C<T>>,
                   lo: &mut Vec<C<T>>| {
        let (e, o) = table.lam_eo(c, i);
        nodes.push(bg[i]);
        origin.push(NodeOrigin::Background(i));
        le.push(e);
        lo.push(o);
    };
    match window {
        None => {
            for i in 0..bg.len() {
                push_bg(i, &mut nodes, &mut origin, &mut lam_e, &mut lam_o);
            }
        }
        Some((lo, hi, step)) => {
            for i in 0..bg.len() {
                if bg[i].omega < lo {
                    push_bg(i, &mut nodes, &mut origin, &mut lam_e, &mut lam_o);
                }
            }
            let centre = omega0;
            let mut fresh: Vec<ModeNode<T>> = Vec::new();
            // symmetric about ω0 with no node on it
            let m = window_nodes / 2;
            for i in (0..m).rev() {
                let w = centre - (T::of_usize(i) + T::of(0.5)) * step;
                if w > lo && w < hi {
                    fresh.push(table.basis.node(w));
                }
            }
            for i in 0..m {
                let w = centre + (T::of_usize(i) + T::of(0.5)) * step;
                if w > lo && w < hi {
                    fresh.push(table.basis.node(w));
                }
            }
            let computed: Vec<((Vec<T>, Vec<T>), (C<T>, C<T>))> = fresh
                .par_iter()
                .map(|n| {
                    let pair = table.basis.half_pair(n.omega);
                    let el = table.sources[c].overlaps(&pair.0, &pair.1, table.basis.dx);
                    (pair, el)
                })
                .collect();
            for (n, (pair, (e, o))) in fresh.into_iter().zip(computed) {
                nodes.push(n);
                origin.push(NodeOrigin::Window(extra_phi.len()));
                lam_e.push(e);
                lam_o.push(o);
                extra_phi.push(pair);
            }
            for i in 0..bg.len() {
                if bg[i].omega > hi {
                    push_bg(i, &mut nodes, &mut origin, &mut lam_e, &mut lam_o);
                }
            }
        }
    }
    Ok(ChannelGrid { nodes, lam_e, lam_o, origin, extra_phi })
}
