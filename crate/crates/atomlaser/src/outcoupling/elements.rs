use rayon::prelude::*;

use super::modes::{default_omega_max, ModeBasis, ModeNode};
use super::{channels, Channel, CouplingSpec, OutcouplingError};
use crate::config::OutputModeGrid;
use crate::hfb::HfbSolution;
use crate::scalar::{Scalar, C};

/// Parity-split source λ̄(x)e^{ik_em x}ψ_t(x) on the half grid:
/// `sym` = f(x) + f(−x), `anti` = f(x) − f(−x). Vanishing parts are `None`.
#[derive(Debug, Clone)]
pub struct ChannelSource<T> {
    pub sym: Option<Vec<C<T>>>,
    pub anti: Option<Vec<C<T>>>,
}

pub fn channel_source<T: Scalar>(coupling: &CouplingSpec<T>, trapped: &[T], x: &[T]) -> ChannelSource<T> {
    let n = x.len();
    let h = n / 2;
    let f: Vec<C<T>> =
        (0..n).map(|i| crate::scalar::cis(coupling.kick * x[i]) * (coupling.amplitude[i] * trapped[i])).collect();
    let sym: Vec<C<T>> = (0..h).map(|i| f[h + i] + f[h - 1 - i]).collect();
    let anti: Vec<C<T>> = (0..h).map(|i| f[h + i] - f[h - 1 - i]).collect();
    let scale = f.iter().fold(T::zero(), |a, z| a.max(z.norm()));
    let negligible = |v: &[C<T>]| v.iter().all(|z| z.norm() <= scale * T::of(1e-14));
    ChannelSource {
        sym: if negligible(&sym) { None } else { Some(sym) },
        anti: if negligible(&anti) { None } else { Some(anti) },
    }
}

fn half_dot<T: Scalar>(phi: &[T], f: &[C<T>]) -> C<T> {
    let mut re = T::zero();
    let mut im = T::zero();
    for (&p, z) in phi.iter().zip(f) {
        re += p * z.re;
        im += p * z.im;
    }
    C::new(re, im)
}

impl<T: Scalar> ChannelSource<T> {
    /// (λ_e, λ_o) = (∫φ_e f, ∫φ_o f).
    pub fn overlaps(&self, e: &[T], o: &[T], dx: T) -> (C<T>, C<T>) {
        let z = C::new(T::zero(), T::zero());
        let le = self.sym.as_ref().map_or(z, |s| half_dot(e, s) * dx);
        let lo = self.anti.as_ref().map_or(z, |s| half_dot(o, s) * dx);
        (le, lo)
    }
}

/// λ_{kη} for every channel and output-mode node.
#[derive(Debug, Clone)]
pub struct MatrixElementTable<T> {
    pub basis: ModeBasis<T>,
    pub nodes: Vec<ModeNode<T>>,
    /// Half-grid (φ_e, φ_o) per node.
    pub phi: Vec<(Vec<T>, Vec<T>)>,
    pub channels: Vec<Channel<T>>,
    pub sources: Vec<ChannelSource<T>>,
    /// Per channel, per node; `None` when the parity component vanishes.
    pub lam_e: Vec<Option<Vec<C<T>>>>,
    pub lam_o: Vec<Option<Vec<C<T>>>>,
    pub mu: T,
    pub detuning: T,
    pub kick: T,
    pub omega_max: T,
}

impl<T: Scalar> MatrixElementTable<T> {
    pub fn omega_out(&self, c: usize) -> T {
        self.channels[c].omega_out(self.mu, self.detuning)
    }

    pub fn is_open(&self, c: usize) -> bool {
        self.omega_out(c) > T::zero()
    }

    fn zero() -> C<T> {
        C::new(T::zero(), T::zero())
    }

    pub fn lam_eo(&self, c: usize, node: usize) -> (C<T>, C<T>) {
        (
            self.lam_e[c].as_ref().map_or(Self::zero(), |v| v[node]),
            self.lam_o[c].as_ref().map_or(Self::zero(), |v| v[node]),
        )
    }

    /// Branch elements (λ_+, λ_−) = ((λ_e − iλ_o)/√2, (λ_e + iλ_o)/√2).
    pub fn branches(&self, c: usize, node: usize) -> (C<T>, C<T>) {
        let (le, lo) = self.lam_eo(c, node);
        to_branches(le, lo)
    }

    /// Σ_branch |λ|² at a node.
    pub fn strength(&self, c: usize, node: usize) -> T {
        let (le, lo) = self.lam_eo(c, node);
        le.norm_sqr() + lo.norm_sqr()
    }

    /// (λ_e, λ_o) at an arbitrary energy, computed directly.
    pub fn elements_at(&self, c: usize, omega: T) -> (C<T>, C<T>) {
        let (e, o) = self.basis.half_pair(omega);
        self.sources[c].overlaps(&e, &o, self.basis.dx)
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }
}

pub fn to_branches<T: Scalar>(le: C<T>, lo: C<T>) -> (C<T>, C<T>) {
    let r = T::one() / T::of(2.0).sqrt();
    let i_lo = C::new(-lo.im, lo.re);
    ((le - i_lo) * r, (le + i_lo) * r)
}

/// Table without background nodes, enough for resonant quantities.
pub fn resonance_table<T: Scalar>(
    coupling: &CouplingSpec<T>,
    trap: &HfbSolution<T>,
    grid: &OutputModeGrid<T>,
) -> Result<MatrixElementTable<T>, OutcouplingError> {
    build(coupling, trap, grid, false)
}

/// Tabulates λ_{kη} = ∫φ_k*(x) λ̄(x) e^{ik_em x} ψ_t^η(x) dx on the background grid.
pub fn matrix_elements<T: Scalar>(
    coupling: &CouplingSpec<T>,
    trap: &HfbSolution<T>,
    grid: &OutputModeGrid<T>,
) -> Result<MatrixElementTable<T>, OutcouplingError> {
    build(coupling, trap, grid, true)
}

fn build<T: Scalar>(
    coupling: &CouplingSpec<T>,
    trap: &HfbSolution<T>,
    grid: &OutputModeGrid<T>,
    background: bool,
) -> Result<MatrixElementTable<T>, OutcouplingError> {
    if coupling.amplitude.len() != trap.x.len() {
        return Err(OutcouplingError::Profile { got: coupling.amplitude.len(), want: trap.x.len() });
    }
    let basis = ModeBasis::new(trap, grid);
    let omega_max = if background {
        grid.omega_max.unwrap_or_else(|| default_omega_max(trap.e_cut)).min(basis.omega_ceiling())
    } else {
        basis.omega_ceiling()
    };
    let chans = channels(trap);
    let mu = trap.mu();
    let uncovered: Vec<f64> =
        chans.iter().map(|c| c.omega_out(mu, coupling.detuning)).filter(|&w| w > omega_max).map(|w| w.f64()).collect();
    if !uncovered.is_empty() {
        return Err(OutcouplingError::Uncovered { omega_max: omega_max.f64(), uncovered });
    }
    let nodes = if background { basis.background_nodes(omega_max, grid.n_omega) } else { vec![] };
    let phi = basis.tables(&nodes);
    let sources: Vec<ChannelSource<T>> =
        chans.par_iter().map(|c| channel_source(coupling, c.trapped(trap), &trap.x)).collect();
    let dx = trap.dx;
    let lam: Vec<(Option<Vec<C<T>>>, Option<Vec<C<T>>>)> = sources
        .par_iter()
        .map(|s| {
            let le = s.sym.as_ref().map(|f| phi.iter().map(|(e, _)| half_dot(e, f) * dx).collect());
            let lo = s.anti.as_ref().map(|f| phi.iter().map(|(_, o)| half_dot(o, f) * dx).collect());
            (le, lo)
        })
        .collect();
    let (lam_e, lam_o) = lam.into_iter().unzip();
    Ok(MatrixElementTable {
        basis,
        nodes,
        phi,
        channels: chans,
        sources,
        lam_e,
        lam_o,
        mu,
        detuning: coupling.detuning,
        kick: coupling.kick,
        omega_max,
    })
}
