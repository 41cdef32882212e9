use rayon::prelude::*;

use super::elements::MatrixElementTable;
use super::kernel::filon_h_weights;
use super::quadrature::channel_grid;
use super::{Channel, OutcouplingError};
use crate::scalar::{cis, Scalar, C};

/// Output wave functions Ψ_f^η(x, t) for every channel.
#[derive(Debug, Clone)]
pub struct OutputFieldSet<T> {
    pub t: T,
    pub x: Vec<T>,
    pub dx: T,
    pub channels: Vec<Channel<T>>,
    pub omega_out: Vec<T>,
    pub psi: Vec<Vec<C<T>>>,
}

impl<T: Scalar> OutputFieldSet<T> {
    /// N_η: (N0, n_j, n_j + 1).
    pub fn populations(&self) -> Vec<T> {
        self.channels.iter().map(|c| c.population).collect()
    }

    /// N_η|Ψ^η(x)|².
    pub fn channel_density(&self, c: usize) -> Vec<T> {
        let p = self.channels[c].population;
        self.psi[c].iter().map(|z| p * z.norm_sqr()).collect()
    }

    /// n_out(x) = Σ_η N_η|Ψ^η(x)|², summed in channel order.
    pub fn density(&self) -> Vec<T> {
        let mut n = vec![T::zero(); self.x.len()];
        for (c, ch) in self.channels.iter().enumerate() {
            for (d, z) in n.iter_mut().zip(&self.psi[c]) {
                *d += ch.population * z.norm_sqr();
            }
        }
        n
    }

    /// ∫N_η|Ψ^η|² dx per channel.
    pub fn channel_numbers(&self) -> Vec<T> {
        (0..self.channels.len()).map(|c| self.channel_density(c).iter().copied().sum::<T>() * self.dx).collect()
    }
}

fn combine<T: Scalar>(sym: &[C<T>], anti: &[C<T>], phase: C<T>) -> Vec<C<T>> {
    let h = sym.len();
    let mut out = vec![C::new(T::zero(), T::zero()); 2 * h];
    for i in 0..h {
        out[h + i] = (sym[i] + anti[i]) * phase;
        out[h - 1 - i] = (sym[i] - anti[i]) * phase;
    }
    out
}

/// Ψ^η(x, t) = ∫dω Σ_branch ρ φ_k(x) λ_kη D_kη(t) e^{−iωt} for one channel.
pub fn channel_field<T: Scalar>(
    table: &MatrixElementTable<T>,
    c: usize,
    t: T,
    window_nodes: usize,
) -> Result<Vec<C<T>>, OutcouplingError> {
    if t < T::zero() {
        return Err(OutcouplingError::NegativeTime);
    }
    let h = table.basis.x_half.len();
    let zero = C::new(T::zero(), T::zero());
    let g = channel_grid(table, c, t, window_nodes)?;
    let w0 = table.omega_out(c);
    let w = filon_h_weights(&g.deltas(w0), t);
    let mut sym = vec![zero; h];
    let mut anti = vec![zero; h];
    let has_e = table.lam_e[c].is_some();
    let has_o = table.lam_o[c].is_some();
    for i in 0..g.nodes.len() {
        let a = w[i] * g.nodes[i].rho;
        let (pe, po) = g.phi(table, i);
        if has_e {
            let ce = a * g.lam_e[i];
            for (s, &p) in sym.iter_mut().zip(pe) {
                *s += ce * p;
            }
        }
        if has_o {
            let co = a * g.lam_o[i];
            for (s, &p) in anti.iter_mut().zip(po) {
                *s += co * p;
            }
        }
    }
    // K = −i e^{−iω0 t} h(δ)
    let e = cis(-w0 * t);
    Ok(combine(&sym, &anti, C::new(e.im, -e.re)))
}

/// Resonant standing-wave part π·Σ_branch ρ φ λ at ω_out (modulus of the
/// long-time on-shell term).
pub fn resonant_field<T: Scalar>(table: &MatrixElementTable<T>, c: usize) -> Vec<C<T>> {
    let w0 = table.omega_out(c);
    let h = table.basis.x_half.len();
    if w0 <= T::zero() {
        return vec![C::new(T::zero(), T::zero()); 2 * h];
    }
    let (pe, po) = table.basis.half_pair(w0);
    let (le, lo) = table.elements_at(c, w0);
    let rho = table.basis.node(w0).rho;
    let sym: Vec<C<T>> = pe.iter().map(|&p| le * (p * rho * T::PI())).collect();
    let anti: Vec<C<T>> = po.iter().map(|&p| lo * (p * rho * T::PI())).collect();
    combine(&sym, &anti, C::new(T::one(), T::zero()))
}

/// Output fields for all channels at time t.
pub fn output_field<T: Scalar>(
    table: &MatrixElementTable<T>,
    x: &[T],
    t: T,
    window_nodes: usize,
) -> Result<OutputFieldSet<T>, OutcouplingError> {
    let psi = (0..table.n_channels())
        .into_par_iter()
        .map(|c| channel_field(table, c, t, window_nodes))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OutputFieldSet {
        t,
        x: x.to_vec(),
        dx: table.basis.dx,
        channels: table.channels.clone(),
        omega_out: (0..table.n_channels()).map(|c| table.omega_out(c)).collect(),
        psi,
    })
}
