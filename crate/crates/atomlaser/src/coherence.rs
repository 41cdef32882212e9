//! First- and second-order coherence of the output beam at equal times.

use serde::{Deserialize, Serialize};

use crate::outcoupling::{ChannelKind, OutputFieldSet};
use crate::scalar::{Scalar, C};

/// Points with n_out ≤ this fraction of the peak density are nodes.
pub const DEFAULT_NODE_FRACTION: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoherenceError {
    #[error("Cauchy-Schwarz violated at ({0}, {1})")]
    CauchySchwarz(usize, usize),
    #[error("grid index {0} out of range")]
    Index(usize),
}

/// A coherence value, or a gap where the density vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Coh<V> {
    Value(V),
    Node,
}

impl<V: Copy> Coh<V> {
    pub fn value(&self) -> Option<V> {
        match *self {
            Coh::Value(v) => Some(v),
            Coh::Node => None,
        }
    }
}

/// Densities entering g1 and g2, all from the same channel sums.
#[derive(Debug, Clone)]
pub struct Components<T> {
    pub n_out: Vec<T>,
    /// N0|Ψ^0|².
    pub n_condensate: Vec<T>,
    /// ñ = Σ_j [n_j|Ψ^{j+}|² + (n_j + 1)|Ψ^{j−}|²].
    pub n_tilde: Vec<T>,
    /// m̃ = Σ_j Ψ^{j+}Ψ^{j−}(2n_j + 1).
    pub m_tilde: Vec<C<T>>,
    pub node: Vec<bool>,
}

pub fn components<T: Scalar>(fields: &OutputFieldSet<T>, node_fraction: T) -> Components<T> {
    let n_out = fields.density();
    let m = n_out.len();
    let zero = C::new(T::zero(), T::zero());
    let mut n_condensate = vec![T::zero(); m];
    let mut m_tilde = vec![zero; m];
    let mut plus: Option<usize> = None;
    for (c, ch) in fields.channels.iter().enumerate() {
        match ch.kind {
            ChannelKind::Condensate => {
                for (d, z) in n_condensate.iter_mut().zip(&fields.psi[c]) {
                    *d += ch.population * z.norm_sqr();
                }
            }
            ChannelKind::Sqe(_) => plus = Some(c),
            ChannelKind::Pb(j) => {
                let p = plus.take().expect("j+ precedes j−");
                debug_assert_eq!(fields.channels[p].kind, ChannelKind::Sqe(j));
                let w = T::of(2.0) * fields.channels[p].population + T::one();
                for (mt, (a, b)) in m_tilde.iter_mut().zip(fields.psi[p].iter().zip(&fields.psi[c])) {
                    *mt += a * b * w;
                }
            }
        }
    }
    let n_tilde: Vec<T> = n_out.iter().zip(&n_condensate).map(|(&n, &c)| n - c).collect();
    let peak = n_out.iter().fold(T::zero(), |a, &b| a.max(b));
    let node = n_out.iter().map(|&n| n <= peak * node_fraction || n <= T::zero()).collect();
    Components { n_out, n_condensate, n_tilde, m_tilde, node }
}

/// g1(x1, x2) = Σ_η N_η Ψ_η*(x1)Ψ_η(x2)/√(n_out(x1)n_out(x2)).
pub fn g1<T: Scalar>(
    fields: &OutputFieldSet<T>,
    comp: &Components<T>,
    i1: usize,
    i2: usize,
) -> Result<Coh<C<T>>, CoherenceError> {
    let m = comp.n_out.len();
    if i1 >= m {
        return Err(CoherenceError::Index(i1));
    }
    if i2 >= m {
        return Err(CoherenceError::Index(i2));
    }
    if comp.node[i1] || comp.node[i2] {
        return Ok(Coh::Node);
    }
    if i1 == i2 {
        return Ok(Coh::Value(C::new(T::one(), T::zero())));
    }
    let mut s = C::new(T::zero(), T::zero());
    for (c, ch) in fields.channels.iter().enumerate() {
        s += fields.psi[c][i1].conj() * fields.psi[c][i2] * ch.population;
    }
    let prod = comp.n_out[i1] * comp.n_out[i2];
    if s.norm_sqr() > prod * (T::one() + T::of(1e-9)) {
        return Err(CoherenceError::CauchySchwarz(i1, i2));
    }
    Ok(Coh::Value(s / prod.sqrt()))
}

/// g1(x1, ·) over the whole grid.
pub fn g1_row<T: Scalar>(
    fields: &OutputFieldSet<T>,
    comp: &Components<T>,
    i1: usize,
) -> Result<Vec<Coh<C<T>>>, CoherenceError> {
    (0..comp.n_out.len()).map(|i2| g1(fields, comp, i1, i2)).collect()
}

/// g2(x) = 1 + [2Re(n0ñ + (Ψ0*)²N0 m̃) + ñ² + |m̃|²]/n_out².
pub fn g2<T: Scalar>(fields: &OutputFieldSet<T>, comp: &Components<T>, i: usize) -> Result<Coh<T>, CoherenceError> {
    if i >= comp.n_out.len() {
        return Err(CoherenceError::Index(i));
    }
    if comp.node[i] {
        return Ok(Coh::Node);
    }
    let c0 = fields.channels.iter().position(|c| c.kind == ChannelKind::Condensate);
    let pair = match c0 {
        Some(c) => {
            let p = fields.psi[c][i].conj();
            p * p * fields.channels[c].population * comp.m_tilde[i]
        }
        None => C::new(T::zero(), T::zero()),
    };
    let nt = comp.n_tilde[i];
    let n = comp.n_out[i];
    let num = T::of(2.0) * (comp.n_condensate[i] * nt + pair.re) + nt * nt + comp.m_tilde[i].norm_sqr();
    Ok(Coh::Value(T::one() + num / (n * n)))
}

pub fn g2_profile<T: Scalar>(fields: &OutputFieldSet<T>, comp: &Components<T>) -> Result<Vec<Coh<T>>, CoherenceError> {
    (0..comp.n_out.len()).map(|i| g2(fields, comp, i)).collect()
}

/// Index of the grid point closest to x.
pub fn nearest_index<T: Scalar>(grid: &[T], x: T) -> usize {
    let mut best = 0;
    for (i, &g) in grid.iter().enumerate() {
        if (g - x).abs() < (grid[best] - x).abs() {
            best = i;
        }
    }
    best
}
