use crate::hfb::HfbSolution;
use crate::scalar::Scalar;

/// Two-component (upper, lower) trapped object with its σ3 signature.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector<T> {
    pub upper: Vec<T>,
    pub lower: Vec<T>,
    pub energy: T,
    /// +1, −1, or 0 for the condensate.
    pub sign: i8,
}

impl<T: Scalar> ChannelVector<T> {
    /// Dynamical phase E·t.
    pub fn phase(&self, t: T) -> T {
        self.energy * t
    }
}

/// ξ_0 = (ψ0, ψ0), then ξ_j = (u_j, v_j) and ξ_{−j} = (v_j, u_j) per mode.
pub fn channel_vectors<T: Scalar>(trap: &HfbSolution<T>) -> Vec<ChannelVector<T>> {
    let psi = &trap.condensate.psi0;
    let mut out = vec![ChannelVector { upper: psi.clone(), lower: psi.clone(), energy: trap.mu(), sign: 0 }];
    for m in &trap.modes {
        out.push(ChannelVector { upper: m.u.clone(), lower: m.v.clone(), energy: m.energy, sign: 1 });
        out.push(ChannelVector { upper: m.v.clone(), lower: m.u.clone(), energy: -m.energy, sign: -1 });
    }
    out
}

/// (∫ξ_a†σ3ξ_b dx, ∫ξ_a†ξ_b dx).
pub fn metric_products<T: Scalar>(a: &ChannelVector<T>, b: &ChannelVector<T>, dx: T) -> (T, T) {
    let mut s3 = T::zero();
    let mut id = T::zero();
    for i in 0..a.upper.len() {
        let uu = a.upper[i] * b.upper[i];
        let ll = a.lower[i] * b.lower[i];
        s3 += uu - ll;
        id += uu + ll;
    }
    (s3 * dx, id * dx)
}
