use serde::{Deserialize, Serialize};

use crate::hfb::ExcitationMode;
use crate::scalar::Scalar;

/// Particle changes per output event, for the mode and the condensate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BookkeepingDeltas<T> {
    pub sqe_mode: T,
    pub sqe_condensate: T,
    pub pb_mode: T,
    pub pb_condensate: T,
}

impl<T: Scalar> BookkeepingDeltas<T> {
    pub fn sqe_total(&self) -> T {
        self.sqe_mode + self.sqe_condensate
    }

    pub fn pb_total(&self) -> T {
        self.pb_mode + self.pb_condensate
    }
}

/// SQE: (−1 − 2∫v², +2∫v²); PB: (+1 + 2∫v², −2(1 + ∫v²)).
pub fn bookkeeping_deltas<T: Scalar>(mode: &ExcitationMode<T>, dx: T) -> BookkeepingDeltas<T> {
    let v2 = mode.norm_v(dx);
    let two = T::of(2.0);
    BookkeepingDeltas {
        sqe_mode: -T::one() - two * v2,
        sqe_condensate: two * v2,
        pb_mode: T::one() + two * v2,
        pb_condensate: -two * (T::one() + v2),
    }
}

/// dE_t/dt = μ·dN_t/dt + Σ_j E_j·dn_j/dt.
pub fn energy_rate<T: Scalar>(mu: T, dn_total: T, energies: &[T], dn_modes: &[T]) -> T {
    mu * dn_total + energies.iter().zip(dn_modes).map(|(&e, &d)| e * d).sum::<T>()
}
