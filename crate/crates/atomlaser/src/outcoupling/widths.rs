use super::OutcouplingError;
use crate::hfb::HfbSolution;
use crate::scalar::{Scalar, C};

/// Effective two-photon coupling λ̄ = Ω_ti*·Ω_fi/Δ_i.
pub fn raman_effective_coupling<T: Scalar>(
    rabi_ti: C<T>,
    rabi_fi: C<T>,
    detuning_i: T,
) -> Result<C<T>, OutcouplingError> {
    if detuning_i == T::zero() {
        return Err(OutcouplingError::ResonantIntermediate);
    }
    Ok(rabi_ti.conj() * rabi_fi / detuning_i)
}

/// r0 = √(∫x²|ψ0|² dx).
pub fn rms_width<T: Scalar>(trap: &HfbSolution<T>) -> T {
    let p = &trap.condensate.psi0;
    (trap.x.iter().zip(p).map(|(&x, &v)| x * x * v * v).sum::<T>() * trap.dx).sqrt()
}

/// (Δω0, δω0): 1/(2r0²) for both without a kick; δω0 = |k_em|/(2r0) with one.
pub fn width_estimates<T: Scalar>(r0: T, kick: T) -> (T, T) {
    let case1 = T::one() / (T::of(2.0) * r0 * r0);
    let delta = if kick == T::zero() { case1 } else { kick.abs() / (T::of(2.0) * r0) };
    (case1, delta)
}

pub fn spectral_width_estimates<T: Scalar>(trap: &HfbSolution<T>, kick: T) -> (T, T) {
    width_estimates(rms_width(trap), kick)
}
