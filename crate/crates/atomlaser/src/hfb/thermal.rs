use super::{ExcitationMode, HfbError};
use crate::scalar::Scalar;

/// Bose–Einstein occupation 1/(e^{E/T} − 1), zero at T = 0.
pub fn thermal_occupation<T: Scalar>(energy: T, temperature: T) -> Result<T, HfbError> {
    if !(energy > T::zero()) {
        return Err(HfbError::NonPositiveEnergy(energy.f64()));
    }
    if temperature < T::zero() {
        return Err(HfbError::Input("temperature must be nonnegative".into()));
    }
    if temperature == T::zero() {
        return Ok(T::zero());
    }
    Ok(T::one() / (energy / temperature).exp_m1())
}

/// n̄(x) = Σ_j [n_j(u_j² + v_j²) + v_j²].
pub fn noncondensate_density<T: Scalar>(modes: &[ExcitationMode<T>], n_points: usize) -> Vec<T> {
    let mut nbar = vec![T::zero(); n_points];
    for m in modes {
        for ((d, &u), &v) in nbar.iter_mut().zip(&m.u).zip(&m.v) {
            *d += m.occupation * (u * u + v * v) + v * v;
        }
    }
    nbar
}
