use serde::{Deserialize, Serialize};

use super::{bath_counts, OracleError, OracleTrajectory, Trapped, TruncatedSystem};
use crate::dynamics::PopulationTrajectory;
use crate::outcoupling::d_kernel_sq;
use crate::scalar::Scalar;

/// Parameters deciding where the quasi-steady approximations apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validity<T> {
    /// Λ of the coupling.
    pub strength: T,
    /// Δω of the channel.
    pub width: T,
    /// δω; the Markov regime needs t ≫ 1/δω.
    pub spread: T,
}

impl<T: Scalar> Validity<T> {
    pub fn weak(&self) -> bool {
        self.strength < self.width * T::of(0.1)
    }

    /// Start of the Markov window, taken as 10/δω.
    pub fn markov_onset(&self) -> T {
        T::of(10.0) / self.spread
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableError<T> {
    pub name: String,
    pub max_relative_error: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport<T> {
    pub observables: Vec<ObservableError<T>>,
    /// Times compared, all inside the Markov window.
    pub window: Option<(T, T)>,
    pub weak_coupling: bool,
    /// False when the prediction is used outside its validity region.
    pub in_validity: bool,
    pub notes: Vec<String>,
}

impl<T: Scalar> ComparisonReport<T> {
    pub fn worst(&self) -> T {
        self.observables.iter().map(|o| o.max_relative_error).fold(T::zero(), T::max)
    }
}

/// Relative errors of predicted trapped populations against the oracle at
/// shared times t ≥ 10/δω.
pub fn compare_to_quasi_steady<T: Scalar>(
    reference: &OracleTrajectory<T>,
    predicted: &PopulationTrajectory<T>,
    validity: Validity<T>,
) -> Result<ComparisonReport<T>, OracleError> {
    if reference.t.len() != predicted.t.len()
        || reference.t.iter().zip(&predicted.t).any(|(a, b)| (*a - *b).abs() > T::of(1e-9) * b.abs().max(T::one()))
    {
        return Err(OracleError::Mismatch("time grids differ".into()));
    }
    let modes = predicted.n_modes.first().map_or(0, |v| v.len());
    for w in &reference.rows {
        if let Trapped::Mode(j) = *w {
            if j >= modes {
                return Err(OracleError::Mismatch(format!("mode {j} absent from prediction")));
            }
        }
    }
    let onset = validity.markov_onset();
    let samples: Vec<usize> = (0..reference.t.len()).filter(|&s| reference.t[s] >= onset).collect();
    let mut notes = Vec::new();
    let weak = validity.weak();
    if !weak {
        notes.push(format!(
            "Λ = {:.3e} is not ≪ Δω = {:.3e}; quasi-steady prediction out of validity",
            validity.strength.f64(),
            validity.width.f64()
        ));
    }
    if samples.is_empty() {
        notes.push(format!("no samples beyond the Markov onset t = {:.3e}", onset.f64()));
    }
    let observables = reference
        .rows
        .iter()
        .enumerate()
        .map(|(r, w)| {
            let (name, pred): (String, Vec<T>) = match *w {
                Trapped::Condensate => ("N0".into(), predicted.n0.clone()),
                Trapped::Mode(j) => (format!("n_{j}"), predicted.n_modes.iter().map(|v| v[j]).collect()),
            };
            let err = samples
                .iter()
                .map(|&s| {
                    let o = reference.populations[s][r];
                    (pred[s] - o).abs() / o.abs().max(T::min_positive_value())
                })
                .fold(T::zero(), T::max);
            ObservableError { name, max_relative_error: err }
        })
        .collect();
    Ok(ComparisonReport {
        observables,
        window: samples.first().map(|&a| (reference.t[a], reference.t[*samples.last().unwrap()])),
        weak_coupling: weak,
        in_validity: weak && !samples.is_empty(),
        notes,
    })
}

/// Oracle bath counts against |g|²|D|²·P_r at time t for bath modes within
/// `window` of resonance with single trapped row r; returns the worst relative error.
pub fn spectrum_comparison<T: Scalar>(sys: &TruncatedSystem<T>, t: T, window: T) -> Result<T, OracleError> {
    if sys.rows.len() != 1 {
        return Err(OracleError::Mismatch("spectrum comparison needs one trapped row".into()));
    }
    let row = &sys.rows[0];
    let counts = bath_counts(sys, t)?;
    let mut worst = T::zero();
    for (b, mode) in sys.bath.iter().enumerate() {
        let nu = if mode.anomalous { -sys.detuning(b) } else { sys.detuning(b) };
        if (nu - row.energy).abs() > window {
            continue;
        }
        let pop = if mode.anomalous { row.population + T::one() } else { row.population };
        let pred = mode.coupling[0].norm_sqr() * d_kernel_sq(nu, row.energy, t) * pop;
        worst = worst.max((pred - counts[b]).abs() / counts[b]);
    }
    Ok(worst)
}
