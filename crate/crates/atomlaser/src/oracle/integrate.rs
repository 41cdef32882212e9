use serde::{Deserialize, Serialize};

use super::{OracleError, Trapped, TruncatedSystem};
use crate::linalg::{expm, CMat};
use crate::outcoupling::d_kernel_sq;
use crate::scalar::{Scalar, C};

/// Trapped populations from the exact linear dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleTrajectory<T> {
    pub t: Vec<T>,
    pub rows: Vec<Trapped>,
    /// `populations[s][r]` for trapped row r at sample s.
    pub populations: Vec<Vec<T>>,
    /// Largest |Σ_s σ_s|U_rs|² − σ_r| seen.
    pub norm_drift: T,
}

impl<T: Scalar> OracleTrajectory<T> {
    pub fn row(&self, r: usize) -> Vec<T> {
        self.populations.iter().map(|p| p[r]).collect()
    }
}

const DRIFT_TOL: f64 = 1e-6;

fn propagator<T: Scalar>(m: &CMat<T>, dt: T) -> Result<CMat<T>, OracleError> {
    Ok(expm(&m.scale(C::new(T::zero(), -dt)))?)
}

/// Propagates the trapped rows of U(t) = exp(−iσ3H t) through `times`,
/// which must start at 0. Equal gaps reuse one exponential.
pub fn integrate_coupled_modes<T: Scalar>(
    sys: &TruncatedSystem<T>,
    times: &[T],
) -> Result<OracleTrajectory<T>, OracleError> {
    if times.first().is_some_and(|&t| t != T::zero()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(OracleError::Times);
    }
    let n = sys.dim();
    let nr = sys.rows.len();
    let m = sys.generator();
    let occ = sys.occupations();
    let sig: Vec<T> = (0..n).map(|i| sys.signature(i)).collect();
    let mut rows: Vec<Vec<C<T>>> = (0..nr)
        .map(|r| {
            let mut v = vec![C::new(T::zero(), T::zero()); n];
            v[r] = C::new(T::one(), T::zero());
            v
        })
        .collect();
    let mut out = OracleTrajectory {
        t: vec![],
        rows: sys.rows.iter().map(|r| r.which).collect(),
        populations: vec![],
        norm_drift: T::zero(),
    };
    let mut cached: Option<(T, CMat<T>)> = None;
    for (s, &t) in times.iter().enumerate() {
        if s > 0 {
            let dt = t - times[s - 1];
            let reuse = cached.as_ref().is_some_and(|(d, _)| (*d - dt).abs() <= T::of(1e-12) * dt);
            if !reuse {
                cached = Some((dt, propagator(&m, dt)?));
            }
            let u = &cached.as_ref().unwrap().1;
            for row in rows.iter_mut() {
                *row = u.left_mul_vec(row);
            }
        }
        let mut pops = Vec::with_capacity(nr);
        for row in rows.iter() {
            let mut p = T::zero();
            let mut norm = T::zero();
            for i in 0..n {
                let a = row[i].norm_sqr();
                p += a * occ[i];
                norm += a * sig[i];
            }
            let drift = (norm - T::one()).abs();
            out.norm_drift = out.norm_drift.max(drift);
            if drift > T::of(DRIFT_TOL) {
                return Err(OracleError::NormDrift { t: t.f64(), drift: drift.f64() });
            }
            pops.push(p);
        }
        out.t.push(t);
        out.populations.push(pops);
    }
    Ok(out)
}

/// ⟨b†b⟩ for every bath mode at time t.
pub fn bath_counts<T: Scalar>(sys: &TruncatedSystem<T>, t: T) -> Result<Vec<T>, OracleError> {
    let n = sys.dim();
    let nr = sys.rows.len();
    let u = propagator(&sys.generator(), t)?;
    let occ = sys.occupations();
    let sig: Vec<T> = (0..n).map(|i| sys.signature(i)).collect();
    Ok((nr..n)
        .map(|r| {
            let anomalous = sig[r] < T::zero();
            (0..n)
                .map(|s| {
                    let w = if anomalous { occ[s] + sig[s] } else { occ[s] };
                    u.at(r, s).norm_sqr() * w
                })
                .sum()
        })
        .collect())
}

/// Second-order trapped populations on the system's own bath: normal modes
/// deplete P_r by Σ|g|²|D|², anomalous ones add (P_r + 1)Σ|g|²|D|².
pub fn perturbative_populations<T: Scalar>(sys: &TruncatedSystem<T>, t: T) -> Vec<T> {
    sys.rows
        .iter()
        .enumerate()
        .map(|(r, row)| {
            let mut loss = T::zero();
            let mut gain = T::zero();
            for (b, mode) in sys.bath.iter().enumerate() {
                let g2 = mode.coupling[r].norm_sqr();
                if mode.anomalous {
                    gain += g2 * d_kernel_sq(-sys.detuning(b), row.energy, t);
                } else {
                    loss += g2 * d_kernel_sq(sys.detuning(b), row.energy, t);
                }
            }
            row.population * (T::one() - loss) + (row.population + T::one()) * gain
        })
        .collect()
}

/// Least-squares slope of −ln y over samples with t in [t_lo, t_hi].
pub fn fit_decay_rate<T: Scalar>(t: &[T], y: &[T], t_lo: T, t_hi: T) -> Result<T, OracleError> {
    let pts: Vec<(T, T)> = t
        .iter()
        .zip(y)
        .filter(|(&ti, &yi)| ti >= t_lo && ti <= t_hi && yi > T::zero())
        .map(|(&ti, &yi)| (ti, yi.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(OracleError::Fit);
    }
    let n = T::of_usize(pts.len());
    let mt = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: T = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    Ok(-sxy / sxx)
}

/// Angular frequency of y(t) from its crossings of the midrange, linearly interpolated.
pub fn oscillation_frequency<T: Scalar>(t: &[T], y: &[T]) -> Option<T> {
    let hi = y.iter().copied().fold(T::neg_infinity(), T::max);
    let lo = y.iter().copied().fold(T::infinity(), T::min);
    let mean = (hi + lo) * T::of(0.5);
    let mut cross = Vec::new();
    for i in 1..y.len() {
        let (a, b) = (y[i - 1] - mean, y[i] - mean);
        if a == T::zero() {
            cross.push(t[i - 1]);
        } else if a * b < T::zero() {
            cross.push(t[i - 1] + (t[i] - t[i - 1]) * a / (a - b));
        }
    }
    if cross.len() < 2 {
        return None;
    }
    let span = cross[cross.len() - 1] - cross[0];
    Some(T::PI() * T::of_usize(cross.len() - 1) / span)
}
