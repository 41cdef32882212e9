use serde::{Deserialize, Serialize};

use super::{DecayRates, DynamicsError};
use crate::hfb::HfbSolution;
use crate::ode::Dopri5;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct AdiabaticOptions<T> {
    pub rtol: T,
    /// Undershoot below −clip_tol·scale is an error; smaller ones are clipped.
    pub clip_tol: T,
}

impl<T: Scalar> Default for AdiabaticOptions<T> {
    fn default() -> Self {
        Self { rtol: T::of(1e-9), clip_tol: T::of(1e-6) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationTrajectory<T> {
    pub t: Vec<T>,
    pub n0: Vec<T>,
    /// `n_modes[s][j]` at sample s.
    pub n_modes: Vec<Vec<T>>,
    pub n_trap: Vec<T>,
    pub e_trap: Vec<T>,
    pub out_coherent: Vec<T>,
    pub out_sqe: Vec<T>,
    pub out_pb: Vec<T>,
    pub diagnostics: Vec<String>,
    pub stopped_at: Option<T>,
}

impl<T: Scalar> PopulationTrajectory<T> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn n_out(&self, s: usize) -> T {
        self.out_coherent[s] + self.out_sqe[s] + self.out_pb[s]
    }

    /// Σ_j n_j at sample s.
    pub fn quasiparticles(&self, s: usize) -> T {
        self.n_modes[s].iter().copied().sum()
    }

    /// max_s |N_t(s) + N_out(s) − N_t(0)| / N_t(0).
    pub fn closure_error(&self) -> T {
        let n = self.n_trap[0];
        (0..self.len()).map(|s| (self.n_trap[s] + self.n_out(s) - n).abs() / n).fold(T::zero(), T::max)
    }
}

/// Frozen-basis rate equations. State: N0, n_j, then cumulative coherent, SQE and PB output.
pub fn evolve_adiabatic<T: Scalar>(
    rates: &DecayRates<T>,
    trap: &HfbSolution<T>,
    t_grid: &[T],
    opts: AdiabaticOptions<T>,
) -> Result<PopulationTrajectory<T>, DynamicsError> {
    let nm = trap.modes.len();
    if rates.n_modes() != nm {
        return Err(DynamicsError::Mismatch { rates: rates.n_modes(), trap: nm });
    }
    let dx = trap.dx;
    let two = T::of(2.0);
    let u2: Vec<T> = trap.modes.iter().map(|m| m.norm_u(dx)).collect();
    let v2: Vec<T> = trap.modes.iter().map(|m| m.norm_v(dx)).collect();
    let energies: Vec<T> = trap.modes.iter().map(|m| m.energy).collect();
    let mu = trap.mu();

    let mut y0 = Vec::with_capacity(nm + 4);
    y0.push(trap.n0());
    y0.extend(trap.modes.iter().map(|m| m.occupation));
    y0.extend([T::zero(); 3]);

    let rhs = |_t: T, y: &[T], dy: &mut [T]| {
        let n0 = y[0];
        let mut dn0 = -two * rates.gamma0 * n0;
        let (mut sqe, mut pb) = (T::zero(), T::zero());
        for j in 0..nm {
            let n = y[1 + j];
            let s = -two * rates.gamma_plus[j] * n;
            let p = -two * rates.gamma_minus[j] * (n + T::one());
            dy[1 + j] = s + p;
            dn0 -= two * (v2[j] * s + u2[j] * p);
            sqe -= s;
            pb += p;
        }
        dy[0] = dn0;
        dy[nm + 1] = two * rates.gamma0 * n0;
        dy[nm + 2] = sqe;
        dy[nm + 3] = pb;
    };
    let scale = y0.iter().fold(T::one(), |a, &b| a.max(b.abs()));
    let ode = Dopri5::new(opts.rtol, opts.rtol * T::of(1e-3));
    let res = ode.integrate(rhs, &y0, t_grid, |y| y[0] <= T::zero())?;

    let n_trap_of = |y: &[T]| y[0] + (0..nm).map(|j| (u2[j] + v2[j]) * y[1 + j] + v2[j]).sum::<T>();
    let nt0 = n_trap_of(&y0);
    let e_ref: T = mu * nt0 + (0..nm).map(|j| energies[j] * y0[1 + j]).sum::<T>();

    let mut tr = PopulationTrajectory {
        t: vec![],
        n0: vec![],
        n_modes: vec![],
        n_trap: vec![],
        e_trap: vec![],
        out_coherent: vec![],
        out_sqe: vec![],
        out_pb: vec![],
        diagnostics: vec![],
        stopped_at: res.stopped_at,
    };
    for (&t, y) in res.times.iter().zip(&res.states) {
        let mut y = y.clone();
        for i in 0..=nm {
            if y[i] < T::zero() {
                if y[i] < -opts.clip_tol * scale {
                    return Err(DynamicsError::Undershoot { index: i, value: y[i].f64() });
                }
                tr.diagnostics.push(format!("clipped population {i} = {:e} at t = {}", y[i].f64(), t.f64()));
                y[i] = T::zero();
            }
        }
        let nt = n_trap_of(&y);
        let e = e_ref + mu * (nt - nt0) + (0..nm).map(|j| energies[j] * (y[1 + j] - y0[1 + j])).sum::<T>();
        tr.t.push(t);
        tr.n0.push(y[0]);
        tr.n_modes.push(y[1..=nm].to_vec());
        tr.n_trap.push(nt);
        tr.e_trap.push(e);
        tr.out_coherent.push(y[nm + 1]);
        tr.out_sqe.push(y[nm + 2]);
        tr.out_pb.push(y[nm + 3]);
    }
    if let Some(ts) = res.stopped_at {
        tr.diagnostics.push(format!("condensate exhausted at t = {}; trajectory stopped", ts.f64()));
    }
    Ok(tr)
}
