use serde::{Deserialize, Serialize};

use super::{
    noncondensate_density, solve_bdg, solve_gpe, thermal_occupation, CondensateState, ExcitationMode, GpeOptions,
    HfbError,
};
use crate::config::{PhysicalParams, SimSetup, SolverParams};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub mu: f64,
    pub n0: f64,
    pub delta_mu: f64,
    pub delta_nbar: f64,
}

/// Converged trap state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HfbSolution<T> {
    pub params: PhysicalParams<T>,
    pub x: Vec<T>,
    pub dx: T,
    pub condensate: CondensateState<T>,
    pub modes: Vec<ExcitationMode<T>>,
    pub nbar: Vec<T>,
    pub temperature: T,
    pub e_cut: T,
    pub trace: Vec<IterationRecord>,
}

impl<T: Scalar> HfbSolution<T> {
    pub fn mu(&self) -> T {
        self.condensate.mu
    }

    pub fn n0(&self) -> T {
        self.condensate.n0
    }

    pub fn integrate(&self, f: &[T]) -> T {
        f.iter().copied().sum::<T>() * self.dx
    }

    pub fn noncondensate_number(&self) -> T {
        self.integrate(&self.nbar)
    }

    pub fn noncondensate_fraction(&self) -> T {
        self.noncondensate_number() / self.params.n_atoms
    }

    /// Total trapped density N0ψ0² + n̄.
    pub fn total_density(&self) -> Vec<T> {
        self.condensate.psi0.iter().zip(&self.nbar).map(|(&p, &nb)| self.n0() * p * p + nb).collect()
    }

    pub fn iterations(&self) -> usize {
        self.trace.len()
    }
}

fn rel_change<T: Scalar>(new: &[T], old: &[T]) -> T {
    let diff = new.iter().zip(old).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt();
    let scale = crate::scalar::norm2(new).sqrt();
    if scale == T::zero() {
        diff
    } else {
        diff / scale
    }
}

/// Fixed point of GPE → BdG → occupations → n̄, with N0 = N_t − ∫n̄ each pass
/// and linear mixing of n̄.
pub fn self_consistent_solve<T: Scalar>(
    setup: &SimSetup<T>,
    solver: &SolverParams<T>,
) -> Result<HfbSolution<T>, HfbError> {
    let n = setup.n();
    let params = setup.params;
    let e_cut = solver.cutoff(params.temperature);
    let gpe = GpeOptions { dtau: solver.gpe_dtau, tol: solver.gpe_tol, max_iter: solver.gpe_max_iter };
    let mut nbar = vec![T::zero(); n];
    let mut psi: Option<Vec<T>> = None;
    let mut prev_mu: Option<T> = None;
    let mut trace = Vec::new();
    for it in 0..solver.scf_max_iter {
        let n0 = params.n_atoms - setup.integrate(&nbar);
        if n0 < T::zero() {
            return Err(HfbError::NegativeCondensate(n0.f64()));
        }
        let cond = solve_gpe(setup, &nbar, n0, psi.as_deref(), gpe)?;
        let mut modes = solve_bdg(setup, &cond, &nbar, e_cut)?;
        for m in modes.iter_mut() {
            m.occupation = thermal_occupation(m.energy, params.temperature)?;
        }
        let fresh = noncondensate_density(&modes, n);
        let next: Vec<T> = if it == 0 {
            fresh
        } else {
            nbar.iter().zip(&fresh).map(|(&o, &f)| (T::one() - solver.mixing) * o + solver.mixing * f).collect()
        };
        let dn = rel_change(&next, &nbar);
        let dmu = prev_mu.map_or(T::zero(), |m| (cond.mu - m).abs());
        trace.push(IterationRecord { mu: cond.mu.f64(), n0: n0.f64(), delta_mu: dmu.f64(), delta_nbar: dn.f64() });
        // On the first pass there is no previous μ; an unchanged n̄ means the
        // next GPE solve would reproduce this one.
        let mu_stable = prev_mu.is_none() || dmu < solver.scf_tol;
        if mu_stable && dn < solver.scf_tol {
            return Ok(HfbSolution {
                params,
                x: setup.x.clone(),
                dx: setup.dx,
                condensate: cond,
                modes,
                nbar,
                temperature: params.temperature,
                e_cut,
                trace,
            });
        }
        prev_mu = Some(cond.mu);
        psi = Some(cond.psi0);
        nbar = next;
    }
    let tail: Vec<String> = trace
        .iter()
        .rev()
        .take(5)
        .map(|r| format!("mu={:.8} dmu={:.2e} dnbar={:.2e}", r.mu, r.delta_mu, r.delta_nbar))
        .collect();
    Err(HfbError::NotConverged { iterations: trace.len(), summary: tail.join("; ") })
}
