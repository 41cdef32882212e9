use serde::{Deserialize, Serialize};

use super::HfbError;
use crate::config::SimSetup;
use crate::linalg::solve_tridiag;
use crate::scalar::Scalar;

/// Real, nonnegative ground state ψ0 with ∫ψ0² = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondensateState<T> {
    pub psi0: Vec<T>,
    pub mu: T,
    pub n0: T,
    /// Φ(t) = ∫μ dt'; zero at the reference time.
    pub global_phase: T,
    pub residual: T,
}

impl<T: Scalar> CondensateState<T> {
    /// Advances Φ by μ·dt (stationary μ).
    pub fn advance_phase(&mut self, dt: T) {
        self.global_phase += self.mu * dt;
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GpeOptions<T> {
    pub dtau: T,
    pub tol: T,
    pub max_iter: usize,
}

fn hamiltonian_diag<T: Scalar>(setup: &SimSetup<T>, psi: &[T], nbar: &[T], n0: T) -> Vec<T> {
    let u0 = setup.params.interaction_tt;
    (0..psi.len())
        .map(|i| setup.lap_diag + setup.potential[i] + u0 * (n0 * psi[i] * psi[i] + T::of(2.0) * nbar[i]))
        .collect()
}

fn normalize<T: Scalar>(p: &mut [T], dx: T) {
    let nrm = (p.iter().map(|&v| v * v).sum::<T>() * dx).sqrt();
    for v in p.iter_mut() {
        *v /= nrm;
    }
}

/// Ground state of [−½∂² + V + U0(N0ψ0² + 2n̄)]ψ0 = μψ0 by backward-Euler
/// normalized gradient flow: (1 + Δτ(H − μ))ψ_new = ψ, then renormalize.
pub fn solve_gpe<T: Scalar>(
    setup: &SimSetup<T>,
    nbar: &[T],
    n0: T,
    init: Option<&[T]>,
    opts: GpeOptions<T>,
) -> Result<CondensateState<T>, HfbError> {
    let n = setup.n();
    if nbar.len() != n {
        return Err(HfbError::Input(format!("nbar has {} points, grid has {n}", nbar.len())));
    }
    if nbar.iter().any(|&v| v < T::zero()) {
        return Err(HfbError::Input("nbar must be nonnegative".into()));
    }
    if !(n0 >= T::zero()) {
        return Err(HfbError::Input("n0_target must be nonnegative".into()));
    }
    let dx = setup.dx;
    let mut p: Vec<T> = match init {
        Some(q) => q.to_vec(),
        None => setup.x.iter().map(|&x| (-x * x * T::of(0.5)).exp()).collect(),
    };
    normalize(&mut p, dx);
    let off = vec![setup.lap_off * opts.dtau; n - 1];
    let mut residual = T::infinity();
    for _ in 0..opts.max_iter {
        let d = hamiltonian_diag(setup, &p, nbar, n0);
        let mut hp = vec![T::zero(); n];
        for i in 0..n {
            let mut s = d[i] * p[i];
            if i > 0 {
                s += setup.lap_off * p[i - 1];
            }
            if i + 1 < n {
                s += setup.lap_off * p[i + 1];
            }
            hp[i] = s;
        }
        let mu = crate::scalar::dot(&p, &hp) * dx;
        residual = (hp.iter().zip(&p).map(|(&h, &q)| (h - mu * q) * (h - mu * q)).sum::<T>() * dx).sqrt();
        if residual <= opts.tol {
            let sign = if p.iter().copied().sum::<T>() < T::zero() { -T::one() } else { T::one() };
            let peak = p.iter().fold(T::zero(), |a, &b| a.max(b.abs()));
            let floor = peak * T::of(1e-6);
            if p.iter().any(|&v| v * sign < -floor) {
                return Err(HfbError::Nodal);
            }
            let psi0 = p.iter().map(|&v| (v * sign).max(T::zero())).collect();
            return Ok(CondensateState { psi0, mu, n0, global_phase: T::zero(), residual });
        }
        let diag: Vec<T> = d.iter().map(|&di| T::one() + opts.dtau * (di - mu)).collect();
        p = solve_tridiag(&off, &diag, &off, &p);
        normalize(&mut p, dx);
    }
    Err(HfbError::GpeNotConverged { iterations: opts.max_iter, residual: residual.f64() })
}
