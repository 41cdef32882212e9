use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CondensateState, HfbError};
use crate::config::SimSetup;
use crate::linalg::{sym_eigen, tridiag_eigen_range};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            Parity::Even => T::one(),
            Parity::Odd => -T::one(),
        }
    }
}

/// One Bogoliubov quasiparticle; u, v are real on the full grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationMode<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub energy: T,
    pub occupation: T,
    pub parity: Parity,
}

impl<T: Scalar> ExcitationMode<T> {
    pub fn norm_u(&self, dx: T) -> T {
        crate::scalar::norm2(&self.u) * dx
    }

    pub fn norm_v(&self, dx: T) -> T {
        crate::scalar::norm2(&self.v) * dx
    }
}

/// Spectral window of S kept for the reduced problem, relative to E_cut.
fn basis_ceiling<T: Scalar>(e_cut: T) -> T {
    T::of(1.3) * e_cut + T::of(20.0)
}

struct Sector<T> {
    parity: Parity,
    eps: Vec<T>,
    /// Half-grid eigenvectors of S, unit discrete norm.
    phi: Vec<Vec<T>>,
}

/// S = −½∂² + V − μ + U0(N0ψ0² + 2n̄) restricted to one parity on x > 0.
fn sector<T: Scalar>(
    setup: &SimSetup<T>,
    cond: &CondensateState<T>,
    nbar: &[T],
    parity: Parity,
    ceiling: T,
) -> Result<Sector<T>, HfbError> {
    let n = setup.n();
    let h = n / 2;
    let u0 = setup.params.interaction_tt;
    let mut d: Vec<T> = (h..n)
        .map(|i| {
            setup.lap_diag + setup.potential[i] - cond.mu
                + u0 * (cond.n0 * cond.psi0[i] * cond.psi0[i] + T::of(2.0) * nbar[i])
        })
        .collect();
    // mirror neighbour f(x_{h−1}) = ±f(x_h)
    d[0] += parity.sign::<T>() * setup.lap_off;
    let e = vec![setup.lap_off; h - 1];
    let eig = tridiag_eigen_range(&d, &e, -T::of(1e3), ceiling);
    let mut eps = eig.values;
    let mut phi = eig.vectors;
    let zero_tol = T::of(1e-4);
    if parity == Parity::Even {
        // the condensate itself is the zero mode of S
        if eps.is_empty() || eps[0].abs() > zero_tol {
            return Err(HfbError::Input(format!(
                "condensate is not a zero mode of S (lowest even eigenvalue {:?})",
                eps.first().map(|v| v.f64())
            )));
        }
        eps.remove(0);
        phi.remove(0);
    }
    if let Some(&lo) = eps.first() {
        if lo <= T::zero() {
            return Err(HfbError::Unstable(lo.f64()));
        }
    }
    Ok(Sector { parity, eps, phi })
}

fn sector_modes<T: Scalar>(
    setup: &SimSetup<T>,
    cond: &CondensateState<T>,
    sec: &Sector<T>,
    e_cut: T,
) -> Result<Vec<(T, Vec<T>, Vec<T>)>, HfbError> {
    let n = setup.n();
    let h = n / 2;
    let m = sec.eps.len();
    if m == 0 {
        return Ok(vec![]);
    }
    let u0 = setup.params.interaction_tt;
    let a: Vec<T> = (h..n).map(|i| u0 * cond.n0 * cond.psi0[i] * cond.psi0[i]).collect();
    let se: Vec<T> = sec.eps.iter().map(|&e| e.sqrt()).collect();
    // T = ε² + 2√ε W √ε with W = Φᵀ A Φ
    let rows: Vec<Vec<T>> = (0..m)
        .into_par_iter()
        .map(|p| {
            let ap: Vec<T> = sec.phi[p].iter().zip(&a).map(|(&f, &w)| f * w).collect();
            (0..m)
                .map(|q| {
                    let w = crate::scalar::dot(&ap, &sec.phi[q]);
                    let mut t = T::of(2.0) * se[p] * w * se[q];
                    if p == q {
                        t += sec.eps[p] * sec.eps[p];
                    }
                    t
                })
                .collect()
        })
        .collect();
    let mut tm = Vec::with_capacity(m * m);
    for r in &rows {
        tm.extend_from_slice(r);
    }
    let eig = sym_eigen(&tm, m);
    let mut out = Vec::new();
    let norm = T::one() / (T::of(2.0) * setup.dx).sqrt();
    for (k, &e2) in eig.values.iter().enumerate() {
        if e2 <= T::zero() {
            return Err(HfbError::Anomalous { parity: sec.parity, index: k, e2: e2.f64() });
        }
        let en = e2.sqrt();
        if en > e_cut {
            break;
        }
        let z = eig.vector(k);
        let cp: Vec<T> = (0..m).map(|p| se[p] * z[p] / en.sqrt()).collect();
        let cm: Vec<T> = (0..m).map(|p| z[p] / se[p] * en.sqrt()).collect();
        let mut fp = vec![T::zero(); h];
        let mut fm = vec![T::zero(); h];
        for p in 0..m {
            for i in 0..h {
                fp[i] += cp[p] * sec.phi[p][i];
                fm[i] += cm[p] * sec.phi[p][i];
            }
        }
        let s = sec.parity.sign::<T>();
        let mut u = vec![T::zero(); n];
        let mut v = vec![T::zero(); n];
        for i in 0..h {
            let ui = (fp[i] + fm[i]) * T::of(0.5) * norm;
            let vi = (fp[i] - fm[i]) * T::of(0.5) * norm;
            u[h + i] = ui;
            v[h + i] = vi;
            u[h - 1 - i] = s * ui;
            v[h - 1 - i] = s * vi;
        }
        out.push((en, u, v));
    }
    Ok(out)
}

/// Positive-energy Bogoliubov modes with E ≤ E_cut, ascending, occupations left at 0.
///
/// Eigenvectors of S orthogonal to ψ0 span the projected space, so the
/// projection is exact. In that basis the problem reduces to the symmetric
/// matrix ε² + 2√ε W √ε whose eigenvalues are E².
pub fn solve_bdg<T: Scalar>(
    setup: &SimSetup<T>,
    cond: &CondensateState<T>,
    nbar: &[T],
    e_cut: T,
) -> Result<Vec<ExcitationMode<T>>, HfbError> {
    let ceiling = basis_ceiling(e_cut);
    let sectors: Vec<Result<Sector<T>, HfbError>> =
        [Parity::Even, Parity::Odd].into_par_iter().map(|p| sector(setup, cond, nbar, p, ceiling)).collect();
    let mut modes = Vec::new();
    for sec in sectors {
        let sec = sec?;
        let parity = sec.parity;
        for (energy, u, v) in sector_modes(setup, cond, &sec, e_cut)? {
            modes.push(ExcitationMode { u, v, energy, occupation: T::zero(), parity });
        }
    }
    modes.sort_by(|a, b| a.energy.partial_cmp(&b.energy).expect("finite energies"));
    Ok(modes)
}
