use serde::{Deserialize, Serialize};

use super::OracleError;
use crate::dynamics::DecayRates;
use crate::linalg::CMat;
use crate::outcoupling::{to_branches, ChannelKind, MatrixElementTable};
use crate::scalar::{Scalar, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Trapped {
    Condensate,
    Mode(usize),
}

/// Trapped annihilation amplitude; `energy` is its frequency in the frame
/// rotating at μ + Δ_em (0 for the condensate, E_j for a mode).
#[derive(Debug, Clone, PartialEq)]
pub struct TrappedRow<T> {
    pub which: Trapped,
    pub energy: T,
    pub population: T,
}

/// One bath amplitude. Anomalous modes enter as b†, coupling to α_j through
/// the pair-breaking element; `coupling[r]` is √(ρw)·λ for trapped row r.
#[derive(Debug, Clone, PartialEq)]
pub struct BathMode<T> {
    pub omega: T,
    pub weight: T,
    pub anomalous: bool,
    pub coupling: Vec<C<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombSpec<T> {
    /// Total comb width in units of the channel rate γ.
    pub width: T,
    /// Node spacing in units of γ.
    pub spacing: T,
}

impl<T: Scalar> Default for CombSpec<T> {
    fn default() -> Self {
        Self { width: T::of(40.0), spacing: T::of(0.1) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSystem<T> {
    pub rows: Vec<TrappedRow<T>>,
    pub bath: Vec<BathMode<T>>,
    /// Rotating-frame frequency μ + Δ_em.
    pub frame: T,
}

impl<T: Scalar> TruncatedSystem<T> {
    pub fn dim(&self) -> usize {
        self.rows.len() + self.bath.len()
    }

    /// σ3 signature: −1 for anomalous bath amplitudes.
    pub fn signature(&self, i: usize) -> T {
        let nr = self.rows.len();
        if i >= nr && self.bath[i - nr].anomalous {
            -T::one()
        } else {
            T::one()
        }
    }

    /// Bath frequency in the rotating frame.
    pub fn detuning(&self, b: usize) -> T {
        self.bath[b].omega - self.frame
    }

    /// ⟨A†A⟩ at t = 0 for every amplitude; b b† gives 1 for anomalous rows.
    pub fn occupations(&self) -> Vec<T> {
        let mut p: Vec<T> = self.rows.iter().map(|r| r.population).collect();
        p.extend(self.bath.iter().map(|b| if b.anomalous { T::one() } else { T::zero() }));
        p
    }

    /// Hermitian H; the generator is σ3·H.
    pub fn hamiltonian(&self) -> CMat<T> {
        let nr = self.rows.len();
        let mut h = CMat::zeros(self.dim());
        for (r, row) in self.rows.iter().enumerate() {
            *h.at_mut(r, r) = C::new(row.energy, T::zero());
        }
        for (b, mode) in self.bath.iter().enumerate() {
            let i = nr + b;
            *h.at_mut(i, i) = C::new(self.detuning(b), T::zero());
            for (r, &g) in mode.coupling.iter().enumerate() {
                let g = if mode.anomalous { g.conj() } else { g };
                *h.at_mut(i, r) = g;
                *h.at_mut(r, i) = g.conj();
            }
        }
        h
    }

    /// Mean trapped frequency; removing it from the generator only changes a
    /// global phase and keeps long propagations well conditioned.
    pub fn reference_frequency(&self) -> T {
        if self.rows.is_empty() {
            return T::zero();
        }
        self.rows.iter().map(|r| r.energy).sum::<T>() / T::of_usize(self.rows.len())
    }

    /// σ3·H minus the reference frequency on the diagonal.
    pub fn generator(&self) -> CMat<T> {
        let mut m = self.hamiltonian();
        let e = self.reference_frequency();
        for i in 0..m.n {
            if self.signature(i) < T::zero() {
                for j in 0..m.n {
                    let v = m.at(i, j);
                    *m.at_mut(i, j) = -v;
                }
            }
            *m.at_mut(i, i) -= C::new(e, T::zero());
        }
        m
    }

    /// Λ_r = √(Σ_b |g_br|²) per trapped row.
    pub fn row_strength(&self, r: usize) -> T {
        self.bath.iter().map(|b| b.coupling[r].norm_sqr()).sum::<T>().sqrt()
    }

    /// One trapped amplitude resonant with one bath mode at coupling g.
    pub fn two_mode(g: T, population: T) -> Self {
        Self {
            rows: vec![TrappedRow { which: Trapped::Condensate, energy: T::zero(), population }],
            bath: vec![BathMode {
                omega: T::zero(),
                weight: T::one(),
                anomalous: false,
                coupling: vec![C::new(g, T::zero())],
            }],
            frame: T::zero(),
        }
    }

    /// Trapped rows from `which` with bath nodes at the given output frequencies
    /// and weights, for every process that couples them. A single trapped row
    /// couples only to λ_+φ_+ + λ_−φ_−, so branches merge into one mode.
    pub fn from_nodes(
        table: &MatrixElementTable<T>,
        which: &[Trapped],
        normal: &[(T, T)],
        anomalous: &[(T, T)],
    ) -> Self {
        let rows: Vec<TrappedRow<T>> = which
            .iter()
            .map(|&w| {
                let c = channel_of(w, false);
                let ch = &table.channels[c];
                let energy = match w {
                    Trapped::Condensate => T::zero(),
                    Trapped::Mode(_) => ch.energy,
                };
                TrappedRow { which: w, energy, population: ch.population }
            })
            .collect();
        let merge = rows.len() == 1;
        let mut bath = Vec::new();
        let mut push = |omega: T, weight: T, anomalous: bool| {
            if omega <= T::zero() {
                return;
            }
            let (e, o) = table.basis.half_pair(omega);
            let rho = table.basis.node(omega).rho;
            let amp = (rho * weight).sqrt();
            let mut plus = Vec::with_capacity(rows.len());
            let mut minus = Vec::with_capacity(rows.len());
            for row in &rows {
                let couples = !(anomalous && row.which == Trapped::Condensate);
                let (lp, lm) = if couples {
                    let c = channel_of(row.which, anomalous);
                    let (le, lo) = table.sources[c].overlaps(&e, &o, table.basis.dx);
                    to_branches(le, lo)
                } else {
                    (C::new(T::zero(), T::zero()), C::new(T::zero(), T::zero()))
                };
                plus.push(lp * amp);
                minus.push(lm * amp);
            }
            if merge {
                let g = (plus[0].norm_sqr() + minus[0].norm_sqr()).sqrt();
                if g > T::zero() {
                    bath.push(BathMode { omega, weight, anomalous, coupling: vec![C::new(g, T::zero())] });
                }
            } else {
                for coupling in [plus, minus] {
                    if coupling.iter().any(|g| g.norm_sqr() > T::zero()) {
                        bath.push(BathMode { omega, weight, anomalous, coupling });
                    }
                }
            }
        };
        for &(w, wt) in normal {
            push(w, wt, false);
        }
        for &(w, wt) in anomalous {
            push(w, wt, true);
        }
        Self { rows, bath, frame: table.mu + table.detuning }
    }

    /// Uniform combs of width `spec.width`·γ and spacing `spec.spacing`·γ
    /// around the resonance of each listed table channel; closed ones are skipped.
    pub fn with_combs(
        table: &MatrixElementTable<T>,
        rates: &DecayRates<T>,
        channels: &[usize],
        spec: CombSpec<T>,
    ) -> Result<Self, OracleError> {
        let mut which: Vec<Trapped> = Vec::new();
        let mut normal = Vec::new();
        let mut anomalous = Vec::new();
        for &c in channels {
            let (w, anom, gamma) = match table.channels[c].kind {
                ChannelKind::Condensate => (Trapped::Condensate, false, rates.gamma0),
                ChannelKind::Sqe(j) => (Trapped::Mode(j), false, rates.gamma_plus[j]),
                ChannelKind::Pb(j) => (Trapped::Mode(j), true, -rates.gamma_minus[j]),
            };
            if !which.contains(&w) {
                which.push(w);
            }
            if !table.is_open(c) {
                continue;
            }
            if gamma <= T::zero() {
                return Err(OracleError::NoRate(table.channels[c].kind.label()));
            }
            let step = spec.spacing * gamma;
            let n = (spec.width / spec.spacing).round().to_usize().unwrap_or(0);
            let w0 = table.omega_out(c);
            let nodes = (0..=n).map(|i| (w0 + (T::of_usize(i) - T::of_usize(n) * T::of(0.5)) * step, step));
            if anom {
                anomalous.extend(nodes);
            } else {
                normal.extend(nodes);
            }
        }
        Ok(Self::from_nodes(table, &which, &normal, &anomalous))
    }

    /// Uniform bath of `n` nodes spanning ω_out ± half_width for one channel.
    pub fn with_band(table: &MatrixElementTable<T>, which: Trapped, half_width: T, n: usize) -> Self {
        let c = channel_of(which, false);
        let w0 = table.omega_out(c);
        let step = T::of(2.0) * half_width / T::of_usize(n);
        let nodes: Vec<(T, T)> =
            (0..n).map(|i| (w0 - half_width + (T::of_usize(i) + T::of(0.5)) * step, step)).collect();
        Self::from_nodes(table, &[which], &nodes, &[])
    }
}

/// Channel index in the table: 0, then 1 + 2j (SQE) and 2 + 2j (PB).
fn channel_of(w: Trapped, anomalous: bool) -> usize {
    match (w, anomalous) {
        (Trapped::Condensate, _) => 0,
        (Trapped::Mode(j), false) => 1 + 2 * j,
        (Trapped::Mode(j), true) => 2 + 2 * j,
    }
}
