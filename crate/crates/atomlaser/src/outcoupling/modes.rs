//! Free output modes: even/odd real standing waves φ_e, φ_o with
//! φ_± = (φ_e ± iφ_o)/√2 and asymptotic amplitude √2 (plane-wave normalization).

use rayon::prelude::*;

use crate::config::{DensityOfStates, OutputModeGrid, OutputModeKind};
use crate::hfb::HfbSolution;
use crate::scalar::Scalar;

/// One output energy sample shared by both branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeNode<T> {
    pub k: T,
    pub omega: T,
    /// Density of states per branch.
    pub rho: T,
}

/// Recipe for output modes on the trap grid.
#[derive(Debug, Clone)]
pub struct ModeBasis<T> {
    pub kind: OutputModeKind,
    pub dos: DensityOfStates,
    pub dx: T,
    pub n_points: usize,
    /// U1·n_t(x) on the half grid x > 0; zero for plane waves.
    pub potential_half: Vec<T>,
    pub x_half: Vec<T>,
}

impl<T: Scalar> ModeBasis<T> {
    pub fn new(trap: &HfbSolution<T>, grid: &OutputModeGrid<T>) -> Self {
        let n = trap.x.len();
        let h = n / 2;
        let potential_half = match grid.kind {
            OutputModeKind::MeanField => {
                let u1 = trap.params.interaction_tf;
                trap.total_density()[h..].iter().map(|&d| u1 * d).collect()
            }
            OutputModeKind::PlaneWave => vec![T::zero(); h],
        };
        Self {
            kind: grid.kind,
            dos: grid.density_of_states,
            dx: trap.dx,
            n_points: n,
            potential_half,
            x_half: trap.x[h..].to_vec(),
        }
    }

    /// Largest energy representable on the lattice, with margin.
    pub fn omega_ceiling(&self) -> T {
        match self.kind {
            OutputModeKind::MeanField => T::of(1.99) / (self.dx * self.dx),
            OutputModeKind::PlaneWave => T::infinity(),
        }
    }

    /// Wavenumber of energy ω: lattice relation ω = (1 − cos k dx)/dx², or k = √(2ω).
    pub fn k_of(&self, omega: T) -> T {
        match self.kind {
            OutputModeKind::MeanField => {
                let c = (T::one() - omega * self.dx * self.dx).max(-T::one());
                c.acos() / self.dx
            }
            OutputModeKind::PlaneWave => (T::of(2.0) * omega).sqrt(),
        }
    }

    pub fn omega_of(&self, k: T) -> T {
        match self.kind {
            OutputModeKind::MeanField => {
                let s = (k * self.dx * T::of(0.5)).sin();
                T::of(2.0) * s * s / (self.dx * self.dx)
            }
            OutputModeKind::PlaneWave => k * k * T::of(0.5),
        }
    }

    /// Group velocity dω/dk.
    pub fn velocity(&self, k: T) -> T {
        match self.kind {
            OutputModeKind::MeanField => (k * self.dx).sin() / self.dx,
            OutputModeKind::PlaneWave => k,
        }
    }

    pub fn rho(&self, k: T) -> T {
        match self.dos {
            DensityOfStates::Flat => T::of(0.5),
            DensityOfStates::Physical => T::one() / (T::of(2.0) * T::PI() * self.velocity(k)),
        }
    }

    pub fn node(&self, omega: T) -> ModeNode<T> {
        let k = self.k_of(omega);
        ModeNode { k, omega, rho: self.rho(k) }
    }

    pub fn node_k(&self, k: T) -> ModeNode<T> {
        ModeNode { k, omega: self.omega_of(k), rho: self.rho(k) }
    }

    /// Half-grid (x > 0) values of φ_e and φ_o at energy ω.
    pub fn half_pair(&self, omega: T) -> (Vec<T>, Vec<T>) {
        let h = self.x_half.len();
        match self.kind {
            OutputModeKind::PlaneWave => {
                let k = self.k_of(omega);
                let s2 = T::of(2.0).sqrt();
                let e = self.x_half.iter().map(|&x| s2 * (k * x).cos()).collect();
                let o = self.x_half.iter().map(|&x| s2 * (k * x).sin()).collect();
                (e, o)
            }
            OutputModeKind::MeanField => {
                let dx2 = self.dx * self.dx;
                let c = T::one() - dx2 * omega;
                let s2 = T::one() - c * c;
                let run = |parity: T| {
                    let mut out = vec![T::zero(); h];
                    let mut prev = parity;
                    let mut cur = T::one();
                    out[0] = cur;
                    for i in 0..h - 1 {
                        let next = T::of(2.0) * cur - prev - T::of(2.0) * dx2 * (omega - self.potential_half[i]) * cur;
                        prev = cur;
                        cur = next;
                        out[i + 1] = cur;
                    }
                    let (a, b) = (out[h - 2], out[h - 1]);
                    let amp2 = (a * a + b * b - T::of(2.0) * c * a * b) / s2;
                    let scale = (T::of(2.0) / amp2).sqrt();
                    for v in out.iter_mut() {
                        *v *= scale;
                    }
                    out
                };
                (run(T::one()), run(-T::one()))
            }
        }
    }

    /// Full-grid φ_e, φ_o.
    pub fn full_pair(&self, omega: T) -> (Vec<T>, Vec<T>) {
        let (e, o) = self.half_pair(omega);
        (mirror(&e, T::one()), mirror(&o, -T::one()))
    }

    /// Background nodes uniform in k: k_n = (n + ½)·dk up to k(ω_max).
    pub fn background_nodes(&self, omega_max: T, n_omega: Option<usize>) -> Vec<ModeNode<T>> {
        let w = omega_max.min(self.omega_ceiling());
        let k_max = self.k_of(w);
        let n = n_omega.unwrap_or_else(|| (k_max / T::of(0.01)).ceil().to_usize().unwrap_or(1).max(2));
        let dk = k_max / T::of_usize(n);
        (0..n).map(|i| self.node_k((T::of_usize(i) + T::of(0.5)) * dk)).collect()
    }

    /// Half-grid tables for a list of nodes.
    pub fn tables(&self, nodes: &[ModeNode<T>]) -> Vec<(Vec<T>, Vec<T>)> {
        nodes.par_iter().map(|n| self.half_pair(n.omega)).collect()
    }
}

/// Full grid from the x > 0 half, f(−x) = s·f(x).
pub fn mirror<T: Scalar>(half: &[T], s: T) -> Vec<T> {
    let mut full: Vec<T> = half.iter().rev().map(|&v| s * v).collect();
    full.extend_from_slice(half);
    full
}

/// Default ω_max = 1.2·E_cut + 40.
pub fn default_omega_max<T: Scalar>(e_cut: T) -> T {
    T::of(1.2) * e_cut + T::of(40.0)
}
