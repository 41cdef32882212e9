mod common;

use approx::assert_relative_eq;
use atomlaser::config::{Config, SimSetup};
use atomlaser::hfb::{
    noncondensate_density, self_consistent_solve, solve_gpe, thermal_occupation, ExcitationMode, GpeOptions, HfbError,
    Parity,
};
use atomlaser::Trap;
use common::{solve, trap10, trap150};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn gpe_opts() -> GpeOptions<f64> {
    GpeOptions { dtau: 0.1, tol: 1e-8, max_iter: 200_000 }
}

fn ideal_config() -> Config {
    let mut cfg = Config::default();
    cfg.interaction_tt = 0.0;
    cfg
}

#[test]
fn noninteracting_ground_state_is_the_oscillator_gaussian() {
    let setup = ideal_config().setup(0.0).unwrap();
    let n = setup.n();
    let cond = solve_gpe(&setup, &vec![0.0; n], 2000.0, None, gpe_opts()).unwrap();
    assert!((cond.mu - 0.5).abs() < 1e-4, "mu = {}", cond.mu);
    let norm = std::f64::consts::PI.powf(-0.25);
    for (x, p) in setup.x.iter().zip(&cond.psi0) {
        assert!((p - norm * (-x * x / 2.0).exp()).abs() < 1e-4, "x = {x}");
    }
    assert!(cond.residual <= 1e-8);
    assert_relative_eq!(setup.integrate(&cond.psi0.iter().map(|p| p * p).collect::<Vec<_>>()), 1.0, epsilon = 1e-8);
}

#[test]
fn gpe_rejects_bad_inputs() {
    let setup = Config::default().setup(0.0).unwrap();
    let n = setup.n();
    let mut nbar = vec![0.0; n];
    nbar[3] = -1.0;
    assert!(matches!(solve_gpe(&setup, &nbar, 10.0, None, gpe_opts()), Err(HfbError::Input(_))));
    assert!(matches!(solve_gpe(&setup, &vec![0.0; n], -1.0, None, gpe_opts()), Err(HfbError::Input(_))));
    let starved = GpeOptions { dtau: 0.1, tol: 1e-8, max_iter: 2 };
    match solve_gpe(&setup, &vec![0.0; n], 2000.0, None, starved) {
        Err(HfbError::GpeNotConverged { iterations: 2, residual }) => assert!(residual > 1e-8),
        other => panic!("{other:?}"),
    }
}

/// Explicit imaginary-time relaxation of the same discretized equation.
fn imaginary_time_mu(setup: &SimSetup<f64>, n0: f64) -> f64 {
    let n = setup.n();
    let dx = setup.dx;
    let g = setup.params.interaction_tt * n0;
    let dtau = 0.4 * dx * dx;
    let mut p: Vec<f64> = setup.x.iter().map(|x| (-x * x / 8.0).exp()).collect();
    let renorm = |p: &mut Vec<f64>| {
        let s = (p.iter().map(|v| v * v).sum::<f64>() * dx).sqrt();
        p.iter_mut().for_each(|v| *v /= s);
    };
    renorm(&mut p);
    let h = |p: &[f64], i: usize| -> f64 {
        let l = if i > 0 { p[i - 1] } else { 0.0 };
        let r = if i + 1 < n { p[i + 1] } else { 0.0 };
        -0.5 * (l - 2.0 * p[i] + r) / (dx * dx) + (setup.potential[i] + g * p[i] * p[i]) * p[i]
    };
    let steps = (12.0 / dtau) as usize;
    let mut next = vec![0.0; n];
    for _ in 0..steps {
        for i in 0..n {
            next[i] = p[i] - dtau * h(&p, i);
        }
        std::mem::swap(&mut p, &mut next);
        renorm(&mut p);
    }
    (0..n).map(|i| p[i] * h(&p, i)).sum::<f64>() * dx
}

#[test]
fn condensate_mu_matches_fine_grid_relaxation() {
    let cfg = Config::default();
    let setup = cfg.setup(0.0).unwrap();
    let cond = solve_gpe(&setup, &vec![0.0; setup.n()], 2000.0, None, gpe_opts()).unwrap();
    let mut fine = cfg.clone();
    fine.n_points = 4 * cfg.n_points;
    let oracle = imaginary_time_mu(&fine.setup(0.0).unwrap(), 2000.0);
    assert!((cond.mu - oracle).abs() < 1e-3, "{} vs {oracle}", cond.mu);
}

#[test]
fn low_temperature_thermodynamics() {
    let t = trap10();
    assert!((t.mu() - 2.5).abs() < 0.2, "mu = {}", t.mu());
    assert!((t.noncondensate_fraction() - 0.02).abs() < 0.01, "fraction = {}", t.noncondensate_fraction());
}

#[test]
fn high_temperature_thermodynamics() {
    let t = trap150();
    assert!((t.mu() - 2.3).abs() < 0.2, "mu = {}", t.mu());
    assert!((t.noncondensate_fraction() - 0.44).abs() < 0.05, "fraction = {}", t.noncondensate_fraction());
}

fn check_solution_invariants(t: &Trap) {
    let n_t = t.params.n_atoms;
    assert!((t.n0() + t.noncondensate_number() - n_t).abs() <= 1e-4 * n_t);
    assert!(t.nbar.iter().all(|&v| v >= 0.0));
    let norm: f64 = t.condensate.psi0.iter().map(|p| p * p).sum::<f64>() * t.dx;
    assert!((norm - 1.0).abs() < 1e-8);
    assert!(t.condensate.psi0.iter().all(|&p| p >= 0.0));
    assert!(t.condensate.residual <= 1e-8);
    for w in t.modes.windows(2) {
        assert!(w[0].energy <= w[1].energy);
    }
    assert!(t.modes.iter().all(|m| m.energy > 0.0 && m.energy <= t.e_cut && m.occupation >= 0.0));
    let last = t.trace.last().unwrap();
    assert!(last.delta_mu < 1e-6 && last.delta_nbar < 1e-6);
}

#[test]
fn solution_invariants_hold_at_both_temperatures() {
    check_solution_invariants(trap10());
    check_solution_invariants(trap150());
}

fn check_modes(t: &Trap, pairs: bool) {
    let dx = t.dx;
    let psi = &t.condensate.psi0;
    for (j, m) in t.modes.iter().enumerate() {
        assert!((m.norm_u(dx) - m.norm_v(dx) - 1.0).abs() < 1e-6, "mode {j} norm");
        let pu: f64 = psi.iter().zip(&m.u).map(|(a, b)| a * b).sum::<f64>() * dx;
        let pv: f64 = psi.iter().zip(&m.v).map(|(a, b)| a * b).sum::<f64>() * dx;
        assert!(pu.abs() < 1e-6 && pv.abs() < 1e-6, "mode {j} overlaps {pu:e} {pv:e}");
    }
    if pairs {
        for i in 0..t.modes.len() {
            for j in 0..i {
                let (a, b) = (&t.modes[i], &t.modes[j]);
                let o: f64 = (0..t.x.len()).map(|k| a.u[k] * b.u[k] - a.v[k] * b.v[k]).sum::<f64>() * dx;
                assert!(o.abs() < 1e-5, "modes {i},{j}: {o:e}");
            }
        }
    }
}

#[test]
fn modes_are_normalized_and_orthogonal() {
    check_modes(trap10(), true);
    check_modes(trap150(), true);
}

fn parity_of(f: &[f64], s: f64) -> f64 {
    let n = f.len();
    let peak = f.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    (0..n).map(|i| (f[i] - s * f[n - 1 - i]).abs()).fold(0.0, f64::max) / peak
}

#[test]
fn solutions_have_definite_parity() {
    for t in [trap10(), trap150()] {
        assert!(parity_of(&t.condensate.psi0, 1.0) < 1e-12);
        for m in &t.modes {
            let s = m.parity.sign::<f64>();
            assert!(parity_of(&m.u, s) < 1e-10);
            assert!(parity_of(&m.v, s) < 1e-10);
        }
    }
}

#[test]
fn lowest_mode_is_the_dipole_mode() {
    let m = &trap10().modes[0];
    assert_eq!(m.parity, Parity::Odd);
    assert!((m.energy - 1.0).abs() < 0.05, "E1 = {}", m.energy);
}

fn interp(x: &[f64], f: &[f64], at: f64) -> f64 {
    let dx = x[1] - x[0];
    let s = ((at - x[0]) / dx).clamp(0.0, (x.len() - 1) as f64);
    let i = (s.floor() as usize).min(x.len() - 2);
    let w = s - i as f64;
    f[i] * (1.0 - w) + f[i + 1] * w
}

/// Odd-sector BdG on a 2× finer grid, dense: E² = eig(Rᵀ(S + 2U0N0ψ0²)R) with S = RRᵀ.
fn fine_grid_lowest_odd_energy(t: &Trap) -> f64 {
    let h = t.x.len();
    let dx = t.dx / 2.0;
    let xs: Vec<f64> = (0..h).map(|i| (i as f64 + 0.5) * dx).collect();
    let u0 = t.params.interaction_tt;
    let cond: Vec<f64> = t.condensate.psi0.iter().map(|p| t.n0() * p * p).collect();
    let mut s = DMatrix::<f64>::zeros(h, h);
    let mut w = DMatrix::<f64>::zeros(h, h);
    for i in 0..h {
        let x = xs[i];
        let nc = interp(&t.x, &cond, x);
        let nb = interp(&t.x, &t.nbar, x);
        let lap = if i == 0 { 1.5 / (dx * dx) } else { 1.0 / (dx * dx) };
        s[(i, i)] = lap + 0.5 * x * x - t.mu() + u0 * (nc + 2.0 * nb);
        if i + 1 < h {
            s[(i, i + 1)] = -0.5 / (dx * dx);
            s[(i + 1, i)] = -0.5 / (dx * dx);
        }
        w[(i, i)] = 2.0 * u0 * nc;
    }
    let r = s.clone().cholesky().expect("odd sector positive").l();
    let b = r.transpose() * (&s + &w) * &r;
    let eig = SymmetricEigen::new(b);
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min).sqrt()
}

#[test]
fn dipole_energy_matches_fine_grid_diagonalization() {
    let t = trap10();
    let oracle = fine_grid_lowest_odd_energy(t);
    assert!((t.modes[0].energy - oracle).abs() < 1e-3, "{} vs {oracle}", t.modes[0].energy);
    assert!((oracle - 1.0).abs() < 0.05);
}

#[test]
fn ideal_gas_loop() {
    let cfg = ideal_config();
    let sol = self_consistent_solve(&cfg.setup(0.0).unwrap(), &cfg.solver()).unwrap();
    assert_eq!(sol.iterations(), 1);
    assert_eq!(sol.n0(), 2000.0);
    assert!((sol.mu() - 0.5).abs() < 1e-4);
    assert!(sol.nbar.iter().all(|&v| v.abs() < 1e-20));
    for m in &sol.modes {
        assert!(m.v.iter().all(|v| v.abs() < 1e-12));
    }
    let nb = noncondensate_density(&sol.modes, sol.x.len());
    assert!(nb.iter().all(|&v| v.abs() < 1e-20));
}

#[test]
fn ideal_gas_energies_are_integers() {
    // The second-order stencil shifts E_20 by 4e-2 at dx = 0.039; dx = 0.0049 brings it under 1e-3.
    let mut cfg = ideal_config();
    cfg.extent = 20.0;
    cfg.n_points = 4096;
    cfg.e_cut = Some(21.5);
    let sol = self_consistent_solve(&cfg.setup(0.0).unwrap(), &cfg.solver()).unwrap();
    assert!(sol.modes.len() >= 20);
    for (j, m) in sol.modes.iter().take(20).enumerate() {
        assert!((m.energy - (j + 1) as f64).abs() < 1e-3, "E_{} = {}", j + 1, m.energy);
        let norm = std::f64::consts::PI.powf(-0.25);
        if j == 0 {
            // u_1 ∝ x e^{−x²/2}
            let peak = sol
                .x
                .iter()
                .zip(&m.u)
                .map(|(x, u)| (u.abs() - norm * 2f64.sqrt() * x.abs() * (-x * x / 2.0).exp()).abs())
                .fold(0.0, f64::max);
            assert!(peak < 1e-4);
        }
    }
}

#[test]
fn thermal_occupation_examples() {
    assert!((thermal_occupation(10.0 * 2f64.ln(), 10.0).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(thermal_occupation(3.0, 0.0).unwrap(), 0.0);
    let n: f64 = thermal_occupation(1.0, 150.0).unwrap();
    assert!((n - 149.50).abs() < 5e-3, "{n}");
    assert!(matches!(thermal_occupation(0.0, 1.0), Err(HfbError::NonPositiveEnergy(_))));
    assert!(matches!(thermal_occupation(-1.0, 1.0), Err(HfbError::NonPositiveEnergy(_))));
    assert!(thermal_occupation(1.0, -1.0).is_err());
}

#[test]
fn single_mode_density_identity() {
    let t = trap10();
    for m in t.modes.iter().take(10) {
        let one = ExcitationMode { occupation: 1.0, ..m.clone() };
        let empty = ExcitationMode { occupation: 0.0, ..m.clone() };
        let total = t.integrate(&noncondensate_density(&[one], t.x.len()));
        let vacuum = t.integrate(&noncondensate_density(&[empty], t.x.len()));
        let v2 = m.norm_v(t.dx);
        // the occupied part is 1 + 2∫v²; the vacuum term adds another ∫v²
        assert!((total - vacuum - (1.0 + 2.0 * v2)).abs() < 1e-6);
        assert!((vacuum - v2).abs() < 1e-12);
    }
}

#[test]
fn chemical_potential_grows_with_atom_number() {
    let mut last = f64::NEG_INFINITY;
    for n in [500.0, 1000.0, 2000.0] {
        let mut cfg = Config::default();
        cfg.n_atoms = n;
        let mu = solve(&cfg, 10.0).mu();
        assert!(mu >= last, "mu({n}) = {mu} < {last}");
        last = mu;
    }
}

#[test]
fn cutoff_robustness_at_high_temperature() {
    let base = trap150();
    let mut cfg = Config::default();
    cfg.e_cut = Some(1.5 * base.e_cut);
    let raised = solve(&cfg, 150.0);
    let change = (raised.noncondensate_fraction() - base.noncondensate_fraction()).abs();
    assert!(change < 0.01, "fraction moved by {change}");
}

proptest! {
    #[test]
    fn occupation_inverts_at_ln2(t in 1e-3f64..1e3) {
        let n = thermal_occupation(t * 2f64.ln(), t).unwrap();
        prop_assert!((n - 1.0).abs() < 1e-10);
    }

    #[test]
    fn occupation_is_positive_and_decreasing(e in 1e-3f64..1e3, de in 1e-3f64..10.0, t in 1e-2f64..1e3) {
        let a = thermal_occupation(e, t).unwrap();
        let b = thermal_occupation(e + de, t).unwrap();
        prop_assert!(a > 0.0 || e / t > 700.0);
        prop_assert!(b <= a);
    }
}
