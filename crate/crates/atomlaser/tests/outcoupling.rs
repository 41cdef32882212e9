mod common;

use approx::assert_relative_eq;
use atomlaser::config::{
    build_setup, Config, DensityOfStates, OutputModeGrid, OutputModeKind, PhysicalParams, SpatialGrid,
};
use atomlaser::hfb::Parity;
use atomlaser::outcoupling::*;
use atomlaser::scalar::C;
use atomlaser::Table;
use common::*;
use proptest::prelude::*;

fn physical_table(lambda: f64, detuning: f64) -> Table {
    let trap = trap10();
    let mut grid = Config::default().output_grid();
    grid.density_of_states = DensityOfStates::Physical;
    let cp = CouplingSpec::uniform(lambda, trap.x.len(), detuning);
    matrix_elements(&cp, trap, &grid).unwrap()
}

fn plane_wave_resonances(cp: &CouplingSpec<f64>) -> Table {
    let mut grid = Config::default().output_grid();
    grid.kind = OutputModeKind::PlaneWave;
    resonance_table(cp, trap10(), &grid).unwrap()
}

fn c(re: f64, im: f64) -> C<f64> {
    C::new(re, im)
}

#[test]
fn raman_coupling_examples() {
    let one = c(1.0, 0.0);
    assert_eq!(raman_effective_coupling(one, one, 10.0).unwrap(), c(0.1, 0.0));
    assert_eq!(raman_effective_coupling(c(0.0, 0.0), one, 10.0).unwrap(), c(0.0, 0.0));
    let a = raman_effective_coupling(c(0.3, 0.2), c(0.7, -0.1), 4.0).unwrap();
    let b = raman_effective_coupling(c(0.3, 0.2), c(1.4, -0.2), 4.0).unwrap();
    assert_relative_eq!(b.re, 2.0 * a.re, max_relative = 1e-15);
    assert_relative_eq!(b.im, 2.0 * a.im, max_relative = 1e-15);
    assert_eq!(raman_effective_coupling(one, one, 0.0), Err(OutcouplingError::ResonantIntermediate));
}

#[test]
fn zero_momentum_element_is_condensate_integral() {
    let trap = trap10();
    let lambda = 0.1;
    let tb = plane_wave_resonances(&CouplingSpec::uniform(lambda, trap.x.len(), 0.0));
    let (plus, minus) = {
        let (e, o) = tb.elements_at(0, 0.0);
        to_branches(e, o)
    };
    let want = lambda * trap.condensate.psi0.iter().sum::<f64>() * trap.dx;
    assert_relative_eq!(plus.re, want, max_relative = 1e-12);
    assert_eq!(plus.im, 0.0);
    assert_relative_eq!(minus.re, want, max_relative = 1e-12);
}

#[test]
fn odd_mode_has_no_zero_momentum_element() {
    let trap = trap10();
    let j = trap.modes.iter().position(|m| m.parity == Parity::Odd).unwrap();
    let tb = plane_wave_resonances(&CouplingSpec::uniform(0.1, trap.x.len(), 0.0));
    let c = 1 + 2 * j;
    assert_eq!(tb.channels[c].kind, ChannelKind::Sqe(j));
    let (e, o) = tb.elements_at(c, 0.0);
    let (p, m) = to_branches(e, o);
    assert_eq!(p.norm(), 0.0);
    assert_eq!(m.norm(), 0.0);
}

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    // fixed panels first so the recursion cannot stop on a symmetric zero
    let panels = 64;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fb, fm) = (f(lo), f(hi), f(0.5 * (lo + hi)));
            let whole = h / 6.0 * (fa + 4.0 * fm + fb);
            step(f, lo, hi, fa, fm, fb, whole, tol / panels as f64, 50)
        })
        .sum()
}

fn gaussian(x: f64) -> f64 {
    (-0.5 * x * x).exp() / std::f64::consts::PI.powf(0.25)
}

fn profile(x: f64) -> f64 {
    0.1 * (1.0 + 0.3 * (0.5 * x).cos() + 0.2 * x / (1.0 + x * x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn kernel_square_matches_sinc_form(w in 0.0f64..200.0, w0 in 0.0f64..200.0, t in 0.0f64..300.0) {
        let a = d_kernel_sq(w, w0, t);
        let b = sinc2_form(w, w0, t);
        prop_assert!((a - b).abs() <= 1e-12 * t * t, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn element_matches_adaptive_quadrature(k in 0.0f64..12.0, kick in -3.0f64..3.0) {
        let p = PhysicalParams { n_atoms: 2000.0, interaction_tt: 0.0, interaction_tf: 0.0, temperature: 0.0 };
        let s = build_setup(p, SpatialGrid { extent: 40.0, n_points: 1024 }, OutputModeGrid::default()).unwrap();
        let cp = CouplingSpec { amplitude: s.x.iter().map(|&x| profile(x)).collect(), detuning: 0.0, kick };
        let trapped: Vec<f64> = s.x.iter().map(|&x| gaussian(x)).collect();
        let basis = ModeBasis {
            kind: OutputModeKind::PlaneWave,
            dos: DensityOfStates::Flat,
            dx: s.dx,
            n_points: s.x.len(),
            potential_half: vec![0.0; 512],
            x_half: s.x[512..].to_vec(),
        };
        let omega = basis.omega_of(k);
        let (e, o) = basis.half_pair(omega);
        let (plus, _) = {
            let (le, lo) = channel_source(&cp, &trapped, &s.x).overlaps(&e, &o, s.dx);
            to_branches(le, lo)
        };
        // λ_+ = ∫e^{−i(k − k_em)x} λ̄ ψ dx
        let q = k - kick;
        let re = simpson(&|x| (q * x).cos() * profile(x) * gaussian(x), -20.0, 20.0, 1e-13);
        let im = simpson(&|x| -(q * x).sin() * profile(x) * gaussian(x), -20.0, 20.0, 1e-13);
        prop_assert!((plus.re - re).abs() < 1e-8, "{} vs {}", plus.re, re);
        prop_assert!((plus.im - im).abs() < 1e-8, "{} vs {}", plus.im, im);
    }

    #[test]
    fn branches_have_equal_magnitude(node in 0usize..4000, c in 0usize..9) {
        let tb = table(trap10(), 0.1, 0.0);
        let node = node % tb.nodes.len();
        let (p, m) = tb.branches(c, node);
        prop_assert!((p.norm() - m.norm()).abs() <= 1e-12 * p.norm().max(1e-300));
    }

    #[test]
    fn kernel_square_is_twice_real_second_order(w in 0.0f64..200.0, w0 in 0.0f64..200.0, t in 0.0f64..300.0) {
        let a = d_kernel_sq(w, w0, t);
        let b = 2.0 * d2_kernel(w, w0, t).re;
        prop_assert!((a - b).abs() <= 1e-10 * t * t, "{a} vs {b}");
    }
}

#[test]
fn kernel_at_resonance() {
    assert_eq!(d_kernel(3.0, 3.0, 7.5), c(7.5, 0.0));
    assert_eq!(d_kernel_sq(3.0, 3.0, 7.5), 56.25);
    assert_eq!(d_kernel(1.0, 2.0, 0.0).norm(), 0.0);
    let near = d_kernel(3.0 + 1e-9, 3.0, 7.5);
    assert!((near - c(7.5, 0.0)).norm() < 1e-6);
}

#[test]
fn kernel_square_integrates_to_two_pi_t() {
    for t in [0.5, 3.0, 40.0] {
        let x_max = 4000.0 / t;
        let h = 0.01 / t;
        let n = (2.0 * x_max / h) as usize;
        let mut s = 0.0;
        for i in 0..=n {
            let w = if i == 0 || i == n { 0.5 } else { 1.0 };
            s += w * d_kernel_sq(-x_max + i as f64 * h, 0.0, t);
        }
        s *= h;
        assert!(rel(s, 2.0 * std::f64::consts::PI * t) < 1e-3, "t {t}: {s}");
    }
}

#[test]
fn spectrum_vanishes_at_zero_time() {
    let sp = output_spectrum(&table(trap10(), 0.1, 0.0), 0.0).unwrap();
    assert!(sp.iter().flatten().all(|p| p.plus == 0.0 && p.minus == 0.0));
}

#[test]
fn negative_time_is_rejected() {
    let tb = table(trap10(), 0.1, 0.0);
    assert_eq!(output_spectrum(&tb, -1.0).unwrap_err(), OutcouplingError::NegativeTime);
    assert_eq!(channel_totals(&tb, -1.0, 200).unwrap_err(), OutcouplingError::NegativeTime);
    assert_eq!(channel_field(&tb, 0, -1.0, 200).unwrap_err(), OutcouplingError::NegativeTime);
}

#[test]
fn resonance_bin_is_strength_times_t_squared() {
    let trap = trap10();
    let base = table(trap, 0.1, 0.0);
    let i = base.nodes.len() / 7;
    let node = base.nodes[i];
    let tb = table(trap, 0.1, node.omega - trap.mu());
    let t = 12.0;
    let sp = output_spectrum(&tb, t).unwrap();
    let (lp, lm) = tb.branches(0, i);
    let n0 = tb.channels[0].population;
    assert_relative_eq!(sp[0][i].plus, node.rho * lp.norm_sqr() * t * t * n0, max_relative = 1e-9);
    assert_relative_eq!(sp[0][i].minus, node.rho * lm.norm_sqr() * t * t * n0, max_relative = 1e-9);
}

#[test]
fn spectrum_is_branch_symmetric_and_sums_over_channels() {
    let tb = table(trap10(), 0.1, 0.0);
    let sp = output_spectrum(&tb, 30.0).unwrap();
    for ch in &sp {
        for p in ch {
            assert!((p.plus - p.minus).abs() <= 1e-12 * p.plus.max(1e-300));
        }
    }
    let total = total_spectrum(&sp);
    for (i, p) in total.iter().enumerate() {
        let plus: f64 = sp.iter().map(|ch| ch[i].plus).fold(0.0, |a, b| a + b);
        let minus: f64 = sp.iter().map(|ch| ch[i].minus).fold(0.0, |a, b| a + b);
        assert_eq!(p.plus, plus);
        assert_eq!(p.minus, minus);
    }
}

#[test]
fn long_time_totals_approach_golden_rule() {
    let tb = table(trap10(), 0.1, 0.0);
    let rates = golden_rule_rates(&tb);
    let at = |t: f64| channel_totals(&tb, t, 400).unwrap();
    let (t1, t2) = (200.0, 400.0);
    let (a, b) = (at(t1), at(t2));
    assert!(rel(a[0] / t1, rates.condensate) < 0.02, "{} vs {}", a[0] / t1, rates.condensate);
    // every open channel: the offset from the rate is a constant, so it halves
    for c in 0..tb.n_channels() {
        let r = rates.channels[c].rate;
        if !rates.channels[c].open || r == 0.0 {
            continue;
        }
        let (d1, d2) = (a[c] / t1 / r - 1.0, b[c] / t2 / r - 1.0);
        assert!(d1.abs() < 0.03 && d2.abs() < 0.015, "channel {c}: {d1} {d2}");
        assert!((d1 / d2 - 2.0).abs() < 0.1, "channel {c}: {d1} {d2}");
    }
}

#[test]
fn three_temporal_regimes() {
    let tb = table(trap10(), 0.1, 0.0);
    let a = channel_totals(&tb, 1e-3, 200).unwrap()[0];
    let b = channel_totals(&tb, 2e-3, 200).unwrap()[0];
    assert!((b / a - 4.0).abs() < 0.04, "{}", b / a);
    let early = channel_totals(&tb, 100.0, 200).unwrap()[0];
    let late = channel_totals(&tb, 200.0, 200).unwrap()[0];
    let slope = (late - early) / 100.0;
    let rate = golden_rule_rates(&tb).condensate;
    assert!(rel(slope, rate) < 0.05, "{slope} vs {rate}");
}

#[test]
fn coarse_window_reports_required_resolution() {
    let tb = table(trap10(), 0.1, 0.0);
    match channel_totals(&tb, 200.0, 1) {
        Err(OutcouplingError::Resolution { n_omega, .. }) => assert!(n_omega > tb.nodes.len()),
        other => panic!("expected a resolution error, got {other:?}"),
    }
}

#[test]
fn uncovered_resonances_are_listed() {
    let trap = trap10();
    let grid = OutputModeGrid { omega_max: Some(1.0), ..Config::default().output_grid() };
    let err = matrix_elements(&CouplingSpec::uniform(0.1, trap.x.len(), 0.0), trap, &grid).unwrap_err();
    match err {
        OutcouplingError::Uncovered { uncovered, .. } => {
            assert!(uncovered.iter().any(|&w| (w - trap.mu()).abs() < 1e-12));
        }
        other => panic!("{other:?}"),
    }
    let short = CouplingSpec::uniform(0.1, 10, 0.0);
    assert!(matches!(resonance_table(&short, trap, &grid), Err(OutcouplingError::Profile { got: 10, .. })));
}

#[test]
fn condensate_threshold_at_minus_mu() {
    for trap in [trap10(), trap150()] {
        let tb = resonances(trap, 0.1, 0.0);
        let mu = trap.mu();
        for d in [-mu - 1.0, -mu - 1e-3] {
            assert_eq!(rates_at(&tb, d).condensate, 0.0);
        }
        assert_eq!(rates_at(&tb, -mu).condensate, 0.0);
        for d in [-mu + 1e-3, -mu + 0.1] {
            assert!(rates_at(&tb, d).condensate > 0.0, "T {}: {d}", trap.temperature);
        }
    }
}

#[test]
fn quantum_evaporation_dominates_below_threshold() {
    let tb = resonances(trap150(), 0.5, -5.0);
    let r = golden_rule_rates(&tb);
    assert!(r.sqe > r.condensate && r.sqe > r.pb, "{} {} {}", r.sqe, r.condensate, r.pb);
}

#[test]
fn resonance_frequencies_and_closed_channels() {
    let trap = trap10();
    let detuning = -trap.mu() - trap.modes[3].energy - 0.5;
    let tb = resonances(trap, 0.1, detuning);
    let rates = golden_rule_rates(&tb);
    for (c, ch) in tb.channels.iter().enumerate() {
        let e = match ch.kind {
            ChannelKind::Condensate => 0.0,
            ChannelKind::Sqe(j) => trap.modes[j].energy,
            ChannelKind::Pb(j) => -trap.modes[j].energy,
        };
        assert_eq!(tb.omega_out(c), trap.mu() + detuning + e);
        let r = &rates.channels[c];
        assert_eq!(r.open, tb.omega_out(c) > 0.0);
        if !r.open {
            assert_eq!(r.rate, 0.0);
        }
    }
    assert_eq!(rates.condensate, 0.0);
    assert_eq!(rates.pb, 0.0);
    assert!(!rates.channels[1 + 2 * 3].open && rates.channels[1 + 2 * 4].open);
}

#[test]
fn short_time_field_follows_source() {
    let trap = trap10();
    let tb = physical_table(0.1, 0.0);
    let t = 0.01;
    let f = channel_field(&tb, 0, t, 200).unwrap();
    let peak = trap.condensate.psi0.iter().cloned().fold(0.0, f64::max);
    for (i, &p) in trap.condensate.psi0.iter().enumerate() {
        if p > 0.1 * peak {
            let want = 0.1 * p * t;
            assert!((f[i].norm_sqr() / (want * want) - 1.0).abs() < 0.01, "x {}", trap.x[i]);
        }
    }
}

#[test]
fn field_norm_matches_spectrum_total() {
    let tb = physical_table(0.1, 0.0);
    let t = 0.5;
    let fields = output_field(&tb, &trap10().x, t, 200).unwrap();
    let numbers = fields.channel_numbers();
    let totals = channel_totals(&tb, t, 200).unwrap();
    for c in 0..5 {
        assert!(rel(numbers[c], totals[c]) < 0.01, "channel {c}: {} vs {}", numbers[c], totals[c]);
    }
    let integral = fields.density().iter().sum::<f64>() * fields.dx;
    assert!(rel(integral, totals.iter().sum()) < 0.01);
}

/// Positions where `y` crosses its mean on [lo, hi].
fn crossings(x: &[f64], y: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let idx: Vec<usize> = (0..x.len()).filter(|&i| x[i] >= lo && x[i] <= hi).collect();
    let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64;
    let mut out = vec![];
    for w in idx.windows(2) {
        let (a, b) = (y[w[0]] - mean, y[w[1]] - mean);
        if a * b < 0.0 {
            out.push(x[w[0]] + (x[w[1]] - x[w[0]]) * a / (a - b));
        }
    }
    out
}

#[test]
fn resonant_part_is_a_standing_wave() {
    let trap = trap10();
    let base = table(trap, 0.1, 0.0);
    let k = 2.0;
    let omega = base.basis.omega_of(k);
    let tb = table(trap, 0.1, omega - trap.mu());
    let psi = resonant_field(&tb, 0);
    let dens: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    let z = crossings(&trap.x, &dens, 10.0, 19.5);
    assert!(z.len() >= 8);
    // consecutive mean crossings of cos² are a quarter period apart
    let period = 2.0 * (z[z.len() - 1] - z[0]) / (z.len() - 1) as f64;
    assert!(rel(period, std::f64::consts::PI / k) < 0.01, "{period}");
}

#[test]
fn long_time_field_carries_outgoing_current() {
    let trap = trap10();
    let base = table(trap, 0.1, 0.0);
    let omega = base.basis.omega_of(2.0);
    let tb = table(trap, 0.1, omega - trap.mu());
    let psi = channel_field(&tb, 0, 15.0, 200).unwrap();
    let n = psi.len();
    for i in 1..n - 1 {
        let x = trap.x[i];
        if x.abs() < 10.0 || x.abs() > 18.0 {
            continue;
        }
        let d = (psi[i + 1] - psi[i - 1]) / (2.0 * trap.dx);
        let current = (psi[i].conj() * d).im;
        assert!(current * x.signum() > 0.0, "x {x}: {current}");
    }
}

#[test]
fn bound_component_examples() {
    let trap = trap10();
    let zero = table(trap, 0.0, 8.0);
    let b = bound_component(&zero, &[0, 1, 2], trap.n0(), 0.0).unwrap();
    assert!(b.profiles.iter().flatten().all(|z| z.norm() == 0.0));
    assert_eq!(b.condensate_number, Some(0.0));

    let lambda = 0.1;
    let tb = physical_table(lambda, 8.0);
    let b = bound_component(&tb, &[0], trap.n0(), lambda).unwrap();
    let (num, est) = (b.condensate_number.unwrap(), b.condensate_estimate.unwrap());
    assert!(num > 0.5 * est && num < 2.0 * est, "{num} vs {est}");

    let at = table(trap, lambda, -trap.mu());
    assert!(matches!(bound_component(&at, &[0], trap.n0(), lambda), Err(OutcouplingError::Threshold(_))));
}

#[test]
fn principal_value_matches_regularized_oracle() {
    let f = |w: f64| c((-w).exp() * (1.0 + w.cos()), (-0.5 * w).exp() * w);
    let n = 4001;
    let omega: Vec<f64> = (0..n).map(|i| 10.0 * i as f64 / (n - 1) as f64).collect();
    let samples: Vec<C<f64>> = omega.iter().map(|&w| f(w)).collect();
    for w0 in [0.7, 3.0, 6.123] {
        let got = pv_integral(&omega, &samples, w0, f(w0));
        let want = pv_regularized(f, 0.0, 10.0, w0, 1e-3);
        assert!((got - want).norm() < 1e-4, "{w0}: {got} vs {want}");
    }
}

#[test]
fn spectral_width_examples() {
    assert_eq!(width_estimates(1.0, 0.0), (0.5, 0.5));
    assert!(width_estimates(1e8, 0.0).0 < 1e-15);
    let (case1, delta) = width_estimates(2.0, 10.0);
    assert_eq!(delta, 2.5);
    assert_relative_eq!(delta / case1, 10.0 * 2.0, max_relative = 1e-15);
    let r0 = rms_width(trap10());
    let (a, _) = spectral_width_estimates(trap10(), 0.0);
    assert_relative_eq!(a, 0.5 / (r0 * r0), max_relative = 1e-15);
}

#[test]
fn weak_coupling_flag() {
    let trap = trap10();
    let strong = CouplingSpec::uniform(0.5, trap.x.len(), 0.0);
    assert!(!strong.weak_coupling(trap));
    assert_relative_eq!(strong.strength(trap.dx), 0.5 * 40f64.sqrt(), max_relative = 1e-12);
    assert!(strong.scaled(1e-4).weak_coupling(trap));
}
