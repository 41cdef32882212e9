//! Oracle comparison harness shared by `oracle-check` and the acceptance suite.

use atomlaser::config::Config;
use atomlaser::dynamics::{decay_rates, evolve_adiabatic, AdiabaticOptions, DecayRates, PopulationTrajectory};
use atomlaser::oracle::{
    compare_to_quasi_steady, fit_decay_rate, integrate_coupled_modes, oscillation_frequency, perturbative_populations,
    spectrum_comparison, CombSpec, ComparisonReport, OracleTrajectory, Trapped, TruncatedSystem, Validity,
};
use atomlaser::outcoupling::{resonance_table, spectral_width_estimates, ChannelKind, CouplingSpec};
use atomlaser::{Table, Trap};

use crate::cases::{ORACLE_STRENGTH, RABI_COUPLING};
use crate::{numerical, CliError};

#[derive(Debug, Clone, PartialEq)]
pub struct RateCheck {
    pub label: &'static str,
    pub detuning: f64,
    pub channel: usize,
    /// |γ| of the channel.
    pub gamma: f64,
    /// Golden-rule population rate 2|γ|.
    pub predicted: f64,
    pub oracle: f64,
}

impl RateCheck {
    pub fn relative_error(&self) -> f64 {
        (self.oracle - self.predicted).abs() / self.predicted
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbativeCheck {
    pub t: Vec<f64>,
    pub predicted_n0: Vec<f64>,
    pub oracle_n0: Vec<f64>,
    pub initial: f64,
}

impl PerturbativeCheck {
    pub fn max_n0_error(&self) -> f64 {
        self.predicted_n0.iter().zip(&self.oracle_n0).map(|(p, o)| (p - o).abs() / o).fold(0.0, f64::max)
    }

    /// Worst relative error of the depletion N0(0) − N0(t).
    pub fn max_depletion_error(&self) -> f64 {
        self.predicted_n0
            .iter()
            .zip(&self.oracle_n0)
            .map(|(p, o)| ((self.initial - p) - (self.initial - o)).abs() / (self.initial - o))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleHarness {
    pub lambda: f64,
    pub rates: Vec<RateCheck>,
    pub perturbative: PerturbativeCheck,
    pub spectrum_error: f64,
    pub rabi_coupling: f64,
    pub rabi_frequency: f64,
    pub weak_report: ComparisonReport<f64>,
    pub strong_report: ComparisonReport<f64>,
    pub reference: OracleTrajectory<f64>,
    pub predicted: PopulationTrajectory<f64>,
}

impl OracleHarness {
    pub fn rabi_error(&self) -> f64 {
        (self.rabi_frequency - 2.0 * self.rabi_coupling).abs() / (2.0 * self.rabi_coupling)
    }
}

/// λ̄ giving Λ = √(∫λ̄² dx) = `strength` on the trap grid.
pub fn uniform_for_strength(trap: &Trap, strength: f64, detuning: f64) -> CouplingSpec<f64> {
    let unit = CouplingSpec::uniform(1.0, trap.x.len(), detuning);
    unit.scaled(strength / unit.strength(trap.dx))
}

fn table(trap: &Trap, cfg: &Config, strength: f64, detuning: f64) -> Result<Table, CliError> {
    resonance_table(&uniform_for_strength(trap, strength, detuning), trap, &cfg.output_grid())
        .map_err(numerical(format!("matrix elements at Δ_em = {detuning}")))
}

fn channel_gamma(rates: &DecayRates<f64>, kind: ChannelKind) -> f64 {
    match kind {
        ChannelKind::Condensate => rates.gamma0,
        ChannelKind::Sqe(j) => rates.gamma_plus[j],
        ChannelKind::Pb(j) => -rates.gamma_minus[j],
    }
}

/// Open channel of the requested kind with the largest rate.
fn strongest(tb: &Table, rates: &DecayRates<f64>, pb: bool) -> Option<usize> {
    (1..tb.n_channels()).filter(|&c| tb.is_open(c) && matches!(tb.channels[c].kind, ChannelKind::Pb(_)) == pb).max_by(
        |&a, &b| channel_gamma(rates, tb.channels[a].kind).total_cmp(&channel_gamma(rates, tb.channels[b].kind)),
    )
}

fn rate_check(label: &'static str, tb: &Table, rates: &DecayRates<f64>, c: usize) -> Result<RateCheck, CliError> {
    let kind = tb.channels[c].kind;
    let gamma = channel_gamma(rates, kind);
    let sys = TruncatedSystem::with_combs(tb, rates, &[c], CombSpec::default())
        .map_err(numerical(format!("oracle comb for {}", kind.label())))?;
    // Population rate Γ = 2γ; fit window [5/Γ, 10/Γ].
    let times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.025 / gamma).collect();
    let tr = integrate_coupled_modes(&sys, &times).map_err(numerical("oracle integration"))?;
    let y: Vec<f64> = match kind {
        ChannelKind::Pb(_) => tr.row(0).iter().map(|n| 1.0 / (n + 1.0)).collect(),
        _ => tr.row(0),
    };
    let oracle = fit_decay_rate(&times, &y, 2.5 / gamma, 5.0 / gamma).map_err(numerical("decay fit"))?;
    Ok(RateCheck { label, detuning: tb.detuning, channel: c, gamma, predicted: 2.0 * gamma, oracle })
}

/// Single-channel decay with only γ0 active, as the adiabatic equations see it.
fn condensate_only(trap: &Trap, gamma0: f64) -> DecayRates<f64> {
    let mut r = DecayRates::zero(trap.modes.len());
    r.gamma0 = gamma0;
    r
}

fn quasi_steady(
    trap: &Trap,
    tb: &Table,
    strength: f64,
) -> Result<(ComparisonReport<f64>, OracleTrajectory<f64>, PopulationTrajectory<f64>), CliError> {
    let rates = decay_rates(tb);
    let g = rates.gamma0;
    let sys = TruncatedSystem::with_combs(tb, &rates, &[0], CombSpec::default())
        .map_err(numerical("oracle comb for the condensate"))?;
    let times: Vec<f64> = (0..=50).map(|i| i as f64 * 0.02 / g).collect();
    let reference = integrate_coupled_modes(&sys, &times).map_err(numerical("oracle integration"))?;
    let predicted = evolve_adiabatic(&condensate_only(trap, g), trap, &times, AdiabaticOptions::default())
        .map_err(numerical("adiabatic evolution"))?;
    let (width, spread) = spectral_width_estimates(trap, 0.0);
    let validity = Validity { strength, width, spread };
    let report =
        compare_to_quasi_steady(&reference, &predicted, validity).map_err(numerical("quasi-steady comparison"))?;
    Ok((report, reference, predicted))
}

/// Golden rule, perturbative and two-mode checks against the coupled-mode oracle at Λ = 0.01.
pub fn oracle_harness(trap: &Trap, cfg: &Config) -> Result<OracleHarness, CliError> {
    let lambda = ORACLE_STRENGTH;
    let mut rates = Vec::new();

    let tb0 = table(trap, cfg, lambda, 0.0)?;
    let r0 = decay_rates(&tb0);
    rates.push(rate_check("condensate", &tb0, &r0, 0)?);

    let tb_sqe = table(trap, cfg, lambda, -5.0)?;
    let r_sqe = decay_rates(&tb_sqe);
    if let Some(c) = strongest(&tb_sqe, &r_sqe, false) {
        rates.push(rate_check("sqe", &tb_sqe, &r_sqe, c)?);
    }
    let tb_pb = table(trap, cfg, lambda, 8.0)?;
    let r_pb = decay_rates(&tb_pb);
    if let Some(c) = strongest(&tb_pb, &r_pb, true) {
        rates.push(rate_check("pb", &tb_pb, &r_pb, c)?);
    }

    // Λ²t² < 0.01 on a band of ±2 around the condensate resonance.
    let band = TruncatedSystem::with_band(&tb0, Trapped::Condensate, 2.0, 200);
    let t_end = 0.1 / lambda;
    let ptimes: Vec<f64> = (0..10).map(|i| i as f64 * t_end / 10.0).collect();
    let ptr = integrate_coupled_modes(&band, &ptimes).map_err(numerical("oracle integration"))?;
    let perturbative = PerturbativeCheck {
        t: ptimes[1..].to_vec(),
        predicted_n0: ptimes[1..].iter().map(|&t| perturbative_populations(&band, t)[0]).collect(),
        oracle_n0: ptr.row(0)[1..].to_vec(),
        initial: ptr.row(0)[0],
    };

    let comb = TruncatedSystem::with_combs(&tb0, &r0, &[0], CombSpec::default())
        .map_err(numerical("oracle comb for the condensate"))?;
    let spectrum_error =
        spectrum_comparison(&comb, 0.02 / r0.gamma0, 2.0 * r0.gamma0).map_err(numerical("spectrum comparison"))?;

    let two = TruncatedSystem::two_mode(RABI_COUPLING, 1.0);
    let rtimes: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.01).collect();
    let rtr = integrate_coupled_modes(&two, &rtimes).map_err(numerical("two-mode oracle"))?;
    let rabi_frequency = oscillation_frequency(&rtimes, &rtr.row(0))
        .ok_or_else(|| CliError::Numerical("two-mode oracle: no oscillation found".into()))?;

    let (weak_report, reference, predicted) = quasi_steady(trap, &tb0, lambda)?;
    let (width, _) = spectral_width_estimates(trap, 0.0);
    let strong = 2.0 * width;
    let tb_strong = table(trap, cfg, strong, 0.0)?;
    let (strong_report, _, _) = quasi_steady(trap, &tb_strong, strong)?;

    Ok(OracleHarness {
        lambda,
        rates,
        perturbative,
        spectrum_error,
        rabi_coupling: RABI_COUPLING,
        rabi_frequency,
        weak_report,
        strong_report,
        reference,
        predicted,
    })
}

/// Oracle condensate trajectory in the trap-dynamics schema; other populations are frozen.
pub fn oracle_as_trajectory(reference: &OracleTrajectory<f64>, trap: &Trap) -> PopulationTrajectory<f64> {
    let dx = trap.dx;
    let mu = trap.mu();
    let n_modes: Vec<f64> = trap.modes.iter().map(|m| m.occupation).collect();
    let excited: f64 = trap.modes.iter().map(|m| (m.norm_u(dx) + m.norm_v(dx)) * m.occupation + m.norm_v(dx)).sum();
    let e_modes: f64 = trap.modes.iter().map(|m| m.energy * m.occupation).sum();
    let n0 = reference.row(0);
    let s = reference.t.len();
    PopulationTrajectory {
        t: reference.t.clone(),
        n0: n0.clone(),
        n_modes: vec![n_modes; s],
        n_trap: n0.iter().map(|n| n + excited).collect(),
        e_trap: n0.iter().map(|n| mu * (n + excited) + e_modes).collect(),
        out_coherent: n0.iter().map(|n| n0[0] - n).collect(),
        out_sqe: vec![0.0; s],
        out_pb: vec![0.0; s],
        diagnostics: vec![],
        stopped_at: None,
    }
}
