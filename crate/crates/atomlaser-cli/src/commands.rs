use atomlaser::coherence::{components, g1_row, g2_profile, nearest_index, DEFAULT_NODE_FRACTION};
use atomlaser::dynamics::{decay_rates, evolve_adiabatic, AdiabaticOptions, PopulationTrajectory};
use atomlaser::io::{Cell, Csv};
use atomlaser::outcoupling::{
    golden_rule_rates, matrix_elements, output_field, rates_at, resonance_table, CouplingSpec,
};
use atomlaser::{Fields, Trap};
use serde_json::json;

use crate::cases::*;
use crate::harness::{oracle_as_trajectory, oracle_harness};
use crate::{numerical, CliError, Command, Run};

pub fn run_command(command: Command, r: &mut Run) -> Result<(), CliError> {
    match command {
        Command::Hfb => hfb(r),
        Command::Spectrum => spectrum(r),
        Command::Density => density(r),
        Command::G1 => coherence(r, true),
        Command::G2 => coherence(r, false),
        Command::Evolve => evolve(r),
        Command::OracleCheck => oracle_check(r),
    }
}

fn hfb(r: &mut Run) -> Result<(), CliError> {
    let temp = r.cfg.temperature;
    let trap = r.trap(temp)?.clone();
    let mut prof = Csv::new(&["x", "psi0", "n_condensate", "n_noncondensate", "n_total"]);
    let total = trap.total_density();
    for i in 0..trap.x.len() {
        let p = trap.condensate.psi0[i];
        prof.push_nums(&[trap.x[i], p, trap.n0() * p * p, trap.nbar[i], total[i]]);
    }
    let mut modes = Csv::new(&["j", "energy", "occupation", "norm_u", "norm_v", "parity"]);
    for (j, m) in trap.modes.iter().enumerate() {
        modes.push_nums(&[
            j as f64,
            m.energy,
            m.occupation,
            m.norm_u(trap.dx),
            m.norm_v(trap.dx),
            m.parity.sign::<f64>(),
        ]);
    }
    let mut trace = Csv::new(&["iteration", "mu", "n0", "delta_mu", "delta_nbar"]);
    for (k, it) in trap.trace.iter().enumerate() {
        trace.push_nums(&[k as f64, it.mu, it.n0, it.delta_mu, it.delta_nbar]);
    }
    let t = tag(temp);
    r.write(&format!("hfb_T{t}.csv"), &prof)?;
    r.write(&format!("modes_T{t}.csv"), &modes)?;
    r.write(&format!("scf_T{t}.csv"), &trace)?;
    Ok(())
}

fn spectrum(r: &mut Run) -> Result<(), CliError> {
    let cfg = r.cfg;
    let n = ((cfg.scan_max - cfg.scan_min) / cfg.scan_step).round() as usize;
    let detunings: Vec<f64> = (0..=n).map(|i| cfg.scan_min + i as f64 * cfg.scan_step).collect();
    for temp in SPECTRUM_TEMPERATURES {
        let trap = r.trap(temp)?.clone();
        let coupling = CouplingSpec::uniform(cfg.coupling_amplitude, trap.x.len(), 0.0);
        let tb = resonance_table(&coupling, &trap, &cfg.output_grid())
            .map_err(numerical(format!("matrix elements at T = {temp}")))?;
        let mut csv = Csv::new(&["delta_em", "rate_condensate", "rate_sqe", "rate_pb"]);
        let rows = r.time(&format!("scan_T{}", tag(temp)), |_| {
            detunings.iter().map(|&d| (d, rates_at(&tb, d))).collect::<Vec<_>>()
        });
        for (d, s) in &rows {
            csv.push_nums(&[*d, s.condensate, s.sqe, s.pb]);
        }
        r.write(&format!("spectrum_T{}.csv", tag(temp)), &csv)?;
        let at = |d: f64| {
            let s = rates_at(&tb, d);
            json!({"condensate": s.condensate, "sqe": s.sqe, "pb": s.pb})
        };
        r.results.insert(
            format!("spectrum_T{}", tag(temp)),
            json!({
                "threshold_delta_em": -trap.mu(),
                "coupling": cfg.coupling_amplitude,
                "at_m5": at(-5.0),
                "at_0": at(0.0),
                "at_8": at(8.0),
            }),
        );
    }
    Ok(())
}

fn field(r: &mut Run, trap: &Trap, detuning: f64, coupling: f64, t: f64) -> Result<Fields, CliError> {
    let cfg = r.cfg;
    let spec = CouplingSpec::uniform(coupling, trap.x.len(), detuning);
    let tb = matrix_elements(&spec, trap, &cfg.output_grid())
        .map_err(numerical(format!("matrix elements at Δ_em = {detuning}")))?;
    output_field(&tb, &trap.x, t, cfg.field_window_nodes)
        .map_err(numerical(format!("output field at Δ_em = {detuning}, t = {t}")))
}

fn density(r: &mut Run) -> Result<(), CliError> {
    let trap = r.trap(DENSITY_TEMPERATURE)?.clone();
    let times = r.cfg.density_times.clone();
    for (d, lam) in DENSITY_CASES {
        for &t in &times {
            let label = format!("delta{}_t{}", tag(d), tag(t));
            let f = r.time(&format!("field_{label}"), |r| field(r, &trap, d, lam, t))?;
            let n = f.density();
            let coh = f.channel_density(0);
            let mut csv = Csv::new(&["x", "n_coherent", "n_thermal", "n_out"]);
            for i in 0..n.len() {
                csv.push_nums(&[f.x[i], coh[i], n[i] - coh[i], n[i]]);
            }
            r.write(&format!("density_{label}.csv"), &csv)?;
            let numbers = f.channel_numbers();
            let total: f64 = numbers.iter().sum();
            r.results.insert(
                format!("density_{label}"),
                json!({"coupling": lam, "n_out_coherent": numbers[0], "n_out_total": total}),
            );
        }
    }
    Ok(())
}

fn coherence(r: &mut Run, first: bool) -> Result<(), CliError> {
    let lam = r.cfg.coupling_amplitude;
    for (temp, d) in COHERENCE_CASES {
        let trap = r.trap(temp)?.clone();
        let label = format!("T{}_delta{}", tag(temp), tag(d));
        let f = r.time(&format!("field_{label}"), |r| field(r, &trap, d, lam, COHERENCE_TIME))?;
        let comp = components(&f, DEFAULT_NODE_FRACTION);
        let nodes = comp.node.iter().filter(|&&b| b).count();
        if first {
            let i0 = nearest_index(&f.x, 0.0);
            let row = g1_row(&f, &comp, i0).map_err(numerical(format!("g1 for {label}")))?;
            let mut csv = Csv::new(&["x2", "g1_re", "g1_im", "g1_abs"]);
            let mut min_abs = f64::INFINITY;
            for (i, g) in row.iter().enumerate() {
                let v = g.value();
                if let Some(z) = v {
                    min_abs = min_abs.min(z.norm());
                }
                csv.push(vec![
                    Cell::Num(f.x[i]),
                    v.map(|z| z.re).into(),
                    v.map(|z| z.im).into(),
                    v.map(|z| z.norm()).into(),
                ]);
            }
            r.write(&format!("g1_{label}.csv"), &csv)?;
            r.results.insert(format!("g1_{label}"), json!({"x1": f.x[i0], "min_abs_g1": min_abs, "nodes": nodes}));
        } else {
            let prof = g2_profile(&f, &comp).map_err(numerical(format!("g2 for {label}")))?;
            let mut csv = Csv::new(&["x", "g2", "n_out", "n_condensate", "n_tilde", "m_tilde_re", "m_tilde_im"]);
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for (i, g) in prof.iter().enumerate() {
                let v = g.value();
                if let Some(x) = v {
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
                csv.push(vec![
                    Cell::Num(f.x[i]),
                    v.into(),
                    Cell::Num(comp.n_out[i]),
                    Cell::Num(comp.n_condensate[i]),
                    Cell::Num(comp.n_tilde[i]),
                    Cell::Num(comp.m_tilde[i].re),
                    Cell::Num(comp.m_tilde[i].im),
                ]);
            }
            r.write(&format!("g2_{label}.csv"), &csv)?;
            r.results.insert(format!("g2_{label}"), json!({"min_g2": lo, "max_g2": hi, "nodes": nodes}));
        }
    }
    Ok(())
}

/// Trajectory columns shared by `evolve` and the oracle reference.
pub(crate) fn trajectory_csv(tr: &PopulationTrajectory<f64>) -> Csv {
    let mut csv =
        Csv::new(&["t", "n0", "n_excited", "sum_nj", "n_t", "e_t", "n_out_coherent", "n_out_sqe", "n_out_pb"]);
    for s in 0..tr.len() {
        csv.push_nums(&[
            tr.t[s],
            tr.n0[s],
            tr.n_trap[s] - tr.n0[s],
            tr.quasiparticles(s),
            tr.n_trap[s],
            tr.e_trap[s],
            tr.out_coherent[s],
            tr.out_sqe[s],
            tr.out_pb[s],
        ]);
    }
    csv
}

fn evolve(r: &mut Run) -> Result<(), CliError> {
    let cfg = r.cfg;
    let n = cfg.n_samples.max(2);
    let times: Vec<f64> = (0..n).map(|i| cfg.t_max * i as f64 / (n - 1) as f64).collect();
    for case in EVOLVE_CASES {
        let trap = r.trap(case.temperature)?.clone();
        let spec = CouplingSpec::uniform(case.coupling, trap.x.len(), case.detuning);
        let tb = resonance_table(&spec, &trap, &cfg.output_grid())
            .map_err(numerical(format!("matrix elements for case {}", case.label)))?;
        let rates = decay_rates(&tb);
        let opts = AdiabaticOptions { rtol: cfg.ode_rtol, ..AdiabaticOptions::default() };
        let tr = evolve_adiabatic(&rates, &trap, &times, opts)
            .map_err(numerical(format!("adiabatic evolution for case {}", case.label)))?;
        r.write(&format!("evolve_{}.csv", case.label), &trajectory_csv(&tr))?;
        let last = tr.len() - 1;
        let mut modes = Csv::new(&["j", "energy", "gamma_plus", "gamma_minus", "n_initial", "n_final"]);
        for (j, m) in trap.modes.iter().enumerate() {
            modes.push_nums(&[
                j as f64,
                m.energy,
                rates.gamma_plus[j],
                rates.gamma_minus[j],
                tr.n_modes[0][j],
                tr.n_modes[last][j],
            ]);
        }
        r.write(&format!("evolve_{}_modes.csv", case.label), &modes)?;
        let summary = golden_rule_rates(&tb);
        r.results.insert(
            format!("evolve_{}", case.label),
            json!({
                "temperature": case.temperature,
                "delta_em": case.detuning,
                "coupling": case.coupling,
                "gamma0": rates.gamma0,
                "rate_condensate": summary.condensate,
                "rate_sqe": summary.sqe,
                "rate_pb": summary.pb,
                "closure_error": tr.closure_error(),
                "stopped_at": tr.stopped_at,
                "diagnostics": tr.diagnostics,
            }),
        );
    }
    Ok(())
}

fn oracle_check(r: &mut Run) -> Result<(), CliError> {
    let trap = r.trap(ORACLE_TEMPERATURE)?.clone();
    let cfg = r.cfg;
    let h = r.time("oracle_harness", |_| oracle_harness(&trap, cfg))?;
    let mut csv = Csv::new(&["check", "detail", "predicted", "oracle", "relative_error"]);
    for rc in &h.rates {
        csv.push(vec![
            Cell::Text(format!("decay_rate_{}", rc.label)),
            Cell::Num(rc.channel as f64),
            Cell::Num(rc.predicted),
            Cell::Num(rc.oracle),
            Cell::Num(rc.relative_error()),
        ]);
    }
    let p = &h.perturbative;
    for i in 0..p.t.len() {
        let err = (p.predicted_n0[i] - p.oracle_n0[i]).abs() / p.oracle_n0[i];
        csv.push(vec![
            "perturbative_n0".into(),
            Cell::Num(p.t[i]),
            Cell::Num(p.predicted_n0[i]),
            Cell::Num(p.oracle_n0[i]),
            Cell::Num(err),
        ]);
    }
    csv.push(vec![
        "rabi_frequency".into(),
        Cell::Num(h.rabi_coupling),
        Cell::Num(2.0 * h.rabi_coupling),
        Cell::Num(h.rabi_frequency),
        Cell::Num(h.rabi_error()),
    ]);
    csv.push(vec![
        "spectrum_near_resonance".into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Num(h.spectrum_error),
    ]);
    r.write("oracle_checks.csv", &csv)?;
    r.write("oracle_reference.csv", &trajectory_csv(&oracle_as_trajectory(&h.reference, &trap)))?;
    r.write("oracle_predicted.csv", &trajectory_csv(&h.predicted))?;
    let report = |rep: &atomlaser::oracle::ComparisonReport<f64>| {
        json!({
            "observables": rep.observables.iter().map(|o| json!({"name": o.name, "max_relative_error": o.max_relative_error})).collect::<Vec<_>>(),
            "window": rep.window,
            "weak_coupling": rep.weak_coupling,
            "in_validity": rep.in_validity,
            "notes": rep.notes,
        })
    };
    r.results.insert(
        "oracle".into(),
        json!({
            "strength": h.lambda,
            "max_perturbative_depletion_error": p.max_depletion_error(),
            "weak_report": report(&h.weak_report),
            "strong_report": report(&h.strong_report),
        }),
    );
    Ok(())
}
