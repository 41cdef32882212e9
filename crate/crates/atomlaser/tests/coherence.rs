mod common;

use atomlaser::coherence::*;
use atomlaser::outcoupling::{output_field, Channel, ChannelKind};
use atomlaser::scalar::C;
use atomlaser::Fields;
use common::*;
use proptest::prelude::*;

/// Condensate plus `pairs.len()` (j+, j−) channels on a small synthetic grid.
fn synthetic(n0: f64, psi0: Vec<C<f64>>, pairs: Vec<(f64, Vec<C<f64>>, Vec<C<f64>>)>) -> Fields {
    let m = psi0.len();
    let mut channels = vec![Channel { kind: ChannelKind::Condensate, energy: 0.0, population: n0 }];
    let mut psi = vec![psi0];
    for (j, (n, plus, minus)) in pairs.into_iter().enumerate() {
        channels.push(Channel { kind: ChannelKind::Sqe(j), energy: 1.0 + j as f64, population: n });
        channels.push(Channel { kind: ChannelKind::Pb(j), energy: -1.0 - j as f64, population: n + 1.0 });
        psi.push(plus);
        psi.push(minus);
    }
    Fields {
        t: 1.0,
        x: (0..m).map(|i| i as f64).collect(),
        dx: 1.0,
        omega_out: vec![1.0; channels.len()],
        channels,
        psi,
    }
}

fn complex_vec(m: usize) -> impl Strategy<Value = Vec<C<f64>>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C::new(a, b)), m)
}

fn field_set() -> impl Strategy<Value = Fields> {
    let m = 6;
    (0.0f64..1000.0, complex_vec(m), prop::collection::vec((0.0f64..50.0, complex_vec(m), complex_vec(m)), 0..4))
        .prop_map(|(n0, psi0, pairs)| synthetic(n0, psi0, pairs))
}

proptest! {
    #[test]
    fn g1_is_bounded_hermitian_and_unit_on_diagonal(f in field_set()) {
        let comp = components(&f, DEFAULT_NODE_FRACTION);
        for a in 0..f.x.len() {
            for b in 0..f.x.len() {
                let ab = g1(&f, &comp, a, b).unwrap();
                let ba = g1(&f, &comp, b, a).unwrap();
                match (ab, ba) {
                    (Coh::Value(p), Coh::Value(q)) => {
                        prop_assert!(p.norm() <= 1.0 + 1e-9);
                        prop_assert!((p - q.conj()).norm() <= 1e-15);
                        if a == b {
                            prop_assert_eq!(p, C::new(1.0, 0.0));
                        }
                    }
                    (Coh::Node, Coh::Node) => prop_assert!(comp.node[a] || comp.node[b]),
                    _ => prop_assert!(false, "asymmetric node"),
                }
            }
        }
    }

    #[test]
    fn g2_is_nonnegative(f in field_set()) {
        let comp = components(&f, DEFAULT_NODE_FRACTION);
        for v in g2_profile(&f, &comp).unwrap().into_iter().flat_map(|c| c.value()) {
            prop_assert!(v >= -1e-12, "{v}");
        }
    }

    #[test]
    fn components_share_the_output_density(f in field_set()) {
        let comp = components(&f, DEFAULT_NODE_FRACTION);
        prop_assert_eq!(&comp.n_out, &f.density());
        for i in 0..f.x.len() {
            let cond = f.channels[0].population * f.psi[0][i].norm_sqr();
            let rest: f64 = (1..f.channels.len()).map(|c| f.channels[c].population * f.psi[c][i].norm_sqr()).sum();
            prop_assert_eq!(comp.n_condensate[i], cond);
            prop_assert!((comp.n_tilde[i] - rest).abs() <= 1e-12 * comp.n_out[i].max(1e-300));
        }
    }
}

#[test]
fn condensate_only_is_fully_coherent() {
    let psi0 = vec![C::new(0.3, 0.1), C::new(-0.2, 0.5), C::new(0.05, 0.0), C::new(0.0, -0.7)];
    let f = synthetic(500.0, psi0, vec![]);
    let comp = components(&f, DEFAULT_NODE_FRACTION);
    for a in 0..4 {
        assert!((g2(&f, &comp, a).unwrap().value().unwrap() - 1.0).abs() < 1e-6);
        for b in 0..4 {
            assert!((g1(&f, &comp, a, b).unwrap().value().unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn thermal_light_has_g2_of_two() {
    let zero = vec![C::new(0.0, 0.0); 3];
    let plus = vec![C::new(0.4, 0.2), C::new(-0.1, 0.3), C::new(0.6, -0.6)];
    let f = synthetic(0.0, zero.clone(), vec![(7.0, plus, zero.clone())]);
    let comp = components(&f, DEFAULT_NODE_FRACTION);
    for i in 0..3 {
        assert_eq!(comp.m_tilde[i], C::new(0.0, 0.0));
        assert_eq!(g2(&f, &comp, i).unwrap(), Coh::Value(2.0));
    }
}

#[test]
fn vanishing_density_is_a_node() {
    let psi0 = vec![C::new(0.5, 0.0), C::new(0.0, 0.0), C::new(0.2, 0.0)];
    let f = synthetic(10.0, psi0, vec![]);
    let comp = components(&f, DEFAULT_NODE_FRACTION);
    assert_eq!(g1(&f, &comp, 0, 1).unwrap(), Coh::Node);
    assert_eq!(g1(&f, &comp, 1, 1).unwrap(), Coh::Node);
    assert_eq!(g2(&f, &comp, 1).unwrap(), Coh::Node);
    assert!(g1(&f, &comp, 0, 2).unwrap().value().is_some());
}

#[test]
fn out_of_range_indices() {
    let f = synthetic(1.0, vec![C::new(1.0, 0.0); 3], vec![]);
    let comp = components(&f, DEFAULT_NODE_FRACTION);
    assert_eq!(g1(&f, &comp, 3, 0), Err(CoherenceError::Index(3)));
    assert_eq!(g1(&f, &comp, 0, 9), Err(CoherenceError::Index(9)));
    assert_eq!(g2(&f, &comp, 5), Err(CoherenceError::Index(5)));
    assert_eq!(nearest_index(&f.x, 1.4), 1);
    assert_eq!(nearest_index(&f.x, 100.0), 2);
}

#[test]
fn inconsistent_densities_violate_cauchy_schwarz() {
    let f = synthetic(1.0, vec![C::new(1.0, 0.0); 2], vec![]);
    let mut comp = components(&f, DEFAULT_NODE_FRACTION);
    comp.n_out[1] = 0.5;
    assert_eq!(g1(&f, &comp, 0, 1), Err(CoherenceError::CauchySchwarz(0, 1)));
}

#[test]
fn pair_terms_survive_at_zero_temperature() {
    let trap = trap0();
    let tb = table(trap, 0.1, 0.0);
    for c in &tb.channels {
        match c.kind {
            ChannelKind::Sqe(_) => assert_eq!(c.population, 0.0),
            ChannelKind::Pb(_) => assert_eq!(c.population, 1.0),
            ChannelKind::Condensate => {}
        }
    }
    assert!(tb.is_open(2), "pair breaking with the lowest mode should be open");
    let f = output_field(&tb, &trap.x, 20.0, 200).unwrap();
    let comp = components(&f, DEFAULT_NODE_FRACTION);
    let peak = comp.m_tilde.iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(peak > 0.0);
    let i = nearest_index(&f.x, 1.0);
    assert_eq!(g1(&f, &comp, i, i).unwrap(), Coh::Value(C::new(1.0, 0.0)));
    // g1 rows on the real field respect Cauchy–Schwarz everywhere
    let row = g1_row(&f, &comp, nearest_index(&f.x, 0.0)).unwrap();
    assert!(row.iter().flat_map(|c| c.value()).all(|z| z.norm() <= 1.0 + 1e-9));
}
