#![allow(clippy::excessive_precision)]

use num_rational::Rational64;
use proptest::prelude::*;

use pqheis_core::commutation::{fn_p_residual, fn_x_residual, ladder_shift_residual, FSpec, ShiftSign};
use pqheis_core::eta::{conjugation_residual, pseudo_hermiticity_residual, right_form_of, ConjugationForm};
use pqheis_core::hamiltonian::hermiticity_residual;
use pqheis_core::heisenberg::{pq_commutator_residual, round_trip_checks};
use pqheis_core::matrix::scaled_residual;
use pqheis_core::{
    build_h, build_h_tilde, build_rep, derive_eta_closed_forms, spectrum, DeformationParams, EtaSpec, GaugeSpec,
    HamiltonianForm, PositionMomentumPair, StructureFunctionKind,
};

const DIM: usize = 24;

fn gauge_strategy() -> impl Strategy<Value = GaugeSpec> {
    prop_oneof![
        Just(GaugeSpec::symmetric()),
        Just(GaugeSpec::case_a()),
        Just(GaugeSpec::case_b()),
        (-4i64..=4, -4i64..=4, 1i64..=4).prop_map(|(a, b, d)| GaugeSpec::new(Rational64::new(a, d), Rational64::new(b, d))),
    ]
}

/// Gauges whose weights stay within a few powers of Q over the truncation.
fn moderate_gauge_strategy() -> impl Strategy<Value = GaugeSpec> {
    (-2i64..=2, -2i64..=2).prop_map(|(a, b)| GaugeSpec::new(Rational64::new(a, 2), Rational64::new(b, 2)))
}

fn f_strategy() -> impl Strategy<Value = FSpec> {
    prop_oneof![
        prop::collection::vec(-2.0f64..2.0, 1..5).prop_map(FSpec::Poly),
        (-2i64..=2, -6i64..=6, -4i64..=4).prop_map(|(a, b, c)| FSpec::QPow(EtaSpec::new(
            Rational64::new(a, 2),
            Rational64::new(b, 2),
            Rational64::new(c, 2)
        ))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn relations_hold_in_every_gauge(p in 0.7f64..1.4, q in 0.7f64..1.4, gauge in gauge_strategy()) {
        let params = DeformationParams::new(p, q).unwrap();
        let rep = build_rep(&StructureFunctionKind::NonstandardPQ, &params, &gauge, DIM).unwrap();
        let pair = PositionMomentumPair::new(&rep).unwrap();

        let heis = pq_commutator_residual(&pair, &params, None, 2).unwrap();
        prop_assert!(heis.pass, "{:?}", heis);
        for c in round_trip_checks(&pair, 1).unwrap() {
            prop_assert!(c.pass, "{:?}", c);
        }

        let eta_a = gauge.eta_a();
        prop_assert!(conjugation_residual(&rep, &eta_a, ConjugationForm::Left).unwrap().pass);
        prop_assert!(conjugation_residual(&rep, &right_form_of(&eta_a), ConjugationForm::Right).unwrap().pass);

        let (eta_x, eta_p) = derive_eta_closed_forms(&eta_a).unwrap();
        prop_assert!(pseudo_hermiticity_residual(pair.x(), &eta_x, &params, 0).unwrap().pass);
        prop_assert!(pseudo_hermiticity_residual(pair.p(), &eta_p, &params, 0).unwrap().pass);
        let ht = build_h_tilde(&pair, &eta_x, &eta_p, &params).unwrap();
        prop_assert!(hermiticity_residual(&ht, 2).unwrap().residual <= 1e-11);
    }

    #[test]
    fn hamiltonian_forms_coincide(p in 0.7f64..1.4, q in 0.7f64..1.4, gauge in moderate_gauge_strategy()) {
        let params = DeformationParams::new(p, q).unwrap();
        let rep = build_rep(&StructureFunctionKind::NonstandardPQ, &params, &gauge, DIM).unwrap();
        let pair = PositionMomentumPair::new(&rep).unwrap();
        let ladder = build_h(&pair, HamiltonianForm::Ladder).unwrap();
        prop_assert!(hermiticity_residual(&ladder, 1).unwrap().pass);
        for form in [HamiltonianForm::XP, HamiltonianForm::XP2, HamiltonianForm::Normal] {
            let h = build_h(&pair, form).unwrap();
            let res = scaled_residual(&(&h - &ladder), &[&h, &ladder], 2).unwrap();
            prop_assert!(res <= 1e-9, "{} {}", form, res);
        }
    }

    #[test]
    fn permutation_rules(q in 0.85f64..1.15, gauge in gauge_strategy(), f in f_strategy()) {
        let params = DeformationParams::new(1.0, q).unwrap();
        let rep = build_rep(&StructureFunctionKind::NonstandardPQ, &params, &gauge, DIM).unwrap();
        let pair = PositionMomentumPair::new(&rep).unwrap();
        prop_assert!(fn_x_residual(&pair, &f, 2).unwrap().pass);
        prop_assert!(fn_p_residual(&pair, &f, 2).unwrap().pass);
        prop_assert!(ladder_shift_residual(&pair, &f, ShiftSign::Up, 2).unwrap().pass);
        prop_assert!(ladder_shift_residual(&pair, &f, ShiftSign::Down, 2).unwrap().pass);
    }

    #[test]
    fn spectrum_matches_ladder_diagonal(p in 0.7f64..1.4, q in 0.7f64..1.4) {
        let params = DeformationParams::new(p, q).unwrap();
        let rep = build_rep(&StructureFunctionKind::NonstandardPQ, &params, &GaugeSpec::symmetric(), DIM).unwrap();
        let pair = PositionMomentumPair::new(&rep).unwrap();
        let h = build_h(&pair, HamiltonianForm::Ladder).unwrap();
        let table = spectrum(&StructureFunctionKind::NonstandardPQ, &params, DIM as u32 - 2).unwrap();
        for l in &table.levels {
            let i = l.n as usize;
            prop_assert!((h[(i, i)].re - l.energy).abs() <= 1e-13 * l.energy.abs().max(1.0));
        }
    }
}

#[test]
fn frozen_nonstandard_spectrum() {
    let params = DeformationParams::new(1.1, 0.9).unwrap();
    let table = spectrum(&StructureFunctionKind::NonstandardPQ, &params, 3).unwrap();
    let expected = [0.66556655665566556655, 2.9352243122122924303, 7.7393264856765651812, 16.616111797921103421];
    for (l, e) in table.levels.iter().zip(expected) {
        assert!((l.energy - e).abs() <= 1e-13 * e, "E({}) = {}", l.n, l.energy);
    }
}
