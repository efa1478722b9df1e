use proptest::prelude::*;
use thrift_core::exact::{expm_hermitian, spectral_error, DenseUnitary};
use thrift_core::formulas::{
    evaluate_schedule, make_omelyan_small_a, make_schedule, make_thrift, make_trotter, omelyan_a3, omelyan_b2, suzuki_s2,
    thrift_error_bound, verify_time_ordered_identity, FormulaError, FormulaKind, Generator, Omega8, Schedule, OMELYAN_A1,
    OMELYAN_A2, OMELYAN_B1,
};
use thrift_core::models::{build_model, ModelSpec, PartitionedHamiltonian};
use thrift_core::pauli::{PauliString, PauliSum};

const FIXED: [FormulaKind; 9] = [
    FormulaKind::Trotter1,
    FormulaKind::Trotter2,
    FormulaKind::Trotter4,
    FormulaKind::Trotter8Opt,
    FormulaKind::OmelyanSmallA4,
    FormulaKind::Thrift1,
    FormulaKind::Thrift2,
    FormulaKind::Thrift4,
    FormulaKind::Thrift8Opt,
];

fn tfim(l: usize, alpha: f64) -> PartitionedHamiltonian {
    build_model(&ModelSpec::tfim_1d(l, 1.0, alpha)).unwrap()
}

fn error(part: &PartitionedHamiltonian, kind: FormulaKind, t: f64, n: u64) -> f64 {
    let s = make_schedule(kind, part, Some(&Omega8::bundled())).unwrap();
    let exact = expm_hermitian(&part.full, t).unwrap();
    spectral_error(&exact, &evaluate_schedule(&s, t, n).unwrap()).unwrap()
}

fn sum(n: usize, terms: &[(&str, f64)]) -> PauliSum {
    PauliSum::from_real_terms(n, terms.iter().map(|(p, c)| (PauliString::parse(p).unwrap(), *c))).unwrap()
}

#[test]
fn first_order_factor_counts() {
    let part = tfim(6, 0.1);
    let trotter = make_trotter(&part, 1, None).unwrap();
    assert_eq!(trotter.len(), 3);
    assert_eq!(trotter.totals(), vec![1.0, 1.0, 1.0]);
    let thrift = make_thrift(&part, 1, None).unwrap();
    let seq: Vec<(usize, f64)> = thrift.factors.iter().map(|f| (f.generator, f.multiplier)).collect();
    assert_eq!(seq, vec![(1, 1.0), (0, -1.0), (2, 1.0)]);
}

#[test]
fn composition_constants() {
    assert!((suzuki_s2() - 0.4144907717943757).abs() < 1e-15);
    assert!((omelyan_b2() - (0.5 - OMELYAN_B1)).abs() < 1e-15);
    assert!((omelyan_a3() - (1.0 - 2.0 * (OMELYAN_A1 + OMELYAN_A2))).abs() < 1e-15);
    let w = Omega8::bundled();
    assert_eq!(w.sequence().len(), 15);
    assert!((w.sequence().iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn omega_table_parsing() {
    let w = Omega8::bundled();
    let fifteen: String = w.sequence().iter().map(|v| format!("{v:e}\n")).collect();
    assert_eq!(Omega8::parse(&fifteen).unwrap(), w);
    assert!(Omega8::parse("1.0\n2.0\n").is_err());
    assert!(Omega8::parse(&"0.1\n".repeat(8)).is_err());
    assert!(matches!(make_trotter(&tfim(4, 0.1), 8, None), Err(FormulaError::MissingOmegaTable)));
    assert!(make_trotter(&tfim(4, 0.1), 3, None).is_err());
}

#[test]
fn consistency_totals() {
    let part = tfim(6, 0.1);
    for kind in FIXED {
        let s = make_schedule(kind, &part, Some(&Omega8::bundled())).unwrap();
        let totals = s.totals();
        // thrift block generators each carry a copy of H0, so the bare H0
        // factors net to 1 - G
        let want_h0 = if kind.is_thrift_family() { 1.0 - part.gamma() as f64 } else { 1.0 };
        assert!((totals[0] - want_h0).abs() < 1e-12, "{kind}: {totals:?}");
        assert!(totals[1..].iter().all(|t| (t - 1.0).abs() < 1e-12), "{kind}: {totals:?}");
    }
}

#[test]
fn second_order_palindrome_inverts() {
    let part = tfim(5, 0.4);
    for order in [2, 4] {
        let s = make_trotter(&part, order, None).unwrap();
        let fwd = evaluate_schedule(&s, 0.8, 1).unwrap();
        let back = evaluate_schedule(&s, -0.8, 1).unwrap();
        let prod = fwd.compose(&back).unwrap();
        assert!(spectral_error(&prod, &DenseUnitary::identity(5)).unwrap() < 1e-12);
    }
}

#[test]
fn single_group_thrift_is_exact() {
    let part = tfim(2, 0.7);
    for kind in [FormulaKind::Thrift1, FormulaKind::Thrift2, FormulaKind::Thrift4, FormulaKind::Thrift8Opt] {
        for t in [0.3, 2.0] {
            assert!(error(&part, kind, t, 1) < 1e-12, "{kind} at {t}");
        }
    }
}

#[test]
fn zero_coupling_is_exact() {
    let part = tfim(5, 0.0);
    for kind in FIXED {
        assert!(error(&part, kind, 1.3, 2) < 1e-10, "{kind}");
    }
}

#[test]
fn thrift_error_quadratic_in_coupling() {
    let (a, b) = (error(&tfim(6, 0.1), FormulaKind::Thrift1, 0.5, 1), error(&tfim(6, 0.05), FormulaKind::Thrift1, 0.5, 1));
    let ratio = a / b;
    assert!((ratio - 4.0).abs() < 0.6, "{ratio}");
}

#[test]
fn trotter_step_ratios() {
    let part = tfim(4, 1.0);
    let r1 = error(&part, FormulaKind::Trotter1, 1.0, 10) / error(&part, FormulaKind::Trotter1, 1.0, 20);
    assert!((r1 - 2.0).abs() < 0.4, "{r1}");
    let r2 = error(&part, FormulaKind::Trotter2, 1.0, 10) / error(&part, FormulaKind::Trotter2, 1.0, 20);
    assert!((r2 - 4.0).abs() < 0.8, "{r2}");
}

#[test]
fn omelyan_beats_second_order() {
    let part = tfim(6, 0.1);
    let omelyan = make_omelyan_small_a(&part).unwrap();
    let exact = expm_hermitian(&part.full, 0.2).unwrap();
    let om = spectral_error(&exact, &evaluate_schedule(&omelyan, 0.2, 1).unwrap()).unwrap();
    assert!(om < error(&part, FormulaKind::Trotter2, 0.2, 1));
}

#[test]
fn single_factor_schedule_is_exact() {
    let part = tfim(4, 0.3);
    let mut s = Schedule::new(vec![Generator { label: "H".into(), sum: part.full.clone() }]);
    s.push(0, 1.0);
    let u = evaluate_schedule(&s, 0.9, 1).unwrap();
    assert!(spectral_error(&u, &expm_hermitian(&part.full, 0.9).unwrap()).unwrap() < 1e-12);
}

#[test]
fn error_bound_cases() {
    assert_eq!(thrift_error_bound(&tfim(2, 0.5), 1.0, 8).unwrap(), 0.0);
    // disjoint groups under a single-qubit H0 commute at all times
    let mut part = tfim(4, 0.2);
    part.groups[1].sum = sum(4, &[("IIZZ", 1.0)]);
    part.groups[0].sum = sum(4, &[("XXII", 1.0)]);
    assert!(thrift_error_bound(&part, 0.7, 16).unwrap() < 1e-12);
    let part = tfim(4, 0.1);
    let bound = thrift_error_bound(&part, 0.3, 32).unwrap();
    assert!(error(&part, FormulaKind::Thrift1, 0.3, 1) <= bound);
}

#[test]
fn time_ordered_identity() {
    let h0 = sum(2, &[("ZI", 1.0), ("IZ", 0.7)]);
    assert!(verify_time_ordered_identity(&h0, &sum(2, &[("ZZ", 0.4)]), 0.1, 0.9, 1).unwrap() < 1e-12);
    let a = sum(2, &[("XI", 0.3), ("YZ", -0.5), ("XX", 0.8)]);
    assert!(verify_time_ordered_identity(&h0, &a, 0.4, 0.4, 3).unwrap() < 1e-12);
    let d1 = verify_time_ordered_identity(&h0, &a, 0.2, 1.4, 64).unwrap();
    let d2 = verify_time_ordered_identity(&h0, &a, 0.2, 1.4, 128).unwrap();
    assert!((d2 / d1 - 0.5).abs() < 0.05, "{}", d2 / d1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn thrift_never_exceeds_bound(alpha in 0.01f64..0.3, t in 0.05f64..0.8) {
        let part = tfim(4, alpha);
        let bound = thrift_error_bound(&part, t, 32).unwrap();
        prop_assert!(error(&part, FormulaKind::Thrift1, t, 1) <= bound * (1.0 + 1e-6) + 1e-14);
    }

    #[test]
    fn heisenberg_zero_coupling(seed in any::<u64>(), t in 0.1f64..2.0) {
        let part = build_model(&ModelSpec::heisenberg_1d(4, 1.0, 0.0, seed)).unwrap();
        for kind in FIXED {
            prop_assert!(error(&part, kind, t, 1) < 1e-10);
        }
    }
}
