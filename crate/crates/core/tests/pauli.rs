use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use thrift_core::models::{build_model, ModelSpec};
use thrift_core::pauli::{group_layers, nested_commutator_sum, pauli_mul, Pauli, PauliError, PauliString, PauliSum, Phase};

type CMatrix = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Matrix elements `<r|P|c>` as products of single-qubit entries, with
/// qubit `j` read from bit `j` of the basis index.
fn oracle_dense(p: &PauliString) -> CMatrix {
    let single = |op: Pauli| -> [[Complex64; 2]; 2] {
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        match op {
            Pauli::I => [[o, z], [z, o]],
            Pauli::X => [[z, o], [o, z]],
            Pauli::Y => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
            Pauli::Z => [[o, z], [z, -o]],
        }
    };
    let n = p.n_qubits();
    let dim = 1usize << n;
    DMatrix::from_fn(dim, dim, |r, col| (0..n).map(|j| single(p.get(j))[(r >> j) & 1][(col >> j) & 1]).product())
}

fn oracle_sum(h: &PauliSum) -> CMatrix {
    let dim = 1usize << h.n_qubits();
    h.terms().fold(CMatrix::zeros(dim, dim), |acc, (p, w)| acc + oracle_dense(p) * *w)
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn pauli_strategy(n: usize) -> impl Strategy<Value = PauliString> {
    let mask = (1u128 << n) - 1;
    (any::<u128>(), any::<u128>()).prop_map(move |(x, z)| PauliString::from_masks(n, x & mask, z & mask).unwrap())
}

#[test]
fn xy_product_is_iz() {
    let (ph, p) = pauli_mul(&PauliString::parse("XI").unwrap(), &PauliString::parse("YI").unwrap()).unwrap();
    assert_eq!(ph, Phase::I);
    assert_eq!(p, PauliString::parse("ZI").unwrap());
}

#[test]
fn identity_is_neutral() {
    let p = PauliString::parse("XYZIY").unwrap();
    let (ph, q) = pauli_mul(&PauliString::identity(5).unwrap(), &p).unwrap();
    assert_eq!((ph, q), (Phase::ONE, p));
}

#[test]
fn qubit_count_mismatch_is_error() {
    let r = pauli_mul(&PauliString::parse("X").unwrap(), &PauliString::parse("XX").unwrap());
    assert!(matches!(r, Err(PauliError::QubitMismatch(..))));
}

#[test]
fn exhaustive_two_qubit_phases() {
    let all: Vec<PauliString> = (0..4u128).flat_map(|x| (0..4u128).map(move |z| PauliString::from_masks(2, x, z).unwrap())).collect();
    for a in &all {
        for b in &all {
            let (p1, _) = pauli_mul(a, b).unwrap();
            let (p2, _) = pauli_mul(b, a).unwrap();
            let prod = p1.to_complex() * p2.to_complex().conj();
            let want = if a.commutes_with(b) { 1.0 } else { -1.0 };
            assert!((prod - c(want, 0.0)).norm() < 1e-15, "{a} {b}");
        }
    }
}

#[test]
fn su2_commutator() {
    let z = PauliSum::from_real_terms(1, [(PauliString::parse("Z").unwrap(), 1.0)]).unwrap();
    let x = PauliSum::from_real_terms(1, [(PauliString::parse("X").unwrap(), 1.0)]).unwrap();
    let comm = z.commutator(&x).unwrap();
    assert_eq!(comm.len(), 1);
    assert_eq!(comm.coeff(&PauliString::parse("Y").unwrap()), c(0.0, 2.0));
    assert!(z.commutator(&z).unwrap().is_empty());
}

#[test]
fn tfim_group_commutator_matches_dense() {
    // uses a field on the XX groups so the commutator is nonzero
    let part = build_model(&ModelSpec::tfim_1d(4, 1.0, 1.0)).unwrap();
    let a = part.groups[0].sum.add(&part.h0).unwrap();
    let b = part.groups[1].sum.clone();
    let comm = a.commutator(&b).unwrap();
    let (da, db) = (oracle_sum(&a), oracle_sum(&b));
    assert!(max_diff(&oracle_sum(&comm), &(&da * &db - &db * &da)) < 1e-12);
}

#[test]
fn layering_of_chains_and_grids() {
    let one_d = build_model(&ModelSpec::tfim_1d(6, 1.0, 1.0)).unwrap().h1();
    assert_eq!(group_layers(&one_d, 2).unwrap().layers.len(), 2);
    let grid = build_model(&ModelSpec::tfim_2d(3, 3, 1.0, 1.0)).unwrap().h1();
    assert_eq!(group_layers(&grid, 2).unwrap().layers.len(), 4);
    let single = PauliSum::from_real_terms(3, [(PauliString::parse("XXI").unwrap(), 1.0)]).unwrap();
    assert_eq!(group_layers(&single, 2).unwrap().layers.len(), 1);
    assert!(matches!(group_layers(&single, 1), Err(PauliError::SupportTooLarge { .. })));
}

#[test]
fn nested_commutator_sums() {
    let z = PauliSum::from_real_terms(1, [(PauliString::parse("Z").unwrap(), 1.0)]).unwrap();
    let x = PauliSum::from_real_terms(1, [(PauliString::parse("X").unwrap(), 1.0)]).unwrap();
    assert!((nested_commutator_sum(&[z.clone(), x], 1).unwrap() - 4.0).abs() < 1e-12);
    let zz = PauliSum::from_real_terms(1, [(PauliString::parse("Z").unwrap(), 2.0)]).unwrap();
    assert_eq!(nested_commutator_sum(&[z, zz], 1).unwrap(), 0.0);

    // frozen regression value from a dense evaluation of the TFIM partition
    let part = build_model(&ModelSpec::tfim_1d(4, 1.0, 0.5)).unwrap();
    let parts: Vec<PauliSum> = std::iter::once(part.h0.clone()).chain((0..part.gamma()).map(|g| part.scaled_group(g))).collect();
    let v = nested_commutator_sum(&parts, 1).unwrap();
    let dense: Vec<CMatrix> = parts.iter().map(oracle_sum).collect();
    let mut want = 0.0;
    for a in &dense {
        for b in &dense {
            let comm = a * b - b * a;
            want += comm.singular_values().max();
        }
    }
    assert!((v - want).abs() < 1e-10, "{v} vs {want}");
    assert!(matches!(nested_commutator_sum(&parts, 3), Err(PauliError::DepthTooLarge(3))));
}

proptest! {
    #[test]
    fn product_matches_dense(a in pauli_strategy(6), b in pauli_strategy(6)) {
        let (ph, p) = pauli_mul(&a, &b).unwrap();
        let lhs = oracle_dense(&a) * oracle_dense(&b);
        let rhs = oracle_dense(&p) * ph.to_complex();
        prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
        prop_assert!(max_diff(&a.to_dense(), &oracle_dense(&a)) < 1e-15);
    }

    #[test]
    fn square_is_identity(a in pauli_strategy(9)) {
        let (ph, p) = pauli_mul(&a, &a).unwrap();
        prop_assert_eq!(ph, Phase::ONE);
        prop_assert!(p.is_identity());
    }

    #[test]
    fn commutator_is_antisymmetric(
        ta in prop::collection::vec((pauli_strategy(4), -2.0f64..2.0), 1..6),
        tb in prop::collection::vec((pauli_strategy(4), -2.0f64..2.0), 1..6),
    ) {
        let a = PauliSum::from_real_terms(4, ta).unwrap();
        let b = PauliSum::from_real_terms(4, tb).unwrap();
        let ab = a.commutator(&b).unwrap();
        let ba = b.commutator(&a).unwrap();
        prop_assert_eq!(ab.clone(), ba.scale_real(-1.0));
        let (da, db) = (oracle_sum(&a), oracle_sum(&b));
        prop_assert!(max_diff(&oracle_sum(&ab), &(&da * &db - &db * &da)) < 1e-12);
    }

    #[test]
    fn layering_partitions_terms(terms in prop::collection::vec((0usize..7, 1usize..3), 1..12)) {
        // random nearest-neighbour and next-nearest two-qubit XX terms on 8 qubits
        let h = PauliSum::from_real_terms(
            8,
            terms.iter().map(|&(q, d)| (PauliString::from_ops(8, &[(q, Pauli::X), ((q + d).min(7).max(q + 1), Pauli::X)]).unwrap(), 1.0)),
        ).unwrap();
        let layering = group_layers(&h, 3).unwrap();
        let mut seen: Vec<PauliString> = layering.layers.iter().flatten().copied().collect();
        seen.sort();
        let mut want: Vec<PauliString> = h.terms().map(|(p, _)| *p).collect();
        want.sort();
        prop_assert_eq!(seen, want);
        for (i, layer) in layering.layers.iter().enumerate() {
            let blocks = layering.blocks(i);
            for (j, a) in blocks.iter().enumerate() {
                prop_assert!(a.count_ones() <= 3);
                for b in &blocks[j + 1..] {
                    prop_assert_eq!(a & b, 0);
                }
            }
            for p in layer {
                prop_assert!(blocks.iter().any(|blk| p.support() & !blk == 0));
            }
        }
    }
}
