use num_complex::Complex64;

use spinor_invariants::catalog::{lookup, split_three_spinor_name};
use spinor_invariants::oracles::{
    hand_expansion, four_qubit_invariants, move_party_last, n_tangle, naive_evaluate, printed_tau6,
    tangle_224, tangle_224_printed, three_tangle, transcribed_expansions, QubitState, NAIVE_SLOT_CAP,
};
use spinor_invariants::states::{equal_superposition, random_qubit_coeffs, random_state};
use spinor_invariants::evaluate;

fn qubits(n: usize, seed: u64) -> QubitState {
    QubitState::new(n, random_qubit_coeffs(n, 1, seed).remove(0)).unwrap()
}

fn ghz(n: usize) -> QubitState {
    let mut c = vec![Complex64::new(0.0, 0.0); 1 << n];
    c[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    c[(1 << n) - 1] = c[0];
    QubitState::new(n, c).unwrap()
}

#[test]
fn qubit_state_shape() {
    assert!(QubitState::new(3, vec![Complex64::new(0.0, 0.0); 7]).is_err());
    assert!(three_tangle(&ghz(4)).is_err());
    assert!(n_tangle(&ghz(3)).is_err());
}

#[test]
fn three_tangle_values() {
    assert!((three_tangle(&ghz(3)).unwrap() - 0.25).norm() < 1e-14);
    let mut w = vec![Complex64::new(0.0, 0.0); 8];
    for k in [1, 2, 4] {
        w[k] = Complex64::new(1.0 / 3f64.sqrt(), 0.0);
    }
    assert!(three_tangle(&QubitState::new(3, w).unwrap()).unwrap().norm() < 1e-15);
}

#[test]
fn n_tangle_relations() {
    assert!((n_tangle(&ghz(4)).unwrap().norm() - 1.0).abs() < 1e-14);
    for seed in 0..5 {
        let q = qubits(4, seed);
        let (h, _, _) = four_qubit_invariants(&q).unwrap();
        assert!((n_tangle(&q).unwrap() - h * 2.0).norm() < 1e-13);
        let q6 = qubits(6, seed);
        assert!((printed_tau6(&q6).unwrap() * 2.0 - n_tangle(&q6).unwrap()).norm() < 1e-13);
    }
}

#[test]
fn repaired_tangle_224_differs_from_printed() {
    let s = random_state(3, 4).unwrap();
    let (a, b) = (tangle_224(&s).unwrap(), tangle_224_printed(&s).unwrap());
    assert!((a - b).norm() > 1e-3 * a.norm());
    assert!(tangle_224(&random_state(2, 1).unwrap()).is_err());
}

#[test]
fn move_party_last_permutes_indices() {
    let s = random_state(3, 6).unwrap();
    let m = move_party_last(&s, 0).unwrap();
    assert_eq!(m.get(&[1, 2, 3]), s.get(&[3, 1, 2]));
    assert_eq!(move_party_last(&s, 2).unwrap(), s);
    assert!(move_party_last(&s, 3).is_err());
}

#[test]
fn naive_sum_limits() {
    let d = lookup("I_3a").unwrap();
    assert!(d.n_parties * d.degree <= NAIVE_SLOT_CAP);
    let s = random_state(3, 2).unwrap();
    assert!((naive_evaluate(&d, &s).unwrap() - evaluate(&d, &s).unwrap()).norm() < 1e-13);
}

#[test]
fn transcribed_expansions_match_engine() {
    let names = transcribed_expansions();
    assert!(!names.is_empty());
    for name in names {
        let d = lookup(name).unwrap();
        for seed in 0..2 {
            let s = random_state(d.n_parties, seed).unwrap();
            let (a, b) = (hand_expansion(name, &s).unwrap(), evaluate(&d, &s).unwrap());
            assert!((a - b).norm() < 1e-12 * b.norm().max(1e-3), "{name}: {a} vs {b}");
        }
    }
    assert!(hand_expansion("I_99z", &random_state(3, 0).unwrap()).is_err());
}

#[test]
fn i11a_expansion_on_four_term_ghz() {
    let s = equal_superposition(&["000", "111", "222", "333"]).unwrap();
    let v = hand_expansion("I_11a", &s).unwrap();
    assert!((v - Complex64::new(-0.25, 0.0)).norm() < 1e-14);
    assert_eq!(split_three_spinor_name("I_11a").unwrap(), (11, 'a'));
}
