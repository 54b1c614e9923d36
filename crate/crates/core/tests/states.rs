use num_complex::Complex64;
use proptest::prelude::*;

use spinor_invariants::clifford::{max_abs, sample_group_element, ComplexMatrix4, DEFAULT_SCALE};
use spinor_invariants::states::{
    basis_spinor, embed_weyl, equal_superposition, flat_index, has_chiral_symmetry, multi_index, product_state,
    random_qubit_coeffs, random_state, random_states, weyl_project, weyl_subtensor, Chirality,
};
use spinor_invariants::{GroupId, MultiSpinorState};

const L: Chirality = Chirality::Left;
const R: Chirality = Chirality::Right;
const N: Chirality = Chirality::None;

fn max_diff(a: &MultiSpinorState, b: &MultiSpinorState) -> f64 {
    a.coefficients().iter().zip(b.coefficients()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn index_roundtrip(idx in prop::collection::vec(0usize..4, 1..6)) {
        let n = idx.len();
        prop_assert_eq!(multi_index(flat_index(&idx), n), idx);
    }
}

#[test]
fn constructor_checks_length() {
    assert!(MultiSpinorState::new(3, vec![Complex64::new(0.0, 0.0); 63]).is_err());
    assert!(MultiSpinorState::new(2, vec![Complex64::new(0.0, 0.0); 16]).is_ok());
}

#[test]
fn equal_superposition_is_normalized_with_signs() {
    let s = equal_superposition(&["0000", "-1111"]).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((s.get(&[0, 0, 0, 0]).re - h).abs() < 1e-15);
    assert!((s.get(&[1, 1, 1, 1]).re + h).abs() < 1e-15);
    assert!((s.norm() - 1.0).abs() < 1e-15);
    assert!(equal_superposition(&["00", "111"]).is_err());
    assert!(equal_superposition(&["04"]).is_err());
}

#[test]
fn json_roundtrip() {
    let s = random_state(3, 11).unwrap();
    let back = MultiSpinorState::from_json(&s.to_json().unwrap()).unwrap();
    assert!(max_diff(&s, &back) < 1e-15);
    assert!(MultiSpinorState::from_json("{\"n_parties\": 2, \"terms\": [{\"idx\": [0, 5], \"re\": 1, \"im\": 0}]}").is_err());
}

#[test]
fn bundled_state_files_match_examples() {
    let text = include_str!("../data/states/ghz3_01.json");
    let s = MultiSpinorState::from_json(text).unwrap();
    let want = equal_superposition(&["000", "111"]).unwrap();
    assert!(max_diff(&s, &want) < 1e-15);
}

#[test]
fn product_state_factorizes() {
    let s = product_state(&[basis_spinor(1), basis_spinor(2), basis_spinor(3)]).unwrap();
    assert_eq!(s.get(&[1, 2, 3]), Complex64::new(1.0, 0.0));
    assert!((s.norm() - 1.0).abs() < 1e-15);
}

#[test]
fn local_operations_compose() {
    let s = random_state(3, 5).unwrap();
    let m = sample_group_element(GroupId::Sl4, 2, DEFAULT_SCALE).unwrap();
    let id = s.apply_local(1, &ComplexMatrix4::identity()).unwrap();
    assert!(max_diff(&s, &id) < 1e-15);
    let mut seq = s.clone();
    for p in 0..3 {
        seq = seq.apply_local(p, &m).unwrap();
    }
    assert!(max_diff(&seq, &s.apply_everywhere(&m)) < 1e-12);
    assert!(s.apply_local(3, &m).is_err());
}

#[test]
fn random_states_are_seeded() {
    let a = random_states(2, 3, 9).unwrap();
    let b = random_states(2, 3, 9).unwrap();
    let c = random_states(2, 3, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    for s in &a {
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn projectors_are_complementary() {
    let id = ComplexMatrix4::identity();
    let (pl, pr) = (L.projector(), R.projector());
    assert!(max_abs(&(pl + pr - id)) < 1e-15);
    assert!(max_abs(&(pl * pl - pl)) < 1e-15);
    assert!(max_abs(&(pl * pr)) < 1e-15);
    assert!(max_abs(&(N.projector() - id)) < 1e-15);
}

#[test]
fn weyl_embedding_roundtrip() {
    for tags in [vec![L, L, L], vec![L, R, L], vec![R, N, L]] {
        let dim: usize = tags.iter().map(|t| if *t == N { 4 } else { 2 }).product();
        let coeffs = &random_qubit_coeffs(dim.trailing_zeros() as usize, 1, 4)[0];
        let s = embed_weyl(coeffs, &tags).unwrap();
        assert!(has_chiral_symmetry(&s, &tags));
        let projected = weyl_project(&s, &tags).unwrap();
        assert!(max_diff(&s, &projected) < 1e-14);
        let chiral = tags.iter().filter(|t| **t != N).count() as i32;
        let scale = std::f64::consts::FRAC_1_SQRT_2.powi(chiral);
        let back = weyl_subtensor(&s, &tags);
        let err = back.iter().zip(coeffs).map(|(a, b)| (a - b * scale).norm()).fold(0.0, f64::max);
        assert!(err < 1e-14, "{tags:?}");
    }
    assert!(!has_chiral_symmetry(&random_state(3, 1).unwrap(), &[L, L, L]));
}
