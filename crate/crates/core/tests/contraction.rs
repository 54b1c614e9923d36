use num_complex::Complex64;

use spinor_invariants::catalog::{builtin_catalog, lookup, Family};
use spinor_invariants::clifford::gamma_basis;
use spinor_invariants::contraction::{evaluate_with_matrices, parse_index_notation, CompiledDescriptor};
use spinor_invariants::oracles::naive_evaluate;
use spinor_invariants::states::{basis_spinor, product_state, random_state, random_states};
use spinor_invariants::{evaluate, evaluate_batch, InvariantDescriptor, Pair, SlotRef, XTag};

fn slot(copy: usize, party: usize) -> SlotRef {
    SlotRef { copy, party }
}

#[test]
fn parses_printed_notation() {
    let text = r"C_{ij}C_{mk}C_{nl}\Psi_{jkl}\Psi_{qmn}C_{qr}C_{ps}C_{ut}\Psi_{rst}\Psi_{ipu}";
    let parsed = parse_index_notation(text).unwrap();
    assert_eq!((parsed.n_parties, parsed.degree, parsed.pairs.len()), (3, 4, 6));
    let d = parsed.into_descriptor(XTag::C5, Some("I_3a".into())).unwrap();
    assert_eq!(d, lookup("I_3a").unwrap());
    assert!(parse_index_notation(r"C_{ij}\Psi_{jk}").is_err());
}

#[test]
fn unassigned_tags_take_fill() {
    let parsed = parse_index_notation(r"X_{ij}X_{kl}\Psi_{jl}\Psi_{ik}").unwrap();
    assert!(parsed.pairs.iter().all(|(_, _, x)| x.is_none()));
    let d = parsed.into_descriptor(XTag::C5, None).unwrap();
    assert!(d.pairs.iter().all(|p| p.x == XTag::C5));
}

#[test]
fn validation_rejects_bad_pairings() {
    let ok = vec![
        Pair { from: slot(0, 0), to: slot(1, 0), x: XTag::C },
        Pair { from: slot(0, 1), to: slot(1, 1), x: XTag::C },
    ];
    assert!(InvariantDescriptor::new(2, 2, ok.clone(), None).is_ok());
    let mut reused = ok.clone();
    reused[1].to = slot(1, 0);
    assert!(InvariantDescriptor::new(2, 2, reused, None).is_err());
    let mut cross_party = ok.clone();
    cross_party[0].to = slot(1, 1);
    assert!(InvariantDescriptor::new(2, 2, cross_party, None).is_err());
    assert!(InvariantDescriptor::new(2, 2, ok[..1].to_vec(), None).is_err());
}

#[test]
fn engine_matches_naive_sum() {
    let mut descs = builtin_catalog(Family::ThreeSpinorDeg4).unwrap().descriptors;
    descs.truncate(24);
    descs.extend(builtin_catalog(Family::FourSpinorDeg2).unwrap().descriptors);
    for d in &descs {
        let s = random_state(d.n_parties, 21).unwrap();
        let (a, b) = (evaluate(d, &s).unwrap(), naive_evaluate(d, &s).unwrap());
        assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-3), "{}: {a} vs {b}", d.label());
    }
}

#[test]
fn reversing_a_pair_follows_transpose_sign() {
    let d = lookup("I_6a").unwrap();
    let s = random_state(3, 2).unwrap();
    let v = evaluate(&d, &s).unwrap();
    for i in 0..d.pairs.len() {
        let x = gamma_basis().sandwich(d.pairs[i].x);
        let sign = if (x.transpose() - x).norm() < 1e-15 { 1.0 } else { -1.0 };
        let w = evaluate(&d.with_reversed_pair(i), &s).unwrap();
        assert!((w - v * sign).norm() < 1e-12 * v.norm());
    }
}

#[test]
fn homogeneous_of_its_degree() {
    let d = lookup("T_c").unwrap();
    let s = random_state(4, 3).unwrap();
    let alpha = Complex64::new(0.3, -1.1);
    let v = evaluate(&d, &s).unwrap();
    let w = evaluate(&d, &s.scaled(alpha)).unwrap();
    assert!((w - v * alpha.powu(4)).norm() < 1e-12 * w.norm());
}

#[test]
fn all_c_descriptors_vanish_on_products() {
    let p = product_state(&[basis_spinor(0) + basis_spinor(2), basis_spinor(1), basis_spinor(3)]).unwrap();
    for name in ["I_3a", "I_3b", "I_3c"] {
        assert_eq!(evaluate(&lookup(name).unwrap(), &p).unwrap().norm(), 0.0);
    }
}

#[test]
fn explicit_matrices_reproduce_evaluate() {
    let b = gamma_basis();
    for name in ["I_2a", "I_35d", "H_c", "Y_g"] {
        let d = lookup(name).unwrap();
        let s = random_state(d.n_parties, 8).unwrap();
        let want = evaluate(&d, &s).unwrap();
        let got = evaluate_with_matrices(&d, &s, &|x| *b.sandwich(x)).unwrap();
        assert!((got - want).norm() < 1e-12 * want.norm(), "{name}");
        let compiled = CompiledDescriptor::with_matrices(&d, &|x| *b.sandwich(x));
        assert!((compiled.evaluate(&s).unwrap() - want).norm() < 1e-12 * want.norm());
    }
}

#[test]
fn batch_and_errors() {
    let descs: Vec<_> = ["I_2a", "I_3b"].iter().map(|n| lookup(n).unwrap()).collect();
    let states = random_states(3, 4, 1).unwrap();
    let rows = evaluate_batch(&descs, &states).unwrap();
    assert_eq!((rows.len(), rows[0].len()), (2, 4));
    assert_eq!(rows[1][2], evaluate(&descs[1], &states[2]).unwrap());
    assert!(evaluate(&descs[0], &random_state(4, 1).unwrap()).is_err());
}

#[test]
fn descriptor_json_roundtrip() {
    let d = lookup("I_23c").unwrap();
    let back = InvariantDescriptor::from_json(&d.to_json().unwrap()).unwrap();
    assert_eq!(d, back);
    assert!(InvariantDescriptor::from_json("{\"n_parties\": 1}").is_err());
}
