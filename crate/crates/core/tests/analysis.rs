use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use spinor_invariants::analysis::{
    angle_distance, builtin_relations, check_dependence, check_invariance, classify_parity, evolve_and_check_bilinear,
    expected_invariant, measure_cpt, numerical_rank, parse_combination, parse_relation, random_sl4, rank_of_span,
    similarity_covariance_check, sl4_combinations, HamiltonianSpec, LinearCombination, PartySelector,
    DEFAULT_RANK_THRESHOLD,
};
use spinor_invariants::catalog::{builtin_catalog, lookup, parity_class, Family};
use spinor_invariants::clifford::ComplexMatrix4;
use spinor_invariants::report::negate_terms;
use spinor_invariants::{GroupId, XTag};

#[test]
fn parses_combinations() {
    let c = parse_combination("2 I_21a - I_21b - 0.5 I_21c").unwrap();
    let coefs: Vec<f64> = c.terms.iter().map(|t| t.0).collect();
    assert_eq!(coefs, vec![2.0, -1.0, -0.5]);
    assert_eq!(c.n_parties().unwrap(), 3);
    let sq = parse_combination("H_a^2 + 2 T_a").unwrap();
    assert_eq!(sq.terms[0].1, vec!["H_a".to_string(), "H_a".to_string()]);
    assert!(parse_combination("2 * * I_3a").is_err());
    assert_eq!(parse_relation("I_2a = I_2b = I_2c").unwrap().len(), 2);
}

#[test]
fn combinations_reject_mixed_parties() {
    assert!(parse_combination("I_3a + H_a").unwrap().n_parties().is_err());
}

#[test]
fn holding_relation_and_perturbed_control() {
    let holds = builtin_relations()
        .into_iter()
        .find(|r| check_dependence(&r.combination, 20, 1).unwrap() < 1e-12)
        .expect("at least one relation holds");
    let mut perturbed = holds.combination.clone();
    perturbed.terms[0].0 *= 1.01;
    assert!(check_dependence(&perturbed, 20, 1).unwrap() > 1e-4);
    assert!(!holds.source.is_empty());
}

#[test]
fn rank_of_degree_two_family() {
    let descs = builtin_catalog(Family::FourSpinorDeg2).unwrap().descriptors;
    let r = rank_of_span(&descs, 2 * descs.len(), 1, DEFAULT_RANK_THRESHOLD).unwrap();
    assert_eq!(r.rank, 16);
    assert!(r.singular_values[15] / r.singular_values[0] > 1e-3);
}

#[test]
fn numerical_rank_of_known_matrix() {
    use num_complex::Complex64 as C;
    let rows = vec![vec![C::new(1.0, 0.0), C::new(0.0, 0.0)], vec![C::new(2.0, 0.0), C::new(0.0, 0.0)]];
    assert_eq!(numerical_rank(&rows, 1e-8).1, 1);
    assert_eq!(numerical_rank(&[], 1e-8).1, 0);
}

#[test]
fn single_descriptor_invariance_matches_tags() {
    let cases = [
        ("I_3a", GroupId::LorentzProper, 0),
        ("I_3a", GroupId::Gc, 1),
        ("I_2a", GroupId::Gc5, 2),
        ("I_6a", GroupId::Gc, 0),
        ("I_6a", GroupId::Gc5, 0),
        ("H_a", GroupId::Gc5, 0),
        ("I_3a", GroupId::Sl4, 0),
    ];
    for (name, g, party) in cases {
        let d = lookup(name).unwrap();
        let r = check_invariance(&LinearCombination::single(name), g, PartySelector::One(party), 4, 3).unwrap();
        assert_eq!(r.is_invariant(1e-9), expected_invariant(&d, g, party), "{name} {g} at {party}: {}", r.deviation());
    }
}

#[test]
fn repaired_sl4_combination_is_invariant() {
    let combos = sl4_combinations();
    let (party, combo) = combos
        .iter()
        .find(|(p, c)| *p == PartySelector::One(0) && c.to_string().contains("I_21a - 2 I_21b + I_21c"))
        .expect("repaired entry present");
    let r = check_invariance(combo, GroupId::U1Sl4, *party, 4, 5).unwrap();
    assert!(r.is_invariant(1e-9), "{}", r.deviation());
    let printed = parse_combination("2 I_21a - I_21b - I_21c").unwrap();
    assert!(!check_invariance(&printed, GroupId::Sl4, PartySelector::One(0), 4, 5).unwrap().is_invariant(1e-6));
}

#[test]
fn squared_combination_needs_td_sign() {
    let printed = parse_combination(
        "H_a^2 + 2 T_a - 2 T_b - 2 T_c - 2 T_d - 2 T_e + 2 T_f - 2 T_g - 2 T_h - 2 T_i - 2 T_j - 2 T_k - 2 T_l - 2 T_m",
    )
    .unwrap();
    let fixed = negate_terms(&printed, &["T_d"]);
    let at = PartySelector::One(1);
    assert!(!check_invariance(&printed, GroupId::Sl4, at, 3, 2).unwrap().is_invariant(1e-6));
    assert!(check_invariance(&fixed, GroupId::Sl4, at, 3, 2).unwrap().is_invariant(1e-9));
}

#[test]
fn parity_signs_match_catalog_classes() {
    for name in ["I_2a", "I_3a", "I_6b", "I_23c", "I_35d"] {
        let want = parity_class(name).unwrap();
        let got = classify_parity(&LinearCombination::single(name), 4, 1).unwrap();
        for (p, m) in got.iter().enumerate() {
            assert_eq!(m.sign(1e-9), Some(want[p]), "{name} party {p}");
        }
        for m in measure_cpt(&LinearCombination::single(name), 3, 1).unwrap() {
            assert!((m.ratio.norm() - 1.0).abs() < 1e-9 && m.spread < 1e-9);
        }
    }
}

#[test]
fn evolution_preserves_forms_as_predicted() {
    let mut rng = ChaCha20Rng::seed_from_u64(17);
    for (degrees, x) in [(vec![0, 1, 2], XTag::C5), (vec![0, 2, 3], XTag::C)] {
        for t in [0.1, 0.7, 2.3] {
            let h = HamiltonianSpec::random(&mut rng, &degrees);
            let r = evolve_and_check_bilinear(&h, t, x).unwrap();
            assert!(r.expected_preserved);
            assert!(r.scalar_residual < 1e-10 && (r.modulus - 1.0).abs() < 1e-10 && r.theta_error < 1e-10);
        }
    }
    let h = HamiltonianSpec::random(&mut rng, &[3]);
    let r = evolve_and_check_bilinear(&h, 0.9, XTag::C5).unwrap();
    assert!(!r.expected_preserved && r.scalar_residual > 1e-3);
}

#[test]
fn angles_wrap() {
    assert!(angle_distance(3.1, -3.1) < 0.1);
    assert!((angle_distance(0.0, std::f64::consts::PI) - std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn similarity_transform_covariance() {
    let descs: Vec<_> = ["I_3a", "I_2b", "H_a"].iter().map(|n| lookup(n).unwrap()).collect();
    let s = random_sl4(4).unwrap();
    let r = similarity_covariance_check(&s, &descs, 2, 1).unwrap();
    assert!(r.rebuilt_deviation < 1e-10);
    assert!(r.printed_form_deviation > 1e-3);
    let two = ComplexMatrix4::identity() * num_complex::Complex64::new(2.0, 0.0);
    let r = similarity_covariance_check(&two, &descs, 2, 1).unwrap();
    assert!(r.scalar_power_deviation.unwrap() < 1e-12);
    assert!(similarity_covariance_check(&ComplexMatrix4::zeros(), &descs, 1, 1).is_err());
}
