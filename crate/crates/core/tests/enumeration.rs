use spinor_invariants::catalog::{builtin_catalog, Family};
use spinor_invariants::enumeration::{
    closed_form_count, enumerate_pairings, enumerate_x_assignments, perfect_matchings, relabeling_between,
    total_count, total_count_with, x_assignment_classes, PairingPattern, XEquivalence,
};

#[test]
fn matchings() {
    assert_eq!(perfect_matchings(2).len(), 1);
    assert_eq!(perfect_matchings(4).len(), 3);
    assert_eq!(perfect_matchings(6).len(), 15);
}

#[test]
fn connected_pattern_counts() {
    for (n, want) in [(3, 4), (4, 13), (5, 40)] {
        assert_eq!(enumerate_pairings(n, 4, true).unwrap().len(), want, "n={n}");
    }
    assert!(enumerate_pairings(3, 3, true).is_err());
    assert!(enumerate_pairings(0, 4, true).is_err());
    let all = enumerate_pairings(3, 4, false).unwrap();
    assert!(all.len() > 4 && all.iter().filter(|p| p.connected).count() == 4);
}

#[test]
fn tag_assignment_totals() {
    for (n, want) in [(3, 144), (4, 1768), (5, 21120)] {
        assert_eq!(total_count(n, 4).unwrap(), want);
    }
    for (n, want) in [(3, 118), (4, 1308), (5, 14200)] {
        assert_eq!(total_count_with(n, 4, XEquivalence::Automorphism).unwrap(), want);
    }
    assert_eq!(total_count(4, 2).unwrap(), 16);
    assert_eq!(total_count(6, 2).unwrap(), 64);
}

#[test]
fn per_pattern_counts_follow_closed_form() {
    assert_eq!([closed_form_count(3), closed_form_count(4), closed_form_count(5)], [36, 136, 528]);
    for n in 3..=4 {
        let patterns = enumerate_pairings(n, 4, true).unwrap();
        let mut sizes: Vec<usize> = patterns
            .iter()
            .map(|p| x_assignment_classes(&p.pattern, XEquivalence::FirstPairExchange).unwrap().len())
            .collect();
        sizes.dedup();
        assert_eq!(sizes, vec![closed_form_count(n as u32) as usize]);
    }
}

#[test]
fn odd_party_degree_two_vanishes() {
    let patterns = enumerate_pairings(3, 2, true).unwrap();
    for p in &patterns {
        let classes = x_assignment_classes(&p.pattern, XEquivalence::FirstPairExchange).unwrap();
        assert!(classes.iter().all(|c| c.identically_zero));
    }
    let four = enumerate_pairings(4, 2, true).unwrap();
    let classes = x_assignment_classes(&four[0].pattern, XEquivalence::FirstPairExchange).unwrap();
    assert!(classes.iter().all(|c| !c.identically_zero));
}

#[test]
fn class_sizes_cover_all_assignments() {
    let p = &enumerate_pairings(3, 4, true).unwrap()[0].pattern;
    let classes = x_assignment_classes(p, XEquivalence::Automorphism).unwrap();
    let total: usize = classes.iter().map(|c| c.class_size).sum();
    assert_eq!(total, 1 << p.n_pairs());
    assert_eq!(enumerate_x_assignments(p).unwrap().len(), closed_form_count(3) as usize);
}

#[test]
fn catalog_patterns_are_canonical_patterns() {
    let canon: Vec<PairingPattern> = enumerate_pairings(3, 4, true).unwrap().into_iter().map(|p| p.pattern).collect();
    for d in builtin_catalog(Family::ThreeSpinorDeg4).unwrap().descriptors {
        let p = PairingPattern::of_descriptor(&d).unwrap();
        assert!(p.is_connected());
        let c = p.canonical();
        let target = canon.iter().find(|q| **q == c).expect("pattern in canonical list");
        let perm = relabeling_between(&p, target).expect("relabeling exists");
        assert_eq!(p.permuted(&perm), *target);
    }
}

#[test]
fn five_spinor_patterns_match_enumeration() {
    let printed = builtin_catalog(Family::FiveSpinorDeg4Patterns).unwrap();
    let mut canon: Vec<PairingPattern> =
        printed.descriptors.iter().map(|d| PairingPattern::of_descriptor(d).unwrap().canonical()).collect();
    canon.sort();
    canon.dedup();
    let enumerated: Vec<PairingPattern> = enumerate_pairings(5, 4, true).unwrap().into_iter().map(|p| p.pattern).collect();
    assert_eq!(canon, enumerated);
}
