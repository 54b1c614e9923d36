use spinor_invariants::reductions::{
    chiral_tag_sets, even_n_tangle, four_spinor_h, four_spinor_ty, measured_factors, three_spinor_weyl,
    two_weyl_d_patterns, ty_reduction, CLAIMED_H_FACTOR,
};
use spinor_invariants::states::Chirality;

const TOL: f64 = 1e-9;

#[test]
fn three_spinor_patterns_reduce_to_tau() {
    let checks = three_spinor_weyl(3, 1).unwrap();
    assert_eq!(checks.len(), 144 * 8);
    for c in &checks {
        assert!(c.pass(TOL), "{} {}: {:?}", c.descriptor, c.tags, c.ratio);
    }
    let rrr: Vec<_> = checks.iter().filter(|c| c.tags == "RRR" && c.claimed_factor > 0.0).collect();
    assert!(rrr.iter().all(|c| c.sign == Some(-1)));
}

#[test]
fn d_patterns_with_a_free_party() {
    let checks = two_weyl_d_patterns(3, 2).unwrap();
    assert!(checks.iter().any(|c| c.claimed_factor > 0.0));
    for c in &checks {
        assert!(c.pass(TOL), "{} {}: {}", c.descriptor, c.tags, c.deviation);
    }
}

#[test]
fn degree_two_family_reduces_to_twice_claimed_h() {
    let checks = four_spinor_h(2, 1).unwrap();
    assert!(checks.iter().all(|c| !c.pass(TOL)));
    assert_eq!(measured_factors(&checks), vec![2 * CLAIMED_H_FACTOR as i64]);
}

#[test]
fn ty_reductions_hold() {
    assert!(ty_reduction('z').is_none());
    let checks = four_spinor_ty(2, 3).unwrap();
    assert_eq!(checks.len(), 26 * 16);
    for c in &checks {
        assert!(c.pass(TOL), "{} {}: {}", c.descriptor, c.tags, c.deviation);
    }
}

#[test]
fn even_party_degree_two_against_n_tangle() {
    for c in even_n_tangle(4, None, 2, 1).unwrap() {
        assert!(c.pass(TOL), "{} {}", c.descriptor, c.tags);
        assert!((c.ratio.norm() - 16.0).abs() < 1e-9);
    }
    let some = vec![vec![Chirality::Left; 6], chiral_tag_sets(6)[37].clone()];
    for c in even_n_tangle(6, Some(some), 1, 1).unwrap() {
        assert!(c.pass(TOL), "{} {}", c.descriptor, c.tags);
        assert!((c.ratio.norm() - 64.0).abs() < 1e-9);
    }
}
