use spinor_invariants::analysis::parse_combination;
use spinor_invariants::report::{negate_terms, run_suite, RunConfig, Suite};
use spinor_invariants::rng::RNG_ALGORITHM;

#[test]
fn suite_names_roundtrip() {
    for s in Suite::EACH {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
    }
    assert!("bogus".parse::<Suite>().is_err());
}

#[test]
fn reports_are_deterministic() {
    let cfg = RunConfig::default();
    for suite in [Suite::Combinatorics, Suite::Evolution] {
        let a = serde_json::to_string(&run_suite(suite, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(suite, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn light_suites_pass_and_record_provenance() {
    let r = run_suite(Suite::Combinatorics, &RunConfig::default()).unwrap();
    assert_eq!(r.rng_algorithm, RNG_ALGORITHM);
    assert_eq!(r.n_failed(), 0);
    assert!(r.pass);
    assert!(r.checks_in(Suite::Combinatorics).count() == r.checks.len());
    let e = run_suite(Suite::Evolution, &RunConfig { seed: 5, ..RunConfig::default() }).unwrap();
    assert!(e.pass && e.checks.iter().all(|c| c.seed == 5));
}

#[test]
fn negation_touches_only_named_linear_terms() {
    let c = parse_combination("H_a^2 + 2 T_a - 2 T_d").unwrap();
    let n = negate_terms(&c, &["T_d", "H_a"]);
    let coefs: Vec<f64> = n.terms.iter().map(|t| t.0).collect();
    assert_eq!(coefs, vec![1.0, 2.0, 2.0]);
}
