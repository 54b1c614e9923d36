//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria that fail because the printed claims contradict each other are
//! listed in `KNOWN_CONFLICTS`; the process exits nonzero when any other
//! check fails or when a listed conflict stops failing.

use std::process::ExitCode;

use spinor_invariants::report::{run_suite, CheckRecord, RunConfig, Suite};

const CRITERIA: [(u8, &str, &[Suite]); 8] = [
    (1, "combinatorics", &[Suite::Combinatorics]),
    (2, "ranks", &[Suite::ThreeSpinor, Suite::FourSpinor]),
    (3, "dependence relations", &[Suite::Dependence]),
    (4, "example states", &[Suite::Examples]),
    (5, "Weyl reductions", &[Suite::Weyl]),
    (6, "invariance battery", &[Suite::Invariance]),
    (7, "bilinear evolution", &[Suite::Evolution]),
    (8, "oracle equivalence", &[Suite::Oracles]),
];

/// Check-name prefixes whose printed claims are inconsistent with the other
/// printed formulas.
const KNOWN_CONFLICTS: [&str; 10] = [
    "rank(three_spinor_deg4)",
    "rank(parity_class +++)",
    "relation[B] 0 = -I_28d + I_29d",
    "relation[B] 0 = I_30d - 0.5 I_28a + 0.5 I_28c",
    "relation[A] 0 = -I_36d - I_37d",
    "relation[A] 0 = -I_38d - 0.5 I_37c + 0.5 I_37b",
    "relation[four] 0 = H_b^2 - H_a^2",
    "example(ghz3_four_terms)",
    "weyl(four_spinor deg2 = ±16 H)",
    "invariance(printed H_",
];

fn summary(c: &CheckRecord) -> String {
    let mut r = c.result.to_string();
    if r.len() > 160 {
        r.truncate(r.char_indices().take_while(|(i, _)| *i < 160).last().map_or(0, |(i, ch)| i + ch.len_utf8()));
        r.push_str("...");
    }
    format!("{} (claimed {}, computed {})", c.check, c.claimed, r)
}

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let mut unexpected = Vec::new();
    let mut matched = [false; KNOWN_CONFLICTS.len()];
    for (id, title, suites) in CRITERIA {
        let mut checks = Vec::new();
        for &s in suites {
            match run_suite(s, &cfg) {
                Ok(r) => checks.extend(r.checks),
                Err(e) => {
                    println!("FAIL criterion {id}: {title}: suite {s} errored: {e}");
                    unexpected.push(format!("suite {s} errored"));
                }
            }
        }
        let failed: Vec<&CheckRecord> = checks.iter().filter(|c| !c.pass).collect();
        let verdict = if failed.is_empty() && !checks.is_empty() { "PASS" } else { "FAIL" };
        let passed = checks.len() - failed.len();
        println!("{verdict} criterion {id}: {title} ({passed}/{} checks pass)", checks.len());
        for c in &failed {
            match KNOWN_CONFLICTS.iter().position(|k| c.check.starts_with(k)) {
                Some(k) => {
                    matched[k] = true;
                    println!("    documented conflict: {}", summary(c));
                }
                None => {
                    println!("    unexpected failure: {}", summary(c));
                    unexpected.push(c.check.clone());
                }
            }
        }
    }
    for (k, hit) in KNOWN_CONFLICTS.iter().zip(matched) {
        if !hit {
            println!("documented conflict no longer fails: {k}");
            unexpected.push(k.to_string());
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("{} unexpected outcomes", unexpected.len());
        ExitCode::FAILURE
    }
}
