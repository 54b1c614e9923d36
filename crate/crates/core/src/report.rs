//! Reproduction suites: each check compares a claimed value with a computed
//! one and records the seed and tolerance that produced it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    builtin_relations, check_dependence, check_invariance, classify_parity, evolve_and_check_bilinear,
    expected_invariant, measure_cpt, random_sl4, rank_of_combinations, rank_of_span, rms_value, similarity_covariance_check,
    sl4_combinations, HamiltonianSpec, LinearCombination, PartySelector, SpanReport, ZERO_RMS,
};
use crate::catalog::{builtin_catalog, lookup, parity_class, parity_classes, Family};
use crate::clifford::{ComplexMatrix4, GroupId, XTag};
use crate::contraction::{evaluate, InvariantDescriptor};
use crate::enumeration::{
    closed_form_count, enumerate_pairings, total_count, total_count_with, x_assignment_classes, PairingPattern,
    XEquivalence,
};
use crate::error::{Error, Result};
use crate::examples::{check_example, EXAMPLES};
use crate::oracles::{
    hand_expansion, n_tangle, naive_evaluate, printed_tau6, tangle_224, tangle_224_printed, three_tangle,
    transcribed_expansions, QubitState,
};
use crate::reductions::{
    even_n_tangle, four_spinor_h, four_spinor_ty, measured_factors, three_spinor_weyl, two_weyl_d_patterns,
    ReductionCheck,
};
use crate::rng::{stream_rng, streams, RNG_ALGORITHM};
use crate::states::{embed_qubit_state, random_qubit_coeffs, random_states, Chirality};

pub const EXAMPLE_TOL: f64 = 1e-10;
pub const EXAMPLE_ZERO_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-10;
pub const EVOLUTION_TOL: f64 = 1e-10;
pub const NEGATIVE_CONTROL_MIN: f64 = 1e-3;
pub const RANK_SEEDS: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Combinatorics,
    ThreeSpinor,
    FourSpinor,
    Weyl,
    Dependence,
    Invariance,
    Examples,
    Evolution,
    Oracles,
    All,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Combinatorics,
        Suite::ThreeSpinor,
        Suite::FourSpinor,
        Suite::Weyl,
        Suite::Dependence,
        Suite::Invariance,
        Suite::Examples,
        Suite::Evolution,
        Suite::Oracles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Combinatorics => "combinatorics",
            Suite::ThreeSpinor => "three_spinor",
            Suite::FourSpinor => "four_spinor",
            Suite::Weyl => "weyl",
            Suite::Dependence => "dependence",
            Suite::Invariance => "invariance",
            Suite::Examples => "examples",
            Suite::Evolution => "evolution",
            Suite::Oracles => "oracles",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain([&Suite::All])
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownName(format!("report `{s}`")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    /// Random states per check; suites fall back to their own defaults.
    pub n_states: Option<usize>,
    pub rank_threshold: f64,
    pub tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: 1, n_states: None, rank_threshold: crate::analysis::DEFAULT_RANK_THRESHOLD, tol: 1e-9 }
    }
}

impl RunConfig {
    fn states_or(&self, default: usize) -> usize {
        self.n_states.unwrap_or(default)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub suite: Suite,
    pub check: String,
    pub seed: u64,
    pub threshold: f64,
    pub claimed: Value,
    pub result: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub singular_values: Vec<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub report: Suite,
    pub rng_algorithm: &'static str,
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl Report {
    pub fn n_failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn checks_in(&self, suite: Suite) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(move |c| c.suite == suite)
    }

    pub fn find(&self, check: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check == check)
    }
}

struct Builder<'a> {
    suite: Suite,
    cfg: &'a RunConfig,
    out: Vec<CheckRecord>,
}

impl<'a> Builder<'a> {
    fn new(suite: Suite, cfg: &'a RunConfig) -> Self {
        Self { suite, cfg, out: Vec::new() }
    }

    fn push(&mut self, check: impl Into<String>, threshold: f64, claimed: Value, result: Value, pass: bool) {
        self.out.push(CheckRecord {
            suite: self.suite,
            check: check.into(),
            seed: self.cfg.seed,
            threshold,
            claimed,
            result,
            singular_values: Vec::new(),
            pass,
        });
    }

    fn push_rank(&mut self, check: impl Into<String>, claimed: usize, reports: &[SpanReport]) {
        let ranks: Vec<usize> = reports.iter().map(|r| r.rank).collect();
        let first = &reports[0];
        let gap = gap_at(&first.singular_values, first.rank);
        self.out.push(CheckRecord {
            suite: self.suite,
            check: check.into(),
            seed: self.cfg.seed,
            threshold: self.cfg.rank_threshold,
            claimed: json!(claimed),
            result: json!({
                "rank": first.rank,
                "ranks_per_seed": ranks,
                "seeds": reports.iter().map(|r| r.seed).collect::<Vec<_>>(),
                "n_polynomials": first.rows,
                "n_states": first.cols,
                "relative_gap": gap,
            }),
            singular_values: first.singular_values.clone(),
            pass: ranks.iter().all(|&r| r == claimed),
        });
    }
}

/// `(σ_{r-1}/σ_max, σ_r/σ_max)` around the detected rank.
fn gap_at(sv: &[f64], rank: usize) -> Value {
    let top = sv.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let below = rank.checked_sub(1).and_then(|i| sv.get(i)).map(|s| s / top);
    let above = sv.get(rank).map(|s| s / top);
    json!([below, above])
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<Report> {
    let checks = match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(run_one(s, cfg)?);
            }
            all
        }
        s => run_one(s, cfg)?,
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report { report: suite, rng_algorithm: RNG_ALGORITHM, config: cfg.clone(), checks, pass })
}

fn run_one(suite: Suite, cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut b = Builder::new(suite, cfg);
    match suite {
        Suite::Combinatorics => combinatorics(&mut b)?,
        Suite::ThreeSpinor => three_spinor(&mut b)?,
        Suite::FourSpinor => four_spinor(&mut b)?,
        Suite::Weyl => weyl(&mut b)?,
        Suite::Dependence => dependence(&mut b)?,
        Suite::Invariance => invariance(&mut b)?,
        Suite::Examples => examples(&mut b)?,
        Suite::Evolution => evolution(&mut b)?,
        Suite::Oracles => oracles(&mut b)?,
        Suite::All => unreachable!("expanded by run_suite"),
    }
    Ok(b.out)
}

fn combinatorics(b: &mut Builder) -> Result<()> {
    for (n, patterns, total, per_pattern) in [(3usize, 4usize, 144usize, 36usize), (4, 13, 1768, 136), (5, 40, 21120, 528)] {
        let found = enumerate_pairings(n, 4, true)?;
        b.push(format!("patterns(n={n},d=4)"), 0.0, json!(patterns), json!(found.len()), found.len() == patterns);
        let sizes: Vec<usize> = found
            .iter()
            .map(|p| x_assignment_classes(&p.pattern, XEquivalence::FirstPairExchange).map(|c| c.len()))
            .collect::<Result<_>>()?;
        let uniform = sizes.iter().all(|&s| s == per_pattern);
        b.push(
            format!("x_assignments_per_pattern(n={n},d=4)"),
            0.0,
            json!(per_pattern),
            json!({ "counts": sizes, "closed_form": closed_form_count(n as u32) }),
            uniform && closed_form_count(n as u32) as usize == per_pattern,
        );
        let t = total_count(n, 4)?;
        b.push(format!("total(n={n},d=4)"), 0.0, json!(total), json!(t), t == total);
        let auto = total_count_with(n, 4, XEquivalence::Automorphism)?;
        b.push(
            format!("total_automorphism_classes(n={n},d=4)"),
            0.0,
            Value::Null,
            json!(auto),
            true,
        );
    }
    for (n, total) in [(4usize, 16usize), (6, 64)] {
        let t = total_count(n, 2)?;
        b.push(format!("total(n={n},d=2)"), 0.0, json!(total), json!(t), t == total);
    }
    let odd = enumerate_pairings(3, 2, true)?;
    let classes: Vec<_> = odd
        .iter()
        .map(|p| x_assignment_classes(&p.pattern, XEquivalence::FirstPairExchange))
        .collect::<Result<Vec<_>>>()?
        .concat();
    let all_zero = classes.iter().all(|c| c.identically_zero);
    b.push("identically_zero(n=3,d=2)", 0.0, json!(true), json!({ "classes": classes.len(), "all_zero": all_zero }), all_zero);

    let five = builtin_catalog(Family::FiveSpinorDeg4Patterns)?;
    let printed: std::collections::BTreeSet<PairingPattern> = five
        .descriptors
        .iter()
        .map(|d| PairingPattern::of_descriptor(d).map(|p| p.canonical()))
        .collect::<Result<_>>()?;
    let enumerated: std::collections::BTreeSet<PairingPattern> =
        enumerate_pairings(5, 4, true)?.into_iter().map(|p| p.pattern).collect();
    let same = printed == enumerated;
    b.push(
        "printed_five_spinor_patterns_match_enumeration",
        0.0,
        json!(40),
        json!({ "printed_distinct": printed.len(), "identical_sets": same }),
        same && printed.len() == 40,
    );
    Ok(())
}

fn rank_reports(
    descs: &[InvariantDescriptor],
    cfg: &RunConfig,
) -> Result<Vec<SpanReport>> {
    let n_states = cfg.states_or(0).max(2 * descs.len());
    (0..RANK_SEEDS).map(|k| rank_of_span(descs, n_states, cfg.seed + k, cfg.rank_threshold)).collect()
}

fn three_spinor(b: &mut Builder) -> Result<()> {
    let catalog = builtin_catalog(Family::ThreeSpinorDeg4)?;
    let reports = rank_reports(&catalog.descriptors, b.cfg)?;
    b.push_rank("rank(three_spinor_deg4)", 67, &reports);
    for (signs, groups, claimed) in parity_classes() {
        let descs: Vec<InvariantDescriptor> = catalog
            .descriptors
            .iter()
            .filter(|d| {
                crate::catalog::split_three_spinor_name(&d.label()).map(|(g, _)| groups.contains(&g)).unwrap_or(false)
            })
            .cloned()
            .collect();
        let reports = rank_reports(&descs, b.cfg)?;
        b.push_rank(format!("rank(parity_class {})", sign_label(&signs)), claimed, &reports);
    }
    Ok(())
}

fn sign_label(signs: &[i8]) -> String {
    signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

fn four_spinor(b: &mut Builder) -> Result<()> {
    let h = builtin_catalog(Family::FourSpinorDeg2)?;
    let reports = rank_reports(&h.descriptors, b.cfg)?;
    b.push_rank("rank(four_spinor_deg2)", 16, &reports);

    let mut combos: Vec<LinearCombination> = Vec::new();
    for f in [Family::FourSpinorDeg4T, Family::FourSpinorDeg4Y] {
        combos.extend(builtin_catalog(f)?.names().iter().map(|n| LinearCombination::single(n)));
    }
    for n in h.names() {
        combos.push(LinearCombination { terms: vec![(1.0, vec![n.clone(), n])] });
    }
    let n_states = b.cfg.states_or(0).max(2 * combos.len());
    let reports: Vec<SpanReport> = (0..RANK_SEEDS)
        .map(|k| rank_of_combinations(&combos, n_states, b.cfg.seed + k, b.cfg.rank_threshold))
        .collect::<Result<_>>()?;
    b.push_rank("rank(T, Y and squared degree-2)", 41, &reports);
    Ok(())
}

fn reduction_record(b: &mut Builder, check: &str, claimed: Value, checks: &[ReductionCheck]) {
    let tol = b.cfg.tol;
    let failed: Vec<Value> = checks
        .iter()
        .filter(|c| !c.pass(tol))
        .take(8)
        .map(|c| json!({ "descriptor": c.descriptor, "tags": c.tags, "ratio": [c.ratio.re, c.ratio.im], "deviation": c.deviation }))
        .collect();
    let n_failed = checks.iter().filter(|c| !c.pass(tol)).count();
    let mut signs: BTreeMap<String, String> = BTreeMap::new();
    for c in checks.iter().filter(|c| c.claimed_factor != 0.0) {
        let ch = match c.sign {
            Some(1) => '+',
            Some(_) => '-',
            None => '?',
        };
        signs.entry(c.descriptor.clone()).or_default().push(ch);
    }
    let worst = checks.iter().map(|c| c.deviation).fold(0.0, f64::max);
    b.push(
        check,
        tol,
        claimed,
        json!({
            "n_checks": checks.len(),
            "n_failed": n_failed,
            "measured_factors": measured_factors(checks),
            "max_deviation": worst,
            "signs_by_tag_set": signs,
            "first_failures": failed,
        }),
        n_failed == 0,
    );
}

fn weyl(b: &mut Builder) -> Result<()> {
    let n = b.cfg.states_or(20);
    let seed = b.cfg.seed;
    let three = three_spinor_weyl(n, seed)?;
    let (abc, d): (Vec<_>, Vec<_>) = three.into_iter().partition(|c| c.claimed_factor != 0.0);
    reduction_record(b, "weyl(three_spinor a,b,c = ±128 tau)", json!("±128·tau"), &abc);
    reduction_record(b, "weyl(three_spinor d = 0)", json!(0), &d);
    let v = two_weyl_d_patterns(n, seed)?;
    reduction_record(b, "weyl(two Weyl parties, d patterns = ±64 V or 0)", json!("±64·V for P-even in the free lab, else 0"), &v);
    reduction_record(b, "weyl(four_spinor deg2 = ±16 H)", json!("±16·H"), &four_spinor_h(n, seed)?);
    reduction_record(b, "weyl(T, Y = printed H^2/L/M combinations)", json!("±printed combination"), &four_spinor_ty(n, seed)?);
    for k in [4usize, 6] {
        reduction_record(
            b,
            &format!("weyl(even N={k} deg2 = ±2^N n_tangle)"),
            json!(format!("±{}·n_tangle", 1u64 << k)),
            &even_n_tangle(k, None, n, seed)?,
        );
    }
    Ok(())
}

fn dependence(b: &mut Builder) -> Result<()> {
    let n = b.cfg.states_or(100);
    let seed = b.cfg.seed;
    let tol = b.cfg.tol;
    let relations = builtin_relations();
    let residuals: Vec<(f64, f64)> = relations
        .par_iter()
        .map(|r| Ok((check_dependence(&r.combination, n, seed)?, rms_value(&r.combination, n, seed)?)))
        .collect::<Result<_>>()?;
    for (r, (res, _)) in relations.iter().zip(&residuals) {
        b.push(
            format!("relation[{}] 0 = {}", r.block, r.combination),
            tol,
            json!(0.0),
            json!({ "residual": res, "n_states": n, "source": r.source }),
            *res < tol,
        );
    }
    let mut perturbed = relations[0].combination.clone();
    perturbed.terms[0].0 *= 1.5;
    let res = check_dependence(&perturbed, n, seed)?;
    b.push(
        format!("negative_control 0 = {perturbed}"),
        NEGATIVE_CONTROL_MIN,
        json!("residual > 1e-3"),
        json!({ "residual": res }),
        res > NEGATIVE_CONTROL_MIN,
    );
    Ok(())
}

struct InvarianceJob {
    check: String,
    combo: LinearCombination,
    group: GroupId,
    party: PartySelector,
}

fn invariance(b: &mut Builder) -> Result<()> {
    let trials = b.cfg.states_or(50);
    let seed = b.cfg.seed;
    let tol = b.cfg.tol;
    let three = builtin_catalog(Family::ThreeSpinorDeg4)?;
    let h = builtin_catalog(Family::FourSpinorDeg2)?;
    let groups = [
        GroupId::LorentzProper,
        GroupId::GcU,
        GroupId::Gc5U,
        GroupId::Gc,
        GroupId::Gc5,
        GroupId::IntersectionU,
        GroupId::Intersection,
        GroupId::DiracGroup,
    ];

    let mut grouped: Vec<(String, Vec<InvarianceJob>)> = Vec::new();
    for family in [&three, &h] {
        let n = family.descriptors[0].n_parties;
        for &g in &groups {
            for p in 0..n {
                let jobs: Vec<InvarianceJob> = family
                    .descriptors
                    .iter()
                    .filter(|d| expected_invariant(d, g, p))
                    .map(|d| InvarianceJob {
                        check: d.label(),
                        combo: LinearCombination::single(&d.label()),
                        group: g,
                        party: PartySelector::One(p),
                    })
                    .collect();
                if !jobs.is_empty() {
                    grouped.push((format!("invariance({:?}, {g}, party {p})", family.family), jobs));
                }
            }
        }
    }
    let ty: Vec<InvarianceJob> = [Family::FourSpinorDeg4T, Family::FourSpinorDeg4Y]
        .iter()
        .map(|f| builtin_catalog(*f))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .flat_map(|c| c.names())
        .map(|n| InvarianceJob {
            combo: LinearCombination::single(&n),
            check: n,
            group: GroupId::LorentzProper,
            party: PartySelector::One(0),
        })
        .collect();
    grouped.push(("invariance(T and Y, LorentzProper, party 0)".into(), ty));
    let sl4 = sl4_combinations();
    for g in [GroupId::Sl4, GroupId::U1Sl4] {
        let jobs = sl4
            .iter()
            .filter(|(_, c)| c.n_parties().ok() == Some(3))
            .map(|(party, combo)| InvarianceJob { check: combo.to_string(), combo: combo.clone(), group: g, party: *party })
            .collect();
        grouped.push((format!("invariance(three_spinor U(1)xSL(4) combinations, {g})"), jobs));
    }
    let squares: Vec<LinearCombination> =
        sl4.iter().filter(|(_, c)| c.n_parties().ok() == Some(4)).map(|(_, c)| c.clone()).collect();
    for combo in &squares {
        let corrected = negate_terms(combo, &["T_d", "Y_d"]);
        for (label, c) in [("printed", combo.clone()), ("T_d, Y_d negated", corrected)] {
            for g in [GroupId::Sl4, GroupId::U1Sl4] {
                let jobs = (0..4)
                    .map(|p| InvarianceJob { check: c.to_string(), combo: c.clone(), group: g, party: PartySelector::One(p) })
                    .collect();
                grouped.push((format!("invariance({label} {c}, {g}, every party)"), jobs));
            }
        }
    }

    for (check, jobs) in grouped {
        let reports: Vec<_> = jobs
            .par_iter()
            .map(|j| check_invariance(&j.combo, j.group, j.party, trials, seed))
            .collect::<Result<_>>()?;
        let mut worst = 0.0f64;
        let mut worst_name = String::new();
        let mut vanishing = Vec::new();
        let mut failing = Vec::new();
        for (j, r) in jobs.iter().zip(&reports) {
            if r.rms <= ZERO_RMS {
                vanishing.push(j.check.clone());
                continue;
            }
            if r.deviation() > worst {
                worst = r.deviation();
                worst_name = j.check.clone();
            }
            if !r.is_invariant(tol) {
                failing.push(format!("{} at {}", j.check, j.party));
            }
        }
        let mode = reports.first().map(|r| r.mode);
        b.push(
            check,
            tol,
            json!("invariant"),
            json!({
                "mode": mode,
                "n_polynomials": jobs.len(),
                "n_trials": trials,
                "max_deviation": worst,
                "worst": worst_name,
                "vanishing": vanishing,
                "failing": failing,
            }),
            failing.is_empty() && vanishing.is_empty(),
        );
    }

    for (name, g) in [("H_a", GroupId::Gc5), ("I_3a", GroupId::Sl4)] {
        let r = check_invariance(&LinearCombination::single(name), g, PartySelector::One(0), trials, seed)?;
        b.push(
            format!("negative_control({name}, {g}, party 0)"),
            NEGATIVE_CONTROL_MIN,
            json!("deviation > 1e-3"),
            json!({ "mode": r.mode, "deviation": r.deviation() }),
            r.deviation() > NEGATIVE_CONTROL_MIN,
        );
    }

    let parity_states = b.cfg.states_or(20);
    let measured: Vec<(String, Option<Vec<i8>>)> = three
        .names()
        .par_iter()
        .map(|n| {
            let m = classify_parity(&LinearCombination::single(n), parity_states, seed)?;
            Ok((n.clone(), m.iter().map(|s| s.sign(1e-9)).collect::<Option<Vec<i8>>>()))
        })
        .collect::<Result<_>>()?;
    for (signs, groups, _) in parity_classes() {
        let members: Vec<&(String, Option<Vec<i8>>)> = measured
            .iter()
            .filter(|(n, _)| crate::catalog::split_three_spinor_name(n).map(|(g, _)| groups.contains(&g)).unwrap_or(false))
            .collect();
        let mismatched: Vec<&String> = members
            .iter()
            .filter(|(n, m)| m.as_deref() != Some(&signs[..]) || parity_class(n).map(|c| c != signs).unwrap_or(true))
            .map(|(n, _)| n)
            .collect();
        b.push(
            format!("parity_class({})", sign_label(&signs)),
            1e-9,
            json!(sign_label(&signs)),
            json!({ "n_polynomials": members.len(), "mismatched": mismatched }),
            mismatched.is_empty(),
        );
    }

    let mut all_names = three.names();
    all_names.extend(h.names());
    for f in [Family::FourSpinorDeg4T, Family::FourSpinorDeg4Y] {
        all_names.extend(builtin_catalog(f)?.names());
    }
    let cpt: Vec<(String, f64)> = all_names
        .par_iter()
        .map(|n| {
            let m = measure_cpt(&LinearCombination::single(n), parity_states, seed)?;
            Ok((n.clone(), m.iter().map(|s| (s.ratio.norm() - 1.0).abs() + s.spread).fold(0.0, f64::max)))
        })
        .collect::<Result<_>>()?;
    let worst = cpt.iter().map(|c| c.1).fold(0.0, f64::max);
    let failing: Vec<&String> = cpt.iter().filter(|c| c.1 > tol).map(|c| &c.0).collect();
    b.push(
        "cpt_magnitude_invariance(all tagged catalog entries, every party)",
        tol,
        json!("|ratio| = 1"),
        json!({ "n_polynomials": cpt.len(), "max_deviation": worst, "failing": failing }),
        failing.is_empty(),
    );
    Ok(())
}

/// Copy of `combo` with the coefficients of the listed single names negated.
pub fn negate_terms(combo: &LinearCombination, names: &[&str]) -> LinearCombination {
    let mut out = combo.clone();
    for (c, m) in &mut out.terms {
        if m.len() == 1 && names.contains(&m[0].as_str()) {
            *c = -*c;
        }
    }
    out
}

fn examples(b: &mut Builder) -> Result<()> {
    for ex in EXAMPLES {
        let checks = check_example(ex)?;
        let named: Vec<_> = checks.iter().filter(|c| c.expected != 0.0).collect();
        let zeros: Vec<_> = checks.iter().filter(|c| c.expected == 0.0).collect();
        let named_err = named.iter().map(|c| c.error).fold(0.0, f64::max);
        let zero_err = zeros.iter().map(|c| c.error).fold(0.0, f64::max);
        let nonzero_others: BTreeMap<&str, f64> =
            zeros.iter().filter(|c| c.error >= EXAMPLE_ZERO_TOL).map(|c| (c.polynomial.as_str(), c.measured)).collect();
        let claimed: BTreeMap<&str, f64> = named.iter().map(|c| (c.polynomial.as_str(), c.expected)).collect();
        b.push(
            format!("example({})", ex.name),
            EXAMPLE_TOL,
            json!({ "magnitudes": claimed, "others": 0.0 }),
            json!({
                "kets": ex.kets,
                "max_error_named": named_err,
                "max_other_magnitude": zero_err,
                "nonzero_others": nonzero_others,
            }),
            named_err < EXAMPLE_TOL && zero_err < EXAMPLE_ZERO_TOL,
        );
    }
    Ok(())
}

fn evolution(b: &mut Builder) -> Result<()> {
    let n = b.cfg.states_or(20);
    let seed = b.cfg.seed;
    let cases: [(XTag, &[u8], bool); 12] = [
        (XTag::C5, &[0], true),
        (XTag::C5, &[1], true),
        (XTag::C5, &[2], true),
        (XTag::C5, &[1, 2], true),
        (XTag::C5, &[0, 1, 2], true),
        (XTag::C5, &[1, 3], false),
        (XTag::C, &[0], true),
        (XTag::C, &[2], true),
        (XTag::C, &[3], true),
        (XTag::C, &[2, 3], true),
        (XTag::C, &[0, 2, 3], true),
        (XTag::C, &[1, 3], false),
    ];
    for (k, (x, degrees, preserved)) in cases.iter().enumerate() {
        let mut rng = stream_rng(seed.wrapping_add(k as u64), streams::HAMILTONIAN);
        let reports: Vec<_> = (0..n)
            .map(|_| {
                let h = HamiltonianSpec::random(&mut rng, degrees);
                let t = rng.gen_range(0.1..2.0);
                evolve_and_check_bilinear(&h, t, *x)
            })
            .collect::<Result<_>>()?;
        let max_res = reports.iter().map(|r| r.scalar_residual).fold(0.0, f64::max);
        let min_res = reports.iter().map(|r| r.scalar_residual).fold(f64::INFINITY, f64::min);
        let max_modulus_err = reports.iter().map(|r| (r.modulus - 1.0).abs()).fold(0.0, f64::max);
        let pass = if *preserved {
            max_res < EVOLUTION_TOL && max_modulus_err < EVOLUTION_TOL
        } else {
            min_res > NEGATIVE_CONTROL_MIN
        };
        b.push(
            format!("evolution(X={x}, degrees {degrees:?})"),
            if *preserved { EVOLUTION_TOL } else { NEGATIVE_CONTROL_MIN },
            json!(if *preserved { "scalar multiple of X" } else { "not a scalar multiple" }),
            json!({
                "n_hamiltonians": n,
                "max_scalar_residual": max_res,
                "min_scalar_residual": min_res,
                "max_modulus_error": max_modulus_err,
            }),
            pass,
        );
    }
    let mut rng = stream_rng(seed, streams::HAMILTONIAN);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let f: f64 = rng.gen_range(-2.0..2.0);
        let t: f64 = rng.gen_range(0.1..2.0);
        for x in [XTag::C, XTag::C5] {
            let r = evolve_and_check_bilinear(&HamiltonianSpec { f, ..Default::default() }, t, x)?;
            worst = worst.max(r.theta_error).max(r.scalar_residual);
        }
    }
    b.push(
        "evolution(H = f·I, theta = -2ft)",
        EVOLUTION_TOL,
        json!("theta = -2ft"),
        json!({ "max_angle_error": worst }),
        worst < EVOLUTION_TOL,
    );
    Ok(())
}

fn relative(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

fn oracles(b: &mut Builder) -> Result<()> {
    let n = b.cfg.states_or(20);
    let seed = b.cfg.seed;
    let three = builtin_catalog(Family::ThreeSpinorDeg4)?;
    let states3 = random_states(3, n, seed)?;
    let devs: Vec<f64> = three
        .descriptors
        .par_iter()
        .map(|d| {
            states3
                .iter()
                .map(|s| Ok(relative(naive_evaluate(d, s)?, evaluate(d, s)?)))
                .collect::<Result<Vec<f64>>>()
                .map(|v| v.into_iter().fold(0.0, f64::max))
        })
        .collect::<Result<_>>()?;
    let worst = devs.iter().copied().fold(0.0, f64::max);
    b.push(
        "naive_evaluate = evaluate (three_spinor catalog)",
        ORACLE_TOL,
        json!(0.0),
        json!({ "n_polynomials": devs.len(), "n_states": n, "max_relative_difference": worst }),
        worst < ORACLE_TOL,
    );

    let states4 = random_states(4, n, seed)?;
    for name in transcribed_expansions() {
        let d = lookup(name)?;
        let states = if d.n_parties == 3 { &states3 } else { &states4 };
        let worst = states
            .iter()
            .map(|s| Ok(relative(hand_expansion(name, s)?, evaluate(&d, s)?)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        b.push(
            format!("hand_expansion({name}) = evaluate"),
            ORACLE_TOL,
            json!(0.0),
            json!({ "n_states": n, "max_relative_difference": worst }),
            worst < ORACLE_TOL,
        );
    }

    let ghz = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0].map(|x| Complex64::new(x * std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let right = vec![Chirality::Right; 3];
    let raw = embed_qubit_state(&ghz, &right)?;
    let tau = three_tangle(&QubitState::new(3, ghz.to_vec())?)?;
    let i3a = lookup("I_3a")?;
    let value = evaluate(&i3a, &raw)?;
    let sub_tau = three_tangle(&QubitState::new(3, crate::states::qubit_subtensor(&raw))?)?;
    b.push(
        "embedding_convention(GHZ3, all Right)",
        ORACLE_TOL,
        json!("raw sub-tensor reproduces 128·tau"),
        json!({
            "value_over_raw_tau": (value / sub_tau).re,
            "value_over_normalized_tau": (value / tau).re,
        }),
        ((value / sub_tau).norm() - 128.0).abs() < 1e-9,
    );

    let qubit4 = random_qubit_coeffs(4, n, seed);
    let qubit6 = random_qubit_coeffs(6, n, seed);
    let mut h_ratio = Vec::new();
    for q in &qubit4 {
        let q = QubitState::new(4, q.clone())?;
        h_ratio.push(n_tangle(&q)? / crate::oracles::four_qubit_invariants(&q)?.0);
    }
    let mut tau6_ratio = Vec::new();
    for q in &qubit6 {
        let q = QubitState::new(6, q.clone())?;
        tau6_ratio.push(printed_tau6(&q)? / n_tangle(&q)?);
    }
    let spread = |v: &[Complex64], want: f64| v.iter().map(|r| (r - want).norm()).fold(0.0, f64::max);
    b.push(
        "n_tangle(4) = 2·H",
        ORACLE_TOL,
        json!(2.0),
        json!({ "max_deviation": spread(&h_ratio, 2.0) }),
        spread(&h_ratio, 2.0) < ORACLE_TOL,
    );
    b.push(
        "printed tau6 = n_tangle(6)/2",
        ORACLE_TOL,
        json!(0.5),
        json!({ "max_deviation": spread(&tau6_ratio, 0.5) }),
        spread(&tau6_ratio, 0.5) < ORACLE_TOL,
    );

    let v_states = random_states(3, n, seed)?;
    let v_gap = v_states
        .iter()
        .map(|s| Ok(relative(tangle_224(s)?, tangle_224_printed(s)?)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    b.push(
        "printed V differs from repaired V",
        ORACLE_TOL,
        json!("differs"),
        json!({ "max_relative_difference": v_gap }),
        v_gap > NEGATIVE_CONTROL_MIN,
    );

    let sample: Vec<InvariantDescriptor> =
        ["I_3a", "I_23b", "I_35d", "H_a", "T_a"].iter().map(|n| lookup(n)).collect::<Result<_>>()?;
    let sim_states = n.min(5);
    for (label, s) in [
        ("identity", ComplexMatrix4::identity()),
        ("random SL4", random_sl4(seed)?),
        ("2I", ComplexMatrix4::identity() * Complex64::new(2.0, 0.0)),
    ] {
        let r = similarity_covariance_check(&s, &sample, sim_states, seed)?;
        let dev = r.scalar_power_deviation.unwrap_or(r.rebuilt_deviation);
        b.push(
            format!("similarity_covariance({label})"),
            b.cfg.tol,
            json!(if r.scalar_power_deviation.is_some() { "det(s)^(n·d/4) scaling" } else { "equal values" }),
            json!({
                "rebuilt_deviation": r.rebuilt_deviation,
                "printed_form_deviation": r.printed_form_deviation,
                "scalar_power_deviation": r.scalar_power_deviation,
            }),
            dev < b.cfg.tol && r.rebuilt_deviation < b.cfg.tol,
        );
    }
    Ok(())
}
