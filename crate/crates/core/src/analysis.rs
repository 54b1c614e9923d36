//! Numerical checks on polynomial families: spans, dependence relations,
//! invariance under sampled group actions, parity, Hamiltonian evolution of
//! the bilinear forms and similarity covariance.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::lookup;
use crate::clifford::{
    discrete_transform, expm, gamma_basis, sample_group_element_from, scalar_multiple_fit, ComplexMatrix4,
    DiscreteTransform, GroupId, XTag, DEFAULT_SCALE,
};
use crate::contraction::{evaluate_with_matrices, CompiledDescriptor, InvariantDescriptor};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, streams};
use crate::states::{random_states, MultiSpinorState};

pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-8;
/// Polynomials with RMS below this over random states are treated as zero.
pub const ZERO_RMS: f64 = 1e-10;
const EPS: f64 = 1e-300;

/// `Σ cᵢ · Πⱼ Pᵢⱼ` over named catalog polynomials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearCombination {
    pub terms: Vec<(f64, Vec<String>)>,
}

impl LinearCombination {
    pub fn single(name: &str) -> Self {
        Self { terms: vec![(1.0, vec![name.to_string()])] }
    }

    pub fn from_terms(terms: &[(f64, &str)]) -> Self {
        Self { terms: terms.iter().map(|(c, n)| (*c, vec![n.to_string()])).collect() }
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.terms.iter().flat_map(|(_, m)| m.iter().cloned()).collect()
    }

    fn sub(mut self, other: &LinearCombination) -> Self {
        self.terms.extend(other.terms.iter().map(|(c, m)| (-c, m.clone())));
        self.merged()
    }

    fn scale(mut self, k: f64) -> Self {
        for t in &mut self.terms {
            t.0 *= k;
        }
        self
    }

    fn merged(self) -> Self {
        let mut acc: BTreeMap<Vec<String>, f64> = BTreeMap::new();
        let mut order = Vec::new();
        for (c, mut m) in self.terms {
            m.sort();
            if !acc.contains_key(&m) {
                order.push(m.clone());
            }
            *acc.entry(m).or_insert(0.0) += c;
        }
        Self { terms: order.into_iter().map(|m| (acc[&m], m)).filter(|(c, _)| *c != 0.0).collect() }
    }

    /// Value and the scale `Σ|cᵢ·termᵢ|` at one state.
    pub fn eval_with(&self, values: &dyn Fn(&str) -> Complex64) -> (Complex64, f64) {
        let mut total = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for (c, mono) in &self.terms {
            let v = mono.iter().fold(Complex64::new(*c, 0.0), |p, n| p * values(n));
            total += v;
            scale += v.norm();
        }
        (total, scale)
    }

    /// Party count shared by every constituent.
    pub fn n_parties(&self) -> Result<usize> {
        let counts: BTreeSet<usize> =
            self.names().iter().map(|n| lookup(n).map(|d| d.n_parties)).collect::<Result<_>>()?;
        match counts.len() {
            1 => Ok(*counts.iter().next().expect("one element")),
            0 => Err(Error::InvalidArgument("empty combination".into())),
            _ => Err(Error::InvalidArgument("combination mixes party counts".into())),
        }
    }
}

impl fmt::Display for LinearCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (c, mono)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            let coef = if (mag - 1.0).abs() < 1e-15 { String::new() } else { format!("{mag} ") };
            match (k, *c < 0.0) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            write!(f, "{coef}{}", render_monomial(mono))?;
        }
        Ok(())
    }
}

fn render_monomial(mono: &[String]) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for n in mono {
        *counts.entry(n).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .map(|(n, k)| if k == 1 { n.to_string() } else { format!("{n}^{k}") })
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Open,
    Close,
    Pow(usize),
    Eq,
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => { out.push(Tok::Plus); i += 1; }
            '-' => { out.push(Tok::Minus); i += 1; }
            '(' => { out.push(Tok::Open); i += 1; }
            ')' => { out.push(Tok::Close); i += 1; }
            '=' => { out.push(Tok::Eq); i += 1; }
            '^' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let k: usize = chars[start..j].iter().collect::<String>().parse().map_err(|_| Error::Parse(format!("bad exponent in `{text}`")))?;
                out.push(Tok::Pow(k));
                i = j;
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.' || chars[i] == '/') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = match s.split_once('/') {
                    Some((a, b)) => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()).map(|(a, b)| a / b),
                    None => s.parse().ok(),
                }
                .ok_or_else(|| Error::Parse(format!("bad number `{s}`")))?;
                out.push(Tok::Num(v));
            }
            a if a.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || "_[],".contains(chars[i])) {
                    if chars[i] == '[' {
                        while i < chars.len() && chars[i] != ']' {
                            i += 1;
                        }
                    }
                    i += 1;
                }
                out.push(Tok::Name(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected `{other}` in `{text}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl Parser<'_> {
    fn sum(&mut self) -> Result<LinearCombination> {
        let mut acc = LinearCombination { terms: Vec::new() };
        let mut first = true;
        loop {
            let sign = match self.toks.get(self.pos) {
                Some(Tok::Plus) => { self.pos += 1; 1.0 }
                Some(Tok::Minus) => { self.pos += 1; -1.0 }
                _ if first => 1.0,
                _ => break,
            };
            first = false;
            let t = self.term()?.scale(sign);
            acc.terms.extend(t.terms);
        }
        Ok(acc.merged())
    }

    fn term(&mut self) -> Result<LinearCombination> {
        let mut coef = 1.0;
        if let Some(Tok::Num(v)) = self.toks.get(self.pos) {
            coef = *v;
            self.pos += 1;
        }
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Name(n)) => {
                self.pos += 1;
                let mut power = 1;
                if let Some(Tok::Pow(k)) = self.toks.get(self.pos) {
                    power = *k;
                    self.pos += 1;
                }
                Ok(LinearCombination { terms: vec![(coef, vec![n; power])] })
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.toks.get(self.pos) != Some(&Tok::Close) {
                    return Err(Error::Parse("missing `)`".into()));
                }
                self.pos += 1;
                Ok(inner.scale(coef))
            }
            _ if coef == 0.0 => Ok(LinearCombination { terms: Vec::new() }),
            other => Err(Error::Parse(format!("expected a name or `(`, found {other:?}"))),
        }
    }
}

/// Parses `2 I_7a - I_7b + 1/2(I_27c - I_27a)` or `H_b^2 - …`.
pub fn parse_combination(text: &str) -> Result<LinearCombination> {
    let toks = tokenize(text)?;
    if toks.contains(&Tok::Eq) {
        return Err(Error::Parse("use parse_relation for equations".into()));
    }
    parse_side(&toks, text)
}

fn parse_side(toks: &[Tok], text: &str) -> Result<LinearCombination> {
    let mut p = Parser { toks, pos: 0 };
    let c = p.sum()?;
    if p.pos != toks.len() {
        return Err(Error::Parse(format!("trailing input in `{text}`")));
    }
    Ok(c)
}

/// A chain `a = b = c` becomes the relations `a − b` and `b − c`.
pub fn parse_relation(text: &str) -> Result<Vec<LinearCombination>> {
    let toks = tokenize(text)?;
    let sides: Vec<LinearCombination> =
        toks.split(|t| *t == Tok::Eq).map(|s| parse_side(s, text)).collect::<Result<_>>()?;
    if sides.len() < 2 {
        return Err(Error::Parse(format!("`{text}` has no `=`")));
    }
    Ok(sides.windows(2).map(|w| w[0].clone().sub(&w[1])).collect())
}

/// A printed dependence relation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Relation {
    pub block: String,
    pub source: String,
    pub combination: LinearCombination,
}

const RELATIONS: &str = include_str!("../data/relations.txt");
const SL4_COMBINATIONS: &str = include_str!("../data/sl4_combinations.txt");

fn data_lines(text: &str) -> impl Iterator<Item = (&str, &str)> {
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| l.split_once('|').map(|(a, b)| (a.trim(), b.trim())).expect("`key | body` line"))
}

pub fn builtin_relations() -> Vec<Relation> {
    data_lines(RELATIONS)
        .flat_map(|(block, body)| {
            parse_relation(body)
                .unwrap_or_else(|e| panic!("bundled relation `{body}`: {e}"))
                .into_iter()
                .map(move |combination| Relation { block: block.to_string(), source: body.to_string(), combination })
        })
        .collect()
}

/// Where a combination is expected to be invariant under U(1)×SL(4,ℂ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartySelector {
    One(usize),
    All,
}

impl fmt::Display for PartySelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartySelector::One(p) => write!(f, "{p}"),
            PartySelector::All => f.write_str("all"),
        }
    }
}

/// The Alice-lab list repeats the Bob-lab entry `2I_21a − I_21b − I_21c`;
/// its neighbours all have the form `X_a − 2X_b + X_c`. Each entry is
/// (party, printed, repaired).
pub const SL4_COMBINATION_REPAIRS: [(&str, &str, &str); 1] =
    [("0", "2 I_21a - I_21b - I_21c", "I_21a - 2 I_21b + I_21c")];

pub fn sl4_combinations() -> Vec<(PartySelector, LinearCombination)> {
    data_lines(SL4_COMBINATIONS)
        .map(|(party, body)| {
            let body = SL4_COMBINATION_REPAIRS
                .iter()
                .find(|(p, printed, _)| *p == party && *printed == body)
                .map_or(body, |(_, _, repaired)| repaired);
            let sel = if party == "all" {
                PartySelector::All
            } else {
                PartySelector::One(party.parse().expect("party index"))
            };
            (sel, parse_combination(body).unwrap_or_else(|e| panic!("bundled combination `{body}`: {e}")))
        })
        .collect()
}

/// Catalog values of every name in `names` at every state, keyed by name.
pub fn evaluate_names(
    names: &BTreeSet<String>,
    states: &[MultiSpinorState],
) -> Result<BTreeMap<String, Vec<Complex64>>> {
    let descs: Vec<InvariantDescriptor> = names.iter().map(|n| lookup(n)).collect::<Result<_>>()?;
    let rows: Vec<Vec<Complex64>> = descs
        .par_iter()
        .map(|d| {
            let c = CompiledDescriptor::new(d);
            states.iter().map(|s| c.evaluate(s)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(names.iter().cloned().zip(rows).collect())
}

fn combination_rows(
    combos: &[LinearCombination],
    states: &[MultiSpinorState],
) -> Result<Vec<Vec<(Complex64, f64)>>> {
    let names: BTreeSet<String> = combos.iter().flat_map(|c| c.names()).collect();
    let table = evaluate_names(&names, states)?;
    Ok(combos
        .iter()
        .map(|c| (0..states.len()).map(|k| c.eval_with(&|n| table[n][k])).collect())
        .collect())
}

/// Evaluation matrix summary.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpanReport {
    pub names: Vec<String>,
    pub n_random_states: usize,
    pub rows: usize,
    pub cols: usize,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub threshold: f64,
    pub seed: u64,
}

/// Singular values (descending) and the count above `threshold × σ_max`.
pub fn numerical_rank(rows: &[Vec<Complex64>], threshold: f64) -> (Vec<f64>, usize) {
    if rows.is_empty() || rows[0].is_empty() {
        return (Vec::new(), 0);
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |r, c| rows[r][c]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > threshold * top).count();
    (sv, rank)
}

pub fn rank_of_span(descs: &[InvariantDescriptor], n_states: usize, seed: u64, threshold: f64) -> Result<SpanReport> {
    if descs.is_empty() {
        return Err(Error::InvalidArgument("empty descriptor list".into()));
    }
    let n = descs[0].n_parties;
    let states = random_states(n, n_states, seed)?;
    let rows = crate::contraction::evaluate_batch(descs, &states)?;
    let (singular_values, rank) = numerical_rank(&rows, threshold);
    Ok(SpanReport {
        names: descs.iter().map(|d| d.label()).collect(),
        n_random_states: n_states,
        rows: rows.len(),
        cols: n_states,
        singular_values,
        rank,
        threshold,
        seed,
    })
}

/// Rank of a span of combinations, e.g. degree-4 polynomials together with
/// squares of degree-2 ones.
pub fn rank_of_combinations(
    combos: &[LinearCombination],
    n_states: usize,
    seed: u64,
    threshold: f64,
) -> Result<SpanReport> {
    if combos.is_empty() {
        return Err(Error::InvalidArgument("empty combination list".into()));
    }
    let n = combos[0].n_parties()?;
    let states = random_states(n, n_states, seed)?;
    let rows: Vec<Vec<Complex64>> =
        combination_rows(combos, &states)?.into_iter().map(|r| r.into_iter().map(|(v, _)| v).collect()).collect();
    let (singular_values, rank) = numerical_rank(&rows, threshold);
    Ok(SpanReport {
        names: combos.iter().map(|c| c.to_string()).collect(),
        n_random_states: n_states,
        rows: rows.len(),
        cols: n_states,
        singular_values,
        rank,
        threshold,
        seed,
    })
}

/// `max_states |Σ cᵢPᵢ| / Σ|cᵢPᵢ|`.
pub fn check_dependence(combo: &LinearCombination, n_states: usize, seed: u64) -> Result<f64> {
    let n = combo.n_parties()?;
    let states = random_states(n, n_states, seed)?;
    let rows = combination_rows(std::slice::from_ref(combo), &states)?;
    Ok(rows[0].iter().map(|(v, s)| v.norm() / s.max(EPS)).fold(0.0, f64::max))
}

/// Root-mean-square of a combination over random states.
pub fn rms_value(combo: &LinearCombination, n_states: usize, seed: u64) -> Result<f64> {
    let n = combo.n_parties()?;
    let states = random_states(n, n_states, seed)?;
    let rows = combination_rows(std::slice::from_ref(combo), &states)?;
    Ok((rows[0].iter().map(|(v, _)| v.norm_sqr()).sum::<f64>() / n_states as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvarianceMode {
    Value,
    Magnitude,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub target: String,
    pub group_id: GroupId,
    pub party: PartySelector,
    pub n_trials: usize,
    pub max_value_deviation: f64,
    pub max_magnitude_deviation: f64,
    pub mode: InvarianceMode,
    pub rms: f64,
    pub seed: u64,
}

impl InvarianceReport {
    /// Deviation under the mode appropriate to the group.
    pub fn deviation(&self) -> f64 {
        match self.mode {
            InvarianceMode::Value => self.max_value_deviation,
            InvarianceMode::Magnitude => self.max_magnitude_deviation,
        }
    }

    pub fn is_invariant(&self, tol: f64) -> bool {
        self.rms > ZERO_RMS && self.deviation() < tol
    }
}

fn compile_combo(combo: &LinearCombination) -> Result<BTreeMap<String, CompiledDescriptor>> {
    combo.names().into_iter().map(|n| lookup(&n).map(|d| (n, CompiledDescriptor::new(&d)))).collect()
}

fn eval_compiled(combo: &LinearCombination, compiled: &BTreeMap<String, CompiledDescriptor>, s: &MultiSpinorState) -> Result<Complex64> {
    let values: BTreeMap<&str, Complex64> =
        compiled.iter().map(|(n, c)| c.evaluate(s).map(|v| (n.as_str(), v))).collect::<Result<_>>()?;
    Ok(combo.eval_with(&|n| values[n]).0)
}

fn apply_at(state: &MultiSpinorState, party: PartySelector, m: &ComplexMatrix4) -> Result<MultiSpinorState> {
    match party {
        PartySelector::One(p) => state.apply_local(p, m),
        PartySelector::All => Ok(state.apply_everywhere(m)),
    }
}

/// Applies `n_trials` sampled elements of `group_id` and records the largest
/// relative change in value and in magnitude.
pub fn check_invariance(
    combo: &LinearCombination,
    group_id: GroupId,
    party: PartySelector,
    n_trials: usize,
    seed: u64,
) -> Result<InvarianceReport> {
    let n = combo.n_parties()?;
    if let PartySelector::One(p) = party {
        if p >= n {
            return Err(Error::InvalidArgument(format!("party {p} out of range for {n} parties")));
        }
    }
    let compiled = compile_combo(combo)?;
    let states = random_states(n, n_trials, seed)?;
    let mut rng = stream_rng(seed, streams::GROUP);
    let elements: Vec<ComplexMatrix4> = (0..n_trials)
        .map(|_| sample_group_element_from(&mut rng, group_id, DEFAULT_SCALE))
        .collect::<Result<_>>()?;
    let pairs: Vec<(Complex64, Complex64)> = states
        .par_iter()
        .zip(elements.par_iter())
        .map(|(s, g)| Ok((eval_compiled(combo, &compiled, s)?, eval_compiled(combo, &compiled, &apply_at(s, party, g)?)?)))
        .collect::<Result<_>>()?;
    let mut max_value: f64 = 0.0;
    let mut max_mag: f64 = 0.0;
    let mut sq = 0.0;
    for (before, after) in &pairs {
        let denom = before.norm().max(EPS);
        max_value = max_value.max((after - before).norm() / denom);
        max_mag = max_mag.max((after.norm() - before.norm()).abs() / denom);
        sq += before.norm_sqr();
    }
    Ok(InvarianceReport {
        target: combo.to_string(),
        group_id,
        party,
        n_trials,
        max_value_deviation: max_value,
        max_magnitude_deviation: max_mag,
        mode: if group_id.preserves_values() { InvarianceMode::Value } else { InvarianceMode::Magnitude },
        rms: (sq / n_trials.max(1) as f64).sqrt(),
        seed,
    })
}

/// Whether the construction guarantees invariance of a single descriptor
/// under `group_id` at `party`.
pub fn expected_invariant(desc: &InvariantDescriptor, group_id: GroupId, party: usize) -> bool {
    let tags = desc.tags_at(party);
    match group_id {
        GroupId::LorentzProper | GroupId::Intersection | GroupId::IntersectionU | GroupId::DiracGroup => true,
        GroupId::Gc | GroupId::GcU => tags.iter().all(|t| *t == XTag::C),
        GroupId::Gc5 | GroupId::Gc5U => tags.iter().all(|t| *t == XTag::C5),
        GroupId::Sl4 | GroupId::U1Sl4 => false,
    }
}

/// Ratio `f(Sψ)/f(ψ)` for a fixed local transform at each party, with the
/// spread across states.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SignMeasurement {
    pub party: usize,
    pub ratio: Complex64,
    pub spread: f64,
}

impl SignMeasurement {
    /// `Some(±1)` when the ratio is a consistent real sign.
    pub fn sign(&self, tol: f64) -> Option<i8> {
        if self.spread > tol {
            return None;
        }
        if (self.ratio - 1.0).norm() < tol {
            Some(1)
        } else if (self.ratio + 1.0).norm() < tol {
            Some(-1)
        } else {
            None
        }
    }
}

fn measure_transform(
    combo: &LinearCombination,
    m: &ComplexMatrix4,
    n_states: usize,
    seed: u64,
) -> Result<Vec<SignMeasurement>> {
    let n = combo.n_parties()?;
    let compiled = compile_combo(combo)?;
    let states = random_states(n, n_states, seed)?;
    let base: Vec<Complex64> = states.iter().map(|s| eval_compiled(combo, &compiled, s)).collect::<Result<_>>()?;
    (0..n)
        .map(|p| {
            let ratios: Vec<Complex64> = states
                .iter()
                .zip(&base)
                .map(|(s, b)| Ok(eval_compiled(combo, &compiled, &s.apply_local(p, m)?)? / b))
                .collect::<Result<_>>()?;
            let mean = ratios.iter().sum::<Complex64>() / ratios.len() as f64;
            let spread = ratios.iter().map(|r| (r - mean).norm()).fold(0.0, f64::max);
            Ok(SignMeasurement { party: p, ratio: mean, spread })
        })
        .collect()
}

/// Measured sign under S(P) = γ⁰ at each party.
pub fn classify_parity(combo: &LinearCombination, n_states: usize, seed: u64) -> Result<Vec<SignMeasurement>> {
    measure_transform(combo, &discrete_transform(DiscreteTransform::P)?, n_states, seed)
}

/// Measured factor under S(CPT) = −iγ⁵ at each party.
pub fn measure_cpt(combo: &LinearCombination, n_states: usize, seed: u64) -> Result<Vec<SignMeasurement>> {
    measure_transform(combo, &discrete_transform(DiscreteTransform::Cpt)?, n_states, seed)
}

/// Real coefficients of a Hermitian Hamiltonian grouped by gamma degree.
/// Each basis term is a product of distinct gamma matrices, multiplied by i
/// where needed to make it Hermitian.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    /// Identity coefficient.
    pub f: f64,
    /// γ⁰, iγ¹, iγ², iγ³.
    pub eta: [f64; 4],
    /// γ^μγ^ν for μ < ν, in lexicographic order.
    pub lambda: [f64; 6],
    /// γ^μγ^νγ^ρ for μ < ν < ρ, in lexicographic order.
    pub kappa: [f64; 4],
}

fn hermitian_products(degree: usize) -> Vec<ComplexMatrix4> {
    let b = gamma_basis();
    let idx: Vec<usize> = (0..4).collect();
    let mut out = Vec::new();
    let subsets: Vec<Vec<usize>> = match degree {
        1 => idx.iter().map(|&i| vec![i]).collect(),
        2 => (0..4).flat_map(|a| (a + 1..4).map(move |b| vec![a, b])).collect(),
        3 => (0..4).flat_map(|a| (a + 1..4).flat_map(move |b| (b + 1..4).map(move |c| vec![a, b, c]))).collect(),
        _ => Vec::new(),
    };
    for s in subsets {
        let m = b.product(&s);
        let herm = (m.adjoint() - m).iter().all(|z| z.norm() < 1e-14);
        out.push(if herm { m } else { m * Complex64::new(0.0, 1.0) });
    }
    out
}

impl HamiltonianSpec {
    pub fn matrix(&self) -> ComplexMatrix4 {
        let mut h = ComplexMatrix4::identity() * Complex64::new(self.f, 0.0);
        for (coefs, deg) in [(&self.eta[..], 1), (&self.lambda[..], 2), (&self.kappa[..], 3)] {
            for (c, m) in coefs.iter().zip(hermitian_products(deg)) {
                h += m * Complex64::new(*c, 0.0);
            }
        }
        h
    }

    pub fn degrees(&self) -> BTreeSet<u8> {
        let mut d = BTreeSet::new();
        if self.f != 0.0 {
            d.insert(0);
        }
        for (coefs, deg) in [(&self.eta[..], 1u8), (&self.lambda[..], 2), (&self.kappa[..], 3)] {
            if coefs.iter().any(|c| *c != 0.0) {
                d.insert(deg);
            }
        }
        d
    }

    /// Random coefficients in `[−1, 1]` for the listed degrees only.
    pub fn random<R: Rng>(rng: &mut R, degrees: &[u8]) -> Self {
        let mut h = HamiltonianSpec::default();
        let mut draw = |on: bool| if on { rng.gen_range(-1.0..=1.0) } else { 0.0 };
        h.f = draw(degrees.contains(&0));
        for c in &mut h.eta {
            *c = draw(degrees.contains(&1));
        }
        for c in &mut h.lambda {
            *c = draw(degrees.contains(&2));
        }
        for c in &mut h.kappa {
            *c = draw(degrees.contains(&3));
        }
        h
    }

    /// Whether evolution preserves the form of `x` up to a phase.
    pub fn preserves(&self, x: XTag) -> bool {
        let allowed: &[u8] = match x {
            XTag::C5 => &[0, 1, 2],
            XTag::C => &[0, 2, 3],
        };
        self.degrees().iter().all(|d| allowed.contains(d))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvolutionReport {
    pub x: XTag,
    pub t: f64,
    /// `‖UᵀXU − sX‖/‖X‖` for the best scalar s.
    pub scalar_residual: f64,
    pub modulus: f64,
    pub theta: f64,
    pub theta_predicted: f64,
    /// Principal-branch distance between measured and predicted angle.
    pub theta_error: f64,
    pub expected_preserved: bool,
}

/// `U = exp(−iHt)`; tests `UᵀXU = e^{iθ}X` with θ predicted as −2ft.
pub fn evolve_and_check_bilinear(h: &HamiltonianSpec, t: f64, x: XTag) -> Result<EvolutionReport> {
    let hm = h.matrix();
    if (hm.adjoint() - hm).iter().any(|z| z.norm() > 1e-12) {
        return Err(Error::InvalidArgument("Hamiltonian is not Hermitian".into()));
    }
    let u = expm(&(hm * Complex64::new(0.0, -t)));
    let xm = gamma_basis().sandwich(x);
    let (s, scalar_residual) = scalar_multiple_fit(&(u.transpose() * xm * u), xm);
    let theta = s.arg();
    let theta_predicted = -2.0 * h.f * t;
    Ok(EvolutionReport {
        x,
        t,
        scalar_residual,
        modulus: s.norm(),
        theta,
        theta_predicted,
        theta_error: angle_distance(theta, theta_predicted),
        expected_preserved: h.preserves(x),
    })
}

pub fn angle_distance(a: f64, b: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let d = (a - b).rem_euclid(tau);
    d.min(tau - d)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub det: Complex64,
    pub n_descriptors: usize,
    pub n_states: usize,
    /// Largest relative gap between `f(ψ)` and the rebuilt `f'(ψ')` with
    /// `X' = s⁻ᵀXs⁻¹` and `ψ' = s^{⊗n}ψ`.
    pub rebuilt_deviation: f64,
    /// Same comparison using the printed form `sXs⁻¹`.
    pub printed_form_deviation: f64,
    /// Largest relative gap between `f(ψ')` with unchanged X and
    /// `det(s)^{n·d/4} f(ψ)`; only meaningful for scalar multiples of I.
    pub scalar_power_deviation: Option<f64>,
}

fn invert(s: &ComplexMatrix4) -> Result<ComplexMatrix4> {
    let det = s.determinant();
    if det.norm() < 1e-12 {
        return Err(Error::InvalidArgument("singular similarity matrix".into()));
    }
    s.try_inverse().ok_or_else(|| Error::InvalidArgument("singular similarity matrix".into()))
}

/// Compares catalog values before and after moving to the similar gamma
/// representation `sγs⁻¹`.
pub fn similarity_covariance_check(
    s: &ComplexMatrix4,
    descs: &[InvariantDescriptor],
    n_states: usize,
    seed: u64,
) -> Result<SimilarityReport> {
    let inv = invert(s)?;
    let det = s.determinant();
    let b = gamma_basis();
    let rebuilt = |x: XTag| inv.transpose() * b.sandwich(x) * inv;
    let printed = |x: XTag| s * b.sandwich(x) * inv;
    let standard = |x: XTag| *b.sandwich(x);
    let is_scalar = {
        let c = s[(0, 0)];
        (s - ComplexMatrix4::identity() * c).iter().all(|z| z.norm() < 1e-14)
    };
    let mut dev_rebuilt: f64 = 0.0;
    let mut dev_printed: f64 = 0.0;
    let mut dev_scalar: f64 = 0.0;
    for d in descs {
        let states = random_states(d.n_parties, n_states, seed)?;
        let power = (d.n_parties * d.degree) as f64 / 4.0;
        let factor = det.powf(power);
        for st in &states {
            let moved = st.apply_everywhere(s);
            let f0 = evaluate_with_matrices(d, st, &standard)?;
            let scale = f0.norm().max(EPS);
            dev_rebuilt = dev_rebuilt.max((evaluate_with_matrices(d, &moved, &rebuilt)? - f0).norm() / scale);
            dev_printed = dev_printed.max((evaluate_with_matrices(d, &moved, &printed)? - f0).norm() / scale);
            if is_scalar {
                let f1 = evaluate_with_matrices(d, &moved, &standard)?;
                dev_scalar = dev_scalar.max((f1 - f0 * factor).norm() / (f0 * factor).norm().max(EPS));
            }
        }
    }
    Ok(SimilarityReport {
        det,
        n_descriptors: descs.len(),
        n_states,
        rebuilt_deviation: dev_rebuilt,
        printed_form_deviation: dev_printed,
        scalar_power_deviation: is_scalar.then_some(dev_scalar),
    })
}

/// Deviation of a transformed-representation invariant under the
/// transformed Lorentz action `s S(Λ) s⁻¹`, using sandwich matrices `xs`.
pub fn similar_representation_lorentz_deviation(
    s: &ComplexMatrix4,
    use_printed_form: bool,
    desc: &InvariantDescriptor,
    n_trials: usize,
    seed: u64,
) -> Result<f64> {
    let inv = invert(s)?;
    let b = gamma_basis();
    let xs = |x: XTag| if use_printed_form { s * b.sandwich(x) * inv } else { inv.transpose() * b.sandwich(x) * inv };
    let states = random_states(desc.n_parties, n_trials, seed)?;
    let mut rng = stream_rng(seed, streams::SIMILARITY);
    let mut worst: f64 = 0.0;
    for st in &states {
        let l = sample_group_element_from(&mut rng, GroupId::LorentzProper, DEFAULT_SCALE)?;
        let lt = s * l * inv;
        let f0 = evaluate_with_matrices(desc, st, &xs)?;
        let f1 = evaluate_with_matrices(desc, &st.apply_local(0, &lt)?, &xs)?;
        worst = worst.max((f1 - f0).norm() / f0.norm().max(EPS));
    }
    Ok(worst)
}

/// Random element of SL(4,ℂ) used by the similarity checks.
pub fn random_sl4(seed: u64) -> Result<ComplexMatrix4> {
    let mut rng = stream_rng(seed, streams::SIMILARITY);
    sample_group_element_from(&mut rng, GroupId::Sl4, DEFAULT_SCALE)
}
