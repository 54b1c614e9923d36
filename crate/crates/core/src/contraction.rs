//! Sandwich-contraction descriptors and their evaluation.
//!
//! A descriptor pairs the index slots of `d` copies of the state tensor party
//! by party and places `C` or `Cγ⁵` on each pair. Pair orientation matters:
//! the `from` slot is the row index of the sandwich matrix.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{gamma_basis, ComplexMatrix4, XTag};
use crate::error::{Error, Result};
use crate::states::MultiSpinorState;

/// One index slot: which tensor copy and which party's index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct SlotRef {
    pub copy: usize,
    pub party: usize,
}

impl From<[usize; 2]> for SlotRef {
    fn from(v: [usize; 2]) -> Self {
        SlotRef { copy: v[0], party: v[1] }
    }
}

impl From<SlotRef> for [usize; 2] {
    fn from(s: SlotRef) -> Self {
        [s.copy, s.party]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub from: SlotRef,
    pub to: SlotRef,
    pub x: XTag,
}

impl Pair {
    pub fn reversed(self) -> Pair {
        Pair { from: self.to, to: self.from, x: self.x }
    }

    /// Copies joined by this pair, smaller first.
    pub fn copies(&self) -> (usize, usize) {
        let (a, b) = (self.from.copy, self.to.copy);
        (a.min(b), a.max(b))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantDescriptor {
    pub n_parties: usize,
    pub degree: usize,
    pub pairs: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl InvariantDescriptor {
    pub fn new(n_parties: usize, degree: usize, pairs: Vec<Pair>, name: Option<String>) -> Result<Self> {
        let d = Self { n_parties, degree, pairs, name };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.n_parties == 0 || self.degree == 0 || !self.degree.is_multiple_of(2) {
            return bad(format!("need n ≥ 1 and even degree, got n={} d={}", self.n_parties, self.degree));
        }
        if self.pairs.len() != self.degree * self.n_parties / 2 {
            return bad(format!(
                "{} pairs given, {} expected",
                self.pairs.len(),
                self.degree * self.n_parties / 2
            ));
        }
        let mut seen = vec![false; self.degree * self.n_parties];
        for p in &self.pairs {
            for s in [p.from, p.to] {
                if s.copy >= self.degree || s.party >= self.n_parties {
                    return bad(format!("slot {s:?} out of range"));
                }
                let k = s.copy * self.n_parties + s.party;
                if seen[k] {
                    return bad(format!("slot {s:?} used twice"));
                }
                seen[k] = true;
            }
            if p.from.party != p.to.party {
                return bad(format!("pair {p:?} joins different parties"));
            }
            if p.from.copy == p.to.copy {
                return bad(format!("pair {p:?} joins a copy to itself"));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| "<unnamed>".into())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Same descriptor with pair `i` reversed.
    pub fn with_reversed_pair(&self, i: usize) -> Self {
        let mut d = self.clone();
        d.pairs[i] = d.pairs[i].reversed();
        d
    }

    /// Tags on the pairs of one party, in pair order.
    pub fn tags_at(&self, party: usize) -> Vec<XTag> {
        self.pairs.iter().filter(|p| p.from.party == party).map(|p| p.x).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }
}

/// Nonzero entries `(row, col, value)` of a matrix.
fn nonzero_entries(m: &ComplexMatrix4) -> Vec<(usize, usize, Complex64)> {
    let mut v = Vec::new();
    for r in 0..4 {
        for c in 0..4 {
            if m[(r, c)] != Complex64::new(0.0, 0.0) {
                v.push((r, c, m[(r, c)]));
            }
        }
    }
    v
}

struct PairPlan {
    from_copy: usize,
    to_copy: usize,
    from_stride: usize,
    to_stride: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

fn plan(desc: &InvariantDescriptor, matrices: &dyn Fn(XTag) -> ComplexMatrix4) -> Vec<PairPlan> {
    let n = desc.n_parties;
    let stride = |party: usize| 4usize.pow((n - 1 - party) as u32);
    desc.pairs
        .iter()
        .map(|p| PairPlan {
            from_copy: p.from.copy,
            to_copy: p.to.copy,
            from_stride: stride(p.from.party),
            to_stride: stride(p.to.party),
            entries: nonzero_entries(&matrices(p.x)),
        })
        .collect()
}

/// Walks every selection of one nonzero entry per pair, calling `leaf` with
/// the accumulated coefficient and the flat index of each copy.
fn walk(plans: &[PairPlan], depth: usize, coef: Complex64, flat: &mut [usize], leaf: &mut dyn FnMut(Complex64, &[usize])) {
    if depth == plans.len() {
        leaf(coef, flat);
        return;
    }
    let p = &plans[depth];
    for &(r, c, v) in &p.entries {
        flat[p.from_copy] += r * p.from_stride;
        flat[p.to_copy] += c * p.to_stride;
        walk(plans, depth + 1, coef * v, flat, leaf);
        flat[p.from_copy] -= r * p.from_stride;
        flat[p.to_copy] -= c * p.to_stride;
    }
}

fn standard_matrices(x: XTag) -> ComplexMatrix4 {
    *gamma_basis().sandwich(x)
}

/// A descriptor expanded into its monomial table
/// `Σ_t coef_t · Π_c ψ[idx_{t,c}]`, reusable across states.
#[derive(Clone, Debug)]
pub struct CompiledDescriptor {
    pub n_parties: usize,
    pub degree: usize,
    coefs: Vec<Complex64>,
    indices: Vec<u32>,
}

impl CompiledDescriptor {
    pub fn new(desc: &InvariantDescriptor) -> Self {
        Self::with_matrices(desc, &standard_matrices)
    }

    /// Compiles with arbitrary matrices in place of `C` and `Cγ⁵`.
    pub fn with_matrices(desc: &InvariantDescriptor, matrices: &dyn Fn(XTag) -> ComplexMatrix4) -> Self {
        let plans = plan(desc, matrices);
        let mut coefs = Vec::new();
        let mut indices = Vec::new();
        let mut flat = vec![0usize; desc.degree];
        walk(&plans, 0, Complex64::new(1.0, 0.0), &mut flat, &mut |c, f| {
            coefs.push(c);
            indices.extend(f.iter().map(|&i| i as u32));
        });
        Self { n_parties: desc.n_parties, degree: desc.degree, coefs, indices }
    }

    pub fn n_terms(&self) -> usize {
        self.coefs.len()
    }

    pub fn evaluate(&self, state: &MultiSpinorState) -> Result<Complex64> {
        if state.n_parties() != self.n_parties {
            return Err(Error::PartyMismatch { descriptor: self.n_parties, state: state.n_parties() });
        }
        let psi = state.coefficients();
        let d = self.degree;
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, c) in self.coefs.iter().enumerate() {
            let mut prod = *c;
            for &i in &self.indices[t * d..(t + 1) * d] {
                prod *= psi[i as usize];
            }
            acc += prod;
        }
        Ok(acc)
    }
}

pub fn evaluate(desc: &InvariantDescriptor, state: &MultiSpinorState) -> Result<Complex64> {
    check_parties(desc, state)?;
    CompiledDescriptor::new(desc).evaluate(state)
}

/// Evaluates with arbitrary sandwich matrices without building the term table.
pub fn evaluate_with_matrices(
    desc: &InvariantDescriptor,
    state: &MultiSpinorState,
    matrices: &dyn Fn(XTag) -> ComplexMatrix4,
) -> Result<Complex64> {
    check_parties(desc, state)?;
    // Each pair's matrix acts on its `to` slot, leaving an identity pairing.
    let mut copies: Vec<MultiSpinorState> = vec![state.clone(); desc.degree];
    for p in &desc.pairs {
        let m = matrices(p.x);
        copies[p.to.copy] = copies[p.to.copy].apply_local(p.to.party, &m)?;
    }
    let plans = plan(desc, &|_| ComplexMatrix4::identity());
    let mut flat = vec![0usize; desc.degree];
    let mut acc = Complex64::new(0.0, 0.0);
    walk(&plans, 0, Complex64::new(1.0, 0.0), &mut flat, &mut |c, f| {
        acc += f.iter().zip(&copies).fold(c, |p, (&i, t)| p * t.coefficients()[i]);
    });
    Ok(acc)
}

fn check_parties(desc: &InvariantDescriptor, state: &MultiSpinorState) -> Result<()> {
    if desc.n_parties != state.n_parties() {
        return Err(Error::PartyMismatch { descriptor: desc.n_parties, state: state.n_parties() });
    }
    Ok(())
}

/// Row per descriptor, column per state.
pub fn evaluate_batch(descs: &[InvariantDescriptor], states: &[MultiSpinorState]) -> Result<Vec<Vec<Complex64>>> {
    descs
        .par_iter()
        .map(|d| {
            let compiled = CompiledDescriptor::new(d);
            states.iter().map(|s| compiled.evaluate(s)).collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Parses the index notation used for printed contractions, e.g.
/// `C^5_{ij}C_{mk}C^5_{nl}\Psi_{jkl}\Psi_{pmn}…`. Copies are numbered in
/// order of appearance of `\Psi`; tags written `X` are returned as `None`.
pub fn parse_index_notation(text: &str) -> Result<ParsedContraction> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bytes = s.as_bytes();
    let mut pos = 0;
    let mut xs: Vec<(Option<XTag>, char, char)> = Vec::new();
    let mut psis: Vec<Vec<char>> = Vec::new();
    let err = |msg: &str, at: usize| Error::Parse(format!("{msg} at offset {at} in `{s}`"));
    let read_braced = |pos: &mut usize| -> Result<Vec<char>> {
        if bytes.get(*pos) != Some(&b'{') {
            return Err(err("expected `{`", *pos));
        }
        let end = s[*pos..].find('}').ok_or_else(|| err("unclosed `{`", *pos))? + *pos;
        let inner: Vec<char> = s[*pos + 1..end].chars().collect();
        *pos = end + 1;
        Ok(inner)
    };
    while pos < bytes.len() {
        if s[pos..].starts_with("\\Psi_") {
            pos += 5;
            psis.push(read_braced(&mut pos)?);
        } else if bytes[pos] == b'C' || bytes[pos] == b'X' {
            let generic = bytes[pos] == b'X';
            pos += 1;
            let mut five = false;
            if s[pos..].starts_with("^5") {
                five = true;
                pos += 2;
            }
            if bytes.get(pos) != Some(&b'_') {
                return Err(err("expected `_`", pos));
            }
            pos += 1;
            let idx = read_braced(&mut pos)?;
            if s[pos..].starts_with("^5") {
                five = true;
                pos += 2;
            }
            if idx.len() != 2 {
                return Err(err("sandwich matrices take two indices", pos));
            }
            let tag = if generic { None } else if five { Some(XTag::C5) } else { Some(XTag::C) };
            xs.push((tag, idx[0], idx[1]));
        } else {
            return Err(err("unexpected character", pos));
        }
    }
    if psis.is_empty() {
        return Err(Error::Parse(format!("no tensor copies in `{s}`")));
    }
    let n = psis[0].len();
    if psis.iter().any(|p| p.len() != n) {
        return Err(Error::Parse(format!("copies with different party counts in `{s}`")));
    }
    let mut slot_of: BTreeMap<char, SlotRef> = BTreeMap::new();
    for (copy, letters) in psis.iter().enumerate() {
        for (party, &l) in letters.iter().enumerate() {
            if slot_of.insert(l, SlotRef { copy, party }).is_some() {
                return Err(Error::Parse(format!("index `{l}` appears in two tensor slots in `{s}`")));
            }
        }
    }
    let mut used: BTreeMap<char, usize> = BTreeMap::new();
    let mut pairs = Vec::new();
    for (tag, a, b) in xs {
        for l in [a, b] {
            *used.entry(l).or_default() += 1;
        }
        let from = *slot_of.get(&a).ok_or_else(|| Error::Parse(format!("index `{a}` not on any tensor")))?;
        let to = *slot_of.get(&b).ok_or_else(|| Error::Parse(format!("index `{b}` not on any tensor")))?;
        if from.party != to.party {
            return Err(Error::Parse(format!("`{a}{b}` joins different parties in `{s}`")));
        }
        pairs.push((from, to, tag));
    }
    if let Some((l, _)) = used.iter().find(|(_, &c)| c > 1) {
        return Err(Error::Parse(format!("index `{l}` is contracted more than once in `{s}`")));
    }
    if used.len() != slot_of.len() {
        return Err(Error::Parse(format!("some tensor indices are never contracted in `{s}`")));
    }
    Ok(ParsedContraction { n_parties: n, degree: psis.len(), pairs })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedContraction {
    pub n_parties: usize,
    pub degree: usize,
    pub pairs: Vec<(SlotRef, SlotRef, Option<XTag>)>,
}

impl ParsedContraction {
    /// Descriptor with unassigned tags set to `fill`.
    pub fn into_descriptor(self, fill: XTag, name: Option<String>) -> Result<InvariantDescriptor> {
        let pairs = self
            .pairs
            .into_iter()
            .map(|(from, to, x)| Pair { from, to, x: x.unwrap_or(fill) })
            .collect();
        InvariantDescriptor::new(self.n_parties, self.degree, pairs, name)
    }
}
