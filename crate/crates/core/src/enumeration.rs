//! Pairing patterns up to copy relabeling and their X-tag assignments.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::clifford::XTag;
use crate::contraction::{InvariantDescriptor, Pair, SlotRef};
use crate::error::{Error, Result};

/// A perfect matching on copies, as sorted `(a, b)` pairs with `a < b`.
pub type Matching = Vec<(usize, usize)>;

/// All perfect matchings on `d` copies, in lexicographic order.
pub fn perfect_matchings(d: usize) -> Vec<Matching> {
    fn rec(rest: &[usize], acc: &mut Matching, out: &mut Vec<Matching>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        let a = rest[0];
        for k in 1..rest.len() {
            let b = rest[k];
            let remaining: Vec<usize> = rest[1..].iter().copied().filter(|&x| x != b).collect();
            acc.push((a, b));
            rec(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    let copies: Vec<usize> = (0..d).collect();
    rec(&copies, &mut Vec::new(), &mut out);
    out
}

fn permute_matching(m: &Matching, perm: &[usize]) -> Matching {
    let mut v: Matching = m
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (perm[a], perm[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    v.sort_unstable();
    v
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairingPattern {
    pub n_parties: usize,
    pub degree: usize,
    /// One matching per party.
    pub matchings: Vec<Matching>,
}

impl PairingPattern {
    pub fn new(n_parties: usize, degree: usize, matchings: Vec<Matching>) -> Result<Self> {
        if degree == 0 || !degree.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("degree must be even and positive, got {degree}")));
        }
        if matchings.len() != n_parties {
            return Err(Error::InvalidArgument("one matching per party required".into()));
        }
        let mut ms = Vec::with_capacity(n_parties);
        for m in matchings {
            let mut m: Matching = m.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
            m.sort_unstable();
            let covered: BTreeSet<usize> = m.iter().flat_map(|&(a, b)| [a, b]).collect();
            if m.len() * 2 != degree || covered.len() != degree || covered.iter().any(|&c| c >= degree) {
                return Err(Error::InvalidArgument(format!("{m:?} is not a perfect matching on {degree} copies")));
            }
            ms.push(m);
        }
        Ok(Self { n_parties, degree, matchings: ms })
    }

    /// Pattern underlying a descriptor (orientation and tags dropped).
    pub fn of_descriptor(desc: &InvariantDescriptor) -> Result<Self> {
        let mut per_party = vec![Vec::new(); desc.n_parties];
        for p in &desc.pairs {
            per_party[p.from.party].push(p.copies());
        }
        Self::new(desc.n_parties, desc.degree, per_party)
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            n_parties: self.n_parties,
            degree: self.degree,
            matchings: self.matchings.iter().map(|m| permute_matching(m, perm)).collect(),
        }
    }

    /// Lexicographic minimum over all copy relabelings.
    pub fn canonical(&self) -> Self {
        (0..self.degree)
            .permutations(self.degree)
            .map(|perm| self.permuted(&perm))
            .min()
            .expect("at least one permutation")
    }

    /// True when the copy graph is connected.
    pub fn is_connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.degree).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for m in &self.matchings {
            for &(a, b) in m {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let root = find(&mut parent, 0);
        (0..self.degree).all(|c| find(&mut parent, c) == root)
    }

    /// Copy permutations mapping every party's matching to itself.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        (0..self.degree)
            .permutations(self.degree)
            .filter(|perm| self.permuted(perm) == *self)
            .collect()
    }

    /// Pairs in fixed order: party-major, matching order within a party.
    /// Each pair runs from the larger copy to the smaller one.
    pub fn pair_slots(&self) -> Vec<(SlotRef, SlotRef)> {
        self.matchings
            .iter()
            .enumerate()
            .flat_map(|(party, m)| {
                m.iter().map(move |&(a, b)| (SlotRef { copy: b, party }, SlotRef { copy: a, party }))
            })
            .collect()
    }

    pub fn n_pairs(&self) -> usize {
        self.n_parties * self.degree / 2
    }

    pub fn descriptor(&self, tags: &[XTag], name: Option<String>) -> Result<InvariantDescriptor> {
        if tags.len() != self.n_pairs() {
            return Err(Error::InvalidArgument("one tag per pair required".into()));
        }
        let pairs = self.pair_slots().into_iter().zip(tags).map(|((from, to), &x)| Pair { from, to, x }).collect();
        InvariantDescriptor::new(self.n_parties, self.degree, pairs, name)
    }
}

/// Pattern with its connectivity flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternInfo {
    pub pattern: PairingPattern,
    pub connected: bool,
}

/// Patterns up to simultaneous copy relabeling, sorted by canonical form.
pub fn enumerate_pairings(n_parties: usize, degree: usize, connected_only: bool) -> Result<Vec<PatternInfo>> {
    if degree == 0 || !degree.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("degree must be even and positive, got {degree}")));
    }
    if n_parties == 0 {
        return Err(Error::InvalidArgument("at least one party required".into()));
    }
    let all = perfect_matchings(degree);
    let mut seen = BTreeSet::new();
    for choice in (0..n_parties).map(|_| 0..all.len()).multi_cartesian_product() {
        let p = PairingPattern { n_parties, degree, matchings: choice.iter().map(|&i| all[i].clone()).collect() };
        seen.insert(p.canonical());
    }
    Ok(seen
        .into_iter()
        .map(|pattern| {
            let connected = pattern.is_connected();
            PatternInfo { pattern, connected }
        })
        .filter(|info| info.connected || !connected_only)
        .collect())
}

/// Equivalence used to count X-tag assignments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum XEquivalence {
    /// For degree 4: exchanging, at every party at once, the tag on the pair
    /// touching copy 0 with the tag on the other pair. Identity for degree 2.
    FirstPairExchange,
    /// The computed pattern automorphism group acting on pairs.
    Automorphism,
}

/// One X-assignment class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XClass {
    pub descriptor: InvariantDescriptor,
    pub class_size: usize,
    /// True when some automorphism fixes the assignment with an odd number of
    /// orientation reversals, forcing the polynomial to vanish.
    pub identically_zero: bool,
}

/// Image of pair `k` under a copy permutation: target pair index and whether
/// its orientation is reversed.
fn pair_action(pattern: &PairingPattern, perm: &[usize]) -> Vec<(usize, bool)> {
    let slots = pattern.pair_slots();
    let lookup: BTreeMap<(usize, usize, usize), usize> = slots
        .iter()
        .enumerate()
        .map(|(k, (f, t))| ((f.party, f.copy, t.copy), k))
        .collect();
    slots
        .iter()
        .map(|(f, t)| {
            let (pf, pt) = (perm[f.copy], perm[t.copy]);
            if let Some(&k) = lookup.get(&(f.party, pf, pt)) {
                (k, false)
            } else {
                (lookup[&(f.party, pt, pf)], true)
            }
        })
        .collect()
}

fn tags_from_bits(bits: u64, n: usize) -> Vec<XTag> {
    (0..n).map(|k| if bits >> (n - 1 - k) & 1 == 1 { XTag::C5 } else { XTag::C }).collect()
}

fn bits_from_tags(tags: &[XTag]) -> u64 {
    tags.iter().fold(0, |acc, &t| acc * 2 + u64::from(t == XTag::C5))
}

/// Pair-index permutations (with orientation flips) generating an equivalence.
fn equivalence_actions(pattern: &PairingPattern, eq: XEquivalence) -> Result<Vec<Vec<(usize, bool)>>> {
    match eq {
        XEquivalence::Automorphism => Ok(pattern.automorphisms().iter().map(|p| pair_action(pattern, p)).collect()),
        XEquivalence::FirstPairExchange => {
            let n_pairs = pattern.n_pairs();
            let identity: Vec<(usize, bool)> = (0..n_pairs).map(|k| (k, false)).collect();
            match pattern.degree {
                2 => Ok(vec![identity]),
                4 => {
                    let mut swap = identity.clone();
                    for party in 0..pattern.n_parties {
                        let (k0, k1) = (2 * party, 2 * party + 1);
                        swap[k0] = (k1, false);
                        swap[k1] = (k0, false);
                    }
                    Ok(vec![identity, swap])
                }
                d => Err(Error::Unsupported(format!("first-pair exchange is defined for degree 2 and 4, not {d}"))),
            }
        }
    }
}

fn apply_action(bits: u64, action: &[(usize, bool)], n: usize) -> u64 {
    let tags = tags_from_bits(bits, n);
    let mut out = tags.clone();
    for (k, &(target, _)) in action.iter().enumerate() {
        out[target] = tags[k];
    }
    bits_from_tags(&out)
}

/// Classes of tag assignments, each represented by its lexicographically
/// smallest member (C before C5), in increasing order.
pub fn x_assignment_classes(pattern: &PairingPattern, eq: XEquivalence) -> Result<Vec<XClass>> {
    let n = pattern.n_pairs();
    if n > 24 {
        return Err(Error::Unsupported(format!("{n} pairs is too many to enumerate")));
    }
    let actions = equivalence_actions(pattern, eq)?;
    let autos: Vec<Vec<(usize, bool)>> =
        pattern.automorphisms().iter().map(|p| pair_action(pattern, p)).collect();
    let mut out = Vec::new();
    for bits in 0..1u64 << n {
        let orbit: BTreeSet<u64> = orbit_of(bits, &actions, n);
        if *orbit.iter().next().expect("nonempty") != bits {
            continue;
        }
        let identically_zero = autos.iter().any(|a| {
            apply_action(bits, a, n) == bits && a.iter().filter(|(_, flip)| *flip).count() % 2 == 1
        });
        out.push(XClass {
            descriptor: pattern.descriptor(&tags_from_bits(bits, n), None)?,
            class_size: orbit.len(),
            identically_zero,
        });
    }
    Ok(out)
}

fn orbit_of(bits: u64, actions: &[Vec<(usize, bool)>], n: usize) -> BTreeSet<u64> {
    let mut orbit = BTreeSet::from([bits]);
    let mut frontier = vec![bits];
    while let Some(b) = frontier.pop() {
        for a in actions {
            let img = apply_action(b, a, n);
            if orbit.insert(img) {
                frontier.push(img);
            }
        }
    }
    orbit
}

/// Sign relating the polynomial of `tags` to that of its image under a copy
/// permutation, if the permutation is an automorphism.
pub fn automorphism_sign(pattern: &PairingPattern, perm: &[usize]) -> Option<f64> {
    if pattern.permuted(perm) != *pattern {
        return None;
    }
    let flips = pair_action(pattern, perm).iter().filter(|(_, f)| *f).count();
    Some(if flips % 2 == 0 { 1.0 } else { -1.0 })
}

/// Image of a descriptor's tag assignment under an automorphism.
pub fn apply_automorphism(pattern: &PairingPattern, tags: &[XTag], perm: &[usize]) -> Vec<XTag> {
    let action = pair_action(pattern, perm);
    let mut out = tags.to_vec();
    for (k, &(target, _)) in action.iter().enumerate() {
        out[target] = tags[k];
    }
    out
}

/// Tag assignments of a pattern counted with the first-pair exchange
/// (the counting behind 36/136/528); names are `P{pattern}X{class}`.
pub fn enumerate_x_assignments(pattern: &PairingPattern) -> Result<Vec<InvariantDescriptor>> {
    Ok(x_assignment_classes(pattern, XEquivalence::FirstPairExchange)?
        .into_iter()
        .map(|c| c.descriptor)
        .collect())
}

pub fn total_count(n_parties: usize, degree: usize) -> Result<usize> {
    total_count_with(n_parties, degree, XEquivalence::FirstPairExchange)
}

pub fn total_count_with(n_parties: usize, degree: usize, eq: XEquivalence) -> Result<usize> {
    enumerate_pairings(n_parties, degree, true)?
        .iter()
        .map(|p| x_assignment_classes(&p.pattern, eq).map(|v| v.len()))
        .sum()
}

/// `(2^{2m} − 2^m)/2 + 2^m`.
pub fn closed_form_count(m: u32) -> u64 {
    ((1u64 << (2 * m)) - (1u64 << m)) / 2 + (1u64 << m)
}

/// Copy permutation taking `from` onto `to`, if the patterns are equivalent.
pub fn relabeling_between(from: &PairingPattern, to: &PairingPattern) -> Option<Vec<usize>> {
    if from.n_parties != to.n_parties || from.degree != to.degree {
        return None;
    }
    (0..from.degree).permutations(from.degree).find(|perm| from.permuted(perm) == *to)
}
