//! Weyl-sector reductions: spinor polynomials on states of definite chirality
//! compared with qubit tangles evaluated on the raw index-0/1 sub-tensor.

use itertools::Itertools;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::{builtin_catalog, parity_class, split_three_spinor_name, Family};
use crate::contraction::{CompiledDescriptor, InvariantDescriptor};
use crate::error::Result;
use crate::oracles::{four_qubit_invariants, move_party_last, n_tangle, tangle_224, three_tangle, QubitState};
use crate::states::{embed_weyl, random_qubit_coeffs, weyl_subtensor, Chirality, MultiSpinorState};

/// Printed reduction of a four-spinor degree-4 descriptor as
/// `scale · (h2·H² + l·L + m·M)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HlmCombination {
    pub scale: f64,
    pub h2: f64,
    pub l: f64,
    pub m: f64,
}

impl HlmCombination {
    pub fn eval(&self, h: Complex64, l: Complex64, m: Complex64) -> Complex64 {
        (h * h * self.h2 + l * self.l + m * self.m) * self.scale
    }
}

/// Claimed reduction for a `T_*` or `Y_*` letter.
pub fn ty_reduction(letter: char) -> Option<HlmCombination> {
    let c = |scale, h2, l, m| Some(HlmCombination { scale, h2, l, m });
    match letter {
        'a' => c(512.0, 1.0, -2.0, -4.0),
        'c' => c(512.0, -1.0, -4.0, -2.0),
        'f' => c(512.0, 1.0, -2.0, 2.0),
        'b' | 'e' => c(1024.0, 0.0, -1.0, -2.0),
        'd' | 'h' => c(1024.0, 0.0, 2.0, 1.0),
        'g' | 'i' => c(1024.0, 0.0, -1.0, 1.0),
        'j' | 'k' | 'l' | 'm' => c(512.0, 1.0, 0.0, 0.0),
        _ => None,
    }
}

/// Claimed factor of a four-spinor degree-2 descriptor relative to H.
pub const CLAIMED_H_FACTOR: f64 = 16.0;
pub const CLAIMED_TAU_FACTOR: f64 = 128.0;
pub const CLAIMED_V_FACTOR: f64 = 64.0;

#[derive(Clone, Debug, Serialize)]
pub struct ReductionCheck {
    pub descriptor: String,
    pub tags: String,
    pub target: String,
    /// Claimed |value / target|; zero when the descriptor should vanish.
    pub claimed_factor: f64,
    /// Mean of value / target across states.
    pub ratio: Complex64,
    /// Largest relative distance of a single ratio from ±claimed, or the
    /// largest |value| when the claim is zero.
    pub deviation: f64,
    /// Real sign shared by every state, if any.
    pub sign: Option<i8>,
    pub n_states: usize,
}

impl ReductionCheck {
    pub fn pass(&self, tol: f64) -> bool {
        if self.claimed_factor == 0.0 {
            self.deviation < tol
        } else {
            self.sign.is_some() && self.deviation < tol
        }
    }
}

pub fn tags_label(tags: &[Chirality]) -> String {
    tags.iter()
        .map(|t| match t {
            Chirality::Left => 'L',
            Chirality::Right => 'R',
            Chirality::None => '-',
        })
        .collect()
}

/// All L/R assignments for `n` parties, in LL…L to RR…R order.
pub fn chiral_tag_sets(n: usize) -> Vec<Vec<Chirality>> {
    (0..n).map(|_| [Chirality::Left, Chirality::Right]).multi_cartesian_product().collect()
}

fn compare(
    desc: &InvariantDescriptor,
    tags: &[Chirality],
    target: &str,
    claimed: f64,
    states: &[MultiSpinorState],
    oracle: &(dyn Fn(&MultiSpinorState) -> Result<Complex64> + Sync),
) -> Result<ReductionCheck> {
    let compiled = CompiledDescriptor::new(desc);
    let pairs: Vec<(Complex64, Complex64)> =
        states.iter().map(|s| Ok((compiled.evaluate(s)?, oracle(s)?))).collect::<Result<_>>()?;
    let n = pairs.len() as f64;
    if claimed == 0.0 {
        let worst = pairs.iter().map(|(v, _)| v.norm()).fold(0.0, f64::max);
        return Ok(ReductionCheck {
            descriptor: desc.label(),
            tags: tags_label(tags),
            target: target.into(),
            claimed_factor: 0.0,
            ratio: Complex64::new(0.0, 0.0),
            deviation: worst,
            sign: None,
            n_states: pairs.len(),
        });
    }
    let ratios: Vec<Complex64> = pairs.iter().map(|(v, t)| v / t).collect();
    let mean = ratios.iter().sum::<Complex64>() / n;
    let sign = if (mean - claimed).norm() < (mean + claimed).norm() { 1i8 } else { -1 };
    let want = claimed * sign as f64;
    let deviation = ratios.iter().map(|r| (r - want).norm() / claimed).fold(0.0, f64::max);
    let consistent = ratios.iter().all(|r| r.re.signum() as i8 == sign && r.im.abs() < 0.5 * r.re.abs());
    Ok(ReductionCheck {
        descriptor: desc.label(),
        tags: tags_label(tags),
        target: target.into(),
        claimed_factor: claimed,
        ratio: mean,
        deviation,
        sign: consistent.then_some(sign),
        n_states: pairs.len(),
    })
}

fn embedded_states(tags: &[Chirality], n_states: usize, seed: u64) -> Result<Vec<MultiSpinorState>> {
    let dim: usize = tags.iter().map(|t| if *t == Chirality::None { 4 } else { 2 }).product();
    random_qubit_coeffs(dim.trailing_zeros() as usize, n_states, seed)
        .iter()
        .map(|c| embed_weyl(c, tags))
        .collect()
}

fn qubits(state: &MultiSpinorState, tags: &[Chirality]) -> Result<QubitState> {
    QubitState::new(tags.len(), weyl_subtensor(state, tags))
}

/// Three-spinor catalog on three Weyl particles: a/b/c patterns against
/// 128·τ, d patterns against zero.
pub fn three_spinor_weyl(n_states: usize, seed: u64) -> Result<Vec<ReductionCheck>> {
    let catalog = builtin_catalog(Family::ThreeSpinorDeg4)?;
    let jobs: Vec<(InvariantDescriptor, Vec<Chirality>)> = chiral_tag_sets(3)
        .into_iter()
        .flat_map(|t| catalog.descriptors.iter().map(move |d| (d.clone(), t.clone())))
        .collect();
    jobs.par_iter()
        .map(|(d, tags)| {
            let states = embedded_states(tags, n_states, seed)?;
            let (_, letter) = split_three_spinor_name(&d.label())?;
            let claimed = if letter == 'd' { 0.0 } else { CLAIMED_TAU_FACTOR };
            compare(d, tags, "tau3", claimed, &states, &|s| three_tangle(&qubits(s, tags)?))
        })
        .collect()
}

/// d-pattern descriptors with one unconstrained party: those even under P in
/// that party's lab against 64·V, the rest against zero.
pub fn two_weyl_d_patterns(n_states: usize, seed: u64) -> Result<Vec<ReductionCheck>> {
    let catalog = builtin_catalog(Family::ThreeSpinorDeg4)?;
    let mut jobs = Vec::new();
    for free in 0..3 {
        for pair in chiral_tag_sets(2) {
            let mut tags = pair.clone();
            tags.insert(free, Chirality::None);
            for d in catalog.descriptors.iter().filter(|d| d.label().ends_with('d')) {
                jobs.push((d.clone(), tags.clone(), free));
            }
        }
    }
    jobs.par_iter()
        .map(|(d, tags, free)| {
            let states = embedded_states(tags, n_states, seed)?;
            let qualifies = parity_class(&d.label())?[*free] == 1;
            let claimed = if qualifies { CLAIMED_V_FACTOR } else { 0.0 };
            compare(d, tags, "V", claimed, &states, &|s| tangle_224(&move_party_last(s, *free)?))
        })
        .collect()
}

/// Four-spinor degree-2 descriptors against 16·H.
pub fn four_spinor_h(n_states: usize, seed: u64) -> Result<Vec<ReductionCheck>> {
    four_spinor_family(Family::FourSpinorDeg2, n_states, seed, &|_| {
        Some(HlmCombination { scale: CLAIMED_H_FACTOR, h2: 0.0, l: 0.0, m: 0.0 })
    })
}

/// T and Y descriptors against their printed H²/L/M combinations.
pub fn four_spinor_ty(n_states: usize, seed: u64) -> Result<Vec<ReductionCheck>> {
    let mut out = four_spinor_family(Family::FourSpinorDeg4T, n_states, seed, &|l| ty_reduction(l))?;
    out.extend(four_spinor_family(Family::FourSpinorDeg4Y, n_states, seed, &|l| ty_reduction(l))?);
    Ok(out)
}

fn four_spinor_family(
    family: Family,
    n_states: usize,
    seed: u64,
    claim: &(dyn Fn(char) -> Option<HlmCombination> + Sync),
) -> Result<Vec<ReductionCheck>> {
    let catalog = builtin_catalog(family)?;
    let jobs: Vec<(InvariantDescriptor, Vec<Chirality>)> = chiral_tag_sets(4)
        .into_iter()
        .flat_map(|t| catalog.descriptors.iter().map(move |d| (d.clone(), t.clone())))
        .collect();
    jobs.par_iter()
        .map(|(d, tags)| {
            let states = embedded_states(tags, n_states, seed)?;
            let letter = d.label().chars().last().unwrap_or(' ');
            let combo = claim(letter).ok_or_else(|| crate::Error::UnknownName(d.label()))?;
            if family == Family::FourSpinorDeg2 {
                return compare(d, tags, "H", combo.scale, &states, &|s| {
                    Ok(four_qubit_invariants(&qubits(s, tags)?)?.0)
                });
            }
            let unit = HlmCombination { scale: 1.0, ..combo };
            let target = format!("{}*({}H^2 {:+}L {:+}M)", combo.scale, combo.h2, combo.l, combo.m);
            compare(d, tags, &target, combo.scale, &states, &|s| {
                let (h, l, m) = four_qubit_invariants(&qubits(s, tags)?)?;
                Ok(unit.eval(h, l, m))
            })
        })
        .collect()
}

/// Degree-2 descriptors on `n` (even) Weyl particles against 2ⁿ·(n-tangle).
/// `tag_sets` limits the chirality assignments; `None` runs all 2ⁿ.
pub fn even_n_tangle(n: usize, tag_sets: Option<Vec<Vec<Chirality>>>, n_states: usize, seed: u64) -> Result<Vec<ReductionCheck>> {
    let catalog = builtin_catalog(Family::EvenNDeg2(n))?;
    let sets = tag_sets.unwrap_or_else(|| chiral_tag_sets(n));
    let jobs: Vec<(InvariantDescriptor, Vec<Chirality>)> = sets
        .into_iter()
        .flat_map(|t| catalog.descriptors.iter().map(move |d| (d.clone(), t.clone())))
        .collect();
    let claimed = (1u64 << n) as f64;
    jobs.par_iter()
        .map(|(d, tags)| {
            let states = embedded_states(tags, n_states, seed)?;
            compare(d, tags, "n_tangle", claimed, &states, &|s| n_tangle(&qubits(s, tags)?))
        })
        .collect()
}

/// Measured |ratio| for each check, rounded to the nearest integer.
pub fn measured_factors(checks: &[ReductionCheck]) -> Vec<i64> {
    checks.iter().map(|c| c.ratio.norm().round() as i64).unique().sorted().collect()
}
