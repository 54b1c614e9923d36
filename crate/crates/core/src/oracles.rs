//! Independent evaluation paths: qubit tangles, a brute-force contraction and
//! literally transcribed monomial expansions.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::clifford::{gamma_basis, XTag};
use crate::contraction::InvariantDescriptor;
use crate::error::{Error, Result};
use crate::formula::{parse_formula, Expr};
use crate::states::MultiSpinorState;

/// Party-major `2ⁿ` qubit coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct QubitState {
    n_qubits: usize,
    coefficients: Vec<Complex64>,
}

impl QubitState {
    pub fn new(n_qubits: usize, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != 1usize << n_qubits {
            return Err(Error::InvalidArgument(format!(
                "{n_qubits} qubits need {} coefficients, got {}",
                1usize << n_qubits,
                coefficients.len()
            )));
        }
        Ok(Self { n_qubits, coefficients })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn get(&self, bits: &[usize]) -> Complex64 {
        self.coefficients[bits.iter().fold(0, |acc, &b| acc * 2 + b)]
    }

    fn require(&self, n: usize) -> Result<()> {
        if self.n_qubits != n {
            return Err(Error::InvalidArgument(format!("expected {n} qubits, got {}", self.n_qubits)));
        }
        Ok(())
    }
}

const FORMULA_TAU3: &str = include_str!("../data/formulas/tau3.tex");
const FORMULA_V_PRINTED: &str = include_str!("../data/formulas/V_printed.tex");
const FORMULA_H: &str = include_str!("../data/formulas/H.tex");
const FORMULA_L: &str = include_str!("../data/formulas/L.tex");
const FORMULA_M: &str = include_str!("../data/formulas/M.tex");
const FORMULA_TAU6: &str = include_str!("../data/formulas/tau6.tex");

/// The printed fourth minor of V reads `ψ000ψ011 − ψ000ψ010`; the minor
/// structure of the other five terms requires `ψ000ψ011 − ψ001ψ010`.
pub const V_REPAIR: (&str, &str) = ("-\\psi_{ 000 }\\psi_{  010}", "-\\psi_{ 001 }\\psi_{  010}");

fn formula(key: &'static str) -> &'static Expr {
    static CACHE: OnceLock<HashMap<&'static str, Expr>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        let v_repaired = FORMULA_V_PRINTED.replacen(V_REPAIR.0, V_REPAIR.1, 1);
        let sources: [(&'static str, String); 7] = [
            ("tau3", FORMULA_TAU3.into()),
            ("V", v_repaired),
            ("V_printed", FORMULA_V_PRINTED.into()),
            ("H", FORMULA_H.into()),
            ("L", FORMULA_L.into()),
            ("M", FORMULA_M.into()),
            ("tau6", FORMULA_TAU6.into()),
        ];
        sources
            .into_iter()
            .map(|(k, src)| (k, parse_formula(&src).unwrap_or_else(|e| panic!("bundled formula {k}: {e}"))))
            .collect()
    });
    &cache[key]
}

pub fn three_tangle(q: &QubitState) -> Result<Complex64> {
    q.require(3)?;
    Ok(formula("tau3").eval(&|i| q.get(i)))
}

/// The 2×2×4 tangle on the sub-tensor with A and B restricted to indices 0, 1.
pub fn tangle_224(psi: &MultiSpinorState) -> Result<Complex64> {
    tangle_224_with(psi, formula("V"))
}

/// The 2×2×4 tangle exactly as printed, without the index repair.
pub fn tangle_224_printed(psi: &MultiSpinorState) -> Result<Complex64> {
    tangle_224_with(psi, formula("V_printed"))
}

fn tangle_224_with(psi: &MultiSpinorState, e: &Expr) -> Result<Complex64> {
    if psi.n_parties() != 3 {
        return Err(Error::InvalidArgument("the 2×2×4 tangle needs three parties".into()));
    }
    Ok(e.eval(&|i| psi.get(i)))
}

/// Moves the unrestricted party to the last position, keeping the order of
/// the other two.
pub fn move_party_last(psi: &MultiSpinorState, party: usize) -> Result<MultiSpinorState> {
    let n = psi.n_parties();
    if party >= n {
        return Err(Error::InvalidArgument(format!("party {party} out of range")));
    }
    let order: Vec<usize> = (0..n).filter(|&p| p != party).chain([party]).collect();
    let mut out = MultiSpinorState::zeros(n).coefficients().to_vec();
    for (flat, slot) in out.iter_mut().enumerate() {
        let new_idx = crate::states::multi_index(flat, n);
        let mut old = vec![0; n];
        for (k, &p) in order.iter().enumerate() {
            old[p] = new_idx[k];
        }
        *slot = psi.get(&old);
    }
    MultiSpinorState::new(n, out)
}

/// `(H, L, M)` four-qubit invariants.
pub fn four_qubit_invariants(q: &QubitState) -> Result<(Complex64, Complex64, Complex64)> {
    q.require(4)?;
    let f = |i: &[usize]| q.get(i);
    Ok((formula("H").eval(&f), formula("L").eval(&f), formula("M").eval(&f)))
}

/// `Σ ε_{n j} ε_{p k} … ψ_{jk…} ψ_{np…}` with ε₁₀ = 1 = −ε₀₁.
pub fn n_tangle(q: &QubitState) -> Result<Complex64> {
    let n = q.n_qubits;
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::InvalidArgument(format!("n-tangle needs an even qubit count, got {n}")));
    }
    let mask = (1usize << n) - 1;
    // ε is nonzero only for flipped bits, and Π ε = (−1)^{#ones in the second index}.
    Ok((0..=mask)
        .map(|j| {
            let partner = j ^ mask;
            let sign = if partner.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            q.coefficients[j] * q.coefficients[partner] * sign
        })
        .sum())
}

/// The printed six-qubit tangle.
pub fn printed_tau6(q: &QubitState) -> Result<Complex64> {
    q.require(6)?;
    Ok(formula("tau6").eval(&|i| q.get(i)))
}

/// A pair's from slot, to slot and sandwich matrix.
type SlotPair = (usize, usize, [[Complex64; 4]; 4]);

/// Maximum slot count accepted by [`naive_evaluate`].
pub const NAIVE_SLOT_CAP: usize = 12;

/// Slot-by-slot sum over all index assignments using dense sandwich matrices.
/// Branches are cut as soon as a completed pair hits a zero matrix entry,
/// which skips only vanishing terms.
pub fn naive_evaluate(desc: &InvariantDescriptor, state: &MultiSpinorState) -> Result<Complex64> {
    let n = desc.n_parties;
    let d = desc.degree;
    if n * d > NAIVE_SLOT_CAP {
        return Err(Error::Unsupported(format!("{} slots exceed the brute-force cap of {NAIVE_SLOT_CAP}", n * d)));
    }
    if state.n_parties() != n {
        return Err(Error::PartyMismatch { descriptor: n, state: state.n_parties() });
    }
    let b = gamma_basis();
    let dense = |x: XTag| -> [[Complex64; 4]; 4] {
        let m = b.sandwich(x);
        let mut a = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (r, row) in a.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = m[(r, c)];
            }
        }
        a
    };
    // Slots are visited pair by pair, so every pair closes on its second slot.
    let slot = |copy: usize, party: usize| copy * n + party;
    let mut order = Vec::with_capacity(n * d);
    let mut closing: Vec<Vec<SlotPair>> = vec![Vec::new(); n * d];
    for p in &desc.pairs {
        let f = slot(p.from.copy, p.from.party);
        let t = slot(p.to.copy, p.to.party);
        order.extend([f, t]);
        closing[order.len() - 1].push((f, t, dense(p.x)));
    }
    let mut assign = vec![0usize; n * d];
    let mut total = Complex64::new(0.0, 0.0);
    type Closing = [Vec<SlotPair>];
    fn rec(
        k: usize,
        coef: Complex64,
        order: &[usize],
        assign: &mut [usize],
        closing: &Closing,
        finish: &mut dyn FnMut(&[usize], Complex64),
    ) {
        if k == order.len() {
            finish(assign, coef);
            return;
        }
        for v in 0..4 {
            assign[order[k]] = v;
            let mut c = coef;
            for (f, t, m) in &closing[k] {
                c *= m[assign[*f]][assign[*t]];
            }
            if c != Complex64::new(0.0, 0.0) {
                rec(k + 1, c, order, assign, closing, finish);
            }
        }
    }
    rec(0, Complex64::new(1.0, 0.0), &order, &mut assign, &closing, &mut |a, c| {
        let mut prod = c;
        for copy in 0..d {
            prod *= state.get(&a[copy * n..(copy + 1) * n]);
        }
        total += prod;
    });
    Ok(total)
}

const EXPANSIONS: [(&str, &str); 17] = [
    ("I_2a", include_str!("../data/expansions/I_2a.tex")),
    ("I_2b", include_str!("../data/expansions/I_2b.tex")),
    ("I_2c", include_str!("../data/expansions/I_2c.tex")),
    ("I_3a", include_str!("../data/expansions/I_3a.tex")),
    ("I_3b", include_str!("../data/expansions/I_3b.tex")),
    ("I_3c", include_str!("../data/expansions/I_3c.tex")),
    ("Z_1", include_str!("../data/expansions/Z_1.tex")),
    ("Z_2", include_str!("../data/expansions/Z_2.tex")),
    ("I_23a", include_str!("../data/expansions/I_23a.tex")),
    ("I_35a", include_str!("../data/expansions/I_35a.tex")),
    ("I_11a", include_str!("../data/expansions/I_11a.tex")),
    ("H_a", include_str!("../data/expansions/H_a.tex")),
    ("H_b", include_str!("../data/expansions/H_b.tex")),
    ("H_c", include_str!("../data/expansions/H_c.tex")),
    ("H_d", include_str!("../data/expansions/H_d.tex")),
    ("T_l", include_str!("../data/expansions/T_l.tex")),
    ("Y_l", include_str!("../data/expansions/Y_l.tex")),
];

/// Names with a transcribed expansion; `I_3d` is assembled as 4(Z₁ + Z₂).
pub fn transcribed_expansions() -> Vec<&'static str> {
    EXPANSIONS
        .iter()
        .map(|(n, _)| *n)
        .filter(|n| !n.starts_with("Z_"))
        .chain(["I_3d"])
        .collect()
}

/// Printed expansions with a dropped operator at a line break. Each entry is
/// (name, printed text, repaired text).
pub const EXPANSION_REPAIRS: [(&str, &str, &str); 1] = [(
    "I_11a",
    "\\psi_{022}\\psi_{033}\\nonumber\\\\&& \\psi_{201}",
    "\\psi_{022}\\psi_{033}\\nonumber\\\\&& + \\psi_{201}",
)];

fn expansion(name: &str) -> Result<&'static Expr> {
    static CACHE: OnceLock<HashMap<&'static str, Expr>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        EXPANSIONS
            .iter()
            .map(|(n, src)| {
                let fixed = EXPANSION_REPAIRS
                    .iter()
                    .filter(|(r, _, _)| r == n)
                    .fold(src.to_string(), |acc, (_, from, to)| {
                        assert!(acc.contains(from), "repair for {n} no longer applies");
                        acc.replacen(from, to, 1)
                    });
                (*n, parse_formula(&fixed).unwrap_or_else(|e| panic!("bundled expansion {n}: {e}")))
            })
            .collect()
    });
    cache.get(name).ok_or_else(|| Error::UnknownName(name.to_string()))
}

pub fn hand_expansion(name: &str, state: &MultiSpinorState) -> Result<Complex64> {
    let get = |i: &[usize]| state.get(i);
    let want = if name.starts_with("I_") { 3 } else { 4 };
    if !transcribed_expansions().contains(&name) {
        return Err(Error::UnknownName(name.to_string()));
    }
    if state.n_parties() != want {
        return Err(Error::InvalidArgument(format!("{name} needs {want} parties")));
    }
    if name == "I_3d" {
        let z = expansion("Z_1")?.eval(&get) + expansion("Z_2")?.eval(&get);
        return Ok(z * 4.0);
    }
    Ok(expansion(name)?.eval(&get))
}
