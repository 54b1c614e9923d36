//! Multi-party spinor states stored as dense `4ⁿ` coefficient tensors.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{gamma_basis, ComplexMatrix4, Spinor4};
use crate::error::{Error, Result};
use crate::rng::{complex_normal, stream_rng, streams};

/// Dense state tensor, party-major: flat index = Σ_p i_p·4^{n−1−p}.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiSpinorState {
    n_parties: usize,
    coefficients: Vec<Complex64>,
}

pub fn flat_index(indices: &[usize]) -> usize {
    indices.iter().fold(0, |acc, &i| acc * 4 + i)
}

pub fn multi_index(mut flat: usize, n_parties: usize) -> Vec<usize> {
    let mut out = vec![0; n_parties];
    for p in (0..n_parties).rev() {
        out[p] = flat % 4;
        flat /= 4;
    }
    out
}

impl MultiSpinorState {
    pub fn new(n_parties: usize, coefficients: Vec<Complex64>) -> Result<Self> {
        if n_parties == 0 {
            return Err(Error::InvalidArgument("a state needs at least one party".into()));
        }
        let expected = 4usize.pow(n_parties as u32);
        if coefficients.len() != expected {
            return Err(Error::InvalidArgument(format!(
                "{n_parties} parties need {expected} coefficients, got {}",
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self { n_parties, coefficients })
    }

    pub fn zeros(n_parties: usize) -> Self {
        Self { n_parties, coefficients: vec![Complex64::new(0.0, 0.0); 4usize.pow(n_parties as u32)] }
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn get(&self, indices: &[usize]) -> Complex64 {
        self.coefficients[flat_index(indices)]
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero state".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self { n_parties: self.n_parties, coefficients: self.coefficients.iter().map(|z| z * alpha).collect() }
    }

    /// `ψ'_{…i_p…} = Σ_j m_{i_p j} ψ_{…j…}`.
    pub fn apply_local(&self, party: usize, m: &ComplexMatrix4) -> Result<Self> {
        if party >= self.n_parties {
            return Err(Error::InvalidArgument(format!(
                "party {party} out of range for {} parties",
                self.n_parties
            )));
        }
        let stride = 4usize.pow((self.n_parties - 1 - party) as u32);
        let mut out = self.coefficients.clone();
        for (flat, slot) in out.iter_mut().enumerate() {
            let i = (flat / stride) % 4;
            let base = flat - i * stride;
            *slot = (0..4).map(|j| m[(i, j)] * self.coefficients[base + j * stride]).sum();
        }
        Ok(Self { n_parties: self.n_parties, coefficients: out })
    }

    /// Applies the same matrix at every party.
    pub fn apply_everywhere(&self, m: &ComplexMatrix4) -> Self {
        (0..self.n_parties).fold(self.clone(), |s, p| s.apply_local(p, m).expect("party in range"))
    }

    pub fn to_file(&self) -> StateFile {
        let terms = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() != 0.0)
            .map(|(flat, z)| StateTerm { idx: multi_index(flat, self.n_parties), re: z.re, im: z.im })
            .collect();
        StateFile { n_parties: self.n_parties, terms }
    }

    pub fn from_file(file: &StateFile) -> Result<Self> {
        let terms: Vec<(Complex64, Vec<usize>)> =
            file.terms.iter().map(|t| (Complex64::new(t.re, t.im), t.idx.clone())).collect();
        superposition(&terms, file.n_parties)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }
}

/// Sparse on-disk state form; omitted tuples are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n_parties: usize,
    pub terms: Vec<StateTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateTerm {
    pub idx: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Basis spinor φ_k.
pub fn basis_spinor(k: usize) -> Spinor4 {
    let mut v = Spinor4::zeros();
    v[k] = Complex64::new(1.0, 0.0);
    v
}

pub fn product_state(factors: &[Spinor4]) -> Result<MultiSpinorState> {
    if factors.is_empty() {
        return Err(Error::InvalidArgument("product of zero factors".into()));
    }
    if factors.iter().any(|f| f.iter().all(|z| z.norm() == 0.0)) {
        return Err(Error::InvalidArgument("zero factor in product state".into()));
    }
    let n = factors.len();
    let coefficients = (0..4usize.pow(n as u32))
        .map(|flat| {
            multi_index(flat, n).iter().zip(factors).map(|(&i, f)| f[i]).product()
        })
        .collect();
    MultiSpinorState::new(n, coefficients)
}

/// Sums `amplitude·|indices⟩` terms; repeated tuples add up.
pub fn superposition(terms: &[(Complex64, Vec<usize>)], n_parties: usize) -> Result<MultiSpinorState> {
    let mut state = MultiSpinorState::zeros(n_parties);
    if n_parties == 0 {
        return Err(Error::InvalidArgument("a state needs at least one party".into()));
    }
    for (amp, idx) in terms {
        if idx.len() != n_parties || idx.iter().any(|&i| i > 3) {
            return Err(Error::InvalidArgument(format!(
                "index tuple {idx:?} invalid for {n_parties} parties"
            )));
        }
        state.coefficients[flat_index(idx)] += amp;
    }
    Ok(state)
}

/// Equal-weight normalized superposition of basis tuples written as digit strings,
/// with an optional leading `-` per term, e.g. `["0000", "-1111"]`.
pub fn equal_superposition(kets: &[&str]) -> Result<MultiSpinorState> {
    let parsed: Vec<(f64, Vec<usize>)> = kets
        .iter()
        .map(|k| {
            let (sign, digits) = match k.strip_prefix('-') {
                Some(rest) => (-1.0, rest),
                None => (1.0, *k),
            };
            let idx = digits
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| Error::Parse(format!("bad ket `{k}`"))))
                .collect::<Result<Vec<_>>>()?;
            Ok((sign, idx))
        })
        .collect::<Result<_>>()?;
    let n = parsed.first().map(|(_, i)| i.len()).unwrap_or(0);
    let amp = 1.0 / (parsed.len() as f64).sqrt();
    let terms: Vec<_> = parsed.into_iter().map(|(s, i)| (Complex64::new(s * amp, 0.0), i)).collect();
    superposition(&terms, n)
}

/// Per-party chirality constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chirality {
    Left,
    Right,
    None,
}

impl Chirality {
    /// ±1 relating ψ_{…j…} to ψ_{…(j+2)…} for chiral parties.
    pub fn mirror_sign(self) -> Option<f64> {
        match self {
            Chirality::Left => Some(-1.0),
            Chirality::Right => Some(1.0),
            Chirality::None => None,
        }
    }

    pub fn projector(self) -> ComplexMatrix4 {
        let g5 = gamma_basis().gamma5;
        let id = ComplexMatrix4::identity();
        let half = Complex64::new(0.5, 0.0);
        match self {
            Chirality::Left => (id - g5) * half,
            Chirality::Right => (id + g5) * half,
            Chirality::None => id,
        }
    }
}

pub fn weyl_project(state: &MultiSpinorState, tags: &[Chirality]) -> Result<MultiSpinorState> {
    if tags.len() != state.n_parties() {
        return Err(Error::InvalidArgument("one chirality tag per party required".into()));
    }
    let mut out = state.clone();
    for (p, tag) in tags.iter().enumerate() {
        if *tag != Chirality::None {
            out = out.apply_local(p, &tag.projector())?;
        }
    }
    Ok(out)
}

/// True when ψ_{…j…} = s·ψ_{…(j−2 mod 4)…} holds exactly for every chiral party.
pub fn has_chiral_symmetry(state: &MultiSpinorState, tags: &[Chirality]) -> bool {
    let n = state.n_parties();
    (0..state.coefficients().len()).all(|flat| {
        let idx = multi_index(flat, n);
        tags.iter().enumerate().all(|(p, tag)| match tag.mirror_sign() {
            None => true,
            Some(s) => {
                let mut other = idx.clone();
                other[p] = (idx[p] + 2) % 4;
                state.get(&idx) == state.get(&other) * s
            }
        })
    })
}

/// Embeds a 2ⁿ qubit tensor: qubit b at a Right party becomes (φ_b + φ_{b+2})/√2,
/// at a Left party (φ_b − φ_{b+2})/√2.
pub fn embed_qubit_state(qubit_coeffs: &[Complex64], tags: &[Chirality]) -> Result<MultiSpinorState> {
    if tags.contains(&Chirality::None) {
        return Err(Error::InvalidArgument("embedding needs a chirality for every party".into()));
    }
    embed_weyl(qubit_coeffs, tags)
}

/// Like [`embed_qubit_state`], but `None` parties keep all four spinor indices.
/// The reduced tensor is party-major with dimension 2 at chiral parties and 4
/// elsewhere.
pub fn embed_weyl(reduced: &[Complex64], tags: &[Chirality]) -> Result<MultiSpinorState> {
    let n = tags.len();
    let dims: Vec<usize> = tags.iter().map(|t| if *t == Chirality::None { 4 } else { 2 }).collect();
    let expected: usize = dims.iter().product();
    if reduced.len() != expected {
        return Err(Error::InvalidArgument(format!(
            "{} reduced coefficients do not match the {expected} required by the chirality tags",
            reduced.len()
        )));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut state = MultiSpinorState::zeros(n);
    for flat in 0..state.coefficients.len() {
        let idx = multi_index(flat, n);
        let mut amp = 1.0;
        let mut rflat = 0usize;
        for (p, &i) in idx.iter().enumerate() {
            match tags[p].mirror_sign() {
                None => rflat = rflat * 4 + i,
                Some(sign) => {
                    rflat = rflat * 2 + (i % 2);
                    if i >= 2 {
                        amp *= sign;
                    }
                    amp *= r;
                }
            }
        }
        state.coefficients[flat] = reduced[rflat] * amp;
    }
    Ok(state)
}

/// Restriction to spinor indices 0 and 1 at the chiral parties, all indices
/// elsewhere; the inverse of [`embed_weyl`] up to the per-party 1/√2.
pub fn weyl_subtensor(state: &MultiSpinorState, tags: &[Chirality]) -> Vec<Complex64> {
    let n = state.n_parties();
    let dims: Vec<usize> = tags.iter().map(|t| if *t == Chirality::None { 4 } else { 2 }).collect();
    let total: usize = dims.iter().product();
    (0..total)
        .map(|mut q| {
            let mut idx = vec![0; n];
            for p in (0..n).rev() {
                idx[p] = q % dims[p];
                q /= dims[p];
            }
            state.get(&idx)
        })
        .collect()
}

/// Restriction of the tensor to spinor indices 0 and 1 at every party.
pub fn qubit_subtensor(state: &MultiSpinorState) -> Vec<Complex64> {
    let n = state.n_parties();
    (0..1usize << n)
        .map(|q| {
            let idx: Vec<usize> = (0..n).map(|p| (q >> (n - 1 - p)) & 1).collect();
            state.get(&idx)
        })
        .collect()
}

pub fn random_state(n_parties: usize, rng_seed: u64) -> Result<MultiSpinorState> {
    Ok(random_states(n_parties, 1, rng_seed)?.remove(0))
}

/// `count` states from one seeded stream; state k is the same for every `count > k`.
pub fn random_states(n_parties: usize, count: usize, rng_seed: u64) -> Result<Vec<MultiSpinorState>> {
    if n_parties == 0 {
        return Err(Error::InvalidArgument("a state needs at least one party".into()));
    }
    let mut rng = stream_rng(rng_seed, streams::STATES);
    let dim = 4usize.pow(n_parties as u32);
    (0..count)
        .map(|_| {
            let coeffs: Vec<Complex64> = (0..dim).map(|_| complex_normal(&mut rng)).collect();
            MultiSpinorState::new(n_parties, coeffs)?.normalized()
        })
        .collect()
}

/// Normalized random qubit tensors of length 2ⁿ.
pub fn random_qubit_coeffs(n_qubits: usize, count: usize, rng_seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = stream_rng(rng_seed, streams::QUBITS);
    (0..count)
        .map(|_| {
            let v: Vec<Complex64> = (0..1usize << n_qubits).map(|_| complex_normal(&mut rng)).collect();
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|z| z / n).collect()
        })
        .collect()
}
