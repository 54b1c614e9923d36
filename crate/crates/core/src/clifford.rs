//! Dirac-representation gamma matrices, the two sandwich matrices `C` and
//! `Cγ⁵`, discrete transformations and samplers for the continuous groups
//! used in invariance testing.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// A 4×4 complex matrix.
pub type ComplexMatrix4 = Matrix4<Complex64>;
/// A four-component Dirac spinor.
pub type Spinor4 = Vector4<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default bound on random Lie-algebra coefficients.
pub const DEFAULT_SCALE: f64 = 0.5;

/// Minkowski metric with signature (+,−,−,−).
pub fn metric(mu: usize, nu: usize) -> f64 {
    match (mu, nu) {
        (0, 0) => 1.0,
        (a, b) if a == b => -1.0,
        _ => 0.0,
    }
}

/// Which of the two antisymmetric sandwich matrices sits on a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum XTag {
    #[serde(rename = "C")]
    C,
    #[serde(rename = "C5")]
    C5,
}

impl XTag {
    pub fn label(self) -> &'static str {
        match self {
            XTag::C => "C",
            XTag::C5 => "C5",
        }
    }
}

impl std::fmt::Display for XTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for XTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C" => Ok(XTag::C),
            "C5" | "Cg5" => Ok(XTag::C5),
            other => Err(Error::Parse(format!("unknown sandwich tag `{other}`"))),
        }
    }
}

/// The fixed gamma-matrix algebra in the Dirac representation.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaBasis {
    pub gamma: [ComplexMatrix4; 4],
    pub gamma5: ComplexMatrix4,
    pub c_matrix: ComplexMatrix4,
    pub c_gamma5: ComplexMatrix4,
}

impl GammaBasis {
    pub fn sandwich(&self, x: XTag) -> &ComplexMatrix4 {
        match x {
            XTag::C => &self.c_matrix,
            XTag::C5 => &self.c_gamma5,
        }
    }

    /// Ordered product `γ^{μ₁}γ^{μ₂}…`; the empty product is the identity.
    pub fn product(&self, indices: &[usize]) -> ComplexMatrix4 {
        indices
            .iter()
            .fold(ComplexMatrix4::identity(), |acc, &mu| acc * self.gamma[mu])
    }

    /// Lorentz generator `S^{ρσ} = ¼[γ^ρ, γ^σ]`.
    pub fn lorentz_generator(&self, rho: usize, sigma: usize) -> ComplexMatrix4 {
        let g = &self.gamma;
        (g[rho] * g[sigma] - g[sigma] * g[rho]) * Complex64::new(0.25, 0.0)
    }
}

fn block(tl: [[Complex64; 2]; 2], tr: [[Complex64; 2]; 2], bl: [[Complex64; 2]; 2], br: [[Complex64; 2]; 2]) -> ComplexMatrix4 {
    let mut m = ComplexMatrix4::zeros();
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = tl[r][c];
            m[(r, c + 2)] = tr[r][c];
            m[(r + 2, c)] = bl[r][c];
            m[(r + 2, c + 2)] = br[r][c];
        }
    }
    m
}

fn pauli(k: usize) -> [[Complex64; 2]; 2] {
    match k {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => unreachable!("pauli index"),
    }
}

fn neg2(m: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]]
}

/// Builds γ⁰ = diag(I, −I), γ^k = [[0, σ^k], [−σ^k, 0]], γ⁵ = iγ⁰γ¹γ²γ³,
/// C = iγ¹γ³ and Cγ⁵.
pub fn build_gamma_basis() -> GammaBasis {
    let z = [[ZERO; 2]; 2];
    let id = pauli(0);
    let g0 = block(id, z, z, neg2(id));
    let gk = |k: usize| block(z, pauli(k), neg2(pauli(k)), z);
    let gamma = [g0, gk(1), gk(2), gk(3)];
    let gamma5 = gamma[0] * gamma[1] * gamma[2] * gamma[3] * I;
    let c_matrix = gamma[1] * gamma[3] * I;
    let c_gamma5 = c_matrix * gamma5;
    GammaBasis { gamma, gamma5, c_matrix, c_gamma5 }
}

/// Cached basis; construction is cheap but it is used in hot loops.
pub fn gamma_basis() -> &'static GammaBasis {
    static BASIS: std::sync::OnceLock<GammaBasis> = std::sync::OnceLock::new();
    BASIS.get_or_init(build_gamma_basis)
}

/// Groups for which generators or samplers are available.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupId {
    LorentzProper,
    #[serde(rename = "GC_U")]
    GcU,
    #[serde(rename = "GC5_U")]
    Gc5U,
    #[serde(rename = "GC")]
    Gc,
    #[serde(rename = "GC5")]
    Gc5,
    #[serde(rename = "Intersection_U")]
    IntersectionU,
    Intersection,
    #[serde(rename = "SL4")]
    Sl4,
    #[serde(rename = "U1SL4")]
    U1Sl4,
    DiracGroup,
}

impl GroupId {
    pub const ALL: [GroupId; 10] = [
        GroupId::LorentzProper,
        GroupId::GcU,
        GroupId::Gc5U,
        GroupId::Gc,
        GroupId::Gc5,
        GroupId::IntersectionU,
        GroupId::Intersection,
        GroupId::Sl4,
        GroupId::U1Sl4,
        GroupId::DiracGroup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GroupId::LorentzProper => "LorentzProper",
            GroupId::GcU => "GC_U",
            GroupId::Gc5U => "GC5_U",
            GroupId::Gc => "GC",
            GroupId::Gc5 => "GC5",
            GroupId::IntersectionU => "Intersection_U",
            GroupId::Intersection => "Intersection",
            GroupId::Sl4 => "SL4",
            GroupId::U1Sl4 => "U1SL4",
            GroupId::DiracGroup => "DiracGroup",
        }
    }

    /// True when sampled elements have unit determinant, so invariants are
    /// expected to be preserved as values rather than only in magnitude.
    pub fn preserves_values(self) -> bool {
        matches!(self, GroupId::LorentzProper | GroupId::Sl4)
    }
}

impl std::fmt::Display for GroupId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for GroupId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        GroupId::ALL
            .iter()
            .copied()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unsupported(format!("unknown group `{s}`")))
    }
}

/// A group together with its Lie-algebra generators.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    pub group_id: GroupId,
    pub generators: Vec<ComplexMatrix4>,
}

fn scaled(m: ComplexMatrix4, s: Complex64) -> ComplexMatrix4 {
    m * s
}

/// Degree-two generators shared by every `G` group: iγ⁰γ^k and γ^jγ^k.
fn shared_compact(b: &GammaBasis) -> Vec<ComplexMatrix4> {
    vec![
        scaled(b.product(&[0, 1]), I),
        scaled(b.product(&[0, 2]), I),
        scaled(b.product(&[0, 3]), I),
        b.product(&[1, 2]),
        b.product(&[1, 3]),
        b.product(&[2, 3]),
        ComplexMatrix4::identity() * I,
    ]
}

fn shared_noncompact(b: &GammaBasis) -> Vec<ComplexMatrix4> {
    vec![
        b.product(&[0, 1]),
        b.product(&[0, 2]),
        b.product(&[0, 3]),
        scaled(b.product(&[1, 2]), I),
        scaled(b.product(&[1, 3]), I),
        scaled(b.product(&[2, 3]), I),
    ]
}

fn sl4_basis() -> Vec<ComplexMatrix4> {
    let mut out = Vec::with_capacity(30);
    for phase in [ONE, I] {
        for r in 0..4 {
            for c in 0..4 {
                if r != c {
                    let mut m = ComplexMatrix4::zeros();
                    m[(r, c)] = phase;
                    out.push(m);
                }
            }
        }
        for k in 0..3 {
            let mut m = ComplexMatrix4::zeros();
            m[(k, k)] = phase;
            m[(k + 1, k + 1)] = -phase;
            out.push(m);
        }
    }
    out
}

/// Generator set of a continuous group. The finite Dirac group has none.
pub fn lie_generators(group_id: GroupId) -> Result<GroupSpec> {
    let b = gamma_basis();
    let g = &b.gamma;
    let g5 = b.gamma5;
    let generators = match group_id {
        GroupId::LorentzProper => {
            let mut v = Vec::new();
            for rho in 0..4 {
                for sigma in rho + 1..4 {
                    v.push(b.lorentz_generator(rho, sigma));
                }
            }
            v
        }
        GroupId::Gc5U | GroupId::Gc5 => {
            let mut v = vec![g[0] * I, g[1], g[2], g[3]];
            v.extend(shared_compact(b));
            if group_id == GroupId::Gc5 {
                v.extend([g[0], g[1] * I, g[2] * I, g[3] * I]);
                v.extend(shared_noncompact(b));
            }
            v
        }
        GroupId::GcU | GroupId::Gc => {
            let mut v = vec![g5 * g[0], g5 * g[1] * I, g5 * g[2] * I, g5 * g[3] * I];
            v.extend(shared_compact(b));
            if group_id == GroupId::Gc {
                v.extend([g5 * g[0] * I, g5 * g[1], g5 * g[2], g5 * g[3]]);
                v.extend(shared_noncompact(b));
            }
            v
        }
        GroupId::IntersectionU => shared_compact(b),
        GroupId::Intersection => {
            let mut v = shared_compact(b);
            v.extend(shared_noncompact(b));
            v
        }
        GroupId::Sl4 => sl4_basis(),
        GroupId::U1Sl4 => {
            let mut v = sl4_basis();
            v.push(ComplexMatrix4::identity() * I);
            v
        }
        GroupId::DiracGroup => {
            return Err(Error::Unsupported(
                "the Dirac group is finite and has no Lie generators".into(),
            ))
        }
    };
    Ok(GroupSpec { group_id, generators })
}

/// Matrix exponential (Padé scaling and squaring).
pub fn expm(m: &ComplexMatrix4) -> ComplexMatrix4 {
    m.exp()
}

/// Draws one group element from an existing generator stream.
pub fn sample_group_element_from<R: Rng>(rng: &mut R, group_id: GroupId, scale: f64) -> Result<ComplexMatrix4> {
    if group_id == GroupId::DiracGroup {
        let idx = rng.gen_range(0..32);
        return discrete_transform(DiscreteTransform::DiracGroupElement(idx));
    }
    let spec = lie_generators(group_id)?;
    let mut algebra = ComplexMatrix4::zeros();
    for gen in &spec.generators {
        let c = if scale > 0.0 { rng.gen_range(-scale..=scale) } else { 0.0 };
        algebra += gen * Complex64::new(c, 0.0);
    }
    Ok(expm(&algebra))
}

/// `exp(Σ cᵢMᵢ)` with coefficients uniform in `[−scale, scale]`.
pub fn sample_group_element(group_id: GroupId, rng_seed: u64, scale: f64) -> Result<ComplexMatrix4> {
    let mut rng = stream_rng(rng_seed, 0);
    sample_group_element_from(&mut rng, group_id, scale)
}

/// Discrete spinor transformations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscreteTransform {
    P,
    Cpt,
    DiracGroupElement(usize),
}

/// Gamma-index subsets in the fixed Dirac-group order: by size, then
/// lexicographically.
pub fn dirac_group_words() -> Vec<Vec<usize>> {
    let mut words: Vec<Vec<usize>> = (0u32..16)
        .map(|mask| (0..4).filter(|b| mask & (1 << b) != 0).collect())
        .collect();
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    words
}

pub fn discrete_transform(kind: DiscreteTransform) -> Result<ComplexMatrix4> {
    let b = gamma_basis();
    match kind {
        DiscreteTransform::P => Ok(b.gamma[0]),
        DiscreteTransform::Cpt => Ok(b.gamma5 * (-I)),
        DiscreteTransform::DiracGroupElement(idx) => {
            if idx >= 32 {
                return Err(Error::InvalidArgument(format!("Dirac group index {idx} out of range 0..32")));
            }
            let words = dirac_group_words();
            let m = b.product(&words[idx % 16]);
            Ok(if idx < 16 { m } else { -m })
        }
    }
}

/// `ψᵀXφ`.
pub fn bilinear(x: XTag, psi: &Spinor4, phi: &Spinor4) -> Complex64 {
    (psi.transpose() * gamma_basis().sandwich(x) * phi)[(0, 0)]
}

/// Largest absolute entry.
pub fn max_abs(m: &ComplexMatrix4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Best scalar `s` with `m ≈ s·x` and the relative residual `‖m − s·x‖/‖x‖`.
pub fn scalar_multiple_fit(m: &ComplexMatrix4, x: &ComplexMatrix4) -> (Complex64, f64) {
    let num: Complex64 = x.iter().zip(m.iter()).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = x.iter().map(|a| a.norm_sqr()).sum();
    let s = num / den;
    let resid = (m - x * s).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / den.sqrt();
    (s, resid)
}
