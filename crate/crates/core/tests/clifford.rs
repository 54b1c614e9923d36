use nalgebra::Matrix4;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use spinor_invariants::clifford::{
    bilinear, discrete_transform, expm, lie_generators, max_abs, metric, sample_group_element,
    sample_group_element_from, scalar_multiple_fit, ComplexMatrix4, DiscreteTransform, Spinor4, DEFAULT_SCALE,
};
use spinor_invariants::rng::complex_normal;
use spinor_invariants::{gamma_basis, GroupId, XTag};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn close(a: &ComplexMatrix4, b: &ComplexMatrix4, tol: f64) -> bool {
    max_abs(&(a - b)) < tol
}

#[test]
fn gammas_satisfy_clifford_algebra() {
    let b = gamma_basis();
    let id = ComplexMatrix4::identity();
    for mu in 0..4 {
        for nu in 0..4 {
            let anti = b.gamma[mu] * b.gamma[nu] + b.gamma[nu] * b.gamma[mu];
            assert!(close(&anti, &(id * c(2.0 * metric(mu, nu))), 1e-15), "mu={mu} nu={nu}");
        }
        let anti5 = b.gamma5 * b.gamma[mu] + b.gamma[mu] * b.gamma5;
        assert!(close(&anti5, &ComplexMatrix4::zeros(), 1e-15));
    }
    assert!(close(&(b.gamma5 * b.gamma5), &id, 1e-15));
}

#[test]
fn sandwich_matrices() {
    let b = gamma_basis();
    let i = Complex64::i();
    assert!(close(&b.c_matrix, &(b.gamma[1] * b.gamma[3] * i), 1e-15));
    assert!(close(&b.c_gamma5, &(b.c_matrix * b.gamma5), 1e-15));
    assert!(close(&b.c_matrix.transpose(), &(-b.c_matrix), 1e-15));
    assert_eq!(b.sandwich(XTag::C), &b.c_matrix);
    assert_eq!(b.sandwich(XTag::C5), &b.c_gamma5);
}

#[test]
fn lorentz_preserves_both_sandwiches() {
    let b = gamma_basis();
    for seed in 0..10 {
        let s = sample_group_element(GroupId::LorentzProper, seed, DEFAULT_SCALE).unwrap();
        for x in [XTag::C, XTag::C5] {
            let m = b.sandwich(x);
            assert!(close(&(s.transpose() * m * s), m, 1e-12), "seed {seed} {x:?}");
        }
    }
}

#[test]
fn groups_preserve_their_sandwich() {
    let b = gamma_basis();
    let cases = [
        (GroupId::Gc, vec![XTag::C]),
        (GroupId::Gc5, vec![XTag::C5]),
        (GroupId::Intersection, vec![XTag::C, XTag::C5]),
        (GroupId::GcU, vec![XTag::C]),
        (GroupId::Gc5U, vec![XTag::C5]),
        (GroupId::IntersectionU, vec![XTag::C, XTag::C5]),
    ];
    for (g, xs) in cases {
        for seed in 0..5 {
            let s = sample_group_element(g, seed, DEFAULT_SCALE).unwrap();
            for x in &xs {
                let m = b.sandwich(*x);
                let (k, resid) = scalar_multiple_fit(&(s.transpose() * m * s), m);
                assert!(resid < 1e-12, "{g:?} {x:?} residual {resid}");
                assert!((k.norm() - 1.0).abs() < 1e-12, "{g:?} {x:?} scalar {k}");
            }
        }
    }
}

#[test]
fn sl4_elements_have_unit_determinant() {
    for seed in 0..5 {
        let s = sample_group_element(GroupId::Sl4, seed, DEFAULT_SCALE).unwrap();
        assert!((s.determinant() - 1.0).norm() < 1e-12);
    }
    assert_eq!(lie_generators(GroupId::Sl4).unwrap().generators.len(), 30);
}

#[test]
fn sampling_is_deterministic() {
    let a = sample_group_element(GroupId::Gc5, 7, DEFAULT_SCALE).unwrap();
    let b = sample_group_element(GroupId::Gc5, 7, DEFAULT_SCALE).unwrap();
    assert_eq!(a, b);
    let mut r1 = ChaCha20Rng::seed_from_u64(3);
    let mut r2 = ChaCha20Rng::seed_from_u64(3);
    assert_eq!(
        sample_group_element_from(&mut r1, GroupId::Sl4, 0.3).unwrap(),
        sample_group_element_from(&mut r2, GroupId::Sl4, 0.3).unwrap()
    );
}

#[test]
fn discrete_transforms() {
    let b = gamma_basis();
    assert_eq!(discrete_transform(DiscreteTransform::P).unwrap(), b.gamma[0]);
    assert!(close(&discrete_transform(DiscreteTransform::Cpt).unwrap(), &(b.gamma5 * (-Complex64::i())), 1e-15));
    assert!(discrete_transform(DiscreteTransform::DiracGroupElement(32)).is_err());
}

#[test]
fn dirac_group_is_closed() {
    let els: Vec<ComplexMatrix4> =
        (0..32).map(|k| discrete_transform(DiscreteTransform::DiracGroupElement(k)).unwrap()).collect();
    for (i, a) in els.iter().enumerate() {
        for b in &els[..i] {
            assert!(!close(a, b, 1e-12));
        }
    }
    for a in &els {
        for b in &els {
            let p = a * b;
            assert!(els.iter().any(|e| close(e, &p, 1e-12)));
        }
    }
}

fn random_hermitian(seed: u64, norm: f64) -> ComplexMatrix4 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let a = ComplexMatrix4::from_fn(|_, _| complex_normal(&mut rng));
    let h = (a + a.adjoint()) * c(0.5);
    let n = h.norm();
    h * c(norm / n)
}

#[test]
fn expm_matches_spectral_exponential() {
    for seed in 0..20 {
        let norm = 0.5 + seed as f64 * 0.5;
        let h = random_hermitian(seed, norm.min(10.0));
        let eig = h.symmetric_eigen();
        let d = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| c(l.exp())));
        let want = eig.eigenvectors * d * eig.eigenvectors.adjoint();
        let got = expm(&h);
        let rel = (got - want).norm() / want.norm();
        assert!(rel < 1e-12, "seed {seed}: relative error {rel}");

        let u = expm(&(h * Complex64::i()));
        assert!(close(&(u * u.adjoint()), &ComplexMatrix4::identity(), 1e-12));
    }
}

fn spinor(v: [(f64, f64); 4]) -> Spinor4 {
    Spinor4::from_iterator(v.iter().map(|&(r, i)| Complex64::new(r, i)))
}

proptest! {
    #[test]
    fn bilinear_symmetry_follows_transpose(
        a in prop::array::uniform4((-1.0f64..1.0, -1.0f64..1.0)),
        b in prop::array::uniform4((-1.0f64..1.0, -1.0f64..1.0)),
    ) {
        let (psi, phi) = (spinor(a), spinor(b));
        for x in [XTag::C, XTag::C5] {
            let m = gamma_basis().sandwich(x);
            let s = if close(&m.transpose(), m, 1e-15) { 1.0 } else { -1.0 };
            prop_assert!((bilinear(x, &psi, &phi) - bilinear(x, &phi, &psi) * s).norm() < 1e-12);
        }
    }
}
