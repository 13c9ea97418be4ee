mod common;

use common::{isotropic, positive_rank_isotropic};
use mukai_lab::fm::{fm_components_explicit, induced_h2_isometry, standard_fm_isometry, verify_fm_axioms};
use mukai_lab::lattice::{k3_lattice, MukaiLattice, MukaiVector};
use mukai_lab::{BigInt, Rational};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn h2_norm(x: &[Rational]) -> Rational {
    let g = k3_lattice();
    let mut acc = Rational::zero();
    for i in 0..22 {
        for j in 0..22 {
            let gij = &g.gram()[(i, j)];
            if !gij.is_zero() {
                acc += Rational::from_integer(gij.clone()) * &x[i] * &x[j];
            }
        }
    }
    acc
}

fn mukai_norm(m: &MukaiLattice, x: &[Rational]) -> Rational {
    let n = m.h2_rank();
    h2_norm(&x[1..=n]) - Rational::from_integer(BigInt::from(2)) * &x[0] * &x[n + 1]
}

fn check_mu_isometry(v: &MukaiVector, random: usize, seed: u64) {
    let m = MukaiLattice::k3();
    let fm = standard_fm_isometry(v, &m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alphas: Vec<Vec<BigInt>> = (0..22)
        .map(|i| (0..22).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    alphas.extend((0..random).map(|_| (0..22).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect()));
    for alpha in alphas {
        let rep = fm_components_explicit(&fm, &alpha).unwrap();
        let a: Vec<Rational> = alpha.iter().cloned().map(Rational::from_integer).collect();
        assert_eq!(h2_norm(&a), h2_norm(&rep.mu_of_alpha), "v = {v:?}, α = {alpha:?}");
        // the H⁰ component is −∫α·c(E)
        let g = k3_lattice();
        let cross: BigInt = (0..22).map(|i| (0..22).map(|j| &g.gram()[(i, j)] * &alpha[i] * &v.c[j]).sum::<BigInt>()).sum();
        assert_eq!(rep.h0, -Rational::from_integer(cross));
        assert!(rep.checks.all_passed(), "{:?}", rep.checks.first_failure());
    }
}

#[test]
fn mu_map_isometry_on_basis_and_random_classes() {
    let mut c = vec![0; 22];
    c[0] = 1;
    c[1] = 2;
    let vectors = [
        MukaiVector::from_i64(1, &[0; 22], 0),
        isotropic(1, 0, 0, 0, 22),
        MukaiVector::from_i64(2, &c, 1),
        isotropic(3, -2, 1, 4, 22),
    ];
    for (k, v) in vectors.iter().enumerate() {
        check_mu_isometry(v, 100, 11 + k as u64);
    }
}

#[test]
fn point_class_of_dual_is_isotropic_and_has_rank_r() {
    let m = MukaiLattice::k3();
    let v = isotropic(4, 1, 2, -1, 22);
    let fm = standard_fm_isometry(&v, &m).unwrap();
    let img = fm.apply(&MukaiVector::point_class(22));
    assert_eq!(img[0], Rational::from_integer(BigInt::from(4)));
    assert!(mukai_norm(&m, &img).is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn standard_isometry_satisfies_axioms(v in common::isotropic_strategy(22)) {
        let m = MukaiLattice::k3();
        let fm = standard_fm_isometry(&v, &m).unwrap();
        let axioms = verify_fm_axioms(&fm);
        prop_assert!(axioms.all_passed(), "{:?}", axioms.first_failure());
        let induced = induced_h2_isometry(&fm).unwrap();
        prop_assert!(induced.checks.all_passed());
        let e = fm.apply(&MukaiVector::point_class(22));
        prop_assert!(mukai_norm(&m, &e).is_zero());
    }

    #[test]
    fn mu_map_preserves_squares(v in positive_rank_isotropic(22), seed in 0u64..1000) {
        check_mu_isometry(&v, 5, seed);
    }
}
