mod common;

use common::{isotropic, isotropic_strategy, solve_rational, vector_strategy};
use mukai_lab::lattice::{
    euler_characteristic_and_dimension, hyperbolic_completion, k3_lattice, orthogonal_complement_quotient,
    IntegerLattice, MukaiLattice, MukaiVector,
};
use mukai_lab::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn toy() -> MukaiLattice {
    let u = IntegerLattice::hyperbolic_plane();
    MukaiLattice::new(IntegerLattice::direct_sum(&[u.clone(), u]))
}

fn toy_vectors() -> Vec<MukaiVector> {
    vec![
        MukaiVector::from_i64(0, &[0; 4], 1),
        MukaiVector::from_i64(1, &[0; 4], 0),
        MukaiVector::from_i64(1, &[1, 0, 0, 0], 0),
        MukaiVector::from_i64(2, &[1, 2, 0, 0], 1),
        MukaiVector::from_i64(3, &[3, 1, 0, 0], 1),
        isotropic(2, 3, 1, -1, 4),
    ]
}

/// Every vector of the box `[-b, b]^6`.
fn box_vectors(b: i64) -> Vec<Vec<BigInt>> {
    let side = (2 * b + 1) as usize;
    (0..side.pow(6))
        .map(|mut k| {
            (0..6)
                .map(|_| {
                    let d = (k % side) as i64 - b;
                    k /= side;
                    BigInt::from(d)
                })
                .collect()
        })
        .collect()
}

#[test]
fn toy_complement_matches_enumeration() {
    let m = toy();
    let all = box_vectors(2);
    for v in toy_vectors() {
        let q = orthogonal_complement_quotient(&v, &m).unwrap();
        let basis: Vec<Vec<BigInt>> = q.complement_basis.iter().map(|u| u.coords()).collect();
        assert_eq!(basis.len(), 5);
        assert_eq!(basis[q.v_index], v.coords());
        for b in &basis {
            assert!(m.pair_coords(b, &v.coords()).is_zero());
        }
        let mut orthogonal = 0;
        for x in &all {
            let in_span = solve_rational(&basis, x);
            if m.pair_coords(x, &v.coords()).is_zero() {
                orthogonal += 1;
                let y = in_span.expect("orthogonal vector outside the complement span");
                assert!(y.iter().all(|t| t.is_integer()), "{x:?} has fractional coordinates {y:?}");
                let reduced: Vec<BigInt> = y
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != q.v_index)
                    .map(|(_, t)| t.to_integer())
                    .collect();
                assert_eq!(q.quotient.norm(&reduced), m.pair_coords(x, x));
            } else {
                assert!(in_span.is_none());
            }
        }
        assert!(orthogonal > 125, "{orthogonal}");
        let inv = q.quotient.invariants();
        assert_eq!((inv.rank, inv.signature, inv.determinant.clone()), (4, (2, 2), BigInt::one()));
        assert!(inv.is_even && inv.is_unimodular);
    }
}

#[test]
fn toy_completion_by_enumeration() {
    let m = toy();
    for v in toy_vectors() {
        let w = hyperbolic_completion(&v, &m).unwrap();
        assert_eq!(m.pair(&v, &w).unwrap(), BigInt::one());
        assert!(m.pair(&w, &w).unwrap().is_zero());
    }
    let exists = box_vectors(1).iter().any(|x| {
        let v = MukaiVector::from_i64(2, &[1, 2, 0, 0], 1).coords();
        m.pair_coords(x, &v).is_one() && m.pair_coords(x, x).is_zero()
    });
    assert!(exists);
}

#[test]
fn k3_quotient_for_distinct_vectors() {
    let m = MukaiLattice::k3();
    let vectors = [
        MukaiVector::from_i64(0, &[0; 22], 1),
        MukaiVector::from_i64(1, &[0; 22], 0),
        isotropic(1, 0, 0, 0, 22),
        isotropic(3, 2, 1, 5, 22),
        isotropic(-2, 5, -3, 1, 22),
    ];
    for v in vectors {
        let inv = orthogonal_complement_quotient(&v, &m).unwrap().quotient.invariants();
        assert_eq!(inv.rank, 22);
        assert_eq!(inv.determinant, BigInt::from(-1));
        assert_eq!(inv.signature, (3, 19));
        assert!(inv.is_even);
    }
}

#[test]
fn structure_sheaf_pairing() {
    let h2 = k3_lattice();
    let v = MukaiVector::from_i64(1, &[0; 22], 1);
    let (chi, dim) = euler_characteristic_and_dimension(&v, &v, &h2).unwrap();
    assert_eq!(chi, BigInt::from(2));
    assert_eq!(dim, Some(BigInt::zero()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_symmetric_and_bilinear(a in vector_strategy(22), b in vector_strategy(22), c in vector_strategy(22), k in -7i64..=7) {
        let m = MukaiLattice::k3();
        prop_assert_eq!(m.pair(&a, &b).unwrap(), m.pair(&b, &a).unwrap());
        let k = BigInt::from(k);
        let lhs = m.pair(&a.scaled_add(&k, &c), &b).unwrap();
        prop_assert_eq!(lhs, m.pair(&a, &b).unwrap() + &k * m.pair(&c, &b).unwrap());
    }

    #[test]
    fn pairing_matches_component_formula(a in vector_strategy(22), b in vector_strategy(22)) {
        let h2 = k3_lattice();
        let expected = h2.pair(&a.c, &b.c) - &a.r * &b.s - &a.s * &b.r;
        prop_assert_eq!(MukaiLattice::k3().pair(&a, &b).unwrap(), expected);
    }

    #[test]
    fn chi_and_dimension(a in vector_strategy(22)) {
        let h2 = k3_lattice();
        let (chi, dim) = euler_characteristic_and_dimension(&a, &a, &h2).unwrap();
        let p = MukaiLattice::k3().pair(&a, &a).unwrap();
        prop_assert_eq!(&chi, &-p.clone());
        prop_assert_eq!(dim, Some(p + BigInt::from(2)));
    }

    #[test]
    fn dual_preserves_pairing(a in vector_strategy(22), b in vector_strategy(22)) {
        let m = MukaiLattice::k3();
        prop_assert_eq!(m.pair(&a.dual(), &b.dual()).unwrap(), m.pair(&a, &b).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quotient_is_k3_lattice(v in isotropic_strategy(22)) {
        let m = MukaiLattice::k3();
        let q = orthogonal_complement_quotient(&v, &m).unwrap();
        for u in &q.complement_basis {
            prop_assert!(m.pair(u, &v).unwrap().is_zero());
        }
        let inv = q.quotient.invariants();
        prop_assert_eq!(inv.rank, 22);
        prop_assert_eq!(inv.signature, (3, 19));
        prop_assert_eq!(inv.determinant, BigInt::from(-1));
        prop_assert!(inv.is_even);
    }

    #[test]
    fn completion_is_hyperbolic_partner(v in isotropic_strategy(22)) {
        let m = MukaiLattice::k3();
        let w = hyperbolic_completion(&v, &m).unwrap();
        prop_assert!(m.pair(&v, &w).unwrap().is_one());
        prop_assert!(m.pair(&w, &w).unwrap().is_zero());
    }

    #[test]
    fn imprimitive_vectors_are_rejected(v in isotropic_strategy(22), k in 2i64..=5) {
        let m = MukaiLattice::k3();
        let kv = MukaiVector::zero(22).scaled_add(&BigInt::from(k), &v);
        prop_assert!(orthogonal_complement_quotient(&kv, &m).is_err());
        let reduced = kv.divide_by_content().unwrap();
        let minus_v = MukaiVector::zero(22).scaled_add(&BigInt::from(-1), &v);
        prop_assert!(reduced == v || reduced == minus_v);
    }
}
