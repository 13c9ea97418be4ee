//! Two-forms on oriented `R⁴` stored as antisymmetric 4×4 arrays.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type TwoForm<T> = [[T; 4]; 4];

fn levi_civita(idx: [usize; 4]) -> i64 {
    let p = idx;
    let mut sign = 1;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

pub fn zero<T: Scalar>() -> TwoForm<T> {
    std::array::from_fn(|_| std::array::from_fn(|_| T::zero()))
}

/// `dx_i ∧ dx_j` (0-based indices).
pub fn basis<T: Scalar>(i: usize, j: usize) -> TwoForm<T> {
    let mut f = zero::<T>();
    if i != j {
        f[i][j] = T::one();
        f[j][i] = -T::one();
    }
    f
}

pub fn from_upper<T: Scalar>(coeffs: [(usize, usize, T); 6]) -> TwoForm<T> {
    let mut f = zero::<T>();
    for (i, j, c) in coeffs {
        f[i][j] = f[i][j].clone() + c.clone();
        f[j][i] = f[j][i].clone() - c;
    }
    f
}

pub fn check_antisymmetric<T: Scalar>(f: &TwoForm<T>, tol: f64) -> Result<()> {
    for i in 0..4 {
        for j in 0..4 {
            let s = f[i][j].clone() + f[j][i].clone();
            if !s.is_negligible(tol) {
                return Err(Error::input("two-form array is not antisymmetric"));
            }
        }
    }
    Ok(())
}

pub fn add<T: Scalar>(a: &TwoForm<T>, b: &TwoForm<T>) -> TwoForm<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].clone() + b[i][j].clone()))
}

pub fn scale<T: Scalar>(a: &TwoForm<T>, s: &T) -> TwoForm<T> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j].clone() * s.clone()))
}

/// `v ∧ w`.
pub fn wedge_vectors<T: Scalar>(v: &[T; 4], w: &[T; 4]) -> TwoForm<T> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| v[i].clone() * w[j].clone() - v[j].clone() * w[i].clone())
    })
}

/// Coefficient of `dx₁∧dx₂∧dx₃∧dx₄` in `a ∧ b`.
pub fn wedge<T: Scalar>(a: &TwoForm<T>, b: &TwoForm<T>) -> T {
    let mut acc = T::zero();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let e = levi_civita([i, j, k, l]);
                    if e != 0 {
                        acc = acc + T::from_i64(e) * a[i][j].clone() * b[k][l].clone();
                    }
                }
            }
        }
    }
    acc * T::from_ratio(1, 4)
}

pub fn hodge_star<T: Scalar>(f: &TwoForm<T>) -> TwoForm<T> {
    std::array::from_fn(|k| {
        std::array::from_fn(|l| {
            let mut acc = T::zero();
            for i in 0..4 {
                for j in 0..4 {
                    let e = levi_civita([i, j, k, l]);
                    if e != 0 {
                        acc = acc + T::from_i64(e) * f[i][j].clone();
                    }
                }
            }
            acc * T::from_ratio(1, 2)
        })
    })
}

pub fn self_dual_part<T: Scalar>(f: &TwoForm<T>) -> TwoForm<T> {
    scale(&add(f, &hodge_star(f)), &T::from_ratio(1, 2))
}

pub fn anti_self_dual_part<T: Scalar>(f: &TwoForm<T>) -> TwoForm<T> {
    let star = hodge_star(f);
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (f[i][j].clone() - star[i][j].clone()) * T::from_ratio(1, 2))
    })
}

/// `Σ_{i<j} a_ij b_ij`.
pub fn inner<T: Scalar>(a: &TwoForm<T>, b: &TwoForm<T>) -> T {
    let mut acc = T::zero();
    for i in 0..4 {
        for j in i + 1..4 {
            acc = acc + a[i][j].clone() * b[i][j].clone();
        }
    }
    acc
}

/// Hyperkähler triple `ω₁ = dx₁₂ + dx₃₄`, `ω₂ = dx₁₃ + dx₄₂`, `ω₃ = dx₁₄ + dx₂₃`.
pub fn hyperkahler_forms<T: Scalar>() -> [TwoForm<T>; 3] {
    [
        add(&basis(0, 1), &basis(2, 3)),
        add(&basis(0, 2), &basis(3, 1)),
        add(&basis(0, 3), &basis(1, 2)),
    ]
}

/// `F ∧ ω_k = 0` for all `k`.
pub fn is_anti_self_dual<T: Scalar>(f: &TwoForm<T>, tol: f64) -> bool {
    hyperkahler_forms::<T>().iter().all(|w| wedge(f, w).is_negligible(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::{One, Zero};

    type Q = Rational;

    #[test]
    fn volume_coefficient() {
        assert_eq!(wedge::<Q>(&basis(0, 1), &basis(2, 3)), Q::one());
        assert_eq!(wedge::<Q>(&basis(0, 2), &basis(1, 3)), -Q::one());
        assert_eq!(wedge::<Q>(&basis(0, 1), &basis(0, 2)), Q::zero());
    }

    #[test]
    fn omegas_are_self_dual() {
        for w in hyperkahler_forms::<Q>() {
            assert_eq!(hodge_star(&w), w);
            assert_eq!(wedge(&w, &w), Q::from_integer(2.into()));
        }
    }

    #[test]
    fn star_squares_to_identity() {
        for i in 0..4 {
            for j in i + 1..4 {
                let b = basis::<Q>(i, j);
                assert_eq!(hodge_star(&hodge_star(&b)), b);
            }
        }
    }

    #[test]
    fn asd_detection() {
        let f = add(&basis::<Q>(0, 1), &scale(&basis(2, 3), &-Q::one()));
        assert!(is_anti_self_dual(&f, 0.0));
        assert!(!is_anti_self_dual(&basis::<Q>(0, 1), 0.0));
        assert_eq!(self_dual_part(&f), zero());
    }
}
