#![allow(dead_code)]

use mukai_lab::lattice::MukaiVector;
use mukai_lab::{BigInt, Rational};
use num_traits::{One, Zero};
use proptest::prelude::*;

/// `(r, (1, rs − xy, x, y, 0, …), s)`: isotropic and primitive for any inputs.
pub fn isotropic(r: i64, s: i64, x: i64, y: i64, h2_rank: usize) -> MukaiVector {
    let mut c = vec![0i64; h2_rank];
    c[0] = 1;
    c[1] = r * s - x * y;
    c[2] = x;
    c[3] = y;
    MukaiVector::from_i64(r, &c, s)
}

pub fn isotropic_strategy(h2_rank: usize) -> impl Strategy<Value = MukaiVector> {
    (-6i64..=6, -6i64..=6, -4i64..=4, -4i64..=4).prop_map(move |(r, s, x, y)| isotropic(r, s, x, y, h2_rank))
}

pub fn positive_rank_isotropic(h2_rank: usize) -> impl Strategy<Value = MukaiVector> {
    (1i64..=6, -6i64..=6, -4i64..=4, -4i64..=4).prop_map(move |(r, s, x, y)| isotropic(r, s, x, y, h2_rank))
}

pub fn vector_strategy(h2_rank: usize) -> impl Strategy<Value = MukaiVector> {
    (-20i64..=20, prop::collection::vec(-5i64..=5, h2_rank), -20i64..=20)
        .prop_map(|(r, c, s)| MukaiVector::from_i64(r, &c, s))
}

/// Plain Gaussian elimination; `None` when `b` is outside the column span.
pub fn solve_rational(columns: &[Vec<BigInt>], b: &[BigInt]) -> Option<Vec<Rational>> {
    let rows = b.len();
    let k = columns.len();
    let mut a: Vec<Vec<Rational>> = (0..rows)
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| Rational::from_integer(c[i].clone())).collect();
            row.push(Rational::from_integer(b[i].clone()));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..k {
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, p);
        let inv = Rational::one() / a[r][col].clone();
        for x in a[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                let pivot_row = a[r].clone();
                for (x, p) in a[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if a[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut y = vec![Rational::zero(); k];
    for (i, &col) in pivots.iter().enumerate() {
        y[col] = a[i][k].clone();
    }
    Some(y)
}
