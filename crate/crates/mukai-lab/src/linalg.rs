//! Dense matrices over a generic ring plus the exact integer and rational
//! algorithms used by the lattice code.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use std::fmt::Debug;
use std::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone + Num> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::input("ragged matrix rows"));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_columns(cols: &[Vec<T>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::input("ragged matrix columns"));
        }
        Ok(Self::from_fn(r, c, |i, j| cols[j][i].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        let prod = a.clone() * b.clone();
                        out[(i, j)] = out[(i, j)].clone() + prod;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc + a.clone() * x.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + other[(i, j)].clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - other[(i, j)].clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Block-diagonal sum.
    pub fn direct_sum(blocks: &[Self]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows.start + i, cols.start + j)].clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// row[dst] += k * row[src]
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, k: &T) {
        for j in 0..self.cols {
            let add = self[(src, j)].clone() * k.clone();
            self[(dst, j)] = self[(dst, j)].clone() + add;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = T::zero() - self[(i, j)].clone();
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Clone + Num>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn to_rational(m: &Matrix<BigInt>) -> Matrix<BigRational> {
    m.map(|x| BigRational::from_integer(x.clone()))
}

/// Returns the integer matrix if every entry is integral.
pub fn to_integer(m: &Matrix<BigRational>) -> Option<Matrix<BigInt>> {
    if m.data.iter().all(|q| q.is_integer()) {
        Some(m.map(|q| q.to_integer()))
    } else {
        None
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det_bareiss(m: &Matrix<BigInt>) -> BigInt {
    assert!(m.is_square());
    let n = m.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(p) => {
                    a.swap_rows(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                a[(i, j)] = v / &prev;
            }
        }
        prev = a[(k, k)].clone();
    }
    sign * a[(n - 1, n - 1)].clone()
}

/// Gauss-Jordan inverse over the rationals.
pub fn inverse_rational(m: &Matrix<BigRational>) -> Result<Matrix<BigRational>> {
    if !m.is_square() {
        return Err(Error::input("inverse of a non-square matrix"));
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut inv = Matrix::identity(n);
    for k in 0..n {
        let p = (k..n)
            .find(|&i| !a[(i, k)].is_zero())
            .ok_or_else(|| Error::precondition("matrix is singular"))?;
        a.swap_rows(k, p);
        inv.swap_rows(k, p);
        let piv = a[(k, k)].recip();
        for j in 0..n {
            a[(k, j)] = &a[(k, j)] * &piv;
            inv[(k, j)] = &inv[(k, j)] * &piv;
        }
        for i in 0..n {
            if i != k && !a[(i, k)].is_zero() {
                let f = -a[(i, k)].clone();
                a.add_row_multiple(i, k, &f);
                inv.add_row_multiple(i, k, &f);
            }
        }
    }
    Ok(inv)
}

/// Inertia of a symmetric rational matrix: `(positive, negative, zero)`.
///
/// Computed by symmetric congruence elimination, so the result is exact.
pub fn inertia(m: &Matrix<BigRational>) -> (usize, usize, usize) {
    assert!(m.is_symmetric());
    let mut a = m.clone();
    let n = a.rows;
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !a[(i, i)].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                let pair = active.iter().flat_map(|&i| active.iter().map(move |&j| (i, j))).find(
                    |&(i, j)| i != j && !a[(i, j)].is_zero(),
                );
                match pair {
                    // e_i <- e_i + e_j turns an off-diagonal entry into a nonzero diagonal one
                    Some((i, j)) => {
                        let one = BigRational::one();
                        a.add_row_multiple(i, j, &one);
                        for r in 0..n {
                            let v = a[(r, i)].clone() + a[(r, j)].clone();
                            a[(r, i)] = v;
                        }
                        i
                    }
                    None => break,
                }
            }
        };
        let d = a[(p, p)].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            if a[(i, p)].is_zero() {
                continue;
            }
            let f = -(a[(i, p)].clone() / d.clone());
            a.add_row_multiple(i, p, &f);
            for r in 0..n {
                let v = a[(r, i)].clone() + a[(r, p)].clone() * f.clone();
                a[(r, i)] = v;
            }
        }
    }
    (pos, neg, n - pos - neg)
}

pub fn gcd_all(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// `(g, x)` with `dot(a, x) = g = gcd(a)` and `g >= 0`.
pub fn extended_gcd_vector(a: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut x = vec![BigInt::zero(); a.len()];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        let e = g.extended_gcd(ai);
        // e.gcd = e.x * g + e.y * ai
        for xj in x.iter_mut().take(i) {
            *xj = &*xj * &e.x;
        }
        x[i] = e.y;
        g = e.gcd;
    }
    if g.is_negative() {
        g = -g;
        for xj in &mut x {
            *xj = -xj.clone();
        }
    }
    (g, x)
}

/// Nearest-integer quotient `floor(a/b + 1/2)`.
pub fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let num = a * &two + b;
    let den = b * &two;
    num.div_floor(&den)
}

/// Row-style Hermite normal form: returns `(h, u)` with `u * m = h`, `u`
/// unimodular, `h` in echelon form with positive pivots and entries above
/// each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &Matrix<BigInt>) -> (Matrix<BigInt>, Matrix<BigInt>) {
    let (rows, cols) = (m.rows, m.cols);
    let mut h = m.clone();
    let mut u = Matrix::<BigInt>::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let nonzero: Vec<usize> = (r..rows).filter(|&i| !h[(i, c)].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let p = *nonzero.iter().min_by_key(|&&i| h[(i, c)].abs()).unwrap();
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..rows {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = -h[(i, c)].div_floor(&h[(r, c)]);
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
                if !h[(i, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h[(i, c)].div_floor(&h[(r, c)]);
            if !q.is_zero() {
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Integral basis (as columns) of `{x in Z^n : m x = 0}`, in Hermite form.
pub fn integer_kernel(m: &Matrix<BigInt>) -> Matrix<BigInt> {
    let n = m.cols;
    let (h, u) = hermite_normal_form(&m.transpose());
    let zero_rows: Vec<usize> =
        (0..h.rows).filter(|&i| (0..h.cols).all(|j| h[(i, j)].is_zero())).collect();
    let basis_rows = Matrix::from_fn(zero_rows.len(), n, |i, j| u[(zero_rows[i], j)].clone());
    let (reduced, _) = hermite_normal_form(&basis_rows);
    let k = (0..reduced.rows).filter(|&i| (0..n).any(|j| !reduced[(i, j)].is_zero())).count();
    Matrix::from_fn(n, k, |i, j| reduced[(j, i)].clone())
}

/// Solves `basis * c = v` for integer `c`, where the columns of `basis`
/// are linearly independent. Returns `None` if `v` is outside their span
/// or has non-integral coordinates.
pub fn integer_coordinates(basis: &Matrix<BigInt>, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let q = to_rational(basis);
    let k = q.cols;
    // normal equations are exact and well posed for independent columns
    let qt = q.transpose();
    let gram = qt.mul(&q);
    let rhs = qt.mul_vec(&v.iter().map(|x| BigRational::from_integer(x.clone())).collect::<Vec<_>>());
    let inv = inverse_rational(&gram).ok()?;
    let c = inv.mul_vec(&rhs);
    if c.iter().any(|x| !x.is_integer()) {
        return None;
    }
    let c: Vec<BigInt> = c.into_iter().map(|x| x.to_integer()).collect();
    if basis.mul_vec(&c) != v {
        return None;
    }
    debug_assert_eq!(c.len(), k);
    Some(c)
}

/// Unimodular `w` whose first column is the primitive vector `c`.
pub fn complete_to_unimodular(c: &[BigInt]) -> Result<Matrix<BigInt>> {
    let n = c.len();
    if gcd_all(c) != BigInt::one() {
        return Err(Error::precondition("vector is not primitive"));
    }
    let col = Matrix::from_fn(n, 1, |i, _| c[i].clone());
    let (h, u) = hermite_normal_form(&col);
    debug_assert!(h[(0, 0)].is_one());
    let w = to_integer(&inverse_rational(&to_rational(&u))?)
        .ok_or_else(|| Error::numerical("unimodular inverse is not integral"))?;
    debug_assert_eq!(w.column(0), c.to_vec());
    Ok(w)
}

pub fn is_zero_matrix<T: Clone + Num + Debug>(m: &Matrix<T>) -> bool {
    m.data.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> Matrix<BigInt> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let m = im(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(det_bareiss(&m), BigInt::from(4));
        let s = im(&[&[0, 1], &[1, 0]]);
        assert_eq!(det_bareiss(&s), BigInt::from(-1));
        assert_eq!(det_bareiss(&im(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn hnf_is_unimodular_transform() {
        let m = im(&[&[4, 6, 2], &[2, 3, 7], &[6, 9, 9]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(u.mul(&m), h);
        assert_eq!(det_bareiss(&u).abs(), BigInt::one());
        assert!(h[(0, 0)].is_positive());
    }

    #[test]
    fn kernel_of_single_row() {
        let a = im(&[&[2, 3, 5]]);
        let k = integer_kernel(&a);
        assert_eq!(k.cols(), 2);
        assert!(is_zero_matrix(&a.mul(&k)));
        // saturation: the kernel lattice has index one in its rational span
        let m = k.transpose().mul(&k);
        assert_eq!(det_bareiss(&m), BigInt::from(38));
    }

    #[test]
    fn extended_gcd_certificate() {
        let a: Vec<BigInt> = [12, -18, 30, 7].iter().map(|&x| BigInt::from(x)).collect();
        let (g, x) = extended_gcd_vector(&a);
        assert_eq!(g, BigInt::one());
        assert_eq!(dot(&a, &x), g);
    }

    #[test]
    fn completion_has_requested_column() {
        let c: Vec<BigInt> = [6, 10, 15].iter().map(|&x| BigInt::from(x)).collect();
        let w = complete_to_unimodular(&c).unwrap();
        assert_eq!(w.column(0), c);
        assert_eq!(det_bareiss(&w).abs(), BigInt::one());
    }

    #[test]
    fn inertia_of_hyperbolic_plane() {
        let u = to_rational(&im(&[&[0, 1], &[1, 0]]));
        assert_eq!(inertia(&u), (1, 1, 0));
        let z = to_rational(&im(&[&[0]]));
        assert_eq!(inertia(&z), (0, 0, 1));
    }

    #[test]
    fn nearest_integer_division() {
        let r = |a: i64, b: i64| round_div(&BigInt::from(a), &BigInt::from(b));
        assert_eq!(r(7, 2), BigInt::from(4));
        assert_eq!(r(-7, 2), BigInt::from(-3));
        assert_eq!(r(5, 3), BigInt::from(2));
        assert_eq!(r(-5, 3), BigInt::from(-2));
    }
}
