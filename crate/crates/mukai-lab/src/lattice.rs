//! Exact arithmetic on the K3 lattice and the Mukai lattice.
//!
//! Mukai coordinates are ordered `(r, c_1, ..., c_n, s)`; the H²-block uses
//! the Gram matrix of the chosen [`IntegerLattice`].

use crate::error::{Error, Result};
use crate::linalg::{
    complete_to_unimodular, det_bareiss, dot, extended_gcd_vector, gcd_all, inertia,
    integer_coordinates, integer_kernel, to_rational, Matrix,
};
use crate::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::fmt;

/// Symmetric integer Gram matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegerLattice {
    gram: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeInvariants {
    pub rank: usize,
    #[serde(serialize_with = "serialize_big")]
    pub determinant: BigInt,
    pub signature: (usize, usize),
    pub nullity: usize,
    pub is_even: bool,
    pub is_unimodular: bool,
    pub is_nondegenerate: bool,
}

fn serialize_big<S: serde::Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    use num_traits::ToPrimitive;
    match n.to_i64() {
        Some(x) => s.serialize_i64(x),
        None => s.serialize_str(&n.to_string()),
    }
}

impl IntegerLattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() || gram.rows() == 0 {
            return Err(Error::input("Gram matrix must be square and non-empty"));
        }
        if !gram.is_symmetric() {
            return Err(Error::input("Gram matrix is not symmetric"));
        }
        Ok(IntegerLattice { gram })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        let rows = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn hyperbolic_plane() -> Self {
        Self::from_i64(&[vec![0, 1], vec![1, 0]]).expect("static Gram")
    }

    /// Negated Cartan matrix of E8 (Bourbaki labelling, branch node 4).
    pub fn e8_negative() -> Self {
        let edges = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
        let mut g = Matrix::<BigInt>::zeros(8, 8);
        for i in 0..8 {
            g[(i, i)] = BigInt::from(-2);
        }
        for &(a, b) in &edges {
            g[(a, b)] = BigInt::one();
            g[(b, a)] = BigInt::one();
        }
        IntegerLattice { gram: g }
    }

    pub fn direct_sum(parts: &[IntegerLattice]) -> Self {
        let blocks: Vec<IntMatrix> = parts.iter().map(|p| p.gram.clone()).collect();
        IntegerLattice { gram: Matrix::direct_sum(&blocks) }
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn pair(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        dot(a, &self.gram.mul_vec(b))
    }

    pub fn norm(&self, a: &[BigInt]) -> BigInt {
        self.pair(a, a)
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn invariants(&self) -> LatticeInvariants {
        let determinant = det_bareiss(&self.gram);
        let (pos, neg, nullity) = inertia(&to_rational(&self.gram));
        LatticeInvariants {
            rank: self.rank(),
            is_unimodular: determinant.abs().is_one(),
            determinant,
            signature: (pos, neg),
            nullity,
            is_even: self.is_even(),
            is_nondegenerate: nullity == 0,
        }
    }
}

/// `H²(K3, Z)` as `U ⊕ U ⊕ U ⊕ E8(−1) ⊕ E8(−1)`, hyperbolic planes first.
pub fn k3_lattice() -> IntegerLattice {
    let u = IntegerLattice::hyperbolic_plane();
    let e8 = IntegerLattice::e8_negative();
    IntegerLattice::direct_sum(&[u.clone(), u.clone(), u, e8.clone(), e8])
}

pub fn lattice_invariants(lattice: &IntegerLattice) -> LatticeInvariants {
    lattice.invariants()
}

/// Mukai vector `(r, c, s)` over a fixed H²-lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MukaiVector {
    pub r: BigInt,
    pub c: Vec<BigInt>,
    pub s: BigInt,
}

impl MukaiVector {
    pub fn new(r: impl Into<BigInt>, c: Vec<BigInt>, s: impl Into<BigInt>) -> Self {
        MukaiVector { r: r.into(), c, s: s.into() }
    }

    pub fn from_i64(r: i64, c: &[i64], s: i64) -> Self {
        MukaiVector::new(r, c.iter().map(|&x| BigInt::from(x)).collect(), s)
    }

    pub fn zero(h2_rank: usize) -> Self {
        MukaiVector::new(0, vec![BigInt::zero(); h2_rank], 0)
    }

    /// The class `[X]* = (0, 0, 1)`.
    pub fn point_class(h2_rank: usize) -> Self {
        MukaiVector::new(0, vec![BigInt::zero(); h2_rank], 1)
    }

    pub fn h2_rank(&self) -> usize {
        self.c.len()
    }

    pub fn coords(&self) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(self.c.len() + 2);
        out.push(self.r.clone());
        out.extend(self.c.iter().cloned());
        out.push(self.s.clone());
        out
    }

    pub fn from_coords(x: &[BigInt]) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::input("Mukai coordinates need at least two entries"));
        }
        let n = x.len();
        Ok(MukaiVector::new(x[0].clone(), x[1..n - 1].to_vec(), x[n - 1].clone()))
    }

    /// `(r, c, s)^∨ = (r, −c, s)`.
    pub fn dual(&self) -> Self {
        MukaiVector::new(self.r.clone(), self.c.iter().map(|x| -x).collect(), self.s.clone())
    }

    pub fn content(&self) -> BigInt {
        gcd_all(&self.coords())
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    pub fn divide_by_content(&self) -> Result<Self> {
        let g = self.content();
        if g.is_zero() {
            return Err(Error::input("zero vector has no content"));
        }
        let x: Vec<BigInt> = self.coords().iter().map(|a| a / &g).collect();
        Self::from_coords(&x)
    }

    pub fn scaled_add(&self, k: &BigInt, other: &MukaiVector) -> Self {
        let x: Vec<BigInt> =
            self.coords().iter().zip(other.coords()).map(|(a, b)| a + k * b).collect();
        Self::from_coords(&x).expect("same length")
    }

    /// Parses `(r,c,s)` where `c` is `0` (the zero class) or a bracketed list.
    pub fn parse_short(text: &str, h2_rank: usize) -> Result<Self> {
        let t = text.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| Error::input(format!("vector `{t}` must look like (r,c,s)")))?;
        let (r, rest) = inner
            .split_once(',')
            .ok_or_else(|| Error::input(format!("vector `{t}` must have three parts")))?;
        let (c, s) = rest
            .rsplit_once(',')
            .ok_or_else(|| Error::input(format!("vector `{t}` must have three parts")))?;
        let int = |x: &str| -> Result<BigInt> {
            x.trim().parse().map_err(|_| Error::input(format!("`{x}` is not an integer")))
        };
        let c = c.trim();
        let c_vec = if let Some(list) = c.strip_prefix('[').and_then(|x| x.strip_suffix(']')) {
            list.split(',').filter(|p| !p.trim().is_empty()).map(int).collect::<Result<Vec<_>>>()?
        } else if int(c)?.is_zero() {
            vec![BigInt::zero(); h2_rank]
        } else {
            return Err(Error::input("the H² part must be 0 or a bracketed list"));
        };
        if c_vec.len() != h2_rank {
            return Err(Error::input(format!(
                "H² part has {} entries, lattice rank is {h2_rank}",
                c_vec.len()
            )));
        }
        Ok(MukaiVector::new(int(r)?, c_vec, int(s)?))
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.c.iter().map(|x| x.to_string()).collect();
        write!(f, "({}, [{}], {})", self.r, c.join(", "), self.s)
    }
}

/// `Z ⊕ Λ ⊕ Z` with the Mukai pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct MukaiLattice {
    h2: IntegerLattice,
    gram: IntMatrix,
}

impl MukaiLattice {
    pub fn new(h2: IntegerLattice) -> Self {
        let n = h2.rank();
        let mut g = Matrix::<BigInt>::zeros(n + 2, n + 2);
        g[(0, n + 1)] = BigInt::from(-1);
        g[(n + 1, 0)] = BigInt::from(-1);
        for i in 0..n {
            for j in 0..n {
                g[(i + 1, j + 1)] = h2.gram()[(i, j)].clone();
            }
        }
        MukaiLattice { h2, gram: g }
    }

    pub fn k3() -> Self {
        Self::new(k3_lattice())
    }

    pub fn h2(&self) -> &IntegerLattice {
        &self.h2
    }

    pub fn h2_rank(&self) -> usize {
        self.h2.rank()
    }

    pub fn dim(&self) -> usize {
        self.h2.rank() + 2
    }

    /// Gram matrix `G̃` of the Mukai pairing in `(r, c, s)` coordinates.
    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn as_lattice(&self) -> IntegerLattice {
        IntegerLattice { gram: self.gram.clone() }
    }

    pub fn check(&self, v: &MukaiVector) -> Result<()> {
        if v.h2_rank() != self.h2_rank() {
            return Err(Error::input(format!(
                "vector has H² rank {}, lattice has {}",
                v.h2_rank(),
                self.h2_rank()
            )));
        }
        Ok(())
    }

    pub fn pair(&self, v: &MukaiVector, w: &MukaiVector) -> Result<BigInt> {
        self.check(v)?;
        self.check(w)?;
        Ok(self.h2.pair(&v.c, &w.c) - &v.r * &w.s - &v.s * &w.r)
    }

    pub fn pair_coords(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        dot(x, &self.gram.mul_vec(y))
    }
}

/// `v(E) = (r, c₁, c₁²/2 − c₂ + r)`.
pub fn mukai_vector(
    r: impl Into<BigInt>,
    c1: Vec<BigInt>,
    c2: impl Into<BigInt>,
    h2: &IntegerLattice,
) -> Result<MukaiVector> {
    if c1.len() != h2.rank() {
        return Err(Error::input("c1 has the wrong length"));
    }
    let r = r.into();
    let sq = h2.norm(&c1);
    if sq.is_odd() {
        return Err(Error::input("half-integer Mukai component: c1² is odd"));
    }
    let s = sq / 2 - c2.into() + &r;
    Ok(MukaiVector::new(r, c1, s))
}

pub fn mukai_pairing(v: &MukaiVector, w: &MukaiVector, h2: &IntegerLattice) -> Result<BigInt> {
    MukaiLattice::new(h2.clone()).pair(v, w)
}

/// `χ(v, w) = −(v, w)`; for `v = w` also the moduli dimension `(v, v) + 2`.
pub fn euler_characteristic_and_dimension(
    v: &MukaiVector,
    w: &MukaiVector,
    h2: &IntegerLattice,
) -> Result<(BigInt, Option<BigInt>)> {
    let p = mukai_pairing(v, w, h2)?;
    let dim = (v == w).then(|| &p + BigInt::from(2));
    Ok((-p, dim))
}

/// Integral basis of `v^⊥` together with the quotient `v^⊥ / Zv`.
#[derive(Clone, Debug)]
pub struct ComplementQuotient {
    /// Basis of `v^⊥`; `v` itself is the entry at `v_index`.
    pub complement_basis: Vec<MukaiVector>,
    pub v_index: usize,
    /// Representatives of a basis of the quotient (the complement basis
    /// without `v`).
    pub quotient_basis: Vec<MukaiVector>,
    pub quotient: IntegerLattice,
}

fn require_primitive_isotropic(mukai: &MukaiLattice, v: &MukaiVector) -> Result<()> {
    mukai.check(v)?;
    if v.coords().iter().all(Zero::is_zero) {
        return Err(Error::precondition("v must be nonzero"));
    }
    if !v.is_primitive() {
        return Err(Error::precondition(format!(
            "v is not primitive (content {}): divide by content first",
            v.content()
        )));
    }
    if !mukai.pair(v, v)?.is_zero() {
        return Err(Error::precondition("v is not isotropic: quotient pairing undefined"));
    }
    Ok(())
}

/// Basis of `v^⊥` from the Hermite form of the pairing constraint, then a
/// unimodular change of basis that makes `v` a basis vector.
pub fn orthogonal_complement_quotient(
    v: &MukaiVector,
    mukai: &MukaiLattice,
) -> Result<ComplementQuotient> {
    require_primitive_isotropic(mukai, v)?;
    let n = mukai.dim();
    let functional = mukai.gram().mul_vec(&v.coords());
    let constraint = Matrix::from_fn(1, n, |_, j| functional[j].clone());
    let kernel = integer_kernel(&constraint);
    let coords = integer_coordinates(&kernel, &v.coords())
        .ok_or_else(|| Error::numerical("v is not in the computed complement"))?;
    let k = kernel.cols();
    let (basis, v_index) = match coords.iter().position(|x| x.abs().is_one()) {
        Some(j) => {
            // swapping column j for v keeps the basis unimodular
            let mut b = kernel.clone();
            for i in 0..n {
                b[(i, j)] = v.coords()[i].clone();
            }
            (b, j)
        }
        None => (kernel.mul(&complete_to_unimodular(&coords)?), 0),
    };
    let complement_basis: Vec<MukaiVector> = (0..k)
        .map(|j| MukaiVector::from_coords(&basis.column(j)))
        .collect::<Result<_>>()?;
    let quotient_basis: Vec<MukaiVector> = complement_basis
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != v_index)
        .map(|(_, u)| u.clone())
        .collect();
    let m = quotient_basis.len();
    let gram = Matrix::from_fn(m, m, |i, j| {
        mukai.pair_coords(&quotient_basis[i].coords(), &quotient_basis[j].coords())
    });
    Ok(ComplementQuotient {
        complement_basis,
        v_index,
        quotient_basis,
        quotient: IntegerLattice::new(gram)?,
    })
}

/// `w` with `(v, w) = 1` and `(w, w) = 0`.
pub fn hyperbolic_completion(v: &MukaiVector, mukai: &MukaiLattice) -> Result<MukaiVector> {
    require_primitive_isotropic(mukai, v)?;
    if !mukai.h2().is_even() {
        return Err(Error::precondition("hyperbolic completion needs an even lattice"));
    }
    let functional = mukai.gram().mul_vec(&v.coords());
    let (g, x) = extended_gcd_vector(&functional);
    if !g.is_one() {
        return Err(Error::precondition(format!(
            "pairing with v has image {g}Z; the ambient lattice is not unimodular at v"
        )));
    }
    let x = MukaiVector::from_coords(&x)?;
    let half: BigInt = mukai.pair(&x, &x)? / BigInt::from(2);
    Ok(x.scaled_add(&-half, v))
}
