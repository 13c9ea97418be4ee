//! The Fourier-Mukai transform on cohomology as an isometry of the Mukai
//! lattice: construction, axioms and the μ-map component formulas.

use crate::error::{Error, Result};
use crate::lattice::{hyperbolic_completion, orthogonal_complement_quotient, MukaiLattice, MukaiVector};
use crate::linalg::{dot, extended_gcd_vector, inverse_rational, round_div, to_integer, to_rational, Matrix};
use crate::report::{Check, CheckList};
use crate::{IntMatrix, RatMatrix, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Rational matrix on Mukai coordinates together with the vector `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct FMIsometry {
    pub matrix: RatMatrix,
    pub v: MukaiVector,
    pub lattice: MukaiLattice,
}

/// Kernel `Σ a_i ⊗ b_i` with `a_i` on `X` and `b_i` on `X^∨`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KernelTermList {
    pub terms: Vec<(MukaiVector, MukaiVector)>,
}

#[derive(Clone, Debug)]
pub struct KernelMaps {
    pub fm: RatMatrix,
    pub fm_dual: RatMatrix,
    pub warning: Option<String>,
}

fn rat_vec(x: &[BigInt]) -> Vec<Rational> {
    x.iter().map(|a| Rational::from_integer(a.clone())).collect()
}

/// Cup-product integral `∫ x ∪ y = r s' + s r' + c·c'`.
pub fn cup_integral(mukai: &MukaiLattice, x: &MukaiVector, y: &MukaiVector) -> BigInt {
    mukai.h2().pair(&x.c, &y.c) + &x.r * &y.s + &x.s * &y.r
}

/// `α ↦ Σ (∫ a_i^∨ ∪ α) b_i^∨` and `β ↦ Σ (∫ b_i ∪ β) a_i`.
pub fn fm_from_kernel_terms(kernel: &KernelTermList, mukai: &MukaiLattice) -> Result<KernelMaps> {
    let n = mukai.dim();
    let mut fm = Matrix::<BigInt>::zeros(n, n);
    let mut fm_dual = Matrix::<BigInt>::zeros(n, n);
    for (a, b) in &kernel.terms {
        mukai.check(a)?;
        mukai.check(b)?;
        let (a_dual, b_dual) = (a.dual(), b.dual());
        for j in 0..n {
            let mut unit = vec![BigInt::zero(); n];
            unit[j] = BigInt::one();
            let e = MukaiVector::from_coords(&unit)?;
            let w = cup_integral(mukai, &a_dual, &e);
            let w_dual = cup_integral(mukai, b, &e);
            for (i, (bi, ai)) in b_dual.coords().iter().zip(a.coords()).enumerate() {
                fm[(i, j)] = &fm[(i, j)] + &w * bi;
                fm_dual[(i, j)] = &fm_dual[(i, j)] + &w_dual * &ai;
            }
        }
    }
    let warning = kernel.terms.is_empty().then(|| "empty kernel: zero map".to_string());
    Ok(KernelMaps { fm: to_rational(&fm), fm_dual: to_rational(&fm_dual), warning })
}

/// `Σ_μ e_μ ⊗ e^μ` with `∫ e_μ ∪ e^ν = δ`.
pub fn diagonal_kernel(mukai: &MukaiLattice) -> Result<KernelTermList> {
    let n = mukai.dim();
    let mut cup = mukai.gram().clone();
    cup[(0, n - 1)] = BigInt::one();
    cup[(n - 1, 0)] = BigInt::one();
    let inv = to_integer(&inverse_rational(&to_rational(&cup))?)
        .ok_or_else(|| Error::precondition("cup pairing is not unimodular"))?;
    let mut terms = Vec::with_capacity(n);
    for mu in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[mu] = BigInt::one();
        terms.push((MukaiVector::from_coords(&e)?, MukaiVector::from_coords(&inv.column(mu))?));
    }
    Ok(KernelTermList { terms })
}

/// Eichler transvection `x ↦ x + (x,e)y − (x,y)e − ½(y,y)(x,e)e` for
/// isotropic `e` and `y ⊥ e`.
pub fn eichler_transvection(mukai: &MukaiLattice, e: &[BigInt], y: &[BigInt]) -> Result<IntMatrix> {
    let g = mukai.gram();
    if !mukai.pair_coords(e, e).is_zero() || !mukai.pair_coords(e, y).is_zero() {
        return Err(Error::precondition("transvection needs isotropic e and y orthogonal to e"));
    }
    let yy = mukai.pair_coords(y, y);
    if yy.is_odd() {
        return Err(Error::precondition("transvection needs (y, y) even"));
    }
    let half = yy / BigInt::from(2);
    let ge = g.mul_vec(e);
    let gy = g.mul_vec(y);
    let n = e.len();
    Ok(Matrix::from_fn(n, n, |i, j| {
        let id = if i == j { BigInt::one() } else { BigInt::zero() };
        id + &y[i] * &ge[j] - &e[i] * &gy[j] - &half * &e[i] * &ge[j]
    }))
}

const TRANSVECTION_BUDGET: usize = 10_000;

/// Tracks `x = M v` while `M` is built from transvections.
struct Reducer<'a> {
    mukai: &'a MukaiLattice,
    m: IntMatrix,
    x: Vec<BigInt>,
    steps: usize,
}

impl<'a> Reducer<'a> {
    fn n(&self) -> usize {
        self.mukai.dim()
    }

    fn unit(&self, i: usize, k: &BigInt) -> Vec<BigInt> {
        let mut u = vec![BigInt::zero(); self.n()];
        u[i] = k.clone();
        u
    }

    fn f(&self) -> Vec<BigInt> {
        self.unit(self.n() - 1, &BigInt::one())
    }

    fn g(&self) -> Vec<BigInt> {
        self.unit(0, &-BigInt::one())
    }

    fn apply(&mut self, e: &[BigInt], y: &[BigInt]) -> Result<()> {
        if y.iter().all(Zero::is_zero) {
            return Ok(());
        }
        self.steps += 1;
        if self.steps > TRANSVECTION_BUDGET {
            return Err(Error::numerical("isometry search failed: transvection budget exceeded"));
        }
        let t = eichler_transvection(self.mukai, e, y)?;
        self.x = t.mul_vec(&self.x);
        self.m = t.mul(&self.m);
        Ok(())
    }

    // v = a f + b g + p e1 + q e2 + μ
    fn a(&self) -> BigInt {
        self.x[self.n() - 1].clone()
    }
    fn b(&self) -> BigInt {
        -self.x[0].clone()
    }
    fn p(&self) -> BigInt {
        self.x[1].clone()
    }
    fn q(&self) -> BigInt {
        self.x[2].clone()
    }

    /// Entries of `X = [[a, p], [−q, b]]`.
    fn xm(&self) -> [BigInt; 4] {
        [self.a(), self.p(), -self.q(), self.b()]
    }

    fn row1_add(&mut self, t: &BigInt) -> Result<()> {
        let (f, e1) = (self.f(), self.unit(1, t));
        self.apply(&f, &e1)
    }
    fn row2_add(&mut self, s: &BigInt) -> Result<()> {
        let (g, e2) = (self.g(), self.unit(2, &-s.clone()));
        self.apply(&g, &e2)
    }
    fn col1_add(&mut self, s: &BigInt) -> Result<()> {
        let (f, e2) = (self.f(), self.unit(2, &-s.clone()));
        self.apply(&f, &e2)
    }
    fn col2_add(&mut self, t: &BigInt) -> Result<()> {
        let (g, e1) = (self.g(), self.unit(1, t));
        self.apply(&g, &e1)
    }

    /// Smith form of `X` by elementary transvections: `X = diag(d1, d2)`
    /// with `d1 | d2`.
    fn smith(&mut self) -> Result<()> {
        loop {
            while !self.xm()[2].is_zero() {
                let [x00, _, x10, _] = self.xm();
                if x00.is_zero() {
                    self.row1_add(&BigInt::one())?;
                    continue;
                }
                self.row2_add(&-round_div(&x10, &x00))?;
                let [x00, _, x10, _] = self.xm();
                if !x10.is_zero() {
                    self.row1_add(&-round_div(&x00, &x10))?;
                }
            }
            while !self.xm()[1].is_zero() {
                let [x00, x01, _, _] = self.xm();
                if x00.is_zero() {
                    self.col1_add(&BigInt::one())?;
                    continue;
                }
                self.col2_add(&-round_div(&x01, &x00))?;
                let [x00, x01, _, _] = self.xm();
                if !x01.is_zero() {
                    self.col1_add(&-round_div(&x00, &x01))?;
                }
            }
            let [x00, x01, x10, x11] = self.xm();
            if !x10.is_zero() || !x01.is_zero() {
                continue;
            }
            let divides = if x00.is_zero() { x11.is_zero() } else { x11.is_multiple_of(&x00) };
            if divides {
                return Ok(());
            }
            self.row1_add(&BigInt::one())?;
        }
    }

    /// Negates `X` by two quarter turns in SL2.
    fn negate_plane(&mut self) -> Result<()> {
        let one = BigInt::one();
        for _ in 0..2 {
            self.row1_add(&one)?;
            self.row2_add(&-one.clone())?;
            self.row1_add(&one)?;
        }
        Ok(())
    }

    fn mu(&self) -> Vec<BigInt> {
        self.x[3..self.n() - 1].to_vec()
    }

    /// `y` in the complement of the first hyperbolic plane with `(μ, y)`
    /// equal to the gcd of the pairings of `μ`.
    fn mu_partner(&self) -> (BigInt, Vec<BigInt>) {
        let n = self.n();
        let mut full_mu = vec![BigInt::zero(); n];
        full_mu[3..n - 1].clone_from_slice(&self.mu());
        let functional = self.mukai.gram().mul_vec(&full_mu);
        let (g, y) = extended_gcd_vector(&functional[3..n - 1]);
        let mut full = vec![BigInt::zero(); n];
        full[3..n - 1].clone_from_slice(&y);
        (g, full)
    }
}

fn require_leading_hyperbolic_plane(mukai: &MukaiLattice) -> Result<()> {
    let g = mukai.h2().gram();
    let n = mukai.h2_rank();
    let ok = n >= 2
        && g[(0, 0)].is_zero()
        && g[(1, 1)].is_zero()
        && g[(0, 1)].is_one()
        && (2..n).all(|j| g[(0, j)].is_zero() && g[(1, j)].is_zero());
    if ok {
        Ok(())
    } else {
        Err(Error::precondition(
            "isometry search failed: the H² lattice must start with an orthogonal hyperbolic plane",
        ))
    }
}

/// Integral isometry `M` with `M v = (0,0,1)` and `M w = (−1,0,0)` for the
/// hyperbolic completion `w`, built from Eichler transvections.
pub fn standard_fm_isometry(v: &MukaiVector, mukai: &MukaiLattice) -> Result<FMIsometry> {
    let w = hyperbolic_completion(v, mukai)?;
    mukai.h2().is_even().then_some(()).ok_or_else(|| Error::precondition("H² lattice is not even"))?;
    require_leading_hyperbolic_plane(mukai)?;
    let n = mukai.dim();
    let mut red = Reducer { mukai, m: Matrix::identity(n), x: v.coords(), steps: 0 };

    red.smith()?;
    if red.xm().iter().all(Zero::is_zero) {
        // v lies in the complement of U ⊕ U; pull it into the f-coordinate
        let (g, y) = red.mu_partner();
        if !g.is_one() {
            return Err(Error::numerical("isometry search failed: pairing of v is not surjective"));
        }
        let neg: Vec<BigInt> = y.iter().map(|t| -t).collect();
        let f = red.f();
        red.apply(&f, &neg)?;
        red.smith()?;
    }
    let d1 = red.a();
    if !d1.abs().is_one() {
        let (g, y) = red.mu_partner();
        if !g.gcd(&d1).is_one() {
            return Err(Error::numerical("isometry search failed: cannot reduce the Smith pivot"));
        }
        let neg: Vec<BigInt> = y.iter().map(|t| -t).collect();
        let e1 = red.unit(1, &BigInt::one());
        red.apply(&e1, &neg)?;
        red.smith()?;
    }
    let a = red.a();
    if !a.abs().is_one() {
        return Err(Error::numerical("isometry search failed: Smith pivot is not a unit"));
    }
    let lambda: Vec<BigInt> =
        (0..n).map(|i| if i == 0 || i == n - 1 { BigInt::zero() } else { -&a * &red.x[i] }).collect();
    let g_vec = red.g();
    red.apply(&g_vec, &lambda)?;
    if a.is_negative() {
        red.negate_plane()?;
    }
    if red.x != red.f() {
        return Err(Error::numerical("isometry search failed: v was not reduced to the point class"));
    }
    // send the image of w to (−1, 0, 0) without moving (0, 0, 1)
    let w_img = red.m.mul_vec(&w.coords());
    let shift: Vec<BigInt> =
        (0..n).map(|i| if i == 0 || i == n - 1 { BigInt::zero() } else { -w_img[i].clone() }).collect();
    let f = red.f();
    red.apply(&f, &shift)?;
    debug_assert_eq!(red.m.mul_vec(&w.coords()), red.g());
    Ok(FMIsometry { matrix: to_rational(&red.m), v: v.clone(), lattice: mukai.clone() })
}

impl FMIsometry {
    pub fn new(matrix: RatMatrix, v: MukaiVector, lattice: MukaiLattice) -> Result<Self> {
        if matrix.rows() != lattice.dim() || matrix.cols() != lattice.dim() {
            return Err(Error::input(format!(
                "matrix is {}x{}, Mukai lattice has dimension {}",
                matrix.rows(),
                matrix.cols(),
                lattice.dim()
            )));
        }
        lattice.check(&v)?;
        Ok(FMIsometry { matrix, v, lattice })
    }

    pub fn identity(v: MukaiVector, lattice: MukaiLattice) -> Self {
        FMIsometry { matrix: Matrix::identity(lattice.dim()), v, lattice }
    }

    pub fn apply(&self, x: &MukaiVector) -> Vec<Rational> {
        self.matrix.mul_vec(&rat_vec(&x.coords()))
    }

    fn gram(&self) -> RatMatrix {
        to_rational(self.lattice.gram())
    }

    /// Adjoint with respect to the Mukai pairing, `G̃⁻¹ Mᵀ G̃`.
    pub fn mukai_adjoint(&self) -> Result<RatMatrix> {
        let g = self.gram();
        Ok(inverse_rational(&g)?.mul(&self.matrix.transpose()).mul(&g))
    }

    pub fn is_integral(&self) -> bool {
        to_integer(&self.matrix).is_some()
    }
}

pub fn verify_fm_axioms(fm: &FMIsometry) -> CheckList {
    let mut out = CheckList::new();
    let n = fm.lattice.dim();
    let g = fm.gram();
    let m = &fm.matrix;
    out.push(Check::exact("pairing_preserved", m.transpose().mul(&g).mul(m) == g));
    let f = rat_vec(&MukaiVector::point_class(n - 2).coords());
    out.push(Check::exact("v_to_point_class", fm.apply(&fm.v) == f));
    match orthogonal_complement_quotient(&fm.v, &fm.lattice) {
        Ok(q) => {
            let ok = q.complement_basis.iter().all(|u| fm.apply(u)[0].is_zero());
            out.push(Check::exact("complement_to_h2_h4", ok));
        }
        Err(e) => out.push(Check::exact("complement_to_h2_h4", false).with_detail(e.to_string())),
    }
    let id = Matrix::identity(n);
    let adjoint_ok = fm
        .mukai_adjoint()
        .map(|adj| adj.mul(m) == id && m.mul(&adj) == id)
        .unwrap_or(false);
    out.push(Check::exact("adjoint_is_inverse", adjoint_ok));
    let img = m.mul_vec(&f);
    let norm = dot(&img, &g.mul_vec(&img));
    out.push(Check::exact("image_of_point_class_isotropic", norm.is_zero()));
    if fm.v.is_primitive() {
        out.push(Check::exact("integral", fm.is_integral()));
    }
    out
}

/// Components of `M(0, α, 0)` and the μ-map value.
#[derive(Clone, Debug, PartialEq)]
pub struct FMComponentReport {
    pub h0: Rational,
    pub h2: Vec<Rational>,
    pub h4: Rational,
    pub mu_of_alpha: Vec<Rational>,
    pub c_hat: Vec<Rational>,
    pub r: BigInt,
    pub checks: CheckList,
}

pub fn fm_components_explicit(fm: &FMIsometry, alpha: &[BigInt]) -> Result<FMComponentReport> {
    let n = fm.lattice.h2_rank();
    if alpha.len() != n {
        return Err(Error::input("α has the wrong length"));
    }
    let r = fm.v.r.clone();
    if !r.is_positive() {
        return Err(Error::precondition("component formulas require positive rank"));
    }
    let rq = Rational::from_integer(r.clone());
    let h2_gram = to_rational(fm.lattice.h2().gram());
    let pair_h2 = |a: &[Rational], b: &[Rational]| dot(a, &h2_gram.mul_vec(b));

    let e_prime = fm.apply(&MukaiVector::point_class(n));
    let c_hat: Vec<Rational> = e_prime[1..=n].iter().map(|x| -x.clone()).collect();
    let image = fm.apply(&MukaiVector::new(0, alpha.to_vec(), 0));
    let (h0, h2, h4) = (image[0].clone(), image[1..=n].to_vec(), image[n + 1].clone());

    let alpha_q = rat_vec(alpha);
    let c_e = rat_vec(&fm.v.c);
    let alpha_dot_c = pair_h2(&alpha_q, &c_e);
    let mu: Vec<Rational> = h2
        .iter()
        .zip(&c_hat)
        .map(|(h, c)| -h.clone() + &alpha_dot_c / &rq * c)
        .collect();

    let mut checks = CheckList::new();
    checks.push(Check::exact("rank_of_image_of_point_class", e_prime[0] == rq));
    checks.push(Check::exact("h0_formula", h0 == -alpha_dot_c.clone()));
    let c_hat_sq = pair_h2(&c_hat, &c_hat);
    let h4_expected = pair_h2(&mu, &c_hat) / &rq
        - &alpha_dot_c * c_hat_sq / (Rational::from_integer(BigInt::from(2)) * &rq * &rq);
    checks.push(Check::exact("h4_formula", h4 == h4_expected));
    checks.push(Check::exact("mu_isometry", pair_h2(&alpha_q, &alpha_q) == pair_h2(&mu, &mu)));
    Ok(FMComponentReport { h0, h2, h4, mu_of_alpha: mu, c_hat, r, checks })
}

/// Induced map `v^⊥/Zv → Λ`, `ū ↦ (M u)_{H²}`.
#[derive(Clone, Debug)]
pub struct InducedIsometry {
    /// Columns are images of the quotient basis.
    pub matrix: IntMatrix,
    pub quotient_gram: IntMatrix,
    pub checks: CheckList,
}

pub fn induced_h2_isometry(fm: &FMIsometry) -> Result<InducedIsometry> {
    let axioms = verify_fm_axioms(fm);
    if let Some(bad) = axioms.first_failure() {
        return Err(Error::precondition(format!(
            "verify_fm_axioms failed at `{}`; induced map undefined",
            bad.name
        )));
    }
    let q = orthogonal_complement_quotient(&fm.v, &fm.lattice)?;
    let n = fm.lattice.h2_rank();
    let mut cols = Vec::with_capacity(q.quotient_basis.len());
    for u in &q.quotient_basis {
        let img = fm.apply(u);
        let c: Option<Vec<BigInt>> =
            img[1..=n].iter().map(|x| x.is_integer().then(|| x.to_integer())).collect();
        cols.push(c.ok_or_else(|| Error::numerical("induced map is not integral"))?);
    }
    let b = Matrix::from_columns(&cols)?;
    let mut checks = CheckList::new();
    let pulled = b.transpose().mul(fm.lattice.h2().gram()).mul(&b);
    checks.push(Check::exact("induced_isometry", &pulled == q.quotient.gram()));
    let seven = BigInt::from(7);
    let shift_ok = q.quotient_basis.iter().zip(&cols).all(|(u, col)| {
        let img = fm.apply(&u.scaled_add(&seven, &fm.v));
        img[1..=n] == rat_vec(col)[..]
    });
    checks.push(Check::exact("representative_independent", shift_ok));
    Ok(InducedIsometry { matrix: b, quotient_gram: q.quotient.gram().clone(), checks })
}
