//! The spin module `S = S⁺ ⊕ S⁻ = Λ^even ⊕ Λ^odd` of `R⁴` in the basis
//! `{1, f₁∧f₂, f₁, f₂}`, with the complex structures on `S⁺` and the
//! antilinear symmetry `ε`.

use crate::error::{Error, Result};
use crate::forms::{self, TwoForm};
use crate::linalg::Matrix;
use crate::report::{Check, CheckList};
use crate::scalar::{complex_abs, Scalar};
use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Spinor<T> = [Complex<T>; 4];
pub type CMatrix<T> = Matrix<Complex<T>>;

/// Indices of `S⁺ = span{1, f₁∧f₂}` and `S⁻ = span{f₁, f₂}`.
pub const PLUS: [usize; 2] = [0, 1];
pub const MINUS: [usize; 2] = [2, 3];

fn c<T: Scalar>(re: i64, im: i64) -> Complex<T> {
    Complex::new(T::from_i64(re), T::from_i64(im))
}

fn real_c<T: Scalar>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Clifford generators and grading projectors.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordModule<T: Scalar> {
    generators: [CMatrix<T>; 4],
    p_plus: CMatrix<T>,
    p_minus: CMatrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoFormAction<T: Scalar> {
    pub action: CMatrix<T>,
    pub self_dual: CMatrix<T>,
    pub anti_self_dual: CMatrix<T>,
}

impl<T: Scalar> Default for CliffordModule<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> CliffordModule<T> {
    pub fn new() -> Self {
        // wedge and contraction with f1, f2 on {1, f12, f1, f2}
        let mut w1 = Matrix::zeros(4, 4);
        w1[(2, 0)] = c(1, 0);
        w1[(1, 3)] = c(1, 0);
        let mut k1 = Matrix::zeros(4, 4);
        k1[(0, 2)] = c(1, 0);
        k1[(3, 1)] = c(1, 0);
        let mut w2 = Matrix::zeros(4, 4);
        w2[(3, 0)] = c(1, 0);
        w2[(1, 2)] = c(-1, 0);
        let mut k2 = Matrix::zeros(4, 4);
        k2[(0, 3)] = c(1, 0);
        k2[(2, 1)] = c(-1, 0);
        let i = c::<T>(0, 1);
        let generators = [
            w1.sub(&k1),
            w1.add(&k1).scale(&i),
            w2.sub(&k2),
            w2.add(&k2).scale(&i),
        ];
        let mut p_plus = Matrix::zeros(4, 4);
        let mut p_minus = Matrix::zeros(4, 4);
        for k in PLUS {
            p_plus[(k, k)] = c(1, 0);
        }
        for k in MINUS {
            p_minus[(k, k)] = c(1, 0);
        }
        CliffordModule { generators, p_plus, p_minus }
    }

    pub fn generator(&self, i: usize) -> &CMatrix<T> {
        &self.generators[i]
    }

    pub fn generators(&self) -> &[CMatrix<T>; 4] {
        &self.generators
    }

    pub fn p_plus(&self) -> &CMatrix<T> {
        &self.p_plus
    }

    pub fn p_minus(&self) -> &CMatrix<T> {
        &self.p_minus
    }

    /// `c(v) = Σ vᵢ cᵢ`.
    pub fn clifford(&self, v: &[T; 4]) -> CMatrix<T> {
        let mut m = Matrix::zeros(4, 4);
        for (vi, ci) in v.iter().zip(&self.generators) {
            accumulate(&mut m, ci, vi);
        }
        m
    }

    /// `Σ_{i<j} F_ij cᵢcⱼ` and its self-dual and anti-self-dual parts.
    pub fn two_form_action(&self, f: &TwoForm<T>) -> Result<TwoFormAction<T>> {
        forms::check_antisymmetric(f, 0.0)?;
        Ok(TwoFormAction {
            action: self.raw_two_form(f),
            self_dual: self.raw_two_form(&forms::self_dual_part(f)),
            anti_self_dual: self.raw_two_form(&forms::anti_self_dual_part(f)),
        })
    }

    fn raw_two_form(&self, f: &TwoForm<T>) -> CMatrix<T> {
        let mut m = Matrix::zeros(4, 4);
        for i in 0..4 {
            for j in i + 1..4 {
                if f[i][j].is_zero() {
                    continue;
                }
                let cc = self.generators[i].mul(&self.generators[j]);
                accumulate(&mut m, &cc, &f[i][j]);
            }
        }
        m
    }

    /// `(I_k on R⁴, I_k^{S⁺})` for `k ∈ {1, 2, 3}`.
    pub fn complex_structure(&self, k: usize) -> Result<(Matrix<T>, CMatrix<T>)> {
        if !(1..=3).contains(&k) {
            return Err(Error::input(format!("complex structure index {k} is not in 1..=3")));
        }
        let one = T::one();
        let zero = T::zero();
        let mut real = Matrix::<T>::zeros(4, 4);
        // I_k e_a = sign * e_b
        let images: [[(usize, i64); 4]; 3] = [
            [(1, 1), (0, -1), (3, 1), (2, -1)],
            [(2, 1), (3, -1), (0, -1), (1, 1)],
            [(3, 1), (2, 1), (1, -1), (0, -1)],
        ];
        for (a, &(b, s)) in images[k - 1].iter().enumerate() {
            real[(b, a)] = if s > 0 { one.clone() } else { zero.clone() - one.clone() };
        }
        let plus = match k {
            1 => [[c(0, -1), c(0, 0)], [c(0, 0), c(0, 1)]],
            2 => [[c(0, 0), c(-1, 0)], [c(1, 0), c(0, 0)]],
            _ => [[c(0, 0), c(0, 1)], [c(0, 1), c(0, 0)]],
        };
        let plus = Matrix::from_rows(plus.iter().map(|r| r.to_vec()).collect())?;
        Ok((real, plus))
    }

    /// `I_k^{S⁺}` extended by zero on `S⁻` to an operator on `S`.
    pub fn complex_structure_on_s(&self, k: usize) -> Result<CMatrix<T>> {
        let (_, plus) = self.complex_structure(k)?;
        let mut m = Matrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                m[(PLUS[a], PLUS[b])] = plus[(a, b)].clone();
            }
        }
        Ok(m)
    }
}

/// `m += s·a`, touching only the nonzero entries of `a`.
fn accumulate<T: Scalar>(m: &mut CMatrix<T>, a: &CMatrix<T>, s: &T) {
    if s.is_zero() {
        return;
    }
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let x = &a[(i, j)];
            if !x.is_zero() {
                m[(i, j)] = m[(i, j)].clone() + x.scale(s.clone());
            }
        }
    }
}

/// `ε` is `E ∘ conj` for the real matrix `E`.
pub fn epsilon_matrix<T: Scalar>() -> CMatrix<T> {
    let mut e = Matrix::zeros(4, 4);
    e[(1, 0)] = c(-1, 0);
    e[(0, 1)] = c(1, 0);
    e[(3, 2)] = c(1, 0);
    e[(2, 3)] = c(-1, 0);
    e
}

pub fn epsilon_apply<T: Scalar>(xi: &Spinor<T>) -> Spinor<T> {
    let conj: Vec<Complex<T>> = xi.iter().map(|z| z.conj()).collect();
    let out = epsilon_matrix::<T>().mul_vec(&conj);
    std::array::from_fn(|i| out[i].clone())
}

/// `⟨a, b⟩ = Σ conj(aᵢ) bᵢ`.
pub fn hermitian<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * y.clone())
}

/// `⟨⟨a, b⟩⟩ = ⟨εa, b⟩`.
pub fn symplectic<T: Scalar>(a: &Spinor<T>, b: &Spinor<T>) -> Complex<T> {
    hermitian(&epsilon_apply(a), b)
}

pub fn apply<T: Scalar>(m: &CMatrix<T>, v: &Spinor<T>) -> Spinor<T> {
    let out = m.mul_vec(v);
    std::array::from_fn(|i| out[i].clone())
}

pub fn adjoint<T: Scalar>(m: &CMatrix<T>) -> CMatrix<T> {
    m.transpose().map(|z| z.conj())
}

fn max_abs<T: Scalar>(m: &CMatrix<T>) -> f64 {
    (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .map(|(i, j)| complex_abs(&m[(i, j)]))
        .fold(0.0, f64::max)
}

fn max_abs_vec<T: Scalar>(v: &[Complex<T>]) -> f64 {
    v.iter().map(complex_abs).fold(0.0, f64::max)
}

fn restrict<T: Scalar>(m: &CMatrix<T>, rows: [usize; 2], cols: [usize; 2]) -> CMatrix<T> {
    Matrix::from_fn(2, 2, |a, b| m[(rows[a], cols[b])].clone())
}

/// Accumulates residuals of one identity; exact scalars must hit zero.
struct Tally {
    name: &'static str,
    worst: f64,
    exact_ok: bool,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, worst: 0.0, exact_ok: true }
    }

    fn matrix<T: Scalar>(&mut self, m: &CMatrix<T>) {
        self.worst = self.worst.max(max_abs(m));
        if T::EXACT {
            self.exact_ok &= (0..m.rows()).all(|i| (0..m.cols()).all(|j| m[(i, j)].is_zero()));
        }
    }

    fn vector<T: Scalar>(&mut self, v: &[Complex<T>]) {
        self.worst = self.worst.max(max_abs_vec(v));
        if T::EXACT {
            self.exact_ok &= v.iter().all(Zero::is_zero);
        }
    }

    fn scalar<T: Scalar>(&mut self, z: Complex<T>) {
        self.vector(&[z]);
    }

    fn flag(&mut self, ok: bool) {
        self.exact_ok &= ok;
        if !ok {
            self.worst = f64::INFINITY;
        }
    }

    fn finish<T: Scalar>(self, tol: f64) -> Check {
        if T::EXACT {
            Check::exact(self.name, self.exact_ok)
        } else {
            Check::within(self.name, self.worst, tol)
        }
    }
}

/// Uniform on `[-1, 1]` for floats; small-height rationals for exact types,
/// which keeps the Gaussian-rational suite fast.
fn sample<T: Scalar>(rng: &mut ChaCha8Rng) -> T {
    if T::EXACT {
        let den = rng.gen_range(1..=32);
        T::from_ratio(rng.gen_range(-den..=den), den)
    } else {
        T::from_ratio(rng.gen_range(-1_000_000..=1_000_000), 1_000_000)
    }
}

fn sample_vector<T: Scalar>(rng: &mut ChaCha8Rng) -> [T; 4] {
    std::array::from_fn(|_| sample(rng))
}

fn sample_spinor<T: Scalar>(rng: &mut ChaCha8Rng, support: &[usize]) -> Spinor<T> {
    let mut s: Spinor<T> = std::array::from_fn(|_| Complex::zero());
    for &k in support {
        s[k] = Complex::new(sample(rng), sample(rng));
    }
    s
}

fn sample_form<T: Scalar>(rng: &mut ChaCha8Rng) -> TwoForm<T> {
    let mut f = forms::zero::<T>();
    for i in 0..4 {
        for j in i + 1..4 {
            let x: T = sample(rng);
            f[i][j] = x.clone();
            f[j][i] = -x;
        }
    }
    f
}

fn sub_spinor<T: Scalar>(a: &Spinor<T>, b: &Spinor<T>) -> Spinor<T> {
    std::array::from_fn(|i| a[i].clone() - b[i].clone())
}

fn scale_spinor<T: Scalar>(a: &Spinor<T>, s: &Complex<T>) -> Spinor<T> {
    std::array::from_fn(|i| a[i].clone() * s.clone())
}

fn norm_sq<T: Scalar>(a: &[Complex<T>]) -> T {
    hermitian(a, a).re
}

fn real_vec_apply<T: Scalar>(m: &Matrix<T>, v: &[T; 4]) -> [T; 4] {
    let out = m.mul_vec(v);
    std::array::from_fn(|i| out[i].clone())
}

/// Coefficients `λ_k(e_a, e_b)` with
/// `c(e_a)c(e_b)|_{S⁺} = −δ_ab Id + Σ_k λ_k I_k^{S⁺}`, found by projecting
/// onto the orthogonal basis `I_k^{S⁺}` (`tr(I_k I_l) = −2δ_kl`).
/// Only real parts are kept; a deformed module shows up as a residual.
pub fn contraction_table<T: Scalar>(module: &CliffordModule<T>) -> Result<[[[T; 3]; 4]; 4]> {
    let mut table: [[[T; 3]; 4]; 4] =
        std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| T::zero())));
    let structures: Vec<CMatrix<T>> =
        (1..=3).map(|k| module.complex_structure(k).map(|p| p.1)).collect::<Result<_>>()?;
    for a in 0..4 {
        for b in 0..4 {
            let prod = module.generator(a).mul(module.generator(b));
            let mut x = restrict(&prod, PLUS, PLUS);
            if a == b {
                x = x.add(&Matrix::identity(2));
            }
            for (k, ik) in structures.iter().enumerate() {
                let tr = {
                    let p = ik.mul(&x);
                    p[(0, 0)].clone() + p[(1, 1)].clone()
                };
                let coeff = tr * Complex::new(T::from_ratio(-1, 2), T::zero());
                table[a][b][k] = coeff.re;
            }
        }
    }
    Ok(table)
}

/// Runs every identity of the spin module over `samples` random inputs.
pub fn verify_spin_identities<T: Scalar>(
    module: &CliffordModule<T>,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckList> {
    if samples == 0 {
        return Err(Error::input("samples must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id4: CMatrix<T> = Matrix::identity(4);
    let gens = module.generators();
    let mut out = CheckList::new();

    let mut t = Tally::new("clifford_relations");
    for i in 0..4 {
        for j in 0..4 {
            let anti = gens[i].mul(&gens[j]).add(&gens[j].mul(&gens[i]));
            let target = if i == j { id4.scale(&c(-2, 0)) } else { Matrix::zeros(4, 4) };
            t.matrix(&anti.sub(&target));
        }
    }
    out.push(t.finish::<T>(tol));

    let mut t = Tally::new("anti_self_adjoint");
    for g in gens {
        t.matrix(&adjoint(g).add(g));
    }
    out.push(t.finish::<T>(tol));

    let mut t = Tally::new("grading_exchange");
    for g in gens {
        t.matrix(&restrict(g, PLUS, PLUS));
        t.matrix(&restrict(g, MINUS, MINUS));
    }
    out.push(t.finish::<T>(tol));

    let mut t = Tally::new("norm_multiplicativity");
    for _ in 0..samples {
        let v = sample_vector::<T>(&mut rng);
        let xi = sample_spinor::<T>(&mut rng, &[0, 1, 2, 3]);
        let lhs = norm_sq(&apply(&module.clifford(&v), &xi));
        let vv = v.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone());
        t.scalar(real_c(lhs - vv * norm_sq(&xi)));
    }
    out.push(t.finish::<T>(tol));

    let mut t = Tally::new("sd_asd_chirality");
    for _ in 0..samples {
        let f = sample_form::<T>(&mut rng);
        let act = module.two_form_action(&f)?;
        t.matrix(&act.self_dual.mul(module.p_minus()));
        t.matrix(&act.anti_self_dual.mul(module.p_plus()));
        t.matrix(&act.action.sub(&act.self_dual).sub(&act.anti_self_dual));
    }
    out.push(t.finish::<T>(tol));

    let structures: Vec<(Matrix<T>, CMatrix<T>)> =
        (1..=3).map(|k| module.complex_structure(k)).collect::<Result<_>>()?;
    let mut t = Tally::new("quaternion_relations");
    let id2: CMatrix<T> = Matrix::identity(2);
    let real_id: Matrix<T> = Matrix::identity(4);
    for k in 0..3 {
        let (r, p) = (&structures[k].0, &structures[k].1);
        let (rn, pn) = (&structures[(k + 1) % 3].0, &structures[(k + 1) % 3].1);
        let (rnn, pnn) = (&structures[(k + 2) % 3].0, &structures[(k + 2) % 3].1);
        t.matrix(&p.mul(p).add(&id2));
        t.matrix(&p.mul(pn).sub(pnn));
        let real_sq = r.mul(r).add(&real_id);
        let real_prod = r.mul(rn).sub(rnn);
        t.matrix(&real_sq.map(|x| real_c(x.clone())));
        t.matrix(&real_prod.map(|x| real_c(x.clone())));
    }
    out.push(t.finish::<T>(tol));

    let mut plus_t = Tally::new("compatibility_positive");
    let mut minus_t = Tally::new("compatibility_negative");
    for _ in 0..samples {
        let v = sample_vector::<T>(&mut rng);
        let xi = sample_spinor::<T>(&mut rng, &PLUS);
        let eta = sample_spinor::<T>(&mut rng, &MINUS);
        for k in 1..=3 {
            let (r, _) = &structures[k - 1];
            let on_s = module.complex_structure_on_s(k)?;
            let civ = module.clifford(&real_vec_apply(r, &v));
            let lhs = apply(&civ, &apply(&on_s, &xi));
            plus_t.vector(&sub_spinor(&lhs, &apply(&module.clifford(&v), &xi)));
            let lhs = apply(&on_s, &apply(&module.clifford(&v), &eta));
            minus_t.vector(&sub_spinor(&lhs, &apply(&civ, &eta)));
        }
    }
    out.push(plus_t.finish::<T>(tol));
    out.push(minus_t.finish::<T>(tol));

    let mut t = Tally::new("half_clifford_omega");
    for (k, w) in forms::hyperkahler_forms::<T>().iter().enumerate() {
        let act = module.two_form_action(w)?.action;
        let plus = restrict(&act, PLUS, PLUS).scale(&Complex::new(T::from_ratio(1, 2), T::zero()));
        t.matrix(&plus.sub(&structures[k].1));
        t.matrix(&act.mul(module.p_minus()));
    }
    out.push(t.finish::<T>(tol));

    let mut t = Tally::new("epsilon_properties");
    let basis: Vec<Spinor<T>> = (0..4)
        .map(|k| std::array::from_fn(|i| if i == k { c(1, 0) } else { Complex::zero() }))
        .collect();
    for e in &basis {
        let twice = epsilon_apply(&epsilon_apply(e));
        t.vector(&sub_spinor(&twice, &scale_spinor(e, &c(-1, 0))));
    }
    for _ in 0..samples {
        let xi = sample_spinor::<T>(&mut rng, &[0, 1, 2, 3]);
        let lambda = Complex::new(sample::<T>(&mut rng), sample::<T>(&mut rng));
        let lhs = epsilon_apply(&scale_spinor(&xi, &lambda));
        t.vector(&sub_spinor(&lhs, &scale_spinor(&epsilon_apply(&xi), &lambda.conj())));
        let twice = epsilon_apply(&epsilon_apply(&xi));
        t.vector(&sub_spinor(&twice, &scale_spinor(&xi, &c(-1, 0))));
        let v = sample_vector::<T>(&mut rng);
        let cv = module.clifford(&v);
        t.vector(&sub_spinor(&epsilon_apply(&apply(&cv, &xi)), &apply(&cv, &epsilon_apply(&xi))));
        for k in 1..=3 {
            let ik = module.complex_structure_on_s(k)?;
            let xp = sample_spinor::<T>(&mut rng, &PLUS);
            t.vector(&sub_spinor(&epsilon_apply(&apply(&ik, &xp)), &apply(&ik, &epsilon_apply(&xp))));
        }
    }
    out.push(t.finish::<T>(tol));

    let mut t = Tally::new("symplectic_form");
    let f1f2 = symplectic(&basis[2], &basis[3]);
    t.flag(!f1f2.is_zero());
    t.scalar(f1f2.clone() + symplectic(&basis[3], &basis[2]));
    t.scalar(f1f2 - c(1, 0));
    for _ in 0..samples {
        for support in [PLUS, MINUS] {
            let a = sample_spinor::<T>(&mut rng, &support);
            let b = sample_spinor::<T>(&mut rng, &support);
            t.scalar(symplectic(&a, &b) + symplectic(&b, &a));
        }
    }
    out.push(t.finish::<T>(tol));

    let table = contraction_table(module)?;
    let mut t = Tally::new("contraction_identity");
    for _ in 0..samples {
        let w = sample_vector::<T>(&mut rng);
        let v = sample_vector::<T>(&mut rng);
        let prod = module.clifford(&w).mul(&module.clifford(&v));
        let dot = w.iter().zip(&v).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        let mut rhs = Matrix::<Complex<T>>::identity(2).scale(&real_c(-dot));
        for k in 0..3 {
            let mut lam = T::zero();
            for a in 0..4 {
                for b in 0..4 {
                    lam = lam + w[a].clone() * v[b].clone() * table[a][b][k].clone();
                }
            }
            rhs = rhs.add(&structures[k].1.scale(&real_c(lam)));
        }
        t.matrix(&restrict(&prod, PLUS, PLUS).sub(&rhs));
        // the table agrees with the self-dual projection of w ∧ v against ω_k
        let wv = forms::wedge_vectors(&w, &v);
        for (k, om) in forms::hyperkahler_forms::<T>().iter().enumerate() {
            let mut lam = T::zero();
            for a in 0..4 {
                for b in 0..4 {
                    lam = lam + w[a].clone() * v[b].clone() * table[a][b][k].clone();
                }
            }
            t.scalar(real_c(lam - forms::inner(&wv, om)));
        }
    }
    out.push(t.finish::<T>(tol));

    let mut t = Tally::new("dirac_symbol");
    for _ in 0..samples {
        let k = sample_vector::<T>(&mut rng);
        let d = module.clifford(&k);
        let kk = k.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone());
        t.matrix(&adjoint(&d).add(&d));
        t.matrix(&adjoint(&d).mul(&d).sub(&id4.scale(&real_c(kk))));
    }
    out.push(t.finish::<T>(tol));

    Ok(out)
}

impl<T: Scalar> CliffordModule<T> {
    /// `c(e_a)` applied to a spinor, used by numerical consumers.
    pub fn apply_generator(&self, a: usize, xi: &Spinor<T>) -> Spinor<T> {
        apply(&self.generators[a], xi)
    }
}

pub fn unit_spinor<T: Scalar>(k: usize) -> Spinor<T> {
    std::array::from_fn(|i| if i == k { Complex::new(T::one(), T::zero()) } else { Complex::zero() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::One;

    type Q = Rational;

    fn e(i: usize) -> [Q; 4] {
        std::array::from_fn(|k| if k == i { Q::one() } else { Q::zero() })
    }

    #[test]
    fn generator_on_vacuum() {
        let m = CliffordModule::<Q>::new();
        let out = apply(&m.clifford(&e(0)), &unit_spinor(0));
        assert_eq!(out, unit_spinor::<Q>(2));
    }

    #[test]
    fn generator_squares() {
        let m = CliffordModule::<Q>::new();
        let sq = m.generator(0).mul(m.generator(0));
        assert_eq!(sq, Matrix::identity(4).scale(&c(-1, 0)));
    }

    #[test]
    fn unit_vector_preserves_norm() {
        let m = CliffordModule::<f64>::new();
        let v = [0.6, 0.8, 0.0, 0.0];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let xi = sample_spinor::<f64>(&mut rng, &[0, 1, 2, 3]);
            let out = apply(&m.clifford(&v), &xi);
            assert!((norm_sq(&out).sqrt() - norm_sq(&xi).sqrt()).abs() <= 1e-12);
        }
    }

    #[test]
    fn omega_one_action() {
        let m = CliffordModule::<Q>::new();
        let act = m.two_form_action(&forms::hyperkahler_forms()[0]).unwrap();
        assert_eq!(act.action.mul(m.p_minus()), Matrix::zeros(4, 4));
        let half = restrict(&act.action, PLUS, PLUS).scale(&Complex::new(Q::from_ratio(1, 2), Q::zero()));
        assert_eq!(half, m.complex_structure(1).unwrap().1);
    }

    #[test]
    fn asd_form_kills_positive_spinors() {
        let m = CliffordModule::<Q>::new();
        let f = forms::add(&forms::basis(0, 1), &forms::scale(&forms::basis(2, 3), &-Q::one()));
        let act = m.two_form_action(&f).unwrap();
        assert_eq!(act.action.mul(m.p_plus()), Matrix::zeros(4, 4));
        assert_eq!(m.two_form_action(&forms::zero()).unwrap().action, Matrix::zeros(4, 4));
        let mut bad = forms::zero::<Q>();
        bad[0][1] = Q::one();
        assert!(m.two_form_action(&bad).is_err());
    }

    #[test]
    fn displayed_complex_structures() {
        let m = CliffordModule::<Q>::new();
        let (_, i1) = m.complex_structure(1).unwrap();
        assert_eq!(i1[(0, 0)], c(0, -1));
        assert_eq!(i1[(1, 1)], c(0, 1));
        let (_, i2) = m.complex_structure(2).unwrap();
        let (_, i3) = m.complex_structure(3).unwrap();
        assert_eq!(i1.mul(&i2), i3);
        assert!(m.complex_structure(4).is_err());
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon_apply::<Q>(&unit_spinor(2)), unit_spinor(3));
        let s = symplectic::<Q>(&unit_spinor(2), &unit_spinor(3));
        assert_eq!(s, c(1, 0));
        assert_eq!(symplectic::<Q>(&unit_spinor(3), &unit_spinor(2)), c(-1, 0));
    }

    #[test]
    fn contraction_table_on_first_pair() {
        let m = CliffordModule::<Q>::new();
        let table = contraction_table(&m).unwrap();
        // e1 ∧ e2 pairs with ω₁ only
        assert_eq!(table[0][1], [Q::one(), Q::zero(), Q::zero()]);
        assert_eq!(table[1][0], [-Q::one(), Q::zero(), Q::zero()]);
    }

    #[test]
    fn exact_suite_passes() {
        let m = CliffordModule::<Q>::new();
        let report = verify_spin_identities(&m, 20, 0.0, 1).unwrap();
        assert!(report.all_passed(), "{:?}", report.first_failure());
    }

    #[test]
    fn float_suite_passes_and_detects_perturbation() {
        let m = CliffordModule::<f64>::new();
        let report = verify_spin_identities(&m, 200, 1e-12, 2).unwrap();
        assert!(report.all_passed(), "{:?}", report.first_failure());
        let mut bad = m.clone();
        bad.generators[0][(2, 0)] = Complex::new(1.0 + 1e-6, 0.0);
        let report = verify_spin_identities(&bad, 10, 1e-12, 2).unwrap();
        assert!(!report.get("clifford_relations").unwrap().passed);
    }
}
