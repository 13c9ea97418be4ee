//! Preconditioned conjugate gradients for Hermitian positive operators.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[allow(clippy::len_without_is_empty)]
pub trait LinearOperator {
    fn len(&self) -> usize;
    fn apply(&self, x: &[Complex64], out: &mut [Complex64]);
    fn precondition(&self, r: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(r);
    }
    fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `A x = b` to relative residual `tol`. The default initial guess
/// is `b / ρ` with `ρ` the Rayleigh quotient of `b`, which is exact when `b`
/// is an eigenvector.
pub fn solve<A: LinearOperator + ?Sized>(
    op: &A,
    b: &[Complex64],
    guess: Option<Vec<Complex64>>,
    tol: f64,
    max_iterations: usize,
) -> Result<(Vec<Complex64>, CgOutcome)> {
    let n = op.len();
    assert_eq!(b.len(), n);
    let b_norm = op.inner(b, b).re.sqrt();
    if b_norm == 0.0 {
        return Ok((vec![Complex64::new(0.0, 0.0); n], CgOutcome { iterations: 0, relative_residual: 0.0 }));
    }
    let mut ax = vec![Complex64::new(0.0, 0.0); n];
    let mut x = match guess {
        Some(g) => g,
        None => {
            op.apply(b, &mut ax);
            let rho = op.inner(b, &ax).re / (b_norm * b_norm);
            b.iter().map(|z| z / rho).collect()
        }
    };
    op.apply(&x, &mut ax);
    let mut r: Vec<Complex64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    drop(ax);
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    let mut ap = vec![Complex64::new(0.0, 0.0); n];
    let mut res = op.inner(&r, &r).re.sqrt() / b_norm;
    if res <= tol {
        return Ok((x, CgOutcome { iterations: 0, relative_residual: res }));
    }
    op.precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = op.inner(&r, &z).re;
    let mut history = Vec::new();
    for it in 1..=max_iterations {
        op.apply(&p, &mut ap);
        let pap = op.inner(&p, &ap).re;
        if pap.is_nan() || pap <= 0.0 {
            return Err(Error::numerical(format!("operator is not positive along a search direction (pAp = {pap})")));
        }
        let alpha = rz / pap;
        for ((xi, pi), (ri, api)) in x.iter_mut().zip(&p).zip(r.iter_mut().zip(&ap)) {
            *xi += pi * alpha;
            *ri -= api * alpha;
        }
        res = op.inner(&r, &r).re.sqrt() / b_norm;
        history.push(res);
        if res <= tol {
            return Ok((x, CgOutcome { iterations: it, relative_residual: res }));
        }
        op.precondition(&r, &mut z);
        let rz_new = op.inner(&r, &z).re;
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + *pi * beta;
        }
    }
    let tail: Vec<String> = history.iter().rev().take(5).map(|r| format!("{r:.3e}")).collect();
    Err(Error::numerical(format!(
        "conjugate gradients did not reach {tol:e} in {max_iterations} iterations; last residuals {}",
        tail.join(", ")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diagonal(Vec<f64>);

    impl LinearOperator for Diagonal {
        fn len(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
            for ((o, xi), d) in out.iter_mut().zip(x).zip(&self.0) {
                *o = xi * d;
            }
        }
    }

    #[test]
    fn solves_diagonal_system() {
        let op = Diagonal((1..=50).map(|k| k as f64).collect());
        let b: Vec<Complex64> = (0..50).map(|k| Complex64::new(1.0, k as f64)).collect();
        let (x, out) = solve(&op, &b, None, 1e-12, 100).unwrap();
        assert!(out.relative_residual <= 1e-12);
        for (k, xi) in x.iter().enumerate() {
            assert!((xi * (k as f64 + 1.0) - b[k]).norm() < 1e-9);
        }
    }

    #[test]
    fn eigenvector_rhs_needs_no_iterations() {
        let op = Diagonal(vec![2.0, 3.0, 5.0]);
        let b = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(0.0, 0.0)];
        let (_, out) = solve(&op, &b, None, 1e-12, 10).unwrap();
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn iteration_cap_reports_failure() {
        let op = Diagonal((1..=100).map(|k| (k * k) as f64).collect());
        let b = vec![Complex64::new(1.0, 0.0); 100];
        assert!(matches!(solve(&op, &b, None, 1e-14, 2), Err(Error::Numerical(_))));
    }
}
