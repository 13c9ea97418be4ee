//! Scalar fields shared by the exact and floating-point code paths.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::Neg;

/// A real field usable as the coefficient type of matrices and spinors.
///
/// Exact implementors compare with `==`; float implementors compare up to a
/// tolerance.
pub trait Scalar:
    Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync + 'static
{
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// `|self| <= tol`, or `self == 0` for exact types.
    fn is_negligible(&self, tol: f64) -> bool;

    fn from_i64(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn is_negligible(&self, tol: f64) -> bool {
        (self.abs() as f64) <= tol
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        let n = self.numer().to_f64().unwrap_or(f64::NAN);
        let d = self.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
}

/// Complex extension of a [`Scalar`].
pub type ComplexOf<T> = Complex<T>;

pub fn complex_negligible<T: Scalar>(z: &Complex<T>, tol: f64) -> bool {
    if T::EXACT {
        z.re.is_zero() && z.im.is_zero()
    } else {
        let (re, im) = (z.re.to_f64(), z.im.to_f64());
        re.hypot(im) <= tol
    }
}

pub fn complex_abs<T: Scalar>(z: &Complex<T>) -> f64 {
    z.re.to_f64().hypot(z.im.to_f64())
}

/// Parses `"p/q"`, `"p"` or a JSON integer into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(BigRational::new(p, q))
            }
        }
        None => text.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom() == &BigInt::from(1) {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn is_integral(q: &BigRational) -> bool {
    q.is_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let q = parse_rational("-6/4").unwrap();
        assert_eq!(format_rational(&q), "-3/2");
        assert_eq!(format_rational(&parse_rational("7").unwrap()), "7");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn negligible_semantics() {
        assert!(1e-13f64.is_negligible(1e-12));
        assert!(!BigRational::from_ratio(1, 1_000_000).is_negligible(1.0));
        assert!(complex_negligible(&Complex::new(0.0f64, 1e-14), 1e-12));
    }
}
