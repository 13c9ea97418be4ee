//! Executable core of Mukai duality: exact Mukai-lattice and
//! Fourier-Mukai arithmetic, the four-dimensional spin module, and a
//! numerical Nahm transform on the flat four-torus.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod fm;
pub mod forms;
pub mod lattice;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod spin4;
pub mod t4_nahm;

pub use error::{Error, Result};
pub use num_bigint::BigInt;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
/// Integer matrix with arbitrary-precision entries.
pub type IntMatrix = linalg::Matrix<num_bigint::BigInt>;
/// Rational matrix with arbitrary-precision entries.
pub type RatMatrix = linalg::Matrix<Rational>;
/// Spin module over Gaussian rationals.
pub type ExactSpinModule = spin4::CliffordModule<Rational>;
/// Spin module over double-precision complex numbers.
pub type SpinModule = spin4::CliffordModule<f64>;
pub type SpinModuleF32 = spin4::CliffordModule<f32>;
