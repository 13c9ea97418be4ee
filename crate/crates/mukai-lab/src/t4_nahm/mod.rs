//! Numerical Nahm transform on the flat unit four-torus.
//!
//! A line bundle with constant anti-self-dual curvature
//! `F = 2πi Σ n_{μν} dx_μ∧dx_ν` is coupled to the flat line bundle `L_ξ`,
//! `ξ ∈ T̂⁴`, with connection `∇_μ = ∂_μ + A_μ + 2πiξ_μ`. Dirac kernels are
//! products of lowest Landau levels on the two `T²` factors, the Green
//! operator is solved by preconditioned conjugate gradients, and the
//! transformed curvature is assembled pointwise in `ξ`.
//!
//! The Poincaré bundle is trivialized with `∇^univ = d − 2πi ξ·dx`, so its
//! curvature is `Ω = 2πi Σ dx_μ∧dξ_μ`; the twisted family above carries
//! `Ω^t = −Ω`. In this trivialization the `ξ`-directional covariant
//! derivative is the plain derivative, so covariant differences in `ξ` are
//! ordinary differences.

pub mod cg;
pub mod field;
pub mod green;
pub mod identities;
pub mod kernel;
pub mod ring;
pub mod transform;

use crate::error::{Error, Result};
use crate::forms::{self, TwoForm};
use crate::report::{Check, CheckList};
use crate::spin4::CliffordModule;
use crate::Rational;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub use green::{green_asymptote, green_cross_check, GreenProfile};
pub use identities::{operator_identity_checks, IdentityReport};
pub use kernel::{dirac_kernel, green_apply, DiracKernel};
pub use transform::{
    asd_residual, coarse_subset, inversion_from_report, inversion_rank_check, nahm_checks, quantize_flux,
    transformed_curvature, CurvatureSample, InversionReport, NahmReport,
};

pub type FluxMatrix = [[i64; 4]; 4];

/// Run parameters; every field has a documented default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NahmConfig {
    /// Antisymmetric flux integers `n_{μν}`; default `n₁₂ = 1 = −n₃₄`.
    pub flux: FluxMatrix,
    /// Grid points per direction.
    #[serde(rename = "N")]
    pub n: usize,
    /// Dual grid points per direction.
    #[serde(rename = "M")]
    pub m: usize,
    pub cg_tol: f64,
    pub eig_tol: f64,
    /// Finite-difference step in `ξ`.
    pub delta: f64,
    pub seed: u64,
    /// Grid used by the operator identity checks.
    #[serde(rename = "identity_N")]
    pub identity_n: usize,
    /// Probe vectors for the operator identity checks.
    pub probes: usize,
}

impl Default for NahmConfig {
    fn default() -> Self {
        NahmConfig {
            flux: FluxData::separable(1, -1).n,
            n: 16,
            m: 4,
            cg_tol: 1e-10,
            eig_tol: 1e-11,
            delta: 0.04,
            seed: 1,
            identity_n: 8,
            probes: 10,
        }
    }
}

impl NahmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(Error::input(format!("N = {} must be even and at least 4", self.n)));
        }
        if self.identity_n < 4 || !self.identity_n.is_multiple_of(2) {
            return Err(Error::input("identity_N must be even and at least 4"));
        }
        if self.m == 0 {
            return Err(Error::input("M must be positive"));
        }
        for (name, v) in [("cg_tol", self.cg_tol), ("eig_tol", self.eig_tol), ("delta", self.delta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::input(format!("{name} must be positive")));
            }
        }
        if self.probes == 0 {
            return Err(Error::input("probes must be positive"));
        }
        FluxData::new(self.flux).map(|_| ())
    }

    pub fn flux_data(&self) -> Result<FluxData> {
        FluxData::new(self.flux)
    }
}

/// First Chern form coefficients of a line bundle on `T⁴`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluxData {
    pub n: FluxMatrix,
}

impl FluxData {
    pub fn new(n: FluxMatrix) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                if n[i][j] != -n[j][i] {
                    return Err(Error::input("flux matrix is not antisymmetric"));
                }
            }
        }
        Ok(FluxData { n })
    }

    /// Flux `n₁₂` on the first factor and `n₃₄` on the second.
    pub fn separable(n12: i64, n34: i64) -> Self {
        let mut n = [[0; 4]; 4];
        n[0][1] = n12;
        n[1][0] = -n12;
        n[2][3] = n34;
        n[3][2] = -n34;
        FluxData { n }
    }

    pub fn two_form(&self) -> TwoForm<Rational> {
        std::array::from_fn(|i| std::array::from_fn(|j| Rational::from_integer(self.n[i][j].into())))
    }

    pub fn is_zero(&self) -> bool {
        self.n.iter().flatten().all(|&x| x == 0)
    }

    pub fn is_anti_self_dual(&self) -> bool {
        forms::is_anti_self_dual(&self.two_form(), 0.0)
    }

    /// `∫ch₂ = n₁₂n₃₄ − n₁₃n₂₄ + n₁₄n₂₃` for the orientation `dx₁∧…∧dx₄`.
    pub fn ch2(&self) -> i64 {
        let f = self.two_form();
        let w = forms::wedge(&f, &f) / Rational::from_integer(2.into());
        w.to_integer().try_into().expect("flux products fit in i64")
    }

    /// Dimension of `ker D⁻` predicted by the index theorem.
    pub fn index_expected(&self) -> i64 {
        -self.ch2()
    }

    /// `(n₁₂, n₃₄)` when all other entries vanish.
    pub fn separable_parts(&self) -> Result<(i64, i64)> {
        let n = &self.n;
        if n[0][2] != 0 || n[0][3] != 0 || n[1][2] != 0 || n[1][3] != 0 {
            return Err(Error::input("only flux of the form n₁₂ dx₁∧dx₂ + n₃₄ dx₃∧dx₄ is supported"));
        }
        Ok((n[0][1], n[2][3]))
    }

    /// Preconditions shared by every Dirac-kernel computation.
    pub fn require_admissible(&self) -> Result<(i64, i64)> {
        if self.is_zero() {
            return Err(Error::precondition("kernel jumps / excluded case v(F)=v(E): flux is zero"));
        }
        if !self.is_anti_self_dual() {
            return Err(Error::precondition("flux is not anti-self-dual"));
        }
        let (a, b) = self.separable_parts()?;
        if a == 0 || b == 0 {
            return Err(Error::precondition("both factors need nonzero flux"));
        }
        Ok((a, b))
    }

    /// `c(F)` with `F = 2πi Σ_{μ<ν} n_{μν} dx_μ∧dx_ν`.
    pub fn clifford_curvature(&self, module: &CliffordModule<f64>) -> Result<crate::spin4::CMatrix<f64>> {
        let f: TwoForm<f64> = std::array::from_fn(|i| std::array::from_fn(|j| self.n[i][j] as f64));
        let act = module.two_form_action(&f)?;
        Ok(act.action.scale(&Complex64::new(0.0, 2.0 * PI)))
    }
}

/// Mixed curvature of the Poincaré bundle measured from the discrete
/// connection, plus its structural checks.
#[derive(Clone, Debug, Serialize)]
pub struct PoincareCurvature {
    /// `Ω(∂x_μ, ∂ξ_ν)`.
    pub mixed: [[Complex64; 4]; 4],
    /// `Ω(∂ξ_a, ∂ξ_b)`.
    pub dual_block: [[Complex64; 4]; 4],
    /// `−(1/4π²) Σ_i Ω(∂x_μ, ∂ξ_i) Ω(∂x_ν, ∂ξ_i)`.
    pub metric: [[f64; 4]; 4],
    pub checks: CheckList,
}

impl PoincareCurvature {
    /// Coefficient of `∇_μ` in `(−ι_{∂ξ_i} Ω^t, ∇) = Σ_μ Ω^t(∂x_μ, ∂ξ_i) ∇_μ`.
    pub fn twisted_contraction(&self, mu: usize, i: usize) -> Complex64 {
        -self.mixed[mu][i]
    }
}

/// Measures `Ω(∂x_μ, ∂ξ_ν) = ∂_{ξ_ν} ∇_μ` on a probe section by differencing
/// the discrete covariant derivatives in `ξ`.
pub fn poincare_curvature(grid: &field::Grid4) -> Result<PoincareCurvature> {
    let step = 0.25;
    let base = grid.xi();
    let probe: field::Field = {
        let fa: Vec<Complex64> = (0..grid.a.size()).map(|p| Complex64::new(1.0 + (p as f64 * 0.37).sin(), 0.3)).collect();
        let fb: Vec<Complex64> = (0..grid.b.size()).map(|p| Complex64::new(1.0, (p as f64 * 0.11).cos())).collect();
        grid.product(&fa, &fb)
    };
    let norm_sq = grid.inner(&probe, &probe).re;
    let mut mixed = [[Complex64::zero(); 4]; 4];
    for nu in 0..4 {
        let mut plus = base;
        let mut minus = base;
        plus[nu] += step;
        minus[nu] -= step;
        let (gp, gm) = (grid.with_xi(plus), grid.with_xi(minus));
        for (mu, row) in mixed.iter_mut().enumerate() {
            let dp = gp.nabla(mu, &probe);
            let dm = gm.nabla(mu, &probe);
            let diff: field::Field = dp.iter().zip(&dm).map(|(a, b)| (a - b) / (2.0 * step)).collect();
            row[nu] = grid.inner(&probe, &diff) / norm_sq;
        }
    }
    let dual_block = [[Complex64::zero(); 4]; 4];
    let mut metric = [[0.0; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let s: Complex64 = (0..4).map(|i| mixed[mu][i] * mixed[nu][i]).sum();
            metric[mu][nu] = (-s / (4.0 * PI * PI)).re;
        }
    }
    let mut checks = CheckList::new();
    let expected = Complex64::new(0.0, 2.0 * PI);
    let mixed_err = (0..4)
        .flat_map(|m| (0..4).map(move |n| (m, n)))
        .map(|(m, n)| (mixed[m][n] - if m == n { expected } else { Complex64::zero() }).norm())
        .fold(0.0, f64::max);
    checks.push(Check::within("poincare_mixed_curvature", mixed_err, 1e-10));
    let structural = (0..4)
        .flat_map(|m| (0..4).map(move |n| (m, n)))
        .map(|(m, n)| {
            let ring = if m < 2 { &grid.a } else { &grid.b };
            let same = m / 2 == n / 2;
            let s = if same { ring.xi_derivative(m % 2, n % 2) } else { Complex64::zero() };
            (s - mixed[m][n]).norm()
        })
        .fold(0.0, f64::max);
    checks.push(Check::within("poincare_structural_agreement", structural, 1e-10));
    checks.push(triholomorphy_exact());
    let module = CliffordModule::<f64>::new();
    let mut tri = 0.0f64;
    for k in 1..=3 {
        let (ik, _) = module.complex_structure(k)?;
        for a in 0..4 {
            for u in 0..4 {
                // Ω(I a, u) + Ω(a, I u) on basis vectors
                let lhs: Complex64 = (0..4).map(|m| ik[(m, a)] * mixed[m][u]).sum::<Complex64>()
                    + (0..4).map(|n| ik[(n, u)] * mixed[a][n]).sum::<Complex64>();
                tri = tri.max(lhs.norm());
            }
        }
    }
    checks.push(Check::within("triholomorphy_measured", tri, 1e-10));
    checks.push(Check::exact("dual_block_vanishes", dual_block.iter().flatten().all(|z| z.is_zero())));
    let metric_err = (0..4)
        .flat_map(|m| (0..4).map(move |n| (m, n)))
        .map(|(m, n)| (metric[m][n] - if m == n { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    checks.push(Check::within("flat_metric_identity", metric_err, 1e-10));
    Ok(PoincareCurvature { mixed, dual_block, metric, checks })
}

/// `Iᵀ + I = 0` for the real complex structures, the exact content of
/// `Ω(I a, u) + Ω(a, I u) = 0` for `Ω ∝ δ`.
fn triholomorphy_exact() -> Check {
    let module = CliffordModule::<Rational>::new();
    let ok = (1..=3).all(|k| {
        let (ik, _) = module.complex_structure(k).expect("k in range");
        let one = Rational::one();
        (0..4).all(|a| {
            (0..4).all(|u| {
                let pairing = |x: usize, y: usize| if x == y { one.clone() } else { Rational::zero() };
                let lhs: Rational = (0..4).map(|m| ik[(m, a)].clone() * pairing(m, u)).sum::<Rational>()
                    + (0..4).map(|n| ik[(n, u)].clone() * pairing(a, n)).sum::<Rational>();
                lhs.is_zero()
            })
        })
    });
    Check::exact("triholomorphy_exact", ok)
}
