//! Coupled Dirac kernels and the Green operator `G = (D⁻D⁺)⁻¹ = (∇*∇)⁻¹`.

use super::cg::{self, CgOutcome};
use super::field::{self, Field, Grid4, HalfSpinor, LaplacianOperator};
use super::ring::{factor_spectrum, EigenSettings, FactorRing, FactorSpectrum};
use super::{FluxData, NahmConfig};
use crate::error::{Error, Result};
use crate::spin4::{CliffordModule, MINUS, PLUS};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Orthonormal basis of `ker D⁻` at one dual point.
#[derive(Clone, Debug)]
pub struct DiracKernel {
    pub xi: [f64; 4],
    pub basis: Vec<HalfSpinor>,
    /// Lowest eigenvalue of `D⁺D⁻` on `S⁻` among the computed levels.
    pub lowest_minus: f64,
    /// Lowest computed eigenvalue of `D⁻D⁺ = ∇*∇` on `S⁺`.
    pub lowest_plus: f64,
    /// Smallest level of `D⁺D⁻` excluded from the kernel.
    pub first_excluded: f64,
    /// Largest `‖D⁻ψ‖` over the basis.
    pub dirac_residual: f64,
    /// Largest entry of `c(F)` on `S⁺`.
    pub plus_curvature: f64,
}

impl DiracKernel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub(crate) fn eigen_settings(cfg: &NahmConfig, seed: u64) -> EigenSettings {
    EigenSettings { tol: cfg.eig_tol, seed, ..EigenSettings::default() }
}

pub(crate) fn factor_pair(flux: &FluxData, cfg: &NahmConfig, n_grid: usize) -> Result<(FactorRing, FactorRing)> {
    cfg.validate()?;
    let (na, nb) = flux.require_admissible()?;
    Ok((FactorRing::new(na, n_grid, [0.0; 2])?, FactorRing::new(nb, n_grid, [0.0; 2])?))
}

/// Eigen-decomposition of a 2×2 Hermitian matrix, ascending.
fn hermitian2(m: [[Complex64; 2]; 2]) -> ([f64; 2], [[Complex64; 2]; 2]) {
    let a = m[0][0].re;
    let d = m[1][1].re;
    let b = m[0][1];
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let rad = (half * half + b.norm_sqr()).sqrt();
    let values = [mean - rad, mean + rad];
    if b.norm() <= 1e-300 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        return if a <= d { (values, [[one, zero], [zero, one]]) } else { (values, [[zero, one], [one, zero]]) };
    }
    let vec_for = |lam: f64| {
        let v = [b, Complex64::new(lam - a, 0.0)];
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    };
    (values, [vec_for(values[0]), vec_for(values[1])])
}

/// Kernel of `D⁻` from the factor spectra. `D⁺D⁻ = ∇*∇ + c(F)|_{S⁻}` is
/// diagonalized as a sum of factor Landau levels and the eigenvalues of the
/// constant matrix `c(F)|_{S⁻}`.
pub fn kernel_from_spectra(
    grid: &Grid4,
    flux: &FluxData,
    spec_a: &FactorSpectrum,
    spec_b: &FactorSpectrum,
    module: &CliffordModule<f64>,
) -> Result<DiracKernel> {
    let cf = flux.clifford_curvature(module)?;
    let plus_curvature = PLUS
        .iter()
        .flat_map(|&i| (0..4).map(move |j| (i, j)))
        .chain((0..4).flat_map(|i| PLUS.iter().map(move |&j| (i, j))))
        .map(|(i, j)| cf[(i, j)].norm())
        .fold(0.0, f64::max);
    let block = [[cf[(MINUS[0], MINUS[0])], cf[(MINUS[0], MINUS[1])]], [cf[(MINUS[1], MINUS[0])], cf[(MINUS[1], MINUS[1])]]];
    let (spin_values, spin_vectors) = hermitian2(block);
    let levels_a = spec_a.sorted_levels();
    let levels_b = spec_b.sorted_levels();
    let (na, nb) = (grid.a.flux().unsigned_abs() as f64, grid.b.flux().unsigned_abs() as f64);
    let threshold = PI * na.min(nb);
    let mut members = Vec::new();
    let mut lowest_minus = f64::INFINITY;
    let mut first_excluded = f64::INFINITY;
    for &(la, ca, sa) in &levels_a {
        for &(lb, cb, sb) in &levels_b {
            for (s, &ls) in spin_values.iter().enumerate() {
                let value = la + lb + ls;
                lowest_minus = lowest_minus.min(value);
                if value.abs() <= threshold {
                    members.push((ca, sa, cb, sb, s));
                } else {
                    first_excluded = first_excluded.min(value);
                }
            }
        }
    }
    let lowest_plus = levels_a[0].0 + levels_b[0].0;
    let mut basis = Vec::with_capacity(members.len());
    let mut dirac_residual = 0.0f64;
    for (ca, sa, cb, sb, s) in members {
        let fa = spec_a.embedded(&grid.a, ca, sa);
        let fb = spec_b.embedded(&grid.b, cb, sb);
        let scalar = grid.product(&fa, &fb);
        let chi = spin_vectors[s];
        let psi: HalfSpinor = std::array::from_fn(|t| {
            (chi[t] != Complex64::new(0.0, 0.0)).then(|| scalar.iter().map(|x| x * chi[t]).collect::<Field>())
        });
        let d = field::dirac(grid, module, &psi, true);
        dirac_residual = dirac_residual.max(field::half_norm_sq(grid, &d).sqrt());
        basis.push(psi);
    }
    Ok(DiracKernel {
        xi: grid.xi(),
        basis,
        lowest_minus,
        lowest_plus,
        first_excluded,
        dirac_residual,
        plus_curvature,
    })
}

/// `ker D⁻` at the dual point `ξ`.
pub fn dirac_kernel(flux: &FluxData, xi: [f64; 4], cfg: &NahmConfig) -> Result<DiracKernel> {
    let (a, b) = factor_pair(flux, cfg, cfg.n)?;
    let grid = Grid4::from_factors(a.with_xi([xi[0], xi[1]]), b.with_xi([xi[2], xi[3]]));
    let spec_a = factor_spectrum(&grid.a, eigen_settings(cfg, cfg.seed))?;
    let spec_b = factor_spectrum(&grid.b, eigen_settings(cfg, cfg.seed.wrapping_add(1)))?;
    kernel_from_spectra(&grid, flux, &spec_a, &spec_b, &CliffordModule::new())
}

/// Shift of the Fourier-diagonal preconditioner: the lowest Landau sum.
pub fn preconditioner_shift(grid: &Grid4) -> f64 {
    2.0 * PI * (grid.a.flux().unsigned_abs() + grid.b.flux().unsigned_abs()) as f64
}

pub(crate) fn cg_cap(grid: &Grid4) -> usize {
    let kappa = grid.spectral_bound() / preconditioner_shift(grid);
    (40.0 * kappa.sqrt()) as usize + 200
}

/// `(∇*∇)⁻¹ s` for a scalar section.
pub fn green_scalar(grid: &Grid4, s: &[Complex64], tol: f64) -> Result<(Field, CgOutcome)> {
    let op = LaplacianOperator { grid, sigma: preconditioner_shift(grid) };
    cg::solve(&op, s, None, tol, cg_cap(grid))
}

/// `G s` for a section of `S⁺`, component by component.
pub fn green_half(grid: &Grid4, s: &HalfSpinor, tol: f64) -> Result<(HalfSpinor, Vec<CgOutcome>)> {
    let mut outcomes = Vec::new();
    let mut out: HalfSpinor = [None, None];
    for (slot, comp) in out.iter_mut().zip(s) {
        if let Some(c) = comp {
            let (u, o) = green_scalar(grid, c, tol)?;
            outcomes.push(o);
            *slot = Some(u);
        }
    }
    Ok((out, outcomes))
}

/// The Green operator on `Hom ⊗ S⁺` at dual point `ξ`.
pub fn green_apply(
    flux: &FluxData,
    xi: [f64; 4],
    s: &HalfSpinor,
    cfg: &NahmConfig,
) -> Result<(HalfSpinor, Vec<CgOutcome>)> {
    let (a, b) = factor_pair(flux, cfg, cfg.n)?;
    let grid = Grid4::from_factors(a.with_xi([xi[0], xi[1]]), b.with_xi([xi[2], xi[3]]));
    for comp in s.iter().flatten() {
        if comp.len() != grid.size() {
            return Err(Error::input(format!("section has {} samples, grid has {}", comp.len(), grid.size())));
        }
    }
    green_half(&grid, s, cfg.cg_tol)
}
