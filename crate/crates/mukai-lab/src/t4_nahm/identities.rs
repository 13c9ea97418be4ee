//! Finite-difference checks of the Green-operator identities in `ξ`.
//!
//! In the trivialization of the Poincaré bundle used here the covariant
//! `ξ`-derivative of an operator family is its plain derivative, so both
//! identities are tested with ordinary central differences at steps `δ` and
//! `δ/2`. Only the convergence order is asserted.

use super::field::{self, Field, Grid4, HalfSpinor};
use super::kernel::{factor_pair, green_half, green_scalar};
use super::ring::FactorRing;
use super::{poincare_curvature, FluxData, NahmConfig, PoincareCurvature};
use crate::error::Result;
use crate::linalg::Matrix;
use crate::report::{Check, CheckList};
use crate::spin4::{self, CliffordModule};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Smallest accepted residual ratio under `δ → δ/2`.
pub const MIN_CONVERGENCE_RATIO: f64 = 3.0;

#[derive(Clone, Debug, Serialize)]
pub struct IdentityProbe {
    pub direction: usize,
    pub residual: f64,
    pub residual_half: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub xi: [f64; 4],
    pub delta: f64,
    pub green_derivative: Vec<IdentityProbe>,
    pub laplacian_trace: Vec<IdentityProbe>,
    /// Least-squares `c` in `Tr(G Ω·P (Ω·)† G) ≈ c Σ_i ∂²_{ξ_i} G`.
    pub laplacian_trace_constant: f64,
    pub coulomb_divergence: f64,
    pub warnings: Vec<String>,
    pub checks: CheckList,
}

fn smooth_probe(grid: &Grid4, rng: &mut ChaCha8Rng) -> Field {
    let bump = |ring: &FactorRing, rng: &mut ChaCha8Rng| -> Field {
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let shift: f64 = rng.gen_range(-0.5..0.5);
        let width: f64 = rng.gen_range(0.5..1.5);
        ring.positions().iter().cycle().take(ring.size()).map(|y| c * (-((y - shift) / width).powi(2)).exp()).collect()
    };
    let mut u = grid.zeros();
    for _ in 0..2 {
        let fa = bump(&grid.a, rng);
        let fb = bump(&grid.b, rng);
        u.iter_mut().zip(grid.product(&fa, &fb)).for_each(|(x, y)| *x += y);
    }
    u
}

fn shifted(grid: &Grid4, i: usize, h: f64) -> Grid4 {
    let mut xi = grid.xi();
    xi[i] += h;
    grid.with_xi(xi)
}

fn combine(terms: &[(f64, &Field)]) -> Field {
    let mut out = vec![Complex64::new(0.0, 0.0); terms[0].1.len()];
    for (c, f) in terms {
        out.iter_mut().zip(f.iter()).for_each(|(o, x)| *o += x * *c);
    }
    out
}

fn rel_diff(grid: &Grid4, a: &Field, b: &Field) -> f64 {
    let d: Field = a.iter().zip(b).map(|(x, y)| x - y).collect();
    grid.norm(&d) / grid.norm(b)
}

fn ratio(r: f64, r_half: f64) -> f64 {
    if r_half > 0.0 {
        r / r_half
    } else {
        f64::INFINITY
    }
}

/// `2 G (Σ_μ Ω(∂x_μ, ∂ξ_i) ∇_μ) G s`, the derivative predicted by
/// `∂(∇*∇) = −Σ_μ (∂∇_μ ∇_μ + ∇_μ ∂∇_μ)` with `∂∇_μ` constant.
fn green_derivative_formula(grid: &Grid4, poincare: &PoincareCurvature, i: usize, s: &Field, tol: f64) -> Result<Field> {
    let (gs, _) = green_scalar(grid, s, tol)?;
    let mut v = grid.zeros();
    for mu in 0..4 {
        let c = -poincare.twisted_contraction(mu, i) * 2.0;
        if c.norm() == 0.0 {
            continue;
        }
        let d = grid.nabla(mu, &gs);
        v.iter_mut().zip(&d).for_each(|(o, x)| *o += x * c);
    }
    Ok(green_scalar(grid, &v, tol)?.0)
}

fn green_derivative_fd(grid: &Grid4, i: usize, h: f64, s: &Field, tol: f64) -> Result<Field> {
    let (gp, _) = green_scalar(&shifted(grid, i, h), s, tol)?;
    let (gm, _) = green_scalar(&shifted(grid, i, -h), s, tol)?;
    Ok(combine(&[(0.5 / h, &gp), (-0.5 / h, &gm)]))
}

fn second_difference(grid: &Grid4, g0: &Field, h: f64, s: &Field, tol: f64) -> Result<Field> {
    let mut acc = grid.zeros();
    for i in 0..4 {
        let (gp, _) = green_scalar(&shifted(grid, i, h), s, tol)?;
        let (gm, _) = green_scalar(&shifted(grid, i, -h), s, tol)?;
        let d = combine(&[(1.0 / (h * h), &gp), (-2.0 / (h * h), g0), (1.0 / (h * h), &gm)]);
        acc.iter_mut().zip(&d).for_each(|(o, x)| *o += x);
    }
    Ok(acc)
}

/// `P = 1 − D⁺ G D⁻` on a section of `S⁻`.
fn kernel_projection(grid: &Grid4, module: &CliffordModule<f64>, psi: &HalfSpinor, tol: f64) -> Result<HalfSpinor> {
    let d = field::dirac(grid, module, psi, true);
    let (gd, _) = green_half(grid, &d, tol)?;
    let back = field::dirac(grid, module, &gd, false);
    Ok(std::array::from_fn(|t| match (&psi[t], &back[t]) {
        (Some(p), Some(b)) => Some(p.iter().zip(b).map(|(x, y)| x - y).collect()),
        (Some(p), None) => Some(p.clone()),
        (None, Some(b)) => Some(b.iter().map(|y| -y).collect()),
        (None, None) => None,
    }))
}

/// Spinor trace of `Σ_i G (ι_{∂ξ_i}Ω^t·) P (ι_{∂ξ_i}Ω^t·)† G` on a scalar.
fn laplacian_trace_lhs(
    grid: &Grid4,
    module: &CliffordModule<f64>,
    contraction: &[spin4::CMatrix<f64>; 4],
    s: &Field,
    tol: f64,
) -> Result<Field> {
    let (gs, _) = green_scalar(grid, s, tol)?;
    let mut w = grid.zeros();
    for a in contraction {
        let a_dag = spin4::adjoint(a);
        for t in 0..2 {
            let mut u: HalfSpinor = [None, None];
            u[t] = Some(gs.clone());
            let down = field::matrix_apply(&a_dag, &u, false);
            let projected = kernel_projection(grid, module, &down, tol)?;
            let up = field::matrix_apply(a, &projected, true);
            if let Some(c) = &up[t] {
                w.iter_mut().zip(c).for_each(|(o, x)| *o += x);
            }
        }
    }
    Ok(green_scalar(grid, &w, tol)?.0)
}

/// `Σ_μ ∂_μ` of the pointwise coefficient `Ω(∂x_μ, ∂ξ_i)(x)`, measured by
/// differencing the connection in `ξ` and differentiated by Leibniz.
fn coulomb_divergence(grid: &Grid4) -> f64 {
    let step = 0.25;
    let u: Field = {
        let fa: Field = (0..grid.a.size()).map(|p| Complex64::new(1.0 + 0.5 * (p as f64 * 0.37).sin(), 0.0)).collect();
        let fb: Field = (0..grid.b.size()).map(|p| Complex64::new(1.0 + 0.5 * (p as f64 * 0.21).cos(), 0.0)).collect();
        grid.product(&fa, &fb)
    };
    let nabla_u: Vec<Field> = (0..4).map(|mu| grid.nabla(mu, &u)).collect();
    let mut worst = 0.0f64;
    for i in 0..4 {
        let mut div = grid.zeros();
        for mu in 0..4 {
            let dp = shifted(grid, i, step).nabla(mu, &u);
            let dm = shifted(grid, i, -step).nabla(mu, &u);
            let coeff: Field = dp.iter().zip(&dm).zip(&u).map(|((p, m), x)| (p - m) / (2.0 * step * x)).collect();
            let fu: Field = coeff.iter().zip(&u).map(|(c, x)| c * x).collect();
            let d = grid.nabla(mu, &fu);
            div.iter_mut()
                .zip(d.iter().zip(&coeff).zip(&nabla_u[mu]).zip(&u))
                .for_each(|(o, (((dfu, c), du), x))| *o += (dfu - c * du) / x);
        }
        worst = worst.max(div.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    worst
}

/// Runs both operator identities on `cfg.probes` random sections at `ξ`
/// on the `identity_N` grid, plus the Coulomb-gauge check.
pub fn operator_identity_checks(flux: &FluxData, xi: [f64; 4], cfg: &NahmConfig) -> Result<IdentityReport> {
    let (a, b) = factor_pair(flux, cfg, cfg.identity_n)?;
    let grid = Grid4::from_factors(a.with_xi([xi[0], xi[1]]), b.with_xi([xi[2], xi[3]]));
    let module = CliffordModule::<f64>::new();
    let poincare = poincare_curvature(&grid)?;
    let contraction: [spin4::CMatrix<f64>; 4] = std::array::from_fn(|i| {
        let mut m = Matrix::zeros(4, 4);
        for mu in 0..4 {
            m = m.add(&module.generator(mu).scale(&poincare.mixed[mu][i]));
        }
        m
    });
    let tol = cfg.cg_tol;
    let delta = cfg.delta;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut green_derivative = Vec::new();
    let mut laplacian_trace = Vec::new();
    let (mut num, mut den) = (0.0, 0.0);
    for probe in 0..cfg.probes {
        let s = smooth_probe(&grid, &mut rng);
        let i = probe % 4;
        let exact = green_derivative_formula(&grid, &poincare, i, &s, tol)?;
        let r = rel_diff(&grid, &green_derivative_fd(&grid, i, delta, &s, tol)?, &exact);
        let rh = rel_diff(&grid, &green_derivative_fd(&grid, i, delta / 2.0, &s, tol)?, &exact);
        green_derivative.push(IdentityProbe { direction: i, residual: r, residual_half: rh, ratio: ratio(r, rh) });

        let lhs = laplacian_trace_lhs(&grid, &module, &contraction, &s, tol)?;
        let (g0, _) = green_scalar(&grid, &s, tol)?;
        let fd = second_difference(&grid, &g0, delta, &s, tol)?;
        let fd_half = second_difference(&grid, &g0, delta / 2.0, &s, tol)?;
        let pred = |f: &Field| -> Field { f.iter().map(|z| -z).collect() };
        let r = rel_diff(&grid, &pred(&fd), &lhs);
        let rh = rel_diff(&grid, &pred(&fd_half), &lhs);
        num += grid.inner(&fd_half, &lhs).re;
        den += grid.inner(&fd_half, &fd_half).re;
        laplacian_trace.push(IdentityProbe { direction: 4, residual: r, residual_half: rh, ratio: ratio(r, rh) });
    }
    let laplacian_trace_constant = num / den;
    let coulomb = coulomb_divergence(&grid);
    let mut warnings = Vec::new();
    if delta > 0.1 {
        warnings.push(format!("δ = {delta} is outside the asymptotic regime; expect ratios below 4"));
    }
    let min_ratio = |p: &[IdentityProbe]| p.iter().map(|x| x.ratio).fold(f64::INFINITY, f64::min);
    let mut checks = CheckList::new();
    let g_min = min_ratio(&green_derivative);
    checks.push(
        Check::exact("green_derivative_convergence", g_min >= MIN_CONVERGENCE_RATIO)
            .with_detail(format!("min ratio {g_min:.3} over {} probes", green_derivative.len())),
    );
    let l_min = min_ratio(&laplacian_trace);
    checks.push(
        Check::exact("laplacian_trace_convergence", l_min >= MIN_CONVERGENCE_RATIO)
            .with_detail(format!("min ratio {l_min:.3}, fitted constant {laplacian_trace_constant:.6}")),
    );
    checks.push(Check::within("coulomb_gauge", coulomb, 1e-8));
    Ok(IdentityReport {
        xi,
        delta,
        green_derivative,
        laplacian_trace,
        laplacian_trace_constant,
        coulomb_divergence: coulomb,
        warnings,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_converge_at_second_order() {
        let cfg = NahmConfig { identity_n: 8, probes: 2, ..NahmConfig::default() };
        let report = operator_identity_checks(&FluxData::separable(1, -1), [0.1, 0.3, 0.6, 0.2], &cfg).unwrap();
        assert!(report.checks.all_passed(), "{:?}", report);
        assert!((report.laplacian_trace_constant + 1.0).abs() < 1e-2, "{}", report.laplacian_trace_constant);
        for p in report.green_derivative.iter().chain(&report.laplacian_trace) {
            assert!(p.ratio > 3.5 && p.ratio < 4.5, "{p:?}");
        }
    }

    #[test]
    fn large_step_warns() {
        let cfg = NahmConfig { identity_n: 4, probes: 1, delta: 0.2, ..NahmConfig::default() };
        let report = operator_identity_checks(&FluxData::separable(1, -1), [0.0; 4], &cfg).unwrap();
        assert_eq!(report.warnings.len(), 1);
    }
}
