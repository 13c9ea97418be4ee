//! Transformed curvature `F̂_ij = ⟨G Ω^t·ψ^i, ∧ Ω^t·ψ^j⟩ + ⟨ψ^i, ∧ d̂² ψ^j⟩`,
//! the dual-grid sweep and the rank-level inversion check.

use super::field::{self, Grid4, HalfSpinor};
use super::kernel::{self, eigen_settings, factor_pair, kernel_from_spectra, DiracKernel};
use super::ring::{factor_spectrum, FactorRing, FactorSpectrum};
use super::{poincare_curvature, FluxData, FluxMatrix, NahmConfig, PoincareCurvature};
use crate::error::{Error, Result};
use crate::forms::{self, TwoForm};
use crate::report::{Check, CheckList};
use crate::spin4::{self, CliffordModule, MINUS};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

/// One two-form component `F̂_ab`, `a < b`, as a `d × d` matrix.
#[derive(Clone, Debug, Serialize)]
pub struct FormComponent {
    pub a: usize,
    pub b: usize,
    pub matrix: Vec<Vec<Complex64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CurvatureSample {
    pub xi: [f64; 4],
    pub kernel_dim: usize,
    pub components: Vec<FormComponent>,
    /// `Σ |F̂⁺|²` over entries and components.
    pub self_dual_sq: f64,
    /// `Σ |F̂|²`.
    pub total_sq: f64,
    pub antihermitian_residual: f64,
    pub dirac_residual: f64,
    pub lowest_plus: f64,
    pub cg_iterations: usize,
    pub cg_residual: f64,
}

impl CurvatureSample {
    /// `F̂_ab` entry `(i, j)` for any `a, b`.
    pub fn entry(&self, a: usize, b: usize, i: usize, j: usize) -> Complex64 {
        if a == b {
            return Complex64::new(0.0, 0.0);
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let c = self.components.iter().find(|c| c.a == lo && c.b == hi).expect("all six components stored");
        c.matrix[i][j] * sign
    }

    pub fn trace(&self, a: usize, b: usize) -> Complex64 {
        (0..self.kernel_dim).map(|i| self.entry(a, b, i, i)).sum()
    }
}

/// `ι_{∂ξ_a}Ω^t· = Σ_μ Ω(∂x_μ, ∂ξ_a) c_μ` as 4×4 matrices.
fn contraction_matrices(module: &CliffordModule<f64>, poincare: &PoincareCurvature) -> [spin4::CMatrix<f64>; 4] {
    std::array::from_fn(|a| {
        let mut m = crate::linalg::Matrix::zeros(4, 4);
        for mu in 0..4 {
            m = m.add(&module.generator(mu).scale(&poincare.mixed[mu][a]));
        }
        m
    })
}

fn split_parts(f: &[[Complex64; 4]; 4]) -> (TwoForm<f64>, TwoForm<f64>) {
    (std::array::from_fn(|i| std::array::from_fn(|j| f[i][j].re)), std::array::from_fn(|i| std::array::from_fn(|j| f[i][j].im)))
}

/// Assembles `F̂` from an orthonormal kernel basis.
pub fn curvature_from_kernel(
    grid: &Grid4,
    kernel: &DiracKernel,
    module: &CliffordModule<f64>,
    poincare: &PoincareCurvature,
    cg_tol: f64,
) -> Result<CurvatureSample> {
    let d = kernel.dim();
    let mut cg_iterations = 0;
    let mut cg_residual = 0.0f64;
    let mut solved: Vec<HalfSpinor> = Vec::with_capacity(d);
    for psi in &kernel.basis {
        let (u, outcomes) = kernel::green_half(grid, psi, cg_tol)?;
        for o in outcomes {
            cg_iterations += o.iterations;
            cg_residual = cg_residual.max(o.relative_residual);
        }
        solved.push(u);
    }
    // g[I][J][s][t] = ⟨G φ^I_s, φ^J_t⟩
    let zero = Complex64::new(0.0, 0.0);
    let mut g = vec![vec![[[zero; 2]; 2]; d]; d];
    for (i, u) in solved.iter().enumerate() {
        for (j, psi) in kernel.basis.iter().enumerate() {
            for s in 0..2 {
                for t in 0..2 {
                    if let (Some(us), Some(pt)) = (&u[s], &psi[t]) {
                        g[i][j][s][t] = grid.inner(us, pt);
                    }
                }
            }
        }
    }
    let contraction = contraction_matrices(module, poincare);
    let spinor_pair = |a: usize, b: usize, s: usize, t: usize| -> Complex64 {
        let es = spin4::unit_spinor::<f64>(MINUS[s]);
        let et = spin4::unit_spinor::<f64>(MINUS[t]);
        spin4::hermitian(&spin4::apply(&contraction[a], &es), &spin4::apply(&contraction[b], &et))
    };
    let gram: Vec<Vec<Complex64>> = kernel
        .basis
        .iter()
        .map(|x| kernel.basis.iter().map(|y| field::half_inner(grid, x, y)).collect())
        .collect();
    let mut full = vec![vec![[[zero; 4]; 4]; d]; d];
    for i in 0..d {
        for j in 0..d {
            for a in 0..4 {
                for b in 0..4 {
                    if a == b {
                        continue;
                    }
                    let mut acc = zero;
                    for s in 0..2 {
                        for t in 0..2 {
                            acc += g[i][j][s][t] * (spinor_pair(a, b, s, t) - spinor_pair(b, a, s, t));
                        }
                    }
                    full[i][j][a][b] = acc + poincare.dual_block[a][b] * gram[i][j];
                }
            }
        }
    }
    let mut self_dual_sq = 0.0;
    let mut total_sq = 0.0;
    let mut components = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            components.push(FormComponent {
                a,
                b,
                matrix: (0..d).map(|i| (0..d).map(|j| full[i][j][a][b]).collect()).collect(),
            });
        }
    }
    let mut antiherm = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let (re, im) = split_parts(&full[i][j]);
            let (sre, sim) = (forms::self_dual_part(&re), forms::self_dual_part(&im));
            self_dual_sq += forms::inner(&sre, &sre) + forms::inner(&sim, &sim);
            total_sq += forms::inner(&re, &re) + forms::inner(&im, &im);
            for a in 0..4 {
                for b in 0..4 {
                    antiherm = antiherm.max((full[i][j][a][b] + full[j][i][a][b].conj()).norm());
                    scale = scale.max(full[i][j][a][b].norm());
                }
            }
        }
    }
    Ok(CurvatureSample {
        xi: grid.xi(),
        kernel_dim: d,
        components,
        self_dual_sq,
        total_sq,
        antihermitian_residual: if scale > 0.0 { antiherm / scale } else { 0.0 },
        dirac_residual: kernel.dirac_residual,
        lowest_plus: kernel.lowest_plus,
        cg_iterations,
        cg_residual,
    })
}

/// `F̂(ξ)` at one dual point.
pub fn transformed_curvature(flux: &FluxData, xi: [f64; 4], cfg: &NahmConfig) -> Result<CurvatureSample> {
    let (a, b) = factor_pair(flux, cfg, cfg.n)?;
    let grid = Grid4::from_factors(a.with_xi([xi[0], xi[1]]), b.with_xi([xi[2], xi[3]]));
    let module = CliffordModule::new();
    let spec_a = factor_spectrum(&grid.a, eigen_settings(cfg, cfg.seed))?;
    let spec_b = factor_spectrum(&grid.b, eigen_settings(cfg, cfg.seed.wrapping_add(1)))?;
    let k = kernel_from_spectra(&grid, flux, &spec_a, &spec_b, &module)?;
    let poincare = poincare_curvature(&grid)?;
    curvature_from_kernel(&grid, &k, &module, &poincare, cfg.cg_tol)
}

/// Random `d × d` unitary from Gram–Schmidt on a complex Gaussian-like matrix.
fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
        .collect();
    for i in 0..d {
        for j in 0..i {
            let c: Complex64 = cols[j].iter().zip(&cols[i]).map(|(x, y)| x.conj() * y).sum();
            let prev = cols[j].clone();
            cols[i].iter_mut().zip(&prev).for_each(|(x, y)| *x -= c * y);
        }
        let n = cols[i].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        cols[i].iter_mut().for_each(|x| *x /= n);
    }
    cols
}

/// `ψ'^J = Σ_I ψ^I U_{IJ}`.
fn rotate_kernel(kernel: &DiracKernel, u: &[Vec<Complex64>]) -> DiracKernel {
    let d = kernel.dim();
    let basis = (0..d)
        .map(|j| {
            std::array::from_fn(|s| {
                let mut acc: Option<field::Field> = None;
                for i in 0..d {
                    if let Some(c) = &kernel.basis[i][s] {
                        let t = acc.get_or_insert_with(|| vec![Complex64::new(0.0, 0.0); c.len()]);
                        t.iter_mut().zip(c).for_each(|(x, y)| *x += y * u[j][i]);
                    }
                }
                acc
            })
        })
        .collect();
    DiracKernel { basis, ..kernel.clone() }
}

/// `‖F̂⁺‖ / ‖F̂‖` over a set of dual points; NaN when `F̂` vanishes.
pub fn asd_residual(samples: &[CurvatureSample]) -> f64 {
    let sd: f64 = samples.iter().map(|s| s.self_dual_sq).sum();
    let total: f64 = samples.iter().map(|s| s.total_sq).sum();
    if total > 0.0 {
        (sd / total).sqrt()
    } else {
        f64::NAN
    }
}

/// Samples whose dual coordinates lie on the coarser `m`-point grid.
pub fn coarse_subset(samples: &[CurvatureSample], m: usize) -> Vec<CurvatureSample> {
    samples
        .iter()
        .filter(|s| s.xi.iter().all(|x| (x * m as f64 - (x * m as f64).round()).abs() < 1e-9))
        .cloned()
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct NahmReport {
    pub flux: FluxMatrix,
    pub config: NahmConfig,
    pub kernel_dim: usize,
    pub index_expected: i64,
    /// `‖F̂⁺‖ / ‖F̂‖` over the dual grid.
    pub asd_residual: f64,
    /// `asd_residual` plus the solver error bound `κ · cg_tol`.
    pub asd_bound: f64,
    pub condition_estimate: f64,
    /// `(1/2πi) ⟨tr F̂_ab⟩` averaged over the dual grid.
    pub transformed_flux: [[Complex64; 4]; 4],
    pub curvature_samples: Vec<CurvatureSample>,
    pub metric_check: [[f64; 4]; 4],
    pub identity_checks: CheckList,
    pub timings_ms: BTreeMap<String, f64>,
}

impl NahmReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "xi1,xi2,xi3,xi4,a,b,i,j,re,im")?;
        for s in &self.curvature_samples {
            for c in &s.components {
                for (i, row) in c.matrix.iter().enumerate() {
                    for (j, z) in row.iter().enumerate() {
                        writeln!(
                            w,
                            "{},{},{},{},{},{},{},{},{:.17e},{:.17e}",
                            s.xi[0], s.xi[1], s.xi[2], s.xi[3], c.a + 1, c.b + 1, i, j, z.re, z.im
                        )?;
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::input(format!("cannot build thread pool: {e}")))
}

fn dual_points(m: usize) -> Vec<[f64; 4]> {
    let step = 1.0 / m as f64;
    let mut out = Vec::with_capacity(m.pow(4));
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    out.push([i as f64 * step, j as f64 * step, k as f64 * step, l as f64 * step]);
                }
            }
        }
    }
    out
}

fn factor_spectra(
    ring: &FactorRing,
    m: usize,
    cfg: &NahmConfig,
    seed: u64,
) -> Result<Vec<(FactorRing, FactorSpectrum)>> {
    let step = 1.0 / m as f64;
    (0..m * m)
        .into_par_iter()
        .map(|idx| {
            let r = ring.with_xi([(idx / m) as f64 * step, (idx % m) as f64 * step]);
            let s = factor_spectrum(&r, eigen_settings(cfg, seed))?;
            Ok((r, s))
        })
        .collect()
}

/// Sweeps the dual grid and assembles every Nahm-transform check.
pub fn nahm_checks(flux: &FluxData, cfg: &NahmConfig, threads: usize) -> Result<NahmReport> {
    let mut timings = BTreeMap::new();
    let (ring_a, ring_b) = factor_pair(flux, cfg, cfg.n)?;
    let pool = thread_pool(threads)?;
    let module = CliffordModule::<f64>::new();
    let t0 = Instant::now();
    let (spectra_a, spectra_b) = pool.install(|| -> Result<_> {
        Ok((factor_spectra(&ring_a, cfg.m, cfg, cfg.seed)?, factor_spectra(&ring_b, cfg.m, cfg, cfg.seed.wrapping_add(1))?))
    })?;
    timings.insert("factor_spectra".to_string(), t0.elapsed().as_secs_f64() * 1e3);
    let base = Grid4::from_factors(ring_a.clone(), ring_b.clone());
    let poincare = poincare_curvature(&base)?;
    let m = cfg.m;
    let points = dual_points(m);
    let t1 = Instant::now();
    let samples: Vec<CurvatureSample> = pool.install(|| {
        points
            .par_iter()
            .map(|xi| {
                let ia = ((xi[0] * m as f64).round() as usize) * m + (xi[1] * m as f64).round() as usize;
                let ib = ((xi[2] * m as f64).round() as usize) * m + (xi[3] * m as f64).round() as usize;
                let (ra, sa) = &spectra_a[ia];
                let (rb, sb) = &spectra_b[ib];
                let grid = Grid4::from_factors(ra.clone(), rb.clone());
                let k = kernel_from_spectra(&grid, flux, sa, sb, &module)?;
                curvature_from_kernel(&grid, &k, &module, &poincare, cfg.cg_tol)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    timings.insert("dual_sweep".to_string(), t1.elapsed().as_secs_f64() * 1e3);

    let dims: Vec<usize> = samples.iter().map(|s| s.kernel_dim).collect();
    let kernel_dim = dims[0];
    if let Some(bad) = samples.iter().find(|s| s.kernel_dim != kernel_dim) {
        return Err(Error::numerical(format!(
            "kernel dimension jumps from {kernel_dim} to {} at ξ = {:?}",
            bad.kernel_dim, bad.xi
        )));
    }
    let asd_residual = asd_residual(&samples);
    let lambda_min = samples.iter().map(|s| s.lowest_plus).fold(f64::INFINITY, f64::min);
    let condition_estimate = base.spectral_bound() / lambda_min;
    let asd_bound = asd_residual + condition_estimate * cfg.cg_tol;

    let mut transformed_flux = [[Complex64::new(0.0, 0.0); 4]; 4];
    for s in &samples {
        for a in 0..4 {
            for b in 0..4 {
                transformed_flux[a][b] += s.trace(a, b) / (Complex64::new(0.0, 2.0 * PI) * samples.len() as f64);
            }
        }
    }

    let mut checks = CheckList::new();
    checks.push(Check::exact("kernel_dim_constant", true).with_detail(format!("dim {kernel_dim} on {} points", samples.len())));
    checks.push(
        Check::exact("index_matches_kernel_dim", kernel_dim as i64 == flux.index_expected())
            .with_detail(format!("kernel {kernel_dim}, index {}", flux.index_expected())),
    );
    checks.push(
        Check::within("asd_residual", asd_bound, 1e-3)
            .with_detail(format!("measured {asd_residual:.3e}, solver bound {:.3e}", condition_estimate * cfg.cg_tol)),
    );
    let antiherm = samples.iter().map(|s| s.antihermitian_residual).fold(0.0, f64::max);
    checks.push(Check::within("antihermitian", antiherm, (condition_estimate * cfg.cg_tol).max(1e-12)));
    let dirac = samples.iter().map(|s| s.dirac_residual).fold(0.0, f64::max);
    checks.push(Check::within("dirac_residual", dirac, cfg.eig_tol.sqrt()));
    let gap = 2.0 * PI * (ring_a.flux().abs().min(ring_b.flux().abs())) as f64;
    checks.push(
        Check::within("ker_d_plus_empty", (gap - lambda_min).max(0.0), 1e-6)
            .with_detail(format!("lowest ∇*∇ eigenvalue {lambda_min:.12}, Landau gap {gap:.12}")),
    );
    let max_cg = samples.iter().map(|s| s.cg_residual).fold(0.0, f64::max);
    checks.push(Check::within("green_solver_converged", max_cg, cfg.cg_tol));
    checks.push(gauge_check(&spectra_a[0], &spectra_b[0], flux, &module, &poincare, cfg, &samples[0])?);
    checks.extend(poincare.checks.clone());

    Ok(NahmReport {
        flux: flux.n,
        config: cfg.clone(),
        kernel_dim,
        index_expected: flux.index_expected(),
        asd_residual,
        asd_bound,
        condition_estimate,
        transformed_flux,
        curvature_samples: samples,
        metric_check: poincare.metric,
        identity_checks: checks,
        timings_ms: timings,
    })
}

/// Recomputes the first sample after a random unitary change of kernel basis.
fn gauge_check(
    a: &(FactorRing, FactorSpectrum),
    b: &(FactorRing, FactorSpectrum),
    flux: &FluxData,
    module: &CliffordModule<f64>,
    poincare: &PoincareCurvature,
    cfg: &NahmConfig,
    reference: &CurvatureSample,
) -> Result<Check> {
    let grid = Grid4::from_factors(a.0.clone(), b.0.clone());
    let k = kernel_from_spectra(&grid, flux, &a.1, &b.1, module)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let u = random_unitary(k.dim(), &mut rng);
    let rotated = rotate_kernel(&k, &u);
    let s = curvature_from_kernel(&grid, &rotated, module, poincare, cfg.cg_tol)?;
    let ratio = |x: &CurvatureSample| if x.total_sq > 0.0 { (x.self_dual_sq / x.total_sq).sqrt() } else { 0.0 };
    let mut diff = (ratio(&s) - ratio(reference)).abs();
    let scale = reference.total_sq.sqrt().max(1e-300);
    for i in 0..4 {
        for j in 0..4 {
            diff = diff.max((s.trace(i, j) - reference.trace(i, j)).norm() / scale);
        }
    }
    Ok(Check::within("gauge_independence", diff, 1e-8))
}

/// Rounds averaged fluxes to integers, failing when they are not quantized.
pub fn quantize_flux(avg: &[[Complex64; 4]; 4], tol: f64) -> Result<FluxMatrix> {
    let mut out = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let z = avg[i][j];
            let r = z.re.round();
            if (z.re - r).abs() > tol || z.im.abs() > tol {
                return Err(Error::numerical(format!(
                    "curvature quantization failed: entry ({}, {}) = {:.6} {:+.6}i",
                    i + 1,
                    j + 1,
                    z.re,
                    z.im
                )));
            }
            out[i][j] = r as i64;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct InversionReport {
    pub original_rank: usize,
    pub transformed_rank: usize,
    pub transformed_flux: FluxMatrix,
    /// `−∫ch₂` of the transformed line bundle.
    pub transformed_index: i64,
    pub sample_points: Vec<[f64; 4]>,
    pub double_transform_dims: Vec<usize>,
    pub checks: CheckList,
}

/// Rank-level Fourier inversion from an existing sweep.
pub fn inversion_from_report(report: &NahmReport, cfg: &NahmConfig) -> Result<InversionReport> {
    let transformed_flux = quantize_flux(&report.transformed_flux, 1e-6)?;
    let hat = FluxData::new(transformed_flux)?;
    let transformed_rank = report.kernel_dim;
    if transformed_rank != 1 {
        return Err(Error::precondition(format!(
            "the transformed bundle has rank {transformed_rank}; only line bundles re-enter the transform"
        )));
    }
    let sample_points: Vec<[f64; 4]> = dual_points(2);
    let hat_cfg = NahmConfig { flux: transformed_flux, ..cfg.clone() };
    let double_transform_dims = sample_points
        .iter()
        .map(|x| super::dirac_kernel(&hat, *x, &hat_cfg).map(|k| k.dim()))
        .collect::<Result<Vec<_>>>()?;
    let mut checks = CheckList::new();
    checks.push(
        Check::exact("double_transform_rank", double_transform_dims.iter().all(|&d| d == 1))
            .with_detail(format!("dims {:?}, original rank 1", double_transform_dims)),
    );
    checks.push(
        Check::exact("transformed_index_matches_rank", hat.index_expected() == 1)
            .with_detail(format!("−∫ch₂ of transform = {}", hat.index_expected())),
    );
    checks.push(Check::exact("transformed_rank_is_k_squared", transformed_rank as i64 == report.index_expected));
    Ok(InversionReport {
        original_rank: 1,
        transformed_rank,
        transformed_flux,
        transformed_index: hat.index_expected(),
        sample_points,
        double_transform_dims,
        checks,
    })
}

/// Runs the sweep and then the rank-level inversion.
pub fn inversion_rank_check(flux: &FluxData, cfg: &NahmConfig, threads: usize) -> Result<InversionReport> {
    let report = nahm_checks(flux, cfg, threads)?;
    inversion_from_report(&report, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> NahmConfig {
        NahmConfig { n: 8, m: 2, ..NahmConfig::default() }
    }

    #[test]
    fn unit_flux_curvature_is_constant_and_asd() {
        let s = transformed_curvature(&FluxData::separable(1, -1), [0.25, 0.5, 0.0, 0.75], &small()).unwrap();
        assert_eq!(s.kernel_dim, 1);
        assert!((s.entry(0, 1, 0, 0) - Complex64::new(0.0, -2.0 * PI)).norm() < 1e-6, "{:?}", s.entry(0, 1, 0, 0));
        assert!((s.entry(2, 3, 0, 0) - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-6);
        assert!(s.entry(0, 2, 0, 0).norm() < 1e-9);
        assert!(s.self_dual_sq <= 1e-12 * s.total_sq);
        assert!(s.antihermitian_residual < 1e-9);
    }

    #[test]
    fn sweep_and_inversion() {
        let cfg = small();
        let report = nahm_checks(&FluxData::separable(1, -1), &cfg, 1).unwrap();
        assert!(report.identity_checks.all_passed(), "{:?}", report.identity_checks.first_failure());
        assert_eq!(report.curvature_samples.len(), 16);
        let inv = inversion_from_report(&report, &cfg).unwrap();
        assert_eq!(inv.transformed_flux[0][1], -1);
        assert_eq!(inv.transformed_flux[2][3], 1);
        assert!(inv.checks.all_passed());
        let mut csv = Vec::new();
        report.write_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 1 + 16 * 6);
    }

    #[test]
    fn quantization_gate() {
        let mut avg = [[Complex64::new(0.0, 0.0); 4]; 4];
        avg[0][1] = Complex64::new(-1.0 + 1e-9, 0.0);
        assert_eq!(quantize_flux(&avg, 1e-6).unwrap()[0][1], -1);
        avg[0][1] = Complex64::new(-0.7, 0.0);
        let err = quantize_flux(&avg, 1e-6).unwrap_err();
        assert!(err.to_string().contains("curvature quantization failed"));
    }

    #[test]
    fn sweep_is_thread_count_independent() {
        let cfg = small();
        let one = nahm_checks(&FluxData::separable(1, -1), &cfg, 1).unwrap();
        let two = nahm_checks(&FluxData::separable(1, -1), &cfg, 2).unwrap();
        for (a, b) in one.curvature_samples.iter().zip(&two.curvature_samples) {
            assert_eq!(a.xi, b.xi);
            assert_eq!(a.entry(0, 1, 0, 0), b.entry(0, 1, 0, 0));
        }
    }
}
