//! One `T²` factor of the flat torus carrying a line bundle of flux `n`.
//!
//! Sections are stored in the unfolded Landau gauge: the Fourier
//! coefficient `ψ̂_m(x₁)` along the periodic direction is written
//! `φ_r(x₁ + j)` with `m = r + j n`, so each residue `r mod |n|` becomes a
//! single function on a ring of length `L = N/|n|` sampled with spacing
//! `1/N`. On a chain the covariant derivatives are
//! `∇₁ = ∂_y + 2πiξ₁` (a Fourier multiplier) and
//! `∇₂ = 2πi(n y + r + ξ₂)` (a multiplication), with `[∇₁, ∇₂] = 2πi n`.

use super::cg::{self, CgOutcome, LinearOperator};
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone)]
pub struct FactorRing {
    flux: i64,
    n_grid: usize,
    chains: usize,
    ring_len: usize,
    xi: [f64; 2],
    momenta: Vec<f64>,
    positions: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FactorRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FactorRing")
            .field("flux", &self.flux)
            .field("n_grid", &self.n_grid)
            .field("xi", &self.xi)
            .finish()
    }
}

impl FactorRing {
    pub fn new(flux: i64, n_grid: usize, xi: [f64; 2]) -> Result<Self> {
        if flux == 0 {
            return Err(Error::precondition("factor flux must be nonzero"));
        }
        if n_grid < 4 || !n_grid.is_multiple_of(2) {
            return Err(Error::input(format!("grid size {n_grid} must be even and at least 4")));
        }
        let chains = flux.unsigned_abs() as usize;
        if !n_grid.is_multiple_of(chains) {
            return Err(Error::input(format!("flux {flux} does not divide grid size {n_grid}")));
        }
        let ring_len = n_grid / chains;
        let points = ring_len * n_grid;
        let h = 1.0 / n_grid as f64;
        let half = points as i64 / 2;
        let momenta = (0..points as i64)
            .map(|q| {
                let q = if q < half { q } else { q - points as i64 };
                2.0 * PI * q as f64 / ring_len as f64
            })
            .collect();
        let positions = (0..points).map(|p| -(ring_len as f64) / 2.0 + p as f64 * h).collect();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(points);
        let ifft = planner.plan_fft_inverse(points);
        Ok(FactorRing { flux, n_grid, chains, ring_len, xi, momenta, positions, fft, ifft })
    }

    pub fn with_xi(&self, xi: [f64; 2]) -> Self {
        FactorRing { xi, ..self.clone() }
    }

    pub fn flux(&self) -> i64 {
        self.flux
    }

    pub fn n_grid(&self) -> usize {
        self.n_grid
    }

    pub fn chains(&self) -> usize {
        self.chains
    }

    pub fn ring_len(&self) -> usize {
        self.ring_len
    }

    /// Points on one chain.
    pub fn chain_points(&self) -> usize {
        self.ring_len * self.n_grid
    }

    /// Total unknowns, `N²`.
    pub fn size(&self) -> usize {
        self.chains * self.chain_points()
    }

    pub fn xi(&self) -> [f64; 2] {
        self.xi
    }

    /// Quadrature weight of one sample.
    pub fn weight(&self) -> f64 {
        1.0 / self.n_grid as f64
    }

    pub fn position(&self, p: usize) -> f64 {
        self.positions[p]
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    pub fn fft(&self) -> &Arc<dyn Fft<f64>> {
        &self.fft
    }

    pub fn ifft(&self) -> &Arc<dyn Fft<f64>> {
        &self.ifft
    }

    /// Fourier symbol of `∇₁` on a chain.
    pub fn nabla1_symbol(&self) -> Vec<Complex64> {
        self.momenta.iter().map(|k| I * (k + 2.0 * PI * self.xi[0])).collect()
    }

    /// Multiplier of `∇₂` over the whole factor vector.
    pub fn nabla2_multiplier(&self) -> Vec<Complex64> {
        let n = self.flux as f64;
        (0..self.chains)
            .flat_map(|r| {
                self.positions.iter().map(move |y| I * 2.0 * PI * (n * y + r as f64 + self.xi[1]))
            })
            .collect()
    }

    /// Fourier symbol of `−∇₁²`.
    pub fn kinetic_symbol(&self) -> Vec<f64> {
        self.momenta.iter().map(|k| (k + 2.0 * PI * self.xi[0]).powi(2)).collect()
    }

    /// Multiplier `−∇₂²` over the whole factor vector.
    pub fn potential(&self) -> Vec<f64> {
        self.nabla2_multiplier().iter().map(|z| z.norm_sqr()).collect()
    }

    /// `∂_ξ` of the `∇_μ` symbols; both are affine in `ξ` so this is exact.
    pub fn xi_derivative(&self, mu: usize, nu: usize) -> Complex64 {
        if mu == nu {
            2.0 * PI * I
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Upper bound on the spectrum of `−∇₁² − ∇₂²`.
    pub fn spectral_bound(&self) -> f64 {
        let k = self.kinetic_symbol().into_iter().fold(0.0, f64::max);
        let v = self.potential().into_iter().fold(0.0, f64::max);
        k + v
    }

    /// Periodic-direction mode and base point `x₁` of a chain sample.
    pub fn mode_of(&self, chain: usize, p: usize) -> (i64, f64) {
        let y = self.positions[p];
        let j = y.floor();
        (chain as i64 + self.flux * j as i64, y - j)
    }

    /// Applies a Fourier multiplier to every chain of `v` in place.
    pub fn apply_symbol(&self, v: &mut [Complex64], symbol: &[Complex64]) {
        let p = self.chain_points();
        self.fft.process(v);
        let scale = 1.0 / p as f64;
        for chunk in v.chunks_mut(p) {
            for (z, s) in chunk.iter_mut().zip(symbol) {
                *z *= s * scale;
            }
        }
        self.ifft.process(v);
    }

    /// `H = −∇₁² − ∇₂²` on a factor vector.
    pub fn laplacian(&self, v: &[Complex64]) -> Vec<Complex64> {
        let kin: Vec<Complex64> = self.kinetic_symbol().iter().map(|&k| Complex64::new(k, 0.0)).collect();
        let mut out = v.to_vec();
        self.apply_symbol(&mut out, &kin);
        for ((o, x), w) in out.iter_mut().zip(v).zip(self.potential()) {
            *o += x * w;
        }
        out
    }

    pub fn nabla(&self, mu: usize, v: &[Complex64]) -> Vec<Complex64> {
        match mu {
            0 => {
                let mut out = v.to_vec();
                self.apply_symbol(&mut out, &self.nabla1_symbol());
                out
            }
            _ => v.iter().zip(self.nabla2_multiplier()).map(|(x, m)| x * m).collect(),
        }
    }

    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let s: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
        s * self.weight()
    }

    pub fn norm(&self, a: &[Complex64]) -> f64 {
        self.inner(a, a).re.sqrt()
    }

    /// Value of a factor section at `(x₁, x₂)` with `x₁` on the grid,
    /// assembled from its Fourier coefficients along `x₂`.
    pub fn evaluate(&self, v: &[Complex64], x1_index: usize, x2: f64) -> Complex64 {
        let p_len = self.chain_points();
        let mut acc = Complex64::new(0.0, 0.0);
        for chain in 0..self.chains {
            let mut p = x1_index;
            while p < p_len {
                let (m, _) = self.mode_of(chain, p);
                acc += v[chain * p_len + p] * Complex64::from_polar(1.0, 2.0 * PI * m as f64 * x2);
                p += self.n_grid;
            }
        }
        acc
    }

    /// Index of the first chain sample with `x₁ = 0`.
    pub fn origin_offset(&self) -> usize {
        let y0 = self.positions[0];
        let frac = y0 - y0.floor();
        ((1.0 - frac).fract() * self.n_grid as f64).round() as usize % self.n_grid
    }

    /// Discrete delta at `x = 0`: `ψ̂_m(0) = N` for every mode.
    pub fn delta_at_origin(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.size()];
        let offset = self.origin_offset();
        let p_len = self.chain_points();
        for chain in 0..self.chains {
            let mut p = offset;
            while p < p_len {
                v[chain * p_len + p] = Complex64::new(self.n_grid as f64, 0.0);
                p += self.n_grid;
            }
        }
        v
    }

    /// Dense real form of `H` on one chain at `ξ₁ = 0`.
    pub fn dense_chain_hamiltonian(&self, chain: usize) -> Result<faer::Mat<f64>> {
        if self.xi[0] != 0.0 {
            return Err(Error::precondition("dense chain Hamiltonian is real only at ξ₁ = 0"));
        }
        let p = self.chain_points();
        let h = 1.0 / self.n_grid as f64;
        let kin = self.kinetic_symbol();
        // kernel of the Fourier multiplier as a function of the offset
        let kernel: Vec<f64> = (0..p)
            .map(|d| {
                let dy = d as f64 * h;
                kin.iter().zip(&self.momenta).map(|(s, k)| s * (k * dy).cos()).sum::<f64>() / p as f64
            })
            .collect();
        let pot = self.potential();
        Ok(faer::Mat::from_fn(p, p, |a, b| {
            let d = if a >= b { a - b } else { p - (b - a) };
            kernel[d] + if a == b { pot[chain * p + a] } else { 0.0 }
        }))
    }
}

/// Chain restriction of `H`, preconditioned by `1/((k + 2πξ₁)² + σ)`.
struct ChainOperator<'a> {
    ring: &'a FactorRing,
    kinetic: Vec<Complex64>,
    potential: &'a [f64],
    precond: Vec<Complex64>,
}

impl<'a> ChainOperator<'a> {
    fn new(ring: &'a FactorRing, potential: &'a [f64], shift: f64) -> Self {
        let kin = ring.kinetic_symbol();
        ChainOperator {
            ring,
            kinetic: kin.iter().map(|&k| Complex64::new(k, 0.0)).collect(),
            potential,
            precond: kin.iter().map(|&k| Complex64::new(1.0 / (k + shift), 0.0)).collect(),
        }
    }
}

impl LinearOperator for ChainOperator<'_> {
    fn len(&self) -> usize {
        self.potential.len()
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(x);
        self.ring.apply_symbol(out, &self.kinetic);
        for ((o, a), v) in out.iter_mut().zip(x).zip(self.potential) {
            *o += a * v;
        }
    }

    fn precondition(&self, r: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(r);
        self.ring.apply_symbol(out, &self.precond);
    }

    fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        self.ring.inner(a, b)
    }
}

/// Lowest eigenpairs of `H` on one chain.
#[derive(Clone, Debug)]
pub struct ChainSpectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Lowest eigenpairs of `H` on every chain of the factor.
#[derive(Clone, Debug)]
pub struct FactorSpectrum {
    pub chains: Vec<ChainSpectrum>,
}

impl FactorSpectrum {
    /// All computed eigenvalues with their `(chain, slot)` labels, ascending.
    pub fn sorted_levels(&self) -> Vec<(f64, usize, usize)> {
        let mut out: Vec<(f64, usize, usize)> = self
            .chains
            .iter()
            .enumerate()
            .flat_map(|(c, s)| s.values.iter().enumerate().map(move |(k, &v)| (v, c, k)))
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }

    pub fn lowest(&self) -> f64 {
        self.sorted_levels()[0].0
    }

    /// An eigenvector embedded as a full factor vector.
    pub fn embedded(&self, ring: &FactorRing, chain: usize, slot: usize) -> Vec<Complex64> {
        let p = ring.chain_points();
        let mut v = vec![Complex64::new(0.0, 0.0); ring.size()];
        v[chain * p..(chain + 1) * p].copy_from_slice(&self.chains[chain].vectors[slot]);
        v
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EigenSettings {
    pub block: usize,
    pub wanted: usize,
    pub tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for EigenSettings {
    fn default() -> Self {
        EigenSettings { block: 4, wanted: 2, tol: 1e-10, max_iterations: 200, seed: 7 }
    }
}

fn orthonormalize(ring: &FactorRing, block: &mut [Vec<Complex64>]) -> Result<()> {
    for i in 0..block.len() {
        for _ in 0..2 {
            for j in 0..i {
                let c = ring.inner(&block[j], &block[i]);
                let (head, tail) = block.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= c * y;
                }
            }
        }
        let n = ring.norm(&block[i]);
        if n.is_nan() || n <= 1e-300 {
            return Err(Error::numerical("subspace iteration lost rank"));
        }
        block[i].iter_mut().for_each(|x| *x /= n);
    }
    Ok(())
}

/// Block inverse iteration with Rayleigh–Ritz on each chain. The lowest
/// eigenpair is converged to `tol`, the others to `sqrt(tol)`.
pub fn factor_spectrum(ring: &FactorRing, settings: EigenSettings) -> Result<FactorSpectrum> {
    if settings.block < settings.wanted || settings.wanted == 0 {
        return Err(Error::input("eigensolver block must hold the wanted pairs"));
    }
    let p = ring.chain_points();
    let potential = ring.potential();
    let shift = 2.0 * PI * ring.flux().unsigned_abs() as f64;
    let mut chains = Vec::with_capacity(ring.chains());
    for chain in 0..ring.chains() {
        let pot = &potential[chain * p..(chain + 1) * p];
        let op = ChainOperator::new(ring, pot, shift);
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed ^ (chain as u64).wrapping_mul(0x9e37));
        let centre = -(chain as f64 + ring.xi()[1]) / ring.flux() as f64;
        // smooth random start localized near the potential minimum
        let mut block: Vec<Vec<Complex64>> = (0..settings.block)
            .map(|_| {
                let coeffs: Vec<Complex64> =
                    (0..6).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
                ring.positions()
                    .iter()
                    .map(|&y| {
                        let t = y - centre;
                        let g = (-t * t).exp();
                        coeffs.iter().enumerate().map(|(k, c)| c * t.powi(k as i32)).sum::<Complex64>() * g
                    })
                    .collect()
            })
            .collect();
        orthonormalize(ring, &mut block)?;
        let mut ritz = vec![shift; settings.block];
        let mut log = Vec::new();
        let mut done = None;
        for it in 0..settings.max_iterations {
            let mut next = Vec::with_capacity(block.len());
            for (v, &theta) in block.iter().zip(&ritz) {
                let guess: Vec<Complex64> = v.iter().map(|x| x / theta).collect();
                let (w, _): (Vec<Complex64>, CgOutcome) = cg::solve(&op, v, Some(guess), 1e-12, 20 * p)?;
                next.push(w);
            }
            orthonormalize(ring, &mut next)?;
            let hv: Vec<Vec<Complex64>> = next
                .iter()
                .map(|v| {
                    let mut out = vec![Complex64::new(0.0, 0.0); p];
                    op.apply(v, &mut out);
                    out
                })
                .collect();
            let b = next.len();
            let small = faer::Mat::<faer::complex_native::c64>::from_fn(b, b, |i, j| {
                let z = ring.inner(&next[i], &hv[j]);
                faer::complex_native::c64::new(z.re, z.im)
            });
            let eig = small.selfadjoint_eigendecomposition(faer::Side::Lower);
            let u = eig.u();
            let mut rotated = Vec::with_capacity(b);
            let mut h_rotated = Vec::with_capacity(b);
            for col in 0..b {
                let mut v = vec![Complex64::new(0.0, 0.0); p];
                let mut hvr = vec![Complex64::new(0.0, 0.0); p];
                for row in 0..b {
                    let c = u.read(row, col);
                    let c = Complex64::new(c.re, c.im);
                    for ((a, x), (ha, hx)) in v.iter_mut().zip(&next[row]).zip(hvr.iter_mut().zip(&hv[row])) {
                        *a += c * x;
                        *ha += c * hx;
                    }
                }
                rotated.push(v);
                h_rotated.push(hvr);
            }
            ritz = (0..b).map(|k| eig.s().column_vector().read(k).re).collect();
            let residuals: Vec<f64> = (0..settings.wanted)
                .map(|k| {
                    let r: Vec<Complex64> =
                        h_rotated[k].iter().zip(&rotated[k]).map(|(h, v)| h - v * ritz[k]).collect();
                    ring.norm(&r) / ritz[k].abs()
                })
                .collect();
            log.push(residuals[0]);
            block = rotated;
            let ok = residuals
                .iter()
                .enumerate()
                .all(|(k, &r)| r <= if k == 0 { settings.tol } else { settings.tol.sqrt() });
            if ok {
                done = Some((residuals, it + 1));
                break;
            }
        }
        let Some((residuals, iterations)) = done else {
            return Err(Error::numerical(format!(
                "factor eigensolver did not converge on chain {chain}; residual log {:?}",
                log.iter().rev().take(5).collect::<Vec<_>>()
            )));
        };
        block.truncate(settings.wanted);
        chains.push(ChainSpectrum {
            values: ritz[..settings.wanted].to_vec(),
            vectors: block,
            residuals,
            iterations,
        });
    }
    Ok(FactorSpectrum { chains })
}
