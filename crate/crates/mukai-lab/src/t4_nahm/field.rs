//! Sections over `T⁴ = T²_A × T²_B` stored as `data[a · n_b + b]`.

use super::cg::LinearOperator;
use super::ring::FactorRing;
use crate::error::{Error, Result};
use crate::spin4::{CliffordModule, MINUS, PLUS};
use num_complex::Complex64;

pub type Field = Vec<Complex64>;

/// Two components of a section of `S⁺` or `S⁻`; `None` is identically zero.
pub type HalfSpinor = [Option<Field>; 2];

#[derive(Clone, Debug)]
pub struct Grid4 {
    pub a: FactorRing,
    pub b: FactorRing,
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Field {
    const BLOCK: usize = 32;
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for r0 in (0..rows).step_by(BLOCK) {
        for c0 in (0..cols).step_by(BLOCK) {
            for r in r0..(r0 + BLOCK).min(rows) {
                for c in c0..(c0 + BLOCK).min(cols) {
                    out[c * rows + r] = data[r * cols + c];
                }
            }
        }
    }
    out
}

impl Grid4 {
    pub fn new(flux_a: i64, flux_b: i64, n_grid: usize, xi: [f64; 4]) -> Result<Self> {
        Ok(Grid4 {
            a: FactorRing::new(flux_a, n_grid, [xi[0], xi[1]])?,
            b: FactorRing::new(flux_b, n_grid, [xi[2], xi[3]])?,
        })
    }

    pub fn from_factors(a: FactorRing, b: FactorRing) -> Self {
        Grid4 { a, b }
    }

    pub fn with_xi(&self, xi: [f64; 4]) -> Self {
        Grid4 { a: self.a.with_xi([xi[0], xi[1]]), b: self.b.with_xi([xi[2], xi[3]]) }
    }

    pub fn xi(&self) -> [f64; 4] {
        let (a, b) = (self.a.xi(), self.b.xi());
        [a[0], a[1], b[0], b[1]]
    }

    pub fn size(&self) -> usize {
        self.a.size() * self.b.size()
    }

    pub fn weight(&self) -> f64 {
        self.a.weight() * self.b.weight()
    }

    pub fn zeros(&self) -> Field {
        vec![Complex64::new(0.0, 0.0); self.size()]
    }

    pub fn product(&self, fa: &[Complex64], fb: &[Complex64]) -> Field {
        fa.iter().flat_map(|x| fb.iter().map(move |y| x * y)).collect()
    }

    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        let s: Complex64 = u.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
        s * self.weight()
    }

    pub fn norm(&self, u: &[Complex64]) -> f64 {
        self.inner(u, u).re.sqrt()
    }

    fn apply_a_symbol(&self, u: &mut Field, symbol: &[Complex64]) {
        let (na, nb) = (self.a.size(), self.b.size());
        let mut t = transpose(u, na, nb);
        self.a.apply_symbol(&mut t, symbol);
        *u = transpose(&t, nb, na);
    }

    fn multiply_a(&self, u: &mut [Complex64], m: &[Complex64]) {
        let nb = self.b.size();
        for (row, f) in u.chunks_mut(nb).zip(m) {
            row.iter_mut().for_each(|z| *z *= f);
        }
    }

    fn multiply_b(&self, u: &mut [Complex64], m: &[Complex64]) {
        for row in u.chunks_mut(self.b.size()) {
            row.iter_mut().zip(m).for_each(|(z, f)| *z *= f);
        }
    }

    /// `∇_μ` for `μ ∈ 0..4`.
    pub fn nabla(&self, mu: usize, u: &[Complex64]) -> Field {
        let mut out = u.to_vec();
        match mu {
            0 => self.apply_a_symbol(&mut out, &self.a.nabla1_symbol()),
            1 => self.multiply_a(&mut out, &self.a.nabla2_multiplier()),
            2 => self.b.apply_symbol(&mut out, &self.b.nabla1_symbol()),
            _ => self.multiply_b(&mut out, &self.b.nabla2_multiplier()),
        }
        out
    }

    /// `∇*∇ = −Σ ∇_μ²`.
    pub fn laplacian(&self, u: &[Complex64]) -> Field {
        let to_c = |v: Vec<f64>| v.into_iter().map(|k| Complex64::new(k, 0.0)).collect::<Vec<_>>();
        let mut ka = u.to_vec();
        self.apply_a_symbol(&mut ka, &to_c(self.a.kinetic_symbol()));
        let mut kb = u.to_vec();
        self.b.apply_symbol(&mut kb, &to_c(self.b.kinetic_symbol()));
        let va = self.a.potential();
        let vb = self.b.potential();
        let nb = self.b.size();
        for (ai, ((row, ra), rb)) in
            u.chunks(nb).zip(ka.chunks_mut(nb)).zip(kb.chunks(nb)).enumerate()
        {
            for (bi, ((x, o), k)) in row.iter().zip(ra.iter_mut()).zip(rb).enumerate() {
                *o += k + x * (va[ai] + vb[bi]);
            }
        }
        ka
    }

    /// `1/((k_A + 2πξ₁)² + (k_B + 2πξ₃)² + σ)` in the doubled ring Fourier basis.
    pub fn precondition(&self, r: &[Complex64], sigma: f64) -> Field {
        let (na, nb) = (self.a.size(), self.b.size());
        let (pa, pb) = (self.a.chain_points(), self.b.chain_points());
        let mut u = r.to_vec();
        self.b.fft().process(&mut u);
        let mut t = transpose(&u, na, nb);
        drop(u);
        self.a.fft().process(&mut t);
        let ka = self.a.kinetic_symbol();
        let kb = self.b.kinetic_symbol();
        let scale = 1.0 / (pa * pb) as f64;
        for (bi, row) in t.chunks_mut(na).enumerate() {
            let kbv = kb[bi % pb];
            for (ai, z) in row.iter_mut().enumerate() {
                *z *= scale / (ka[ai % pa] + kbv + sigma);
            }
        }
        self.a.ifft().process(&mut t);
        let mut u = transpose(&t, nb, na);
        self.b.ifft().process(&mut u);
        u
    }

    /// Largest eigenvalue bound for `∇*∇`.
    pub fn spectral_bound(&self) -> f64 {
        self.a.spectral_bound() + self.b.spectral_bound()
    }

    /// Value at `(x₁, x₂, x₃, x₄)` with `x₁`, `x₃` given as grid indices.
    pub fn evaluate(&self, u: &[Complex64], x1: usize, x2: f64, x3: usize, x4: f64) -> Complex64 {
        let nb = self.b.size();
        let (pa, pb) = (self.a.chain_points(), self.b.chain_points());
        let mut b_weights = vec![Complex64::new(0.0, 0.0); nb];
        for chain in 0..self.b.chains() {
            let mut p = x3;
            while p < pb {
                let (m, _) = self.b.mode_of(chain, p);
                b_weights[chain * pb + p] =
                    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 * x4);
                p += self.b.n_grid();
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for chain in 0..self.a.chains() {
            let mut p = x1;
            while p < pa {
                let (m, _) = self.a.mode_of(chain, p);
                let wa = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * m as f64 * x2);
                let row = &u[(chain * pa + p) * nb..(chain * pa + p + 1) * nb];
                let s: Complex64 = row.iter().zip(&b_weights).map(|(x, w)| x * w).sum();
                acc += wa * s;
                p += self.a.n_grid();
            }
        }
        acc
    }
}

/// `∇*∇` with the Fourier-diagonal preconditioner.
pub struct LaplacianOperator<'a> {
    pub grid: &'a Grid4,
    pub sigma: f64,
}

impl LinearOperator for LaplacianOperator<'_> {
    fn len(&self) -> usize {
        self.grid.size()
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(&self.grid.laplacian(x));
    }

    fn precondition(&self, r: &[Complex64], out: &mut [Complex64]) {
        out.copy_from_slice(&self.grid.precondition(r, self.sigma));
    }

    fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        self.grid.inner(a, b)
    }
}

fn accumulate(target: &mut Option<Field>, src: &[Complex64], coeff: Complex64) {
    if coeff == Complex64::new(0.0, 0.0) {
        return;
    }
    let t = target.get_or_insert_with(|| vec![Complex64::new(0.0, 0.0); src.len()]);
    for (x, s) in t.iter_mut().zip(src) {
        *x += s * coeff;
    }
}

/// `Σ_μ c_μ ∇_μ` from one chirality to the other.
pub fn dirac(grid: &Grid4, module: &CliffordModule<f64>, psi: &HalfSpinor, from_minus: bool) -> HalfSpinor {
    let (src, dst) = if from_minus { (MINUS, PLUS) } else { (PLUS, MINUS) };
    let mut out: HalfSpinor = [None, None];
    for mu in 0..4 {
        let c = module.generator(mu);
        for (s, comp) in psi.iter().enumerate() {
            let Some(comp) = comp else { continue };
            let d = grid.nabla(mu, comp);
            for (t, slot) in out.iter_mut().enumerate() {
                accumulate(slot, &d, c[(dst[t], src[s])]);
            }
        }
    }
    out
}

/// `c(v)` applied pointwise, mapping one chirality to the other.
pub fn clifford_apply(module: &CliffordModule<f64>, psi: &HalfSpinor, mu: usize, from_minus: bool) -> HalfSpinor {
    let (src, dst) = if from_minus { (MINUS, PLUS) } else { (PLUS, MINUS) };
    let c = module.generator(mu);
    let mut out: HalfSpinor = [None, None];
    for (s, comp) in psi.iter().enumerate() {
        let Some(comp) = comp else { continue };
        for (t, slot) in out.iter_mut().enumerate() {
            accumulate(slot, comp, c[(dst[t], src[s])]);
        }
    }
    out
}

/// A pointwise 4×4 spinor matrix restricted to one chirality block.
pub fn matrix_apply(m: &crate::spin4::CMatrix<f64>, psi: &HalfSpinor, from_minus: bool) -> HalfSpinor {
    let (src, dst) = if from_minus { (MINUS, PLUS) } else { (PLUS, MINUS) };
    let mut out: HalfSpinor = [None, None];
    for (s, comp) in psi.iter().enumerate() {
        let Some(comp) = comp else { continue };
        for (t, slot) in out.iter_mut().enumerate() {
            accumulate(slot, comp, m[(dst[t], src[s])]);
        }
    }
    out
}

pub fn half_norm_sq(grid: &Grid4, psi: &HalfSpinor) -> f64 {
    psi.iter().flatten().map(|c| grid.inner(c, c).re).sum()
}

pub fn half_inner(grid: &Grid4, a: &HalfSpinor, b: &HalfSpinor) -> Complex64 {
    a.iter()
        .zip(b)
        .filter_map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => Some(grid.inner(x, y)),
            _ => None,
        })
        .sum()
}

pub fn require_same_grid(a: &Grid4, b: &Grid4) -> Result<()> {
    if a.size() != b.size() {
        return Err(Error::precondition("fields live on different grids"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn smooth(grid: &Grid4, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bump = |ring: &FactorRing, rng: &mut ChaCha8Rng| -> Field {
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let shift: f64 = rng.gen_range(-0.5..0.5);
            ring.positions()
                .iter()
                .cycle()
                .take(ring.size())
                .map(|y| c * (-2.0 * (y - shift).powi(2)).exp())
                .collect()
        };
        let fa = bump(&grid.a, &mut rng);
        let fb = bump(&grid.b, &mut rng);
        let ga = bump(&grid.a, &mut rng);
        let gb = bump(&grid.b, &mut rng);
        let p = grid.product(&fa, &fb);
        let q = grid.product(&ga, &gb);
        p.iter().zip(&q).map(|(x, y)| x + y).collect()
    }

    #[test]
    fn laplacian_is_minus_sum_of_squares() {
        let grid = Grid4::new(1, -1, 8, [0.1, 0.2, 0.3, 0.4]).unwrap();
        let u = smooth(&grid, 1);
        let lap = grid.laplacian(&u);
        let mut alt = grid.zeros();
        for mu in 0..4 {
            let d = grid.nabla(mu, &grid.nabla(mu, &u));
            alt.iter_mut().zip(&d).for_each(|(a, x)| *a -= x);
        }
        let err = lap.iter().zip(&alt).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-8 * grid.spectral_bound(), "{err}");
    }

    #[test]
    fn laplacian_is_hermitian_positive() {
        let grid = Grid4::new(1, -1, 8, [0.3, 0.1, 0.7, 0.2]).unwrap();
        let u = smooth(&grid, 2);
        let v = smooth(&grid, 3);
        let a = grid.inner(&grid.laplacian(&u), &v);
        let b = grid.inner(&u, &grid.laplacian(&v));
        assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
        assert!(grid.inner(&u, &grid.laplacian(&u)).re > 0.0);
    }

    #[test]
    fn preconditioner_inverts_kinetic_part() {
        let grid = Grid4::new(1, 1, 4, [0.0; 4]).unwrap();
        let u = smooth(&grid, 4);
        let sigma = 3.0;
        let to_c = |v: Vec<f64>| v.into_iter().map(|k| Complex64::new(k, 0.0)).collect::<Vec<_>>();
        let mut ku = u.clone();
        grid.apply_a_symbol(&mut ku, &to_c(grid.a.kinetic_symbol()));
        let mut kb = u.clone();
        grid.b.apply_symbol(&mut kb, &to_c(grid.b.kinetic_symbol()));
        let m: Field = u.iter().zip(&ku).zip(&kb).map(|((x, a), b)| a + b + x * sigma).collect();
        let back = grid.precondition(&m, sigma);
        let err = back.iter().zip(&u).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn dirac_squares_to_weitzenbock() {
        let grid = Grid4::new(1, -1, 8, [0.2, 0.1, 0.4, 0.3]).unwrap();
        let module = CliffordModule::<f64>::new();
        let u = smooth(&grid, 5);
        // on S⁺ the curvature term vanishes for anti-self-dual flux
        let psi: HalfSpinor = [Some(u.clone()), None];
        let dd = dirac(&grid, &module, &dirac(&grid, &module, &psi, false), true);
        let lap = grid.laplacian(&u);
        let err = dd[0].as_ref().unwrap().iter().zip(&lap).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        let off = dd[1].as_ref().map_or(0.0, |f| f.iter().map(|z| z.norm()).fold(0.0, f64::max));
        assert!(err < 1e-8 * grid.spectral_bound() && off < 1e-8 * grid.spectral_bound(), "{err} {off}");
    }
}
