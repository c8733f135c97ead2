//! Independent discretisation of `D_g` used to check the spectrum formula.
//!
//! On the grid `x_j = j h`, `h = 2π / M`, the midpoint scheme
//! `-i (ψ_{j+1} - ψ_j) / h = κ (ψ_{j+1} + ψ_j) / 2` with `ψ_M = g ψ_0` is the
//! Hermitian operator `H = -(2i/h) (S - 1)(S + 1)⁻¹`, where `S` is the twisted
//! shift. It has no spurious doubled modes, and its low eigenvalues are
//! found by shift-invert Lanczos.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lie::{c, CMat, CVec, UnitaryMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeOptions {
    pub grid: usize,
    pub shift: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        Self {
            grid: 2000,
            shift: 0.01234,
            max_iterations: 300,
            seed: 0x5eed,
        }
    }
}

struct ShiftInvert<'a> {
    g: &'a CMat,
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    alpha: C64,
    beta: C64,
    grid: usize,
}

impl<'a> ShiftInvert<'a> {
    fn new(g: &'a CMat, grid: usize, sigma: f64) -> Result<Self> {
        let h = std::f64::consts::TAU / grid as f64;
        let inv_ih = c(0.0, -1.0 / h);
        let alpha = inv_ih - sigma / 2.0;
        let beta = inv_ih + sigma / 2.0;
        let rho = beta / alpha;
        // (α g - β ρ^{M-1}) z_0 = rhs closes the recursion.
        let closing =
            g * alpha - CMat::identity(g.nrows(), g.nrows()) * (beta * rho.powu(grid as u32 - 1));
        let lu = closing.lu();
        if lu.determinant().norm() < 1e-300 {
            return Err(Error::Precondition(format!(
                "shift {sigma} is an eigenvalue of the lattice operator"
            )));
        }
        Ok(Self {
            g,
            lu,
            alpha,
            beta,
            grid,
        })
    }

    /// `y = (H - σ)⁻¹ r` through `y = (S + 1) z`, `(α S - β) z = r / 2`.
    fn apply(&self, r: &[C64]) -> Vec<C64> {
        let n = self.g.nrows();
        let m = self.grid;
        let b = |j: usize| CVec::from_iterator(n, r[j * n..(j + 1) * n].iter().map(|x| x * 0.5));
        // z_j = ρ^j z_0 + p_j with p_0 = 0 and α z_{j+1} = b_j + β z_j.
        let mut p = vec![CVec::zeros(n); m];
        for j in 0..m - 1 {
            p[j + 1] = (b(j) + &p[j] * self.beta) / self.alpha;
        }
        let rhs = b(m - 1) + &p[m - 1] * self.beta;
        let z0 = self.lu.solve(&rhs).expect("closing matrix is invertible");
        let rho = self.beta / self.alpha;
        let mut z = Vec::with_capacity(m);
        let mut rj = c(1.0, 0.0);
        for pj in p.iter() {
            z.push(&z0 * rj + pj);
            rj *= rho;
        }
        let mut y = vec![c(0.0, 0.0); n * m];
        for j in 0..m {
            let next = if j + 1 < m {
                z[j + 1].clone()
            } else {
                self.g * &z[0]
            };
            let yj = next + &z[j];
            y[j * n..(j + 1) * n].copy_from_slice(yj.as_slice());
        }
        y
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// The `count` eigenvalues of the discretised operator closest to `target`
/// (ascending by distance), from shift-invert Lanczos with full
/// reorthogonalisation.
pub fn lattice_eigenvalues_near(
    g: &UnitaryMatrix,
    target: f64,
    count: usize,
    opts: LatticeOptions,
) -> Result<Vec<f64>> {
    if opts.grid < 8 {
        return Err(Error::Contract("lattice needs at least 8 points".into()));
    }
    let sigma = target + opts.shift;
    let op = ShiftInvert::new(g.matrix(), opts.grid, sigma)?;
    let dim = g.dim() * opts.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q: Vec<C64> = (0..dim)
        .map(|_| {
            c(
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            )
        })
        .collect();
    let n0 = norm(&q);
    q.iter_mut().for_each(|x| *x /= n0);

    let mut basis: Vec<Vec<C64>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let want = count + 2;
    let max_it = opts.max_iterations.min(dim);
    for it in 0..max_it {
        let mut w = op.apply(&basis[it]);
        let a = dot(&basis[it], &w).re;
        alphas.push(a);
        for _ in 0..2 {
            for v in &basis {
                let proj = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= y * proj);
            }
        }
        let b = norm(&w);
        let k = alphas.len();
        if k >= want {
            let t = DMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    alphas[i]
                } else if i + 1 == j {
                    betas[i]
                } else if j + 1 == i {
                    betas[j]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let mut ritz: Vec<(f64, f64)> = (0..k)
                .map(|i| (eig.eigenvalues[i], (b * eig.eigenvectors[(k - 1, i)]).abs()))
                .collect();
            ritz.sort_by(|x, y| y.0.abs().total_cmp(&x.0.abs()));
            let top = &ritz[..want];
            let converged = top.iter().all(|(theta, res)| *res <= 1e-13 * theta.abs()) || b < 1e-14;
            if converged || it + 1 == max_it {
                let mut values: Vec<f64> =
                    top.iter().map(|(theta, _)| sigma + 1.0 / theta).collect();
                values.sort_by(|x, y| (x - target).abs().total_cmp(&(y - target).abs()));
                values.truncate(count);
                return Ok(values);
            }
        }
        if b < 1e-14 {
            break;
        }
        betas.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    Err(Error::Precondition(
        "Lanczos iteration did not converge".into(),
    ))
}
