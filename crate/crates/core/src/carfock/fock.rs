//! Fermionic Fock space of a `d`-dimensional one-particle space with
//! `{a*(u), a(v)} = 2⟨v, u⟩`.
//!
//! Basis states are occupation bitstrings; bit `i` is mode `i`. The
//! integer-normalised operators `c_i†` act by Jordan–Wigner signs and
//! `a*(e_i) = √2 c_i†`.

use std::f64::consts::SQRT_2;

use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lie::{c, canonical_basis, CMat, CVec, UnitaryMatrix, C64};

pub const MAX_ONE_PARTICLE_DIM: usize = 12;

/// Dense state vector on the Fock space.
pub type FockState = Vec<C64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSpace {
    d: usize,
    /// Basis states of each particle number, ascending.
    sectors: Vec<Vec<usize>>,
    /// Position of each basis state inside its sector.
    position: Vec<usize>,
}

fn jw_sign(state: usize, i: usize) -> i8 {
    if (state & ((1 << i) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl FockSpace {
    pub fn new(d: usize) -> Result<Self> {
        if d > MAX_ONE_PARTICLE_DIM {
            return Err(Error::DimensionCap {
                requested: d,
                cap: MAX_ONE_PARTICLE_DIM,
            });
        }
        let mut sectors = vec![Vec::new(); d + 1];
        let mut position = vec![0; 1 << d];
        for s in 0..(1usize << d) {
            let n = s.count_ones() as usize;
            position[s] = sectors[n].len();
            sectors[n].push(s);
        }
        Ok(Self {
            d,
            sectors,
            position,
        })
    }

    pub fn one_particle_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        1 << self.d
    }

    pub fn sector(&self, n: usize) -> &[usize] {
        &self.sectors[n]
    }

    /// `c_i† |s⟩ = sign |s ∪ {i}⟩`, or `None` when `i` is occupied.
    pub fn create_basis(&self, i: usize, s: usize) -> Option<(usize, i8)> {
        (s & (1 << i) == 0).then(|| (s | (1 << i), jw_sign(s, i)))
    }

    /// `c_i |s⟩ = sign |s ∖ {i}⟩`, or `None` when `i` is empty.
    pub fn annihilate_basis(&self, i: usize, s: usize) -> Option<(usize, i8)> {
        (s & (1 << i) != 0).then(|| (s & !(1 << i), jw_sign(s, i)))
    }

    /// Largest entry of the integer matrices `{c_i, c_j†} − δ_ij`,
    /// `{c_i, c_j}` and `{c_i†, c_j†}`, computed exactly.
    pub fn car_defect_exact(&self) -> i64 {
        type Op<'a> = &'a dyn Fn(usize, usize) -> Option<(usize, i8)>;
        let create = |i: usize, s: usize| self.create_basis(i, s);
        let annihilate = |i: usize, s: usize| self.annihilate_basis(i, s);
        let apply = |ops: [(Op, usize); 2], s: usize| -> Option<(usize, i64)> {
            let (t, s1) = (ops[1].0)(ops[1].1, s)?;
            let (u, s2) = (ops[0].0)(ops[0].1, t)?;
            Some((u, (s1 * s2) as i64))
        };
        let mut worst = 0i64;
        for i in 0..self.d {
            for j in 0..self.d {
                for s in 0..self.dim() {
                    let pairs: [([(Op, usize); 2], [(Op, usize); 2], i64); 3] = [
                        (
                            [(&annihilate, i), (&create, j)],
                            [(&create, j), (&annihilate, i)],
                            (i == j) as i64,
                        ),
                        (
                            [(&annihilate, i), (&annihilate, j)],
                            [(&annihilate, j), (&annihilate, i)],
                            0,
                        ),
                        (
                            [(&create, i), (&create, j)],
                            [(&create, j), (&create, i)],
                            0,
                        ),
                    ];
                    for (first, second, delta) in pairs {
                        let mut out = std::collections::BTreeMap::<usize, i64>::new();
                        for ops in [first, second] {
                            if let Some((t, v)) = apply(ops, s) {
                                *out.entry(t).or_default() += v;
                            }
                        }
                        *out.entry(s).or_default() -= delta;
                        worst = worst.max(out.values().map(|v| v.abs()).max().unwrap_or(0));
                    }
                }
            }
        }
        worst
    }

    /// `a*(u) x = √2 Σ_i u_i c_i† x`.
    pub fn a_star(&self, u: &CVec, x: &[C64]) -> FockState {
        let mut y = vec![c(0.0, 0.0); self.dim()];
        for (s, &amp) in x.iter().enumerate() {
            if amp == c(0.0, 0.0) {
                continue;
            }
            for i in 0..self.d {
                if let Some((t, sign)) = self.create_basis(i, s) {
                    y[t] += u[i] * amp * (SQRT_2 * sign as f64);
                }
            }
        }
        y
    }

    /// `a(v) x = √2 Σ_i conj(v_i) c_i x`.
    pub fn a(&self, v: &CVec, x: &[C64]) -> FockState {
        let mut y = vec![c(0.0, 0.0); self.dim()];
        for (s, &amp) in x.iter().enumerate() {
            if amp == c(0.0, 0.0) {
                continue;
            }
            for i in 0..self.d {
                if let Some((t, sign)) = self.annihilate_basis(i, s) {
                    y[t] += v[i].conj() * amp * (SQRT_2 * sign as f64);
                }
            }
        }
        y
    }

    pub fn empty_state(&self) -> FockState {
        let mut v = vec![c(0.0, 0.0); self.dim()];
        v[0] = c(1.0, 0.0);
        v
    }

    pub fn basis_state(&self, s: usize) -> FockState {
        let mut v = vec![c(0.0, 0.0); self.dim()];
        v[s] = c(1.0, 0.0);
        v
    }

    pub fn random_state(&self, seed: u64) -> FockState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<C64> = (0..self.dim())
            .map(|_| {
                c(
                    StandardNormal.sample(&mut rng),
                    StandardNormal.sample(&mut rng),
                )
            })
            .collect();
        let n = state_norm(&v);
        v.into_iter().map(|z| z / n).collect()
    }
}

pub fn state_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn sub(a: &[C64], b: &[C64]) -> FockState {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[cfg(test)]
fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn unit(d: usize, i: usize) -> CVec {
    CVec::from_fn(d, |k, _| if k == i { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// A splitting `C^d = H₊ ⊕ H₋` given by the projector onto `H₊`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polarization {
    projector: CMat,
}

pub const PROJECTOR_TOL: f64 = 1e-12;

impl Polarization {
    pub fn new(projector: CMat) -> Result<Self> {
        let p2 = &projector * &projector;
        let idem = (&p2 - &projector)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let herm = (&projector - projector.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if idem > PROJECTOR_TOL || herm > PROJECTOR_TOL {
            return Err(Error::Validation(format!(
                "not an orthogonal projector (P²−P: {idem:e}, P−P*: {herm:e})"
            )));
        }
        Ok(Self { projector })
    }

    /// `P₊ = diag(1, …, 1, 0, …, 0)` with `positive` ones.
    pub fn standard(d: usize, positive: usize) -> Self {
        Self {
            projector: CMat::from_fn(d, d, |i, j| {
                if i == j && i < positive {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            }),
        }
    }

    /// `V P V*`.
    pub fn rotated(&self, v: &UnitaryMatrix) -> Result<Self> {
        Self::new(v.matrix() * &self.projector * v.matrix().adjoint())
    }

    pub fn projector(&self) -> &CMat {
        &self.projector
    }

    pub fn dim(&self) -> usize {
        self.projector.nrows()
    }

    pub fn positive_rank(&self) -> usize {
        self.projector.trace().re.round() as usize
    }

    /// Orthonormal bases of `H₊` and `H₋`.
    pub fn bases(&self) -> (CMat, CMat) {
        let d = self.dim();
        let p = self.positive_rank();
        let complement = CMat::identity(d, d) - &self.projector;
        (
            canonical_basis(&self.projector, p),
            canonical_basis(&complement, d - p),
        )
    }
}

/// The state killed by `a(v)`, `v ∈ H₊`, and by `a*(u)`, `u ∈ H₋`: the
/// product of creators over a basis of `H₋` applied to the empty state,
/// normalised with its first nonzero amplitude real positive.
pub fn vacuum(pol: &Polarization, fock: &FockSpace) -> Result<FockState> {
    if pol.dim() != fock.one_particle_dim() {
        return Err(Error::Contract(format!(
            "polarization of C^{} on the Fock space of C^{}",
            pol.dim(),
            fock.one_particle_dim()
        )));
    }
    let (_, minus) = pol.bases();
    let mut psi = fock.empty_state();
    for j in (0..minus.ncols()).rev() {
        psi = fock.a_star(&minus.column(j).into_owned(), &psi);
    }
    let n = state_norm(&psi);
    let mut psi: FockState = psi.into_iter().map(|z| z / n).collect();
    let max = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(first) = psi.iter().find(|z| z.norm() > 1e-10 * max).copied() {
        let phase = first.conj() / first.norm();
        psi.iter_mut().for_each(|z| *z *= phase);
    }
    Ok(psi)
}

/// Largest `‖a(v)ψ‖`, `‖a*(u)ψ‖` over orthonormal bases of `H₊` and `H₋`.
pub fn vacuum_residual(pol: &Polarization, fock: &FockSpace, psi: &[C64]) -> f64 {
    let (plus, minus) = pol.bases();
    let a = (0..plus.ncols()).map(|j| state_norm(&fock.a(&plus.column(j).into_owned(), psi)));
    let b =
        (0..minus.ncols()).map(|j| state_norm(&fock.a_star(&minus.column(j).into_owned(), psi)));
    a.chain(b).fold(0.0, f64::max)
}

/// Dimension of the joint kernel of `{a(v) : v ∈ H₊} ∪ {a*(u) : u ∈ H₋}`,
/// from the nullity of `Σ a(v)* a(v) + Σ a*(u)* a*(u)` built densely.
/// Only for small Fock spaces.
pub fn vacuum_kernel_dim(pol: &Polarization, fock: &FockSpace, tol: f64) -> Result<usize> {
    if fock.one_particle_dim() > 8 {
        return Err(Error::DimensionCap {
            requested: fock.one_particle_dim(),
            cap: 8,
        });
    }
    let (plus, minus) = pol.bases();
    let dim = fock.dim();
    let mut q = CMat::zeros(dim, dim);
    for s in 0..dim {
        let e = fock.basis_state(s);
        let mut col = vec![c(0.0, 0.0); dim];
        for j in 0..plus.ncols() {
            let v = plus.column(j).into_owned();
            let w = fock.a_star(&v, &fock.a(&v, &e));
            col.iter_mut().zip(&w).for_each(|(x, y)| *x += y);
        }
        for j in 0..minus.ncols() {
            let u = minus.column(j).into_owned();
            let w = fock.a(&u, &fock.a_star(&u, &e));
            col.iter_mut().zip(&w).for_each(|(x, y)| *x += y);
        }
        for (r, v) in col.into_iter().enumerate() {
            q[(r, s)] = v;
        }
    }
    let q = (&q + q.adjoint()) * c(0.5, 0.0);
    Ok(SymmetricEigen::new(q)
        .eigenvalues
        .iter()
        .filter(|&&e| e.abs() < tol)
        .count())
}

/// An operator on the Fock space that preserves particle number, stored
/// as one dense block per sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorOperator {
    pub blocks: Vec<CMat>,
}

impl SectorOperator {
    pub fn apply(&self, fock: &FockSpace, x: &[C64]) -> FockState {
        let mut y = vec![c(0.0, 0.0); fock.dim()];
        for (n, block) in self.blocks.iter().enumerate() {
            let states = fock.sector(n);
            let local = CVec::from_iterator(states.len(), states.iter().map(|&s| x[s]));
            let out = block * local;
            for (k, &s) in states.iter().enumerate() {
                y[s] = out[k];
            }
        }
        y
    }

    pub fn mul(&self, other: &SectorOperator) -> SectorOperator {
        SectorOperator {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    /// Hilbert–Schmidt inner product `tr(self* other)`.
    pub fn hs_inner(&self, other: &SectorOperator) -> C64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a.adjoint() * b).trace())
            .sum()
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (b.adjoint() * b - CMat::identity(b.nrows(), b.nrows())).norm())
            .fold(0.0, f64::max)
    }

    pub fn dense(&self, fock: &FockSpace) -> CMat {
        let mut m = CMat::zeros(fock.dim(), fock.dim());
        for (n, block) in self.blocks.iter().enumerate() {
            let states = fock.sector(n);
            for (i, &s) in states.iter().enumerate() {
                for (j, &t) in states.iter().enumerate() {
                    m[(s, t)] = block[(i, j)];
                }
            }
        }
        m
    }
}

#[derive(Debug, Clone)]
pub struct Implementer {
    pub operator: SectorOperator,
    /// Dimension of the space of solutions of the intertwining relations.
    pub phase_ambiguity: usize,
    /// Largest intertwining defect for `a*` and `a` on test vectors.
    pub residual: f64,
}

/// Joint kernel dimension of `{a(g e_i)}`, sector by sector.
pub fn annihilator_kernel_dim(g: &UnitaryMatrix, fock: &FockSpace, tol: f64) -> usize {
    let d = fock.one_particle_dim();
    let vs: Vec<CVec> = (0..d).map(|i| g.matrix().column(i).into_owned()).collect();
    let mut count = 0;
    for n in 0..=d {
        let states = fock.sector(n);
        let mut q = CMat::zeros(states.len(), states.len());
        for (col, &s) in states.iter().enumerate() {
            let e = fock.basis_state(s);
            for v in &vs {
                let w = fock.a_star(v, &fock.a(v, &e));
                for (row, &t) in states.iter().enumerate() {
                    q[(row, col)] += w[t];
                }
            }
        }
        let q = (&q + q.adjoint()) * c(0.5, 0.0);
        count += SymmetricEigen::new(q)
            .eigenvalues
            .iter()
            .filter(|&&e| e.abs() < tol)
            .count();
    }
    count
}

/// Largest `‖(ĝ a*(v) − a*(gv) ĝ) x‖`, `‖(ĝ a(v) − a(gv) ĝ) x‖` over the basis
/// vectors `v` and a few seeded random unit states `x`.
pub fn intertwining_residual(g: &UnitaryMatrix, ghat: &SectorOperator, fock: &FockSpace) -> f64 {
    let d = fock.one_particle_dim();
    let mut worst: f64 = 0.0;
    for seed in 0..3 {
        let x = fock.random_state(seed);
        let gx = ghat.apply(fock, &x);
        for i in 0..d {
            let v = unit(d, i);
            let gv = g.matrix() * &v;
            let lhs = ghat.apply(fock, &fock.a_star(&v, &x));
            worst = worst.max(state_norm(&sub(&lhs, &fock.a_star(&gv, &gx))));
            let lhs = ghat.apply(fock, &fock.a(&v, &x));
            worst = worst.max(state_norm(&sub(&lhs, &fock.a(&gv, &gx))));
        }
    }
    worst
}

/// The Fock implementer of a one-particle unitary, normalised to fix the
/// empty state: `ĝ c†_{s_1} ⋯ c†_{s_r} |0⟩ = c†(g e_{s_1}) ⋯ c†(g e_{s_r}) |0⟩`.
pub fn implement(g: &UnitaryMatrix, fock: &FockSpace) -> Result<Implementer> {
    let d = fock.one_particle_dim();
    if g.dim() != d {
        return Err(Error::Contract(format!(
            "{}x{} unitary on the Fock space of C^{d}",
            g.dim(),
            g.dim()
        )));
    }
    let images: Vec<CVec> = (0..d).map(|i| g.matrix().column(i).into_owned()).collect();
    // Columns by recursion on the lowest occupied mode.
    let mut columns: Vec<Option<FockState>> = vec![None; fock.dim()];
    columns[0] = Some(fock.empty_state());
    for s in 1..fock.dim() {
        let low = s.trailing_zeros() as usize;
        let rest = columns[s & !(1 << low)]
            .as_ref()
            .expect("smaller state first");
        let y: FockState = fock
            .a_star(&images[low], rest)
            .into_iter()
            .map(|z| z / SQRT_2)
            .collect();
        columns[s] = Some(y);
    }
    let blocks: Vec<CMat> = (0..=d)
        .map(|n| {
            let states = fock.sector(n);
            CMat::from_fn(states.len(), states.len(), |i, j| {
                columns[states[j]].as_ref().expect("filled")[states[i]]
            })
        })
        .collect();
    let operator = SectorOperator { blocks };
    let residual = intertwining_residual(g, &operator, fock);
    let phase_ambiguity = annihilator_kernel_dim(g, fock, 1e-8);
    if residual > 1e-8 {
        return Err(Error::Implementability(format!(
            "intertwining residual {residual:e}"
        )));
    }
    Ok(Implementer {
        operator,
        phase_ambiguity,
        residual,
    })
}

/// The phase `z` with `implement(g) implement(h) = z implement(gh)`.
pub fn composition_phase(gh: &Implementer, g: &Implementer, h: &Implementer) -> C64 {
    let prod = g.operator.mul(&h.operator);
    gh.operator.hs_inner(&prod) / gh.operator.hs_inner(&gh.operator)
}

/// Null space dimension of the full linear system
/// `X a*(e_i) = a*(g e_i) X`, `X a(e_i) = a(g e_i) X` on dense matrices.
/// Only for `d ≤ 3`.
pub fn intertwiner_nullity(
    g: &UnitaryMatrix,
    fock: &FockSpace,
    tol: f64,
) -> Result<(usize, Option<CMat>)> {
    let d = fock.one_particle_dim();
    if d > 3 {
        return Err(Error::DimensionCap {
            requested: d,
            cap: 3,
        });
    }
    let dim = fock.dim();
    let dense_of = |f: &dyn Fn(&[C64]) -> FockState| {
        let mut m = CMat::zeros(dim, dim);
        for s in 0..dim {
            let col = f(&fock.basis_state(s));
            for (r, v) in col.into_iter().enumerate() {
                m[(r, s)] = v;
            }
        }
        m
    };
    // vec(X B − C X) = (Bᵀ ⊗ 1 − 1 ⊗ C) vec(X)
    let mut rows: Vec<CMat> = Vec::new();
    for i in 0..d {
        let v = unit(d, i);
        let gv = g.matrix() * &v;
        for (b, cm) in [
            (
                dense_of(&|x| fock.a_star(&v, x)),
                dense_of(&|x| fock.a_star(&gv, x)),
            ),
            (dense_of(&|x| fock.a(&v, x)), dense_of(&|x| fock.a(&gv, x))),
        ] {
            let id = CMat::identity(dim, dim);
            rows.push(b.transpose().kronecker(&id) - id.kronecker(&cm));
        }
    }
    let mut system = CMat::zeros(rows.len() * dim * dim, dim * dim);
    for (k, r) in rows.iter().enumerate() {
        system
            .view_mut((k * dim * dim, 0), (dim * dim, dim * dim))
            .copy_from(r);
    }
    let gram = system.adjoint() * &system;
    let gram = (&gram + gram.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(gram);
    let null: Vec<usize> = (0..dim * dim)
        .filter(|&k| eig.eigenvalues[k].abs() < tol)
        .collect();
    let solution = (null.len() == 1).then(|| {
        let v = eig.eigenvectors.column(null[0]);
        CMat::from_fn(dim, dim, |i, j| v[j * dim + i])
    });
    Ok((null.len(), solution))
}
