//! Dense unitary and skew-Hermitian matrix algebra.
//!
//! Unitary matrices are diagonalised through a complex Schur decomposition
//! (for a normal matrix the triangular factor is diagonal up to round-off).
//! Eigenvectors follow a fixed convention so that anything built from them
//! downstream is reproducible:
//!
//! * eigenvalues are sorted by argument in `[0, 2π)`;
//! * eigenvalues closer than [`CLUSTER_TOL`] in angle form a cluster whose
//!   eigenspace is re-orthonormalised as a block by pivoted Gram–Schmidt on
//!   the cluster projector, so the basis depends only on the eigenspace;
//! * every eigenvector has its largest-modulus component real positive
//!   (ties go to the lowest index).

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Tolerance on `U*U - 1` accepted for unitary input.
pub const UNITARY_TOL: f64 = 1e-10;
/// Angular width below which eigenvalues are treated as one cluster.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Minimum angular distance between a branch point and the spectrum.
pub const BRANCH_TOL: f64 = 1e-8;
pub const TIE_TOL: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The three Pauli matrices.
pub fn pauli() -> [CMat; 3] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    [
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Max-entry deviation of `m*m - 1`.
pub fn unitarity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let p = m.adjoint() * m - CMat::identity(n, n);
    p.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn skew_defect(m: &CMat) -> f64 {
    let d = m.adjoint() + m;
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    entries: CMat,
}

impl UnitaryMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::Validation(format!(
                "unitary matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let defect = unitarity_defect(&entries);
        if !(defect <= UNITARY_TOL) {
            return Err(Error::Validation(format!(
                "matrix is not unitary: |U*U - 1| = {defect:e}"
            )));
        }
        Ok(Self { entries })
    }

    /// Like [`UnitaryMatrix::new`] but additionally requires `det = 1`.
    pub fn new_special(entries: CMat) -> Result<Self> {
        let u = Self::new(entries)?;
        let det = u.entries.determinant();
        if (det - c(1.0, 0.0)).norm() > UNITARY_TOL {
            return Err(Error::Validation(format!("determinant {det} is not 1")));
        }
        Ok(u)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: CMat::identity(n, n),
        }
    }

    pub fn diagonal(phases: &[C64]) -> Result<Self> {
        Self::new(CMat::from_diagonal(&CVec::from_column_slice(phases)))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat {
        self.entries
    }

    pub fn inverse(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> Self {
        Self {
            entries: &self.entries * &other.entries,
        }
    }

    /// `v g v*` for a unitary `v`.
    pub fn conjugate_by(&self, v: &UnitaryMatrix) -> Self {
        Self {
            entries: v.matrix() * &self.entries * v.matrix().adjoint(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkewHermitianMatrix {
    entries: CMat,
}

impl SkewHermitianMatrix {
    pub fn new(entries: CMat) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Validation(
                "skew-Hermitian matrix must be square".into(),
            ));
        }
        let scale = entries.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let defect = skew_defect(&entries);
        if defect > 1e-12 * scale {
            return Err(Error::Validation(format!(
                "matrix is not skew-Hermitian: |X* + X| = {defect:e}"
            )));
        }
        Ok(Self { entries })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            entries: CMat::zeros(n, n),
        }
    }

    pub fn matrix(&self) -> &CMat {
        &self.entries
    }

    pub fn into_matrix(self) -> CMat {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

/// Full eigensystem of a unitary matrix.
#[derive(Debug, Clone)]
pub struct UnitCircleSpectrum {
    /// Unit-modulus eigenvalues in the conventional order.
    pub eigenvalues: Vec<C64>,
    /// Arguments of `eigenvalues`, each in `[0, 2π)`.
    pub phases: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the same order.
    pub eigenvectors: CMat,
    /// Index ranges of angular clusters (consecutive in the ordering).
    pub clusters: Vec<std::ops::Range<usize>>,
}

impl UnitCircleSpectrum {
    pub fn reconstruct(&self) -> CMat {
        let d = CMat::from_diagonal(&CVec::from_column_slice(&self.eigenvalues));
        &self.eigenvectors * d * self.eigenvectors.adjoint()
    }

    pub fn eigenvector(&self, k: usize) -> CVec {
        self.eigenvectors.column(k).into_owned()
    }
}

/// Argument in `[0, 2π)`.
pub fn arg_2pi(z: C64) -> f64 {
    let a = z.arg();
    let a = if a < 0.0 { a + TAU } else { a };
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Distance between two angles on the circle.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Multiply `v` by the phase that makes its largest-modulus component
/// real positive.
pub fn fix_phase(v: &mut CVec) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max - TIE_TOL)
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    *v *= phase;
}

/// Orthonormal basis of the range of a Hermitian projector, chosen by
/// pivoted Gram–Schmidt on its columns. Depends only on the projector.
pub fn canonical_basis(projector: &CMat, rank: usize) -> CMat {
    let n = projector.nrows();
    let mut residual = projector.clone();
    let mut basis = CMat::zeros(n, rank);
    for col in 0..rank {
        let max = (0..n).map(|i| residual[(i, i)].re).fold(f64::MIN, f64::max);
        let pivot = (0..n)
            .find(|&i| residual[(i, i)].re >= max - TIE_TOL)
            .unwrap_or(0);
        let mut w = residual.column(pivot).into_owned();
        let norm = w.norm();
        w /= C64::from(norm);
        fix_phase(&mut w);
        residual -= &w * w.adjoint();
        basis.set_column(col, &w);
    }
    basis
}

/// Eigendecomposition of a unitary matrix with the deterministic
/// ordering and phase conventions described in the module docs.
pub fn eig_unitary(g: &UnitaryMatrix) -> UnitCircleSpectrum {
    let n = g.dim();
    let (q, t) = g.matrix().clone().schur().unpack();

    // Raw eigenpairs; refresh the eigenvalue from the Rayleigh quotient.
    let mut raw: Vec<(f64, C64, CVec)> = (0..n)
        .map(|k| {
            let v = q.column(k).into_owned();
            let rq = (v.adjoint() * g.matrix() * &v)[(0, 0)];
            let lambda = if rq.norm() > 0.5 {
                rq / rq.norm()
            } else {
                t[(k, k)] / t[(k, k)].norm()
            };
            (arg_2pi(lambda), lambda, v)
        })
        .collect();
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Angular clusters; a cluster straddling the angle 0 is moved to the front.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match groups.last_mut() {
            Some(group) if raw[k].0 - raw[*group.last().unwrap()].0 <= CLUSTER_TOL => group.push(k),
            _ => groups.push(vec![k]),
        }
    }
    if groups.len() > 1 {
        let last = *groups.last().unwrap().last().unwrap();
        let first = groups[0][0];
        if raw[first].0 + TAU - raw[last].0 <= CLUSTER_TOL {
            let mut tail = groups.pop().unwrap();
            tail.extend(groups[0].iter().copied());
            groups[0] = tail;
        }
    }

    let mut eigenvalues = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    let mut eigenvectors = CMat::zeros(n, n);
    let mut clusters = Vec::with_capacity(groups.len());
    let mut col = 0;
    for group in groups {
        let start = col;
        if group.len() == 1 {
            let (phase, lambda, mut v) = raw[group[0]].clone();
            fix_phase(&mut v);
            eigenvectors.set_column(col, &v);
            eigenvalues.push(lambda);
            phases.push(phase);
            col += 1;
        } else {
            let mut projector = CMat::zeros(n, n);
            for &k in &group {
                projector += &raw[k].2 * raw[k].2.adjoint();
            }
            let basis = canonical_basis(&projector, group.len());
            for (j, &k) in group.iter().enumerate() {
                eigenvectors.set_column(col, &basis.column(j));
                eigenvalues.push(raw[k].1);
                phases.push(raw[k].0);
                col += 1;
            }
        }
        clusters.push(start..col);
    }

    UnitCircleSpectrum {
        eigenvalues,
        phases,
        eigenvectors,
        clusters,
    }
}

/// Angular distance from `lambda` to the spectrum of `g`.
pub fn distance_to_spectrum(spectrum: &UnitCircleSpectrum, lambda: C64) -> f64 {
    let a = arg_2pi(lambda);
    spectrum
        .phases
        .iter()
        .map(|&p| circle_distance(p, a))
        .fold(f64::INFINITY, f64::min)
}

/// Logarithm of `g` whose eigenphases lie in the open arc
/// `(arg λ - 2π, arg λ)`, with `arg λ` the principal argument in `(-π, π]`.
///
/// For `λ = -1` this is the principal logarithm. The result is continuous
/// in `g` as long as `λ` stays off the spectrum.
pub fn log_branch(g: &UnitaryMatrix, lambda: C64) -> Result<SkewHermitianMatrix> {
    if (lambda.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Contract(format!(
            "branch point {lambda} is not on the unit circle"
        )));
    }
    let spectrum = eig_unitary(g);
    let distance = distance_to_spectrum(&spectrum, lambda);
    if distance <= BRANCH_TOL {
        return Err(Error::BranchPoint {
            lambda_arg: lambda.arg(),
            distance,
        });
    }
    let phases = branch_phases(&spectrum, lambda);
    let d = CMat::from_diagonal(&CVec::from_iterator(
        phases.len(),
        phases.iter().map(|&p| c(0.0, p)),
    ));
    let v = &spectrum.eigenvectors;
    let mut x = v * d * v.adjoint();
    // Remove the Hermitian round-off part.
    x = (&x - x.adjoint()) * c(0.5, 0.0);
    Ok(SkewHermitianMatrix { entries: x })
}

/// Eigenphases of `spectrum` lifted into `(arg λ - 2π, arg λ)`.
pub fn branch_phases(spectrum: &UnitCircleSpectrum, lambda: C64) -> Vec<f64> {
    let top = lambda.arg();
    spectrum
        .phases
        .iter()
        .map(|&p| top - TAU + (p - top).rem_euclid(TAU))
        .collect()
}

/// Matrix exponential of a skew-Hermitian matrix through the Hermitian
/// eigendecomposition of `-iX`.
pub fn exp_skew(x: &SkewHermitianMatrix) -> UnitaryMatrix {
    UnitaryMatrix {
        entries: exp_skew_matrix(x.matrix()),
    }
}

/// `exp X` for a matrix that is skew-Hermitian up to round-off.
pub fn exp_skew_matrix(x: &CMat) -> CMat {
    let n = x.nrows();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    let h = x * c(0.0, -1.0);
    let h = (&h + h.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let d = CMat::from_diagonal(&CVec::from_iterator(
        n,
        eig.eigenvalues.iter().map(|&e| C64::from_polar(1.0, e)),
    ));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// `2x2` special unitary matrix of the unit quaternion `(q0, q1, q2, q3)`:
/// `q0 + i (q1 σ1 + q2 σ2 + q3 σ3)`.
pub fn su2_from_quaternion(q: [f64; 4]) -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[c(q[0], q[3]), c(q[2], q[1]), c(-q[2], q[1]), c(q[0], -q[3])],
    )
}

/// Inverse of [`su2_from_quaternion`] (valid for matrices of that form).
pub fn quaternion_of_su2(g: &CMat) -> [f64; 4] {
    [g[(0, 0)].re, g[(0, 1)].im, g[(0, 1)].re, g[(0, 0)].im]
}

/// Haar-random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> UnitaryMatrix {
    let mut q = [0.0; 4];
    loop {
        for x in q.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            q.iter_mut().for_each(|x| *x /= n);
            break;
        }
    }
    UnitaryMatrix {
        entries: su2_from_quaternion(q),
    }
}

/// Haar-random element of U(n) (QR of a complex Ginibre matrix with the
/// phases of `R` absorbed).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    let z = CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * (0.5f64).sqrt()
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        let mut col = u.column_mut(j);
        col *= phase;
    }
    // One Newton step towards exact unitarity.
    let correction = (CMat::identity(n, n) * c(3.0, 0.0) - u.adjoint() * &u) * c(0.5, 0.0);
    UnitaryMatrix {
        entries: u * correction,
    }
}

/// Random skew-Hermitian matrix with Gaussian entries of unit scale.
pub fn random_skew_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SkewHermitianMatrix {
    let z = CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    });
    SkewHermitianMatrix {
        entries: (&z - z.adjoint()) * c(0.5, 0.0),
    }
}

/// Random traceless skew-Hermitian matrix.
pub fn random_su<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SkewHermitianMatrix {
    let mut x = random_skew_hermitian(n, rng).into_matrix();
    let tr = x.trace() / C64::from(n as f64);
    for i in 0..n {
        x[(i, i)] -= tr;
    }
    SkewHermitianMatrix { entries: x }
}

/// `[a, b] = ab - ba`.
pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Principal argument lifted to `(-π, π]`.
pub fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        a + TAU
    } else {
        a
    }
}
