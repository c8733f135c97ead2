//! Twisted Dirac operators `D_g = -i d/dx` on `[0, 2π]` with `ψ(2π) = g ψ(0)`.
//!
//! The spectrum of `D_g` is `{ n + θ_k / 2π : n ∈ Z }` over the eigenphases
//! `θ_k ∈ [0, 2π)` of `g`. An eigenvalue `n + θ_k/2π` has eigenfunction
//! `e^{i θ_k x / 2π} e^{i n x} v_k`; frames are stored as pairs of a Fourier
//! offset `n` and an internal vector `v_k`.

pub mod flow;
pub mod lattice;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{c, eig_unitary, CMat, UnitCircleSpectrum, UnitaryMatrix, C64};

pub use flow::{spectral_flow, spectral_flow_tracks, FlowTracks};
pub use lattice::{lattice_eigenvalues_near, LatticeOptions};

/// Minimum distance between a level and the spectrum.
pub const GAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct HolonomyPoint {
    pub g: UnitaryMatrix,
    pub label: Option<Vec<f64>>,
}

impl HolonomyPoint {
    pub fn new(g: UnitaryMatrix) -> Self {
        Self { g, label: None }
    }

    pub fn labelled(g: UnitaryMatrix, label: Vec<f64>) -> Self {
        Self {
            g,
            label: Some(label),
        }
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// Fractional eigenvalues `θ_k / 2π ∈ [0, 1)` with the eigensystem.
    pub fn fractional_spectrum(&self) -> (Vec<f64>, UnitCircleSpectrum) {
        let s = eig_unitary(&self.g);
        (s.phases.iter().map(|p| p / TAU).collect(), s)
    }
}

/// Open interval `(lo, hi)` of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralWindow {
    pub lo: f64,
    pub hi: f64,
}

impl SpectralWindow {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Contract(format!(
                "window ({lo}, {hi}) must be finite with lo < hi"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn shifted(&self, by: f64) -> Self {
        Self {
            lo: self.lo + by,
            hi: self.hi + by,
        }
    }
}

/// Distance between `a` and `b` in `R/Z`.
pub fn distance_mod1(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Distance from the real level `mu` to the spectrum of `D_g`.
pub fn level_gap(fractional: &[f64], mu: f64) -> f64 {
    fractional
        .iter()
        .map(|&y| distance_mod1(y, mu))
        .fold(f64::INFINITY, f64::min)
}

/// `(value, eigen-index k, Fourier offset n)` for every eigenvalue inside
/// the open window, ascending.
fn window_entries(fractional: &[f64], window: &SpectralWindow) -> Vec<(f64, usize, i64)> {
    let mut out = Vec::new();
    for (k, &y) in fractional.iter().enumerate() {
        let first = (window.lo - y).floor() as i64;
        let last = (window.hi - y).ceil() as i64;
        for n in first..=last {
            let v = n as f64 + y;
            if v > window.lo && v < window.hi {
                out.push((v, k, n));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    out
}

/// Eigenvalues of `D_g` inside the window, with multiplicity, ascending.
pub fn spectrum(g: &HolonomyPoint, window: &SpectralWindow) -> Vec<f64> {
    let (fractional, _) = g.fractional_spectrum();
    window_entries(&fractional, window)
        .into_iter()
        .map(|e| e.0)
        .collect()
}

/// Increasing levels `μ_1 < … < μ_m` in `[0, 1)`; the open set `U_j` is
/// where `μ_j` is not an eigenvalue of `D_g`. The unit-circle points are
/// `λ_j = exp(2πi μ_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSpec {
    levels: Vec<f64>,
}

impl CoverSpec {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.len() < 4 {
            return Err(Error::Validation(format!(
                "a level cover needs at least 4 levels, got {}",
                levels.len()
            )));
        }
        if levels.iter().any(|&m| !(0.0..1.0).contains(&m)) {
            return Err(Error::Validation("levels must lie in [0, 1)".into()));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation(
                "levels must be strictly increasing".into(),
            ));
        }
        let total: f64 = levels.iter().sum();
        if distance_mod1(total, 0.0) <= GAP_TOL {
            return Err(Error::Validation(
                "the product of the points λ_j must differ from 1".into(),
            ));
        }
        Ok(Self { levels })
    }

    /// `m` levels `(j + offset) / m`.
    pub fn equispaced(m: usize, offset: f64) -> Result<Self> {
        Self::new((0..m).map(|j| (j as f64 + offset) / m as f64).collect())
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn lambda(&self, j: usize) -> C64 {
        C64::from_polar(1.0, TAU * self.levels[j])
    }

    fn level(&self, j: usize) -> Result<f64> {
        self.levels
            .get(j)
            .copied()
            .ok_or_else(|| Error::Contract(format!("cover index {j} out of range")))
    }
}

pub fn in_cover(g: &HolonomyPoint, j: usize, cover: &CoverSpec) -> Result<bool> {
    let mu = cover.level(j)?;
    let (fractional, _) = g.fractional_spectrum();
    Ok(level_gap(&fractional, mu) > GAP_TOL)
}

/// Orthonormal eigenframe of `E_{lo,hi}(g)`.
#[derive(Debug, Clone)]
pub struct WindowFrame {
    pub window: SpectralWindow,
    /// Eigenvalues in the window, ascending.
    pub eigenvalues: Vec<f64>,
    /// Fourier offset of each frame column.
    pub modes: Vec<i64>,
    /// Internal eigenvector of each frame column.
    pub vectors: CMat,
    /// Phase `p` such that `p · (wedge of the columns)` is the
    /// trivialisation of the top exterior power: the unit wedge whose
    /// pairing with the reference frame is real positive. It depends only
    /// on the subspace.
    pub det_line_phase: C64,
}

impl WindowFrame {
    pub fn rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn internal_dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// Columns as vectors on the modes `n_lo..=n_hi` (row `(n - n_lo) N + a`).
    pub fn dense(&self, n_lo: i64, n_hi: i64) -> CMat {
        let n = self.internal_dim();
        let rows = ((n_hi - n_lo + 1).max(0) as usize) * n;
        let mut m = CMat::zeros(rows, self.rank());
        for (col, &mode) in self.modes.iter().enumerate() {
            if mode < n_lo || mode > n_hi {
                continue;
            }
            let base = (mode - n_lo) as usize * n;
            for a in 0..n {
                m[(base + a, col)] = self.vectors[(a, col)];
            }
        }
        m
    }

    pub fn mode_range(&self) -> (i64, i64) {
        let lo = self.modes.iter().copied().min().unwrap_or(0);
        let hi = self.modes.iter().copied().max().unwrap_or(0);
        (lo, hi)
    }

    /// Gram matrix `self* other` in the mode basis.
    pub fn overlap(&self, other: &WindowFrame) -> CMat {
        let mut m = CMat::zeros(self.rank(), other.rank());
        for i in 0..self.rank() {
            for j in 0..other.rank() {
                if self.modes[i] == other.modes[j] {
                    m[(i, j)] =
                        (self.vectors.column(i).adjoint() * other.vectors.column(j))[(0, 0)];
                }
            }
        }
        m
    }
}

/// Entry `(n, a)` of column `j` of the fixed reference frame against which
/// determinant lines are trivialised.
pub fn reference_entry(j: usize, n: i64, a: usize) -> C64 {
    let (j, n, a) = (j as f64, n as f64, a as f64);
    C64::from_polar(
        1.0 + 0.5 * (1.1 * j + 0.3 * a + 1.7 * n).cos(),
        0.7 + 1.3 * j + 2.1 * a + 0.9 * n + 0.37 * j * a,
    )
}

/// Smallest `|det(R* F)|` accepted when trivialising a determinant line.
pub const REFERENCE_TOL: f64 = 1e-12;

/// The phase `p` making `det(R* F) p` real positive, with `R` the first
/// `rank` reference columns on the rows of `dense` (modes `n_lo..`).
fn det_line_phase(dense: &CMat, n_lo: i64, internal: usize) -> Result<C64> {
    let r = dense.ncols();
    if r == 0 {
        return Ok(c(1.0, 0.0));
    }
    let reference = CMat::from_fn(dense.nrows(), r, |row, j| {
        reference_entry(j, n_lo + (row / internal) as i64, row % internal)
    });
    let d = (reference.adjoint() * dense).determinant();
    if d.norm() <= REFERENCE_TOL {
        return Err(Error::Precondition(
            "window frame is degenerate against the reference frame".into(),
        ));
    }
    Ok(d.conj() / d.norm())
}

fn check_endpoint(fractional: &[f64], level: f64) -> Result<()> {
    let gap = level_gap(fractional, level);
    if gap <= GAP_TOL {
        return Err(Error::Precondition(format!(
            "level {level} lies within {gap:e} of the spectrum"
        )));
    }
    Ok(())
}

pub fn window_frame(g: &HolonomyPoint, window: &SpectralWindow) -> Result<WindowFrame> {
    let (fractional, spec) = g.fractional_spectrum();
    check_endpoint(&fractional, window.lo)?;
    check_endpoint(&fractional, window.hi)?;
    let entries = window_entries(&fractional, window);
    let n = g.dim();
    let mut vectors = CMat::zeros(n, entries.len());
    for (col, &(_, k, _)) in entries.iter().enumerate() {
        vectors.set_column(col, &spec.eigenvectors.column(k));
    }
    let modes: Vec<i64> = entries.iter().map(|e| e.2).collect();
    let mut frame = WindowFrame {
        window: *window,
        eigenvalues: entries.iter().map(|e| e.0).collect(),
        modes,
        vectors,
        det_line_phase: c(1.0, 0.0),
    };
    let (lo, hi) = frame.mode_range();
    frame.det_line_phase = det_line_phase(&frame.dense(lo, hi), lo, n)?;
    Ok(frame)
}

/// `f` for increasing levels `a < b < c`: the trivialisation of
/// `L_ab ⊗ L_bc` measured against that of `L_ac`.
fn cocycle_sorted(g: &HolonomyPoint, a: f64, b: f64, cc: f64) -> Result<C64> {
    let ab = window_frame(g, &SpectralWindow::new(a, b)?)?;
    let bc = window_frame(g, &SpectralWindow::new(b, cc)?)?;
    let ac = window_frame(g, &SpectralWindow::new(a, cc)?)?;
    if ab.rank() + bc.rank() != ac.rank() {
        return Err(Error::Precondition("window ranks are not additive".into()));
    }
    let mut joined = CMat::zeros(ac.rank(), ac.rank());
    joined.columns_mut(0, ab.rank()).copy_from(&ac.overlap(&ab));
    joined
        .columns_mut(ab.rank(), bc.rank())
        .copy_from(&ac.overlap(&bc));
    let det = if ac.rank() == 0 {
        c(1.0, 0.0)
    } else {
        joined.determinant()
    };
    Ok(ab.det_line_phase * bc.det_line_phase * ac.det_line_phase.conj() * det)
}

/// The gerbe cocycle `f` at three real levels. Swapping two levels inverts
/// the value; a repeated level gives 1.
pub fn gerbe_cocycle_levels(g: &HolonomyPoint, levels: [f64; 3]) -> Result<C64> {
    let (fractional, _) = g.fractional_spectrum();
    for &m in &levels {
        check_endpoint(&fractional, m)?;
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| levels[i].total_cmp(&levels[j]));
    let sorted = order.map(|i| levels[i]);
    if sorted[0] == sorted[1] || sorted[1] == sorted[2] {
        return Ok(c(1.0, 0.0));
    }
    let odd = (order[0] > order[1]) as usize
        + (order[0] > order[2]) as usize
        + (order[1] > order[2]) as usize;
    let f = cocycle_sorted(g, sorted[0], sorted[1], sorted[2])?;
    Ok(if odd % 2 == 1 { f.conj() } else { f })
}

/// The gerbe cocycle `f_{jkl}(g)` of a level cover.
pub fn gerbe_cocycle(
    g: &HolonomyPoint,
    cover: &CoverSpec,
    j: usize,
    k: usize,
    l: usize,
) -> Result<C64> {
    let levels = [cover.level(j)?, cover.level(k)?, cover.level(l)?];
    for (&idx, &m) in [j, k, l].iter().zip(&levels) {
        let (fractional, _) = g.fractional_spectrum();
        if level_gap(&fractional, m) <= GAP_TOL {
            return Err(Error::Precondition(format!(
                "point is not in U_{idx} (level {m})"
            )));
        }
    }
    gerbe_cocycle_levels(g, levels)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::lie::{random_su2, random_unitary};

    fn diag_i() -> HolonomyPoint {
        HolonomyPoint::new(UnitaryMatrix::diagonal(&[c(0.0, 1.0), c(0.0, -1.0)]).unwrap())
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn identity_spectrum() {
        let g = HolonomyPoint::new(UnitaryMatrix::identity(2));
        let s = spectrum(&g, &SpectralWindow::new(-0.5, 2.5).unwrap());
        assert!(close(&s, &[0.0, 0.0, 1.0, 1.0, 2.0, 2.0], 1e-12), "{s:?}");
    }

    #[test]
    fn quarter_spectrum() {
        let s = spectrum(&diag_i(), &SpectralWindow::new(0.0, 1.0).unwrap());
        assert!(close(&s, &[0.25, 0.75], 1e-12));
    }

    #[test]
    fn spectrum_is_periodic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let g = HolonomyPoint::new(random_unitary(3, &mut rng));
            let w = SpectralWindow::new(-1.3, 2.1).unwrap();
            let a = spectrum(&g, &w);
            let b: Vec<f64> = spectrum(&g, &w.shifted(1.0))
                .iter()
                .map(|x| x - 1.0)
                .collect();
            assert!(close(&a, &b, 1e-12));
        }
    }

    #[test]
    fn cover_membership() {
        let cover = CoverSpec::new(vec![0.0, 0.3, 0.5, 0.7]).unwrap();
        let id = HolonomyPoint::new(UnitaryMatrix::identity(2));
        assert!(in_cover(&id, 2, &cover).unwrap());
        assert!(!in_cover(&id, 0, &cover).unwrap());
    }

    #[test]
    fn membership_flips_at_the_crossing() {
        // g(t) = diag(e^{2πit}, e^{-2πit}) sweeps an eigenvalue through 0.3 at t = 0.3.
        let cover = CoverSpec::new(vec![0.1, 0.3, 0.55, 0.8]).unwrap();
        let at = |t: f64| {
            HolonomyPoint::new(
                UnitaryMatrix::diagonal(&[
                    C64::from_polar(1.0, TAU * t),
                    C64::from_polar(1.0, -TAU * t),
                ])
                .unwrap(),
            )
        };
        assert!(!in_cover(&at(0.3), 1, &cover).unwrap());
        assert!(in_cover(&at(0.3 + 2e-8), 1, &cover).unwrap());
        assert!(in_cover(&at(0.3 - 2e-8), 1, &cover).unwrap());
        // the conjugate eigenvalue 1 - t crosses the same level at t = 0.7
        assert!(!in_cover(&at(0.7), 1, &cover).unwrap());
        assert!(in_cover(&at(0.5), 1, &cover).unwrap());
    }

    #[test]
    fn cover_validation() {
        assert!(CoverSpec::new(vec![0.1, 0.2, 0.3]).is_err());
        assert!(CoverSpec::new(vec![0.1, 0.3, 0.2, 0.4]).is_err());
        assert!(
            CoverSpec::new(vec![0.1, 0.2, 0.3, 0.4]).is_err(),
            "levels summing to an integer"
        );
        assert!(CoverSpec::equispaced(5, 0.3).is_ok());
    }

    #[test]
    fn empty_window_has_trivial_det_line() {
        let f = window_frame(&diag_i(), &SpectralWindow::new(0.3, 0.7).unwrap()).unwrap();
        assert_eq!(f.rank(), 0);
        assert_eq!(f.det_line_phase, c(1.0, 0.0));
    }

    #[test]
    fn zero_mode_frame() {
        let g = diag_i();
        let f = window_frame(&g, &SpectralWindow::new(0.0 + 0.1, 0.5).unwrap()).unwrap();
        assert_eq!(f.rank(), 1);
        assert_eq!(f.modes, vec![0]);
        let e = eig_unitary(&g.g);
        assert!((f.vectors.column(0) - e.eigenvector(0)).norm() < 1e-12);
        assert!((f.vectors[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn window_endpoint_in_spectrum_is_rejected() {
        assert!(matches!(
            window_frame(&diag_i(), &SpectralWindow::new(0.25, 0.5).unwrap()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn frames_diagonalise_the_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = HolonomyPoint::new(random_unitary(3, &mut rng));
        let f = window_frame(&g, &SpectralWindow::new(-1.37, 1.61).unwrap()).unwrap();
        assert_eq!(f.rank(), 9);
        for (col, (&kappa, &n)) in f.eigenvalues.iter().zip(&f.modes).enumerate() {
            let v = f.vectors.column(col);
            let lambda = C64::from_polar(1.0, TAU * (kappa - n as f64));
            assert!((g.g.matrix() * v - v * lambda).norm() < 1e-10);
        }
        let gram = f.dense(-2, 2).adjoint() * f.dense(-2, 2);
        assert!((gram - CMat::identity(9, 9)).norm() < 1e-10);
    }

    #[test]
    fn frames_are_conjugation_covariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let g = random_unitary(3, &mut rng);
        let v = random_unitary(3, &mut rng);
        let w = SpectralWindow::new(-0.61, 1.27).unwrap();
        let f = window_frame(&HolonomyPoint::new(g.clone()), &w).unwrap();
        let f2 = window_frame(&HolonomyPoint::new(g.conjugate_by(&v)), &w).unwrap();
        assert_eq!(f.modes, f2.modes);
        // Each column maps to the new one up to a phase.
        let moved = v.matrix() * &f.vectors;
        for col in 0..f.rank() {
            let ip = (moved.column(col).adjoint() * f2.vectors.column(col))[(0, 0)];
            assert!((ip.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn det_line_phase_does_not_depend_on_the_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let g = HolonomyPoint::new(random_unitary(4, &mut rng));
        let f = window_frame(&g, &SpectralWindow::new(-0.77, 1.13).unwrap()).unwrap();
        let (lo, hi) = f.mode_range();
        let dense = f.dense(lo, hi);
        let u = random_unitary(f.rank(), &mut rng);
        let rotated = &dense * u.matrix();
        let det_u = u.matrix().determinant();
        let p = super::det_line_phase(&rotated, lo, 4).unwrap();
        // The trivialisation p · ∧(F U) = p det U · ∧F must equal the original.
        assert!((p * det_u - f.det_line_phase).norm() < 1e-10);
    }

    #[test]
    fn cocycle_is_unimodular_and_satisfies_the_quadruple_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cover = CoverSpec::equispaced(6, 0.3).unwrap();
        for _ in 0..30 {
            let g = HolonomyPoint::new(random_su2(&mut rng));
            let f = |a, b, cc| gerbe_cocycle(&g, &cover, a, b, cc).unwrap();
            let (a, b, cc, d) = (0, 2, 3, 5);
            assert!((f(a, b, cc).norm() - 1.0).abs() < 1e-10);
            let prod = f(a, b, cc) / f(a, b, d) * f(a, cc, d) / f(b, cc, d);
            assert!((prod - c(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn cocycle_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = HolonomyPoint::new(random_su2(&mut rng));
        let cover = CoverSpec::equispaced(4, 0.3).unwrap();
        let f = gerbe_cocycle(&g, &cover, 0, 1, 3).unwrap();
        let swapped = gerbe_cocycle(&g, &cover, 1, 0, 3).unwrap();
        assert!((f * swapped - c(1.0, 0.0)).norm() < 1e-12);
        let cyclic = gerbe_cocycle(&g, &cover, 1, 3, 0).unwrap();
        assert!((f - cyclic).norm() < 1e-12);
        assert_eq!(gerbe_cocycle(&g, &cover, 2, 2, 3).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn empty_middle_window_gives_one() {
        // Spectrum {1/4, 3/4}; no eigenvalue between 0.3 and 0.6.
        let f = gerbe_cocycle_levels(&diag_i(), [0.1, 0.3, 0.6]).unwrap();
        let g = gerbe_cocycle_levels(&diag_i(), [0.3, 0.6, 0.9]).unwrap();
        assert!((f - c(1.0, 0.0)).norm() < 1e-12);
        assert!((g - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn window_ranks_are_additive() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..20 {
            let g = HolonomyPoint::new(random_unitary(3, &mut rng));
            let (a, b, cc) = (-0.413, 0.377, 1.291);
            let r = |lo, hi| {
                window_frame(&g, &SpectralWindow::new(lo, hi).unwrap())
                    .unwrap()
                    .rank()
            };
            assert_eq!(r(a, cc), r(a, b) + r(b, cc));
        }
    }
}
