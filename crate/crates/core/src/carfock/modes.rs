//! Fourier-mode truncation of `L²(S¹) ⊗ C^N` and the central-extension
//! cocycles of loop algebras.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{integrate_form_value, Chart, FieldRef, FormWord, QuadratureSpec};
use crate::lie::{c, commutator, exp_skew_matrix, random_su, CMat, C64};

/// Modes `k ∈ {−Λ, …, Λ}` tensored with `C^N`; basis index `(k + Λ) N + a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncatedOneParticle {
    pub cutoff: usize,
    pub internal: usize,
}

impl TruncatedOneParticle {
    pub fn new(cutoff: usize, internal: usize) -> Self {
        Self { cutoff, internal }
    }

    pub fn dim(&self) -> usize {
        self.internal * (2 * self.cutoff + 1)
    }

    pub fn index(&self, k: i64, a: usize) -> Option<usize> {
        let l = self.cutoff as i64;
        (k.abs() <= l).then(|| (k + l) as usize * self.internal + a)
    }

    pub fn mode_of(&self, index: usize) -> i64 {
        (index / self.internal) as i64 - self.cutoff as i64
    }

    /// Grading: `+1` on modes `k ≥ 0`, `−1` on `k < 0`.
    pub fn epsilon(&self, index: usize) -> f64 {
        if self.mode_of(index) >= 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn epsilon_matrix(&self) -> CMat {
        CMat::from_fn(self.dim(), self.dim(), |i, j| {
            if i == j {
                c(self.epsilon(i), 0.0)
            } else {
                c(0.0, 0.0)
            }
        })
    }

    /// `¼ tr ε[ε, X][ε, Y]`.
    pub fn cocycle_trace(&self, x: &CMat, y: &CMat) -> Result<C64> {
        let n = self.dim();
        if x.shape() != (n, n) || y.shape() != (n, n) {
            return Err(Error::Contract(format!(
                "operators must be {n}x{n} at cutoff {}",
                self.cutoff
            )));
        }
        let mut total = c(0.0, 0.0);
        for i in 0..n {
            let ei = self.epsilon(i);
            for j in 0..n {
                let ej = self.epsilon(j);
                if ei != ej {
                    // ε_i (ε_i − ε_j)(ε_j − ε_i) = −4 ε_i
                    total += x[(i, j)] * y[(j, i)] * (-4.0 * ei);
                }
            }
        }
        Ok(total * 0.25)
    }

    /// Squared Hilbert–Schmidt norm of the blocks of `X` that exchange the
    /// two eigenspaces of `ε`.
    pub fn off_diagonal_hs2(&self, x: &CMat) -> f64 {
        let n = self.dim();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                if self.epsilon(i) != self.epsilon(j) {
                    total += x[(i, j)].norm_sqr();
                }
            }
        }
        total
    }
}

/// A loop `θ ↦ Σ_m A_m e^{imθ}` in `gl(N)` with finitely many modes.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopElement {
    internal: usize,
    modes: BTreeMap<i64, CMat>,
}

impl LoopElement {
    pub fn zero(internal: usize) -> Self {
        Self {
            internal,
            modes: BTreeMap::new(),
        }
    }

    /// `A e^{imθ}`.
    pub fn mode(m: i64, a: CMat) -> Self {
        let internal = a.nrows();
        let mut modes = BTreeMap::new();
        modes.insert(m, a);
        Self { internal, modes }
    }

    /// The constant identity loop, central for the loop bracket.
    pub fn identity(internal: usize) -> Self {
        Self::mode(0, CMat::identity(internal, internal))
    }

    /// Fourier coefficients `m = −max_mode..=max_mode` of a matrix loop from
    /// `samples` equispaced values.
    pub fn from_fn<F>(internal: usize, max_mode: usize, samples: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> CMat,
    {
        if samples < 2 * max_mode + 1 {
            return Err(Error::Contract(format!(
                "{samples} samples cannot resolve {max_mode} modes"
            )));
        }
        let values: Vec<CMat> = (0..samples)
            .map(|j| f(TAU * j as f64 / samples as f64))
            .collect();
        let mut out = Self::zero(internal);
        for m in -(max_mode as i64)..=max_mode as i64 {
            let mut a = CMat::zeros(internal, internal);
            for (j, v) in values.iter().enumerate() {
                a += v * C64::from_polar(
                    1.0 / samples as f64,
                    -TAU * (m * j as i64) as f64 / samples as f64,
                );
            }
            out.modes.insert(m, a);
        }
        Ok(out)
    }

    pub fn internal(&self) -> usize {
        self.internal
    }

    pub fn modes(&self) -> impl Iterator<Item = (i64, &CMat)> {
        self.modes.iter().map(|(m, a)| (*m, a))
    }

    /// Largest `|m|` with a nonzero coefficient.
    pub fn support(&self) -> usize {
        self.modes
            .iter()
            .filter(|(_, a)| a.iter().any(|z| *z != c(0.0, 0.0)))
            .map(|(m, _)| m.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &LoopElement) -> LoopElement {
        let mut out = self.clone();
        for (m, a) in &other.modes {
            let entry = out
                .modes
                .entry(*m)
                .or_insert_with(|| CMat::zeros(self.internal, self.internal));
            *entry += a;
        }
        out
    }

    pub fn scale(&self, s: C64) -> LoopElement {
        LoopElement {
            internal: self.internal,
            modes: self.modes.iter().map(|(m, a)| (*m, a * s)).collect(),
        }
    }

    /// Pointwise commutator `[X, Y](θ) = Σ [A_m, B_n] e^{i(m+n)θ}`.
    pub fn bracket(&self, other: &LoopElement) -> LoopElement {
        let mut out = LoopElement::zero(self.internal);
        for (m, a) in &self.modes {
            for (n, b) in &other.modes {
                let entry = out
                    .modes
                    .entry(m + n)
                    .or_insert_with(|| CMat::zeros(self.internal, self.internal));
                *entry += commutator(a, b);
            }
        }
        out
    }

    pub fn eval(&self, theta: f64) -> CMat {
        self.modes
            .iter()
            .fold(CMat::zeros(self.internal, self.internal), |acc, (m, a)| {
                acc + a * C64::from_polar(1.0, *m as f64 * theta)
            })
    }

    pub fn derivative(&self, theta: f64) -> CMat {
        self.modes
            .iter()
            .fold(CMat::zeros(self.internal, self.internal), |acc, (m, a)| {
                acc + a * (C64::from_polar(1.0, *m as f64 * theta) * c(0.0, *m as f64))
            })
    }

    /// The multiplication operator on the modes `|k| ≤ Λ`:
    /// entry `((k, a), (k − m, b)) = (A_m)_{ab}`, dropping modes pushed
    /// outside the cutoff.
    pub fn truncate(&self, space: &TruncatedOneParticle) -> CMat {
        let n = space.internal;
        let l = space.cutoff as i64;
        let mut x = CMat::zeros(space.dim(), space.dim());
        for (m, a) in &self.modes {
            for k in -l..=l {
                let src = k - m;
                if src.abs() > l {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        x[(
                            space.index(k, i).expect("in range"),
                            space.index(src, j).expect("in range"),
                        )] = a[(i, j)];
                    }
                }
            }
        }
        x
    }

    fn chart(&self) -> Chart {
        let (v, d) = (self.clone(), self.clone());
        Chart::new(vec![(0.0, TAU)], move |u| v.eval(u[0]))
            .with_analytic_jacobian(move |u| vec![d.derivative(u[0])])
    }
}

/// Closed form of `(1/2πi) ∫ tr X dY` for `X = A e^{imθ}`, `Y = B e^{inθ}`.
pub fn cocycle_loop_closed_form(a: &CMat, b: &CMat, m: i64, n: i64) -> C64 {
    if m + n == 0 {
        (a * b).trace() * n as f64
    } else {
        c(0.0, 0.0)
    }
}

/// `(1/2πi) ∫_{S¹} tr X dY` by the periodic trapezoid rule, which is exact
/// for these trigonometric integrands.
pub fn cocycle_loop_elements(x: &LoopElement, y: &LoopElement) -> Result<C64> {
    let nodes = 2 * (x.support() + y.support()) + 4;
    let (cx, cy) = (x.chart(), y.chart());
    let v = integrate_form_value(
        FormWord::LoopCocycle,
        &[FieldRef::Map(&cx), FieldRef::Map(&cy)],
        QuadratureSpec::periodic(nodes),
    )?;
    Ok(v / c(0.0, TAU))
}

/// The loop cocycle for single modes, by quadrature.
pub fn cocycle_loop(a: &CMat, b: &CMat, m: i64, n: i64) -> Result<C64> {
    cocycle_loop_elements(
        &LoopElement::mode(m, a.clone()),
        &LoopElement::mode(n, b.clone()),
    )
}

/// The trace cocycle of two loops truncated at `Λ`.
pub fn cocycle_trace_loops(x: &LoopElement, y: &LoopElement, cutoff: usize) -> Result<C64> {
    let space = TruncatedOneParticle::new(cutoff, x.internal());
    space.cocycle_trace(&x.truncate(&space), &y.truncate(&space))
}

/// `|c([X,Y],Z) + c([Y,Z],X) + c([Z,X],Y)|` with the trace cocycle at
/// cutoff `Λ` and the loop bracket.
pub fn jacobi_check(
    x: &LoopElement,
    y: &LoopElement,
    z: &LoopElement,
    cutoff: usize,
) -> Result<f64> {
    let total = cocycle_trace_loops(&x.bracket(y), z, cutoff)?
        + cocycle_trace_loops(&y.bracket(z), x, cutoff)?
        + cocycle_trace_loops(&z.bracket(x), y, cutoff)?;
    Ok(total.norm())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HsReport {
    /// Squared off-diagonal Hilbert–Schmidt norm at cutoffs `1..=Λ`.
    pub norms: Vec<f64>,
    /// `|‖·‖²(Λ) − ‖·‖²(Λ − 1)|`.
    pub tail_increment: f64,
    /// Least-squares slope of `‖·‖²` against `log Λ` over the upper
    /// three octaves of cutoffs.
    pub log_slope: f64,
    pub divergent: bool,
}

/// Slope above which the norms are flagged as growing logarithmically.
pub const DIVERGENCE_SLOPE: f64 = 0.5;

/// Off-diagonal Hilbert–Schmidt norms of the multiplication operator of
/// `g` as the cutoff grows.
pub fn hs_criterion(g: &LoopElement, max_cutoff: usize) -> Result<HsReport> {
    if max_cutoff < 2 {
        return Err(Error::Contract(
            "hs_criterion needs a cutoff of at least 2".into(),
        ));
    }
    let norms: Vec<f64> = (1..=max_cutoff)
        .map(|l| {
            let space = TruncatedOneParticle::new(l, g.internal());
            space.off_diagonal_hs2(&g.truncate(&space))
        })
        .collect();
    let tail_increment = (norms[max_cutoff - 1] - norms[max_cutoff - 2]).abs();
    let start = (max_cutoff / 8).max(1);
    let pts: Vec<(f64, f64)> = (start..=max_cutoff)
        .map(|l| ((l as f64).ln(), norms[l - 1]))
        .collect();
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (mx / pts.len() as f64, my / pts.len() as f64);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let log_slope = sxy / sxx;
    Ok(HsReport {
        norms,
        tail_increment,
        log_slope,
        divergent: log_slope > DIVERGENCE_SLOPE,
    })
}

/// Loop with Fourier coefficients `1/m` for `m = 1..=modes` (scalar).
pub fn rough_loop(modes: usize) -> LoopElement {
    (1..=modes).fold(LoopElement::zero(1), |acc, m| {
        acc.add(&LoopElement::mode(
            m as i64,
            CMat::from_element(1, 1, c(1.0 / m as f64, 0.0)),
        ))
    })
}

/// `Σ_{|m| ≤ support} A_m e^{imθ}` with random `su(N)` coefficients.
pub fn random_loop<R: Rng + ?Sized>(internal: usize, support: i64, rng: &mut R) -> LoopElement {
    (-support..=support).fold(LoopElement::zero(internal), |acc, m| {
        acc.add(&LoopElement::mode(
            m,
            random_su(internal, rng).into_matrix(),
        ))
    })
}

/// `exp(A cos θ + B sin 2θ)` for random `su(N)` matrices `A`, `B`, resolved
/// on the modes `|m| ≤ max_mode`.
pub fn smooth_test_loop<R: Rng + ?Sized>(
    internal: usize,
    max_mode: usize,
    rng: &mut R,
) -> Result<LoopElement> {
    let (a, b) = (
        random_su(internal, rng).into_matrix(),
        random_su(internal, rng).into_matrix(),
    );
    LoopElement::from_fn(internal, max_mode, 4 * max_mode.max(8), move |t| {
        exp_skew_matrix(&(&a * c(t.cos(), 0.0) + &b * c((2.0 * t).sin(), 0.0)))
    })
}
