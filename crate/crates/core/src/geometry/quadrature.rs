use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    GaussLegendre,
    /// Equispaced rule on a period; exact for trigonometric polynomials of
    /// degree below the node count.
    TrapezoidPeriodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: QuadratureRule,
    pub nodes_per_axis: usize,
}

impl QuadratureSpec {
    pub fn gauss(nodes_per_axis: usize) -> Self {
        Self {
            rule: QuadratureRule::GaussLegendre,
            nodes_per_axis,
        }
    }

    pub fn periodic(nodes_per_axis: usize) -> Self {
        Self {
            rule: QuadratureRule::TrapezoidPeriodic,
            nodes_per_axis,
        }
    }

    /// Algebraic degree integrated exactly on `[-1, 1]` (Gauss), or the
    /// trigonometric degree integrated exactly over one period (trapezoid).
    pub fn exact_degree(&self) -> usize {
        match self.rule {
            QuadratureRule::GaussLegendre => 2 * self.nodes_per_axis - 1,
            QuadratureRule::TrapezoidPeriodic => self.nodes_per_axis - 1,
        }
    }

    /// The same rule with half the nodes (at least two), used for error
    /// estimates.
    pub fn coarsened(&self) -> Self {
        Self {
            rule: self.rule,
            nodes_per_axis: (self.nodes_per_axis / 2).max(2),
        }
    }

    pub fn refined(&self) -> Self {
        Self {
            rule: self.rule,
            nodes_per_axis: self.nodes_per_axis * 2,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 2 {
            return Err(Error::Contract(format!(
                "quadrature needs at least 2 nodes per axis, got {}",
                self.nodes_per_axis
            )));
        }
        Ok(())
    }

    /// Nodes and weights on `[lo, hi]`.
    pub fn nodes(&self, lo: f64, hi: f64) -> (Vec<f64>, Vec<f64>) {
        match self.rule {
            QuadratureRule::GaussLegendre => {
                let (x, w) = gauss_legendre(self.nodes_per_axis);
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                (
                    x.iter().map(|t| mid + half * t).collect(),
                    w.iter().map(|w| w * half).collect(),
                )
            }
            QuadratureRule::TrapezoidPeriodic => {
                let n = self.nodes_per_axis;
                let h = (hi - lo) / n as f64;
                ((0..n).map(|j| lo + h * j as f64).collect(), vec![h; n])
            }
        }
    }
}

/// Gauss–Legendre nodes (ascending) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Pairwise (cascade) summation; the result depends only on the order of
/// `values`, never on thread scheduling.
pub fn pairwise_sum(values: &[C64]) -> C64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().fold(C64::new(0.0, 0.0), |a, b| a + b);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Tensor-product rule over a box, one rule per axis.
#[derive(Debug, Clone)]
pub struct TensorGrid {
    axes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl TensorGrid {
    pub fn new(bounds: &[(f64, f64)], rules: &[QuadratureSpec]) -> Result<Self> {
        if bounds.len() != rules.len() {
            return Err(Error::Contract(format!(
                "{} axes but {} quadrature rules",
                bounds.len(),
                rules.len()
            )));
        }
        for r in rules {
            r.validate()?;
        }
        Ok(Self {
            axes: bounds
                .iter()
                .zip(rules)
                .map(|(&(lo, hi), r)| r.nodes(lo, hi))
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.0.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node and weight of flat index `k` (last axis fastest).
    pub fn node(&self, mut k: usize) -> (Vec<f64>, f64) {
        let mut u = vec![0.0; self.axes.len()];
        let mut w = 1.0;
        for (axis, (x, wx)) in self.axes.iter().enumerate().rev() {
            let j = k % x.len();
            k /= x.len();
            u[axis] = x[j];
            w *= wx[j];
        }
        (u, w)
    }

    /// `Σ w f(u)` with parallel evaluation and deterministic reduction.
    pub fn integrate<F>(&self, f: F) -> Result<C64>
    where
        F: Fn(&[f64]) -> Result<C64> + Sync,
    {
        let values: Result<Vec<C64>> = (0..self.len())
            .into_par_iter()
            .map(|k| {
                let (u, w) = self.node(k);
                f(&u).map(|v| v * w)
            })
            .collect();
        Ok(pairwise_sum(&values?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rules_are_exact_to_advertised_degree() {
        for n in 2..=30 {
            let spec = QuadratureSpec::gauss(n);
            let (x, w) = spec.nodes(-1.0, 1.0);
            for deg in 0..=spec.exact_degree() {
                let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                assert!(
                    (approx - exact).abs() < 1e-13,
                    "n={n} deg={deg}: {approx} vs {exact}"
                );
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            assert!(x.iter().all(|t| t.abs() < 1.0));
        }
    }

    #[test]
    fn gauss_fails_one_degree_past_exactness() {
        let spec = QuadratureSpec::gauss(5);
        let (x, w) = spec.nodes(-1.0, 1.0);
        let deg = spec.exact_degree() + 1;
        let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
        assert!((approx - 2.0 / (deg as f64 + 1.0)).abs() > 1e-6);
    }

    #[test]
    fn periodic_rule_is_exact_for_trig_polynomials() {
        let spec = QuadratureSpec::periodic(9);
        let (x, w) = spec.nodes(0.0, 2.0 * PI);
        for k in 0..=spec.exact_degree() {
            let approx: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| w * (k as f64 * x).cos())
                .sum();
            let exact = if k == 0 { 2.0 * PI } else { 0.0 };
            assert!((approx - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn tensor_grid_integrates_a_separable_polynomial() {
        let grid = TensorGrid::new(
            &[(0.0, 1.0), (-1.0, 2.0)],
            &[QuadratureSpec::gauss(3), QuadratureSpec::gauss(4)],
        )
        .unwrap();
        let v = grid
            .integrate(|u| Ok(C64::new(u[0] * u[0] * u[1].powi(3), 0.0)))
            .unwrap();
        // (1/3) * (16 - 1)/4
        assert!((v.re - 15.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn integration_is_reproducible() {
        let grid = TensorGrid::new(&[(0.0, 1.0); 3], &[QuadratureSpec::gauss(17); 3]).unwrap();
        let f = |u: &[f64]| Ok(C64::new((u[0] * 3.0 + u[1]).sin() * u[2].exp(), u[0]));
        let a = grid.integrate(f).unwrap();
        let b = grid.integrate(f).unwrap();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    #[test]
    fn single_node_rule_is_a_contract_violation() {
        assert!(TensorGrid::new(&[(0.0, 1.0)], &[QuadratureSpec::gauss(1)]).is_err());
    }
}
