use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lie::{c, CMat};

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-5;

pub type PointFn = Arc<dyn Fn(&[f64]) -> CMat + Send + Sync>;
pub type PartialsFn = Arc<dyn Fn(&[f64]) -> Vec<CMat> + Send + Sync>;

#[derive(Clone)]
pub enum JacobianMode {
    Analytic(PartialsFn),
    CentralDifference { step: f64 },
}

impl fmt::Debug for JacobianMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JacobianMode::Analytic(_) => write!(f, "Analytic"),
            JacobianMode::CentralDifference { step } => write!(f, "CentralDifference({step:e})"),
        }
    }
}

/// A parametrisation of a patch: a box in `R^d` mapped to matrices
/// (column vectors are `n x 1` matrices).
#[derive(Clone)]
pub struct Chart {
    bounds: Vec<(f64, f64)>,
    eval: PointFn,
    jacobian: JacobianMode,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("bounds", &self.bounds)
            .field("jacobian", &self.jacobian)
            .finish()
    }
}

impl Chart {
    pub fn new<F>(bounds: Vec<(f64, f64)>, eval: F) -> Self
    where
        F: Fn(&[f64]) -> CMat + Send + Sync + 'static,
    {
        Self {
            bounds,
            eval: Arc::new(eval),
            jacobian: JacobianMode::CentralDifference { step: DEFAULT_STEP },
        }
    }

    pub fn with_analytic_jacobian<F>(mut self, partials: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<CMat> + Send + Sync + 'static,
    {
        self.jacobian = JacobianMode::Analytic(Arc::new(partials));
        self
    }

    /// Switch to central differences with step `h`.
    pub fn with_step(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::Contract(format!(
                "difference step must be positive, got {h}"
            )));
        }
        if self.bounds.iter().any(|(lo, hi)| hi - lo < 2.0 * h) {
            return Err(Error::Contract(format!(
                "box is too thin for difference step {h}"
            )));
        }
        self.jacobian = JacobianMode::CentralDifference { step: h };
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn jacobian_mode(&self) -> &JacobianMode {
        &self.jacobian
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.len() == self.dim()
            && u.iter()
                .zip(&self.bounds)
                .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }

    pub fn eval(&self, u: &[f64]) -> Result<CMat> {
        let m = (self.eval)(u);
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::ChartEvaluation {
                point: u.to_vec(),
                reason: "non-finite entries".into(),
            });
        }
        Ok(m)
    }

    /// `∂ eval / ∂u_i` for every axis.
    pub fn partials(&self, u: &[f64]) -> Result<Vec<CMat>> {
        if !self.contains(u) {
            return Err(Error::Contract(format!(
                "point {u:?} is outside the chart box {:?}",
                self.bounds
            )));
        }
        match &self.jacobian {
            JacobianMode::Analytic(f) => {
                let p = f(u);
                if p.len() != self.dim() {
                    return Err(Error::ChartEvaluation {
                        point: u.to_vec(),
                        reason: "wrong number of partials".into(),
                    });
                }
                Ok(p)
            }
            JacobianMode::CentralDifference { step } => (0..self.dim())
                .map(|i| self.difference(u, i, *step))
                .collect(),
        }
    }

    fn difference(&self, u: &[f64], axis: usize, h: f64) -> Result<CMat> {
        let (lo, hi) = self.bounds[axis];
        let at = |offset: f64| {
            let mut v = u.to_vec();
            v[axis] += offset;
            self.eval(&v)
        };
        if u[axis] - h >= lo && u[axis] + h <= hi {
            Ok((at(h)? - at(-h)?) * c(0.5 / h, 0.0))
        } else if u[axis] - h < lo {
            // second-order one-sided formulas at the faces
            Ok((at(0.0)? * c(-3.0, 0.0) + at(h)? * c(4.0, 0.0) - at(2.0 * h)?) * c(0.5 / h, 0.0))
        } else {
            Ok((at(0.0)? * c(3.0, 0.0) - at(-h)? * c(4.0, 0.0) + at(-2.0 * h)?) * c(0.5 / h, 0.0))
        }
    }

    /// Pointwise product `u ↦ self(u) other(u)` with partials by the
    /// product rule.
    pub fn pointwise_product(&self, other: &Chart) -> Result<Chart> {
        if self.bounds != other.bounds {
            return Err(Error::Contract(
                "pointwise product needs charts on the same box".into(),
            ));
        }
        let (a, b) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        Ok(
            Chart::new(self.bounds.clone(), move |u| (a.eval)(u) * (b.eval)(u))
                .with_analytic_jacobian(move |u| {
                    let ga = (a2.eval)(u);
                    let gb = (b2.eval)(u);
                    let (pa, pb) = match (a2.partials(u), b2.partials(u)) {
                        (Ok(pa), Ok(pb)) => (pa, pb),
                        _ => {
                            return vec![
                                CMat::from_element(ga.nrows(), gb.ncols(), c(f64::NAN, 0.0));
                                a2.dim()
                            ]
                        }
                    };
                    pa.iter()
                        .zip(&pb)
                        .map(|(da, db)| da * &gb + &ga * db)
                        .collect()
                }),
        )
    }

    /// Pointwise adjoint `u ↦ self(u)*` (the inverse for unitary charts).
    pub fn pointwise_adjoint(&self) -> Chart {
        let (a, a2) = (self.clone(), self.clone());
        Chart::new(self.bounds.clone(), move |u| (a.eval)(u).adjoint()).with_analytic_jacobian(
            move |u| match a2.partials(u) {
                Ok(p) => p.iter().map(|d| d.adjoint()).collect(),
                Err(_) => vec![CMat::from_element(1, 1, c(f64::NAN, 0.0)); a2.dim()],
            },
        )
    }

    /// `v ↦ self(phi(v))` on a new box. Partials by central differences.
    pub fn reparametrize<F>(&self, bounds: Vec<(f64, f64)>, phi: F) -> Chart
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        let a = self.clone();
        Chart::new(bounds, move |v| (a.eval)(&phi(v)))
    }
}

/// A matrix-valued 1-form given by its components along the chart axes.
#[derive(Clone)]
pub struct OneFormField {
    bounds: Vec<(f64, f64)>,
    components: PartialsFn,
}

impl fmt::Debug for OneFormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OneFormField")
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl OneFormField {
    pub fn new<F>(bounds: Vec<(f64, f64)>, components: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<CMat> + Send + Sync + 'static,
    {
        Self {
            bounds,
            components: Arc::new(components),
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn components(&self, u: &[f64]) -> Result<Vec<CMat>> {
        let comps = (self.components)(u);
        if comps.len() != self.dim() {
            return Err(Error::ChartEvaluation {
                point: u.to_vec(),
                reason: "wrong number of 1-form components".into(),
            });
        }
        if comps
            .iter()
            .flat_map(|m| m.iter())
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::ChartEvaluation {
                point: u.to_vec(),
                reason: "non-finite 1-form component".into(),
            });
        }
        Ok(comps)
    }

    /// The same form scaled by a constant.
    pub fn scaled(&self, s: f64) -> OneFormField {
        let f = self.components.clone();
        OneFormField::new(self.bounds.clone(), move |u| {
            f(u).into_iter().map(|m| m * c(s, 0.0)).collect()
        })
    }

    /// Pointwise sum of two forms on the same box.
    pub fn sum(&self, other: &OneFormField) -> OneFormField {
        let (f, g) = (self.components.clone(), other.components.clone());
        OneFormField::new(self.bounds.clone(), move |u| {
            f(u).into_iter().zip(g(u)).map(|(a, b)| a + b).collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::charts::su2_hyperspherical;
    use crate::lie::{exp_skew_matrix, pauli};

    fn max_abs(m: &CMat) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn constant_chart_has_zero_partials() {
        let g = pauli()[0].clone();
        let chart = Chart::new(vec![(-1.0, 1.0); 2], move |_| g.clone());
        for u in [[0.0, 0.0], [-1.0, 1.0], [0.3, -0.99999]] {
            for p in chart.partials(&u).unwrap() {
                assert!(max_abs(&p) < 1e-12);
            }
        }
    }

    #[test]
    fn exponential_chart_derivative_at_zero_is_the_generator() {
        let x = pauli()[1].clone() * c(0.0, 1.0);
        let y = pauli()[2].clone() * c(0.0, 1.0);
        let (x2, y2) = (x.clone(), y.clone());
        let chart = Chart::new(vec![(-1.0, 1.0); 2], move |u| {
            exp_skew_matrix(&(&x2 * c(u[0], 0.0) + &y2 * c(u[1], 0.0)))
        });
        let p = chart.partials(&[0.0, 0.0]).unwrap();
        assert!(max_abs(&(&p[0] - &x)) < 1e-9);
        assert!(max_abs(&(&p[1] - &y)) < 1e-9);
    }

    #[test]
    fn central_differences_are_second_order() {
        let analytic = su2_hyperspherical();
        let u = [0.7, 1.1, 2.3];
        let exact = analytic.partials(&u).unwrap();
        let err = |h: f64| {
            let numeric = analytic.clone().with_step(h).unwrap().partials(&u).unwrap();
            numeric
                .iter()
                .zip(&exact)
                .map(|(a, b)| max_abs(&(a - b)))
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
        // Richardson: the extrapolated difference is far closer than either.
        let d1 = analytic
            .clone()
            .with_step(1e-2)
            .unwrap()
            .partials(&u)
            .unwrap();
        let d2 = analytic
            .clone()
            .with_step(5e-3)
            .unwrap()
            .partials(&u)
            .unwrap();
        let rich: Vec<CMat> = d1
            .iter()
            .zip(&d2)
            .map(|(a, b)| (b * c(4.0, 0.0) - a) * c(1.0 / 3.0, 0.0))
            .collect();
        let e_rich = rich
            .iter()
            .zip(&exact)
            .map(|(a, b)| max_abs(&(a - b)))
            .fold(0.0, f64::max);
        assert!(e_rich < e2 / 100.0);
    }

    #[test]
    fn one_sided_differences_at_the_faces() {
        let analytic = su2_hyperspherical();
        let numeric = su2_hyperspherical().with_step(1e-5).unwrap();
        for u in [[0.0, 0.5, 0.5], [std::f64::consts::PI, 3.0, 6.0]] {
            let a = analytic.partials(&u).unwrap();
            let n = numeric.partials(&u).unwrap();
            for (x, y) in a.iter().zip(&n) {
                assert!(max_abs(&(x - y)) < 1e-8);
            }
        }
    }

    #[test]
    fn evaluation_failures_are_reported() {
        let chart = Chart::new(vec![(0.0, 1.0)], |u| {
            CMat::from_element(1, 1, c(1.0 / (u[0] - 0.5), 0.0))
        });
        assert!(matches!(
            chart.eval(&[0.5]),
            Err(Error::ChartEvaluation { .. })
        ));
        assert!(chart.partials(&[0.5 + 5e-6]).is_ok());
        assert!(matches!(
            chart.partials(&[0.5 - 1e-5]),
            Err(Error::ChartEvaluation { .. })
        ));
        assert!(matches!(chart.partials(&[2.0]), Err(Error::Contract(_))));
    }

    #[test]
    fn nonpositive_step_is_rejected() {
        assert!(su2_hyperspherical().with_step(0.0).is_err());
        assert!(su2_hyperspherical().with_step(-1.0).is_err());
    }
}
