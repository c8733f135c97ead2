use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use super::cover::TupleSample;
use crate::error::{Error, Result};
use crate::lie::{c, C64};

/// Components of a `k`-form on `R^d` in the basis `du_I`, `I` increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    pub degree: usize,
    pub dim: usize,
    pub comps: Vec<C64>,
}

/// Increasing multi-indices of length `k` from `0..d`, in lexicographic order.
pub fn multi_indices(d: usize, k: usize) -> Vec<Vec<usize>> {
    (0..d).combinations(k).collect()
}

impl FormValue {
    pub fn zero(degree: usize, dim: usize) -> Self {
        Self {
            degree,
            dim,
            comps: vec![c(0.0, 0.0); multi_indices(dim, degree).len()],
        }
    }

    pub fn new(degree: usize, dim: usize, comps: Vec<C64>) -> Result<Self> {
        let expected = multi_indices(dim, degree).len();
        if comps.len() != expected {
            return Err(Error::Contract(format!(
                "a {degree}-form on R^{dim} has {expected} components, got {}",
                comps.len()
            )));
        }
        Ok(Self { degree, dim, comps })
    }

    /// A 1-form from its components.
    pub fn one_form(comps: Vec<C64>) -> Self {
        Self {
            degree: 1,
            dim: comps.len(),
            comps,
        }
    }

    /// Component on `du_I` for an arbitrary (not necessarily sorted)
    /// multi-index.
    pub fn component(&self, index: &[usize]) -> C64 {
        let mut sorted = index.to_vec();
        let mut sign = 1.0;
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return c(0.0, 0.0);
        }
        let pos = multi_indices(self.dim, self.degree)
            .iter()
            .position(|m| *m == sorted)
            .expect("valid multi-index");
        self.comps[pos] * sign
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            degree: self.degree,
            dim: self.dim,
            comps: self.comps.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &FormValue) -> Self {
        assert_eq!(
            (self.degree, self.dim),
            (other.degree, other.dim),
            "form shapes differ"
        );
        Self {
            degree: self.degree,
            dim: self.dim,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Default step of the numerical exterior derivative.
pub const EXTERIOR_STEP: f64 = 1e-5;

/// `dω` at `u` by central differences of the components.
pub fn exterior_derivative<F>(omega: F, u: &[f64], h: f64) -> Result<FormValue>
where
    F: Fn(&[f64]) -> Result<FormValue>,
{
    let at = omega(u)?;
    let (k, d) = (at.degree, at.dim);
    let partials: Vec<FormValue> = (0..d)
        .map(|i| {
            let mut up = u.to_vec();
            let mut down = u.to_vec();
            up[i] += h;
            down[i] -= h;
            Ok(omega(&up)?
                .add(&omega(&down)?.scale(c(-1.0, 0.0)))
                .scale(c(0.5 / h, 0.0)))
        })
        .collect::<Result<_>>()?;
    let comps = multi_indices(d, k + 1)
        .iter()
        .map(|idx| {
            (0..=k)
                .map(|j| {
                    let rest: Vec<usize> = idx
                        .iter()
                        .enumerate()
                        .filter(|(p, _)| *p != j)
                        .map(|(_, &i)| i)
                        .collect();
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    partials[idx[j]].component(&rest) * sign
                })
                .sum()
        })
        .collect();
    FormValue::new(k + 1, d, comps)
}

/// `f⁻¹ df` of a circle-valued function, by central differences.
pub fn log_derivative<F>(f: F, u: &[f64], h: f64) -> Result<FormValue>
where
    F: Fn(&[f64]) -> Result<C64>,
{
    let at = f(u)?;
    let comps = (0..u.len())
        .map(|i| {
            let mut up = u.to_vec();
            let mut down = u.to_vec();
            up[i] += h;
            down[i] -= h;
            Ok((f(&up)? - f(&down)?) / (at * 2.0 * h))
        })
        .collect::<Result<_>>()?;
    Ok(FormValue::one_form(comps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientKind {
    Circle,
    Integer,
    Form(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CochainValue {
    Circle(C64),
    Integer(i64),
    Form(FormValue),
}

impl CochainValue {
    pub fn as_circle(&self) -> Result<C64> {
        match self {
            CochainValue::Circle(z) => Ok(*z),
            _ => Err(Error::Contract("expected a circle-valued cochain".into())),
        }
    }

    pub fn as_form(&self) -> Result<&FormValue> {
        match self {
            CochainValue::Form(f) => Ok(f),
            _ => Err(Error::Contract("expected a form-valued cochain".into())),
        }
    }

    pub fn as_integer(&self) -> Result<i64> {
        match self {
            CochainValue::Integer(n) => Ok(*n),
            _ => Err(Error::Contract("expected an integer cochain".into())),
        }
    }
}

pub type CochainFn = Arc<dyn Fn(&[usize], &[f64]) -> Result<CochainValue> + Send + Sync>;

/// A `p`-cochain: a value for every `(p+1)`-tuple of patch indices at each
/// point of their overlap.
#[derive(Clone)]
pub struct CechCochain {
    level: usize,
    kind: CoefficientKind,
    eval: CochainFn,
}

impl fmt::Debug for CechCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CechCochain")
            .field("level", &self.level)
            .field("kind", &self.kind)
            .finish()
    }
}

fn identity_value(kind: CoefficientKind, dim: usize) -> CochainValue {
    match kind {
        CoefficientKind::Circle => CochainValue::Circle(c(1.0, 0.0)),
        CoefficientKind::Integer => CochainValue::Integer(0),
        CoefficientKind::Form(k) => CochainValue::Form(FormValue::zero(k, dim)),
    }
}

fn invert(v: CochainValue) -> CochainValue {
    match v {
        CochainValue::Circle(z) => CochainValue::Circle(c(1.0, 0.0) / z),
        CochainValue::Integer(n) => CochainValue::Integer(-n),
        CochainValue::Form(f) => CochainValue::Form(f.scale(c(-1.0, 0.0))),
    }
}

fn combine(a: CochainValue, b: CochainValue) -> Result<CochainValue> {
    Ok(match (a, b) {
        (CochainValue::Circle(x), CochainValue::Circle(y)) => CochainValue::Circle(x * y),
        (CochainValue::Integer(x), CochainValue::Integer(y)) => CochainValue::Integer(x + y),
        (CochainValue::Form(x), CochainValue::Form(y)) => CochainValue::Form(x.add(&y)),
        _ => return Err(Error::Contract("mismatched cochain kinds".into())),
    })
}

impl CechCochain {
    /// A cochain from an evaluator that is called on every tuple as given.
    pub fn new<F>(level: usize, kind: CoefficientKind, eval: F) -> Self
    where
        F: Fn(&[usize], &[f64]) -> Result<CochainValue> + Send + Sync + 'static,
    {
        Self {
            level,
            kind,
            eval: Arc::new(eval),
        }
    }

    /// A cochain defined on increasing tuples and extended by total
    /// antisymmetry (inverse for circle values, sign otherwise). Tuples with
    /// a repeated index get the identity value.
    pub fn alternating<F>(level: usize, kind: CoefficientKind, dim: usize, on_increasing: F) -> Self
    where
        F: Fn(&[usize], &[f64]) -> Result<CochainValue> + Send + Sync + 'static,
    {
        Self::new(level, kind, move |tuple, u| {
            let mut sorted = tuple.to_vec();
            let mut odd = false;
            for i in 0..sorted.len() {
                for j in 0..sorted.len().saturating_sub(1 + i) {
                    if sorted[j] > sorted[j + 1] {
                        sorted.swap(j, j + 1);
                        odd = !odd;
                    }
                }
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Ok(identity_value(kind, dim));
            }
            let v = on_increasing(&sorted, u)?;
            Ok(if odd { invert(v) } else { v })
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn kind(&self) -> CoefficientKind {
        self.kind
    }

    pub fn eval(&self, tuple: &[usize], u: &[f64]) -> Result<CochainValue> {
        if tuple.len() != self.level + 1 {
            return Err(Error::Contract(format!(
                "a {}-cochain takes {} indices, got {}",
                self.level,
                self.level + 1,
                tuple.len()
            )));
        }
        (self.eval)(tuple, u)
    }

    /// Čech coboundary `(δc)_{i_0…i_{p+1}} = Σ_j (−1)^j c_{i_0…î_j…i_{p+1}}`,
    /// written multiplicatively for circle values.
    pub fn coboundary(&self) -> CechCochain {
        let inner = self.clone();
        CechCochain::new(self.level + 1, self.kind, move |tuple, u| {
            let mut acc: Option<CochainValue> = None;
            for j in 0..tuple.len() {
                let face: Vec<usize> = tuple
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != j)
                    .map(|(_, &i)| i)
                    .collect();
                let v = inner.eval(&face, u)?;
                let v = if j % 2 == 1 { invert(v) } else { v };
                acc = Some(match acc {
                    None => v,
                    Some(a) => combine(a, v)?,
                });
            }
            Ok(acc.expect("at least one face"))
        })
    }

    /// Pointwise product (sum for additive kinds) of two cochains.
    pub fn times(&self, other: &CechCochain) -> Result<CechCochain> {
        if self.level != other.level || self.kind != other.kind {
            return Err(Error::Contract("cochains of different shape".into()));
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(CechCochain::new(self.level, self.kind, move |t, u| {
            combine(a.eval(t, u)?, b.eval(t, u)?)
        }))
    }
}

/// Distance of a cochain value from the identity.
pub fn defect(v: &CochainValue) -> f64 {
    match v {
        CochainValue::Circle(z) => (z - c(1.0, 0.0)).norm(),
        CochainValue::Integer(n) => n.unsigned_abs() as f64,
        CochainValue::Form(f) => f.max_abs(),
    }
}

/// Largest `|δf − 1|` over the sampled quadruples.
pub fn check_cocycle(f: &CechCochain, samples: &[TupleSample]) -> Result<f64> {
    if f.level() != 2 || f.kind() != CoefficientKind::Circle {
        return Err(Error::Contract(
            "check_cocycle expects a circle-valued 2-cochain".into(),
        ));
    }
    let df = f.coboundary();
    samples.iter().try_fold(0.0, |m: f64, (tuple, u)| {
        Ok(m.max(defect(&df.eval(tuple, u)?)))
    })
}

/// Values of `f` within this distance of `-1` are refused.
pub const BRANCH_CUT_TOL: f64 = 1e-8;
pub const COCYCLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BocksteinValue {
    pub integer: i64,
    /// The alternating sum of principal logarithms divided by `2πi`.
    pub raw: f64,
}

impl BocksteinValue {
    pub fn distance_to_integer(&self) -> f64 {
        (self.raw - self.integer as f64).abs()
    }
}

/// The integer `a_{αβγδ}` from principal logarithms (cut along the negative
/// real axis).
pub fn bockstein(f: &CechCochain, tuple: [usize; 4], u: &[f64]) -> Result<BocksteinValue> {
    if f.level() != 2 || f.kind() != CoefficientKind::Circle {
        return Err(Error::Contract(
            "bockstein expects a circle-valued 2-cochain".into(),
        ));
    }
    let [a, b, g, d] = tuple;
    let faces = [[a, b, g], [a, b, d], [a, g, d], [b, g, d]];
    let values = faces
        .iter()
        .map(|t| f.eval(t, u)?.as_circle())
        .collect::<Result<Vec<_>>>()?;
    let residual = (values[0] / values[1] * values[2] / values[3] - c(1.0, 0.0)).norm();
    if residual > COCYCLE_TOL {
        return Err(Error::Precondition(format!(
            "cocycle identity fails by {residual:e} at the sample point"
        )));
    }
    if let Some(v) = values
        .iter()
        .find(|v| (*v + c(1.0, 0.0)).norm() <= BRANCH_CUT_TOL)
    {
        return Err(Error::BranchCut {
            value: format!("{v}"),
            tolerance: BRANCH_CUT_TOL,
        });
    }
    let logs: Vec<C64> = values.iter().map(|v| v.ln()).collect();
    let sum = logs[0] - logs[1] + logs[2] - logs[3];
    let raw = sum.im / TAU;
    Ok(BocksteinValue {
        integer: raw.round() as i64,
        raw,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::cechdeligne::Cover;

    fn unit_cover() -> Cover {
        Cover::balls(
            vec![(0.0, 1.0); 2],
            &[
                vec![0.3, 0.3],
                vec![0.7, 0.3],
                vec![0.3, 0.7],
                vec![0.7, 0.7],
            ],
            0.6,
        )
    }

    fn random_circle_1cochain(seed: u64) -> CechCochain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<[f64; 3]> = (0..16)
            .map(|_| {
                [
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-3.0..3.0),
                    rng.random_range(-3.0..3.0),
                ]
            })
            .collect();
        CechCochain::alternating(1, CoefficientKind::Circle, 2, move |t, u| {
            let k = coeffs[t[0] * 4 + t[1]];
            Ok(CochainValue::Circle(C64::from_polar(
                1.0,
                k[0] + k[1] * u[0] + k[2] * u[1] * u[0],
            )))
        })
    }

    #[test]
    fn constant_cocycle_has_no_residual() {
        let f = CechCochain::new(2, CoefficientKind::Circle, |_, _| {
            Ok(CochainValue::Circle(c(1.0, 0.0)))
        });
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let samples = unit_cover().sample_overlaps(4, 50, &mut rng).unwrap();
        assert_eq!(check_cocycle(&f, &samples).unwrap(), 0.0);
    }

    #[test]
    fn coboundaries_are_cocycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let samples = unit_cover().sample_overlaps(4, 200, &mut rng).unwrap();
        for seed in 0..5 {
            let f = random_circle_1cochain(seed).coboundary();
            assert!(check_cocycle(&f, &samples).unwrap() < 1e-12);
        }
    }

    #[test]
    fn delta_squared_vanishes_for_integer_and_form_cochains() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let samples = unit_cover().sample_overlaps(3, 100, &mut rng).unwrap();
        let ints = CechCochain::new(0, CoefficientKind::Integer, |t, _| {
            Ok(CochainValue::Integer(7 * t[0] as i64 - 3))
        });
        let forms = CechCochain::new(0, CoefficientKind::Form(1), |t, u| {
            Ok(CochainValue::Form(FormValue::one_form(vec![
                c(u[0] * t[0] as f64, 1.0),
                c(u[1].sin(), t[0] as f64),
            ])))
        });
        for (tuple, u) in &samples {
            assert_eq!(
                defect(&ints.coboundary().coboundary().eval(tuple, u).unwrap()),
                0.0
            );
            assert!(defect(&forms.coboundary().coboundary().eval(tuple, u).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn bockstein_of_trivial_and_telescoping_values() {
        let one = CechCochain::new(2, CoefficientKind::Circle, |_, _| {
            Ok(CochainValue::Circle(c(1.0, 0.0)))
        });
        assert_eq!(
            bockstein(&one, [0, 1, 2, 3], &[0.5, 0.5]).unwrap().integer,
            0
        );
        let i = CechCochain::new(2, CoefficientKind::Circle, |_, _| {
            Ok(CochainValue::Circle(c(0.0, 1.0)))
        });
        let b = bockstein(&i, [0, 1, 2, 3], &[0.5, 0.5]).unwrap();
        assert_eq!(b.integer, 0);
        assert!(b.distance_to_integer() < 1e-15);
    }

    #[test]
    fn bockstein_detects_a_wrapped_cocycle() {
        // Values chosen so that the logarithms do not telescope.
        let vals = [
            C64::from_polar(1.0, 3.0),
            C64::from_polar(1.0, -3.0),
            C64::from_polar(1.0, 3.0),
            C64::from_polar(1.0, 9.0),
        ];
        let f = CechCochain::new(2, CoefficientKind::Circle, move |t, _| {
            let k = match t {
                [0, 1, 2] => 0,
                [0, 1, 3] => 1,
                [0, 2, 3] => 2,
                _ => 3,
            };
            Ok(CochainValue::Circle(vals[k]))
        });
        let b = bockstein(&f, [0, 1, 2, 3], &[0.0]).unwrap();
        assert_eq!(b.integer, 1);
        assert!(b.distance_to_integer() < 1e-12);
    }

    #[test]
    fn bockstein_refuses_the_branch_cut_and_non_cocycles() {
        let minus = CechCochain::new(2, CoefficientKind::Circle, |_, _| {
            Ok(CochainValue::Circle(c(-1.0, 0.0)))
        });
        assert!(matches!(
            bockstein(&minus, [0, 1, 2, 3], &[0.0]),
            Err(Error::BranchCut { .. })
        ));
        let bad = CechCochain::new(2, CoefficientKind::Circle, |t, _| {
            Ok(CochainValue::Circle(C64::from_polar(1.0, t[2] as f64)))
        });
        assert!(matches!(
            bockstein(&bad, [0, 1, 2, 3], &[0.0]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn exterior_derivative_squares_to_zero() {
        let omega = |u: &[f64]| {
            Ok(FormValue::one_form(vec![
                c(u[0] * u[1] * u[2], 0.0),
                c(u[2].sin(), u[0]),
                c(u[0].exp() * u[1], 0.0),
            ]))
        };
        let dd = exterior_derivative(
            |v| exterior_derivative(omega, v, 1e-3),
            &[0.2, 0.4, 0.6],
            1e-3,
        )
        .unwrap();
        assert_eq!(dd.degree, 3);
        assert!(dd.max_abs() < 1e-6);
    }

    #[test]
    fn alternating_extension() {
        let f = random_circle_1cochain(7);
        let u = [0.4, 0.6];
        let a = f.eval(&[1, 3], &u).unwrap().as_circle().unwrap();
        let b = f.eval(&[3, 1], &u).unwrap().as_circle().unwrap();
        assert!((a * b - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(
            f.eval(&[2, 2], &u).unwrap().as_circle().unwrap(),
            c(1.0, 0.0)
        );
    }
}
