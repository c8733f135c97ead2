use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::cochain::{
    defect, exterior_derivative, log_derivative, CechCochain, CochainValue, CoefficientKind,
    FormValue, EXTERIOR_STEP,
};
use super::cover::{Cover, TupleSample};
use crate::error::{Error, Result};
use crate::geometry::QuadratureSpec;
use crate::lie::{c, C64};

pub type GlobalForm = Arc<dyn Fn(&[f64]) -> Result<FormValue> + Send + Sync>;

/// Deligne data of a gerbe `(f_{αβγ}, A_{αβ}, F_α, Ω)` or of a line bundle
/// `(f_{αβ}, A_α, F)`.
#[derive(Clone)]
pub enum DeligneData {
    Gerbe {
        f: CechCochain,
        a: CechCochain,
        curvature: CechCochain,
        omega: GlobalForm,
    },
    LineBundle {
        f: CechCochain,
        a: CechCochain,
        curvature: GlobalForm,
    },
}

impl fmt::Debug for DeligneData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeligneData::Gerbe { .. } => write!(f, "DeligneData::Gerbe"),
            DeligneData::LineBundle { .. } => write!(f, "DeligneData::LineBundle"),
        }
    }
}

/// Largest defects of the three Deligne relations over the samples.
///
/// For a gerbe: `transition` is `A_{αβ} − A_{αγ} + A_{βγ} − f⁻¹df`,
/// `connection` is `F_α − F_β − dA_{αβ}`, and `curvature` is `dF_α − 2πiΩ`.
/// For a line bundle: `transition` is the cocycle defect of `f`,
/// `connection` is `A_α − A_β − f⁻¹df`, and `curvature` is `dA_α − F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeligneResiduals {
    pub transition: f64,
    pub connection: f64,
    pub curvature: f64,
}

impl DeligneResiduals {
    pub fn max(&self) -> f64 {
        self.transition.max(self.connection).max(self.curvature)
    }
}

fn check_shape(c: &CechCochain, level: usize, kind: CoefficientKind, what: &str) -> Result<()> {
    if c.level() != level || c.kind() != kind {
        return Err(Error::Contract(format!(
            "{what} must be a {kind:?} {level}-cochain"
        )));
    }
    Ok(())
}

fn samples_for<R: Rng + ?Sized>(
    cover: &Cover,
    arity: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<TupleSample>> {
    if cover.len() < arity {
        return Ok(Vec::new());
    }
    cover.sample_overlaps(arity, count, rng)
}

fn form_of(c: &CechCochain, tuple: &[usize], u: &[f64]) -> Result<FormValue> {
    Ok(c.eval(tuple, u)?.as_form()?.clone())
}

fn circle_of(c: &CechCochain, tuple: &[usize], u: &[f64]) -> Result<C64> {
    c.eval(tuple, u)?.as_circle()
}

fn max_over<F>(samples: &[TupleSample], f: F) -> Result<f64>
where
    F: Fn(&[usize], &[f64]) -> Result<f64>,
{
    samples
        .iter()
        .try_fold(0.0, |m: f64, (t, u)| Ok(m.max(f(t, u)?)))
}

/// Residuals of the Deligne relations at `samples` random points of the
/// relevant overlaps, with derivatives by central differences.
pub fn verify_deligne<R: Rng + ?Sized>(
    data: &DeligneData,
    cover: &Cover,
    samples: usize,
    rng: &mut R,
) -> Result<DeligneResiduals> {
    let h = EXTERIOR_STEP;
    match data {
        DeligneData::Gerbe {
            f,
            a,
            curvature,
            omega,
        } => {
            check_shape(f, 2, CoefficientKind::Circle, "f")?;
            check_shape(a, 1, CoefficientKind::Form(1), "A")?;
            check_shape(curvature, 0, CoefficientKind::Form(2), "F")?;
            let triples = samples_for(cover, 3, samples, rng)?;
            let pairs = samples_for(cover, 2, samples, rng)?;
            let singles = samples_for(cover, 1, samples, rng)?;
            let transition = max_over(&triples, |t, u| {
                let (x, y, z) = (t[0], t[1], t[2]);
                let lhs = form_of(a, &[x, y], u)?
                    .add(&form_of(a, &[x, z], u)?.scale(c(-1.0, 0.0)))
                    .add(&form_of(a, &[y, z], u)?);
                let rhs = log_derivative(|v| circle_of(f, t, v), u, h)?;
                Ok(lhs.add(&rhs.scale(c(-1.0, 0.0))).max_abs())
            })?;
            let connection = max_over(&pairs, |t, u| {
                let lhs = form_of(curvature, &[t[0]], u)?
                    .add(&form_of(curvature, &[t[1]], u)?.scale(c(-1.0, 0.0)));
                let da = exterior_derivative(|v| form_of(a, t, v), u, h)?;
                Ok(lhs.add(&da.scale(c(-1.0, 0.0))).max_abs())
            })?;
            let curvature_res = max_over(&singles, |t, u| {
                let df = exterior_derivative(|v| form_of(curvature, t, v), u, h)?;
                Ok(df.add(&omega(u)?.scale(c(0.0, -TAU))).max_abs())
            })?;
            Ok(DeligneResiduals {
                transition,
                connection,
                curvature: curvature_res,
            })
        }
        DeligneData::LineBundle { f, a, curvature } => {
            check_shape(f, 1, CoefficientKind::Circle, "f")?;
            check_shape(a, 0, CoefficientKind::Form(1), "A")?;
            let triples = samples_for(cover, 3, samples, rng)?;
            let pairs = samples_for(cover, 2, samples, rng)?;
            let singles = samples_for(cover, 1, samples, rng)?;
            let df = f.coboundary();
            let transition = max_over(&triples, |t, u| Ok(defect(&df.eval(t, u)?)))?;
            let connection = max_over(&pairs, |t, u| {
                let lhs = form_of(a, &[t[0]], u)?.add(&form_of(a, &[t[1]], u)?.scale(c(-1.0, 0.0)));
                let rhs = log_derivative(|v| circle_of(f, t, v), u, h)?;
                Ok(lhs.add(&rhs.scale(c(-1.0, 0.0))).max_abs())
            })?;
            let curvature_res = max_over(&singles, |t, u| {
                let da = exterior_derivative(|v| form_of(a, t, v), u, h)?;
                Ok(da.add(&curvature(u)?.scale(c(-1.0, 0.0))).max_abs())
            })?;
            Ok(DeligneResiduals {
                transition,
                connection,
                curvature: curvature_res,
            })
        }
    }
}

/// The zero gerbe data on a cover of a `dim`-dimensional box.
pub fn zero_gerbe(dim: usize) -> DeligneData {
    DeligneData::Gerbe {
        f: CechCochain::new(2, CoefficientKind::Circle, |_, _| {
            Ok(CochainValue::Circle(c(1.0, 0.0)))
        }),
        a: CechCochain::new(1, CoefficientKind::Form(1), move |_, _| {
            Ok(CochainValue::Form(FormValue::zero(1, dim)))
        }),
        curvature: CechCochain::new(0, CoefficientKind::Form(2), move |_, _| {
            Ok(CochainValue::Form(FormValue::zero(2, dim)))
        }),
        omega: Arc::new(move |_| Ok(FormValue::zero(3, dim))),
    }
}

/// Four overlapping balls in the unit cube.
pub fn demo_cover() -> Cover {
    Cover::balls(
        vec![(0.0, 1.0); 3],
        &[
            vec![0.3, 0.3, 0.3],
            vec![0.7, 0.3, 0.7],
            vec![0.3, 0.7, 0.7],
            vec![0.7, 0.7, 0.3],
        ],
        0.75,
    )
}

#[derive(Debug, Clone, Copy)]
struct Wave {
    amp: f64,
    freq: [f64; 3],
}

impl Wave {
    fn value(&self, u: &[f64]) -> f64 {
        self.amp * (self.freq[0] * u[0] + self.freq[1] * u[1] + self.freq[2] * u[2]).sin()
    }

    fn gradient(&self, u: &[f64]) -> [f64; 3] {
        let s = self.amp * (self.freq[0] * u[0] + self.freq[1] * u[1] + self.freq[2] * u[2]).cos();
        [s * self.freq[0], s * self.freq[1], s * self.freq[2]]
    }
}

/// Deligne data on [`demo_cover`] built so that all three relations hold:
/// `f = δ(e^{iφ})`, `A_{αβ} = i dφ_{αβ} + η_α − η_β`, `F_α = dη_α + B`,
/// `Ω = dB / 2πi`, for random smooth `φ`, `η` and a fixed `B`.
pub fn demo_gerbe(seed: u64) -> DeligneData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 4;
    let waves: Vec<Wave> = (0..n * n)
        .map(|_| Wave {
            amp: rng.random_range(-2.0..2.0),
            freq: [
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            ],
        })
        .collect();
    let eta: Vec<[f64; 3]> = (0..n)
        .map(|_| {
            [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ]
        })
        .collect();

    let w1 = waves.clone();
    let phi = move |a: usize, b: usize, u: &[f64]| w1[a * n + b].value(u);
    let f = CechCochain::alternating(2, CoefficientKind::Circle, 3, move |t, u| {
        let total = phi(t[1], t[2], u) - phi(t[0], t[2], u) + phi(t[0], t[1], u);
        Ok(CochainValue::Circle(C64::from_polar(1.0, total)))
    });

    // η_α = i (k_0 u_1 u_2, k_1 u_0², k_2 u_0 u_1)
    let eta_form = |k: [f64; 3], u: &[f64]| {
        FormValue::one_form(vec![
            c(0.0, k[0] * u[1] * u[2]),
            c(0.0, k[1] * u[0] * u[0]),
            c(0.0, k[2] * u[0] * u[1]),
        ])
    };
    let eta_d = |k: [f64; 3], u: &[f64]| {
        [
            2.0 * k[1] * u[0] - k[0] * u[2],
            (k[2] - k[0]) * u[1],
            k[2] * u[0],
        ]
    };
    // B = i (u_2², sin u_1, u_0 u_1 u_2) on (du01, du02, du12)
    let b_form = |u: &[f64]| [u[2] * u[2], u[1].sin(), u[0] * u[1] * u[2]];

    let (w2, eta2) = (waves.clone(), eta.clone());
    let a = CechCochain::alternating(1, CoefficientKind::Form(1), 3, move |t, u| {
        let grad = w2[t[0] * n + t[1]].gradient(u);
        let d_phi = FormValue::one_form(grad.iter().map(|g| c(0.0, *g)).collect());
        Ok(CochainValue::Form(
            d_phi
                .add(&eta_form(eta2[t[0]], u))
                .add(&eta_form(eta2[t[1]], u).scale(c(-1.0, 0.0))),
        ))
    });
    let eta3 = eta.clone();
    let curvature = CechCochain::new(0, CoefficientKind::Form(2), move |t, u| {
        let d = eta_d(eta3[t[0]], u);
        let b = b_form(u);
        Ok(CochainValue::Form(FormValue::new(
            2,
            3,
            (0..3).map(|i| c(0.0, d[i] + b[i])).collect(),
        )?))
    });
    let omega: GlobalForm = Arc::new(|u: &[f64]| {
        FormValue::new(
            3,
            3,
            vec![c((u[1] * u[2] - u[1].cos() + 2.0 * u[2]) / TAU, 0.0)],
        )
    });
    DeligneData::Gerbe {
        f,
        a,
        curvature,
        omega,
    }
}

/// Charge-`k` monopole line bundle on `S²` in coordinates `(θ, φ)`, with
/// patches around the north (index 0) and south (index 1) poles.
#[derive(Debug, Clone)]
pub struct MonopoleDemo {
    pub charge: i64,
    pub cover: Cover,
    pub data: DeligneData,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonopoleReport {
    pub residuals: DeligneResiduals,
    /// `(1/2πi) ∮ (A_+ − A_−)` over the equator.
    pub equator_integral: f64,
}

/// Overlap half-width around the equator.
pub const MONOPOLE_OVERLAP: f64 = 0.4;

pub fn monopole_demo(k: i64) -> MonopoleDemo {
    let kf = k as f64;
    let cover = Cover::new(vec![(0.0, PI), (0.0, TAU)])
        .with_patch(|u| u[0] < FRAC_PI_2 + MONOPOLE_OVERLAP)
        .with_patch(|u| u[0] > FRAC_PI_2 - MONOPOLE_OVERLAP);
    // A_± = (ik/2)(±1 − cos θ) dφ
    let a = CechCochain::new(0, CoefficientKind::Form(1), move |t, u| {
        let sign = if t[0] == 0 { 1.0 } else { -1.0 };
        Ok(CochainValue::Form(FormValue::one_form(vec![
            c(0.0, 0.0),
            c(0.0, 0.5 * kf * (sign - u[0].cos())),
        ])))
    });
    let f = CechCochain::alternating(1, CoefficientKind::Circle, 2, move |_, u| {
        Ok(CochainValue::Circle(C64::from_polar(1.0, kf * u[1])))
    });
    let curvature: GlobalForm =
        Arc::new(move |u: &[f64]| FormValue::new(2, 2, vec![c(0.0, 0.5 * kf * u[0].sin())]));
    MonopoleDemo {
        charge: k,
        cover,
        data: DeligneData::LineBundle { f, a, curvature },
    }
}

impl MonopoleDemo {
    /// `(1/2πi) ∮ (A_+ − A_−)` at `θ = π/2`, periodic trapezoid rule.
    pub fn equator_integral(&self, nodes: usize) -> Result<f64> {
        let DeligneData::LineBundle { a, .. } = &self.data else {
            unreachable!("monopole data is a line bundle")
        };
        let (phis, weights) = QuadratureSpec::periodic(nodes).nodes(0.0, TAU);
        let mut total = c(0.0, 0.0);
        for (phi, w) in phis.iter().zip(&weights) {
            let u = [FRAC_PI_2, *phi];
            let diff = form_of(a, &[0], &u)?.add(&form_of(a, &[1], &u)?.scale(c(-1.0, 0.0)));
            total += diff.comps[1] * *w;
        }
        Ok((total / c(0.0, TAU)).re)
    }

    pub fn verify<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> Result<MonopoleReport> {
        let residuals = verify_deligne(&self.data, &self.cover, samples, rng)?;
        Ok(MonopoleReport {
            residuals,
            equator_integral: self.equator_integral(64)?,
        })
    }
}
