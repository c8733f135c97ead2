use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::charts::{s3_vector_chart, S3_BOX};
use crate::geometry::{
    integrate_form_value, Chart, FieldRef, FormWord, OneFormField, QuadratureSpec,
};
use crate::lie::{c, random_su, CMat, C64};

/// Skew-Hermiticity tolerance for gauge data.
pub const SKEW_TOL: f64 = 1e-12;

/// A Lie-algebra-valued 1-form `A` on `S³` and three infinitesimal gauge
/// transformations, all in hyperspherical coordinates.
#[derive(Debug, Clone)]
pub struct GaugeData3 {
    pub a: OneFormField,
    pub x: Chart,
    pub y: Chart,
    pub z: Chart,
}

fn skew_defect(m: &CMat) -> f64 {
    (m + m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

impl GaugeData3 {
    /// Checks the box and pointwise skew-Hermiticity on a small grid.
    pub fn new(a: OneFormField, x: Chart, y: Chart, z: Chart) -> Result<Self> {
        if a.bounds() != S3_BOX || [&x, &y, &z].iter().any(|f| f.bounds() != S3_BOX) {
            return Err(Error::Contract("gauge data must live on the S³ box".into()));
        }
        let n = 5;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let u = [
                        PI * (i as f64 + 0.5) / n as f64,
                        PI * (j as f64 + 0.5) / n as f64,
                        2.0 * PI * (k as f64 + 0.5) / n as f64,
                    ];
                    let mut worst: f64 = 0.0;
                    for f in [&x, &y, &z] {
                        worst = worst.max(skew_defect(&f.eval(&u)?));
                    }
                    for m in a.components(&u)? {
                        worst = worst.max(skew_defect(&m));
                    }
                    if worst > SKEW_TOL {
                        return Err(Error::Validation(format!(
                            "gauge data not skew-Hermitian at {u:?} (defect {worst:e})"
                        )));
                    }
                }
            }
        }
        Ok(Self { a, x, y, z })
    }

    /// Every field multiplied by `t`; `A` is left alone when `scale_a` is
    /// false.
    pub fn scaled(&self, t: f64, scale_a: bool) -> Self {
        let s = |ch: &Chart| {
            let ch = ch.clone();
            Chart::new(S3_BOX.to_vec(), move |u| {
                ch.eval(u)
                    .map(|m| m * c(t, 0.0))
                    .unwrap_or_else(|_| CMat::from_element(1, 1, c(f64::NAN, 0.0)))
            })
        };
        Self {
            a: if scale_a {
                self.a.scaled(t)
            } else {
                self.a.clone()
            },
            x: s(&self.x),
            y: s(&self.y),
            z: s(&self.z),
        }
    }
}

/// `c(X, Y) = (i/12π²) ∫_{S³} tr A ∧ (dX ∧ dY − dY ∧ dX)`.
pub fn mf_cocycle(a: &OneFormField, x: &Chart, y: &Chart, quad: QuadratureSpec) -> Result<C64> {
    let v = integrate_form_value(
        FormWord::MickelssonFaddeev,
        &[FieldRef::OneForm(a), FieldRef::Map(x), FieldRef::Map(y)],
        quad,
    )?;
    Ok(v * c(0.0, 1.0 / (12.0 * PI * PI)))
}

/// The pointwise commutator `[X, Y]`, with partials by the product rule.
pub fn bracket_chart(x: &Chart, y: &Chart) -> Result<Chart> {
    let xy = x.pointwise_product(y)?;
    let yx = y.pointwise_product(x)?;
    let (xy2, yx2) = (xy.clone(), yx.clone());
    let nan = || CMat::from_element(1, 1, c(f64::NAN, 0.0));
    Ok(Chart::new(x.bounds().to_vec(), move |u| {
        match (xy.eval(u), yx.eval(u)) {
            (Ok(a), Ok(b)) => a - b,
            _ => nan(),
        }
    })
    .with_analytic_jacobian(move |u| match (xy2.partials(u), yx2.partials(u)) {
        (Ok(a), Ok(b)) => a.into_iter().zip(b).map(|(p, q)| p - q).collect(),
        _ => vec![nan(); 3],
    }))
}

/// The variation `δ_X A = [X, A] − dX` of the connection under the
/// infinitesimal gauge transformation `X`.
pub fn gauge_direction(a: &OneFormField, x: &Chart) -> OneFormField {
    let (a, x) = (a.clone(), x.clone());
    let bounds = a.bounds().to_vec();
    OneFormField::new(bounds, move |u| {
        let (Ok(comps), Ok(xv), Ok(dx)) = (a.components(u), x.eval(u), x.partials(u)) else {
            return vec![CMat::from_element(1, 1, c(f64::NAN, 0.0)); 3];
        };
        comps
            .iter()
            .zip(&dx)
            .map(|(ai, dxi)| &xv * ai - ai * &xv - dxi)
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MfIdentity {
    /// `|Σ_cyclic c([X, Y], Z) + L_X c(Y, Z)|`.
    pub residual: f64,
    /// Largest modulus among the six terms of the sum.
    pub largest_term: f64,
    pub relative: f64,
}

/// The cocycle identity `c([X,Y],Z) + L_X c(Y,Z) + cyclic = 0`, where the
/// Lie derivative is `c(Y,Z)` evaluated on `δ_X A`, since `c` is linear
/// in `A`.
pub fn mf_identity(data: &GaugeData3, quad: QuadratureSpec) -> Result<MfIdentity> {
    let (x, y, z) = (&data.x, &data.y, &data.z);
    let mut terms = Vec::with_capacity(6);
    for (p, q, r) in [(x, y, z), (y, z, x), (z, x, y)] {
        terms.push(mf_cocycle(&data.a, &bracket_chart(p, q)?, r, quad)?);
        terms.push(mf_cocycle(&gauge_direction(&data.a, p), q, r, quad)?);
    }
    let residual = terms.iter().sum::<C64>().norm();
    let largest_term = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
    Ok(MfIdentity {
        residual,
        largest_term,
        relative: if largest_term > 0.0 {
            residual / largest_term
        } else {
            0.0
        },
    })
}

/// `X(q) = K₀ + Σ_j q_j K_{j+1} + q₀q₁ K₅` restricted to `q ∈ S³`.
fn polynomial_function(k: Vec<CMat>) -> Chart {
    let q = s3_vector_chart();
    Chart::new(S3_BOX.to_vec(), move |u| {
        let p = q.eval(u).expect("inside the box");
        let mut m = k[0].clone();
        for j in 0..4 {
            m += &k[j + 1] * p[(j, 0)];
        }
        m + &k[5] * (p[(0, 0)] * p[(1, 0)])
    })
}

/// `A = Σ_j (K_j + q_{j+1} K_{4+j}) dq_j` pulled back to the chart.
fn polynomial_form(k: Vec<CMat>) -> OneFormField {
    let q = s3_vector_chart();
    OneFormField::new(S3_BOX.to_vec(), move |u| {
        let p = q.eval(u).expect("inside the box");
        let dq = q.partials(u).expect("inside the box");
        let coeff: Vec<CMat> = (0..4)
            .map(|j| &k[j] + &k[4 + j] * p[((j + 1) % 4, 0)])
            .collect();
        dq.iter()
            .map(|d| {
                (0..4).fold(CMat::zeros(k[0].nrows(), k[0].ncols()), |acc, j| {
                    acc + &coeff[j] * d[(j, 0)]
                })
            })
            .collect()
    })
}

fn gauge_data_from<R, F>(rng: &mut R, draw: F) -> Result<GaugeData3>
where
    R: Rng + ?Sized,
    F: Fn(&mut R) -> CMat,
{
    let mut take = |count: usize| (0..count).map(|_| draw(rng)).collect::<Vec<_>>();
    let a = polynomial_form(take(8));
    let (x, y, z) = (
        polynomial_function(take(6)),
        polynomial_function(take(6)),
        polynomial_function(take(6)),
    );
    GaugeData3::new(a, x, y, z)
}

/// Random smooth `su(N)` gauge data on `S³`, polynomial in `q ∈ R⁴`.
///
/// The cocycle integrand is `tr A {dX, dY}` up to sign, so it vanishes
/// identically for `N = 2`, where anticommutators are scalar.
pub fn random_gauge_data<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<GaugeData3> {
    gauge_data_from(rng, |r| random_su(n, r).into_matrix())
}
