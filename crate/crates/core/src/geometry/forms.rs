use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::chart::{Chart, OneFormField};
use super::quadrature::{QuadratureSpec, TensorGrid};
use crate::error::{Error, Result};
use crate::lie::{c, CMat, C64};

/// The closed set of integrands the library needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormWord {
    /// `tr (g⁻¹dg)³` of one map.
    MaurerCartan3,
    /// `tr (g⁻¹dg)⁵` of one map.
    MaurerCartan5,
    /// `tr (g⁻¹dg ∧ dg′ g′⁻¹)` of two maps.
    DiskCocycle,
    /// `tr (X dY)` of two matrix functions.
    LoopCocycle,
    /// `tr A ∧ (dX ∧ dY − dY ∧ dX)` of a 1-form and two functions.
    MickelssonFaddeev,
    /// `det[q, dq, dq, dq]` of a unit vector `q ∈ R⁴` (an `4 x 1` map).
    SphereVolume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Map,
    OneForm,
}

impl FormWord {
    pub fn degree(&self) -> usize {
        match self {
            FormWord::MaurerCartan3 | FormWord::MickelssonFaddeev | FormWord::SphereVolume => 3,
            FormWord::MaurerCartan5 => 5,
            FormWord::DiskCocycle => 2,
            FormWord::LoopCocycle => 1,
        }
    }

    pub fn arity(&self) -> &'static [FieldKind] {
        use FieldKind::*;
        match self {
            FormWord::MaurerCartan3 | FormWord::MaurerCartan5 | FormWord::SphereVolume => &[Map],
            FormWord::DiskCocycle | FormWord::LoopCocycle => &[Map, Map],
            FormWord::MickelssonFaddeev => &[OneForm, Map, Map],
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum FieldRef<'a> {
    Map(&'a Chart),
    OneForm(&'a OneFormField),
}

impl FieldRef<'_> {
    fn kind(&self) -> FieldKind {
        match self {
            FieldRef::Map(_) => FieldKind::Map,
            FieldRef::OneForm(_) => FieldKind::OneForm,
        }
    }

    fn bounds(&self) -> &[(f64, f64)] {
        match self {
            FieldRef::Map(ch) => ch.bounds(),
            FieldRef::OneForm(a) => a.bounds(),
        }
    }
}

/// A field sampled at one point: its value (maps only) and its 1-form
/// values on each tangent vector.
struct Sample {
    value: Option<CMat>,
    along: Vec<CMat>,
}

fn sample(field: &FieldRef<'_>, u: &[f64], tangents: Option<&[Vec<f64>]>) -> Result<Sample> {
    let (value, axes) = match field {
        FieldRef::Map(ch) => (Some(ch.eval(u)?), ch.partials(u)?),
        FieldRef::OneForm(a) => (None, a.components(u)?),
    };
    let along = match tangents {
        None => axes,
        Some(ts) => ts
            .iter()
            .map(|t| {
                t.iter().zip(&axes).fold(
                    CMat::zeros(axes[0].nrows(), axes[0].ncols()),
                    |acc, (ti, m)| acc + m * c(*ti, 0.0),
                )
            })
            .collect(),
    };
    Ok(Sample { value, along })
}

fn inverse(m: &CMat, u: &[f64]) -> Result<CMat> {
    m.clone()
        .try_inverse()
        .ok_or_else(|| Error::ChartEvaluation {
            point: u.to_vec(),
            reason: "singular map value".into(),
        })
}

fn signed_permutations(k: usize) -> Vec<(f64, Vec<usize>)> {
    (0..k)
        .permutations(k)
        .map(|p| {
            let inversions = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            (if inversions % 2 == 0 { 1.0 } else { -1.0 }, p)
        })
        .collect()
}

fn alternating_trace<F>(k: usize, term: F) -> C64
where
    F: Fn(&[usize]) -> C64,
{
    signed_permutations(k)
        .iter()
        .map(|(s, p)| term(p) * *s)
        .sum()
}

fn trace_of_product(ms: &[&CMat]) -> C64 {
    let mut acc = ms[0].clone();
    for m in &ms[1..] {
        acc = &acc * *m;
    }
    acc.trace()
}

fn evaluate(word: FormWord, samples: &[Sample], u: &[f64]) -> Result<C64> {
    let k = word.degree();
    match word {
        FormWord::MaurerCartan3 | FormWord::MaurerCartan5 => {
            let g = samples[0].value.as_ref().expect("map sample");
            let gi = inverse(g, u)?;
            let alpha: Vec<CMat> = samples[0].along.iter().map(|d| &gi * d).collect();
            Ok(alternating_trace(k, |p| {
                trace_of_product(&p.iter().map(|&i| &alpha[i]).collect::<Vec<_>>())
            }))
        }
        FormWord::DiskCocycle => {
            let g = samples[0].value.as_ref().expect("map sample");
            let h = samples[1].value.as_ref().expect("map sample");
            let (gi, hi) = (inverse(g, u)?, inverse(h, u)?);
            let alpha: Vec<CMat> = samples[0].along.iter().map(|d| &gi * d).collect();
            let beta: Vec<CMat> = samples[1].along.iter().map(|d| d * &hi).collect();
            Ok(alternating_trace(k, |p| {
                (&alpha[p[0]] * &beta[p[1]]).trace()
            }))
        }
        FormWord::LoopCocycle => {
            let x = samples[0].value.as_ref().expect("map sample");
            Ok((x * &samples[1].along[0]).trace())
        }
        FormWord::MickelssonFaddeev => {
            let (a, dx, dy) = (&samples[0].along, &samples[1].along, &samples[2].along);
            Ok(alternating_trace(k, |p| {
                (&a[p[0]] * (&dx[p[1]] * &dy[p[2]] - &dy[p[1]] * &dx[p[2]])).trace()
            }))
        }
        FormWord::SphereVolume => {
            let q = samples[0].value.as_ref().expect("map sample");
            if q.shape() != (4, 1) {
                return Err(Error::Contract(format!(
                    "sphere volume needs a 4x1 map, got {:?}",
                    q.shape()
                )));
            }
            let mut m = CMat::zeros(4, 4);
            m.set_column(0, &q.column(0));
            for (j, d) in samples[0].along.iter().enumerate() {
                m.set_column(j + 1, &d.column(0));
            }
            Ok(m.determinant())
        }
    }
}

fn check_fields(word: FormWord, fields: &[FieldRef<'_>]) -> Result<()> {
    let kinds: Vec<FieldKind> = fields.iter().map(|f| f.kind()).collect();
    if kinds != word.arity() {
        return Err(Error::Contract(format!(
            "{word:?} takes fields {:?}, got {kinds:?}",
            word.arity()
        )));
    }
    let b = fields[0].bounds();
    if fields.iter().any(|f| f.bounds() != b) {
        return Err(Error::Contract(
            "all fields of a form must live on the same box".into(),
        ));
    }
    Ok(())
}

/// Value of the form on `tangents` at `u`, as the signed sum over all
/// orderings of the tangents.
pub fn eval_form(
    word: FormWord,
    fields: &[FieldRef<'_>],
    u: &[f64],
    tangents: &[Vec<f64>],
) -> Result<C64> {
    check_fields(word, fields)?;
    if tangents.len() != word.degree() {
        return Err(Error::Contract(format!(
            "{word:?} has degree {} but got {} tangents",
            word.degree(),
            tangents.len()
        )));
    }
    let d = fields[0].bounds().len();
    if tangents.iter().any(|t| t.len() != d) || u.len() != d {
        return Err(Error::Contract(format!(
            "point and tangents must have {d} components"
        )));
    }
    let samples = fields
        .iter()
        .map(|f| sample(f, u, Some(tangents)))
        .collect::<Result<Vec<_>>>()?;
    evaluate(word, &samples, u)
}

/// Pullback density of the form at `u` on the coordinate frame.
pub fn form_density(word: FormWord, fields: &[FieldRef<'_>], u: &[f64]) -> Result<C64> {
    let samples = fields
        .iter()
        .map(|f| sample(f, u, None))
        .collect::<Result<Vec<_>>>()?;
    evaluate(word, &samples, u)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormIntegral {
    pub value: C64,
    /// `|I(n) − I(n/2)|`.
    pub error_estimate: f64,
    pub nodes_per_axis: usize,
}

/// Integral over the box, oriented by axis order, with the same rule on
/// every axis.
pub fn integrate_form(
    word: FormWord,
    fields: &[FieldRef<'_>],
    quad: QuadratureSpec,
) -> Result<FormIntegral> {
    let value = integrate_form_value(word, fields, quad)?;
    let coarse = integrate_form_value(word, fields, quad.coarsened())?;
    Ok(FormIntegral {
        value,
        error_estimate: (value - coarse).norm(),
        nodes_per_axis: quad.nodes_per_axis,
    })
}

/// As [`integrate_form`] without the refinement estimate.
pub fn integrate_form_value(
    word: FormWord,
    fields: &[FieldRef<'_>],
    quad: QuadratureSpec,
) -> Result<C64> {
    check_fields(word, fields)?;
    let bounds = fields[0].bounds();
    if bounds.len() != word.degree() {
        return Err(Error::Contract(format!(
            "{word:?} has degree {} but the box has dimension {}",
            word.degree(),
            bounds.len()
        )));
    }
    let grid = TensorGrid::new(bounds, &vec![quad; bounds.len()])?;
    grid.integrate(|u| form_density(word, fields, u))
}
