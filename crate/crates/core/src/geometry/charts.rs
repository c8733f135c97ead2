//! Standard parametrisations of `S³ ≅ SU(2)`, the unit disk and the unit
//! ball. Orientation always follows axis order.

use std::f64::consts::PI;

use super::chart::Chart;
use crate::lie::{c, su2_from_quaternion, CMat};

pub const S3_BOX: [(f64, f64); 3] = [(0.0, PI), (0.0, PI), (0.0, 2.0 * PI)];
pub const DISK_BOX: [(f64, f64); 2] = [(0.0, 1.0), (0.0, 2.0 * PI)];
pub const BALL_BOX: [(f64, f64); 3] = [(0.0, 1.0), (0.0, PI), (0.0, 2.0 * PI)];

/// Hyperspherical coordinates `(ψ, θ, φ)` of the unit quaternion.
pub fn s3_point(u: &[f64]) -> [f64; 4] {
    let (sp, cp) = u[0].sin_cos();
    let (st, ct) = u[1].sin_cos();
    let (sf, cf) = u[2].sin_cos();
    [cp, sp * ct, sp * st * cf, sp * st * sf]
}

fn s3_partials(u: &[f64]) -> [[f64; 4]; 3] {
    let (sp, cp) = u[0].sin_cos();
    let (st, ct) = u[1].sin_cos();
    let (sf, cf) = u[2].sin_cos();
    [
        [-sp, cp * ct, cp * st * cf, cp * st * sf],
        [0.0, -sp * st, sp * ct * cf, sp * ct * sf],
        [0.0, 0.0, -sp * st * sf, sp * st * cf],
    ]
}

fn column(q: [f64; 4]) -> CMat {
    CMat::from_iterator(4, 1, q.iter().map(|x| c(*x, 0.0)))
}

/// `S³ ⊂ R⁴` as a `4 x 1` map with analytic partials.
pub fn s3_vector_chart() -> Chart {
    Chart::new(S3_BOX.to_vec(), |u| column(s3_point(u)))
        .with_analytic_jacobian(|u| s3_partials(u).iter().map(|p| column(*p)).collect())
}

/// `SU(2)` through the unit quaternion of [`s3_point`], with analytic
/// partials (the quaternion map is linear).
pub fn su2_hyperspherical() -> Chart {
    Chart::new(S3_BOX.to_vec(), |u| su2_from_quaternion(s3_point(u))).with_analytic_jacobian(|u| {
        s3_partials(u)
            .iter()
            .map(|p| su2_from_quaternion(*p))
            .collect()
    })
}

/// A matrix field on `R⁴` restricted to `S³` in hyperspherical coordinates.
pub fn s3_field<F>(f: F) -> Chart
where
    F: Fn([f64; 4]) -> CMat + Send + Sync + 'static,
{
    Chart::new(S3_BOX.to_vec(), move |u| f(s3_point(u)))
}

/// A map on the closed unit disk in polar coordinates `(ρ, φ)`.
pub fn disk_chart<F>(f: F) -> Chart
where
    F: Fn(f64, f64) -> CMat + Send + Sync + 'static,
{
    Chart::new(DISK_BOX.to_vec(), move |u| {
        let (s, co) = u[1].sin_cos();
        f(u[0] * co, u[0] * s)
    })
}

/// A map on the closed unit ball in spherical coordinates `(r, θ, φ)`.
pub fn ball_chart<F>(f: F) -> Chart
where
    F: Fn([f64; 3]) -> CMat + Send + Sync + 'static,
{
    Chart::new(BALL_BOX.to_vec(), move |u| f(ball_point(u)))
}

pub fn ball_point(u: &[f64]) -> [f64; 3] {
    let (st, ct) = u[1].sin_cos();
    let (sf, cf) = u[2].sin_cos();
    [u[0] * st * cf, u[0] * st * sf, u[0] * ct]
}
