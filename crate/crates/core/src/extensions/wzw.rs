use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::disk::DiskMap;
use crate::error::{Error, Result};
use crate::geometry::{integrate_form_value, Chart, FieldRef, FormWord, QuadratureSpec};
use crate::lie::{c, exp_skew_matrix, log_branch, pauli, random_su, CMat, UnitaryMatrix, C64};

/// Tolerance for the boundary conditions of sphere maps and their ball
/// extensions.
pub const BOUNDARY_TOL: f64 = 1e-10;

const S2_BOX: [(f64, f64); 2] = [(0.0, PI), (0.0, 2.0 * PI)];
const CHECK_GRID: usize = 12;

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A disk map equal to `1` on the boundary circle, read as a map on `S²`
/// through `θ = π(1 − ρ)`: the disk centre goes to the south pole and the
/// collapsed boundary to the north pole.
#[derive(Debug, Clone)]
pub struct SphereMap {
    disk: DiskMap,
    dim: usize,
}

impl SphereMap {
    pub fn new(disk: DiskMap) -> Result<Self> {
        let dim = disk.dim()?;
        let one = CMat::identity(dim, dim);
        for j in 0..4 * CHECK_GRID {
            let phi = 2.0 * PI * j as f64 / (4 * CHECK_GRID) as f64;
            let err = max_abs(&(disk.chart().eval(&[1.0, phi])? - &one));
            if err > BOUNDARY_TOL {
                return Err(Error::Validation(format!(
                    "sphere map differs from 1 by {err:e} on the boundary at φ = {phi}"
                )));
            }
        }
        Ok(Self { disk, dim })
    }

    pub fn disk(&self) -> &DiskMap {
        &self.disk
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Value at the sphere point with polar angle `theta`, azimuth `phi`.
    pub fn at(&self, theta: f64, phi: f64) -> Result<CMat> {
        self.disk.chart().eval(&[1.0 - theta / PI, phi])
    }

    /// Pointwise product; again trivial on the boundary.
    pub fn product(&self, other: &SphereMap) -> Result<SphereMap> {
        SphereMap::new(self.disk.product(&other.disk)?)
    }
}

/// Radial profile `s : [0, 1] → [0, 1]` with `s(0) = 0`, `s(1) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Linear,
    Smoothstep,
}

impl Profile {
    fn eval(self, r: f64) -> f64 {
        match self {
            Profile::Linear => r,
            Profile::Smoothstep => r * r * (3.0 - 2.0 * r),
        }
    }
}

/// How a sphere map is filled in over the ball `r ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BallExtension {
    /// `g(r, ·) = exp(s(r) log_λ g(·))` with the logarithm whose cut is at
    /// `λ`.
    Radial { branch: C64, profile: Profile },
    /// The radial extension squeezed into `1/2 ≤ r ≤ 1`, with a
    /// degree-`degree` `SU(2)` bubble, trivial on its boundary, filling
    /// `r ≤ 1/2`.
    Bubble { branch: C64, degree: i32 },
}

impl BallExtension {
    pub fn radial(profile: Profile) -> Self {
        BallExtension::Radial {
            branch: c(-1.0, 0.0),
            profile,
        }
    }

    pub fn bubble(degree: i32) -> Self {
        BallExtension::Bubble {
            branch: c(-1.0, 0.0),
            degree,
        }
    }
}

fn smoothstep(x: f64) -> f64 {
    x * x * (3.0 - 2.0 * x)
}

/// `exp(iπ k(ρ) n̂·σ)` with `k = d(1 − smoothstep(ρ))`: trivial at `ρ = 1`,
/// `(−1)^d` at the centre, covering `SU(2)` `d` times.
fn bubble_value(rho: f64, theta: f64, phi: f64, degree: i32, n: usize) -> CMat {
    let k = degree as f64 * (1.0 - smoothstep(rho));
    let (st, ct) = theta.sin_cos();
    let (sf, cf) = phi.sin_cos();
    let [s1, s2, s3] = pauli();
    let dir = s1 * c(st * cf, 0.0) + s2 * c(st * sf, 0.0) + s3 * c(ct, 0.0);
    let (sk, ck) = (PI * k).sin_cos();
    let block = CMat::identity(2, 2) * c(ck, 0.0) + dir * c(0.0, sk);
    let mut g = CMat::identity(n, n);
    g.view_mut((0, 0), (2, 2)).copy_from(&block);
    g
}

fn nan_matrix(n: usize) -> CMat {
    CMat::from_element(n, n, c(f64::NAN, 0.0))
}

fn radial_chart(
    sphere: &SphereMap,
    branch: C64,
    r_bounds: (f64, f64),
    s: impl Fn(f64) -> f64 + Send + Sync + 'static,
) -> Chart {
    let sphere = sphere.clone();
    let n = sphere.dim;
    Chart::new(vec![r_bounds, S2_BOX[0], S2_BOX[1]], move |u| {
        let Ok(g) = sphere.at(u[1], u[2]).and_then(UnitaryMatrix::new) else {
            return nan_matrix(n);
        };
        match log_branch(&g, branch) {
            Ok(x) => exp_skew_matrix(&(x.into_matrix() * c(s(u[0]), 0.0))),
            Err(_) => nan_matrix(n),
        }
    })
}

impl BallExtension {
    /// The extension as charts over consecutive radial shells, in spherical
    /// coordinates `(r, θ, φ)`.
    pub fn pieces(&self, sphere: &SphereMap) -> Result<Vec<Chart>> {
        match *self {
            BallExtension::Radial { branch, profile } => {
                Ok(vec![radial_chart(sphere, branch, (0.0, 1.0), move |r| {
                    profile.eval(r)
                })])
            }
            BallExtension::Bubble { branch, degree } => {
                let n = sphere.dim;
                if n < 2 {
                    return Err(Error::Contract("bubble extensions need N ≥ 2".into()));
                }
                let inner = Chart::new(vec![(0.0, 0.5), S2_BOX[0], S2_BOX[1]], move |u| {
                    bubble_value(2.0 * u[0], u[1], u[2], degree, n)
                });
                let outer = radial_chart(sphere, branch, (0.5, 1.0), |r| 2.0 * r - 1.0);
                Ok(vec![inner, outer])
            }
        }
    }

    /// Checks that the outermost piece restricts to the sphere map.
    pub fn validate(&self, sphere: &SphereMap) -> Result<()> {
        let pieces = self.pieces(sphere)?;
        let outer = pieces.last().expect("at least one piece");
        for i in 0..=CHECK_GRID {
            for j in 0..CHECK_GRID {
                let (theta, phi) = (
                    PI * i as f64 / CHECK_GRID as f64,
                    2.0 * PI * j as f64 / CHECK_GRID as f64,
                );
                let err = max_abs(&(outer.eval(&[1.0, theta, phi])? - sphere.at(theta, phi)?));
                if err > BOUNDARY_TOL {
                    return Err(Error::Validation(format!("ball extension misses the sphere map by {err:e} at (θ, φ) = ({theta}, {phi})")));
                }
            }
        }
        Ok(())
    }
}

/// `C(g) = (1/24π²) ∫_B tr (g⁻¹dg)³` for the chosen ball extension.
pub fn wzw(sphere: &SphereMap, extension: &BallExtension, quad: QuadratureSpec) -> Result<f64> {
    extension.validate(sphere)?;
    let mut total = c(0.0, 0.0);
    for piece in extension.pieces(sphere)? {
        total += integrate_form_value(FormWord::MaurerCartan3, &[FieldRef::Map(&piece)], quad)?;
    }
    Ok(total.re / (24.0 * PI * PI))
}

/// `exp((1 − ρ²)(X₀ + x X₁ + y X₂))` with random `su(N)` coefficients of
/// operator norm `amplitude / 3`: trivial on the boundary, with every
/// eigenphase in `[−amplitude, amplitude]`.
pub fn random_sphere_map<R: Rng + ?Sized>(
    n: usize,
    amplitude: f64,
    rng: &mut R,
) -> Result<SphereMap> {
    let xs: Vec<CMat> = (0..3)
        .map(|_| {
            let x = random_su(n, rng).into_matrix();
            let norm = x.clone().svd(false, false).singular_values.max();
            x * c(amplitude / 3.0 / norm.max(1e-300), 0.0)
        })
        .collect();
    SphereMap::new(DiskMap::from_fn(move |x, y| {
        let bump = 1.0 - x * x - y * y;
        exp_skew_matrix(&((&xs[0] + &xs[1] * c(x, 0.0) + &xs[2] * c(y, 0.0)) * c(bump, 0.0)))
    })?)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::super::disk::gamma;
    use super::super::distance_to_integer;
    use super::*;

    const Q: QuadratureSpec = QuadratureSpec {
        rule: crate::geometry::QuadratureRule::GaussLegendre,
        nodes_per_axis: 20,
    };

    #[test]
    fn trivial_map_has_zero_term() {
        let sphere = SphereMap::new(DiskMap::identity(2)).unwrap();
        assert_eq!(
            wzw(&sphere, &BallExtension::radial(Profile::Linear), Q).unwrap(),
            0.0
        );
    }

    #[test]
    fn boundary_condition_is_checked() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let disk = super::super::disk::random_disk_map(2, 1.0, 0, &mut rng).unwrap();
        assert!(matches!(SphereMap::new(disk), Err(Error::Validation(_))));
    }

    #[test]
    fn bubble_shifts_by_its_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let sphere = random_sphere_map(2, 3.0, &mut rng).unwrap();
        let radial = wzw(&sphere, &BallExtension::radial(Profile::Linear), Q).unwrap();
        let smooth = wzw(&sphere, &BallExtension::radial(Profile::Smoothstep), Q).unwrap();
        let bubble = wzw(&sphere, &BallExtension::bubble(1), Q).unwrap();
        assert!(distance_to_integer(radial) > 1e-4, "{radial}");
        assert!((radial - smooth).abs() < 1e-6, "{radial} {smooth}");
        assert!(
            ((bubble - radial).abs() - 1.0).abs() < 1e-6,
            "{bubble} {radial}"
        );
    }

    #[test]
    fn scaling_to_the_constant_map() {
        let values: Vec<f64> = [1.0, 0.5, 0.25]
            .iter()
            .map(|&a| {
                let sphere = random_sphere_map(2, a, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
                wzw(&sphere, &BallExtension::radial(Profile::Linear), Q).unwrap()
            })
            .collect();
        assert!(
            values[1].abs() < values[0].abs() && values[2].abs() < values[1].abs(),
            "{values:?}"
        );
        assert!(values[2].abs() < 0.1 * values[0].abs());
    }

    #[test]
    fn product_rule_on_the_normal_subgroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_sphere_map(2, 1.2, &mut rng).unwrap();
        let h = random_sphere_map(2, 1.2, &mut rng).unwrap();
        let ext = BallExtension::radial(Profile::Linear);
        let q = QuadratureSpec::gauss(24);
        let cg = wzw(&g, &ext, q).unwrap();
        let ch = wzw(&h, &ext, q).unwrap();
        let cgh = wzw(&g.product(&h).unwrap(), &ext, q).unwrap();
        let gm = gamma(g.disk(), h.disk(), q).unwrap().re;
        let combination = cgh - cg - ch - gm;
        assert!(gm.abs() > 1e-3);
        assert!(
            distance_to_integer(combination) < 1e-4,
            "C(gh) {cgh} C(g) {cg} C(h) {ch} γ {gm}"
        );
    }
}
