use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::charts::{disk_chart, DISK_BOX};
use crate::geometry::{integrate_form_value, Chart, FieldRef, FormWord, QuadratureSpec};
use crate::lie::{c, exp_skew_matrix, random_su, unitarity_defect, CMat, C64, UNITARY_TOL};

/// A unitary-valued map on the closed unit disk, in polar coordinates
/// `(ρ, φ) ∈ [0, 1] × [0, 2π]`.
#[derive(Debug, Clone)]
pub struct DiskMap {
    chart: Chart,
}

const CHECK_GRID: usize = 9;

impl DiskMap {
    /// Wraps a chart on the polar disk box after checking unitarity on a
    /// small grid.
    pub fn new(chart: Chart) -> Result<Self> {
        if chart.bounds() != DISK_BOX {
            return Err(Error::Contract(format!(
                "disk maps live on {DISK_BOX:?}, got {:?}",
                chart.bounds()
            )));
        }
        for i in 0..=CHECK_GRID {
            for j in 0..CHECK_GRID {
                let u = [
                    i as f64 / CHECK_GRID as f64,
                    2.0 * PI * j as f64 / CHECK_GRID as f64,
                ];
                let g = chart.eval(&u)?;
                let defect = unitarity_defect(&g);
                if defect > UNITARY_TOL {
                    return Err(Error::Validation(format!(
                        "disk map not unitary at {u:?} (defect {defect:e})"
                    )));
                }
            }
        }
        Ok(Self { chart })
    }

    /// From a function of Cartesian `(x, y)`.
    pub fn from_fn<F>(f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> CMat + Send + Sync + 'static,
    {
        Self::new(disk_chart(f))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            chart: disk_chart(move |_, _| CMat::identity(n, n)),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> Result<usize> {
        Ok(self.chart.eval(&[0.0, 0.0])?.nrows())
    }

    /// Pointwise product `g g′`.
    pub fn product(&self, other: &DiskMap) -> Result<DiskMap> {
        Ok(DiskMap {
            chart: self.chart.pointwise_product(&other.chart)?,
        })
    }

    /// Pointwise inverse.
    pub fn inverse(&self) -> DiskMap {
        DiskMap {
            chart: self.chart.pointwise_adjoint(),
        }
    }

    /// The same map precomposed with a diffeomorphism of the polar box.
    pub fn reparametrize<F>(&self, phi: F) -> Result<DiskMap>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        DiskMap::new(self.chart.reparametrize(DISK_BOX.to_vec(), phi))
    }
}

/// `γ(g, g′) = (1/8π²) ∫_D tr (g⁻¹dg ∧ dg′ g′⁻¹)`.
///
/// For unitary maps the integrand is real, so the imaginary part of the
/// result is roundoff.
pub fn gamma(g: &DiskMap, g2: &DiskMap, quad: QuadratureSpec) -> Result<C64> {
    let v = integrate_form_value(
        FormWord::DiskCocycle,
        &[FieldRef::Map(&g.chart), FieldRef::Map(&g2.chart)],
        quad,
    )?;
    Ok(v / (8.0 * PI * PI))
}

/// An element `(g, λ)` of `Map(D, G) × S¹`.
#[derive(Debug, Clone)]
pub struct ExtensionElement {
    pub map: DiskMap,
    pub phase: C64,
}

impl ExtensionElement {
    pub fn new(map: DiskMap, phase: C64) -> Result<Self> {
        if (phase.norm() - 1.0).abs() > UNITARY_TOL {
            return Err(Error::Validation(format!(
                "phase {phase} is not unimodular"
            )));
        }
        Ok(Self { map, phase })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: DiskMap::identity(n),
            phase: c(1.0, 0.0),
        }
    }
}

/// `(g, λ)(g′, λ′) = (g g′, λ λ′ e^{2πiγ(g, g′)})`.
pub fn multiply(
    e: &ExtensionElement,
    e2: &ExtensionElement,
    quad: QuadratureSpec,
) -> Result<ExtensionElement> {
    let gm = gamma(&e.map, &e2.map, quad)?;
    Ok(ExtensionElement {
        map: e.map.product(&e2.map)?,
        phase: e.phase * e2.phase * (c(0.0, 2.0 * PI) * gm).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AssociativityDefect {
    pub defect: f64,
    pub distance_to_integer: f64,
    /// Largest imaginary part among the four γ values.
    pub imaginary: f64,
}

/// `γ(g, g′) + γ(gg′, g″) − γ(g, g′g″) − γ(g′, g″)`.
pub fn associativity_defect(
    g: &DiskMap,
    g2: &DiskMap,
    g3: &DiskMap,
    quad: QuadratureSpec,
) -> Result<AssociativityDefect> {
    let terms = [
        gamma(g, g2, quad)?,
        gamma(&g.product(g2)?, g3, quad)?,
        -gamma(g, &g2.product(g3)?, quad)?,
        -gamma(g2, g3, quad)?,
    ];
    let defect = terms.iter().map(|t| t.re).sum::<f64>();
    Ok(AssociativityDefect {
        defect,
        distance_to_integer: super::distance_to_integer(defect),
        imaginary: terms.iter().map(|t| t.im.abs()).fold(0.0, f64::max),
    })
}

/// `(z^w, 1 − |z|^{2w})` normalised, so that the boundary loop of the
/// resulting `SU(2)` map is `diag(e^{iwφ}, e^{−iwφ})`.
fn winding_pair(x: f64, y: f64, w: i32) -> (C64, C64) {
    let z = c(x, y).powi(w.abs());
    let z = if w < 0 { z.conj() } else { z };
    let r2 = z.norm_sqr();
    let b = c(1.0 - r2, 0.0);
    let norm = (r2 + b.norm_sqr()).sqrt();
    (z / norm, b / norm)
}

/// `exp(X₀ + x X₁ + y X₂ + xy X₃ + (x² − y²) X₄)` with random traceless
/// skew-Hermitian `X_k` of operator norm at most `amplitude / 5`, times a
/// smooth `SU(2)` block whose boundary loop winds `winding` times.
pub fn random_disk_map<R: Rng + ?Sized>(
    n: usize,
    amplitude: f64,
    winding: i32,
    rng: &mut R,
) -> Result<DiskMap> {
    let xs: Vec<CMat> = (0..5)
        .map(|_| {
            let x = random_su(n, rng).into_matrix();
            let norm = x.clone().svd(false, false).singular_values.max();
            x * c(amplitude / 5.0 / norm.max(1e-300), 0.0)
        })
        .collect();
    DiskMap::from_fn(move |x, y| {
        let gen = &xs[0]
            + &xs[1] * c(x, 0.0)
            + &xs[2] * c(y, 0.0)
            + &xs[3] * c(x * y, 0.0)
            + &xs[4] * c(x * x - y * y, 0.0);
        let mut g = exp_skew_matrix(&gen);
        if winding != 0 && n >= 2 {
            let (a, b) = winding_pair(x, y, winding);
            let mut w = CMat::identity(n, n);
            w[(0, 0)] = a;
            w[(0, 1)] = -b.conj();
            w[(1, 0)] = b;
            w[(1, 1)] = a.conj();
            g = w * g;
        }
        g
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    const Q: QuadratureSpec = QuadratureSpec {
        rule: crate::geometry::QuadratureRule::GaussLegendre,
        nodes_per_axis: 24,
    };

    #[test]
    fn identity_factor_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_disk_map(2, 1.0, 0, &mut rng).unwrap();
        let one = DiskMap::identity(2);
        assert_eq!(gamma(&g, &one, Q).unwrap(), c(0.0, 0.0));
        assert_eq!(gamma(&one, &g, Q).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn gamma_with_the_inverse_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_disk_map(2, 1.5, 0, &mut rng).unwrap();
        let v = gamma(&g, &g.inverse(), Q).unwrap();
        assert!(v.norm() < 1e-10, "{v}");
    }

    #[test]
    fn gamma_is_real_and_converges() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_disk_map(2, 1.5, 0, &mut rng).unwrap();
        let h = random_disk_map(2, 1.5, 0, &mut rng).unwrap();
        let (v, w) = (
            gamma(&g, &h, Q).unwrap(),
            gamma(&g, &h, Q.refined()).unwrap(),
        );
        assert!(v.re.abs() > 1e-3);
        assert!(v.im.abs() < 1e-12);
        assert!((v - w).norm() < 1e-8, "{v} {w}");
    }

    #[test]
    fn gamma_is_coordinate_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_disk_map(2, 1.0, 0, &mut rng).unwrap();
        let h = random_disk_map(2, 1.0, 0, &mut rng).unwrap();
        let phi = |v: &[f64]| vec![v[0] * v[0], v[1] + 0.3 * v[1].sin()];
        let (gr, hr) = (g.reparametrize(phi).unwrap(), h.reparametrize(phi).unwrap());
        let (a, b) = (
            gamma(&g, &h, Q).unwrap(),
            gamma(&gr, &hr, QuadratureSpec::gauss(48)).unwrap(),
        );
        assert!((a - b).norm() < 1e-7, "{a} {b}");
    }

    #[test]
    fn group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_disk_map(2, 1.0, 0, &mut rng).unwrap();
        let e = ExtensionElement::new(g, C64::from_polar(1.0, 0.4)).unwrap();
        let same = multiply(&e, &ExtensionElement::identity(2), Q).unwrap();
        assert!((same.phase - e.phase).norm() < 1e-14);
        let z1 = ExtensionElement::new(DiskMap::identity(2), C64::from_polar(1.0, 0.3)).unwrap();
        let z2 = ExtensionElement::new(DiskMap::identity(2), C64::from_polar(1.0, 1.1)).unwrap();
        assert!((multiply(&z1, &z2, Q).unwrap().phase - C64::from_polar(1.0, 1.4)).norm() < 1e-14);
        assert!(ExtensionElement::new(DiskMap::identity(2), c(1.1, 0.0)).is_err());
    }

    #[test]
    fn associativity_defect_is_integral() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for winding in [0, 3] {
            let ms: Vec<DiskMap> = (0..3)
                .map(|_| random_disk_map(2, 2.0, winding, &mut rng).unwrap())
                .collect();
            let d = associativity_defect(&ms[0], &ms[1], &ms[2], Q).unwrap();
            assert!(d.distance_to_integer < 1e-6, "{d:?}");
            assert_eq!(d.defect.round(), 0.0);
        }
        let g = random_disk_map(2, 1.0, 0, &mut rng).unwrap();
        let h = random_disk_map(2, 1.0, 0, &mut rng).unwrap();
        assert!(
            associativity_defect(&g, &h, &DiskMap::identity(2), Q)
                .unwrap()
                .defect
                .abs()
                < 1e-12
        );
    }
}
