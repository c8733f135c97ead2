//! Checks that span several modules: level gerbes over nontrivial maps,
//! Bockstein integrality, and behaviour under small gauge moves.

use std::f64::consts::PI;

use gerbelab::cechdeligne::{bockstein, check_cocycle, level_gerbe, CechCochain, TupleSample};
use gerbelab::dirac::CoverSpec;
use gerbelab::geometry::charts::{su2_hyperspherical, S3_BOX};
use gerbelab::geometry::{integrate_form, Chart, FieldRef, FormWord, QuadratureSpec};
use gerbelab::lie::{exp_skew_matrix, random_su, CMat};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn samples(chart: Chart, m: usize, count: usize, seed: u64) -> (CechCochain, Vec<TupleSample>) {
    let spec = CoverSpec::equispaced(m, 0.3).unwrap();
    let (cover, f) = level_gerbe(chart, &spec);
    let pts = cover
        .sample_overlaps(4, count, &mut ChaCha8Rng::seed_from_u64(seed))
        .unwrap();
    (f, pts)
}

fn squared() -> Chart {
    let g = su2_hyperspherical();
    g.pointwise_product(&g).unwrap()
}

/// `h g h⁻¹` for a fixed `h`.
fn conjugated(chart: Chart, h: CMat) -> Chart {
    let h_inv = h.adjoint();
    Chart::new(S3_BOX.to_vec(), move |u| {
        &h * chart.eval(u).unwrap() * &h_inv
    })
}

fn small_move(eps: f64, seed: u64) -> CMat {
    let x = random_su(2, &mut ChaCha8Rng::seed_from_u64(seed)).into_matrix();
    exp_skew_matrix(&(x * gerbelab::lie::c(eps, 0.0)))
}

#[test]
fn squared_map_has_winding_two() {
    let v = integrate_form(
        FormWord::MaurerCartan3,
        &[FieldRef::Map(&squared())],
        QuadratureSpec::gauss(24),
    )
    .unwrap()
    .value
    .re / (24.0 * PI * PI);
    assert!((v - 2.0).abs() < 1e-6, "{v}");
}

#[test]
fn level_gerbe_is_a_cocycle_over_several_maps() {
    for (name, chart) in [("identity", su2_hyperspherical()), ("square", squared())] {
        for m in [4, 5, 6] {
            let (f, pts) = samples(chart.clone(), m, 100, m as u64);
            let defect = check_cocycle(&f, &pts).unwrap();
            assert!(defect < 1e-10, "{name} m={m}: {defect:e}");
        }
    }
}

#[test]
fn bockstein_values_are_integers() {
    for m in [4, 5, 6] {
        let (f, pts) = samples(squared(), m, 60, 7 + m as u64);
        for (t, u) in &pts {
            let b = bockstein(&f, [t[0], t[1], t[2], t[3]], u).unwrap();
            assert!(b.distance_to_integer() < 1e-6, "{b:?}");
        }
    }
}

#[test]
fn small_gauge_moves_preserve_cocycle_and_integers() {
    let m = 5;
    for (k, eps) in [1e-3, 1e-2, 5e-2].into_iter().enumerate() {
        let moved = conjugated(su2_hyperspherical(), small_move(eps, k as u64));
        let (f0, pts) = samples(su2_hyperspherical(), m, 80, 11);
        let (f1, _) = samples(moved, m, 1, 11);
        assert!(check_cocycle(&f1, &pts).unwrap() < 1e-10);
        let mut drift: f64 = 0.0;
        for (t, u) in &pts {
            let tuple = [t[0], t[1], t[2], t[3]];
            let (b0, b1) = (
                bockstein(&f0, tuple, u).unwrap(),
                bockstein(&f1, tuple, u).unwrap(),
            );
            assert_eq!(b0.integer, b1.integer);
            let (a, b) = (
                f0.eval(&t[..3], u).unwrap().as_circle().unwrap(),
                f1.eval(&t[..3], u).unwrap().as_circle().unwrap(),
            );
            drift = drift.max((a - b).norm());
        }
        assert!(drift < 100.0 * eps, "eps {eps}: drift {drift}");
    }
}
