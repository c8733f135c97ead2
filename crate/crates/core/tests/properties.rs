//! Property tests over seeded random inputs.

use gerbelab::carfock::{cocycle_trace_loops, random_loop, FockSpace};
use gerbelab::dirac::{spectral_flow, HolonomyPoint};
use gerbelab::extensions::distance_to_integer;
use gerbelab::lie::{
    c, eig_unitary, exp_skew, log_branch, random_su2, random_unitary, unitarity_defect, CVec,
    UnitaryMatrix, C64,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn max_abs(m: &gerbelab::lie::CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(seed: u64, n in 1usize..6) {
        let g = random_unitary(n, &mut rng(seed));
        let s = eig_unitary(&g);
        prop_assert!(max_abs(&(s.reconstruct() - g.matrix())) < 1e-10);
        prop_assert!(unitarity_defect(&s.eigenvectors) < 1e-10);
    }

    #[test]
    fn logarithm_lies_on_its_arc_and_exponentiates_back(seed: u64, n in 1usize..5, t in 0.0f64..1.0) {
        let g = random_unitary(n, &mut rng(seed));
        let lambda = C64::from_polar(1.0, TAU * t);
        prop_assume!(gerbelab::lie::distance_to_spectrum(&eig_unitary(&g), lambda) > 1e-6);
        let x = log_branch(&g, lambda).unwrap();
        prop_assert!(max_abs(&(exp_skew(&x).into_matrix() - g.matrix())) < 1e-9);
        let top = lambda.arg();
        let h = x.matrix() * c(0.0, -1.0);
        let eig = nalgebra::linalg::SymmetricEigen::new(h.clone());
        for p in eig.eigenvalues.iter() {
            prop_assert!(*p > top - TAU - 1e-9 && *p < top + 1e-9, "{} outside arc below {}", p, top);
        }
    }

    #[test]
    fn fractional_spectrum_is_conjugation_invariant(a: u64, b: u64) {
        let g = random_su2(&mut rng(a));
        let v = random_unitary(2, &mut rng(b));
        let mut s0 = HolonomyPoint::new(g.clone()).fractional_spectrum().0;
        let mut s1 = HolonomyPoint::new(g.conjugate_by(&v)).fractional_spectrum().0;
        s0.sort_by(f64::total_cmp);
        s1.sort_by(f64::total_cmp);
        for (x, y) in s0.iter().zip(&s1) {
            prop_assert!(distance_to_integer(x - y) < 1e-10);
        }
    }

    #[test]
    fn car_relations_hold_on_random_states(seed: u64, d in 1usize..6) {
        let fock = FockSpace::new(d).unwrap();
        let mut r = rng(seed);
        let draw = |r: &mut ChaCha8Rng| {
            CVec::from_fn(d, |_, _| c(rand::Rng::random_range(r, -1.0..1.0), rand::Rng::random_range(r, -1.0..1.0)))
        };
        let (u, v) = (draw(&mut r), draw(&mut r));
        let x = fock.random_state(seed);
        let lhs: Vec<C64> = fock.a_star(&u, &fock.a(&v, &x)).iter()
            .zip(fock.a(&v, &fock.a_star(&u, &x)))
            .map(|(p, q)| p + q)
            .collect();
        let scale = v.dotc(&u) * 2.0;
        let worst = lhs.iter().zip(&x).map(|(l, xi)| (l - scale * xi).norm()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-12);
        let aa = fock.a_star(&u, &fock.a_star(&u, &x));
        prop_assert!(aa.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn trace_cocycle_is_antisymmetric(seed: u64, cutoff in 1usize..6) {
        let mut r = rng(seed);
        let (x, y) = (random_loop(2, 2, &mut r), random_loop(2, 2, &mut r));
        let xy = cocycle_trace_loops(&x, &y, cutoff).unwrap();
        let yx = cocycle_trace_loops(&y, &x, cutoff).unwrap();
        prop_assert!((xy + yx).norm() < 1e-12 * xy.norm().max(1.0));
    }

    #[test]
    fn spectral_flow_counts_net_crossings(start in -2.0f64..2.0, end in -2.0f64..2.0, mu in 0.05f64..0.95) {
        let off = |s: f64| ((s - mu) - (s - mu).round()).abs();
        prop_assume!(off(start) > 1e-6 && off(end) > 1e-6);
        let steps = 400;
        let path: Vec<HolonomyPoint> = (0..=steps)
            .map(|i| {
                let s = start + (end - start) * i as f64 / steps as f64;
                HolonomyPoint::new(UnitaryMatrix::diagonal(&[C64::from_polar(1.0, TAU * s)]).unwrap())
            })
            .collect();
        let expected = (end - mu).floor() as i64 - (start - mu).floor() as i64;
        prop_assert_eq!(spectral_flow(&path, mu).unwrap(), expected);
        let reversed: Vec<_> = path.into_iter().rev().collect();
        prop_assert_eq!(spectral_flow(&reversed, mu).unwrap(), -expected);
    }

    #[test]
    fn distance_to_integer_is_periodic_and_bounded(x in -1e6f64..1e6, k in -1000i64..1000) {
        let d = distance_to_integer(x);
        prop_assert!((0.0..=0.5).contains(&d));
        prop_assert!((distance_to_integer(x + k as f64) - d).abs() < 1e-6);
    }
}
