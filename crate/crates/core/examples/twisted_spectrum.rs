//! Eigenvalues of `-i d/dx` on `[0, 2π]` twisted by a random `SU(2)` holonomy,
//! from the lattice solver and from the eigenphases of the holonomy.

use gerbelab::dirac::{lattice_eigenvalues_near, HolonomyPoint, LatticeOptions};
use gerbelab::lie::random_su2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gerbelab::Result<()> {
    let g = random_su2(&mut ChaCha8Rng::seed_from_u64(3));
    let (fractional, _) = HolonomyPoint::new(g.clone()).fractional_spectrum();
    println!("fractional parts: {fractional:.6?}");
    let mut lattice = lattice_eigenvalues_near(&g, 0.0, 6, LatticeOptions::default())?;
    lattice.sort_by(f64::total_cmp);
    for x in lattice {
        let nearest = fractional
            .iter()
            .map(|s| s + (x - s).round())
            .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
            .unwrap();
        println!(
            "{x:+.8}  closed form {nearest:+.8}  diff {:.1e}",
            (x - nearest).abs()
        );
    }
    Ok(())
}
