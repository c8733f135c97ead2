//! The extension cocycle `γ` of the disk group and its associativity
//! defect for maps with and without boundary winding.

use gerbelab::extensions::{associativity_defect, gamma, random_disk_map};
use gerbelab::geometry::QuadratureSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gerbelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let q = QuadratureSpec::gauss(24);
    for winding in [0, 2] {
        let g: Vec<_> = (0..3)
            .map(|_| random_disk_map(2, 1.5, winding, &mut rng))
            .collect::<gerbelab::Result<_>>()?;
        println!(
            "winding {winding}: γ(g₀, g₁) = {:.8}",
            gamma(&g[0], &g[1], q)?
        );
        let d = associativity_defect(&g[0], &g[1], &g[2], q)?;
        println!(
            "  associativity defect {:+.3e} (imaginary part {:.1e})",
            d.defect, d.imaginary
        );
    }
    Ok(())
}
