//! The Mickelsson–Faddeev cocycle on `su(3)` gauge data over `S³` and its
//! cocycle identity at two resolutions.

use gerbelab::extensions::{mf_cocycle, mf_identity, random_gauge_data};
use gerbelab::geometry::QuadratureSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gerbelab::Result<()> {
    let data = random_gauge_data(3, &mut ChaCha8Rng::seed_from_u64(12))?;
    println!(
        "c(X, Y) = {:.8}",
        mf_cocycle(&data.a, &data.x, &data.y, QuadratureSpec::gauss(12))?
    );
    for nodes in [8, 16] {
        let r = mf_identity(&data, QuadratureSpec::gauss(nodes))?;
        println!(
            "{nodes:>2} nodes: residual {:.2e}, largest term {:.3}, relative {:.2e}",
            r.residual, r.largest_term, r.relative
        );
    }
    Ok(())
}
