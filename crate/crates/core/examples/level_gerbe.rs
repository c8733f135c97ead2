//! The spectral-window gerbe on `SU(2)` for a five-level cover: the
//! quadruple-overlap defect and a few Bockstein integers.

use gerbelab::cechdeligne::{bockstein, check_cocycle, level_gerbe};
use gerbelab::dirac::CoverSpec;
use gerbelab::geometry::charts::su2_hyperspherical;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gerbelab::Result<()> {
    let spec = CoverSpec::equispaced(5, 0.3)?;
    let (cover, f) = level_gerbe(su2_hyperspherical(), &spec);
    let samples = cover.sample_overlaps(4, 50, &mut ChaCha8Rng::seed_from_u64(1))?;
    println!("patches: {}", cover.len());
    println!(
        "max |δf - 1| over {} samples: {:.2e}",
        samples.len(),
        check_cocycle(&f, &samples)?
    );
    for (t, u) in samples.iter().take(5) {
        let b = bockstein(&f, [t[0], t[1], t[2], t[3]], u)?;
        println!("tuple {t:?}: integer {} (raw {:+.3e})", b.integer, b.raw);
    }
    Ok(())
}
