//! Deligne relations for random gerbe data on four balls, and the
//! charge-k monopole line bundle on the sphere.

use gerbelab::cechdeligne::{demo_cover, demo_gerbe, monopole_demo, verify_deligne};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gerbelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let r = verify_deligne(&demo_gerbe(5), &demo_cover(), 100, &mut rng)?;
    println!("gerbe residuals: {r:?}");
    for k in [-2, 0, 3] {
        let report = monopole_demo(k).verify(100, &mut rng)?;
        println!(
            "k = {k:+}: equator integral {:+.10}, {:?}",
            report.equator_integral, report.residuals
        );
    }
    Ok(())
}
