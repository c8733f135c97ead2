//! Off-diagonal Hilbert–Schmidt norms of a smooth loop and of a loop with
//! `1/m` Fourier decay.

use gerbelab::carfock::{hs_criterion, rough_loop, smooth_test_loop};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gerbelab::Result<()> {
    let max = 32;
    let smooth = smooth_test_loop(2, 2 * max, &mut ChaCha8Rng::seed_from_u64(4))?;
    for (name, g) in [("smooth", smooth), ("rough", rough_loop(2 * max + 1))] {
        let r = hs_criterion(&g, max)?;
        let picks: Vec<String> = [1, 4, 16, 32]
            .iter()
            .map(|&k| format!("Λ={k}: {:.4}", r.norms[k - 1]))
            .collect();
        println!(
            "{name:>6}: {}  slope {:.3}  divergent {}",
            picks.join("  "),
            r.log_slope,
            r.divergent
        );
    }
    Ok(())
}
