//! The central term of the loop algebra two ways: the trace of truncated
//! multiplication operators and `(1/2πi) ∮ tr X dY`.

use gerbelab::carfock::{
    cocycle_loop, cocycle_trace_loops, jacobi_check, random_loop, LoopElement,
};
use gerbelab::lie::random_su;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gerbelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let a = random_su(2, &mut rng).into_matrix();
    let b = random_su(2, &mut rng).into_matrix();
    for (m, n) in [(1, -1), (2, -2), (3, -1)] {
        let loop_value = cocycle_loop(&a, &b, m, n)?;
        for cutoff in [1, 2, 4] {
            let trace = cocycle_trace_loops(
                &LoopElement::mode(m, a.clone()),
                &LoopElement::mode(n, b.clone()),
                cutoff,
            )?;
            println!("m={m:+} n={n:+} Λ={cutoff}: trace {trace:.6}  loop {loop_value:.6}");
        }
    }
    let (x, y, z) = (
        random_loop(2, 1, &mut rng),
        random_loop(2, 1, &mut rng),
        random_loop(2, 1, &mut rng),
    );
    for cutoff in [1, 4] {
        println!(
            "Jacobi residual at Λ={cutoff}: {:.2e}",
            jacobi_check(&x, &y, &z, cutoff)?
        );
    }
    Ok(())
}
