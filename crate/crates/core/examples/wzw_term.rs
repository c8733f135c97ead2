//! The Wess–Zumino term of a sphere map for three ball extensions; the
//! values agree modulo integers.

use gerbelab::extensions::{random_sphere_map, wzw, BallExtension, Profile};
use gerbelab::geometry::QuadratureSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gerbelab::Result<()> {
    let sphere = random_sphere_map(2, 2.5, &mut ChaCha8Rng::seed_from_u64(6))?;
    let q = QuadratureSpec::gauss(20);
    for (name, ext) in [
        ("radial, linear", BallExtension::radial(Profile::Linear)),
        (
            "radial, smoothstep",
            BallExtension::radial(Profile::Smoothstep),
        ),
        ("bubble of degree 1", BallExtension::bubble(1)),
        ("bubble of degree -2", BallExtension::bubble(-2)),
    ] {
        println!("{name:>20}: C = {:+.8}", wzw(&sphere, &ext, q)?);
    }
    Ok(())
}
