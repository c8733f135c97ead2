//! Dirac vacuum of a rotated polarization and the Fock implementer of a
//! random one-particle unitary, up to its phase.

use gerbelab::carfock::{
    composition_phase, implement, vacuum, vacuum_residual, FockSpace, Polarization,
};
use gerbelab::lie::random_unitary;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gerbelab::Result<()> {
    let d = 4;
    let fock = FockSpace::new(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pol = Polarization::standard(d, 2).rotated(&random_unitary(d, &mut rng))?;
    let psi = vacuum(&pol, &fock)?;
    println!(
        "vacuum residual: {:.2e}",
        vacuum_residual(&pol, &fock, &psi)
    );

    let (g, h) = (random_unitary(d, &mut rng), random_unitary(d, &mut rng));
    let (ig, ih, igh) = (
        implement(&g, &fock)?,
        implement(&h, &fock)?,
        implement(&g.mul(&h), &fock)?,
    );
    println!(
        "intertwining residual {:.2e}, phase freedom {}",
        ig.residual, ig.phase_ambiguity
    );
    let z = composition_phase(&igh, &ig, &ih);
    println!("ĝh = z ĝ ĥ with z = {z:.6}, |z| = {:.12}", z.norm());
    Ok(())
}
