//! Spectral flow of the charge-2 loop `t ↦ e^{4πit}` through the level 0.5,
//! with the eigenvalue tracks written as CSV.

use std::f64::consts::TAU;

use gerbelab::dirac::{spectral_flow_tracks, HolonomyPoint};
use gerbelab::lie::{UnitaryMatrix, C64};

fn main() -> gerbelab::Result<()> {
    let steps = 100;
    let path = (0..=steps)
        .map(|i| {
            let t = i as f64 / steps as f64;
            Ok(HolonomyPoint::new(UnitaryMatrix::diagonal(&[
                C64::from_polar(1.0, 2.0 * TAU * t),
            ])?))
        })
        .collect::<gerbelab::Result<Vec<_>>>()?;
    let tracks = spectral_flow_tracks(&path, 0.5)?;
    println!("flow through {}: {}", tracks.level, tracks.flow);
    let csv = tracks.to_csv();
    for line in csv.lines().step_by(25) {
        println!("{line}");
    }
    Ok(())
}
