//! `(1/24π²) ∫ tr (g⁻¹dg)³` for the identity map of `SU(2)`, its inverse and
//! its square, at two quadrature resolutions.

use std::f64::consts::PI;

use gerbelab::geometry::charts::su2_hyperspherical;
use gerbelab::geometry::{integrate_form, FieldRef, FormWord, QuadratureSpec};

fn main() -> gerbelab::Result<()> {
    let g = su2_hyperspherical();
    let maps = [
        ("g", g.clone()),
        ("g⁻¹", g.pointwise_adjoint()),
        ("g²", g.pointwise_product(&g)?),
    ];
    for (name, chart) in &maps {
        for nodes in [12, 24] {
            let v = integrate_form(
                FormWord::MaurerCartan3,
                &[FieldRef::Map(chart)],
                QuadratureSpec::gauss(nodes),
            )?;
            println!(
                "{name:>3} at {nodes:>2} nodes/axis: {:+.12}",
                v.value.re / (24.0 * PI * PI)
            );
        }
    }
    Ok(())
}
