use super::cochain::{CechCochain, CochainValue, CoefficientKind};
use super::cover::Cover;
use crate::dirac::{gerbe_cocycle, CoverSpec, HolonomyPoint};
use crate::error::Error;
use crate::geometry::Chart;
use crate::lie::UnitaryMatrix;

/// The spectral-window gerbe of a level cover, pulled back along a
/// unitary-valued chart: the cover `U_j` and the circle 2-cochain `f_{jkl}`.
pub fn level_gerbe(chart: Chart, levels: &CoverSpec) -> (Cover, CechCochain) {
    let cover = Cover::from_levels(chart.clone(), levels);
    let levels = levels.clone();
    let f = CechCochain::new(2, CoefficientKind::Circle, move |t, u| {
        let g = UnitaryMatrix::new(chart.eval(u)?).map_err(|e| Error::ChartEvaluation {
            point: u.to_vec(),
            reason: e.to_string(),
        })?;
        Ok(CochainValue::Circle(gerbe_cocycle(
            &HolonomyPoint::new(g),
            &levels,
            t[0],
            t[1],
            t[2],
        )?))
    });
    (cover, f)
}
