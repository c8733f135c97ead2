use std::fmt::Write as _;

use super::{level_gap, HolonomyPoint, GAP_TOL};
use crate::error::{Error, Result};

/// Largest eigenvalue displacement allowed between consecutive samples.
pub const MAX_STEP: f64 = 0.25;

/// Lifted eigenvalue tracks along a sampled path.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTracks {
    pub level: f64,
    pub flow: i64,
    /// `tracks[s]` holds the `N` lifted eigenvalues at sample `s`, ascending.
    pub tracks: Vec<Vec<f64>>,
}

impl FlowTracks {
    pub fn to_csv(&self) -> String {
        let n = self.tracks.first().map_or(0, |t| t.len());
        let mut out = String::from("step");
        for k in 0..n {
            let _ = write!(out, ",track_{k}");
        }
        out.push('\n');
        for (s, row) in self.tracks.iter().enumerate() {
            let _ = write!(out, "{s}");
            for v in row {
                let _ = write!(out, ",{v:.15e}");
            }
            out.push('\n');
        }
        out
    }
}

fn sorted_fractional(p: &HolonomyPoint) -> Vec<f64> {
    let (mut y, _) = p.fractional_spectrum();
    y.sort_by(f64::total_cmp);
    y
}

/// Best block of `N` consecutive elements of `Z + y` matched in order to
/// `prev`, with its largest displacement.
fn match_block(prev: &[f64], y: &[f64]) -> (Vec<f64>, f64) {
    let n = y.len() as i64;
    let value = |t: i64| t.div_euclid(n) as f64 + y[t.rem_euclid(n) as usize];
    let base = prev[0].floor() as i64 * n;
    let mut best: Option<(Vec<f64>, f64)> = None;
    for t0 in base - 2 * n..=base + 2 * n {
        let block: Vec<f64> = (0..n).map(|i| value(t0 + i)).collect();
        let disp = block
            .iter()
            .zip(prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if best.as_ref().is_none_or(|b| disp < b.1) {
            best = Some((block, disp));
        }
    }
    best.expect("non-empty search")
}

/// Spectral flow through `mu` with the lifted tracks.
pub fn spectral_flow_tracks(path: &[HolonomyPoint], mu: f64) -> Result<FlowTracks> {
    let first = path
        .first()
        .ok_or_else(|| Error::Contract("empty path".into()))?;
    let n = first.dim();
    if path.iter().any(|p| p.dim() != n) {
        return Err(Error::Contract(
            "path points have different dimensions".into(),
        ));
    }
    for end in [first, path.last().expect("non-empty")] {
        let (y, _) = end.fractional_spectrum();
        if level_gap(&y, mu) <= GAP_TOL {
            return Err(Error::Precondition(format!(
                "level {mu} is in the spectrum at a path endpoint"
            )));
        }
    }
    let mut current = sorted_fractional(first);
    let mut tracks = vec![current.clone()];
    for (index, point) in path.iter().enumerate().skip(1) {
        let (next, disp) = match_block(&current, &sorted_fractional(point));
        if disp > MAX_STEP {
            return Err(Error::Resolution { index, step: disp });
        }
        current = next;
        tracks.push(current.clone());
    }
    let count = |v: &[f64]| v.iter().map(|x| (x - mu).floor() as i64).sum::<i64>();
    let flow = count(tracks.last().expect("non-empty")) - count(&tracks[0]);
    Ok(FlowTracks {
        level: mu,
        flow,
        tracks,
    })
}

/// Net number of eigenvalues crossing `mu` upwards along the path.
pub fn spectral_flow(path: &[HolonomyPoint], mu: f64) -> Result<i64> {
    spectral_flow_tracks(path, mu).map(|t| t.flow)
}
