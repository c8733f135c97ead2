use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use rand::seq::IndexedRandom;
use rand::Rng;

use crate::dirac::{in_cover, CoverSpec, HolonomyPoint};
use crate::error::{Error, Result};
use crate::geometry::Chart;
use crate::lie::UnitaryMatrix;

pub type Membership = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

pub const DEFAULT_ATTEMPTS: usize = 200_000;

/// A finite open cover of a chart box, given by membership predicates.
#[derive(Clone)]
pub struct Cover {
    bounds: Vec<(f64, f64)>,
    patches: Vec<Membership>,
    max_attempts: usize,
}

impl fmt::Debug for Cover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cover")
            .field("bounds", &self.bounds)
            .field("patches", &self.patches.len())
            .finish()
    }
}

/// A sampled point together with the tuple of patches it was drawn for.
pub type TupleSample = (Vec<usize>, Vec<f64>);

impl Cover {
    pub fn new(bounds: Vec<(f64, f64)>) -> Self {
        Self {
            bounds,
            patches: Vec::new(),
            max_attempts: DEFAULT_ATTEMPTS,
        }
    }

    pub fn with_patch<F>(mut self, member: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        self.patches.push(Arc::new(member));
        self
    }

    pub fn with_max_attempts(mut self, attempts: usize) -> Self {
        self.max_attempts = attempts;
        self
    }

    /// Balls of a common radius around the given centres.
    pub fn balls(bounds: Vec<(f64, f64)>, centres: &[Vec<f64>], radius: f64) -> Self {
        centres.iter().fold(Self::new(bounds), |cover, centre| {
            let centre = centre.clone();
            cover.with_patch(move |u| {
                u.iter()
                    .zip(&centre)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    < radius * radius
            })
        })
    }

    /// The level cover `U_j = { μ_j ∉ Spec D_g(u) }` pulled back along a
    /// unitary-valued chart.
    pub fn from_levels(chart: Chart, levels: &CoverSpec) -> Self {
        let mut cover = Self::new(chart.bounds().to_vec());
        for j in 0..levels.len() {
            let (chart, levels) = (chart.clone(), levels.clone());
            cover = cover.with_patch(move |u| {
                let Ok(m) = chart.eval(u) else { return false };
                let Ok(g) = UnitaryMatrix::new(m) else {
                    return false;
                };
                in_cover(&HolonomyPoint::new(g), j, &levels).unwrap_or(false)
            });
        }
        cover
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn contains(&self, index: usize, u: &[f64]) -> bool {
        self.patches.get(index).is_some_and(|m| m(u))
    }

    pub fn members(&self, u: &[f64]) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.contains(i, u)).collect()
    }

    fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.bounds
            .iter()
            .map(|&(lo, hi)| rng.random_range(lo..hi))
            .collect()
    }

    /// A point of the overlap of the given patches, by rejection from
    /// uniform proposals on the box.
    pub fn sample<R: Rng + ?Sized>(&self, indices: &[usize], rng: &mut R) -> Result<Vec<f64>> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::Contract(format!("patch index {bad} out of range")));
        }
        for _ in 0..self.max_attempts {
            let u = self.propose(rng);
            if indices.iter().all(|&i| self.contains(i, &u)) {
                return Ok(u);
            }
        }
        Err(Error::Sampler {
            indices: indices.to_vec(),
            attempts: self.max_attempts,
        })
    }

    /// `count` points, each paired with an increasing tuple of `arity`
    /// patches containing it.
    pub fn sample_overlaps<R: Rng + ?Sized>(
        &self,
        arity: usize,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<TupleSample>> {
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count {
            attempts += 1;
            if attempts > self.max_attempts {
                return Err(Error::Sampler {
                    indices: (0..arity).collect(),
                    attempts: self.max_attempts,
                });
            }
            let u = self.propose(rng);
            let members = self.members(&u);
            if members.len() < arity {
                continue;
            }
            let tuples: Vec<Vec<usize>> = members.into_iter().combinations(arity).collect();
            let tuple = tuples.choose(rng).expect("non-empty").clone();
            out.push((tuple, u));
        }
        Ok(out)
    }
}
