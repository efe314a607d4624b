//! Exhaustive enumeration over discretized interval heights.
//!
//! Every grid realization is a genuine realization, so each value reported
//! here is attained and bounds the true optimum from above. Nothing in this
//! module is used by the solvers.

use thiserror::Error;

use num_bigint::BigInt;

use crate::geom::Scalar;
use crate::mesh::{ImpreciseMesh2_5D, Realization2_5D};
use crate::sight::{sees_all_from, SightError};
use crate::terrain::{ImpreciseTerrain1D, Realization1D};
use crate::visibility::{fixed_terrain_watchtower, visibility_region};
use crate::watchtower25d::{height_cap, WatchtowerError};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("grid needs at least 2 samples per interval, got {0}")]
    GridTooCoarse(usize),
    #[error("enumeration needs {needed} realizations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error(transparent)]
    Sight(#[from] SightError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode1D {
    Discrete,
    Continuous,
}

/// `m` evenly spaced samples per interval, both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub samples_per_interval: usize,
    pub budget: u64,
}

impl GridSpec {
    pub fn new(samples_per_interval: usize) -> Result<Self, OracleError> {
        if samples_per_interval < 2 {
            return Err(OracleError::GridTooCoarse(samples_per_interval));
        }
        Ok(Self {
            samples_per_interval,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Distinct sample heights of `[low, high]`, ascending.
    pub fn samples(&self, low: &Scalar, high: &Scalar) -> Vec<Scalar> {
        if low == high {
            return vec![low.clone()];
        }
        let steps = (self.samples_per_interval - 1) as i64;
        (0..=steps)
            .map(|j| low + (high - low) * Scalar::new(j.into(), steps.into()))
            .collect()
    }
}

/// Calls `visit` on every combination of one value per list, last index
/// fastest, until it returns `true`.
pub(crate) fn enumerate<F>(lists: &[Vec<Scalar>], budget: u64, mut visit: F) -> Result<(), OracleError>
where
    F: FnMut(&[Scalar]) -> bool,
{
    let needed = lists
        .iter()
        .try_fold(1u128, |acc, l| acc.checked_mul(l.len() as u128))
        .unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(OracleError::BudgetExceeded { needed, budget });
    }
    let mut idx = vec![0usize; lists.len()];
    let mut current: Vec<Scalar> = lists.iter().map(|l| l[0].clone()).collect();
    loop {
        if visit(&current) {
            return Ok(());
        }
        let mut k = lists.len();
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < lists[k].len() {
                current[k] = lists[k][idx[k]].clone();
                break;
            }
            idx[k] = 0;
            current[k] = lists[k][0].clone();
        }
    }
}

/// Smallest watchtower over all grid realizations.
pub fn oracle_1d(terrain: &ImpreciseTerrain1D, grid: &GridSpec, mode: Mode1D) -> Result<Scalar, OracleError> {
    let lists: Vec<Vec<Scalar>> = terrain
        .vertices()
        .iter()
        .map(|v| grid.samples(&v.low, &v.high))
        .collect();
    let zero = Scalar::from_integer(0.into());
    let mut best: Option<Scalar> = None;
    enumerate(&lists, grid.budget, |heights| {
        let realization = Realization1D::new(terrain, heights.to_vec()).expect("grid heights lie in their intervals");
        let polyline = realization.polyline();
        let value = match mode {
            Mode1D::Discrete => {
                let region = visibility_region(polyline).expect("valid polyline");
                polyline
                    .iter()
                    .map(|p| (region.boundary_at(&p.x) - &p.y).max(zero.clone()))
                    .min()
                    .expect("nonempty")
            }
            Mode1D::Continuous => fixed_terrain_watchtower(polyline).expect("valid polyline").height(),
        };
        if best.as_ref().is_none_or(|b| &value < b) {
            best = Some(value);
        }
        false
    })?;
    Ok(best.expect("at least one realization"))
}

fn mesh_lists(mesh: &ImpreciseMesh2_5D, grid: &GridSpec) -> Vec<Vec<Scalar>> {
    mesh.vertices()
        .iter()
        .map(|v| grid.samples(&v.low, &v.high))
        .collect()
}

/// Whether some grid realization is seen whole from one of its own vertices.
pub fn oracle_2_5d_zero(mesh: &ImpreciseMesh2_5D, grid: &GridSpec) -> Result<bool, OracleError> {
    let mut found = false;
    let mut failure = None;
    enumerate(&mesh_lists(mesh, grid), grid.budget, |z| {
        let r = Realization2_5D { z: z.to_vec() };
        for base in 0..mesh.len() {
            match sees_all_from(&r.point(mesh, base), mesh, &r) {
                Ok(true) => {
                    found = true;
                    return true;
                }
                Ok(false) => {}
                Err(e) => {
                    failure = Some(e);
                    return true;
                }
            }
        }
        false
    })?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(found),
    }
}

/// Smallest multiple of `ε` (up to the cap) at which some grid realization
/// is seen whole from above one of its own vertices.
pub fn oracle_2_5d_height(mesh: &ImpreciseMesh2_5D, grid: &GridSpec, epsilon: &Scalar) -> Result<Scalar, OracleError> {
    let (cap, _) = height_cap(mesh, epsilon).map_err(|e| match e {
        WatchtowerError::NonPositiveEpsilon => OracleError::NonPositiveEpsilon,
        WatchtowerError::Sight(s) => s.into(),
    })?;
    let steps = (&cap / epsilon).to_integer();
    let mut best: Option<BigInt> = None;
    let mut failure = None;
    enumerate(&mesh_lists(mesh, grid), grid.budget, |z| {
        let r = Realization2_5D { z: z.to_vec() };
        for base in 0..mesh.len() {
            let sees = |k: &BigInt| {
                let mut v = r.point(mesh, base);
                v.z += epsilon * Scalar::from_integer(k.clone());
                sees_all_from(&v, mesh, &r)
            };
            // Seeing everything is monotone in the height over a fixed realization.
            let (mut lo, mut hi) = (BigInt::from(0), steps.clone());
            match sees(&hi) {
                Ok(true) => {}
                Ok(false) => continue,
                Err(e) => {
                    failure = Some(e);
                    return true;
                }
            }
            while lo < hi {
                let mid: BigInt = (&lo + &hi) / 2;
                match sees(&mid) {
                    Ok(true) => hi = mid,
                    Ok(false) => lo = mid + 1,
                    Err(e) => {
                        failure = Some(e);
                        return true;
                    }
                }
            }
            if best.as_ref().is_none_or(|b| &lo < b) {
                best = Some(lo);
            }
        }
        false
    })?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(epsilon * Scalar::from_integer(best.unwrap_or(steps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{frac, int, Point2};
    use crate::terrain::UncertainVertex1D;

    #[test]
    fn samples_include_endpoints() {
        let g = GridSpec::new(3).unwrap();
        assert_eq!(g.samples(&int(0), &int(1)), vec![int(0), frac(1, 2), int(1)]);
        assert_eq!(g.samples(&int(2), &int(2)), vec![int(2)]);
        assert!(GridSpec::new(1).is_err());
    }

    #[test]
    fn enumerates_everything() {
        let lists = vec![vec![int(0), int(1)], vec![int(5)], vec![int(0), int(1), int(2)]];
        let mut seen = Vec::new();
        enumerate(&lists, 100, |v| {
            seen.push(v.to_vec());
            false
        })
        .unwrap();
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![int(0), int(5), int(1)]);
        assert!(matches!(
            enumerate(&lists, 5, |_| false),
            Err(OracleError::BudgetExceeded { needed: 6, .. })
        ));
    }

    #[test]
    fn m_instance() {
        let raw = [(0, int(0), int(0)), (1, int(1), int(1)), (2, int(0), frac(1, 2)), (3, int(1), int(1)), (4, int(0), int(0))];
        let t = ImpreciseTerrain1D::new(
            raw.into_iter()
                .map(|(x, lo, hi)| UncertainVertex1D::new(int(x), lo, hi))
                .collect(),
        )
        .unwrap();
        let g2 = GridSpec::new(2).unwrap();
        assert_eq!(oracle_1d(&t, &g2, Mode1D::Discrete).unwrap(), frac(3, 2));
        let g5 = GridSpec::new(5).unwrap();
        assert_eq!(oracle_1d(&t, &g5, Mode1D::Continuous).unwrap(), frac(3, 2));
    }

    #[test]
    fn precise_terrain_ignores_grid() {
        let pts: Vec<Point2> = [(0, 0), (1, 1), (2, 0), (3, 1), (4, 0)]
            .iter()
            .map(|&(x, y)| Point2::from_ints(x, y))
            .collect();
        let t = ImpreciseTerrain1D::precise(&pts).unwrap();
        for m in [2, 3, 7] {
            let g = GridSpec::new(m).unwrap();
            assert_eq!(oracle_1d(&t, &g, Mode1D::Continuous).unwrap(), int(2));
        }
    }
}
