//! Zero-height and near-optimal watchtowers on 2.5D imprecise meshes.
//!
//! The tower always stands on a vertex lifted to the top of its interval.
//! Starting from the highest realization, the greedy lowers vertices that
//! hide parts of the terrain, each at most once and straight to the bottom
//! of its interval.

use std::cmp::Ordering;

use thiserror::Error;

use crate::geom::Scalar;
use crate::mesh::{ImpreciseMesh2_5D, Realization2_5D, Viewpoint2_5D};
use crate::sight::{
    blockers_of_segment, edge_fully_visible, occlusions, sees_all_from, segment_above_terrain, SightError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WatchtowerError {
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error(transparent)]
    Sight(#[from] SightError),
}

/// How the approximation scans tower heights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeightScan {
    /// `ε, 2ε, 3ε, …` until some vertex succeeds.
    #[default]
    Linear,
    /// Bisection over multiples of `ε`; assumes success is monotone in the height.
    Bisect,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerSolution2_5D {
    pub viewpoint: Viewpoint2_5D,
    pub realization: Realization2_5D,
}

impl TowerSolution2_5D {
    pub fn height(&self) -> &Scalar {
        &self.viewpoint.tower_height
    }
}

fn lower(mesh: &ImpreciseMesh2_5D, r: &mut Realization2_5D, base: usize, w: usize) -> bool {
    let low = &mesh.vertex(w).low;
    if w == base || r.z[w] == *low {
        return false;
    }
    r.z[w] = low.clone();
    true
}

/// Case 1: drop everything hiding the farthest hidden vertex whose blockers
/// can still move.
fn lower_vertex_blockers(
    mesh: &ImpreciseMesh2_5D,
    r: &mut Realization2_5D,
    viewpoint: &Viewpoint2_5D,
) -> Result<bool, SightError> {
    let base = viewpoint.base_vertex;
    let v = viewpoint.point(mesh);
    let mut hidden = Vec::new();
    for k in (0..mesh.len()).filter(|&k| k != base) {
        let p = r.point(mesh, k);
        if !segment_above_terrain(&v, &p, mesh, r)? {
            hidden.push((v.squared_distance(&p), k));
        }
    }
    hidden.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, k) in hidden {
        let p = r.point(mesh, k);
        let (edges, vertices) = blockers_of_segment(&v, &p, mesh, r);
        let mut changed = false;
        for e in edges {
            let edge = &mesh.edges()[e];
            changed |= lower(mesh, r, base, edge.a);
            changed |= lower(mesh, r, base, edge.b);
        }
        for w in vertices {
            changed |= lower(mesh, r, base, w);
        }
        if changed {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Case 2: for the first partly hidden edge, drop the apex of an adjacent
/// face, preferring an apex that is also an endpoint of a blocker.
fn lower_face_apex(
    mesh: &ImpreciseMesh2_5D,
    r: &mut Realization2_5D,
    viewpoint: &Viewpoint2_5D,
) -> Result<bool, SightError> {
    let base = viewpoint.base_vertex;
    let v = viewpoint.point(mesh);
    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge_fully_visible(&v, e, mesh, r)? {
            continue;
        }
        let blockers = occlusions(&v, e, mesh, r)?;
        let mut apexes: Vec<usize> = edge.faces.iter().map(|&f| mesh.apex(f, edge)).collect();
        apexes.sort_by_key(|&w| {
            let blocks = blockers.iter().any(|b| mesh.edges()[b.blocker].touches(w));
            (!blocks, w)
        });
        for w in apexes {
            if lower(mesh, r, base, w) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// A realization entirely visible from `viewpoint`, found by lowering
/// blockers of the all-tops realization, or `None` when lowering stalls.
pub fn greedy_guard_from(
    viewpoint: &Viewpoint2_5D,
    mesh: &ImpreciseMesh2_5D,
) -> Result<Option<Realization2_5D>, SightError> {
    let mut r = mesh.tops();
    let v = viewpoint.point(mesh);
    loop {
        if sees_all_from(&v, mesh, &r)? {
            return Ok(Some(r));
        }
        if lower_vertex_blockers(mesh, &mut r, viewpoint)? {
            continue;
        }
        if !lower_face_apex(mesh, &mut r, viewpoint)? {
            return Ok(None);
        }
    }
}

/// The first vertex (by index) from which some realization is seen whole
/// with no tower at all.
pub fn zero_watchtower(mesh: &ImpreciseMesh2_5D) -> Result<Option<TowerSolution2_5D>, SightError> {
    first_guard(mesh, &Scalar::from_integer(0.into()))
}

fn first_guard(mesh: &ImpreciseMesh2_5D, height: &Scalar) -> Result<Option<TowerSolution2_5D>, SightError> {
    for base in 0..mesh.len() {
        let viewpoint = Viewpoint2_5D::new(base, height.clone());
        if let Some(realization) = greedy_guard_from(&viewpoint, mesh)? {
            return Ok(Some(TowerSolution2_5D {
                viewpoint,
                realization,
            }));
        }
    }
    Ok(None)
}

/// All bottoms except `base`, which sits at its top.
pub fn bottoms_with_base(mesh: &ImpreciseMesh2_5D, base: usize) -> Realization2_5D {
    let mut r = mesh.bottoms();
    r.z[base] = mesh.vertex(base).high.clone();
    r
}

/// Smallest `ε·2^j` at which some vertex sees the whole all-bottoms
/// realization, with the first such vertex.
pub fn height_cap(mesh: &ImpreciseMesh2_5D, epsilon: &Scalar) -> Result<(Scalar, usize), WatchtowerError> {
    if *epsilon <= Scalar::from_integer(0.into()) {
        return Err(WatchtowerError::NonPositiveEpsilon);
    }
    let mut cap = epsilon.clone();
    loop {
        for base in 0..mesh.len() {
            let r = bottoms_with_base(mesh, base);
            let v = Viewpoint2_5D::new(base, cap.clone()).point(mesh);
            if sees_all_from(&v, mesh, &r)? {
                return Ok((cap, base));
            }
        }
        cap = &cap * Scalar::from_integer(2.into());
    }
}

/// Tower height a multiple of `ε`: zero when possible, otherwise the first
/// multiple at which the greedy succeeds from some vertex. If no multiple up
/// to the cap succeeds, the cap itself over the all-bottoms realization.
pub fn approx_watchtower(mesh: &ImpreciseMesh2_5D, epsilon: &Scalar) -> Result<TowerSolution2_5D, WatchtowerError> {
    approx_watchtower_with(mesh, epsilon, HeightScan::Linear)
}

pub fn approx_watchtower_with(
    mesh: &ImpreciseMesh2_5D,
    epsilon: &Scalar,
    scan: HeightScan,
) -> Result<TowerSolution2_5D, WatchtowerError> {
    if *epsilon <= Scalar::from_integer(0.into()) {
        return Err(WatchtowerError::NonPositiveEpsilon);
    }
    if let Some(found) = zero_watchtower(mesh)? {
        return Ok(found);
    }
    let (cap, cap_base) = height_cap(mesh, epsilon)?;
    let steps = (&cap / epsilon).to_integer();
    let at = |k: &num_bigint::BigInt| -> Result<Option<TowerSolution2_5D>, SightError> {
        first_guard(mesh, &(epsilon * Scalar::from_integer(k.clone())))
    };

    let found = match scan {
        HeightScan::Linear => {
            let mut k = num_bigint::BigInt::from(1);
            let mut found = None;
            while k <= steps {
                if let Some(s) = at(&k)? {
                    found = Some(s);
                    break;
                }
                k += 1;
            }
            found
        }
        HeightScan::Bisect => {
            let (mut lo, mut hi) = (num_bigint::BigInt::from(1), steps.clone());
            let mut found = None;
            while lo <= hi {
                let mid: num_bigint::BigInt = (&lo + &hi) / 2;
                match at(&mid)? {
                    Some(s) => {
                        found = Some(s);
                        hi = mid - 1;
                    }
                    None => lo = mid + 1,
                }
            }
            found
        }
    };
    Ok(found.unwrap_or_else(|| TowerSolution2_5D {
        viewpoint: Viewpoint2_5D::new(cap_base, cap),
        realization: bottoms_with_base(mesh, cap_base),
    }))
}

/// Exact re-check of a 2.5D certificate.
pub fn validate_certificate_2_5d(
    mesh: &ImpreciseMesh2_5D,
    solution: &TowerSolution2_5D,
) -> Result<bool, SightError> {
    let base = solution.viewpoint.base_vertex;
    if base >= mesh.len()
        || solution.realization.respects(mesh).is_err()
        || solution.realization.z[base] != mesh.vertex(base).high
        || solution.viewpoint.tower_height.cmp(&Scalar::from_integer(0.into())) == Ordering::Less
    {
        return Ok(false);
    }
    sees_all_from(&solution.viewpoint.point(mesh), mesh, &solution.realization)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{frac, int};
    use crate::mesh::UncertainVertex2_5D;

    fn mesh(raw: &[(i64, i64, i64, i64)], triangles: Vec<[usize; 3]>) -> ImpreciseMesh2_5D {
        let vertices = raw
            .iter()
            .map(|&(x, y, lo, hi)| UncertainVertex2_5D::new(int(x), int(y), int(lo), int(hi)))
            .collect();
        ImpreciseMesh2_5D::new(vertices, triangles).unwrap()
    }

    #[test]
    fn apex_lowering_can_lose_the_guard() {
        // Edge 1-2 starts hidden; its only face has apex 4, and dropping it
        // is irreversible. Dropping vertex 5 alone would have worked.
        let m = mesh(
            &[(10, 1, 6, 6), (10, 9, 4, 6), (0, 6, 9, 11), (9, 2, 9, 9), (3, 4, 12, 13), (9, 7, 9, 11)],
            vec![[0, 1, 5], [0, 3, 4], [0, 3, 5], [1, 2, 4], [1, 4, 5], [3, 4, 5]],
        );
        let viewpoint = Viewpoint2_5D::new(3, int(8));
        assert_eq!(greedy_guard_from(&viewpoint, &m).unwrap(), None);
        let mut r = m.tops();
        r.z[5] = int(9);
        assert!(sees_all_from(&viewpoint.point(&m), &m, &r).unwrap());
    }

    #[test]
    fn single_triangle_always_guarded() {
        let m = mesh(&[(0, 0, 0, 5), (3, 0, -2, 1), (0, 3, 4, 9)], vec![[0, 1, 2]]);
        let s = zero_watchtower(&m).unwrap().unwrap();
        assert_eq!(s.viewpoint.base_vertex, 0);
        assert_eq!(s.realization, m.tops());
        assert!(validate_certificate_2_5d(&m, &s).unwrap());
    }

    #[test]
    fn ridge_is_dropped() {
        // Square with the ridge diagonal 1-3 that can sink to 0.
        let m = mesh(
            &[(0, 0, 0, 0), (2, 0, 0, 3), (2, 2, 0, 0), (0, 2, 0, 3)],
            vec![[0, 1, 3], [1, 2, 3]],
        );
        let s = zero_watchtower(&m).unwrap().unwrap();
        assert_eq!(s.viewpoint.base_vertex, 0);
        assert_eq!(s.realization.z, vec![int(0), int(0), int(0), int(0)]);
        assert!(validate_certificate_2_5d(&m, &s).unwrap());
    }

    #[test]
    fn fixed_ridge_needs_a_tower() {
        // Flat corners at 0, ridge 1-3 stuck at 2: corner 0 needs height 4.
        let m = mesh(
            &[(0, 0, 0, 0), (2, 0, 2, 2), (2, 2, 0, 0), (0, 2, 2, 2)],
            vec![[0, 1, 3], [1, 2, 3]],
        );
        // The ridge vertices themselves see both faces.
        let s = zero_watchtower(&m).unwrap().unwrap();
        assert_eq!(s.viewpoint.base_vertex, 1);
        let approx = approx_watchtower(&m, &frac(1, 2)).unwrap();
        assert_eq!(approx.height(), &int(0));
        assert_eq!(
            height_cap(&m, &int(0)),
            Err(WatchtowerError::NonPositiveEpsilon)
        );
    }

    #[test]
    fn raised_viewpoint_sees_more() {
        let m = mesh(
            &[(0, 0, 0, 0), (2, 0, 2, 2), (2, 2, 0, 0), (0, 2, 2, 2)],
            vec![[0, 1, 3], [1, 2, 3]],
        );
        assert_eq!(greedy_guard_from(&Viewpoint2_5D::new(0, int(3)), &m).unwrap(), None);
        assert!(greedy_guard_from(&Viewpoint2_5D::new(0, int(4)), &m).unwrap().is_some());
        let (cap, base) = height_cap(&m, &int(1)).unwrap();
        assert_eq!((cap, base), (int(1), 1));
    }
}
