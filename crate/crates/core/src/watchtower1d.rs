//! Optimistic shortest watchtower over a 1.5D imprecise terrain.
//!
//! Both solvers start from the taut string `π` from `t₁` to `tₙ` through the
//! corridor between interval bottoms and tops. The discrete solver only puts
//! the tower base at interval vertices; the continuous one also considers
//! bases inside edges, one candidate per vertex of `π`'s visibility region.

use std::fmt;

use thiserror::Error;

use crate::channel::{taut_path, FunnelSweep, TautPath};
use crate::geom::{interpolate, Point2, Scalar};
use crate::terrain::{
    polygon_q, ChannelError, ImpreciseTerrain1D, Realization1D, TerrainError, Tower1D,
};
use crate::visibility::{visibility_region, watchtower_in_region, UpperRegion, VisibilityError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateKind {
    /// Base at interval vertex `i` raised to its top.
    DiscreteVertex(usize),
    /// Base inside an edge, below this vertex of the visibility region.
    ApexCandidate(Point2),
    /// Classical watchtower of the `π` realization.
    BaselinePi,
}

impl fmt::Display for CandidateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateKind::DiscreteVertex(i) => write!(f, "discrete vertex {i}"),
            CandidateKind::ApexCandidate(p) => write!(f, "apex {p}"),
            CandidateKind::BaselinePi => f.write_str("baseline"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution1D {
    pub height: Scalar,
    pub realization: Realization1D,
    pub tower: Tower1D,
    pub candidate_kind: CandidateKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateViolation {
    #[error("realization does not respect the terrain: {0}")]
    Realization(TerrainError),
    #[error("tower is not vertical")]
    TowerNotVertical,
    #[error("tower base is not on the realized terrain")]
    BaseOffTerrain,
    #[error("tower top does not see the whole terrain")]
    TopNotGuarding,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Terrain(#[from] TerrainError),
    #[error(transparent)]
    Visibility(#[from] VisibilityError),
    #[error("internal error: {kind} candidate failed verification: {violation}")]
    CertificateFailure {
        kind: CandidateKind,
        violation: CertificateViolation,
    },
}

/// Whether segment `ab` stays on or above the polyline.
pub fn sees(a: &Point2, b: &Point2, polyline: &[Point2]) -> Result<bool, TerrainError> {
    let (lo, hi) = if a.x <= b.x { (a, b) } else { (b, a) };
    let ground_lo = crate::terrain::polyline_height_at(polyline, &lo.x)?;
    let ground_hi = crate::terrain::polyline_height_at(polyline, &hi.x)?;
    if lo.x == hi.x {
        return Ok(lo.y.clone().min(hi.y.clone()) >= ground_lo);
    }
    if lo.y < ground_lo || hi.y < ground_hi {
        return Ok(false);
    }
    let start = polyline.partition_point(|p| p.x <= lo.x);
    Ok(polyline[start..]
        .iter()
        .take_while(|p| p.x < hi.x)
        .all(|p| interpolate(lo, hi, &p.x) >= p.y))
}

/// Both end vertices moved to the tops of their intervals.
pub fn raise_wings(terrain: &ImpreciseTerrain1D, realization: &Realization1D) -> Realization1D {
    let last = terrain.len() - 1;
    realization
        .with_height(0, terrain.vertex(0).high.clone())
        .with_height(last, terrain.vertex(last).high.clone())
}

/// For a tower based at vertex `i`, lifts that vertex to the top of its
/// interval and shortens the tower to keep the same top. `None` when the
/// tower is not based at vertex `i` or its top is below the interval top.
pub fn raise_base(
    terrain: &ImpreciseTerrain1D,
    realization: &Realization1D,
    tower: &Tower1D,
    i: usize,
) -> Option<(Realization1D, Tower1D)> {
    let vertex = terrain.vertices().get(i)?;
    if tower.base != realization.polyline()[i] || tower.top.y < vertex.high {
        return None;
    }
    let base = vertex.top();
    Some((
        realization.with_height(i, base.y.clone()),
        Tower1D::new(base, tower.top.clone()),
    ))
}

/// Taut string from the first to the last interval top through `Q`.
pub fn compute_pi(terrain: &ImpreciseTerrain1D) -> Result<TautPath, ChannelError> {
    let q = polygon_q(terrain);
    let last = terrain.len() - 1;
    taut_path(&q, &terrain.vertex(0).top(), &terrain.vertex(last).top())
}

/// Heights of an x-monotone path at the given nondecreasing abscissas.
fn heights_along<'a>(path: &[Point2], xs: impl IntoIterator<Item = &'a Scalar>) -> Vec<Scalar> {
    let mut seg = 0;
    xs.into_iter()
        .map(|x| {
            while seg + 1 < path.len() && &path[seg + 1].x < x {
                seg += 1;
            }
            if seg + 1 == path.len() || &path[seg].x == x {
                path[seg].y.clone()
            } else if &path[seg + 1].x == x {
                path[seg + 1].y.clone()
            } else {
                interpolate(&path[seg], &path[seg + 1], x)
            }
        })
        .collect()
}

fn realization_along(terrain: &ImpreciseTerrain1D, path: &[Point2]) -> Result<Realization1D, TerrainError> {
    let heights = heights_along(path, terrain.vertices().iter().map(|v| &v.x));
    Realization1D::new(terrain, heights)
}

/// Checks `tower` against `realization`; `Err` names the first violated condition.
pub fn validate_certificate(
    terrain: &ImpreciseTerrain1D,
    realization: &Realization1D,
    tower: &Tower1D,
) -> Result<(), CertificateViolation> {
    realization
        .respects(terrain)
        .map_err(CertificateViolation::Realization)?;
    if !tower.is_vertical() {
        return Err(CertificateViolation::TowerNotVertical);
    }
    match realization.height_at(&tower.base.x) {
        Ok(y) if y == tower.base.y => {}
        _ => return Err(CertificateViolation::BaseOffTerrain),
    }
    let region = visibility_region(realization.polyline())
        .map_err(|_| CertificateViolation::TopNotGuarding)?;
    if !region.contains(&tower.top) {
        return Err(CertificateViolation::TopNotGuarding);
    }
    Ok(())
}

fn certified(terrain: &ImpreciseTerrain1D, solution: Solution1D) -> Result<Solution1D, SolveError> {
    match validate_certificate(terrain, &solution.realization, &solution.tower) {
        Ok(()) => Ok(solution),
        Err(violation) => Err(SolveError::CertificateFailure {
            kind: solution.candidate_kind,
            violation,
        }),
    }
}

struct PiContext {
    realization: Realization1D,
    region: UpperRegion,
}

fn pi_context(terrain: &ImpreciseTerrain1D) -> Result<PiContext, SolveError> {
    let pi = compute_pi(terrain)?;
    let realization = realization_along(terrain, pi.points())?;
    let region = visibility_region(realization.polyline())?;
    Ok(PiContext {
        realization,
        region,
    })
}

fn best_discrete(terrain: &ImpreciseTerrain1D, ctx: &PiContext) -> Solution1D {
    let tops = ctx
        .region
        .boundary_at_sorted(terrain.vertices().iter().map(|v| &v.x));
    let zero = Scalar::from_integer(0.into());
    let (i, top_y) = tops
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            let ga = a - &terrain.vertex(*i).high;
            let gb = b - &terrain.vertex(*j).high;
            ga.max(zero.clone()).cmp(&gb.max(zero.clone())).then(i.cmp(j))
        })
        .expect("terrain has vertices");
    let base = terrain.vertex(i).top();
    let tower = if top_y > base.y {
        Tower1D::new(base.clone(), Point2::new(base.x.clone(), top_y))
    } else {
        Tower1D::zero(base.clone())
    };
    Solution1D {
        height: tower.height(),
        realization: ctx.realization.with_height(i, base.y),
        tower,
        candidate_kind: CandidateKind::DiscreteVertex(i),
    }
}

/// Tower base restricted to interval vertices.
pub fn solve_discrete_1d(terrain: &ImpreciseTerrain1D) -> Result<Solution1D, SolveError> {
    let ctx = pi_context(terrain)?;
    certified(terrain, best_discrete(terrain, &ctx))
}

struct ApexProbe {
    apex: Point2,
    strip: usize,
    left: Point2,
    right: Point2,
}

/// Crossing at `x` of the segment from `from` to `to`.
fn crossing(from: &Point2, to: &Point2, x: &Scalar) -> Point2 {
    if &from.x == x {
        from.clone()
    } else {
        Point2::new(x.clone(), interpolate(from, to, x))
    }
}

/// For every apex, the last edges of the shortest paths from `t₁` and to
/// `tₙ`, as their crossings with the strip's bounding verticals. Each apex is
/// queried against a funnel swept up to its strip, which is the shortest
/// path in `Q` extended by that apex's triangle alone.
fn probe_apexes(terrain: &ImpreciseTerrain1D, apexes: &[(Point2, usize)]) -> Result<Vec<ApexProbe>, ChannelError> {
    let q = polygon_q(terrain);
    let last = terrain.len() - 1;
    let mut lefts = Vec::with_capacity(apexes.len());
    let mut forward = FunnelSweep::new(&q, &terrain.vertex(0).top())?;
    for (p, k) in apexes {
        forward.advance_below(&p.x);
        let u = forward.node_point(forward.query(p));
        lefts.push(crossing(u, p, &terrain.vertex(*k).x));
    }

    let mirrored = q.mirrored();
    let mut backward = FunnelSweep::new(&mirrored, &terrain.vertex(last).top().mirrored())?;
    let mut rights = vec![None; apexes.len()];
    for (idx, (p, k)) in apexes.iter().enumerate().rev() {
        let pm = p.mirrored();
        backward.advance_below(&pm.x);
        let u = backward.node_point(backward.query(&pm)).mirrored();
        rights[idx] = Some(crossing(&u, p, &terrain.vertex(k + 1).x));
    }

    Ok(apexes
        .iter()
        .zip(lefts)
        .zip(rights)
        .map(|(((p, k), left), right)| ApexProbe {
            apex: p.clone(),
            strip: *k,
            left,
            right: right.expect("filled above"),
        })
        .collect())
}

fn apex_height(probe: &ApexProbe) -> Scalar {
    let ground = interpolate(&probe.left, &probe.right, &probe.apex.x);
    (&probe.apex.y - ground).max(Scalar::from_integer(0.into()))
}

fn apex_solution(terrain: &ImpreciseTerrain1D, probe: &ApexProbe) -> Result<Solution1D, SolveError> {
    let q = polygon_q(terrain);
    let last = terrain.len() - 1;
    let p = &probe.apex;
    let k = probe.strip;
    let xs: Vec<&Scalar> = terrain.vertices().iter().map(|v| &v.x).collect();

    let mut forward = FunnelSweep::new(&q, &terrain.vertex(0).top())?;
    forward.advance_below(&p.x);
    let rho1 = forward.path_through_query(p);
    let mut heights = heights_along(&rho1, xs[..=k].iter().copied());

    let mirrored = q.mirrored();
    let mut backward = FunnelSweep::new(&mirrored, &terrain.vertex(last).top().mirrored())?;
    backward.advance_below(&p.mirrored().x);
    let mut rho2: Vec<Point2> = backward
        .path_through_query(&p.mirrored())
        .iter()
        .map(Point2::mirrored)
        .collect();
    rho2.reverse();
    heights.extend(heights_along(&rho2, xs[k + 1..].iter().copied()));

    let realization = Realization1D::new(terrain, heights)?;
    let ground = interpolate(
        &realization.polyline()[k],
        &realization.polyline()[k + 1],
        &p.x,
    );
    let base = Point2::new(p.x.clone(), ground);
    let tower = if p.y > base.y {
        Tower1D::new(base, p.clone())
    } else {
        Tower1D::zero(base)
    };
    Ok(Solution1D {
        height: tower.height(),
        realization,
        tower,
        candidate_kind: CandidateKind::ApexCandidate(p.clone()),
    })
}

/// Tower base anywhere on the terrain.
pub fn solve_continuous_1d(terrain: &ImpreciseTerrain1D) -> Result<Solution1D, SolveError> {
    let ctx = pi_context(terrain)?;
    let discrete = best_discrete(terrain, &ctx);

    let apexes: Vec<(Point2, usize)> = ctx
        .region
        .vertices()
        .into_iter()
        .filter_map(|p| terrain.strip_of(&p.x).map(|k| (p, k)))
        .collect();
    let probes = probe_apexes(terrain, &apexes)?;
    let best_apex = probes
        .iter()
        .map(|probe| (apex_height(probe), probe))
        .min_by(|a, b| a.0.cmp(&b.0));

    let baseline = watchtower_in_region(&ctx.region, ctx.realization.polyline());
    let baseline_height = baseline.height();

    let mut best = discrete;
    if let Some((h, probe)) = best_apex {
        if h < best.height && h <= baseline_height {
            return certified(terrain, apex_solution(terrain, probe)?);
        }
    }
    if baseline_height < best.height {
        best = Solution1D {
            height: baseline_height,
            realization: ctx.realization,
            tower: baseline,
            candidate_kind: CandidateKind::BaselinePi,
        };
    }
    certified(terrain, best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{frac, int};
    use crate::terrain::UncertainVertex1D;

    fn pt(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    fn m_terrain() -> ImpreciseTerrain1D {
        let raw = [(0, int(0), int(0)), (1, int(1), int(1)), (2, int(0), frac(1, 2)), (3, int(1), int(1)), (4, int(0), int(0))];
        ImpreciseTerrain1D::new(
            raw.into_iter()
                .map(|(x, lo, hi)| UncertainVertex1D::new(int(x), lo, hi))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn sees_examples() {
        let v = [pt(0, 1), pt(1, 0), pt(2, 1)];
        assert!(sees(&pt(0, 2), &pt(2, 2), &v).unwrap());
        assert!(sees(&pt(0, 1), &pt(1, 0), &v).unwrap());
        let m = [pt(0, 0), pt(1, 1), pt(2, 0), pt(3, 1), pt(4, 0)];
        assert!(!sees(&pt(0, 0), &pt(4, 0), &m).unwrap());
        assert!(sees(&pt(1, 1), &pt(3, 1), &m).unwrap());
        assert!(sees(&pt(3, 1), &pt(1, 1), &m).unwrap());
        assert!(sees(&pt(5, 0), &pt(1, 1), &m).is_err());
    }

    #[test]
    fn m_instance_discrete() {
        let t = m_terrain();
        let pi = compute_pi(&t).unwrap();
        assert_eq!(pi.points(), &[pt(0, 0), pt(1, 1), Point2::new(int(2), frac(1, 2)), pt(3, 1), pt(4, 0)]);
        let s = solve_discrete_1d(&t).unwrap();
        assert_eq!(s.height, frac(3, 2));
        assert_eq!(s.candidate_kind, CandidateKind::DiscreteVertex(2));
        assert_eq!(s.tower.base, Point2::new(int(2), frac(1, 2)));
        assert_eq!(s.tower.top, pt(2, 2));
    }

    #[test]
    fn m_instance_continuous() {
        let t = m_terrain();
        let s = solve_continuous_1d(&t).unwrap();
        assert_eq!(s.height, frac(3, 2));
        assert_eq!(s.candidate_kind, CandidateKind::DiscreteVertex(2));
        assert!(validate_certificate(&t, &s.realization, &s.tower).is_ok());
    }

    #[test]
    fn precise_m_polyline() {
        let m = ImpreciseTerrain1D::precise(&[pt(0, 0), pt(1, 1), pt(2, 0), pt(3, 1), pt(4, 0)]).unwrap();
        assert_eq!(solve_continuous_1d(&m).unwrap().height, int(2));
        assert_eq!(solve_discrete_1d(&m).unwrap().height, int(2));
    }

    #[test]
    fn v_channel_is_forced() {
        let t = ImpreciseTerrain1D::precise(&[pt(0, 2), pt(1, 0), pt(2, 2)]).unwrap();
        assert_eq!(compute_pi(&t).unwrap().points(), &[pt(0, 2), pt(1, 0), pt(2, 2)]);
        assert_eq!(solve_discrete_1d(&t).unwrap().height, int(0));
    }

    #[test]
    fn common_line_gives_zero() {
        let t = ImpreciseTerrain1D::new(vec![
            UncertainVertex1D::new(int(0), int(-1), int(3)),
            UncertainVertex1D::new(int(1), int(1), int(5)),
            UncertainVertex1D::new(int(2), int(-4), int(1)),
            UncertainVertex1D::new(int(3), int(0), int(2)),
        ])
        .unwrap();
        let s = solve_continuous_1d(&t).unwrap();
        assert_eq!(s.height, int(0));
    }

    #[test]
    fn apex_inside_a_strip() {
        // Two steep peaks far apart: the best base is inside the middle edge.
        let t = ImpreciseTerrain1D::precise(&[pt(0, 0), pt(1, 10), pt(2, 0), pt(5, 0), pt(6, 10), pt(7, 0)]).unwrap();
        let s = solve_continuous_1d(&t).unwrap();
        let fixed = crate::visibility::fixed_terrain_watchtower(s.realization.polyline()).unwrap();
        assert_eq!(s.height, fixed.height());
        assert!(s.height < solve_discrete_1d(&t).unwrap().height);
    }

    #[test]
    fn certificate_rejections() {
        let t = m_terrain();
        let s = solve_discrete_1d(&t).unwrap();
        let low = Tower1D::new(s.tower.base.clone(), Point2::new(int(2), int(1)));
        assert_eq!(
            validate_certificate(&t, &s.realization, &low),
            Err(CertificateViolation::TopNotGuarding)
        );
        let floating = Tower1D::new(pt(2, 1), pt(2, 3));
        assert_eq!(
            validate_certificate(&t, &s.realization, &floating),
            Err(CertificateViolation::BaseOffTerrain)
        );
        let bad = t.top_realization().with_height(2, int(5));
        assert!(matches!(
            validate_certificate(&t, &bad, &s.tower),
            Err(CertificateViolation::Realization(_))
        ));
    }

    #[test]
    fn raise_operations() {
        let t = m_terrain();
        let r = Realization1D::new(&t, vec![int(0), int(1), int(0), int(1), int(0)]).unwrap();
        assert_eq!(raise_wings(&t, &r), r);
        let w = Tower1D::new(pt(2, 0), pt(2, 2));
        let (r2, w2) = raise_base(&t, &r, &w, 2).unwrap();
        assert_eq!(r2.height(2), &frac(1, 2));
        assert!(validate_certificate(&t, &r2, &w2).is_ok());
        assert!(raise_base(&t, &r, &w, 1).is_none());
    }

    /// The optimum here has its top on the first realized edge, which is
    /// not an edge of the taut path, and raising vertex 1 also raises the
    /// base. The candidate set does not contain it.
    #[test]
    fn continuous_candidates_miss_an_optimum() {
        let raw = [(0, frac(7, 2), frac(9, 2)), (2, frac(11, 2), int(6)), (5, frac(7, 2), frac(11, 2)), (6, frac(5, 2), frac(5, 2))];
        let t = ImpreciseTerrain1D::new(
            raw.into_iter()
                .map(|(x, lo, hi)| UncertainVertex1D::new(int(x), lo, hi))
                .collect(),
        )
        .unwrap();
        let found = solve_continuous_1d(&t).unwrap();
        assert_eq!(found.height, frac(1, 2));

        let r = Realization1D::new(&t, vec![frac(9, 2), int(6), frac(7, 2), frac(5, 2)]).unwrap();
        let top = Point2::new(frac(16, 7), frac(87, 14));
        let base = Point2::new(top.x.clone(), r.height_at(&top.x).unwrap());
        let better = Tower1D::new(base, top);
        assert!(validate_certificate(&t, &r, &better).is_ok());
        assert_eq!(better.height(), frac(19, 42));
    }
}
