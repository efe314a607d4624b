//! Exact line-of-sight predicates over a realized 2.5D mesh.
//!
//! A sight segment is blocked when it passes strictly below the terrain
//! somewhere; grazing contact counts as visible. Terrain height along the
//! vertical plane of a segment is piecewise linear with breakpoints at edge
//! crossings, so every test reduces to finitely many exact comparisons.

use thiserror::Error;

use crate::geom::{cross, dot, Point2, Point3, Scalar};
use crate::mesh::{in_triangle, ImpreciseMesh2_5D, MeshEdge, Realization2_5D, Viewpoint2_5D};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SightError {
    #[error("point {0} is outside the triangulated domain")]
    OutsideDomain(String),
    #[error("viewpoint projects into the interior of blocker edge {0}")]
    DegenerateBlocker(usize),
}

/// The parameters `s` of target edge points `A + s(B - A)` hidden by one blocker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OcclusionInterval {
    pub lo: Scalar,
    pub hi: Scalar,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub blocker: usize,
}

impl OcclusionInterval {
    pub fn contains(&self, s: &Scalar) -> bool {
        let above_lo = if self.lo_closed { s >= &self.lo } else { s > &self.lo };
        let below_hi = if self.hi_closed { s <= &self.hi } else { s < &self.hi };
        above_lo && below_hi
    }
}

fn zero() -> Scalar {
    Scalar::from_integer(0.into())
}

fn flat(p: &Point3) -> Point2 {
    Point2::new(p.x.clone(), p.y.clone())
}

fn lerp(a: &Scalar, b: &Scalar, t: &Scalar) -> Scalar {
    a + (b - a) * t
}

fn lerp3(a: &Point3, b: &Point3, t: &Scalar) -> Point3 {
    Point3::new(lerp(&a.x, &b.x, t), lerp(&a.y, &b.y, t), lerp(&a.z, &b.z, t))
}

fn edge_points(mesh: &ImpreciseMesh2_5D, r: &Realization2_5D, e: &MeshEdge) -> (Point3, Point3) {
    (r.point(mesh, e.a), r.point(mesh, e.b))
}

/// Terrain height above `p`, if `p` lies in some triangle.
pub fn terrain_height_at(mesh: &ImpreciseMesh2_5D, r: &Realization2_5D, p: &Point2) -> Option<Scalar> {
    mesh.triangles().iter().find_map(|&[a, b, c]| {
        let (pa, pb, pc) = (mesh.projection(a), mesh.projection(b), mesh.projection(c));
        if !in_triangle(pa, pb, pc, p) {
            return None;
        }
        let area = cross(pa, pb, pc);
        let wa = cross(p, pb, pc) / &area;
        let wb = cross(pa, p, pc) / &area;
        let wc = cross(pa, pb, p) / &area;
        Some(wa * &r.z[a] + wb * &r.z[b] + wc * &r.z[c])
    })
}

/// Whether segment `vp` stays on or above the terrain wherever it is over it.
pub fn segment_above_terrain(
    v: &Point3,
    p: &Point3,
    mesh: &ImpreciseMesh2_5D,
    r: &Realization2_5D,
) -> Result<bool, SightError> {
    let (v2, p2) = (flat(v), flat(p));
    for end in [v, p] {
        let ground = terrain_height_at(mesh, r, &flat(end)).ok_or_else(|| SightError::OutsideDomain(end.to_string()))?;
        if end.z < ground {
            return Ok(false);
        }
    }
    let d = Point2::new(&p2.x - &v2.x, &p2.y - &v2.y);
    for e in mesh.edges() {
        let (a, b) = edge_points(mesh, r, e);
        let (a2, b2) = (flat(&a), flat(&b));
        let f = Point2::new(&b2.x - &a2.x, &b2.y - &a2.y);
        let denom = &d.x * &f.y - &d.y * &f.x;
        if denom != zero() {
            // v2 + t·d = a2 + u·f
            let w = Point2::new(&a2.x - &v2.x, &a2.y - &v2.y);
            let t = (&w.x * &f.y - &w.y * &f.x) / &denom;
            let u = (&w.x * &d.y - &w.y * &d.x) / &denom;
            let unit = Scalar::from_integer(1.into());
            if t >= zero() && t <= unit && u >= zero() && u <= unit && lerp(&v.z, &p.z, &t) < lerp(&a.z, &b.z, &u) {
                return Ok(false);
            }
        } else if cross(&v2, &p2, &a2) == zero() {
            // Collinear: compare wherever an endpoint of one lies on the other.
            for (q, qz) in [(&a2, &a.z), (&b2, &b.z)] {
                if let Some(t) = param_on(&v2, &p2, q) {
                    if lerp(&v.z, &p.z, &t) < *qz {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// `t` with `q = a + t(b - a)` and `0 <= t <= 1`, for `q` on the line `ab`.
fn param_on(a: &Point2, b: &Point2, q: &Point2) -> Option<Scalar> {
    let len2 = dot(a, b, b);
    if len2 == zero() {
        return (a == q).then(zero);
    }
    let t = dot(a, b, q) / len2;
    (t >= zero() && t <= Scalar::from_integer(1.into())).then_some(t)
}

/// Whether segment `vx` crosses the projection of edge `cd` at a point
/// interior to both and passes strictly below it there.
pub fn sight_blocked_by_edge(v: &Point3, x: &Point3, c: &Point3, d: &Point3) -> bool {
    let dx = &x.x - &v.x;
    let dy = &x.y - &v.y;
    let fx = &d.x - &c.x;
    let fy = &d.y - &c.y;
    let denom = &dx * &fy - &dy * &fx;
    if denom == zero() {
        return false;
    }
    let wx = &c.x - &v.x;
    let wy = &c.y - &v.y;
    let t = (&wx * &fy - &wy * &fx) / &denom;
    let u = (&wx * &dy - &wy * &dx) / &denom;
    let unit = Scalar::from_integer(1.into());
    if t <= zero() || t >= unit || u <= zero() || u >= unit {
        return false;
    }
    lerp(&v.z, &x.z, &t) < lerp(&c.z, &d.z, &u)
}

/// A function `f(s) = f0 + s(f1 - f0)` restricted to `[0, 1]`.
struct Linear {
    f0: Scalar,
    f1: Scalar,
}

/// Running intersection of `{s in [0, 1] : f(s) > 0}` sets.
struct Range {
    lo: Scalar,
    hi: Scalar,
    lo_closed: bool,
    hi_closed: bool,
}

impl Range {
    fn unit() -> Self {
        Self {
            lo: zero(),
            hi: Scalar::from_integer(1.into()),
            lo_closed: true,
            hi_closed: true,
        }
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    /// Returns `false` once the range is empty.
    fn restrict(&mut self, f: Linear) -> bool {
        let z = zero();
        match (f.f0 > z, f.f1 > z) {
            (true, true) => {}
            (false, false) => {
                self.hi = Scalar::from_integer((-1).into());
            }
            (pos0, _) => {
                let root = &f.f0 / (&f.f0 - &f.f1);
                if pos0 {
                    if root <= self.hi {
                        self.hi = root;
                        self.hi_closed = false;
                    }
                } else if root >= self.lo {
                    self.lo = root;
                    self.lo_closed = false;
                }
            }
        }
        !self.is_empty()
    }
}

fn orient_at(a: &Point3, b: &Point3, c: &Point3) -> Scalar {
    cross(&flat(a), &flat(b), &flat(c))
}

/// Target points of edge `target` whose sight segment from `v` passes
/// strictly below edge `blocker`. `None` when that set is empty, when the
/// two edges coincide, or when `v` projects onto the blocker's supporting
/// line outside the blocker (contact there is grazing).
pub fn occlusion_interval(
    v: &Point3,
    target: usize,
    blocker: usize,
    mesh: &ImpreciseMesh2_5D,
    r: &Realization2_5D,
) -> Result<Option<OcclusionInterval>, SightError> {
    if target == blocker {
        return Ok(None);
    }
    let (a, b) = edge_points(mesh, r, &mesh.edges()[target]);
    let (c, d) = edge_points(mesh, r, &mesh.edges()[blocker]);
    let sigma = orient_at(v, &c, &d);
    if sigma == zero() {
        let (v2, c2, d2) = (flat(v), flat(&c), flat(&d));
        if v2 != c2 && v2 != d2 && param_on(&c2, &d2, &v2).is_some() {
            return Err(SightError::DegenerateBlocker(blocker));
        }
        return Ok(None);
    }
    let sign = if sigma > zero() { Scalar::from_integer(1.into()) } else { Scalar::from_integer((-1).into()) };

    // Normal of the plane through v, c, d.
    let (cx, cy, cz) = (&c.x - &v.x, &c.y - &v.y, &c.z - &v.z);
    let (dx, dy, dz) = (&d.x - &v.x, &d.y - &v.y, &d.z - &v.z);
    let nx = &cy * &dz - &cz * &dy;
    let ny = &cz * &dx - &cx * &dz;
    let nz = &cx * &dy - &cy * &dx;
    let below = |x: &Point3| -> Scalar {
        -(&sign) * (&nx * (&x.x - &v.x) + &ny * (&x.y - &v.y) + &nz * (&x.z - &v.z))
    };

    let mut range = Range::unit();
    let conditions: [&dyn Fn(&Point3) -> Scalar; 4] = [
        &|x| &sign * orient_at(v, &c, x),
        &|x| &sign * orient_at(v, x, &d),
        &|x| -(&sign) * orient_at(&c, &d, x),
        &below,
    ];
    for f in conditions {
        if !range.restrict(Linear { f0: f(&a), f1: f(&b) }) {
            return Ok(None);
        }
    }
    Ok(Some(OcclusionInterval {
        lo: range.lo,
        hi: range.hi,
        lo_closed: range.lo_closed,
        hi_closed: range.hi_closed,
        blocker,
    }))
}

/// Point of edge `e` at parameter `s`.
pub fn edge_point(mesh: &ImpreciseMesh2_5D, r: &Realization2_5D, e: usize, s: &Scalar) -> Point3 {
    let (a, b) = edge_points(mesh, r, &mesh.edges()[e]);
    lerp3(&a, &b, s)
}

/// Every nonempty occlusion interval of edge `e`.
pub fn occlusions(
    v: &Point3,
    e: usize,
    mesh: &ImpreciseMesh2_5D,
    r: &Realization2_5D,
) -> Result<Vec<OcclusionInterval>, SightError> {
    let mut out = Vec::new();
    for b in 0..mesh.edges().len() {
        if let Some(interval) = occlusion_interval(v, e, b, mesh, r)? {
            out.push(interval);
        }
    }
    Ok(out)
}

/// Whether every point of edge `e` is visible from `v`.
///
/// The hidden part of an edge is relatively open in `[0, 1]`, and away from
/// finitely many parameters it is hidden only by proper edge crossings, so
/// it is empty iff no single blocker hides anything.
pub fn edge_fully_visible(
    v: &Point3,
    e: usize,
    mesh: &ImpreciseMesh2_5D,
    r: &Realization2_5D,
) -> Result<bool, SightError> {
    for b in 0..mesh.edges().len() {
        if occlusion_interval(v, e, b, mesh, r)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `v` sees every edge (and so every vertex) of the realization.
pub fn sees_all_from(v: &Point3, mesh: &ImpreciseMesh2_5D, r: &Realization2_5D) -> Result<bool, SightError> {
    for e in 0..mesh.edges().len() {
        if !edge_fully_visible(v, e, mesh, r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn sees_all(viewpoint: &Viewpoint2_5D, mesh: &ImpreciseMesh2_5D, r: &Realization2_5D) -> Result<bool, SightError> {
    sees_all_from(&viewpoint.point(mesh), mesh, r)
}

/// Edges and vertices that the segment `vp` passes strictly below.
pub(crate) fn blockers_of_segment(
    v: &Point3,
    p: &Point3,
    mesh: &ImpreciseMesh2_5D,
    r: &Realization2_5D,
) -> (Vec<usize>, Vec<usize>) {
    let edges = mesh
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            let (c, d) = edge_points(mesh, r, e);
            sight_blocked_by_edge(v, p, &c, &d)
        })
        .map(|(i, _)| i)
        .collect();
    let (v2, p2) = (flat(v), flat(p));
    let vertices = (0..mesh.len())
        .filter(|&w| {
            let w2 = mesh.projection(w);
            if *w2 == v2 || *w2 == p2 || cross(&v2, &p2, w2) != zero() {
                return false;
            }
            match param_on(&v2, &p2, w2) {
                Some(t) => lerp(&v.z, &p.z, &t) < r.z[w],
                None => false,
            }
        })
        .collect();
    (edges, vertices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{frac, int};
    use crate::mesh::UncertainVertex2_5D;

    /// Square split by the diagonal 1-3 into two triangles; vertex 1 and 3
    /// form a ridge between the valleys at 0 and 2.
    fn ridge(height: i64) -> (ImpreciseMesh2_5D, Realization2_5D) {
        let xy = [(0, 0), (2, 0), (2, 2), (0, 2)];
        let vertices = xy
            .iter()
            .map(|&(x, y)| UncertainVertex2_5D::new(int(x), int(y), int(0), int(height)))
            .collect();
        let mesh = ImpreciseMesh2_5D::new(vertices, vec![[0, 1, 3], [1, 2, 3]]).unwrap();
        let r = Realization2_5D::new(&mesh, vec![int(0), int(height), int(0), int(height)]).unwrap();
        (mesh, r)
    }

    fn edge_index(mesh: &ImpreciseMesh2_5D, a: usize, b: usize) -> usize {
        mesh.edges().iter().position(|e| (e.a, e.b) == (a, b)).unwrap()
    }

    #[test]
    fn flat_terrain_sees_everything() {
        let (mesh, _) = ridge(1);
        let r = mesh.bottoms();
        let v = mesh.vertex(0).at(&int(1));
        for i in 0..4 {
            assert!(segment_above_terrain(&v, &r.point(&mesh, i), &mesh, &r).unwrap());
        }
        assert!(sees_all_from(&v, &mesh, &r).unwrap());
        assert!(sees_all_from(&r.point(&mesh, 2), &mesh, &r).unwrap());
    }

    #[test]
    fn ridge_blocks_opposite_valley() {
        let (mesh, r) = ridge(2);
        let v = r.point(&mesh, 0);
        let far = r.point(&mesh, 2);
        assert!(!segment_above_terrain(&v, &far, &mesh, &r).unwrap());
        assert!(!segment_above_terrain(&far, &v, &mesh, &r).unwrap());
        assert!(segment_above_terrain(&v, &r.point(&mesh, 1), &mesh, &r).unwrap());
        let diag = edge_index(&mesh, 1, 3);
        let (blocked_edges, blocked_vertices) = blockers_of_segment(&v, &far, &mesh, &r);
        assert_eq!(blocked_edges, vec![diag]);
        assert!(blocked_vertices.is_empty());

        // Edge 1-2 is hidden except at its ridge end.
        let e = edge_index(&mesh, 1, 2);
        let hidden = occlusion_interval(&v, e, diag, &mesh, &r).unwrap().unwrap();
        assert_eq!((hidden.lo.clone(), hidden.hi.clone()), (int(0), int(1)));
        assert!(!hidden.lo_closed && hidden.hi_closed);
        assert!(!edge_fully_visible(&v, e, &mesh, &r).unwrap());
        assert!(!sees_all_from(&v, &mesh, &r).unwrap());

        // High enough above vertex 0 the ridge no longer hides anything.
        let high = mesh.vertex(0).at(&int(5));
        assert!(sees_all_from(&high, &mesh, &r).unwrap());
        let grazing = mesh.vertex(0).at(&int(4));
        assert!(sees_all_from(&grazing, &mesh, &r).unwrap());
        let just_below = mesh.vertex(0).at(&frac(39, 10));
        assert!(!sees_all_from(&just_below, &mesh, &r).unwrap());
    }

    #[test]
    fn degenerate_blocker_is_reported() {
        let (mesh, r) = ridge(2);
        let mid = Point3::new(int(1), int(1), int(3));
        let diag = edge_index(&mesh, 1, 3);
        let e = edge_index(&mesh, 0, 1);
        assert_eq!(
            occlusion_interval(&mid, e, diag, &mesh, &r),
            Err(SightError::DegenerateBlocker(diag))
        );
    }

    #[test]
    fn outside_domain() {
        let (mesh, r) = ridge(2);
        let out = Point3::new(int(5), int(5), int(0));
        assert!(matches!(
            segment_above_terrain(&out, &r.point(&mesh, 0), &mesh, &r),
            Err(SightError::OutsideDomain(_))
        ));
        assert_eq!(terrain_height_at(&mesh, &r, &Point2::new(int(1), int(1))), Some(int(2)));
    }
}
