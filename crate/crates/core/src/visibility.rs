//! The region of points that see a whole fixed 1.5D polyline, and the
//! classical shortest watchtower of a precise terrain.
//!
//! A point sees every point of an x-monotone polyline iff it lies on or above
//! the extension of every edge, so the region is the epigraph of the upper
//! envelope of the edge lines: a convex, piecewise-linear boundary whose
//! slopes strictly increase from left to right.

use thiserror::Error;

use crate::geom::{Line2, Point2, Scalar};
use crate::terrain::Tower1D;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VisibilityError {
    #[error("polyline needs at least two vertices with strictly increasing x")]
    DegeneratePolyline,
}

/// `{(x, y) : y >= boundary(x)}` for a convex piecewise-linear boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpperRegion {
    lines: Vec<Line2>,
    slopes: Vec<Scalar>,
    intercepts: Vec<Scalar>,
    /// `breaks[j]` is where piece `j` hands over to piece `j + 1`.
    breaks: Vec<Scalar>,
}

fn meet_x(m1: &Scalar, c1: &Scalar, m2: &Scalar, c2: &Scalar) -> Scalar {
    (c2 - c1) / (m1 - m2)
}

impl UpperRegion {
    /// Upper envelope of the lines `y = m·x + c`.
    fn from_lines(mut lines: Vec<(Scalar, Scalar)>) -> UpperRegion {
        lines.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        // Among parallel lines only the highest survives; it sorts last.
        let mut dedup: Vec<(Scalar, Scalar)> = Vec::with_capacity(lines.len());
        for line in lines {
            if dedup.last().is_some_and(|last| last.0 == line.0) {
                dedup.pop();
            }
            dedup.push(line);
        }

        let mut hull: Vec<(Scalar, Scalar)> = Vec::with_capacity(dedup.len());
        let mut breaks: Vec<Scalar> = Vec::with_capacity(dedup.len());
        for (m, c) in dedup {
            while let Some(prev_break) = breaks.last() {
                let base = &hull[hull.len() - 2];
                let x_new = meet_x(&base.0, &base.1, &m, &c);
                if &x_new <= prev_break {
                    hull.pop();
                    breaks.pop();
                } else {
                    break;
                }
            }
            if let Some(last) = hull.last() {
                breaks.push(meet_x(&last.0, &last.1, &m, &c));
            }
            hull.push((m, c));
        }

        let lines = hull.iter().map(|(m, c)| Line2::from_slope_intercept(m, c)).collect();
        let (slopes, intercepts) = hull.into_iter().unzip();
        UpperRegion {
            lines,
            slopes,
            intercepts,
            breaks,
        }
    }

    pub fn pieces(&self) -> &[Line2] {
        &self.lines
    }

    pub fn slopes(&self) -> &[Scalar] {
        &self.slopes
    }

    pub fn breakpoints(&self) -> &[Scalar] {
        &self.breaks
    }

    /// Vertices of the region: consecutive-piece intersections, left to right.
    pub fn vertices(&self) -> Vec<Point2> {
        self.breaks
            .iter()
            .enumerate()
            .map(|(j, x)| Point2::new(x.clone(), self.piece_value(j, x)))
            .collect()
    }

    fn piece_value(&self, j: usize, x: &Scalar) -> Scalar {
        &self.slopes[j] * x + &self.intercepts[j]
    }

    fn piece_index(&self, x: &Scalar) -> usize {
        self.breaks.partition_point(|b| b < x)
    }

    pub fn boundary_at(&self, x: &Scalar) -> Scalar {
        self.piece_value(self.piece_index(x), x)
    }

    /// Boundary heights at nondecreasing abscissas, in one merged walk.
    pub fn boundary_at_sorted<'a>(&self, xs: impl IntoIterator<Item = &'a Scalar>) -> Vec<Scalar> {
        let mut piece = 0;
        xs.into_iter()
            .map(|x| {
                while piece < self.breaks.len() && &self.breaks[piece] < x {
                    piece += 1;
                }
                self.piece_value(piece, x)
            })
            .collect()
    }

    /// Closed membership: on or above the boundary.
    pub fn contains(&self, p: &Point2) -> bool {
        p.y >= self.boundary_at(&p.x)
    }
}

fn check_polyline(polyline: &[Point2]) -> Result<(), VisibilityError> {
    if polyline.len() < 2 || polyline.windows(2).any(|w| w[0].x >= w[1].x) {
        return Err(VisibilityError::DegeneratePolyline);
    }
    Ok(())
}

/// Intersection of the upper halfplanes of all edge extensions.
pub fn visibility_region(polyline: &[Point2]) -> Result<UpperRegion, VisibilityError> {
    check_polyline(polyline)?;
    let lines = polyline
        .windows(2)
        .map(|w| {
            let slope = (&w[1].y - &w[0].y) / (&w[1].x - &w[0].x);
            let intercept = &w[0].y - &slope * &w[0].x;
            (slope, intercept)
        })
        .collect();
    Ok(UpperRegion::from_lines(lines))
}

pub fn boundary_at(region: &UpperRegion, x: &Scalar) -> Scalar {
    region.boundary_at(x)
}

/// Minimizes `boundary(x) - polyline(x)` over the polyline's x-range.
///
/// The gap is piecewise linear with breakpoints among the polyline vertices
/// and the region's vertices, so a merged sweep over both sorted lists finds
/// the minimum; ties go to the smallest x.
pub fn fixed_terrain_watchtower(polyline: &[Point2]) -> Result<Tower1D, VisibilityError> {
    let region = visibility_region(polyline)?;
    Ok(watchtower_in_region(&region, polyline))
}

pub(crate) fn watchtower_in_region(region: &UpperRegion, polyline: &[Point2]) -> Tower1D {
    let (x_first, x_last) = (&polyline[0].x, &polyline[polyline.len() - 1].x);
    let breaks = region.breakpoints();
    let mut b = breaks.partition_point(|x| x < x_first);
    let mut v = 0usize;
    let mut piece = b;
    let mut best: Option<(Scalar, Point2, Scalar)> = None;

    loop {
        // Next abscissa: the smaller of the next polyline vertex and the next break.
        let next_vertex = polyline.get(v).map(|p| &p.x);
        let next_break = breaks.get(b).filter(|x| *x <= x_last);
        let x = match (next_vertex, next_break) {
            (None, None) => break,
            (Some(a), None) => a.clone(),
            (None, Some(c)) => c.clone(),
            (Some(a), Some(c)) => a.min(c).clone(),
        };
        while piece < breaks.len() && breaks[piece] < x {
            piece += 1;
        }
        let terrain_y = if polyline[v].x == x {
            polyline[v].y.clone()
        } else {
            crate::geom::interpolate(&polyline[v - 1], &polyline[v], &x)
        };
        let top_y = region.piece_value(piece, &x);
        let gap = &top_y - &terrain_y;
        if best.as_ref().is_none_or(|(g, _, _)| &gap < g) {
            best = Some((gap, Point2::new(x.clone(), terrain_y), top_y));
        }
        if v < polyline.len() && polyline[v].x == x {
            v += 1;
        }
        if b < breaks.len() && breaks[b] == x {
            b += 1;
        }
    }
    let (_, base, top_y) = best.expect("polyline has vertices");
    let top = Point2::new(base.x.clone(), top_y);
    Tower1D::new(base, top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{frac, int};

    fn pts(raw: &[(i64, i64)]) -> Vec<Point2> {
        raw.iter().map(|&(x, y)| Point2::from_ints(x, y)).collect()
    }

    /// Direct maximum over all edge lines.
    fn brute_boundary(polyline: &[Point2], x: &Scalar) -> Scalar {
        polyline
            .windows(2)
            .map(|w| crate::geom::interpolate(&w[0], &w[1], x))
            .max()
            .unwrap()
    }

    #[test]
    fn single_edge() {
        let line = pts(&[(0, 0), (1, 1)]);
        let r = visibility_region(&line).unwrap();
        assert_eq!(r.pieces().len(), 1);
        assert_eq!(r.pieces()[0], crate::geom::line_through(&line[0], &line[1]).unwrap());
        let tower = fixed_terrain_watchtower(&line).unwrap();
        assert_eq!(tower.height(), int(0));
        assert_eq!(tower.base, line[0]);
    }

    #[test]
    fn v_polyline() {
        let v = pts(&[(0, 1), (1, 0), (2, 1)]);
        let r = visibility_region(&v).unwrap();
        assert_eq!(r.vertices(), pts(&[(1, 0)]));
        assert_eq!(r.boundary_at(&int(1)), int(0));
        assert_eq!(r.boundary_at(&int(-3)), int(4));
        let tower = fixed_terrain_watchtower(&v).unwrap();
        assert_eq!(tower.height(), int(0));
        assert_eq!(tower.base, Point2::from_ints(0, 1));
    }

    #[test]
    fn m_polyline() {
        let m = pts(&[(0, 0), (1, 1), (2, 0), (3, 1), (4, 0)]);
        let r = visibility_region(&m).unwrap();
        // Middle constraints x−2 and 2−x are redundant.
        assert_eq!(r.pieces().len(), 2);
        assert_eq!(r.vertices(), pts(&[(2, 2)]));
        assert_eq!(r.boundary_at(&int(0)), int(4));
        assert_eq!(r.boundary_at(&int(2)), int(2));
        let tower = fixed_terrain_watchtower(&m).unwrap();
        assert_eq!(tower.height(), int(2));
        assert_eq!(tower.base, Point2::from_ints(1, 1));
        assert_eq!(tower.top, Point2::from_ints(1, 3));
        // Dense sampling: the gap never drops below 2 and equals 2 on [1, 3].
        for k in 0..=400 {
            let x = frac(k, 100);
            let gap = r.boundary_at(&x) - crate::terrain::polyline_height_at(&m, &x).unwrap();
            assert!(gap >= int(2));
            if (100..=300).contains(&k) {
                assert_eq!(gap, int(2));
            }
        }
    }

    #[test]
    fn parallel_edges_keep_highest() {
        let zig = pts(&[(0, 0), (1, 1), (2, 0), (3, 1)]);
        let r = visibility_region(&zig).unwrap();
        // y = x − 2 is dominated by y = x.
        assert_eq!(r.pieces().len(), 2);
        for k in -10..=40 {
            let x = frac(k, 10);
            assert_eq!(r.boundary_at(&x), brute_boundary(&zig, &x));
        }
    }

    #[test]
    fn degenerate() {
        assert_eq!(visibility_region(&pts(&[(0, 0)])), Err(VisibilityError::DegeneratePolyline));
        assert_eq!(
            visibility_region(&pts(&[(0, 0), (0, 1)])),
            Err(VisibilityError::DegeneratePolyline)
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn polyline() -> impl Strategy<Value = Vec<Point2>> {
            prop::collection::vec((1i64..4, -20i64..20), 2..12).prop_map(|steps| {
                let mut x = 0;
                steps
                    .into_iter()
                    .map(|(dx, y)| {
                        x += dx;
                        Point2::from_ints(x, y)
                    })
                    .collect()
            })
        }

        proptest! {
            #[test]
            fn envelope_matches_brute_force(line in polyline(), probes in prop::collection::vec(-20i64..200, 10)) {
                let r = visibility_region(&line).unwrap();
                for s in r.slopes().windows(2) {
                    prop_assert!(s[0] < s[1]);
                }
                for k in probes {
                    let x = frac(k, 4);
                    prop_assert_eq!(r.boundary_at(&x), brute_boundary(&line, &x));
                }
            }

            #[test]
            fn boundary_dominates_polyline(line in polyline()) {
                let r = visibility_region(&line).unwrap();
                for p in &line {
                    prop_assert!(r.boundary_at(&p.x) >= p.y);
                }
            }

            #[test]
            fn watchtower_matches_sampling(line in polyline()) {
                let r = visibility_region(&line).unwrap();
                let tower = fixed_terrain_watchtower(&line).unwrap();
                let h = tower.height();
                prop_assert!(r.contains(&tower.top));
                prop_assert_eq!(tower.base.y.clone(), crate::terrain::polyline_height_at(&line, &tower.base.x).unwrap());
                // No probe (vertices, breaks, midpoints) does better.
                let first = &line[0].x;
                let last = &line[line.len() - 1].x;
                let steps = 64;
                for k in 0..=steps {
                    let x = first + (last - first) * frac(k, steps);
                    let gap = r.boundary_at(&x) - crate::terrain::polyline_height_at(&line, &x).unwrap();
                    prop_assert!(gap >= h);
                }
                let touches = line.iter().any(|p| r.boundary_at(&p.x) == p.y)
                    || r.vertices().iter().any(|v| &v.x >= first && &v.x <= last
                        && crate::terrain::polyline_height_at(&line, &v.x).unwrap() == v.y);
                prop_assert_eq!(h == int(0), touches);
            }
        }
    }
}
