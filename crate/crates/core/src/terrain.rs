//! Imprecise 1.5D terrains, their realizations and the two-chain corridors
//! (`Q`, `Q_p`, `Q̂`) the shortest-path machinery runs in.

use std::cmp::Ordering;

use thiserror::Error;

use crate::geom::{interpolate, Point2, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TerrainError {
    #[error("terrain needs at least two vertices")]
    TooFewVertices,
    #[error("x-coordinates must be strictly increasing (vertex {index})")]
    NonMonotoneX { index: usize },
    #[error("interval {index} has low > high")]
    IntervalInverted { index: usize },
    #[error("realization has {got} heights, terrain has {expected} intervals")]
    RealizationLength { expected: usize, got: usize },
    #[error("height of vertex {index} lies outside its interval")]
    HeightOutsideInterval { index: usize },
    #[error("x = {0} lies outside the terrain's x-range")]
    OutOfRange(String),
    #[error("apex x must lie strictly between two consecutive interval abscissas")]
    ApexOutsideStrip,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChannelError {
    #[error("channel chain {0} is empty or not strictly x-monotone")]
    NonMonotoneChain(&'static str),
    #[error("channel chains do not span the same x-range")]
    MismatchedEnds,
    #[error("lower chain rises above the upper chain at x = {0}")]
    InvalidChannel(String),
    #[error("path endpoint {0} is not a usable channel point")]
    EndpointOutsideChannel(String),
    #[error("x = {0} lies outside the path's x-range")]
    OutOfRange(String),
}

/// One imprecise vertex: a fixed abscissa and a closed vertical interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertainVertex1D {
    pub x: Scalar,
    pub low: Scalar,
    pub high: Scalar,
}

impl UncertainVertex1D {
    pub fn new(x: Scalar, low: Scalar, high: Scalar) -> Self {
        Self { x, low, high }
    }

    pub fn top(&self) -> Point2 {
        Point2::new(self.x.clone(), self.high.clone())
    }

    pub fn bottom(&self) -> Point2 {
        Point2::new(self.x.clone(), self.low.clone())
    }

    pub fn contains(&self, y: &Scalar) -> bool {
        &self.low <= y && y <= &self.high
    }

    pub fn is_precise(&self) -> bool {
        self.low == self.high
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpreciseTerrain1D {
    vertices: Vec<UncertainVertex1D>,
}

/// Checks the terrain invariants and wraps the vertices.
pub fn validate_terrain(vertices: Vec<UncertainVertex1D>) -> Result<ImpreciseTerrain1D, TerrainError> {
    if vertices.len() < 2 {
        return Err(TerrainError::TooFewVertices);
    }
    for (index, v) in vertices.iter().enumerate() {
        if v.low > v.high {
            return Err(TerrainError::IntervalInverted { index });
        }
        if index > 0 && vertices[index - 1].x >= v.x {
            return Err(TerrainError::NonMonotoneX { index });
        }
    }
    Ok(ImpreciseTerrain1D { vertices })
}

impl ImpreciseTerrain1D {
    pub fn new(vertices: Vec<UncertainVertex1D>) -> Result<Self, TerrainError> {
        validate_terrain(vertices)
    }

    /// A terrain whose every interval is the single given height.
    pub fn precise(points: &[Point2]) -> Result<Self, TerrainError> {
        Self::new(
            points
                .iter()
                .map(|p| UncertainVertex1D::new(p.x.clone(), p.y.clone(), p.y.clone()))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[UncertainVertex1D] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &UncertainVertex1D {
        &self.vertices[i]
    }

    pub fn tops(&self) -> Vec<Point2> {
        self.vertices.iter().map(UncertainVertex1D::top).collect()
    }

    pub fn bottoms(&self) -> Vec<Point2> {
        self.vertices.iter().map(UncertainVertex1D::bottom).collect()
    }

    pub fn x_min(&self) -> &Scalar {
        &self.vertices[0].x
    }

    pub fn x_max(&self) -> &Scalar {
        &self.vertices[self.len() - 1].x
    }

    /// Index `k` with `x_k < x < x_{k+1}`, if `x` is strictly inside a strip.
    pub fn strip_of(&self, x: &Scalar) -> Option<usize> {
        let k = self.vertices.partition_point(|v| &v.x < x);
        if k == 0 || k == self.len() || &self.vertices[k].x == x {
            return None;
        }
        Some(k - 1)
    }

    pub fn all_precise(&self) -> bool {
        self.vertices.iter().all(UncertainVertex1D::is_precise)
    }

    /// The realization taking every vertex at the top of its interval.
    pub fn top_realization(&self) -> Realization1D {
        Realization1D {
            vertices: self.tops(),
        }
    }
}

/// A chosen height per interval, stored as the realized polyline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization1D {
    vertices: Vec<Point2>,
}

impl Realization1D {
    pub fn new(terrain: &ImpreciseTerrain1D, heights: Vec<Scalar>) -> Result<Self, TerrainError> {
        if heights.len() != terrain.len() {
            return Err(TerrainError::RealizationLength {
                expected: terrain.len(),
                got: heights.len(),
            });
        }
        let mut vertices = Vec::with_capacity(heights.len());
        for (index, (v, y)) in terrain.vertices().iter().zip(heights).enumerate() {
            if !v.contains(&y) {
                return Err(TerrainError::HeightOutsideInterval { index });
            }
            vertices.push(Point2::new(v.x.clone(), y));
        }
        Ok(Self { vertices })
    }

    pub fn polyline(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn heights(&self) -> impl Iterator<Item = &Scalar> {
        self.vertices.iter().map(|p| &p.y)
    }

    pub fn height(&self, i: usize) -> &Scalar {
        &self.vertices[i].y
    }

    /// Same realization with vertex `i` moved to `y`; interval bounds are the caller's concern.
    pub(crate) fn with_height(&self, i: usize, y: Scalar) -> Self {
        let mut vertices = self.vertices.clone();
        vertices[i].y = y;
        Self { vertices }
    }

    /// Whether this polyline is a realization of `terrain`.
    pub fn respects(&self, terrain: &ImpreciseTerrain1D) -> Result<(), TerrainError> {
        if self.vertices.len() != terrain.len() {
            return Err(TerrainError::RealizationLength {
                expected: terrain.len(),
                got: self.vertices.len(),
            });
        }
        for (index, (p, v)) in self.vertices.iter().zip(terrain.vertices()).enumerate() {
            if p.x != v.x || !v.contains(&p.y) {
                return Err(TerrainError::HeightOutsideInterval { index });
            }
        }
        Ok(())
    }

    pub fn height_at(&self, x: &Scalar) -> Result<Scalar, TerrainError> {
        polyline_height_at(&self.vertices, x)
    }
}

/// `terrain_height_at`: linear interpolation along a realized polyline.
pub fn terrain_height_at(realization: &Realization1D, x: &Scalar) -> Result<Scalar, TerrainError> {
    realization.height_at(x)
}

/// Height at `x` of an x-monotone polyline (strictly increasing x).
pub fn polyline_height_at(points: &[Point2], x: &Scalar) -> Result<Scalar, TerrainError> {
    let out_of_range = || TerrainError::OutOfRange(crate::geom::format_scalar(x));
    let first = points.first().ok_or_else(out_of_range)?;
    let last = points.last().ok_or_else(out_of_range)?;
    if x < &first.x || x > &last.x {
        return Err(out_of_range());
    }
    let k = points.partition_point(|p| &p.x < x);
    let hit = &points[k];
    if &hit.x == x {
        return Ok(hit.y.clone());
    }
    Ok(interpolate(&points[k - 1], hit, x))
}

/// A vertical tower from `base` (on the terrain) up to `top`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower1D {
    pub base: Point2,
    pub top: Point2,
}

impl Tower1D {
    pub fn new(base: Point2, top: Point2) -> Self {
        debug_assert!(base.x == top.x && top.y >= base.y);
        Self { base, top }
    }

    pub fn zero(at: Point2) -> Self {
        Self {
            top: at.clone(),
            base: at,
        }
    }

    pub fn height(&self) -> Scalar {
        &self.top.y - &self.base.y
    }

    pub fn is_vertical(&self) -> bool {
        self.base.x == self.top.x && self.top.y >= self.base.y
    }
}

/// An x-monotone corridor between a lower and an upper chain over a shared x-range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    lower: Vec<Point2>,
    upper: Vec<Point2>,
}

fn strictly_monotone(chain: &[Point2]) -> bool {
    !chain.is_empty() && chain.windows(2).all(|w| w[0].x < w[1].x)
}

impl Channel {
    pub fn new(lower: Vec<Point2>, upper: Vec<Point2>) -> Result<Self, ChannelError> {
        if !strictly_monotone(&lower) {
            return Err(ChannelError::NonMonotoneChain("lower"));
        }
        if !strictly_monotone(&upper) {
            return Err(ChannelError::NonMonotoneChain("upper"));
        }
        if lower[0].x != upper[0].x || lower[lower.len() - 1].x != upper[upper.len() - 1].x {
            return Err(ChannelError::MismatchedEnds);
        }
        let channel = Self { lower, upper };
        channel.check_containment()?;
        Ok(channel)
    }

    fn check_containment(&self) -> Result<(), ChannelError> {
        for p in &self.lower {
            let top = polyline_height_at(&self.upper, &p.x).expect("same x-range");
            if p.y > top {
                return Err(ChannelError::InvalidChannel(crate::geom::format_scalar(&p.x)));
            }
        }
        for p in &self.upper {
            let bottom = polyline_height_at(&self.lower, &p.x).expect("same x-range");
            if bottom > p.y {
                return Err(ChannelError::InvalidChannel(crate::geom::format_scalar(&p.x)));
            }
        }
        Ok(())
    }

    pub fn lower(&self) -> &[Point2] {
        &self.lower
    }

    pub fn upper(&self) -> &[Point2] {
        &self.upper
    }

    pub fn x_first(&self) -> &Scalar {
        &self.lower[0].x
    }

    pub fn x_last(&self) -> &Scalar {
        &self.lower[self.lower.len() - 1].x
    }

    pub fn lower_at(&self, x: &Scalar) -> Option<Scalar> {
        polyline_height_at(&self.lower, x).ok()
    }

    pub fn upper_at(&self, x: &Scalar) -> Option<Scalar> {
        polyline_height_at(&self.upper, x).ok()
    }

    /// Closed containment test.
    pub fn contains(&self, p: &Point2) -> bool {
        match (self.lower_at(&p.x), self.upper_at(&p.x)) {
            (Some(lo), Some(hi)) => lo <= p.y && p.y <= hi,
            _ => false,
        }
    }

    /// Reflection across the y axis; chains keep their roles.
    pub fn mirrored(&self) -> Channel {
        Channel {
            lower: self.lower.iter().rev().map(Point2::mirrored).collect(),
            upper: self.upper.iter().rev().map(Point2::mirrored).collect(),
        }
    }
}

/// `Q`: bottoms and tops of the intervals joined into two chains.
pub fn polygon_q(terrain: &ImpreciseTerrain1D) -> Channel {
    Channel {
        lower: terrain.bottoms(),
        upper: terrain.tops(),
    }
}

/// Index `k` of the upper-chain segment with `upper[k].x < x < upper[k+1].x`.
fn upper_strip(channel: &Channel, x: &Scalar) -> Option<usize> {
    let upper = channel.upper();
    let k = upper.partition_point(|p| &p.x < x);
    if k == 0 || k == upper.len() || &upper[k].x == x {
        return None;
    }
    Some(k - 1)
}

/// Whether `p` lies strictly above the upper-chain segment spanning its strip.
fn strictly_above_upper(channel: &Channel, k: usize, p: &Point2) -> bool {
    let upper = channel.upper();
    p.y > interpolate(&upper[k], &upper[k + 1], &p.x)
}

/// `Q_p`: the union of `Q` with the triangle `t_k p t_{k+1}`.
pub fn polygon_qp(q: &Channel, p: &Point2) -> Result<Channel, TerrainError> {
    let k = upper_strip(q, &p.x).ok_or(TerrainError::ApexOutsideStrip)?;
    if !strictly_above_upper(q, k, p) {
        return Ok(q.clone());
    }
    let mut upper = q.upper.clone();
    upper.insert(k + 1, p.clone());
    Ok(Channel {
        lower: q.lower.clone(),
        upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApexDrop {
    /// Outside the open x-range of the channel or on an interval abscissa.
    OutsideStrip,
    /// On or below the chain of tops; its triangle adds nothing.
    NotAboveTops,
    /// Shares its x with an apex already retained.
    DuplicateX,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QHat {
    pub channel: Channel,
    pub dropped: Vec<(Point2, ApexDrop)>,
}

/// `Q̂`: every retainable apex merged into the upper chain in x order.
pub fn polygon_qhat(q: &Channel, apexes: &[Point2]) -> QHat {
    let mut dropped = Vec::new();
    let mut kept: Vec<Point2> = Vec::new();
    for p in apexes {
        match upper_strip(q, &p.x) {
            None => dropped.push((p.clone(), ApexDrop::OutsideStrip)),
            Some(k) if !strictly_above_upper(q, k, p) => {
                dropped.push((p.clone(), ApexDrop::NotAboveTops))
            }
            Some(_) => kept.push(p.clone()),
        }
    }
    kept.sort_by(|a, b| a.x.cmp(&b.x));
    let mut unique: Vec<Point2> = Vec::with_capacity(kept.len());
    for p in kept {
        if unique.last().is_some_and(|last| last.x == p.x) {
            dropped.push((p, ApexDrop::DuplicateX));
        } else {
            unique.push(p);
        }
    }

    let mut upper = Vec::with_capacity(q.upper.len() + unique.len());
    let mut apex_iter = unique.into_iter().peekable();
    for t in &q.upper {
        while let Some(a) = apex_iter.next_if(|a| a.x.cmp(&t.x) == Ordering::Less) {
            upper.push(a);
        }
        upper.push(t.clone());
    }
    QHat {
        channel: Channel {
            lower: q.lower.clone(),
            upper,
        },
        dropped,
    }
}
