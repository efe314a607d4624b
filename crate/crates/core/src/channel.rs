//! Taut-string shortest paths inside x-monotone channels.
//!
//! The channel between two x-monotone chains is a sleeve: sweeping chain
//! vertices left to right, each new vertex closes a triangle with the
//! previous two window endpoints. A single funnel (apex plus one convex
//! chain toward each window endpoint) is maintained over that sweep, which
//! yields the parent of every chain vertex in the shortest-path tree from the
//! source in amortized linear time.

use std::collections::VecDeque;

use crate::geom::{format_scalar, interpolate, orientation, Orientation, Point2, Scalar};
use crate::terrain::{Channel, ChannelError};

/// A shortest path, listed from source to target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TautPath {
    points: Vec<Point2>,
}

impl TautPath {
    pub fn new(points: Vec<Point2>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }

    pub fn source(&self) -> &Point2 {
        &self.points[0]
    }

    pub fn target(&self) -> &Point2 {
        &self.points[self.points.len() - 1]
    }

    /// The final edge `(second to last, last)`, if the path has one.
    pub fn last_edge(&self) -> Option<(&Point2, &Point2)> {
        let n = self.points.len();
        (n >= 2).then(|| (&self.points[n - 2], &self.points[n - 1]))
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }

    pub fn reversed(&self) -> TautPath {
        TautPath::new(self.points.iter().rev().cloned().collect())
    }

    pub fn is_x_monotone(&self) -> bool {
        let inc = self.points.windows(2).all(|w| w[0].x <= w[1].x);
        let dec = self.points.windows(2).all(|w| w[0].x >= w[1].x);
        inc || dec
    }

    /// Point of the path on the vertical line at `x`.
    pub fn crossing_with_vertical(&self, x: &Scalar) -> Result<Point2, ChannelError> {
        crossing_with_vertical(&self.points, x)
    }
}

/// Exact intersection of an x-monotone path with the vertical line at `x`.
pub fn crossing_with_vertical(points: &[Point2], x: &Scalar) -> Result<Point2, ChannelError> {
    let out_of_range = || ChannelError::OutOfRange(format_scalar(x));
    let (first, last) = match (points.first(), points.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(out_of_range()),
    };
    let increasing = first.x <= last.x;
    let (lo, hi) = if increasing { (first, last) } else { (last, first) };
    if x < &lo.x || x > &hi.x {
        return Err(out_of_range());
    }
    for w in points.windows(2) {
        if &w[0].x == x {
            return Ok(w[0].clone());
        }
        let spans = if increasing {
            &w[0].x < x && x < &w[1].x
        } else {
            &w[1].x < x && x < &w[0].x
        };
        if spans {
            return Ok(Point2::new(x.clone(), interpolate(&w[0], &w[1], x)));
        }
    }
    Ok(last.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Lower,
    Upper,
}

/// Incremental funnel sweep from a source on the channel's left window.
#[derive(Debug, Clone)]
pub(crate) struct FunnelSweep<'c> {
    channel: &'c Channel,
    /// Node 0 is the source; every inserted chain vertex gets a node.
    nodes: Vec<Point2>,
    parent: Vec<Option<usize>>,
    deque: VecDeque<usize>,
    apex: usize,
    events: Vec<(Side, usize)>,
    next_event: usize,
    lower_node: Vec<Option<usize>>,
    upper_node: Vec<Option<usize>>,
}

impl<'c> FunnelSweep<'c> {
    pub(crate) fn new(channel: &'c Channel, source: &Point2) -> Result<Self, ChannelError> {
        if &source.x != channel.x_first() || !channel.contains(source) {
            return Err(ChannelError::EndpointOutsideChannel(source.to_string()));
        }
        let (lower, upper) = (channel.lower(), channel.upper());
        let mut events = Vec::with_capacity(lower.len() + upper.len());
        let (mut i, mut j) = (0, 0);
        while i < lower.len() || j < upper.len() {
            let take_lower = j == upper.len() || (i < lower.len() && lower[i].x <= upper[j].x);
            if take_lower {
                events.push((Side::Lower, i));
                i += 1;
            } else {
                events.push((Side::Upper, j));
                j += 1;
            }
        }
        let mut deque = VecDeque::with_capacity(16);
        deque.push_back(0);
        Ok(Self {
            channel,
            nodes: vec![source.clone()],
            parent: vec![None],
            deque,
            apex: 0,
            events,
            next_event: 0,
            lower_node: vec![None; lower.len()],
            upper_node: vec![None; upper.len()],
        })
    }

    fn point_of(&self, side: Side, i: usize) -> &'c Point2 {
        match side {
            Side::Lower => &self.channel.lower()[i],
            Side::Upper => &self.channel.upper()[i],
        }
    }

    fn node(&self, k: usize) -> &Point2 {
        &self.nodes[self.deque[k]]
    }

    fn orient_at(&self, i: usize, j: usize, p: &Point2) -> Orientation {
        orientation(self.node(i), self.node(j), p)
    }

    /// Processes every chain vertex with `x < bound`.
    pub(crate) fn advance_below(&mut self, bound: &Scalar) {
        while let Some(&(side, i)) = self.events.get(self.next_event) {
            if &self.point_of(side, i).x >= bound {
                break;
            }
            self.step(side, i);
        }
    }

    pub(crate) fn advance_all(&mut self) {
        while let Some(&(side, i)) = self.events.get(self.next_event) {
            self.step(side, i);
        }
    }

    fn step(&mut self, side: Side, i: usize) {
        self.next_event += 1;
        let p = self.point_of(side, i);
        let node = if *p == self.nodes[0] {
            0
        } else {
            match side {
                Side::Lower => self.push_lower(p.clone()),
                Side::Upper => self.push_upper(p.clone()),
            }
        };
        match side {
            Side::Lower => self.lower_node[i] = Some(node),
            Side::Upper => self.upper_node[i] = Some(node),
        }
    }

    fn new_node(&mut self, p: Point2, parent: usize) -> usize {
        self.nodes.push(p);
        self.parent.push(Some(parent));
        self.nodes.len() - 1
    }

    fn push_upper(&mut self, p: Point2) -> usize {
        loop {
            let last = self.deque.len() - 1;
            if last > self.apex {
                if self.orient_at(last - 1, last, &p) != Orientation::Left {
                    self.deque.pop_back();
                    continue;
                }
            } else if self.apex > 0 && self.orient_at(self.apex, self.apex - 1, &p) == Orientation::Right {
                self.deque.pop_back();
                self.apex -= 1;
                continue;
            }
            break;
        }
        let parent = *self.deque.back().expect("funnel never empties");
        let id = self.new_node(p, parent);
        self.deque.push_back(id);
        id
    }

    fn push_lower(&mut self, p: Point2) -> usize {
        loop {
            if self.apex > 0 {
                if self.orient_at(1, 0, &p) != Orientation::Right {
                    self.deque.pop_front();
                    self.apex -= 1;
                    continue;
                }
            } else if self.deque.len() > 1 && self.orient_at(0, 1, &p) == Orientation::Left {
                self.deque.pop_front();
                continue;
            }
            break;
        }
        let parent = *self.deque.front().expect("funnel never empties");
        let id = self.new_node(p, parent);
        self.deque.push_front(id);
        self.apex += 1;
        id
    }

    /// Parent node of `p` in the shortest-path tree, for a point lying beyond
    /// every processed vertex; the funnel is left untouched.
    pub(crate) fn query(&self, p: &Point2) -> usize {
        let mut apex = self.apex;
        let mut end = self.deque.len() - 1;
        loop {
            if end > apex {
                if self.orient_at(end - 1, end, p) != Orientation::Left {
                    end -= 1;
                    continue;
                }
            } else if apex > 0 && self.orient_at(apex, apex - 1, p) == Orientation::Right {
                apex -= 1;
                end = apex;
                continue;
            }
            break;
        }
        self.deque[end]
    }

    pub(crate) fn node_point(&self, node: usize) -> &Point2 {
        &self.nodes[node]
    }

    pub(crate) fn parent_of(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    pub(crate) fn upper_node(&self, i: usize) -> Option<usize> {
        self.upper_node[i]
    }

    pub(crate) fn lower_node(&self, i: usize) -> Option<usize> {
        self.lower_node[i]
    }

    /// Source-to-node path.
    pub(crate) fn path_to(&self, node: usize) -> Vec<Point2> {
        let mut points = vec![self.nodes[node].clone()];
        let mut cur = node;
        while let Some(p) = self.parent[cur] {
            points.push(self.nodes[p].clone());
            cur = p;
        }
        points.reverse();
        points
    }

    /// Source-to-`p` path for a point beyond every processed vertex.
    pub(crate) fn path_through_query(&self, p: &Point2) -> Vec<Point2> {
        let mut points = self.path_to(self.query(p));
        if points.last() != Some(p) {
            points.push(p.clone());
        }
        points
    }
}

fn mirror_path(points: Vec<Point2>) -> Vec<Point2> {
    points.iter().map(Point2::mirrored).collect()
}

fn on_window(channel: &Channel, p: &Point2, x: &Scalar) -> bool {
    &p.x == x && channel.contains(p)
}

fn path_from_left(channel: &Channel, source: &Point2, target: &Point2) -> Result<Vec<Point2>, ChannelError> {
    if !channel.contains(target) {
        return Err(ChannelError::EndpointOutsideChannel(target.to_string()));
    }
    let mut sweep = FunnelSweep::new(channel, source)?;
    if target == source {
        return Ok(vec![source.clone()]);
    }
    sweep.advance_below(&target.x);
    Ok(sweep.path_through_query(target))
}

/// The Euclidean shortest path from `s` to `t` inside the channel.
///
/// One endpoint must sit on the left or right window of the channel; the
/// other may be any point of the channel (typically a chain vertex or an
/// apex already inserted into the upper chain).
pub fn taut_path(channel: &Channel, s: &Point2, t: &Point2) -> Result<TautPath, ChannelError> {
    validate_channel(channel)?;
    let (first, last) = (channel.x_first(), channel.x_last());
    let points = if on_window(channel, s, first) {
        path_from_left(channel, s, t)?
    } else if on_window(channel, t, first) {
        let mut p = path_from_left(channel, t, s)?;
        p.reverse();
        p
    } else {
        let mirrored = channel.mirrored();
        if on_window(channel, s, last) {
            mirror_path(path_from_left(&mirrored, &s.mirrored(), &t.mirrored())?)
        } else if on_window(channel, t, last) {
            let mut p = mirror_path(path_from_left(&mirrored, &t.mirrored(), &s.mirrored())?);
            p.reverse();
            p
        } else {
            return Err(ChannelError::EndpointOutsideChannel(s.to_string()));
        }
    };
    Ok(TautPath::new(points))
}

fn validate_channel(channel: &Channel) -> Result<(), ChannelError> {
    Channel::new(channel.lower().to_vec(), channel.upper().to_vec()).map(|_| ())
}

/// Last edge and length of the shortest path from the source to one chain vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeEntry {
    /// Start of the final path edge (the vertex's parent), `None` for the source itself.
    pub parent: Option<Point2>,
    pub length: f64,
}

/// Shortest-path tree from a window point to every chain vertex.
#[derive(Debug, Clone)]
pub struct ShortestPathTree {
    source: Point2,
    lower: Vec<TreeEntry>,
    upper: Vec<TreeEntry>,
    lower_paths: Vec<usize>,
    upper_paths: Vec<usize>,
    nodes: Vec<Point2>,
    parents: Vec<Option<usize>>,
    mirrored: bool,
}

impl ShortestPathTree {
    pub fn source(&self) -> &Point2 {
        &self.source
    }

    pub fn upper(&self) -> &[TreeEntry] {
        &self.upper
    }

    pub fn lower(&self) -> &[TreeEntry] {
        &self.lower
    }

    fn path_of(&self, node: usize) -> TautPath {
        let mut points = vec![self.nodes[node].clone()];
        let mut cur = node;
        while let Some(p) = self.parents[cur] {
            points.push(self.nodes[p].clone());
            cur = p;
        }
        points.reverse();
        if self.mirrored {
            points = mirror_path(points);
        }
        TautPath::new(points)
    }

    pub fn path_to_upper(&self, i: usize) -> TautPath {
        self.path_of(self.upper_paths[i])
    }

    pub fn path_to_lower(&self, i: usize) -> TautPath {
        self.path_of(self.lower_paths[i])
    }
}

/// Builds the shortest-path tree from `s`, which must lie on the left or
/// right window of the channel.
pub fn shortest_path_tree(channel: &Channel, s: &Point2) -> Result<ShortestPathTree, ChannelError> {
    validate_channel(channel)?;
    let mirrored_channel;
    let (work, source, mirrored) = if on_window(channel, s, channel.x_first()) {
        (channel, s.clone(), false)
    } else if on_window(channel, s, channel.x_last()) {
        mirrored_channel = channel.mirrored();
        (&mirrored_channel, s.mirrored(), true)
    } else {
        return Err(ChannelError::EndpointOutsideChannel(s.to_string()));
    };
    let mut sweep = FunnelSweep::new(work, &source)?;
    sweep.advance_all();

    let n_nodes = sweep.nodes.len();
    let mut dist = vec![0.0f64; n_nodes];
    // Parents always precede children in node order.
    for node in 1..n_nodes {
        let p = sweep.parent_of(node).expect("non-source nodes have parents");
        dist[node] = dist[p] + sweep.node_point(p).distance(sweep.node_point(node));
    }
    let entry = |node: usize| TreeEntry {
        parent: sweep.parent_of(node).map(|p| {
            let pt = sweep.node_point(p).clone();
            if mirrored {
                pt.mirrored()
            } else {
                pt
            }
        }),
        length: dist[node],
    };
    let order = |len: usize| -> Box<dyn Fn(usize) -> usize> {
        if mirrored {
            Box::new(move |i| len - 1 - i)
        } else {
            Box::new(|i| i)
        }
    };
    let lower_len = work.lower().len();
    let upper_len = work.upper().len();
    let lower_map = order(lower_len);
    let upper_map = order(upper_len);
    let lower_paths: Vec<usize> = (0..lower_len)
        .map(|i| sweep.lower_node(lower_map(i)).expect("all vertices swept"))
        .collect();
    let upper_paths: Vec<usize> = (0..upper_len)
        .map(|i| sweep.upper_node(upper_map(i)).expect("all vertices swept"))
        .collect();
    Ok(ShortestPathTree {
        source: s.clone(),
        lower: lower_paths.iter().map(|&n| entry(n)).collect(),
        upper: upper_paths.iter().map(|&n| entry(n)).collect(),
        lower_paths,
        upper_paths,
        nodes: sweep.nodes.clone(),
        parents: sweep.parent.clone(),
        mirrored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{frac, int};
    use crate::terrain::{polygon_q, polygon_qp, ImpreciseTerrain1D, UncertainVertex1D};

    fn pt(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    fn m_terrain() -> ImpreciseTerrain1D {
        let rows = [(0, 0, 0), (1, 1, 1), (2, 0, 1), (3, 1, 1), (4, 0, 0)];
        ImpreciseTerrain1D::new(
            rows.iter()
                .map(|&(x, lo, hi)| {
                    let hi = if x == 2 { frac(1, 2) } else { int(hi) };
                    UncertainVertex1D::new(int(x), int(lo), hi)
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn straight_when_unobstructed() {
        let c = Channel::new(vec![pt(0, 0), pt(2, 0), pt(4, 0)], vec![pt(0, 3), pt(2, 3), pt(4, 3)]).unwrap();
        let path = taut_path(&c, &pt(0, 3), &pt(4, 0)).unwrap();
        assert_eq!(path.points(), &[pt(0, 3), pt(4, 0)]);
    }

    #[test]
    fn single_reflex_bottom_forces_bend() {
        let c = Channel::new(vec![pt(0, 1), pt(1, 3), pt(2, 1)], vec![pt(0, 1), pt(1, 10), pt(2, 1)]).unwrap();
        let path = taut_path(&c, &pt(0, 1), &pt(2, 1)).unwrap();
        assert_eq!(path.points(), &[pt(0, 1), pt(1, 3), pt(2, 1)]);
        // The bend over a lower-chain vertex turns clockwise.
        assert_eq!(orientation(&pt(0, 1), &pt(1, 3), &pt(2, 1)), Orientation::Right);
    }

    #[test]
    fn m_instance_pi() {
        let q = polygon_q(&m_terrain());
        let path = taut_path(&q, &pt(0, 0), &pt(4, 0)).unwrap();
        let half = Point2::new(int(2), frac(1, 2));
        assert_eq!(path.points(), &[pt(0, 0), pt(1, 1), half.clone(), pt(3, 1), pt(4, 0)]);
        // Reversed endpoints give the reversed path.
        let back = taut_path(&q, &pt(4, 0), &pt(0, 0)).unwrap();
        assert_eq!(back, path.reversed());

        let tree = shortest_path_tree(&q, &pt(0, 0)).unwrap();
        assert_eq!(tree.upper()[2].parent, Some(pt(1, 1)));
        assert_eq!(tree.path_to_upper(4), path);
        assert!((tree.upper()[4].length - path.length()).abs() < 1e-12);
    }

    #[test]
    fn tree_with_clear_sight_has_source_parents() {
        let c = Channel::new(vec![pt(0, 0), pt(1, 0), pt(3, 0)], vec![pt(0, 2), pt(1, 6), pt(3, 9)]).unwrap();
        let tree = shortest_path_tree(&c, &pt(0, 2)).unwrap();
        assert_eq!(tree.upper()[0].parent, None);
        for e in &tree.upper()[1..] {
            assert_eq!(e.parent, Some(pt(0, 2)));
        }
    }

    #[test]
    fn tree_from_right_window() {
        let q = polygon_q(&m_terrain());
        let tree = shortest_path_tree(&q, &pt(4, 0)).unwrap();
        // Path from t_n to t_1 reverses π.
        let pi = taut_path(&q, &pt(0, 0), &pt(4, 0)).unwrap();
        assert_eq!(tree.path_to_upper(0), pi.reversed());
        assert_eq!(tree.upper()[4].parent, None);
        assert_eq!(tree.upper()[2].parent, Some(pt(3, 1)));
    }

    #[test]
    fn apex_consistency_with_tree() {
        let q = polygon_q(&m_terrain());
        let qp = polygon_qp(&q, &Point2::new(frac(3, 2), int(2))).unwrap();
        let p = Point2::new(frac(3, 2), int(2));
        let tree = shortest_path_tree(&qp, &pt(0, 0)).unwrap();
        let idx = qp.upper().iter().position(|u| *u == p).unwrap();
        let direct = taut_path(&qp, &pt(0, 0), &p).unwrap();
        assert_eq!(tree.upper()[idx].parent.as_ref(), direct.last_edge().map(|(a, _)| a));
        assert_eq!(tree.path_to_upper(idx), direct);
    }

    #[test]
    fn rho1_toward_apex_crosses_interval() {
        let q = polygon_q(&m_terrain());
        // (2,2) sits on an interval abscissa, so use Q_p for a nearby apex.
        let p = Point2::new(frac(3, 2), int(2));
        let qp = polygon_qp(&q, &p).unwrap();
        let rho1 = taut_path(&qp, &pt(0, 0), &p).unwrap();
        let w = rho1.crossing_with_vertical(&int(1)).unwrap();
        assert_eq!(w, pt(1, 1));
        assert!(q.contains(&w));
    }

    #[test]
    fn crossings() {
        let path = TautPath::new(vec![pt(0, 0), pt(2, 2)]);
        assert_eq!(path.crossing_with_vertical(&int(1)).unwrap(), pt(1, 1));
        let bent = TautPath::new(vec![pt(0, 0), pt(1, 3), pt(2, 0)]);
        assert_eq!(bent.crossing_with_vertical(&int(1)).unwrap(), pt(1, 3));
        assert_eq!(bent.crossing_with_vertical(&int(2)).unwrap(), pt(2, 0));
        assert!(matches!(path.crossing_with_vertical(&int(3)), Err(ChannelError::OutOfRange(_))));
        let backwards = path.reversed();
        assert_eq!(backwards.crossing_with_vertical(&frac(1, 2)).unwrap(), Point2::new(frac(1, 2), frac(1, 2)));
    }

    #[test]
    fn endpoint_errors() {
        let c = Channel::new(vec![pt(0, 0), pt(2, 0)], vec![pt(0, 2), pt(2, 2)]).unwrap();
        assert!(matches!(taut_path(&c, &pt(1, 1), &pt(1, 2)), Err(ChannelError::EndpointOutsideChannel(_))));
        assert!(matches!(taut_path(&c, &pt(0, 5), &pt(2, 2)), Err(ChannelError::EndpointOutsideChannel(_))));
        assert!(matches!(taut_path(&c, &pt(0, 2), &pt(1, 7)), Err(ChannelError::EndpointOutsideChannel(_))));
    }

    #[test]
    fn interior_target_and_window_source() {
        let c = Channel::new(vec![pt(0, 0), pt(2, 3), pt(4, 0)], vec![pt(0, 5), pt(2, 5), pt(4, 5)]).unwrap();
        // Source mid-window, target mid-window on the far side.
        let path = taut_path(&c, &pt(0, 1), &pt(4, 1)).unwrap();
        assert_eq!(path.points(), &[pt(0, 1), pt(2, 3), pt(4, 1)]);
        let path = taut_path(&c, &pt(0, 1), &pt(3, 4)).unwrap();
        assert_eq!(path.points(), &[pt(0, 1), pt(3, 4)]);
    }
}
