//! Seeded instance generators shared by the benchmarks and the test suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geom::{frac, int, orientation, Orientation, Point2, Scalar};
use crate::mesh::{in_triangle, segments_meet, ImpreciseMesh2_5D, UncertainVertex2_5D};
use crate::terrain::{ImpreciseTerrain1D, UncertainVertex1D};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shape of a random 1.5D instance.
#[derive(Debug, Clone)]
pub struct TerrainParams {
    pub n: usize,
    /// Heights are drawn from `0..=max_height`.
    pub max_height: i64,
    /// Largest x step between consecutive vertices.
    pub max_gap: i64,
    /// Largest interval width, in units of `1 / denominator`.
    pub max_width: i64,
    /// Heights are multiples of `1 / denominator`.
    pub denominator: i64,
    /// Probability that an interval is a single point.
    pub precise_ratio: f64,
}

impl TerrainParams {
    pub fn precise(n: usize, max_coord: i64) -> Self {
        Self {
            n,
            max_height: max_coord,
            max_gap: 3,
            max_width: 0,
            denominator: 1,
            precise_ratio: 1.0,
        }
    }

    /// Large integer terrains for timing runs; a fifth of the intervals degenerate.
    pub fn bench(n: usize) -> Self {
        Self {
            n,
            max_height: 1000,
            max_gap: 3,
            max_width: 20,
            denominator: 1,
            precise_ratio: 0.2,
        }
    }

    pub fn small(n: usize) -> Self {
        Self {
            n,
            max_height: 6,
            max_gap: 3,
            max_width: 6,
            denominator: 2,
            precise_ratio: 0.2,
        }
    }
}

pub fn random_terrain_1d<R: Rng>(rng: &mut R, params: &TerrainParams) -> ImpreciseTerrain1D {
    let d = params.denominator;
    let mut x = 0i64;
    let mut vertices = Vec::with_capacity(params.n);
    for _ in 0..params.n {
        let low = rng.random_range(0..=params.max_height * d);
        let width = if params.max_width == 0 || rng.random_bool(params.precise_ratio) {
            0
        } else {
            rng.random_range(0..=params.max_width)
        };
        vertices.push(UncertainVertex1D::new(int(x), frac(low, d), frac(low + width, d)));
        x += rng.random_range(1..=params.max_gap);
    }
    ImpreciseTerrain1D::new(vertices).expect("generated terrain is valid")
}

/// Integer precise terrain with x and heights in `0..=max_coord`.
pub fn random_precise_terrain<R: Rng>(rng: &mut R, n: usize, max_coord: i64) -> ImpreciseTerrain1D {
    let mut xs: Vec<i64> = rand::seq::index::sample(rng, max_coord as usize + 1, n)
        .into_iter()
        .map(|x| x as i64)
        .collect();
    xs.sort_unstable();
    let points: Vec<Point2> = xs
        .into_iter()
        .map(|x| Point2::from_ints(x, rng.random_range(0..=max_coord)))
        .collect();
    ImpreciseTerrain1D::precise(&points).expect("distinct sorted abscissas")
}

/// Interval widened by up to `extra` on each side, in units of `1 / denominator`.
pub fn widen<R: Rng>(rng: &mut R, terrain: &ImpreciseTerrain1D, extra: i64, denominator: i64) -> ImpreciseTerrain1D {
    let vertices = terrain
        .vertices()
        .iter()
        .map(|v| {
            let down: Scalar = frac(rng.random_range(0..=extra), denominator);
            let up: Scalar = frac(rng.random_range(0..=extra), denominator);
            UncertainVertex1D::new(v.x.clone(), &v.low - down, &v.high + up)
        })
        .collect();
    ImpreciseTerrain1D::new(vertices).expect("widening keeps intervals valid")
}

/// Distinct integer points in `[0, bound]²`, no three collinear.
fn general_position_points<R: Rng>(rng: &mut R, n: usize, bound: i64) -> Vec<Point2> {
    let mut points: Vec<Point2> = Vec::with_capacity(n);
    while points.len() < n {
        let p = Point2::from_ints(rng.random_range(0..=bound), rng.random_range(0..=bound));
        let collinear = points.iter().enumerate().any(|(i, a)| {
            *a == p
                || points[i + 1..]
                    .iter()
                    .any(|b| orientation(a, b, &p) == Orientation::Collinear)
        });
        if !collinear {
            points.push(p);
        }
    }
    points
}

/// Greedy (shortest-edge-first) triangulation of points in general position.
pub fn greedy_triangulation(points: &[Point2]) -> Vec<[usize; 3]> {
    let n = points.len();
    let mut pairs: Vec<(Scalar, usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (points[i].squared_distance(&points[j]), i, j))
        .collect();
    pairs.sort();
    let mut adjacent = vec![vec![false; n]; n];
    let mut kept: Vec<(usize, usize)> = Vec::new();
    for (_, i, j) in pairs {
        let crosses = kept.iter().any(|&(a, b)| {
            a != i && a != j && b != i && b != j && segments_meet(&points[i], &points[j], &points[a], &points[b])
        });
        if !crosses {
            kept.push((i, j));
            adjacent[i][j] = true;
            adjacent[j][i] = true;
        }
    }
    let mut triangles = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !(adjacent[i][j] && adjacent[j][k] && adjacent[i][k]) {
                    continue;
                }
                let empty = (0..n)
                    .filter(|&w| w != i && w != j && w != k)
                    .all(|w| !in_triangle(&points[i], &points[j], &points[k], &points[w]));
                if empty {
                    triangles.push([i, j, k]);
                }
            }
        }
    }
    triangles
}

/// Shape of a random 2.5D instance.
#[derive(Debug, Clone)]
pub struct MeshParams {
    pub n: usize,
    /// xy-coordinates are drawn from `0..=xy_bound`.
    pub xy_bound: i64,
    /// Interval bottoms are drawn from `0..=max_low`.
    pub max_low: i64,
    pub max_width: i64,
}

impl MeshParams {
    pub fn small(n: usize) -> Self {
        Self {
            n,
            xy_bound: 10,
            max_low: 6,
            max_width: 6,
        }
    }
}

pub fn random_mesh<R: Rng>(rng: &mut R, params: &MeshParams) -> ImpreciseMesh2_5D {
    let points = general_position_points(rng, params.n, params.xy_bound);
    let triangles = greedy_triangulation(&points);
    let vertices = points
        .iter()
        .map(|p| {
            let low = rng.random_range(0..=params.max_low);
            let width = rng.random_range(0..=params.max_width);
            UncertainVertex2_5D::new(p.x.clone(), p.y.clone(), int(low), int(low + width))
        })
        .collect();
    ImpreciseMesh2_5D::new(vertices, triangles).expect("greedy triangulation is valid")
}

/// Five vertices: a flat outer triangle around two tall interior spikes.
/// Each spike hides part of the other from every vertex at height zero,
/// whatever the realization.
pub fn pit_mesh() -> ImpreciseMesh2_5D {
    let raw = [(0, 0, 0, 0), (12, 0, 0, 0), (6, 10, 0, 0), (5, 3, 8, 10), (7, 4, 8, 10)];
    let vertices = raw
        .iter()
        .map(|&(x, y, low, high)| UncertainVertex2_5D::new(int(x), int(y), int(low), int(high)))
        .collect();
    let triangles = vec![[0, 1, 3], [0, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]];
    ImpreciseMesh2_5D::new(vertices, triangles).expect("fixed valid mesh")
}
