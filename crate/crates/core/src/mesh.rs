//! 2.5D imprecise triangulated terrain.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::geom::{dot, orientation, Orientation, Point2, Point3, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeshError {
    #[error("mesh needs at least three vertices and one triangle")]
    TooSmall,
    #[error("vertex {0} has low > high")]
    IntervalInverted(usize),
    #[error("vertices {0} and {1} share an xy-projection")]
    DuplicateProjection(usize, usize),
    #[error("triangle {0} references a missing vertex")]
    BadIndex(usize),
    #[error("triangle {0} is degenerate")]
    DegenerateTriangle(usize),
    #[error("edge ({0}, {1}) borders more than two triangles")]
    EdgeOverused(usize, usize),
    #[error("edges ({0}, {1}) and ({2}, {3}) intersect")]
    CrossingEdges(usize, usize, usize, usize),
    #[error("vertex {0} lies inside triangle {1}")]
    VertexInsideTriangle(usize, usize),
    #[error("vertex {0} belongs to no triangle")]
    IsolatedVertex(usize),
    #[error("realization has {got} heights, mesh has {expected} vertices")]
    RealizationLength { expected: usize, got: usize },
    #[error("height of vertex {0} is outside its interval")]
    HeightOutsideInterval(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertainVertex2_5D {
    pub x: Scalar,
    pub y: Scalar,
    pub low: Scalar,
    pub high: Scalar,
}

impl UncertainVertex2_5D {
    pub fn new(x: Scalar, y: Scalar, low: Scalar, high: Scalar) -> Self {
        Self { x, y, low, high }
    }

    pub fn xy(&self) -> Point2 {
        Point2::new(self.x.clone(), self.y.clone())
    }

    pub fn at(&self, z: &Scalar) -> Point3 {
        Point3::new(self.x.clone(), self.y.clone(), z.clone())
    }
}

/// Undirected edge `a < b` with the triangles it borders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeshEdge {
    pub a: usize,
    pub b: usize,
    pub faces: Vec<usize>,
}

impl MeshEdge {
    pub fn touches(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    pub fn shares_endpoint(&self, other: &MeshEdge) -> bool {
        self.touches(other.a) || self.touches(other.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpreciseMesh2_5D {
    vertices: Vec<UncertainVertex2_5D>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<MeshEdge>,
    projections: Vec<Point2>,
}

/// Closed segment intersection in the plane.
pub(crate) fn segments_meet(p: &Point2, q: &Point2, r: &Point2, s: &Point2) -> bool {
    let o1 = orientation(p, q, r);
    let o2 = orientation(p, q, s);
    let o3 = orientation(r, s, p);
    let o4 = orientation(r, s, q);
    if o1 != o2 && o3 != o4 {
        return true;
    }
    let on = |a: &Point2, b: &Point2, c: &Point2, o: Orientation| {
        o == Orientation::Collinear && dot(c, a, b) <= Scalar::from_integer(0.into())
    };
    on(p, q, r, o1) || on(p, q, s, o2) || on(r, s, p, o3) || on(r, s, q, o4)
}

/// Whether `p` lies in the closed triangle `abc`.
pub(crate) fn in_triangle(a: &Point2, b: &Point2, c: &Point2, p: &Point2) -> bool {
    let o = [orientation(a, b, p), orientation(b, c, p), orientation(c, a, p)];
    !(o.contains(&Orientation::Left) && o.contains(&Orientation::Right))
}

impl ImpreciseMesh2_5D {
    pub fn new(vertices: Vec<UncertainVertex2_5D>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let n = vertices.len();
        if n < 3 || triangles.is_empty() {
            return Err(MeshError::TooSmall);
        }
        if let Some(i) = vertices.iter().position(|v| v.low > v.high) {
            return Err(MeshError::IntervalInverted(i));
        }
        let projections: Vec<Point2> = vertices.iter().map(UncertainVertex2_5D::xy).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            projections[i]
                .x
                .cmp(&projections[j].x)
                .then_with(|| projections[i].y.cmp(&projections[j].y))
        });
        for w in order.windows(2) {
            if projections[w[0]] == projections[w[1]] {
                return Err(MeshError::DuplicateProjection(w[0].min(w[1]), w[0].max(w[1])));
            }
        }

        let mut edge_faces: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let mut used = vec![false; n];
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                return Err(MeshError::BadIndex(t));
            }
            let [a, b, c] = *tri;
            if orientation(&projections[a], &projections[b], &projections[c]) == Orientation::Collinear {
                return Err(MeshError::DegenerateTriangle(t));
            }
            for (u, v) in [(a, b), (b, c), (c, a)] {
                let faces = edge_faces.entry((u.min(v), u.max(v))).or_default();
                faces.push(t);
                if faces.len() > 2 {
                    return Err(MeshError::EdgeOverused(u.min(v), u.max(v)));
                }
            }
            for &i in tri {
                used[i] = true;
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(MeshError::IsolatedVertex(i));
        }
        let edges: Vec<MeshEdge> = edge_faces
            .into_iter()
            .map(|((a, b), faces)| MeshEdge { a, b, faces })
            .collect();

        for (i, e) in edges.iter().enumerate() {
            for f in &edges[i + 1..] {
                let (p, q, r, s) = (&projections[e.a], &projections[e.b], &projections[f.a], &projections[f.b]);
                let bad = if e.shares_endpoint(f) {
                    // Shared endpoint: only a collinear overlap is a conflict.
                    let (common, e_other, f_other) = if e.a == f.a {
                        (p, q, s)
                    } else if e.a == f.b {
                        (p, q, r)
                    } else if e.b == f.a {
                        (q, p, s)
                    } else {
                        (q, p, r)
                    };
                    orientation(common, e_other, f_other) == Orientation::Collinear
                        && dot(common, e_other, f_other) > Scalar::from_integer(0.into())
                } else {
                    segments_meet(p, q, r, s)
                };
                if bad {
                    return Err(MeshError::CrossingEdges(e.a, e.b, f.a, f.b));
                }
            }
        }
        for (t, tri) in triangles.iter().enumerate() {
            let [a, b, c] = tri.map(|i| &projections[i]);
            for (v, p) in projections.iter().enumerate() {
                if !tri.contains(&v) && in_triangle(a, b, c, p) {
                    return Err(MeshError::VertexInsideTriangle(v, t));
                }
            }
        }

        Ok(Self {
            vertices,
            triangles,
            edges,
            projections,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[UncertainVertex2_5D] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &UncertainVertex2_5D {
        &self.vertices[i]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn projection(&self, i: usize) -> &Point2 {
        &self.projections[i]
    }

    pub fn tops(&self) -> Realization2_5D {
        Realization2_5D {
            z: self.vertices.iter().map(|v| v.high.clone()).collect(),
        }
    }

    pub fn bottoms(&self) -> Realization2_5D {
        Realization2_5D {
            z: self.vertices.iter().map(|v| v.low.clone()).collect(),
        }
    }

    /// The vertex of `face` opposite to `edge`.
    pub fn apex(&self, face: usize, edge: &MeshEdge) -> usize {
        *self.triangles[face]
            .iter()
            .find(|&&v| !edge.touches(v))
            .expect("triangle has a vertex off each of its edges")
    }
}

/// One height per mesh vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realization2_5D {
    pub z: Vec<Scalar>,
}

impl Realization2_5D {
    pub fn new(mesh: &ImpreciseMesh2_5D, z: Vec<Scalar>) -> Result<Self, MeshError> {
        let r = Self { z };
        r.respects(mesh)?;
        Ok(r)
    }

    pub fn respects(&self, mesh: &ImpreciseMesh2_5D) -> Result<(), MeshError> {
        if self.z.len() != mesh.len() {
            return Err(MeshError::RealizationLength {
                expected: mesh.len(),
                got: self.z.len(),
            });
        }
        for (i, (z, v)) in self.z.iter().zip(mesh.vertices()).enumerate() {
            if z < &v.low || z > &v.high {
                return Err(MeshError::HeightOutsideInterval(i));
            }
        }
        Ok(())
    }

    pub fn point(&self, mesh: &ImpreciseMesh2_5D, i: usize) -> Point3 {
        mesh.vertex(i).at(&self.z[i])
    }
}

/// A tower of height `tower_height` standing on vertex `base_vertex` at the top of its interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Viewpoint2_5D {
    pub base_vertex: usize,
    pub tower_height: Scalar,
}

impl Viewpoint2_5D {
    pub fn new(base_vertex: usize, tower_height: Scalar) -> Self {
        Self {
            base_vertex,
            tower_height,
        }
    }

    pub fn point(&self, mesh: &ImpreciseMesh2_5D) -> Point3 {
        let v = mesh.vertex(self.base_vertex);
        v.at(&(&v.high + &self.tower_height))
    }
}
