//! Indexed polygonal surface tessellations.
//!
//! A [`SurfaceTessellation`] owns vertex positions (millimeters) and convex
//! polygon faces, and derives the edge set together with the adjacency maps
//! used by curvature estimation and ring extraction:
//!
//! - vertex → incident edges, sorted by the opposite vertex index
//! - edge → the one or two faces bounding it
//! - face → its boundary edges, in winding order
//!
//! The tessellation is validated at construction (2-manifold with boundary,
//! planar convex faces) and immutable afterwards, so it can be shared freely
//! between worker threads.

mod field;
mod io;

pub use field::VertexField;
pub use io::{load_mesh, load_mesh_auto, parse_obj, parse_off, parse_ply, write_off, MeshFormat};

use std::collections::HashMap;

use nalgebra::{Matrix3, Point3, Vector3};
use thiserror::Error;

/// Relative tolerance (times the bounding-box diagonal) for face planarity
/// and convexity checks.
pub const DEFAULT_FACE_TOLERANCE: f64 = 1e-6;

/// Errors raised while loading or querying a tessellation.
#[derive(Debug, Error)]
pub enum MeshError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("mesh has no vertices, faces or edges")]
    EmptyMesh,

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("face {face} is invalid: {reason}")]
    InvalidFace { face: usize, reason: String },

    #[error("edge ({0}, {1}) is shared by more than two faces")]
    NonManifold(usize, usize),

    #[error("face {face} is not a planar convex polygon: {reason}")]
    NonConvexFace { face: usize, reason: String },

    #[error("vertex {0} has a degenerate normal")]
    DegenerateNormal(usize),

    #[error("field value at vertex {0} is not finite")]
    NonFiniteField(usize),

    #[error("field has {found} values but the mesh has {expected} vertices")]
    FieldLength { expected: usize, found: usize },
}

/// An indexed polygon mesh with derived adjacency.
#[derive(Debug, Clone)]
pub struct SurfaceTessellation {
    vertices: Vec<Point3<f64>>,
    faces: Vec<Vec<usize>>,
    edges: Vec<[usize; 2]>,
    vertex_edges: Vec<Vec<usize>>,
    vertex_faces: Vec<Vec<usize>>,
    edge_faces: Vec<Vec<usize>>,
    face_edges: Vec<Vec<usize>>,
    boundary: Vec<bool>,
}

impl SurfaceTessellation {
    /// Builds and validates a tessellation with the default face tolerance.
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        Self::with_tolerance(vertices, faces, DEFAULT_FACE_TOLERANCE)
    }

    /// Builds and validates a tessellation. `relative_tolerance` is scaled by
    /// the bounding-box diagonal for the planarity and convexity checks.
    pub fn with_tolerance(
        vertices: Vec<Point3<f64>>,
        faces: Vec<Vec<usize>>,
        relative_tolerance: f64,
    ) -> Result<Self, MeshError> {
        if vertices.is_empty() || faces.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        let nv = vertices.len();
        if let Some(p) = vertices.iter().position(|p| !p.coords.iter().all(|c| c.is_finite())) {
            return Err(MeshError::Parse {
                line: 0,
                message: format!("vertex {p} has a non-finite coordinate"),
            });
        }

        for (fi, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(MeshError::InvalidFace {
                    face: fi,
                    reason: format!("{} vertices", face.len()),
                });
            }
            for &v in face {
                if v >= nv {
                    return Err(MeshError::IndexOutOfRange { index: v, limit: nv });
                }
            }
            for (i, &a) in face.iter().enumerate() {
                if face[i + 1..].contains(&a) {
                    return Err(MeshError::InvalidFace {
                        face: fi,
                        reason: format!("vertex {a} repeated"),
                    });
                }
            }
        }

        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut edge_faces: Vec<Vec<usize>> = Vec::new();
        let mut face_edges: Vec<Vec<usize>> = Vec::with_capacity(faces.len());
        for (fi, face) in faces.iter().enumerate() {
            let n = face.len();
            let mut fe = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (face[i], face[(i + 1) % n]);
                let key = (a.min(b), a.max(b));
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_faces.push(Vec::with_capacity(2));
                    edges.len() - 1
                });
                if edge_faces[e].len() == 2 {
                    return Err(MeshError::NonManifold(key.0, key.1));
                }
                edge_faces[e].push(fi);
                fe.push(e);
            }
            face_edges.push(fe);
        }

        let mut vertex_edges = vec![Vec::new(); nv];
        for (e, &[a, b]) in edges.iter().enumerate() {
            vertex_edges[a].push(e);
            vertex_edges[b].push(e);
        }
        for (v, list) in vertex_edges.iter_mut().enumerate() {
            list.sort_by_key(|&e| {
                let [a, b] = edges[e];
                if a == v {
                    b
                } else {
                    a
                }
            });
        }
        let mut vertex_faces = vec![Vec::new(); nv];
        for (fi, face) in faces.iter().enumerate() {
            for &v in face {
                vertex_faces[v].push(fi);
            }
        }
        let mut boundary = vec![false; nv];
        for (e, f) in edge_faces.iter().enumerate() {
            if f.len() == 1 {
                boundary[edges[e][0]] = true;
                boundary[edges[e][1]] = true;
            }
        }

        let mesh = Self {
            vertices,
            faces,
            edges,
            vertex_edges,
            vertex_faces,
            edge_faces,
            face_edges,
            boundary,
        };
        let tol = relative_tolerance * mesh.bounding_box_diagonal();
        for fi in 0..mesh.faces.len() {
            mesh.check_planar_convex(fi, tol)?;
        }
        Ok(mesh)
    }

    fn check_planar_convex(&self, fi: usize, tol: f64) -> Result<(), MeshError> {
        let face = &self.faces[fi];
        if face.len() == 3 {
            return Ok(());
        }
        let fail = |reason: &str| MeshError::NonConvexFace {
            face: fi,
            reason: reason.to_string(),
        };
        let normal = self.face_vector(fi);
        let norm = normal.norm();
        if norm <= f64::MIN_POSITIVE {
            return Err(fail("zero area"));
        }
        let n = normal / norm;
        let pts: Vec<Point3<f64>> = face.iter().map(|&v| self.vertices[v]).collect();
        let centroid = pts.iter().fold(Vector3::zeros(), |acc, p| acc + p.coords) / pts.len() as f64;
        if pts.iter().any(|p| (p.coords - centroid).dot(&n).abs() > tol) {
            return Err(fail("not planar"));
        }
        let k = pts.len();
        let mut turning = 0.0;
        for i in 0..k {
            let e0 = pts[(i + 1) % k] - pts[i];
            let e1 = pts[(i + 2) % k] - pts[(i + 1) % k];
            let turn = e0.cross(&e1).dot(&n);
            if turn < -tol * (e0.norm() + e1.norm()) {
                return Err(fail("reflex corner"));
            }
            turning += turn.atan2(e0.dot(&e1));
        }
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(fail("self-overlapping boundary"));
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    #[inline]
    pub fn position(&self, v: usize) -> &Point3<f64> {
        &self.vertices[v]
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    #[inline]
    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    /// Edges as vertex pairs with the smaller index first.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    /// The edges incident to `v`, sorted by the index of their other endpoint.
    pub fn vertex_edges(&self, v: usize) -> Result<&[usize], MeshError> {
        self.vertex_edges
            .get(v)
            .map(Vec::as_slice)
            .ok_or(MeshError::IndexOutOfRange {
                index: v,
                limit: self.vertices.len(),
            })
    }

    #[inline]
    pub(crate) fn incident_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    /// Faces incident to `v`, in ascending index order.
    #[inline]
    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    /// One face for boundary edges, two otherwise.
    #[inline]
    pub fn edge_faces(&self, e: usize) -> &[usize] {
        &self.edge_faces[e]
    }

    /// Edges of face `f`; entry `i` joins `face[i]` and `face[i + 1]`.
    #[inline]
    pub fn face_edges(&self, f: usize) -> &[usize] {
        &self.face_edges[f]
    }

    #[inline]
    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary[v]
    }

    #[inline]
    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_faces[e].len() == 1
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn is_closed(&self) -> bool {
        !self.boundary.iter().any(|&b| b)
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        let mut lo = self.vertices[0].coords;
        let mut hi = lo;
        for p in &self.vertices {
            lo = lo.inf(&p.coords);
            hi = hi.sup(&p.coords);
        }
        (hi - lo).norm()
    }

    /// Twice the area-weighted normal of face `f`, from a fan triangulation
    /// rooted at the first face vertex.
    pub fn face_vector(&self, f: usize) -> Vector3<f64> {
        let face = &self.faces[f];
        let p0 = self.vertices[face[0]];
        face.windows(2)
            .skip(1)
            .map(|w| (self.vertices[w[0]] - p0).cross(&(self.vertices[w[1]] - p0)))
            .sum()
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let face = &self.faces[f];
        let p0 = self.vertices[face[0]];
        face.windows(2)
            .skip(1)
            .map(|w| 0.5 * (self.vertices[w[0]] - p0).cross(&(self.vertices[w[1]] - p0)).norm())
            .sum()
    }

    /// Total area in mm², fan-triangulating every face from its first vertex.
    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        (self.vertices[b] - self.vertices[a]).norm()
    }

    pub fn mean_edge_length(&self) -> Result<f64, MeshError> {
        if self.edges.is_empty() {
            return Err(MeshError::EmptyMesh);
        }
        let total: f64 = (0..self.edges.len()).map(|e| self.edge_length(e)).sum();
        Ok(total / self.edges.len() as f64)
    }

    /// Unit normal at `v`: the area-weighted mean of the incident face
    /// normals, oriented by face winding.
    pub fn vertex_normal(&self, v: usize) -> Result<Vector3<f64>, MeshError> {
        let faces = self.vertex_faces.get(v).ok_or(MeshError::IndexOutOfRange {
            index: v,
            limit: self.vertices.len(),
        })?;
        let sum: Vector3<f64> = faces.iter().map(|&f| self.face_vector(f)).sum();
        let norm = sum.norm();
        if norm < 1e-12 {
            return Err(MeshError::DegenerateNormal(v));
        }
        Ok(sum / norm)
    }

    /// [`vertex_normal`](Self::vertex_normal) for every vertex, `None` where
    /// the normal is degenerate.
    pub fn vertex_normals(&self) -> Vec<Option<Vector3<f64>>> {
        let face_vectors: Vec<Vector3<f64>> = (0..self.faces.len()).map(|f| self.face_vector(f)).collect();
        self.vertex_faces
            .iter()
            .map(|faces| {
                let sum: Vector3<f64> = faces.iter().map(|&f| face_vectors[f]).sum();
                let norm = sum.norm();
                (norm >= 1e-12).then(|| sum / norm)
            })
            .collect()
    }

    /// Cheap admissibility prefilter: `false` for every vertex closer than
    /// `r_max` (Euclidean) to some boundary vertex. All `true` on closed meshes.
    pub fn boundary_distance_filter(&self, r_max: f64) -> Vec<bool> {
        let boundary: Vec<Point3<f64>> = self
            .vertices
            .iter()
            .zip(&self.boundary)
            .filter(|(_, &b)| b)
            .map(|(p, _)| *p)
            .collect();
        if boundary.is_empty() {
            return vec![true; self.vertices.len()];
        }
        let grid = PointGrid::new(&boundary, r_max);
        self.vertices
            .iter()
            .map(|p| !grid.any_within(&boundary, p, r_max))
            .collect()
    }

    /// A copy with every position mapped through `f`; connectivity is shared.
    pub fn map_positions(&self, mut f: impl FnMut(&Point3<f64>) -> Point3<f64>) -> Self {
        let mut out = self.clone();
        for p in &mut out.vertices {
            *p = f(p);
        }
        out
    }

    /// Applies `x ↦ rotation · x + translation`.
    pub fn rigid_transform(&self, rotation: &Matrix3<f64>, translation: &Vector3<f64>) -> Self {
        self.map_positions(|p| Point3::from(rotation * p.coords + translation))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map_positions(|p| Point3::from(p.coords * factor))
    }
}

/// Uniform bucket grid used for the fixed-radius boundary query.
struct PointGrid {
    cell: f64,
    buckets: HashMap<(i64, i64, i64), Vec<usize>>,
}

impl PointGrid {
    fn new(points: &[Point3<f64>], cell: f64) -> Self {
        let cell = if cell > 0.0 && cell.is_finite() { cell } else { 1.0 };
        let mut buckets: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(cell, p)).or_default().push(i);
        }
        Self { cell, buckets }
    }

    fn key(cell: f64, p: &Point3<f64>) -> (i64, i64, i64) {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    }

    fn any_within(&self, points: &[Point3<f64>], q: &Point3<f64>, radius: f64) -> bool {
        let (x, y, z) = Self::key(self.cell, q);
        let r2 = radius * radius;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.buckets.get(&(x + dx, y + dy, z + dz)) {
                        if ids.iter().any(|&i| (points[i] - q).norm_squared() < r2) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}
