//! Principal curvatures from the normal-cycle curvature tensor, and the
//! scalar fields derived from them.
//!
//! Every edge of the (fan-triangulated) surface contributes
//! `β(e) · |e| · ê êᵀ`, where `β` is the signed dihedral angle between its two
//! triangles (positive on convex edges for outward normals). Half of each
//! contribution goes to either endpoint. The tensor at a vertex is the sum
//! over its `k`-hop neighborhood divided by the neighborhood's barycentric
//! area. Its eigenvector most aligned with the vertex normal is discarded and
//! the two remaining eigenvalues are the principal curvatures.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rayon::prelude::*;
use thiserror::Error;

use crate::mesh::{SurfaceTessellation, VertexField};

pub const DEFAULT_AVERAGING_RING: usize = 3;

/// Below this `|k1 − k2|` (1/mm) the shape index uses its umbilic limit.
pub const DEFAULT_UMBILIC_EPSILON: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CurvatureError {
    #[error("vertex {0} has a zero-area neighborhood")]
    DegenerateNeighborhood(usize),
    #[error("averaging ring size must be at least 1")]
    InvalidRingSize,
}

/// Per-vertex principal curvatures, `k1[v] <= k2[v]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalCurvatures {
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
}

impl PrincipalCurvatures {
    pub fn len(&self) -> usize {
        self.k1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k1.is_empty()
    }

    fn map(&self, name: &str, f: impl Fn(f64, f64) -> f64) -> VertexField {
        let values = self.k1.iter().zip(&self.k2).map(|(&a, &b)| f(a, b)).collect();
        VertexField::new(name, values).expect("curvature fields are finite")
    }
}

/// Triangulated view of a tessellation used for tensor accumulation.
struct Triangulation {
    tris: Vec<[usize; 3]>,
    neighbors: Vec<Vec<usize>>,
}

impl Triangulation {
    fn new(mesh: &SurfaceTessellation) -> Self {
        let mut tris = Vec::with_capacity(mesh.num_faces() * 2);
        for face in mesh.faces() {
            for w in face[1..].windows(2) {
                tris.push([face[0], w[0], w[1]]);
            }
        }
        let mut neighbors = vec![Vec::new(); mesh.num_vertices()];
        for t in &tris {
            for i in 0..3 {
                let (a, b) = (t[i], t[(i + 1) % 3]);
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
        for n in &mut neighbors {
            n.sort_unstable();
            n.dedup();
        }
        Self { tris, neighbors }
    }
}

fn signed_dihedral(a: Vector3<f64>, n1: &Vector3<f64>, n2: &Vector3<f64>, opposite2: Vector3<f64>) -> f64 {
    let angle = n1.cross(n2).norm().atan2(n1.dot(n2));
    if (opposite2 - a).dot(n1) > 0.0 {
        -angle
    } else {
        angle
    }
}

/// Estimates `k1 <= k2` at every vertex, averaging the curvature tensor over
/// the `averaging_ring_size`-hop neighborhood.
pub fn estimate_principal_curvatures(
    mesh: &SurfaceTessellation,
    averaging_ring_size: usize,
) -> Result<PrincipalCurvatures, CurvatureError> {
    if averaging_ring_size == 0 {
        return Err(CurvatureError::InvalidRingSize);
    }
    let tri = Triangulation::new(mesh);
    let pos = mesh.vertices();
    let nv = mesh.num_vertices();

    let mut tri_normal = Vec::with_capacity(tri.tris.len());
    let mut vertex_area = vec![0.0; nv];
    for t in &tri.tris {
        let c = (pos[t[1]] - pos[t[0]]).cross(&(pos[t[2]] - pos[t[0]]));
        let area = 0.5 * c.norm();
        for &v in t {
            vertex_area[v] += area / 3.0;
        }
        tri_normal.push(if area > 0.0 { c.normalize() } else { Vector3::zeros() });
    }

    let mut edge_tris: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (ti, t) in tri.tris.iter().enumerate() {
        for i in 0..3 {
            let (a, b) = (t[i], t[(i + 1) % 3]);
            edge_tris.entry((a.min(b), a.max(b))).or_default().push(ti);
        }
    }
    let mut edges: Vec<_> = edge_tris.into_iter().collect();
    edges.sort_unstable_by_key(|(k, _)| *k);

    let mut vertex_tensor = vec![Matrix3::<f64>::zeros(); nv];
    for ((a, b), ts) in &edges {
        let [t1, t2] = ts[..] else { continue };
        let opposite = tri.tris[t2].iter().copied().find(|v| v != a && v != b).unwrap();
        let beta = signed_dihedral(pos[*a].coords, &tri_normal[t1], &tri_normal[t2], pos[opposite].coords);
        let e = pos[*b] - pos[*a];
        let len = e.norm();
        if len == 0.0 || beta == 0.0 {
            continue;
        }
        let dir = e / len;
        let contribution = (dir * dir.transpose()) * (0.5 * beta * len);
        vertex_tensor[*a] += contribution;
        vertex_tensor[*b] += contribution;
    }

    let normals = mesh.vertex_normals();
    let per_vertex: Vec<Result<(f64, f64), CurvatureError>> = (0..nv)
        .into_par_iter()
        .map_init(
            || (vec![usize::MAX; nv], Vec::new()),
            |(mark, ring), v| {
                ring.clear();
                ring.push(v);
                mark[v] = v;
                let mut start = 0;
                for _ in 0..averaging_ring_size {
                    let end = ring.len();
                    for i in start..end {
                        for &w in &tri.neighbors[ring[i]] {
                            if mark[w] != v {
                                mark[w] = v;
                                ring.push(w);
                            }
                        }
                    }
                    start = end;
                }
                let area: f64 = ring.iter().map(|&u| vertex_area[u]).sum();
                let normal = normals[v].ok_or(CurvatureError::DegenerateNeighborhood(v))?;
                if area <= 0.0 {
                    return Err(CurvatureError::DegenerateNeighborhood(v));
                }
                let tensor = ring.iter().fold(Matrix3::zeros(), |acc, &u| acc + vertex_tensor[u]) / area;
                Ok(tangent_eigenvalues(&tensor, &normal))
            },
        )
        .collect();

    let mut k1 = Vec::with_capacity(nv);
    let mut k2 = Vec::with_capacity(nv);
    for r in per_vertex {
        let (a, b) = r?;
        k1.push(a);
        k2.push(b);
    }
    Ok(PrincipalCurvatures { k1, k2 })
}

/// The two eigenvalues whose eigenvectors are least aligned with `normal`,
/// ascending.
fn tangent_eigenvalues(tensor: &Matrix3<f64>, normal: &Vector3<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(*tensor);
    let alignment = |i: usize| eig.eigenvectors.column(i).dot(normal).abs();
    let discard = (0..3)
        .max_by(|&i, &j| alignment(i).total_cmp(&alignment(j)).then(j.cmp(&i)))
        .unwrap();
    let mut kept = (0..3).filter(|&i| i != discard).map(|i| eig.eigenvalues[i]);
    let (a, b) = (kept.next().unwrap(), kept.next().unwrap());
    (a.min(b), a.max(b))
}

/// `H = (k1 + k2) / 2`.
pub fn mean_curvature(pc: &PrincipalCurvatures) -> VertexField {
    pc.map("H", |a, b| (a + b) / 2.0)
}

/// `K = k1 · k2`.
pub fn gaussian_curvature(pc: &PrincipalCurvatures) -> VertexField {
    pc.map("K", |a, b| a * b)
}

/// `SI = (2/π) arctan((k1 + k2) / (k1 − k2))`.
///
/// Near umbilics (`|k1 − k2| < umbilic_epsilon`) the value is
/// `sign(k1 + k2)`, or 0 when `|k1 + k2| < umbilic_epsilon` as well.
pub fn shape_index(pc: &PrincipalCurvatures, umbilic_epsilon: f64) -> VertexField {
    pc.map("SI", |k1, k2| {
        let (sum, diff) = (k1 + k2, k1 - k2);
        if diff.abs() < umbilic_epsilon {
            if sum.abs() < umbilic_epsilon {
                0.0
            } else {
                sum.signum()
            }
        } else {
            std::f64::consts::FRAC_2_PI * (sum / diff).atan()
        }
    })
}

/// `sqrt((k1² + k2²) / 2)`.
pub fn curvedness(pc: &PrincipalCurvatures) -> VertexField {
    pc.map("curvedness", |a, b| ((a * a + b * b) / 2.0).sqrt())
}

/// The curvature quantities usable as the coded function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum FieldKind {
    #[serde(rename = "k1")]
    K1,
    #[serde(rename = "k2")]
    K2,
    #[serde(rename = "H")]
    Mean,
    #[serde(rename = "K")]
    Gaussian,
    #[serde(rename = "SI")]
    ShapeIndex,
    #[serde(rename = "curvedness")]
    Curvedness,
}

impl FieldKind {
    pub const ALL: [FieldKind; 6] = [
        FieldKind::K1,
        FieldKind::K2,
        FieldKind::Mean,
        FieldKind::Gaussian,
        FieldKind::ShapeIndex,
        FieldKind::Curvedness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::K1 => "k1",
            FieldKind::K2 => "k2",
            FieldKind::Mean => "H",
            FieldKind::Gaussian => "K",
            FieldKind::ShapeIndex => "SI",
            FieldKind::Curvedness => "curvedness",
        }
    }

    pub fn evaluate(self, pc: &PrincipalCurvatures) -> VertexField {
        match self {
            FieldKind::K1 => pc.map("k1", |a, _| a),
            FieldKind::K2 => pc.map("k2", |_, b| b),
            FieldKind::Mean => mean_curvature(pc),
            FieldKind::Gaussian => gaussian_curvature(pc),
            FieldKind::ShapeIndex => shape_index(pc, DEFAULT_UMBILIC_EPSILON),
            FieldKind::Curvedness => curvedness(pc),
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FieldKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FieldKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown field {s:?} (expected one of k1, k2, H, K, SI, curvedness)"))
    }
}

/// Estimates curvature with the default averaging ring and evaluates `kind`.
pub fn curvature_field(mesh: &SurfaceTessellation, kind: FieldKind) -> Result<VertexField, CurvatureError> {
    let pc = estimate_principal_curvatures(mesh, DEFAULT_AVERAGING_RING)?;
    Ok(kind.evaluate(&pc))
}
