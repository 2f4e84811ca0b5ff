//! Procedural tessellations: analytic surfaces with known curvature and
//! relief-patterned height fields. Used by the test suites, the benchmarks
//! and the CLI's fixture generator.

use std::collections::HashMap;

use nalgebra::Point3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mesh::SurfaceTessellation;

fn build(vertices: Vec<Point3<f64>>, faces: Vec<Vec<usize>>) -> SurfaceTessellation {
    SurfaceTessellation::new(vertices, faces).expect("generated tessellation is valid")
}

/// Axis-aligned cube `[0, size]³` with outward-facing quads.
pub fn cube(size: f64) -> SurfaceTessellation {
    let s = size;
    let v = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(s, 0.0, 0.0),
        Point3::new(s, s, 0.0),
        Point3::new(0.0, s, 0.0),
        Point3::new(0.0, 0.0, s),
        Point3::new(s, 0.0, s),
        Point3::new(s, s, s),
        Point3::new(0.0, s, s),
    ];
    let f = vec![
        vec![0, 3, 2, 1],
        vec![4, 5, 6, 7],
        vec![0, 1, 5, 4],
        vec![1, 2, 6, 5],
        vec![2, 3, 7, 6],
        vec![3, 0, 4, 7],
    ];
    build(v, f)
}

/// Face layout for [`height_field`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFaces {
    /// Each grid cell split along its `(i, j)-(i+1, j+1)` diagonal.
    Triangles,
    Quads,
}

/// Grid of `nx × ny` vertices over `[0, (nx-1)·spacing] × [0, (ny-1)·spacing]`
/// lifted by `height(x, y)`. Interior vertices are displaced in the plane by
/// up to `jitter · spacing` (deterministic in `seed`). Vertex `(i, j)` has
/// index `j · nx + i`; faces wind counterclockwise seen from +z.
pub fn height_field(
    nx: usize,
    ny: usize,
    spacing: f64,
    jitter: f64,
    seed: u64,
    faces: GridFaces,
    height: impl Fn(f64, f64) -> f64,
) -> SurfaceTessellation {
    assert!(nx >= 2 && ny >= 2);
    assert!(jitter < 0.5, "jitter must keep grid cells convex");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (mut x, mut y) = (i as f64 * spacing, j as f64 * spacing);
            if jitter > 0.0 && i > 0 && j > 0 && i + 1 < nx && j + 1 < ny {
                x += rng.random_range(-jitter..jitter) * spacing;
                y += rng.random_range(-jitter..jitter) * spacing;
            }
            vertices.push(Point3::new(x, y, height(x, y)));
        }
    }
    let mut out = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let a = j * nx + i;
            let (b, c, d) = (a + 1, a + nx + 1, a + nx);
            match faces {
                GridFaces::Triangles => {
                    out.push(vec![a, b, c]);
                    out.push(vec![a, c, d]);
                }
                GridFaces::Quads => out.push(vec![a, b, c, d]),
            }
        }
    }
    build(vertices, out)
}

/// Flat regular triangle grid in the `z = 0` plane; interior valence 6.
pub fn triangle_grid(nx: usize, ny: usize, spacing: f64) -> SurfaceTessellation {
    height_field(nx, ny, spacing, 0.0, 0, GridFaces::Triangles, |_, _| 0.0)
}

pub fn quad_grid(nx: usize, ny: usize, spacing: f64) -> SurfaceTessellation {
    height_field(nx, ny, spacing, 0.0, 0, GridFaces::Quads, |_, _| 0.0)
}

/// Flat triangle grid with jittered interior vertices.
pub fn jittered_grid(nx: usize, ny: usize, spacing: f64, jitter: f64, seed: u64) -> SurfaceTessellation {
    height_field(nx, ny, spacing, jitter, seed, GridFaces::Triangles, |_, _| 0.0)
}

/// Geodesic sphere: icosahedron subdivided `level` times and projected onto
/// the sphere of `radius` centered at the origin. Level 5 has 10242 vertices.
pub fn icosphere(radius: f64, level: u32) -> SurfaceTessellation {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3<f64>> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point3::new(x, y, z))
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Point3<f64>>| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push(nalgebra::center(&verts[a], &verts[b]));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    for p in &mut vertices {
        *p = Point3::from(p.coords.normalize() * radius);
    }
    build(vertices, faces.iter().map(|f| f.to_vec()).collect())
}

/// Open cylindrical tube of `radius` around the z axis, `n_around` vertices
/// per circle and `n_along` circles over `[0, height]`. No caps.
pub fn cylinder(radius: f64, height: f64, n_around: usize, n_along: usize) -> SurfaceTessellation {
    let mut vertices = Vec::with_capacity(n_around * n_along);
    for j in 0..n_along {
        let z = height * j as f64 / (n_along - 1) as f64;
        for i in 0..n_around {
            let a = std::f64::consts::TAU * i as f64 / n_around as f64;
            vertices.push(Point3::new(radius * a.cos(), radius * a.sin(), z));
        }
    }
    let mut faces = Vec::new();
    for j in 0..n_along - 1 {
        for i in 0..n_around {
            let a = j * n_around + i;
            let b = j * n_around + (i + 1) % n_around;
            let (c, d) = (b + n_around, a + n_around);
            faces.push(vec![a, b, c]);
            faces.push(vec![a, c, d]);
        }
    }
    build(vertices, faces)
}

/// Flat disk in the `z = 0` plane: a center vertex and `rings` concentric
/// circles of `sectors` vertices each.
pub fn disk(radius: f64, rings: usize, sectors: usize) -> SurfaceTessellation {
    let mut vertices = vec![Point3::origin()];
    for r in 1..=rings {
        let rad = radius * r as f64 / rings as f64;
        for s in 0..sectors {
            let a = std::f64::consts::TAU * s as f64 / sectors as f64;
            vertices.push(Point3::new(rad * a.cos(), rad * a.sin(), 0.0));
        }
    }
    let idx = |r: usize, s: usize| 1 + (r - 1) * sectors + s % sectors;
    let mut faces = Vec::new();
    for s in 0..sectors {
        faces.push(vec![0, idx(1, s), idx(1, s + 1)]);
    }
    for r in 1..rings {
        for s in 0..sectors {
            faces.push(vec![idx(r, s), idx(r + 1, s), idx(r + 1, s + 1)]);
            faces.push(vec![idx(r, s), idx(r + 1, s + 1), idx(r, s + 1)]);
        }
    }
    build(vertices, faces)
}

/// Torus around the z axis with tube radius `minor`.
pub fn torus(major: f64, minor: f64, n_major: usize, n_minor: usize) -> SurfaceTessellation {
    let mut vertices = Vec::with_capacity(n_major * n_minor);
    for i in 0..n_major {
        let u = std::f64::consts::TAU * i as f64 / n_major as f64;
        for j in 0..n_minor {
            let v = std::f64::consts::TAU * j as f64 / n_minor as f64;
            let rho = major + minor * v.cos();
            vertices.push(Point3::new(rho * u.cos(), rho * u.sin(), minor * v.sin()));
        }
    }
    let idx = |i: usize, j: usize| (i % n_major) * n_minor + j % n_minor;
    let mut faces = Vec::new();
    for i in 0..n_major {
        for j in 0..n_minor {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push(vec![a, b, c]);
            faces.push(vec![a, c, d]);
        }
    }
    build(vertices, faces)
}

/// Closed triangle mesh with random geometry: a subdivided icosahedron
/// (`level` ≤ 3 keeps it under 2K vertices) with random radial noise and
/// anisotropic scaling.
pub fn random_closed_mesh(seed: u64, level: u32) -> SurfaceTessellation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = icosphere(1.0, level);
    let scale = [
        rng.random_range(3.0..8.0),
        rng.random_range(3.0..8.0),
        rng.random_range(3.0..8.0),
    ];
    let noise = rng.random_range(0.0..0.08);
    let lobes = rng.random_range(1..4) as f64;
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let jitter: Vec<f64> = (0..base.num_vertices())
        .map(|_| rng.random_range(-noise..=noise))
        .collect();
    let mut v = 0;
    base.map_positions(|p| {
        let bump = 1.0 + 0.15 * (lobes * p.x * 3.0 + phase).sin() * p.y + jitter[v];
        v += 1;
        Point3::new(p.x * scale[0] * bump, p.y * scale[1] * bump, p.z * scale[2] * bump)
    })
}

/// Relief patterns for the retrieval fixtures, as height functions of the
/// planar coordinates (mm).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relief {
    /// Parallel sinusoidal ridges along y.
    Ridges,
    /// Grid of round bumps.
    Bumps,
    /// Egg-crate product of sines.
    EggCrate,
    /// Diagonal grooves.
    Grooves,
    /// Sum of two orthogonal sine waves. Additively separable, so unjittered
    /// grid quads stay planar.
    Waves,
}

impl Relief {
    pub const ALL: [Relief; 4] = [Relief::Ridges, Relief::Bumps, Relief::EggCrate, Relief::Grooves];

    /// Height at `(x, y)` for a pattern of spatial `period` and `amplitude`.
    pub fn height(self, x: f64, y: f64, period: f64, amplitude: f64) -> f64 {
        use std::f64::consts::TAU;
        let (u, v) = (x / period, y / period);
        match self {
            Relief::Ridges => amplitude * (TAU * u).sin(),
            Relief::Bumps => {
                let du = u - u.round();
                let dv = v - v.round();
                let r2 = (du * du + dv * dv) / 0.12;
                amplitude * (-r2 * 2.0).exp()
            }
            Relief::EggCrate => amplitude * (TAU * u).sin() * (TAU * v).sin(),
            Relief::Grooves => {
                let w = (u + v) * 0.5;
                -amplitude * (TAU * w).cos().powi(8)
            }
            Relief::Waves => amplitude * ((TAU * u).sin() + 0.6 * (TAU * v * 1.5).cos()),
        }
    }
}

/// A square patch of side `side` mm sampled with about `n_vertices` vertices
/// and carrying `relief`. Different vertex counts sample the same surface.
/// Quad faces are only planar for [`Relief::Ridges`] and [`Relief::Waves`]
/// without jitter.
pub fn relief_patch(
    relief: Relief,
    side: f64,
    n_vertices: usize,
    jitter: f64,
    seed: u64,
    faces: GridFaces,
) -> SurfaceTessellation {
    let n = ((n_vertices as f64).sqrt().round() as usize).max(2);
    let spacing = side / (n - 1) as f64;
    let period = side / 6.0;
    let amplitude = side / 40.0;
    height_field(n, n, spacing, jitter, seed, faces, |x, y| relief.height(x, y, period, amplitude))
}
