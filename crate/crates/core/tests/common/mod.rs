//! Independent reference implementations shared by the integration tests.

#![allow(dead_code)]

use std::collections::VecDeque;

use edgelbp_core::descriptor::{elbp_code, ring_resampling, CodeCounts, DescriptorParams};
use edgelbp_core::ring::{ring_extraction, ring_radii, Ring, TIE_TOLERANCE};
use edgelbp_core::{SurfaceTessellation, VertexField};
use nalgebra::Point3;

pub struct UnionFind(Vec<usize>);

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Point where segment `e` meets the sphere, by bisection on the parameter.
pub fn bisect_crossing(mesh: &SurfaceTessellation, e: usize, center: usize, radius: f64) -> Point3<f64> {
    let [a, b] = mesh.edge(e);
    let c = mesh.position(center);
    let (pa, pb) = (mesh.position(a), mesh.position(b));
    let f = |t: f64| (pa + (pb - pa) * t - c).norm() - radius;
    let (mut lo, mut hi) = (0.0, 1.0);
    let lo_negative = f(lo) < 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    pa + (pb - pa) * (0.5 * (lo + hi))
}

/// Region vertices inside the sphere that share a face with the center's
/// component, by union-find over all faces.
pub fn inside_component(mesh: &SurfaceTessellation, center: usize, radius: f64) -> Vec<bool> {
    let c = mesh.position(center);
    let inside: Vec<bool> = (0..mesh.num_vertices())
        .map(|v| (mesh.position(v) - c).norm() < radius)
        .collect();
    let mut uf = UnionFind::new(mesh.num_vertices());
    for face in mesh.faces() {
        let ins: Vec<usize> = face.iter().copied().filter(|&v| inside[v]).collect();
        for w in ins.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let root = uf.find(center);
    (0..mesh.num_vertices()).map(|v| inside[v] && uf.find(v) == root).collect()
}

/// Every edge crossing the sphere whose inside endpoint belongs to the
/// center's component, with its bisection point. `None` when the component
/// holds a boundary vertex.
pub fn brute_force_crossings(
    mesh: &SurfaceTessellation,
    center: usize,
    radius: f64,
) -> Option<Vec<(usize, Point3<f64>)>> {
    let comp = inside_component(mesh, center, radius);
    if (0..mesh.num_vertices()).any(|v| comp[v] && mesh.is_boundary_vertex(v)) {
        return None;
    }
    let c = mesh.position(center);
    let inside = |v: usize| (mesh.position(v) - c).norm() < radius;
    Some(
        mesh.edges()
            .iter()
            .enumerate()
            .filter(|(_, &[a, b])| inside(a) != inside(b) && (comp[a] || comp[b]))
            .map(|(e, _)| (e, bisect_crossing(mesh, e, center, radius)))
            .collect(),
    )
}

/// Compares a ring with the brute-force crossing set at its own radius.
pub fn ring_matches_oracle(mesh: &SurfaceTessellation, ring: &Ring, tol: f64) -> Result<(), String> {
    let oracle = brute_force_crossings(mesh, ring.center, ring.radius)
        .ok_or_else(|| format!("oracle says the ring around {} is open", ring.center))?;
    if oracle.len() != ring.len() {
        return Err(format!(
            "vertex {} radius {}: {} points, oracle {}",
            ring.center,
            ring.radius,
            ring.len(),
            oracle.len()
        ));
    }
    for p in &ring.points {
        let (_, q) = oracle
            .iter()
            .find(|(e, _)| *e == p.host_edge)
            .ok_or_else(|| format!("edge {} is not an oracle crossing", p.host_edge))?;
        let d = (p.position - q).norm();
        if d > tol {
            return Err(format!("edge {} point off by {d:e}", p.host_edge));
        }
    }
    Ok(())
}

/// Picks among `candidates` the one with the largest summed distance to all
/// points, earliest on ties.
fn farthest(ring: &Ring, candidates: &[usize]) -> usize {
    let sum = |i: usize| -> f64 {
        ring.points
            .iter()
            .map(|q| (q.position - ring.points[i].position).norm())
            .sum()
    };
    let best = candidates.iter().map(|&i| sum(i)).fold(f64::NEG_INFINITY, f64::max);
    *candidates
        .iter()
        .find(|&&i| sum(i) >= best - TIE_TOLERANCE * best.abs())
        .unwrap()
}

/// Codes of one vertex with every ring extracted from scratch.
pub fn from_scratch_codes(
    mesh: &SurfaceTessellation,
    h: &VertexField,
    params: &DescriptorParams,
    v: usize,
) -> Option<Vec<u64>> {
    let mut rings = Vec::new();
    for r in ring_radii(params.r_max, params.n_rings) {
        rings.push(ring_extraction(mesh, v, r, h, None).ok()?);
    }
    let outer = rings.last().unwrap();
    let anchor = outer.points[outer.start_index].position;
    let last = rings.len() - 1;
    for ring in &mut rings[..last] {
        let d: Vec<f64> = ring.points.iter().map(|p| (p.position - anchor).norm()).collect();
        let best = d.iter().copied().fold(f64::INFINITY, f64::min);
        let tol = TIE_TOLERANCE * ring.radius;
        let cands: Vec<usize> = (0..d.len()).filter(|&i| d[i] <= best + tol).collect();
        ring.start_index = farthest(ring, &cands);
    }
    rings
        .iter()
        .map(|ring| {
            ring_resampling(ring, params.p)
                .ok()
                .map(|s| elbp_code(&s, h.get(v), params.alpha))
        })
        .collect()
}

/// Code counts of the whole mesh, one vertex at a time, no shared state.
pub fn from_scratch_counts(
    mesh: &SurfaceTessellation,
    h: &VertexField,
    params: &DescriptorParams,
) -> (CodeCounts, usize) {
    let mut counts = CodeCounts::new(params);
    let mut admissible = 0;
    for v in 0..mesh.num_vertices() {
        if let Some(codes) = from_scratch_codes(mesh, h, params, v) {
            admissible += 1;
            for (n, c) in codes.into_iter().enumerate() {
                counts.add(n, c);
            }
        }
    }
    (counts, admissible)
}

/// Hop distance from the nearest of `sources`, `usize::MAX` if unreachable.
pub fn hop_distance(mesh: &SurfaceTessellation, sources: &[usize]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; mesh.num_vertices()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        for &e in mesh.vertex_edges(v).unwrap() {
            let [a, b] = mesh.edge(e);
            let w = if a == v { b } else { a };
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn median(mut v: Vec<f64>) -> f64 {
    assert!(!v.is_empty());
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
