//! Rings: closed curves where a sphere centered at a vertex cuts the surface.
//!
//! A ring is found by growing the region of vertices strictly inside the
//! sphere outward from the center, one edge at a time. Edges leaving the
//! region carry one intersection point each; points are chained into a
//! polyline through the faces they share. Concentric rings reuse the previous
//! region, so each radius only visits the edges near its own frontier.

use std::io::{self, Write};

use nalgebra::{Point3, Vector3};
use thiserror::Error;

use crate::mesh::{SurfaceTessellation, VertexField};

/// Endpoints within `TANGENCY_TOLERANCE · R` of the sphere trigger a retry.
pub const TANGENCY_TOLERANCE: f64 = 1e-9;
/// Relative radius increase applied on each tangency retry.
pub const TANGENCY_PERTURBATION: f64 = 1e-7;
pub const MAX_TANGENCY_RETRIES: usize = 16;
/// Relative tolerance under which start-point candidates count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RingError {
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("vertex {0} is out of range")]
    VertexOutOfRange(usize),
    #[error("field has {found} values but the mesh has {expected} vertices")]
    FieldLength { expected: usize, found: usize },
    #[error("edge {edge} has an endpoint on the sphere of radius {radius}")]
    TangentEdge { edge: usize, radius: f64 },
    #[error("sphere around vertex {center} still touches a vertex at radius {radius}")]
    PersistentTangency { center: usize, radius: f64 },
    #[error("ring of radius {radius} around vertex {center} reaches the mesh boundary")]
    OpenRing { center: usize, radius: f64 },
    #[error("region of radius {radius} around vertex {center} is bounded by {loops} curves")]
    MultiComponentBoundary { center: usize, radius: f64, loops: usize },
    #[error("ring of radius {radius} around vertex {center} has only {points} points")]
    DegenerateRing { center: usize, radius: f64, points: usize },
    #[error("vertex {0} has no well-defined normal")]
    DegenerateNormal(usize),
}

/// Intersection of the sphere with one mesh edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingPoint {
    pub position: Point3<f64>,
    pub host_edge: usize,
    /// Parameter along the host edge, measured from its first vertex.
    pub edge_parameter: f64,
    pub h_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    pub center: usize,
    /// Effective radius, which differs from the requested one only after a
    /// tangency retry.
    pub radius: f64,
    pub points: Vec<RingPoint>,
    pub closed: bool,
    pub start_index: usize,
}

impl Ring {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in order, beginning at `start_index`.
    pub fn from_start(&self) -> impl Iterator<Item = &RingPoint> + '_ {
        let (head, tail) = self.points.split_at(self.start_index);
        tail.iter().chain(head)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiRing {
    pub center: usize,
    pub rings: Vec<Ring>,
    pub admissible: bool,
    /// Why the vertex is not admissible.
    pub failure: Option<RingError>,
}

/// The `n_rings` uniformly spaced radii ending at `r_max`.
pub fn ring_radii(r_max: f64, n_rings: usize) -> Vec<f64> {
    (1..=n_rings).map(|k| r_max * k as f64 / n_rings as f64).collect()
}

fn check_tangent(d: f64, radius: f64) -> bool {
    (d - radius).abs() <= TANGENCY_TOLERANCE * radius
}

/// Intersects edge `e` with the sphere of radius `radius` around `center`.
///
/// Returns `None` unless exactly one endpoint lies inside the sphere.
pub fn edge_sphere_intersection(
    mesh: &SurfaceTessellation,
    e: usize,
    center: usize,
    radius: f64,
    h: &VertexField,
) -> Result<Option<RingPoint>, RingError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(RingError::InvalidRadius(radius));
    }
    let c = mesh.position(center);
    let [a, b] = mesh.edge(e);
    let (pa, pb) = (mesh.position(a), mesh.position(b));
    let (da, db) = ((pa - c).norm(), (pb - c).norm());
    if check_tangent(da, radius) || check_tangent(db, radius) {
        return Err(RingError::TangentEdge { edge: e, radius });
    }
    if (da - radius) * (db - radius) >= 0.0 {
        return Ok(None);
    }
    let a_inside = da < radius;
    let (inside, outside) = if a_inside { (pa, pb) } else { (pb, pa) };
    let u = inside - c;
    let w = outside - inside;
    let uw = u.dot(&w);
    let gap = radius * radius - u.norm_squared();
    let disc = (uw * uw + w.norm_squared() * gap).max(0.0);
    let t_inside = if uw >= 0.0 {
        gap / (uw + disc.sqrt())
    } else {
        (disc.sqrt() - uw) / w.norm_squared()
    }
    .clamp(0.0, 1.0);
    let position = inside + w * t_inside;
    let t = if a_inside { t_inside } else { 1.0 - t_inside };
    let (ha, hb) = (h.get(a), h.get(b));
    Ok(Some(RingPoint {
        position,
        host_edge: e,
        edge_parameter: t,
        h_value: ha + t * (hb - ha),
    }))
}

/// Reusable scratch state for ring extraction on one mesh.
///
/// Keep one per worker thread; it grows to the mesh size on first use.
#[derive(Debug, Default)]
pub struct RingWorkspace {
    region: Vec<u32>,
    final_edge: Vec<u32>,
    visited: Vec<u32>,
    slot_pass: Vec<u32>,
    slot: Vec<u32>,
    face_seen: Vec<u32>,
    owner: u32,
    pass: u32,
    queue: Vec<usize>,
    crossings: Vec<usize>,
    frontier: Vec<usize>,
    added: Vec<usize>,
    finalized: Vec<usize>,
    links: Vec<[u32; 2]>,
    link_count: Vec<u8>,
}

impl RingWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    fn fit(&mut self, mesh: &SurfaceTessellation) {
        let (nv, ne, nf) = (mesh.num_vertices(), mesh.num_edges(), mesh.num_faces());
        if self.region.len() != nv || self.visited.len() != ne || self.face_seen.len() != nf {
            *self = Self {
                region: vec![0; nv],
                final_edge: vec![0; ne],
                visited: vec![0; ne],
                slot_pass: vec![0; ne],
                slot: vec![0; ne],
                face_seen: vec![0; nf],
                ..Self::default()
            };
        }
    }

    fn next_owner(&mut self) {
        if self.owner == u32::MAX {
            self.region.fill(0);
            self.final_edge.fill(0);
            self.owner = 0;
        }
        self.owner += 1;
    }

    fn next_pass(&mut self) {
        if self.pass == u32::MAX {
            self.visited.fill(0);
            self.slot_pass.fill(0);
            self.face_seen.fill(0);
            self.pass = 0;
        }
        self.pass += 1;
    }
}

enum GrowStop {
    Tangent,
    Open,
}

/// Grows rings of increasing radius around one center.
struct Extractor<'a> {
    mesh: &'a SurfaceTessellation,
    h: &'a VertexField,
    center: usize,
    ws: &'a mut RingWorkspace,
}

impl<'a> Extractor<'a> {
    fn start(
        mesh: &'a SurfaceTessellation,
        h: &'a VertexField,
        center: usize,
        ws: &'a mut RingWorkspace,
    ) -> Result<Self, RingError> {
        if center >= mesh.num_vertices() {
            return Err(RingError::VertexOutOfRange(center));
        }
        if h.len() != mesh.num_vertices() {
            return Err(RingError::FieldLength {
                expected: mesh.num_vertices(),
                found: h.len(),
            });
        }
        ws.fit(mesh);
        ws.next_owner();
        ws.region[center] = ws.owner;
        ws.frontier.clear();
        ws.frontier.extend_from_slice(mesh.incident_edges(center));
        Ok(Self { mesh, h, center, ws })
    }

    fn in_region(&self, v: usize) -> bool {
        self.ws.region[v] == self.ws.owner
    }

    /// Returns whether `v` belongs to the region, adding it if it lies
    /// inside the sphere.
    fn classify(&mut self, v: usize, radius: f64) -> Result<bool, GrowStop> {
        if self.in_region(v) {
            return Ok(true);
        }
        let d = (self.mesh.position(v) - self.mesh.position(self.center)).norm();
        if check_tangent(d, radius) {
            return Err(GrowStop::Tangent);
        }
        if d >= radius {
            return Ok(false);
        }
        if self.mesh.is_boundary_vertex(v) {
            return Err(GrowStop::Open);
        }
        self.ws.region[v] = self.ws.owner;
        self.ws.added.push(v);
        self.ws.queue.extend_from_slice(self.mesh.incident_edges(v));
        Ok(true)
    }

    fn grow(&mut self, radius: f64) -> Result<(), GrowStop> {
        if self.mesh.is_boundary_vertex(self.center) {
            return Err(GrowStop::Open);
        }
        self.ws.next_pass();
        self.ws.crossings.clear();
        self.ws.added.clear();
        self.ws.finalized.clear();
        self.ws.queue.clear();
        self.ws.queue.extend_from_slice(&self.ws.frontier);
        let (owner, pass) = (self.ws.owner, self.ws.pass);
        while let Some(e) = self.ws.queue.pop() {
            if self.ws.visited[e] == pass || self.ws.final_edge[e] == owner {
                continue;
            }
            self.ws.visited[e] = pass;
            let [a, b] = self.mesh.edge(e);
            let ia = self.classify(a, radius)?;
            let ib = self.classify(b, radius)?;
            if ia && ib {
                self.ws.final_edge[e] = owner;
                self.ws.finalized.push(e);
            } else if ia || ib {
                self.ws.crossings.push(e);
                for &f in self.mesh.edge_faces(e) {
                    for &y in self.mesh.face(f) {
                        self.classify(y, radius)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn rollback(&mut self) {
        for &v in &self.ws.added {
            self.ws.region[v] = 0;
        }
        for &e in &self.ws.finalized {
            self.ws.final_edge[e] = 0;
        }
    }

    /// Extracts the next ring; on success the frontier advances to it.
    fn extract(&mut self, radius: f64) -> Result<Ring, RingError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(RingError::InvalidRadius(radius));
        }
        let mut r = radius;
        for _ in 0..=MAX_TANGENCY_RETRIES {
            match self.grow(r) {
                Ok(()) => return self.chain(r),
                Err(GrowStop::Open) => {
                    self.rollback();
                    return Err(RingError::OpenRing {
                        center: self.center,
                        radius: r,
                    });
                }
                Err(GrowStop::Tangent) => {
                    self.rollback();
                    r *= 1.0 + TANGENCY_PERTURBATION;
                }
            }
        }
        Err(RingError::PersistentTangency {
            center: self.center,
            radius: r,
        })
    }

    fn link(&mut self, e1: usize, e2: usize) {
        let (s1, s2) = (self.ws.slot[e1] as usize, self.ws.slot[e2] as usize);
        for (s, other) in [(s1, s2), (s2, s1)] {
            let n = self.ws.link_count[s] as usize;
            if n < 2 {
                self.ws.links[s][n] = other as u32;
            }
            self.ws.link_count[s] += 1;
        }
    }

    /// Within face `f`, pairs each region-to-outside crossing with the next
    /// outside-to-region crossing walking around the face.
    fn link_face(&mut self, f: usize) {
        let verts = self.mesh.face(f);
        let k = verts.len();
        let mut transitions: Vec<(usize, bool)> = Vec::with_capacity(4);
        for j in 0..k {
            let (x, y) = (self.in_region(verts[j]), self.in_region(verts[(j + 1) % k]));
            if x != y {
                transitions.push((self.mesh.face_edges(f)[j], x));
            }
        }
        let m = transitions.len();
        for t in 0..m {
            let (e_out, leaving) = transitions[t];
            if leaving {
                let (e_in, _) = transitions[(t + 1) % m];
                self.link(e_out, e_in);
            }
        }
    }

    fn chain(&mut self, radius: f64) -> Result<Ring, RingError> {
        self.ws.crossings.sort_unstable();
        let pass = self.ws.pass;
        let n = self.ws.crossings.len();
        for i in 0..n {
            let e = self.ws.crossings[i];
            self.ws.slot_pass[e] = pass;
            self.ws.slot[e] = i as u32;
        }
        self.ws.links.clear();
        self.ws.links.resize(n, [0; 2]);
        self.ws.link_count.clear();
        self.ws.link_count.resize(n, 0);
        for i in 0..n {
            let e = self.ws.crossings[i];
            for fi in 0..self.mesh.edge_faces(e).len() {
                let f = self.mesh.edge_faces(e)[fi];
                if self.ws.face_seen[f] != pass {
                    self.ws.face_seen[f] = pass;
                    self.link_face(f);
                }
            }
        }
        debug_assert!(self.ws.link_count.iter().all(|&c| c == 2));

        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut loops = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            loops += 1;
            let mut prev = usize::MAX;
            let mut cur = s;
            loop {
                seen[cur] = true;
                if loops == 1 {
                    order.push(cur);
                }
                let [x, y] = self.ws.links[cur].map(|l| l as usize);
                let next = if prev == usize::MAX {
                    x.min(y)
                } else if x != prev {
                    x
                } else {
                    y
                };
                if seen[next] {
                    break;
                }
                prev = cur;
                cur = next;
            }
        }
        self.ws.frontier.clear();
        self.ws.frontier.extend_from_slice(&self.ws.crossings);

        if loops > 1 {
            return Err(RingError::MultiComponentBoundary {
                center: self.center,
                radius,
                loops,
            });
        }
        if n < 3 {
            return Err(RingError::DegenerateRing {
                center: self.center,
                radius,
                points: n,
            });
        }
        let mut points = Vec::with_capacity(n);
        for &s in &order {
            let e = self.ws.crossings[s];
            match edge_sphere_intersection(self.mesh, e, self.center, radius, self.h)? {
                Some(p) => points.push(p),
                None => unreachable!("crossing edge {e} has no intersection"),
            }
        }
        Ok(Ring {
            center: self.center,
            radius,
            points,
            closed: true,
            start_index: 0,
        })
    }
}

/// Extracts and sorts the ring of radius `radius` around `center`.
///
/// Growth starts from the edges around `center`, plus `seed_edges` when
/// given; seeds are normally the host edges of a smaller ring at the same
/// center. The result does not depend on the seeds.
pub fn ring_extraction(
    mesh: &SurfaceTessellation,
    center: usize,
    radius: f64,
    h: &VertexField,
    seed_edges: Option<&[usize]>,
) -> Result<Ring, RingError> {
    let normal = mesh
        .vertex_normal(center)
        .map_err(|_| RingError::DegenerateNormal(center))?;
    let mut ws = RingWorkspace::new();
    let mut ex = Extractor::start(mesh, h, center, &mut ws)?;
    if let Some(seeds) = seed_edges {
        ex.ws.frontier.extend(seeds.iter().copied().filter(|&e| e < mesh.num_edges()));
    }
    let ring = ex.extract(radius)?;
    Ok(sort_ring(ring, &normal))
}

/// Signed area of the ring polygon projected along `normal`, doubled.
fn projected_area(points: &[RingPoint], origin: &Point3<f64>, normal: &Vector3<f64>) -> f64 {
    let m = points.len();
    (0..m)
        .map(|i| {
            let a = points[i].position - origin;
            let b = points[(i + 1) % m].position - origin;
            a.cross(&b).dot(normal)
        })
        .sum()
}

/// Among `candidates` (ascending chain positions), picks the one farthest in
/// summed distance from all ring points; remaining ties go to the earliest.
fn farthest_from_others(points: &[RingPoint], candidates: &[usize]) -> usize {
    if candidates.len() == 1 {
        return candidates[0];
    }
    let sums: Vec<f64> = candidates
        .iter()
        .map(|&i| points.iter().map(|q| (q.position - points[i].position).norm()).sum())
        .collect();
    let best = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = TIE_TOLERANCE * best.abs();
    candidates
        .iter()
        .zip(&sums)
        .find(|(_, &s)| s >= best - tol)
        .map(|(&i, _)| i)
        .unwrap()
}

/// Orients `ring` counterclockwise about `normal` and sets its start to the
/// point of maximal `h`.
///
/// The first chain point keeps its position when the order is reversed.
/// Ties in `h` (relative tolerance [`TIE_TOLERANCE`]) go to the candidate
/// with the largest summed distance to the other points.
pub fn sort_ring(mut ring: Ring, normal: &Vector3<f64>) -> Ring {
    if ring.points.is_empty() {
        return ring;
    }
    let center = ring.points.iter().fold(Vector3::zeros(), |acc, p| acc + p.position.coords)
        / ring.points.len() as f64;
    if projected_area(&ring.points, &Point3::from(center), normal) < 0.0 {
        ring.points[1..].reverse();
    }
    let h_max = ring.points.iter().map(|p| p.h_value).fold(f64::NEG_INFINITY, f64::max);
    let scale = ring.points.iter().map(|p| p.h_value.abs()).fold(0.0, f64::max);
    let tol = TIE_TOLERANCE * scale;
    let candidates: Vec<usize> = (0..ring.points.len())
        .filter(|&i| ring.points[i].h_value >= h_max - tol)
        .collect();
    ring.start_index = farthest_from_others(&ring.points, &candidates);
    ring
}

/// Sets the start of `ring` to its point closest to `anchor`.
fn anchor_start(ring: &mut Ring, anchor: &Point3<f64>) {
    let dist: Vec<f64> = ring.points.iter().map(|p| (p.position - anchor).norm()).collect();
    let best = dist.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = TIE_TOLERANCE * ring.radius;
    let candidates: Vec<usize> = (0..dist.len()).filter(|&i| dist[i] <= best + tol).collect();
    ring.start_index = farthest_from_others(&ring.points, &candidates);
}

/// Extracts `n_rings` concentric rings up to `r_max` around `center`.
///
/// The outermost ring starts at its maximum of `h`; every inner ring starts
/// at its point closest to that one. Any extraction failure makes the vertex
/// non-admissible.
pub fn multi_ring(
    mesh: &SurfaceTessellation,
    center: usize,
    r_max: f64,
    n_rings: usize,
    h: &VertexField,
) -> MultiRing {
    multi_ring_with(&mut RingWorkspace::new(), mesh, center, r_max, n_rings, h)
}

/// [`multi_ring`] with caller-provided scratch space.
pub fn multi_ring_with(
    ws: &mut RingWorkspace,
    mesh: &SurfaceTessellation,
    center: usize,
    r_max: f64,
    n_rings: usize,
    h: &VertexField,
) -> MultiRing {
    let fail = |rings, err| MultiRing {
        center,
        rings,
        admissible: false,
        failure: Some(err),
    };
    if n_rings == 0 || !(r_max > 0.0 && r_max.is_finite()) {
        return fail(Vec::new(), RingError::InvalidRadius(r_max));
    }
    let normal = match mesh.vertex_normal(center) {
        Ok(n) => n,
        Err(_) => return fail(Vec::new(), RingError::DegenerateNormal(center)),
    };
    let mut ex = match Extractor::start(mesh, h, center, ws) {
        Ok(ex) => ex,
        Err(err) => return fail(Vec::new(), err),
    };
    let mut rings = Vec::with_capacity(n_rings);
    for radius in ring_radii(r_max, n_rings) {
        match ex.extract(radius) {
            Ok(ring) => rings.push(sort_ring(ring, &normal)),
            Err(err) => return fail(rings, err),
        }
    }
    let (outer, inner) = rings.split_last_mut().unwrap();
    let anchor = outer.points[outer.start_index].position;
    for ring in inner {
        anchor_start(ring, &anchor);
    }
    MultiRing {
        center,
        rings,
        admissible: true,
        failure: None,
    }
}

/// Writes the rings as OBJ polylines, one object per radius, each starting
/// at its start point.
pub fn write_rings_obj<W: Write>(mut w: W, multi: &MultiRing) -> io::Result<()> {
    let mut base = 1;
    for (k, ring) in multi.rings.iter().enumerate() {
        writeln!(w, "o ring_{}_{}", multi.center, k + 1)?;
        for p in ring.from_start() {
            writeln!(w, "v {:?} {:?} {:?}", p.position.x, p.position.y, p.position.z)?;
        }
        write!(w, "l")?;
        for i in 0..ring.len() {
            write!(w, " {}", base + i)?;
        }
        writeln!(w, " {base}")?;
        base += ring.len();
    }
    Ok(())
}
