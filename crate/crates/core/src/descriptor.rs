//! edgeLBP codes and the per-mesh descriptor histogram.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{SurfaceTessellation, VertexField};
use crate::ring::{multi_ring_with, Ring, RingWorkspace};

/// Largest `P` for which the α2 code fits in a `u64`.
pub const MAX_ALPHA2_RESOLUTION: usize = 62;

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("ring around vertex {center} has length {length}")]
    DegenerateRing { center: usize, length: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no admissible vertex for r_max = {r_max}")]
    NoAdmissibleVertex { r_max: f64 },
    #[error("field has {found} values but the mesh has {expected} vertices")]
    FieldLength { expected: usize, found: usize },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("descriptor format error at line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Weight applied to the `j`-th bit of the binary string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alpha {
    /// Every bit weighs 1, so the code counts the ones.
    #[serde(rename = "a1")]
    A1,
    /// Bit `j` (1-based) weighs `2^j`.
    #[serde(rename = "a2")]
    A2,
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alpha::A1 => "a1",
            Alpha::A2 => "a2",
        })
    }
}

impl FromStr for Alpha {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "a1" => Ok(Alpha::A1),
            "a2" => Ok(Alpha::A2),
            _ => Err(format!("unknown alpha {s:?} (expected a1 or a2)")),
        }
    }
}

/// `P` samples of the coded function taken at equal arc length along a ring.
#[derive(Debug, Clone, PartialEq)]
pub struct RingSamples {
    pub values: Vec<f64>,
}

impl RingSamples {
    pub fn resolution(&self) -> usize {
        self.values.len()
    }
}

/// Resamples `ring` at `p` equidistant arc-length positions, beginning at
/// its start point.
pub fn ring_resampling(ring: &Ring, p: usize) -> Result<RingSamples, DescriptorError> {
    if p < 3 {
        return Err(DescriptorError::InvalidParams(format!("P must be at least 3, got {p}")));
    }
    let pts: Vec<_> = ring.from_start().collect();
    let m = pts.len();
    let seg: Vec<f64> = (0..m)
        .map(|i| (pts[(i + 1) % m].position - pts[i].position).norm())
        .collect();
    let total: f64 = seg.iter().sum();
    if m == 0 || total.is_nan() || total < 1e-12 {
        return Err(DescriptorError::DegenerateRing {
            center: ring.center,
            length: total,
        });
    }
    let mut values = Vec::with_capacity(p);
    values.push(pts[0].h_value);
    let (mut i, mut walked) = (0, 0.0);
    for k in 1..p {
        let s = k as f64 * total / p as f64;
        while i + 1 < m && walked + seg[i] <= s {
            walked += seg[i];
            i += 1;
        }
        let frac = if seg[i] > 0.0 {
            ((s - walked) / seg[i]).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let (a, b) = (pts[i].h_value, pts[(i + 1) % m].h_value);
        values.push(a + frac * (b - a));
    }
    Ok(RingSamples { values })
}

/// Binary-string code of `samples` against `pivot`; a sample equal to the
/// pivot contributes a one.
pub fn elbp_code(samples: &RingSamples, pivot: f64, alpha: Alpha) -> u64 {
    samples
        .values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= pivot)
        .map(|(j, _)| match alpha {
            Alpha::A1 => 1,
            Alpha::A2 => 1u64 << (j + 1),
        })
        .sum()
}

/// Everything besides the mesh and field that determines a descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptorParams {
    /// Samples per ring.
    pub p: usize,
    pub n_rings: usize,
    /// Radius of the outermost ring, in mesh units.
    pub r_max: f64,
    pub alpha: Alpha,
}

impl Default for DescriptorParams {
    fn default() -> Self {
        Self {
            p: 15,
            n_rings: 5,
            r_max: 2.5,
            alpha: Alpha::A1,
        }
    }
}

impl DescriptorParams {
    pub fn validate(&self) -> Result<(), DescriptorError> {
        let bad = |m: String| Err(DescriptorError::InvalidParams(m));
        if self.p < 3 {
            return bad(format!("P must be at least 3, got {}", self.p));
        }
        if self.alpha == Alpha::A2 && self.p > MAX_ALPHA2_RESOLUTION {
            return bad(format!("P must be at most {MAX_ALPHA2_RESOLUTION} with a2, got {}", self.p));
        }
        if self.n_rings == 0 {
            return bad("the number of rings must be at least 1".into());
        }
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return bad(format!("r_max must be positive and finite, got {}", self.r_max));
        }
        Ok(())
    }

    /// Number of histogram columns with weight α1.
    pub fn dense_bins(&self) -> usize {
        self.p + 1
    }
}

/// Per-ring code histograms; α1 is stored densely, α2 sparsely by code.
#[derive(Debug, Clone, PartialEq)]
pub enum Histogram {
    Dense { bins: usize, rows: Vec<Vec<f64>> },
    Sparse { rows: Vec<BTreeMap<u64, f64>> },
}

impl Histogram {
    pub fn n_rows(&self) -> usize {
        match self {
            Histogram::Dense { rows, .. } => rows.len(),
            Histogram::Sparse { rows } => rows.len(),
        }
    }

    /// Value of cell `(ring, code)`, zero when absent.
    pub fn get(&self, ring: usize, code: u64) -> f64 {
        match self {
            Histogram::Dense { rows, .. } => rows[ring].get(code as usize).copied().unwrap_or(0.0),
            Histogram::Sparse { rows } => rows[ring].get(&code).copied().unwrap_or(0.0),
        }
    }

    pub fn row_sum(&self, ring: usize) -> f64 {
        match self {
            Histogram::Dense { rows, .. } => rows[ring].iter().sum(),
            Histogram::Sparse { rows } => rows[ring].values().sum(),
        }
    }

    /// Stored cells as `(ring, code, value)`; every dense cell, and the
    /// present sparse ones.
    pub fn cells(&self) -> Vec<(usize, u64, f64)> {
        match self {
            Histogram::Dense { rows, .. } => rows
                .iter()
                .enumerate()
                .flat_map(|(n, r)| r.iter().enumerate().map(move |(m, &v)| (n, m as u64, v)))
                .collect(),
            Histogram::Sparse { rows } => rows
                .iter()
                .enumerate()
                .flat_map(|(n, r)| r.iter().map(move |(&m, &v)| (n, m, v)))
                .collect(),
        }
    }

    /// Calls `f(a, b)` for every cell present in either histogram. Both must
    /// have the same layout.
    pub fn for_each_pair(&self, other: &Histogram, mut f: impl FnMut(f64, f64)) {
        match (self, other) {
            (Histogram::Dense { rows: ra, .. }, Histogram::Dense { rows: rb, .. }) => {
                for (a, b) in ra.iter().zip(rb) {
                    for (&x, &y) in a.iter().zip(b) {
                        f(x, y);
                    }
                }
            }
            (Histogram::Sparse { rows: ra }, Histogram::Sparse { rows: rb }) => {
                for (a, b) in ra.iter().zip(rb) {
                    let (mut ia, mut ib) = (a.iter().peekable(), b.iter().peekable());
                    loop {
                        match (ia.peek(), ib.peek()) {
                            (Some((ka, &va)), Some((kb, &vb))) => {
                                if ka < kb {
                                    f(va, 0.0);
                                    ia.next();
                                } else if kb < ka {
                                    f(0.0, vb);
                                    ib.next();
                                } else {
                                    f(va, vb);
                                    ia.next();
                                    ib.next();
                                }
                            }
                            (Some((_, &va)), None) => {
                                f(va, 0.0);
                                ia.next();
                            }
                            (None, Some((_, &vb))) => {
                                f(0.0, vb);
                                ib.next();
                            }
                            (None, None) => break,
                        }
                    }
                }
            }
            _ => panic!("histogram layouts differ"),
        }
    }
}

/// The edgeLBP descriptor of one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLbpDescriptor {
    pub model_id: String,
    /// Name of the coded function.
    pub field: String,
    pub params: DescriptorParams,
    /// How `params.r_max` was chosen for this mesh.
    pub r_max_rule: String,
    /// Entries are code counts divided by `n_vertices`.
    pub histogram: Histogram,
    pub n_vertices: usize,
    pub n_admissible: usize,
}

/// Integer code counts before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeCounts {
    Dense { bins: usize, counts: Vec<u64> },
    Sparse { rows: Vec<BTreeMap<u64, u64>> },
}

impl CodeCounts {
    pub fn new(params: &DescriptorParams) -> Self {
        match params.alpha {
            Alpha::A1 => CodeCounts::Dense {
                bins: params.dense_bins(),
                counts: vec![0; params.n_rings * params.dense_bins()],
            },
            Alpha::A2 => CodeCounts::Sparse {
                rows: vec![BTreeMap::new(); params.n_rings],
            },
        }
    }

    pub fn add(&mut self, ring: usize, code: u64) {
        match self {
            CodeCounts::Dense { bins, counts } => counts[ring * *bins + code as usize] += 1,
            CodeCounts::Sparse { rows } => *rows[ring].entry(code).or_insert(0) += 1,
        }
    }

    pub fn count(&self, ring: usize, code: u64) -> u64 {
        match self {
            CodeCounts::Dense { bins, counts } => {
                if (code as usize) < *bins {
                    counts[ring * *bins + code as usize]
                } else {
                    0
                }
            }
            CodeCounts::Sparse { rows } => rows[ring].get(&code).copied().unwrap_or(0),
        }
    }

    fn merge(mut self, other: CodeCounts) -> CodeCounts {
        match (&mut self, other) {
            (CodeCounts::Dense { counts: a, .. }, CodeCounts::Dense { counts: b, .. }) => {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            }
            (CodeCounts::Sparse { rows: a }, CodeCounts::Sparse { rows: b }) => {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (k, v) in rb {
                        *ra.entry(k).or_insert(0) += v;
                    }
                }
            }
            _ => unreachable!("count layouts differ"),
        }
        self
    }

    /// Divides every count by `n`.
    pub fn normalize(&self, n: usize) -> Histogram {
        let n = n as f64;
        match self {
            CodeCounts::Dense { bins, counts } => Histogram::Dense {
                bins: *bins,
                rows: counts
                    .chunks(*bins)
                    .map(|r| r.iter().map(|&c| c as f64 / n).collect())
                    .collect(),
            },
            CodeCounts::Sparse { rows } => Histogram::Sparse {
                rows: rows
                    .iter()
                    .map(|r| r.iter().map(|(&k, &c)| (k, c as f64 / n)).collect())
                    .collect(),
            },
        }
    }
}

/// Codes of one vertex, ring by ring, or `None` when it is not admissible.
pub fn vertex_codes_with(
    ws: &mut RingWorkspace,
    mesh: &SurfaceTessellation,
    h: &VertexField,
    params: &DescriptorParams,
    v: usize,
) -> Option<Vec<u64>> {
    let mr = multi_ring_with(ws, mesh, v, params.r_max, params.n_rings, h);
    if !mr.admissible {
        return None;
    }
    let pivot = h.get(v);
    mr.rings
        .iter()
        .map(|ring| ring_resampling(ring, params.p).ok().map(|s| elbp_code(&s, pivot, params.alpha)))
        .collect()
}

fn check_inputs(mesh: &SurfaceTessellation, h: &VertexField, params: &DescriptorParams) -> Result<(), DescriptorError> {
    params.validate()?;
    if h.len() != mesh.num_vertices() {
        return Err(DescriptorError::FieldLength {
            expected: mesh.num_vertices(),
            found: h.len(),
        });
    }
    Ok(())
}

/// Per-vertex codes for every vertex of `mesh`.
pub fn vertex_codes(
    mesh: &SurfaceTessellation,
    h: &VertexField,
    params: &DescriptorParams,
) -> Result<Vec<Option<Vec<u64>>>, DescriptorError> {
    check_inputs(mesh, h, params)?;
    Ok((0..mesh.num_vertices())
        .into_par_iter()
        .with_min_len(64)
        .map_init(RingWorkspace::new, |ws, v| vertex_codes_with(ws, mesh, h, params, v))
        .collect())
}

/// Integer code counts over all admissible vertices, and their number.
pub fn count_codes(
    mesh: &SurfaceTessellation,
    h: &VertexField,
    params: &DescriptorParams,
) -> Result<(CodeCounts, usize), DescriptorError> {
    check_inputs(mesh, h, params)?;
    let (counts, admissible) = (0..mesh.num_vertices())
        .into_par_iter()
        .with_min_len(64)
        .fold(
            || (CodeCounts::new(params), 0usize, RingWorkspace::new()),
            |(mut counts, mut admissible, mut ws), v| {
                if let Some(codes) = vertex_codes_with(&mut ws, mesh, h, params, v) {
                    admissible += 1;
                    for (ring, code) in codes.into_iter().enumerate() {
                        counts.add(ring, code);
                    }
                }
                (counts, admissible, ws)
            },
        )
        .map(|(c, a, _)| (c, a))
        .reduce(|| (CodeCounts::new(params), 0), |(a, na), (b, nb)| (a.merge(b), na + nb));
    Ok((counts, admissible))
}

/// Computes the descriptor of `mesh` with `h` as the coded function.
pub fn compute_descriptor(
    mesh: &SurfaceTessellation,
    h: &VertexField,
    params: &DescriptorParams,
) -> Result<EdgeLbpDescriptor, DescriptorError> {
    let (counts, n_admissible) = count_codes(mesh, h, params)?;
    if n_admissible == 0 {
        return Err(DescriptorError::NoAdmissibleVertex { r_max: params.r_max });
    }
    Ok(EdgeLbpDescriptor {
        model_id: String::new(),
        field: h.name().to_string(),
        params: *params,
        r_max_rule: RmaxRule::Explicit(params.r_max).to_string(),
        histogram: counts.normalize(mesh.num_vertices()),
        n_vertices: mesh.num_vertices(),
        n_admissible,
    })
}

/// `R_max` as one tenth of the radius of a disk with area `area`.
pub fn rmax_from_area(area: f64) -> f64 {
    0.1 * (area / std::f64::consts::PI).sqrt()
}

/// `R_max = factor · edge_length`; factors outside `[10, 20]` are accepted
/// with a warning.
pub fn rmax_from_edge_length(edge_length: f64, factor: f64) -> f64 {
    if !(10.0..=20.0).contains(&factor) {
        log::warn!("edge-length factor {factor} is outside the usual range [10, 20]");
    }
    factor * edge_length
}

/// How `R_max` is chosen for each mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RmaxRule {
    /// A fixed radius in mesh units.
    Explicit(f64),
    /// [`rmax_from_area`] of the mesh surface area.
    AreaFraction,
    /// [`rmax_from_edge_length`] of the mean edge length with this factor.
    EdgeLength(f64),
}

impl RmaxRule {
    pub fn resolve(&self, mesh: &SurfaceTessellation) -> Result<f64, DescriptorError> {
        let r = match *self {
            RmaxRule::Explicit(r) => r,
            RmaxRule::AreaFraction => rmax_from_area(mesh.surface_area()),
            RmaxRule::EdgeLength(c) => {
                let el = mesh
                    .mean_edge_length()
                    .map_err(|e| DescriptorError::InvalidParams(e.to_string()))?;
                rmax_from_edge_length(el, c)
            }
        };
        if !(r > 0.0 && r.is_finite()) {
            return Err(DescriptorError::InvalidParams(format!("r_max resolved to {r}")));
        }
        Ok(r)
    }
}

impl fmt::Display for RmaxRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RmaxRule::Explicit(r) => write!(f, "explicit:{r:?}"),
            RmaxRule::AreaFraction => f.write_str("area"),
            RmaxRule::EdgeLength(c) => write!(f, "edge:{c:?}"),
        }
    }
}

impl FromStr for RmaxRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |v: &str| v.parse::<f64>().map_err(|e| format!("bad number {v:?} in r_max rule: {e}"));
        match s.split_once(':') {
            None if s == "area" => Ok(RmaxRule::AreaFraction),
            Some(("explicit", v)) => Ok(RmaxRule::Explicit(num(v)?)),
            Some(("edge", v)) => Ok(RmaxRule::EdgeLength(num(v)?)),
            _ => s
                .parse::<f64>()
                .map(RmaxRule::Explicit)
                .map_err(|_| format!("unknown r_max rule {s:?} (expected <mm>, explicit:<mm>, area or edge:<C>)")),
        }
    }
}

const MAGIC: &str = "# edgelbp descriptor v1";

impl EdgeLbpDescriptor {
    pub fn row_sum(&self, ring: usize) -> f64 {
        self.histogram.row_sum(ring)
    }

    /// Writes the self-describing text format; floats use 17 significant
    /// digits so reading it back is exact.
    pub fn write_text<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "model_id {}", self.model_id)?;
        writeln!(w, "field {}", self.field)?;
        writeln!(w, "alpha {}", self.params.alpha)?;
        writeln!(w, "p {}", self.params.p)?;
        writeln!(w, "rings {}", self.params.n_rings)?;
        writeln!(w, "r_max {:.16e}", self.params.r_max)?;
        writeln!(w, "r_max_rule {}", self.r_max_rule)?;
        writeln!(w, "n_vertices {}", self.n_vertices)?;
        writeln!(w, "n_admissible {}", self.n_admissible)?;
        match &self.histogram {
            Histogram::Dense { bins, rows } => {
                writeln!(w, "histogram dense {} {}", rows.len(), bins)?;
                for row in rows {
                    let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
                    writeln!(w, "{}", line.join(" "))?;
                }
            }
            Histogram::Sparse { rows } => {
                writeln!(w, "histogram sparse {}", rows.len())?;
                for row in rows {
                    let line: Vec<String> = row.iter().map(|(k, v)| format!("{k}:{v:.16e}")).collect();
                    writeln!(w, "{}", line.join(" "))?;
                }
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("descriptor text is UTF-8")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self, DescriptorError> {
        let lines: Vec<String> = r.lines().collect::<Result<_, _>>()?;
        let err = |line: usize, message: String| DescriptorError::Format { line: line + 1, message };
        if lines.first().map(|l| l.trim_end()) != Some(MAGIC) {
            return Err(err(0, "missing descriptor header".into()));
        }
        let keys = [
            "model_id",
            "field",
            "alpha",
            "p",
            "rings",
            "r_max",
            "r_max_rule",
            "n_vertices",
            "n_admissible",
        ];
        let mut vals = Vec::with_capacity(keys.len());
        for (i, key) in keys.iter().enumerate() {
            let line = lines.get(i + 1).ok_or_else(|| err(i + 1, format!("missing {key}")))?;
            let rest = line
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix(' ').or(if r.is_empty() { Some("") } else { None }))
                .ok_or_else(|| err(i + 1, format!("expected {key}")))?;
            vals.push(rest.to_string());
        }
        let parse_usize = |i: usize| vals[i].trim().parse::<usize>().map_err(|e| err(i + 1, e.to_string()));
        let params = DescriptorParams {
            alpha: vals[2].trim().parse().map_err(|e: String| err(3, e))?,
            p: parse_usize(3)?,
            n_rings: parse_usize(4)?,
            r_max: vals[5].trim().parse().map_err(|e: std::num::ParseFloatError| err(6, e.to_string()))?,
        };
        let hist_at = keys.len() + 1;
        let header = lines.get(hist_at).ok_or_else(|| err(hist_at, "missing histogram".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_f = |line: usize, s: &str| s.parse::<f64>().map_err(|e| err(line, format!("{s:?}: {e}")));
        let histogram = match fields.as_slice() {
            ["histogram", "dense", n, b] => {
                let n: usize = n.parse().map_err(|_| err(hist_at, "bad row count".into()))?;
                let bins: usize = b.parse().map_err(|_| err(hist_at, "bad bin count".into()))?;
                let mut rows = Vec::with_capacity(n);
                for k in 0..n {
                    let li = hist_at + 1 + k;
                    let line = lines.get(li).ok_or_else(|| err(li, "missing histogram row".into()))?;
                    let row = line
                        .split_whitespace()
                        .map(|s| parse_f(li, s))
                        .collect::<Result<Vec<_>, _>>()?;
                    if row.len() != bins {
                        return Err(err(li, format!("expected {bins} values, found {}", row.len())));
                    }
                    rows.push(row);
                }
                Histogram::Dense { bins, rows }
            }
            ["histogram", "sparse", n] => {
                let n: usize = n.parse().map_err(|_| err(hist_at, "bad row count".into()))?;
                let mut rows = Vec::with_capacity(n);
                for k in 0..n {
                    let li = hist_at + 1 + k;
                    let line = lines.get(li).ok_or_else(|| err(li, "missing histogram row".into()))?;
                    let mut row = BTreeMap::new();
                    for cell in line.split_whitespace() {
                        let (c, v) = cell.split_once(':').ok_or_else(|| err(li, format!("bad cell {cell:?}")))?;
                        let c: u64 = c.parse().map_err(|_| err(li, format!("bad code {c:?}")))?;
                        row.insert(c, parse_f(li, v)?);
                    }
                    rows.push(row);
                }
                Histogram::Sparse { rows }
            }
            _ => return Err(err(hist_at, format!("bad histogram header {header:?}"))),
        };
        if histogram.n_rows() != params.n_rings {
            return Err(err(hist_at, "row count does not match rings".into()));
        }
        Ok(EdgeLbpDescriptor {
            model_id: vals[0].clone(),
            field: vals[1].trim().to_string(),
            params,
            r_max_rule: vals[6].trim().to_string(),
            histogram,
            n_vertices: parse_usize(7)?,
            n_admissible: parse_usize(8)?,
        })
    }

    pub fn from_text(text: &str) -> Result<Self, DescriptorError> {
        Self::read_text(text.as_bytes())
    }

    pub fn save(&self, path: &Path) -> Result<(), DescriptorError> {
        let mut w = io::BufWriter::new(fs::File::create(path)?);
        self.write_text(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, DescriptorError> {
        Self::read_text(io::BufReader::new(fs::File::open(path)?))
    }

    /// Writes `ring,code,value` rows: all cells for α1, stored ones for α2.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), DescriptorError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["ring", "code", "value"]).map_err(csv_io)?;
        for (n, m, v) in self.histogram.cells() {
            out.write_record([(n + 1).to_string(), m.to_string(), format!("{v:.16e}")])
                .map_err(csv_io)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn csv_io(e: csv::Error) -> DescriptorError {
    DescriptorError::Io(io::Error::other(e))
}
