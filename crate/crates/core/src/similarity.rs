//! Distances between descriptors and the dataset distance matrix.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptor::EdgeLbpDescriptor;

#[derive(Debug, Error)]
pub enum SimilarityError {
    #[error("descriptor parameters differ: {0}")]
    ParamMismatch(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("distance matrix format error: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Bhattacharyya,
    #[serde(rename = "chi2")]
    ChiSquared,
    Euclidean,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Bhattacharyya => "bhattacharyya",
            Metric::ChiSquared => "chi2",
            Metric::Euclidean => "euclidean",
        }
    }

    pub fn distance(self, a: &EdgeLbpDescriptor, b: &EdgeLbpDescriptor) -> Result<f64, SimilarityError> {
        match self {
            Metric::Bhattacharyya => bhattacharyya_distance(a, b),
            Metric::ChiSquared => chi_squared_distance(a, b),
            Metric::Euclidean => euclidean_distance(a, b),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Metric::Bhattacharyya, Metric::ChiSquared, Metric::Euclidean]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric {s:?} (expected bhattacharyya, chi2 or euclidean)"))
    }
}

/// Fails unless `a` and `b` share `P`, the number of rings and the weight.
pub fn check_compatible(a: &EdgeLbpDescriptor, b: &EdgeLbpDescriptor) -> Result<(), SimilarityError> {
    let (pa, pb) = (&a.params, &b.params);
    if pa.p != pb.p || pa.n_rings != pb.n_rings || pa.alpha != pb.alpha {
        return Err(SimilarityError::ParamMismatch(format!(
            "{:?} has P={} rings={} alpha={}, {:?} has P={} rings={} alpha={}",
            a.model_id, pa.p, pa.n_rings, pa.alpha, b.model_id, pb.p, pb.n_rings, pb.alpha
        )));
    }
    Ok(())
}

/// Bhattacharyya distance, with the coefficient averaged over rings so that
/// two identical fully admissible descriptors have coefficient 1.
///
/// Computed as `1 − BC = ½·mean_rings Σ(√a − √b)² + 1 − (μa + μb)/2`,
/// where `μ` is the admissible fraction every row sums to; this equals the
/// direct form but is exactly zero for identical full descriptors.
pub fn bhattacharyya_distance(a: &EdgeLbpDescriptor, b: &EdgeLbpDescriptor) -> Result<f64, SimilarityError> {
    check_compatible(a, b)?;
    let mut hellinger = 0.0;
    a.histogram.for_each_pair(&b.histogram, |x, y| {
        let d = x.sqrt() - y.sqrt();
        hellinger += d * d;
    });
    let mass = |d: &EdgeLbpDescriptor| d.n_admissible as f64 / d.n_vertices as f64;
    let gap = 0.5 * hellinger / a.params.n_rings as f64 + 1.0 - 0.5 * (mass(a) + mass(b));
    Ok(gap.clamp(0.0, 1.0).sqrt())
}

/// Symmetric χ² distance `Σ (a − b)² / (a + b)`; empty cells contribute 0.
pub fn chi_squared_distance(a: &EdgeLbpDescriptor, b: &EdgeLbpDescriptor) -> Result<f64, SimilarityError> {
    check_compatible(a, b)?;
    let mut sum = 0.0;
    a.histogram.for_each_pair(&b.histogram, |x, y| {
        if x + y > 0.0 {
            sum += (x - y) * (x - y) / (x + y);
        }
    });
    Ok(sum)
}

/// L2 distance between the flattened histograms.
pub fn euclidean_distance(a: &EdgeLbpDescriptor, b: &EdgeLbpDescriptor) -> Result<f64, SimilarityError> {
    check_compatible(a, b)?;
    let mut sum = 0.0;
    a.histogram.for_each_pair(&b.histogram, |x, y| sum += (x - y) * (x - y));
    Ok(sum.sqrt())
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub model_ids: Vec<String>,
    /// Row-major, `n × n`.
    pub values: Vec<f64>,
    pub metric: String,
}

impl DistanceMatrix {
    pub fn new(model_ids: Vec<String>, values: Vec<f64>, metric: impl Into<String>) -> Result<Self, SimilarityError> {
        let n = model_ids.len();
        if values.len() != n * n {
            return Err(SimilarityError::Format(format!(
                "{} values for {n} models",
                values.len()
            )));
        }
        Ok(Self {
            model_ids,
            values,
            metric: metric.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.model_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.model_ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Writes a CSV whose header holds the metric then the model ids, and
    /// whose rows start with the model id; values keep 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), SimilarityError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(std::iter::once(self.metric.as_str()).chain(self.model_ids.iter().map(String::as_str)))?;
        for (i, id) in self.model_ids.iter().enumerate() {
            let mut rec = vec![id.clone()];
            rec.extend(self.row(i).iter().map(|v| format!("{v:.16e}")));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, SimilarityError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or_else(|| SimilarityError::Format("empty file".into()))??;
        let metric = header.get(0).unwrap_or_default().to_string();
        let ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let n = ids.len();
        let mut values = Vec::with_capacity(n * n);
        for (i, rec) in records.enumerate() {
            let rec = rec?;
            if i >= n || rec.get(0) != Some(ids[i].as_str()) {
                return Err(SimilarityError::Format(format!(
                    "row {} does not match the header ids",
                    i + 1
                )));
            }
            if rec.len() != n + 1 {
                return Err(SimilarityError::Format(format!("row {} has {} fields", i + 1, rec.len())));
            }
            for field in rec.iter().skip(1) {
                let v: f64 = field
                    .trim()
                    .parse()
                    .map_err(|e| SimilarityError::Format(format!("bad value {field:?}: {e}")))?;
                values.push(v);
            }
        }
        if values.len() != n * n {
            return Err(SimilarityError::Format(format!("expected {n} rows")));
        }
        Self::new(ids, values, metric)
    }

    pub fn save(&self, path: &Path) -> Result<(), SimilarityError> {
        self.write_csv(io::BufWriter::new(fs::File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self, SimilarityError> {
        Self::read_csv(io::BufReader::new(fs::File::open(path)?))
    }
}

/// Distances between every pair of `descriptors`, each pair computed once.
pub fn distance_matrix(descriptors: &[EdgeLbpDescriptor], metric: Metric) -> Result<DistanceMatrix, SimilarityError> {
    if let Some(first) = descriptors.first() {
        for d in &descriptors[1..] {
            check_compatible(first, d)?;
        }
    }
    let n = descriptors.len();
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| metric.distance(&descriptors[i], &descriptors[j]))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let mut values = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (k, &d) in row.iter().enumerate() {
            let j = i + 1 + k;
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    let ids = descriptors.iter().map(|d| d.model_id.clone()).collect();
    DistanceMatrix::new(ids, values, metric.name())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::{Alpha, CodeCounts, DescriptorParams, Histogram};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_descriptor(rng: &mut ChaCha8Rng, id: &str, params: DescriptorParams, full: bool) -> EdgeLbpDescriptor {
        let n_vertices = rng.random_range(50..400);
        let n_admissible = if full { n_vertices } else { rng.random_range(1..=n_vertices) };
        let mut counts = CodeCounts::new(&params);
        for ring in 0..params.n_rings {
            for _ in 0..n_admissible {
                let code = match params.alpha {
                    Alpha::A1 => rng.random_range(0..=params.p as u64),
                    Alpha::A2 => rng.random_range(0..16u64) * 2,
                };
                counts.add(ring, code);
            }
        }
        EdgeLbpDescriptor {
            model_id: id.into(),
            field: "k2".into(),
            params,
            r_max_rule: "explicit:2.5".into(),
            histogram: counts.normalize(n_vertices),
            n_vertices,
            n_admissible,
        }
    }

    fn params(alpha: Alpha) -> DescriptorParams {
        DescriptorParams { p: 12, n_rings: 5, r_max: 2.5, alpha }
    }

    fn cells(d: &EdgeLbpDescriptor, other: &EdgeLbpDescriptor) -> Vec<(f64, f64)> {
        let mut v = Vec::new();
        d.histogram.for_each_pair(&other.histogram, |a, b| v.push((a, b)));
        v
    }

    #[test]
    fn self_and_disjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = random_descriptor(&mut rng, "a", params(Alpha::A1), true);
        assert_eq!(bhattacharyya_distance(&d, &d).unwrap(), 0.0);
        assert_eq!(chi_squared_distance(&d, &d).unwrap(), 0.0);
        assert_eq!(euclidean_distance(&d, &d).unwrap(), 0.0);
        let one_bin = |code: u64| {
            let p = params(Alpha::A1);
            let mut c = CodeCounts::new(&p);
            for n in 0..p.n_rings {
                c.add(n, code);
            }
            EdgeLbpDescriptor { histogram: c.normalize(1), n_vertices: 1, n_admissible: 1, ..d.clone() }
        };
        assert_eq!(bhattacharyya_distance(&one_bin(0), &one_bin(3)).unwrap(), 1.0);
    }

    #[test]
    fn zero_histogram_chi_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut d = random_descriptor(&mut rng, "a", params(Alpha::A1), true);
        d.histogram = CodeCounts::new(&d.params).normalize(d.n_vertices);
        assert_eq!(chi_squared_distance(&d, &d).unwrap(), 0.0);
    }

    #[test]
    fn single_cell_euclidean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_descriptor(&mut rng, "a", params(Alpha::A1), true);
        let mut b = a.clone();
        if let Histogram::Dense { rows, .. } = &mut b.histogram {
            rows[2][4] += 0.125;
        }
        assert!((euclidean_distance(&a, &b).unwrap() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn random_pairs_match_direct_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for alpha in [Alpha::A1, Alpha::A2] {
            for k in 0..20 {
                let a = random_descriptor(&mut rng, "a", params(alpha), k % 2 == 0);
                let b = random_descriptor(&mut rng, "b", params(alpha), k % 3 == 0);
                let pairs = cells(&a, &b);
                let bc: f64 = pairs.iter().map(|(x, y)| (x * y).sqrt()).sum::<f64>() / 5.0;
                let chi: f64 = pairs
                    .iter()
                    .filter(|(x, y)| x + y > 0.0)
                    .map(|(x, y)| (x - y).powi(2) / (x + y))
                    .sum();
                let l2: f64 = pairs.iter().map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
                assert!((bhattacharyya_distance(&a, &b).unwrap() - (1.0 - bc).max(0.0).sqrt()).abs() < 1e-12);
                assert!((chi_squared_distance(&a, &b).unwrap() - chi).abs() < 1e-12);
                assert!((euclidean_distance(&a, &b).unwrap() - l2).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mismatched_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_descriptor(&mut rng, "a", params(Alpha::A1), true);
        let b = random_descriptor(&mut rng, "b", DescriptorParams { p: 10, ..params(Alpha::A1) }, true);
        let c = random_descriptor(&mut rng, "c", params(Alpha::A2), true);
        for other in [&b, &c] {
            assert!(matches!(bhattacharyya_distance(&a, other), Err(SimilarityError::ParamMismatch(_))));
        }
        assert!(distance_matrix(&[a, b], Metric::ChiSquared).is_err());
    }

    #[test]
    fn matrix_matches_naive_loop_and_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ds: Vec<_> = (0..25)
            .map(|i| random_descriptor(&mut rng, &format!("m{i:02}"), params(Alpha::A1), i % 4 != 0))
            .collect();
        for metric in [Metric::Bhattacharyya, Metric::ChiSquared, Metric::Euclidean] {
            let m = distance_matrix(&ds, metric).unwrap();
            for i in 0..ds.len() {
                assert_eq!(m.get(i, i), 0.0);
                for j in 0..ds.len() {
                    if i != j {
                        assert_eq!(m.get(i, j), metric.distance(&ds[i], &ds[j]).unwrap());
                        assert_eq!(m.get(i, j), m.get(j, i));
                    }
                }
            }
            let mut buf = Vec::new();
            m.write_csv(&mut buf).unwrap();
            assert_eq!(DistanceMatrix::read_csv(buf.as_slice()).unwrap(), m);
        }
        let single = distance_matrix(&ds[..1], Metric::Bhattacharyya).unwrap();
        assert_eq!(single.values, vec![0.0]);
        let same = vec![ds[0].clone(); 3];
        assert!(distance_matrix(&same, Metric::Euclidean).unwrap().values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn permuting_inputs_permutes_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ds: Vec<_> = (0..8)
            .map(|i| random_descriptor(&mut rng, &format!("m{i}"), params(Alpha::A2), false))
            .collect();
        let perm = [3, 0, 7, 1, 6, 2, 5, 4];
        let shuffled: Vec<_> = perm.iter().map(|&i| ds[i].clone()).collect();
        let a = distance_matrix(&ds, Metric::Bhattacharyya).unwrap();
        let b = distance_matrix(&shuffled, Metric::Bhattacharyya).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(b.get(i, j), a.get(perm[i], perm[j]));
            }
        }
    }

    #[test]
    fn metric_names() {
        for m in [Metric::Bhattacharyya, Metric::ChiSquared, Metric::Euclidean] {
            assert_eq!(m.name().parse::<Metric>().unwrap(), m);
        }
        assert!("emd".parse::<Metric>().is_err());
        assert!(DistanceMatrix::read_csv("x,a,b\na,0,1\n".as_bytes()).is_err());
    }
}
