//! Retrieval and classification scores of a distance matrix against class
//! labels.
//!
//! Every query ranks all other models by ascending distance, ties broken by
//! model id. For a query in class `C`, the relevant items are the other
//! `|C| − 1` members of its class.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::similarity::DistanceMatrix;

pub const DEFAULT_E_CUTOFF: usize = 32;

#[derive(Debug, Error)]
pub enum RetrievalError {
    #[error("model {0:?} has more than one label")]
    DuplicateModel(String),
    #[error("model {0:?} has no label")]
    MissingLabel(String),
    #[error("class {0:?} has a single member, so first and second tier are undefined")]
    UndefinedForSingletonClass(String),
    #[error("at least two models are needed")]
    TooFewModels,
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Class label of every model.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    model_ids: Vec<String>,
    class_of: HashMap<String, String>,
    class_sizes: BTreeMap<String, usize>,
}

impl GroundTruth {
    pub fn new<I, S, T>(labels: I) -> Result<Self, RetrievalError>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut gt = GroundTruth {
            model_ids: Vec::new(),
            class_of: HashMap::new(),
            class_sizes: BTreeMap::new(),
        };
        for (id, class) in labels {
            let (id, class) = (id.into(), class.into());
            if gt.class_of.contains_key(&id) {
                return Err(RetrievalError::DuplicateModel(id));
            }
            *gt.class_sizes.entry(class.clone()).or_insert(0) += 1;
            gt.model_ids.push(id.clone());
            gt.class_of.insert(id, class);
        }
        Ok(gt)
    }

    /// Reads `model_id,class` rows; a leading `model_id,class` header is
    /// skipped.
    pub fn read_csv<R: Read>(r: R) -> Result<Self, RetrievalError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut labels = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                continue;
            }
            if i == 0 && &rec[0] == "model_id" && &rec[1] == "class" {
                continue;
            }
            labels.push((rec[0].to_string(), rec[1].to_string()));
        }
        Self::new(labels)
    }

    pub fn load(path: &Path) -> Result<Self, RetrievalError> {
        Self::read_csv(io::BufReader::new(fs::File::open(path)?))
    }

    pub fn model_ids(&self) -> &[String] {
        &self.model_ids
    }

    pub fn class_of(&self, id: &str) -> Option<&str> {
        self.class_of.get(id).map(String::as_str)
    }

    pub fn class_sizes(&self) -> &BTreeMap<String, usize> {
        &self.class_sizes
    }
}

/// For every query, the other models ordered from nearest to farthest.
#[derive(Debug, Clone, PartialEq)]
pub struct RankLists {
    pub model_ids: Vec<String>,
    pub order: Vec<Vec<usize>>,
}

/// Ranks the models of `dist` for every query.
pub fn rank_lists(dist: &DistanceMatrix) -> RankLists {
    let n = dist.len();
    let order = (0..n)
        .into_par_iter()
        .map(|i| {
            let row = dist.row(i);
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| {
                row[a]
                    .total_cmp(&row[b])
                    .then_with(|| dist.model_ids[a].cmp(&dist.model_ids[b]))
            });
            others
        })
        .collect();
    RankLists {
        model_ids: dist.model_ids.clone(),
        order,
    }
}

/// Class index of every ranked model, with classes in sorted label order.
struct Labels {
    classes: Vec<String>,
    of: Vec<usize>,
    sizes: Vec<usize>,
}

impl Labels {
    fn new(ranks: &RankLists, gt: &GroundTruth) -> Result<Self, RetrievalError> {
        let mut names: Vec<&str> = Vec::with_capacity(ranks.model_ids.len());
        for id in &ranks.model_ids {
            names.push(gt.class_of(id).ok_or_else(|| RetrievalError::MissingLabel(id.clone()))?);
        }
        let mut classes: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        classes.sort();
        classes.dedup();
        let of: Vec<usize> = names
            .iter()
            .map(|n| classes.binary_search_by(|c| c.as_str().cmp(n)).unwrap())
            .collect();
        let mut sizes = vec![0; classes.len()];
        for &c in &of {
            sizes[c] += 1;
        }
        Ok(Self { classes, of, sizes })
    }

    /// Number of items relevant to query `i`.
    fn relevant(&self, i: usize) -> usize {
        self.sizes[self.of[i]] - 1
    }

    fn hits(&self, ranks: &RankLists, i: usize) -> Vec<bool> {
        ranks.order[i].iter().map(|&j| self.of[j] == self.of[i]).collect()
    }

    /// Queries with at least one relevant item.
    fn scored(&self) -> Vec<usize> {
        (0..self.of.len()).filter(|&i| self.relevant(i) > 0).collect()
    }
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Nearest neighbor, first tier and second tier, averaged over queries.
pub fn nn_ft_st(ranks: &RankLists, gt: &GroundTruth) -> Result<(f64, f64, f64), RetrievalError> {
    let labels = Labels::new(ranks, gt)?;
    if let Some(c) = labels.sizes.iter().position(|&s| s == 1) {
        return Err(RetrievalError::UndefinedForSingletonClass(labels.classes[c].clone()));
    }
    let per_query: Vec<(f64, f64, f64)> = (0..ranks.order.len())
        .into_par_iter()
        .map(|i| {
            let hits = labels.hits(ranks, i);
            let c = labels.relevant(i);
            let within = |k: usize| hits.iter().take(k).filter(|&&h| h).count() as f64;
            (within(1), within(c) / c as f64, within(2 * c) / c as f64)
        })
        .collect();
    Ok((
        mean(per_query.iter().map(|q| q.0)),
        mean(per_query.iter().map(|q| q.1)),
        mean(per_query.iter().map(|q| q.2)),
    ))
}

/// Average precision of every query with relevant items, in query order.
pub fn average_precisions(ranks: &RankLists, gt: &GroundTruth) -> Result<Vec<f64>, RetrievalError> {
    let labels = Labels::new(ranks, gt)?;
    Ok(labels
        .scored()
        .into_par_iter()
        .map(|i| {
            let hits = labels.hits(ranks, i);
            let mut found = 0;
            let mut sum = 0.0;
            for (k, &h) in hits.iter().enumerate() {
                if h {
                    found += 1;
                    sum += found as f64 / (k + 1) as f64;
                }
            }
            sum / labels.relevant(i) as f64
        })
        .collect())
}

/// Precision-recall curve and mean average precision.
///
/// Curve points sit at every recall level `r / (|C| − 1)` of any class; at
/// each level a query contributes its precision at the first rank where its
/// recall reaches that level.
pub fn precision_recall(ranks: &RankLists, gt: &GroundTruth) -> Result<(Vec<(f64, f64)>, f64), RetrievalError> {
    let labels = Labels::new(ranks, gt)?;
    let map = mean(average_precisions(ranks, gt)?);
    let scored = labels.scored();
    let mut levels: Vec<(usize, usize)> = Vec::new();
    let mut seen_sizes: Vec<usize> = scored.iter().map(|&i| labels.relevant(i)).collect();
    seen_sizes.sort_unstable();
    seen_sizes.dedup();
    for &c in &seen_sizes {
        levels.extend((1..=c).map(|r| (r, c)));
    }
    levels.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    levels.dedup_by(|a, b| a.0 * b.1 == b.0 * a.1);
    // precision at the rank of the r-th relevant item, per query
    let precisions: Vec<Vec<f64>> = scored
        .par_iter()
        .map(|&i| {
            let mut out = Vec::with_capacity(labels.relevant(i));
            for (k, &h) in labels.hits(ranks, i).iter().enumerate() {
                if h {
                    out.push((out.len() + 1) as f64 / (k + 1) as f64);
                }
            }
            out
        })
        .collect();
    let curve = levels
        .iter()
        .map(|&(r, c)| {
            let precision = mean(scored.iter().zip(&precisions).map(|(&i, p)| {
                let rel = labels.relevant(i);
                // smallest count whose recall reaches r / c
                let needed = (r * rel).div_ceil(c);
                p[needed.max(1) - 1]
            }));
            (r as f64 / c as f64, precision)
        })
        .collect();
    Ok((curve, map))
}

/// F-measure of precision and recall within the first `cutoff` results,
/// averaged over queries with relevant items.
pub fn e_measure(ranks: &RankLists, gt: &GroundTruth, cutoff: usize) -> Result<f64, RetrievalError> {
    let labels = Labels::new(ranks, gt)?;
    let n = ranks.model_ids.len();
    let k = cutoff.min(n.saturating_sub(1));
    Ok(mean(labels.scored().into_iter().map(|i| {
        let found = labels.hits(ranks, i).iter().take(k).filter(|&&h| h).count() as f64;
        if found == 0.0 {
            return 0.0;
        }
        let p = found / k as f64;
        let r = found / labels.relevant(i) as f64;
        2.0 * p * r / (p + r)
    })))
}

fn discounted(hits: impl Iterator<Item = bool>) -> f64 {
    hits.enumerate()
        .filter(|(_, h)| *h)
        .map(|(k, _)| if k == 0 { 1.0 } else { 1.0 / ((k + 1) as f64).log2() })
        .sum()
}

/// Normalized discounted cumulative gain, averaged over queries with
/// relevant items.
pub fn dcg(ranks: &RankLists, gt: &GroundTruth) -> Result<f64, RetrievalError> {
    let labels = Labels::new(ranks, gt)?;
    Ok(mean(labels.scored().into_iter().map(|i| {
        let ideal = discounted(std::iter::repeat_n(true, labels.relevant(i)));
        discounted(labels.hits(ranks, i).into_iter()) / ideal
    })))
}

/// Nearest-neighbor classification counts; classes in sorted label order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    /// `counts[i][j]`: queries of class `i` whose nearest neighbor is in
    /// class `j`.
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), RetrievalError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(std::iter::once("class").chain(self.classes.iter().map(String::as_str)))?;
        for (name, row) in self.classes.iter().zip(&self.counts) {
            out.write_record(std::iter::once(name.clone()).chain(row.iter().map(usize::to_string)))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn trace(&self) -> usize {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }
}

pub fn confusion_matrix(ranks: &RankLists, gt: &GroundTruth) -> Result<ConfusionMatrix, RetrievalError> {
    let labels = Labels::new(ranks, gt)?;
    let k = labels.classes.len();
    let mut counts = vec![vec![0; k]; k];
    for (i, order) in ranks.order.iter().enumerate() {
        if let Some(&nn) = order.first() {
            counts[labels.of[i]][labels.of[nn]] += 1;
        }
    }
    Ok(ConfusionMatrix {
        classes: labels.classes,
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    None,
    Nearest,
    First,
    Second,
}

impl Tier {
    pub fn rgb(self) -> [u8; 3] {
        match self {
            Tier::Nearest => [0, 0, 0],
            Tier::First => [255, 0, 0],
            Tier::Second => [0, 0, 255],
            Tier::None => [255, 255, 255],
        }
    }
}

/// Per-query tier of every result, with models grouped by class on both
/// axes.
#[derive(Debug, Clone, PartialEq)]
pub struct TierImage {
    /// Model ids in display order: by class, then id.
    pub model_ids: Vec<String>,
    /// Row-major, `n × n`.
    pub cells: Vec<Tier>,
}

impl TierImage {
    pub fn get(&self, row: usize, col: usize) -> Tier {
        self.cells[row * self.model_ids.len() + col]
    }

    /// Writes a binary PPM with one pixel per cell.
    pub fn write_ppm<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.model_ids.len();
        write!(w, "P6\n{n} {n}\n255\n")?;
        let bytes: Vec<u8> = self.cells.iter().flat_map(|t| t.rgb()).collect();
        w.write_all(&bytes)
    }
}

pub fn tier_image(ranks: &RankLists, gt: &GroundTruth) -> Result<TierImage, RetrievalError> {
    let labels = Labels::new(ranks, gt)?;
    let n = ranks.model_ids.len();
    let mut display: Vec<usize> = (0..n).collect();
    display.sort_by(|&a, &b| {
        labels.of[a]
            .cmp(&labels.of[b])
            .then_with(|| ranks.model_ids[a].cmp(&ranks.model_ids[b]))
    });
    let mut position = vec![0; n];
    for (p, &m) in display.iter().enumerate() {
        position[m] = p;
    }
    let mut cells = vec![Tier::None; n * n];
    for (row, &i) in display.iter().enumerate() {
        let c = labels.relevant(i);
        for (k, &j) in ranks.order[i].iter().enumerate() {
            let tier = if k == 0 {
                Tier::Nearest
            } else if k < c {
                Tier::First
            } else if k < 2 * c {
                Tier::Second
            } else {
                continue;
            };
            cells[row * n + position[j]] = tier;
        }
    }
    Ok(TierImage {
        model_ids: display.iter().map(|&i| ranks.model_ids[i].clone()).collect(),
        cells,
    })
}

/// All scalar scores plus the curve and confusion matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    pub n_models: usize,
    pub nn: f64,
    pub ft: f64,
    pub st: f64,
    pub map: f64,
    pub e_measure: f64,
    pub e_cutoff: usize,
    pub dcg: f64,
    pub pr_curve: Vec<(f64, f64)>,
    pub confusion: ConfusionMatrix,
}

impl RetrievalReport {
    /// Writes `report.json`, `confusion.csv` and `pr_curve.csv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), RetrievalError> {
        fs::create_dir_all(dir)?;
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        fs::write(dir.join("report.json"), json)?;
        self.confusion
            .write_csv(io::BufWriter::new(fs::File::create(dir.join("confusion.csv"))?))?;
        let mut pr = csv::Writer::from_path(dir.join("pr_curve.csv"))?;
        pr.write_record(["recall", "precision"])?;
        for (r, p) in &self.pr_curve {
            pr.write_record([format!("{r:.16e}"), format!("{p:.16e}")])?;
        }
        pr.flush()?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self, RetrievalError> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Scores `dist` against `gt`.
pub fn evaluate(dist: &DistanceMatrix, gt: &GroundTruth, e_cutoff: usize) -> Result<(RetrievalReport, TierImage), RetrievalError> {
    if dist.len() < 2 {
        return Err(RetrievalError::TooFewModels);
    }
    let ranks = rank_lists(dist);
    let (nn, ft, st) = nn_ft_st(&ranks, gt)?;
    let (pr_curve, map) = precision_recall(&ranks, gt)?;
    let report = RetrievalReport {
        n_models: dist.len(),
        nn,
        ft,
        st,
        map,
        e_measure: e_measure(&ranks, gt, e_cutoff)?,
        e_cutoff,
        dcg: dcg(&ranks, gt)?,
        pr_curve,
        confusion: confusion_matrix(&ranks, gt)?,
    };
    Ok((report, tier_image(&ranks, gt)?))
}
