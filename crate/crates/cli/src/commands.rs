use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use edgelbp_core::curvature::curvature_field;
use edgelbp_core::{compute_descriptor, distance_matrix, evaluate, load_mesh_auto, DistanceMatrix, EdgeLbpDescriptor, GroundTruth};
use serde::Serialize;

use crate::config::{Resolved, RunConfig};

pub const DESCRIPTOR_EXTENSION: &str = "edgelbp";

/// A failed command and the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub error: anyhow::Error,
}

impl CliError {
    /// Bad configuration or unusable inputs: nothing was attempted.
    pub fn config(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 2, error: error.into() }
    }

    /// The command ran but some or all of its work failed.
    pub fn failed(error: impl Into<anyhow::Error>) -> Self {
        Self { code: 1, error: error.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Serialize)]
pub struct ManifestRow {
    pub model_id: String,
    pub path: String,
    pub n_vertices: Option<usize>,
    pub n_admissible: Option<usize>,
    pub r_max: Option<f64>,
    pub wall_time_s: f64,
    pub status: String,
}

/// Model ids are file stems and must be unique across the inputs.
pub fn model_ids(paths: &[PathBuf]) -> CliResult<Vec<String>> {
    let mut seen = BTreeMap::new();
    let mut ids = Vec::with_capacity(paths.len());
    for path in paths {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| CliError::config(anyhow!("{} has no file name", path.display())))?;
        if let Some(other) = seen.insert(id.clone(), path) {
            return Err(CliError::config(anyhow!(
                "model id {id:?} is shared by {} and {}",
                other.display(),
                path.display()
            )));
        }
        ids.push(id);
    }
    Ok(ids)
}

fn describe_one(path: &Path, id: &str, cfg: &RunConfig, resolved: Resolved) -> anyhow::Result<EdgeLbpDescriptor> {
    let mesh = load_mesh_auto(path)?;
    let h = curvature_field(&mesh, resolved.field)?;
    let r_max = resolved.rule.resolve(&mesh)?;
    let mut desc = compute_descriptor(&mesh, &h, &cfg.params(resolved, r_max))?;
    desc.model_id = id.to_string();
    desc.r_max_rule = resolved.rule.to_string();
    Ok(desc)
}

/// Writes one descriptor per mesh plus `manifest.csv`. Meshes are handled one
/// after another, each parallel over its vertices, so the manifest times add
/// up to the run time.
pub fn describe(cfg: &RunConfig) -> CliResult<Vec<ManifestRow>> {
    let resolved = cfg.resolve().map_err(CliError::config)?;
    let paths = cfg.input_paths().map_err(CliError::config)?;
    let ids = model_ids(&paths)?;
    let dir = cfg.descriptor_dir();
    fs::create_dir_all(&dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(CliError::failed)?;
    fs::write(cfg.output.join("config.toml"), cfg.to_toml()).map_err(CliError::failed)?;

    let mut rows = Vec::with_capacity(paths.len());
    for (path, id) in paths.iter().zip(&ids) {
        let start = Instant::now();
        let target = dir.join(format!("{id}.{DESCRIPTOR_EXTENSION}"));
        let result = describe_one(path, id, cfg, resolved).and_then(|d| {
            d.save(&target)?;
            Ok(d)
        });
        let mut row = ManifestRow {
            model_id: id.clone(),
            path: path.display().to_string(),
            n_vertices: None,
            n_admissible: None,
            r_max: None,
            wall_time_s: 0.0,
            status: "ok".into(),
        };
        match result {
            Ok(d) => {
                log::info!("{id}: {}/{} admissible vertices", d.n_admissible, d.n_vertices);
                row.n_vertices = Some(d.n_vertices);
                row.n_admissible = Some(d.n_admissible);
                row.r_max = Some(d.params.r_max);
            }
            Err(e) => {
                log::error!("{}: {e:#}", path.display());
                // a stale file from an earlier run would leak into distmat
                let _ = fs::remove_file(&target);
                row.status = format!("error: {e:#}");
            }
        }
        row.wall_time_s = start.elapsed().as_secs_f64();
        rows.push(row);
    }

    let manifest = cfg.output.join("manifest.csv");
    let write = || -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(&manifest)?;
        for row in &rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    };
    write().map_err(CliError::failed)?;

    let failed = rows.iter().filter(|r| r.status != "ok").count();
    if failed > 0 {
        return Err(CliError::failed(anyhow!("{failed} of {} meshes failed", rows.len())));
    }
    Ok(rows)
}

/// Descriptor files in `dir`, sorted by file name.
pub fn load_descriptors(dir: &Path) -> anyhow::Result<Vec<EdgeLbpDescriptor>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.extension().is_some_and(|e| e == DESCRIPTOR_EXTENSION));
    paths.sort();
    paths
        .iter()
        .map(|p| EdgeLbpDescriptor::load(p).with_context(|| format!("loading {}", p.display())))
        .collect()
}

pub fn distmat(cfg: &RunConfig) -> CliResult<DistanceMatrix> {
    let resolved = cfg.resolve().map_err(CliError::config)?;
    let descs = load_descriptors(&cfg.descriptor_dir()).map_err(CliError::config)?;
    if descs.is_empty() {
        return Err(CliError::config(anyhow!("no descriptors in {}", cfg.descriptor_dir().display())));
    }
    let dist = distance_matrix(&descs, resolved.metric).map_err(CliError::failed)?;
    dist.save(&cfg.distmat_path()).map_err(CliError::failed)?;
    Ok(dist)
}

pub fn evaluate_run(cfg: &RunConfig) -> CliResult<edgelbp_core::RetrievalReport> {
    cfg.resolve().map_err(CliError::config)?;
    let labels = cfg
        .labels
        .as_ref()
        .ok_or_else(|| CliError::config(anyhow!("evaluate needs a labels CSV")))?;
    let gt = GroundTruth::load(labels).map_err(CliError::config)?;
    let dist = DistanceMatrix::load(&cfg.distmat_path())
        .with_context(|| format!("loading {}", cfg.distmat_path().display()))
        .map_err(CliError::config)?;
    let (report, tier) = evaluate(&dist, &gt, cfg.e_cutoff).map_err(CliError::failed)?;
    fs::create_dir_all(&cfg.output).map_err(CliError::failed)?;
    report.write_dir(&cfg.output).map_err(CliError::failed)?;
    let file = File::create(cfg.output.join("tier.ppm")).map_err(CliError::failed)?;
    tier.write_ppm(BufWriter::new(file)).map_err(CliError::failed)?;
    Ok(report)
}

/// Writes `curvature/<id>.<field>.csv` for every input mesh.
pub fn curvature(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let resolved = cfg.resolve().map_err(CliError::config)?;
    let paths = cfg.input_paths().map_err(CliError::config)?;
    let ids = model_ids(&paths)?;
    let dir = cfg.output.join("curvature");
    fs::create_dir_all(&dir).map_err(CliError::failed)?;
    let mut written = Vec::new();
    let mut failed = 0;
    for (path, id) in paths.iter().zip(&ids) {
        let target = dir.join(format!("{id}.{}.csv", resolved.field));
        let result = (|| -> anyhow::Result<()> {
            let mesh = load_mesh_auto(path)?;
            let h = curvature_field(&mesh, resolved.field)?;
            h.write_csv(BufWriter::new(File::create(&target)?))?;
            Ok(())
        })();
        match result {
            Ok(()) => written.push(target),
            Err(e) => {
                log::error!("{}: {e:#}", path.display());
                failed += 1;
            }
        }
    }
    if failed > 0 {
        return Err(CliError::failed(anyhow!("{failed} of {} meshes failed", paths.len())));
    }
    Ok(written)
}

/// describe, distmat and, when labels are configured, evaluate. A partial
/// describe failure still produces the matrix of the meshes that worked.
pub fn run_all(cfg: &RunConfig) -> CliResult<()> {
    let described = describe(cfg);
    if let Err(e) = &described {
        if e.code != 1 {
            return described.map(|_| ());
        }
    }
    distmat(cfg)?;
    if cfg.labels.is_some() {
        evaluate_run(cfg)?;
    }
    described.map(|_| ())
}
