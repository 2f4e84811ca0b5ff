use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use edgelbp_core::{Alpha, DescriptorParams, FieldKind, Metric, RmaxRule};
use serde::{Deserialize, Serialize};

/// Every knob that affects the artifacts of a run. Stored as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Mesh files, in addition to whatever `glob` matches.
    pub inputs: Vec<PathBuf>,
    pub glob: Option<String>,
    /// Curvature field coded by the descriptor: k1, k2, H, K, SI or curvedness.
    pub field: String,
    pub p: usize,
    pub rings: usize,
    /// `explicit:<mm>` (or a bare number), `area`, or `edge:<C>`.
    pub r_max: String,
    pub alpha: String,
    pub metric: String,
    pub e_cutoff: usize,
    /// `model_id,class` CSV used by `evaluate`.
    pub labels: Option<PathBuf>,
    pub output: PathBuf,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            glob: None,
            field: "k2".into(),
            p: 15,
            rings: 5,
            r_max: "explicit:2.5".into(),
            alpha: "a1".into(),
            metric: "bhattacharyya".into(),
            e_cutoff: edgelbp_core::retrieval::DEFAULT_E_CUTOFF,
            labels: None,
            output: PathBuf::from("edgelbp-out"),
            workers: 0,
        }
    }
}

/// Typed view of the descriptor settings once the strings are parsed.
#[derive(Debug, Clone, Copy)]
pub struct Resolved {
    pub field: FieldKind,
    pub alpha: Alpha,
    pub rule: RmaxRule,
    pub metric: Metric,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn resolve(&self) -> anyhow::Result<Resolved> {
        let parsed = Resolved {
            field: self.field.parse().map_err(anyhow::Error::msg)?,
            alpha: self.alpha.parse().map_err(anyhow::Error::msg)?,
            rule: self.r_max.parse().map_err(anyhow::Error::msg)?,
            metric: self.metric.parse().map_err(anyhow::Error::msg)?,
        };
        if let RmaxRule::Explicit(r) | RmaxRule::EdgeLength(r) = parsed.rule {
            if !(r > 0.0 && r.is_finite()) {
                bail!("r_max value must be positive, got {r}");
            }
        }
        // r_max is resolved per mesh; 1.0 stands in for the range checks
        self.params(parsed, 1.0).validate()?;
        if self.e_cutoff == 0 {
            bail!("e_cutoff must be at least 1");
        }
        Ok(parsed)
    }

    pub fn params(&self, resolved: Resolved, r_max: f64) -> DescriptorParams {
        DescriptorParams { p: self.p, n_rings: self.rings, r_max, alpha: resolved.alpha }
    }

    /// Explicit inputs followed by glob matches, sorted and deduplicated.
    pub fn input_paths(&self) -> anyhow::Result<Vec<PathBuf>> {
        let mut paths = self.inputs.clone();
        if let Some(pattern) = &self.glob {
            for entry in glob::glob(pattern).with_context(|| format!("bad glob {pattern:?}"))? {
                paths.push(entry?);
            }
        }
        paths.sort();
        paths.dedup();
        if paths.is_empty() {
            bail!("no input meshes (set inputs or glob)");
        }
        Ok(paths)
    }

    pub fn descriptor_dir(&self) -> PathBuf {
        self.output.join("descriptors")
    }

    pub fn distmat_path(&self) -> PathBuf {
        self.output.join("distmat.csv")
    }
}
