//! Versioned, self-describing model container. A model file bundles the
//! whole inference chain (scaler, optional PCA, and the fitted model) plus
//! the feature configuration needed to rebuild compatible fingerprints.

use crate::error::{Error, Result};
use crate::learn::ensemble::TreeEnsemble;
use crate::learn::fingerprint::{FingerprintConfig, ScalingModel};
use crate::learn::kmeans::KMeansModel;
use crate::learn::pca::PcaModel;
use crate::learn::pipeline::Grouping;
use crate::num::Real;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile<R> {
    pub format_version: u32,
    /// "extra_trees", "ada_boost" or "kmeans".
    pub kind: String,
    pub grouping: Grouping,
    pub fingerprint: FingerprintConfig,
    pub report_width: usize,
    pub class_names: Vec<String>,
    pub scaler: ScalingModel<R>,
    pub pca: Option<PcaModel<R>>,
    /// Whether inference aggregates projected rows to one vector per UE.
    pub aggregate_per_ue: bool,
    pub ensemble: Option<TreeEnsemble<R>>,
    pub kmeans: Option<KMeansModel<R>>,
}

impl<R: Real> ModelFile<R> {
    /// Feature dimension expected at the scaler input.
    pub fn feature_dim(&self) -> usize {
        2 * self.report_width * self.fingerprint.window_w
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let model: ModelFile<R> =
            serde_json::from_str(&text).map_err(|e| Error::Model(format!("{e}")))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Model(format!(
                "unsupported model format version {} (expected {MODEL_FORMAT_VERSION})",
                model.format_version
            )));
        }
        Ok(model)
    }
}
