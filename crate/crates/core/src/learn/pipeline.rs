//! End-to-end learning pipelines over a simulated dataset: class groupings,
//! unsupervised clustering (scale -> PCA -> per-UE aggregation -> K-means),
//! tSNE embedding, supervised ensemble training, and model evaluation.

use crate::beam_mgmt::{read_reports_csv, MeasurementReport};
use crate::error::{Error, Result};
use crate::learn::ensemble::{adaboost_fit, extra_trees_fit, AdaBoostConfig, ExtraTreesConfig};
use crate::learn::fingerprint::{build_fingerprints, FingerprintConfig, FingerprintSet, ScalingModel};
use crate::learn::kmeans::{elbow_select, kmeans_assign, kmeans_fit, ElbowResult, KMeansConfig};
use crate::learn::metrics::{cluster_purity, confusion_matrix, misclassification_rate};
use crate::learn::model_io::{ModelFile, MODEL_FORMAT_VERSION};
use crate::learn::pca::{pca_fit, pca_transform, PcaModel};
use crate::learn::split::stratified_split_by_ue;
use crate::learn::tsne::{tsne_embed, TsneConfig, TsneEmbedding};
use crate::matrix::Matrix;
use crate::num::Real;
use crate::scene::{read_manifest, ManifestRecord, SubBehavior, UeClass};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Which label the experiment assigns to each UE; UEs mapping to `None`
/// are excluded from the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    FiveClass,
    FastSlow,
    PedBike,
    CrossNoncross,
    PedNcCarMc,
    PedCrCarMc,
    PedCarMc,
}

impl Grouping {
    pub fn label_of<R: Real>(&self, rec: &ManifestRecord<R>) -> Option<usize> {
        let crossing = rec.sub_behavior == SubBehavior::CrossesStreet;
        match self {
            Grouping::FiveClass => Some(match rec.class {
                UeClass::Pedestrian => 0,
                UeClass::Bicycle => 1,
                UeClass::Car => 2,
                UeClass::Bus => 3,
                UeClass::Motorcycle => 4,
            }),
            Grouping::FastSlow => Some(usize::from(rec.class.is_fast())),
            Grouping::PedBike => match rec.class {
                UeClass::Pedestrian => Some(0),
                UeClass::Bicycle => Some(1),
                _ => None,
            },
            Grouping::CrossNoncross => match rec.class {
                UeClass::Pedestrian => Some(usize::from(crossing)),
                _ => None,
            },
            Grouping::PedNcCarMc => match (rec.class, crossing) {
                (UeClass::Pedestrian, false) => Some(0),
                (UeClass::Car, _) => Some(1),
                (UeClass::Motorcycle, _) => Some(2),
                _ => None,
            },
            Grouping::PedCrCarMc => match (rec.class, crossing) {
                (UeClass::Pedestrian, true) => Some(0),
                (UeClass::Car, _) => Some(1),
                (UeClass::Motorcycle, _) => Some(2),
                _ => None,
            },
            Grouping::PedCarMc => match rec.class {
                UeClass::Pedestrian => Some(0),
                UeClass::Car => Some(1),
                UeClass::Motorcycle => Some(2),
                _ => None,
            },
        }
    }

    pub fn class_names(&self) -> Vec<String> {
        let names: &[&str] = match self {
            Grouping::FiveClass => &["pedestrian", "bicycle", "car", "bus", "motorcycle"],
            Grouping::FastSlow => &["slow", "fast"],
            Grouping::PedBike => &["pedestrian", "bicycle"],
            Grouping::CrossNoncross => &["non_crossing", "crossing"],
            Grouping::PedNcCarMc => &["pedestrian_nc", "car", "motorcycle"],
            Grouping::PedCrCarMc => &["pedestrian_cr", "car", "motorcycle"],
            Grouping::PedCarMc => &["pedestrian", "car", "motorcycle"],
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names().len()
    }
}

/// Report stream plus the ground-truth manifest.
#[derive(Debug, Clone)]
pub struct LabeledDataset<R> {
    pub reports: Vec<MeasurementReport<R>>,
    pub report_width: usize,
    pub labels: BTreeMap<u32, ManifestRecord<R>>,
}

impl<R: Real> LabeledDataset<R> {
    pub fn load(reports_path: &Path, manifest_path: &Path) -> Result<Self> {
        let (reports, report_width) = read_reports_csv(reports_path)?;
        let mut labels = BTreeMap::new();
        for rec in read_manifest::<R>(manifest_path)? {
            labels.insert(rec.ue_id, rec);
        }
        Ok(Self { reports, report_width, labels })
    }

    /// Reports and `ue -> label` map of the UEs selected by the grouping.
    pub fn select(&self, grouping: Grouping) -> Result<(Vec<MeasurementReport<R>>, BTreeMap<u32, usize>)> {
        let mut ue_labels = BTreeMap::new();
        for rec in self.labels.values() {
            if let Some(label) = grouping.label_of(rec) {
                ue_labels.insert(rec.ue_id, label);
            }
        }
        if ue_labels.is_empty() {
            return Err(Error::data("no UEs in the dataset match the recipe's grouping"));
        }
        let present: Vec<usize> = {
            let mut seen = vec![false; grouping.n_classes()];
            for &l in ue_labels.values() {
                seen[l] = true;
            }
            seen.iter().enumerate().filter(|(_, &s)| !s).map(|(i, _)| i).collect()
        };
        if !present.is_empty() {
            let names = grouping.class_names();
            let missing: Vec<&str> = present.iter().map(|&i| names[i].as_str()).collect();
            return Err(Error::Data(format!(
                "dataset has no UEs for class(es): {}",
                missing.join(", ")
            )));
        }
        let reports: Vec<MeasurementReport<R>> = self
            .reports
            .iter()
            .filter(|r| ue_labels.contains_key(&r.ue_id))
            .cloned()
            .collect();
        if reports.is_empty() {
            return Err(Error::data("selected UEs have no reports"));
        }
        Ok((reports, ue_labels))
    }
}

/// Mean of the projected rows of each UE: one feature vector per UE.
/// Returns the matrix and the UE ids in row order.
pub fn aggregate_per_ue<R: Real>(rows: &Matrix<R>, ue_ids: &[u32]) -> (Matrix<R>, Vec<u32>) {
    let mut sums: BTreeMap<u32, (Vec<R>, usize)> = BTreeMap::new();
    for (i, row) in rows.iter_rows().enumerate() {
        let entry = sums.entry(ue_ids[i]).or_insert_with(|| (vec![R::zero(); rows.cols()], 0));
        for (a, &v) in entry.0.iter_mut().zip(row) {
            *a += v;
        }
        entry.1 += 1;
    }
    let mut out = Matrix::zeros(sums.len(), rows.cols());
    let mut ids = Vec::with_capacity(sums.len());
    for (r, (ue, (sum, count))) in sums.into_iter().enumerate() {
        let inv = R::one() / R::of_usize(count);
        for (c, v) in sum.into_iter().enumerate() {
            out.set(r, c, v * inv);
        }
        ids.push(ue);
    }
    (out, ids)
}

fn reports_of<R: Real>(
    reports: &[MeasurementReport<R>],
    ues: &[u32],
) -> Vec<MeasurementReport<R>> {
    let set: std::collections::BTreeSet<u32> = ues.iter().copied().collect();
    reports.iter().filter(|r| set.contains(&r.ue_id)).cloned().collect()
}

// ---------------------------------------------------------------------------
// Clustering
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusterParams {
    pub k: usize,
    /// Optional elbow scan; when present the scanned knee overrides `k`.
    pub elbow_range: Option<(usize, usize)>,
    pub kmeans: KMeansConfig,
    /// PCA component cap; the fit uses min(cap, dim, train rows).
    pub n_components: usize,
    pub test_fraction: f64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            k: 2,
            elbow_range: None,
            kmeans: KMeansConfig::default(),
            n_components: 50,
            test_fraction: 0.3,
        }
    }
}

/// One row of the cluster assignment / scatter table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UeAssignment<R> {
    pub ue_id: u32,
    pub label: usize,
    pub cluster: usize,
    /// First two coordinates of the UE's aggregated projection (PCA) or
    /// embedding (tSNE).
    pub x: R,
    pub y: R,
    pub heldout: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterOutcome<R> {
    pub grouping: Grouping,
    pub class_names: Vec<String>,
    pub k: usize,
    pub purity_all: R,
    pub purity_heldout: R,
    pub inertia: R,
    pub elbow: Option<ElbowResult<R>>,
    pub assignments: Vec<UeAssignment<R>>,
    pub label_counts: Vec<usize>,
    pub pca_components: usize,
    /// Cumulative explained variance over the used components.
    pub cumulative_evr: R,
    pub model: ModelFile<R>,
}

/// scaling -> PCA -> per-UE aggregation -> K-means. The scaler, PCA and
/// centroids are fitted on the training UEs only; purity is reported both
/// over all UEs and over the held-out UEs.
pub fn cluster_pipeline<R: Real>(
    dataset: &LabeledDataset<R>,
    grouping: Grouping,
    fp: &FingerprintConfig,
    params: &ClusterParams,
    seed: u64,
) -> Result<ClusterOutcome<R>> {
    let (reports, ue_labels) = dataset.select(grouping)?;
    let (train_ues, test_ues) = stratified_split_by_ue(&ue_labels, params.test_fraction, seed)?;

    let train_reports = reports_of(&reports, &train_ues);
    let (train_set, scaler) = build_fingerprints(&train_reports, fp, None, None)?;

    let n_comp = params
        .n_components
        .min(train_set.matrix.cols())
        .min(train_set.matrix.rows())
        .max(1);
    let pca = pca_fit(&train_set.matrix, n_comp)?;
    let cumulative_evr: R = pca.explained_variance_ratio.iter().copied().sum();

    let train_proj = pca_transform(&pca, &train_set.matrix)?;
    let (train_agg, train_agg_ids) = aggregate_per_ue(&train_proj, &train_set.ue_ids);

    let (k, elbow) = match params.elbow_range {
        Some((lo, hi)) => {
            let res = elbow_select(&train_agg, lo, hi, seed, &params.kmeans)?;
            (res.k, Some(res))
        }
        None => (params.k, None),
    };
    let model = kmeans_fit(&train_agg, k, seed, &params.kmeans)?;

    // Project and aggregate everything with the fitted chain.
    let (all_set, _) = build_fingerprints(&reports, fp, None, Some(&scaler))?;
    let all_proj = pca_transform(&pca, &all_set.matrix)?;
    let (all_agg, all_ids) = aggregate_per_ue(&all_proj, &all_set.ue_ids);
    let clusters = kmeans_assign(&model, &all_agg)?;

    let test_set: std::collections::BTreeSet<u32> = test_ues.iter().copied().collect();
    let mut assignments = Vec::with_capacity(all_ids.len());
    let mut labels_all = Vec::new();
    let mut clusters_all = Vec::new();
    let mut labels_held = Vec::new();
    let mut clusters_held = Vec::new();
    for (i, &ue) in all_ids.iter().enumerate() {
        let label = ue_labels[&ue];
        let heldout = test_set.contains(&ue);
        assignments.push(UeAssignment {
            ue_id: ue,
            label,
            cluster: clusters[i],
            x: all_agg.get(i, 0),
            y: if all_agg.cols() > 1 { all_agg.get(i, 1) } else { R::zero() },
            heldout,
        });
        labels_all.push(label);
        clusters_all.push(clusters[i]);
        if heldout {
            labels_held.push(label);
            clusters_held.push(clusters[i]);
        }
    }

    let mut label_counts = vec![0usize; grouping.n_classes()];
    for &l in &labels_all {
        label_counts[l] += 1;
    }

    let model_file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        kind: "kmeans".into(),
        grouping,
        fingerprint: fp.clone(),
        report_width: dataset.report_width,
        class_names: grouping.class_names(),
        scaler,
        pca: Some(pca),
        aggregate_per_ue: true,
        ensemble: None,
        kmeans: Some(model.clone()),
    };
    let _ = train_agg_ids;

    Ok(ClusterOutcome {
        grouping,
        class_names: grouping.class_names(),
        k,
        purity_all: cluster_purity(&clusters_all, &labels_all)?,
        purity_heldout: cluster_purity(&clusters_held, &labels_held)?,
        inertia: model.inertia,
        elbow,
        assignments,
        label_counts,
        pca_components: n_comp,
        cumulative_evr,
        model: model_file,
    })
}

// ---------------------------------------------------------------------------
// tSNE embedding
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbedOutcome<R> {
    pub grouping: Grouping,
    pub class_names: Vec<String>,
    pub points: Vec<UeAssignment<R>>,
    pub final_kl: R,
    pub label_counts: Vec<usize>,
    pub embedding: TsneEmbedding<R>,
}

/// scaling -> PCA -> per-UE aggregation -> tSNE over all selected UEs
/// (tSNE has no out-of-sample extension, so no split here).
pub fn embed_pipeline<R: Real>(
    dataset: &LabeledDataset<R>,
    grouping: Grouping,
    fp: &FingerprintConfig,
    n_components: usize,
    tsne: &TsneConfig<R>,
) -> Result<EmbedOutcome<R>> {
    let (reports, ue_labels) = dataset.select(grouping)?;
    let (set, _scaler) = build_fingerprints(&reports, fp, None, None)?;
    let n_comp = n_components.min(set.matrix.cols()).min(set.matrix.rows()).max(1);
    let pca = pca_fit(&set.matrix, n_comp)?;
    let proj = pca_transform(&pca, &set.matrix)?;
    let (agg, ids) = aggregate_per_ue(&proj, &set.ue_ids);

    let embedding = tsne_embed(&agg, tsne)?;
    let mut label_counts = vec![0usize; grouping.n_classes()];
    let mut points = Vec::with_capacity(ids.len());
    for (i, &ue) in ids.iter().enumerate() {
        let label = ue_labels[&ue];
        label_counts[label] += 1;
        points.push(UeAssignment {
            ue_id: ue,
            label,
            cluster: 0,
            x: embedding.points.get(i, 0),
            y: embedding.points.get(i, 1),
            heldout: false,
        });
    }
    Ok(EmbedOutcome {
        grouping,
        class_names: grouping.class_names(),
        points,
        final_kl: embedding.final_kl,
        label_counts,
        embedding,
    })
}

// ---------------------------------------------------------------------------
// Supervised training / evaluation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMethod {
    ExtraTrees(ExtraTreesConfig),
    AdaBoost(AdaBoostConfig),
}

impl TrainMethod {
    pub fn kind(&self) -> &'static str {
        match self {
            TrainMethod::ExtraTrees(_) => "extra_trees",
            TrainMethod::AdaBoost(_) => "ada_boost",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainOutcome<R> {
    pub grouping: Grouping,
    pub class_names: Vec<String>,
    /// Held-out per-window misclassification rate.
    pub misclassification: R,
    pub training_error: R,
    /// confusion[true][pred] over the held-out rows.
    pub confusion: Vec<Vec<usize>>,
    pub train_ues: Vec<u32>,
    pub test_ues: Vec<u32>,
    pub n_train_rows: usize,
    pub n_test_rows: usize,
    pub model: ModelFile<R>,
}

fn labels_for_rows(ue_ids: &[u32], ue_labels: &BTreeMap<u32, usize>) -> Vec<usize> {
    ue_ids.iter().map(|ue| ue_labels[ue]).collect()
}

/// Stratified-by-UE split, scale fit on train, ensemble fit, held-out
/// evaluation. Trees consume the scaled fingerprints directly (no PCA).
pub fn train_pipeline<R: Real>(
    dataset: &LabeledDataset<R>,
    grouping: Grouping,
    fp: &FingerprintConfig,
    method: &TrainMethod,
    test_fraction: f64,
    seed: u64,
) -> Result<TrainOutcome<R>> {
    let (reports, ue_labels) = dataset.select(grouping)?;
    let (train_ues, test_ues) = stratified_split_by_ue(&ue_labels, test_fraction, seed)?;

    let train_reports = reports_of(&reports, &train_ues);
    let test_reports = reports_of(&reports, &test_ues);
    let (train_set, scaler) = build_fingerprints(&train_reports, fp, None, None)?;
    let (test_set, _) = build_fingerprints(&test_reports, fp, None, Some(&scaler))?;

    let y_train = labels_for_rows(&train_set.ue_ids, &ue_labels);
    let y_test = labels_for_rows(&test_set.ue_ids, &ue_labels);

    let ensemble = match method {
        TrainMethod::ExtraTrees(cfg) => extra_trees_fit(&train_set.matrix, &y_train, cfg, seed)?,
        TrainMethod::AdaBoost(cfg) => adaboost_fit(&train_set.matrix, &y_train, cfg, seed)?,
    };

    let pred_train = ensemble.predict(&train_set.matrix)?;
    let pred_test = ensemble.predict(&test_set.matrix)?;
    let n_classes = grouping.n_classes();

    let model = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        kind: method.kind().into(),
        grouping,
        fingerprint: fp.clone(),
        report_width: dataset.report_width,
        class_names: grouping.class_names(),
        scaler,
        pca: None,
        aggregate_per_ue: false,
        ensemble: Some(ensemble),
        kmeans: None,
    };

    Ok(TrainOutcome {
        grouping,
        class_names: grouping.class_names(),
        misclassification: misclassification_rate(&pred_test, &y_test)?,
        training_error: misclassification_rate(&pred_train, &y_train)?,
        confusion: confusion_matrix(&pred_test, &y_test, n_classes)?,
        train_ues,
        test_ues,
        n_train_rows: train_set.matrix.rows(),
        n_test_rows: test_set.matrix.rows(),
        model,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalOutcome<R> {
    pub kind: String,
    pub class_names: Vec<String>,
    pub n_rows: usize,
    /// Per-window misclassification for ensembles.
    pub misclassification: Option<R>,
    pub confusion: Option<Vec<Vec<usize>>>,
    /// Per-UE purity for K-means models.
    pub purity: Option<R>,
}

/// Apply a persisted model chain (scaler, optional PCA, model) to a dataset.
pub fn eval_model<R: Real>(
    model: &ModelFile<R>,
    dataset: &LabeledDataset<R>,
) -> Result<EvalOutcome<R>> {
    if dataset.report_width != model.report_width {
        return Err(Error::Dimension {
            expected: model.report_width,
            actual: dataset.report_width,
        });
    }
    let (reports, ue_labels) = dataset.select(model.grouping)?;
    let (set, _) = build_fingerprints(&reports, &model.fingerprint, None, Some(&model.scaler))?;
    if set.matrix.cols() != model.feature_dim() {
        return Err(Error::Dimension { expected: model.feature_dim(), actual: set.matrix.cols() });
    }

    let features = match &model.pca {
        Some(pca) => pca_transform(pca, &set.matrix)?,
        None => set.matrix.clone(),
    };

    if let Some(ensemble) = &model.ensemble {
        let y: Vec<usize> = labels_for_rows(&set.ue_ids, &ue_labels);
        let pred = ensemble.predict(&features)?;
        return Ok(EvalOutcome {
            kind: model.kind.clone(),
            class_names: model.class_names.clone(),
            n_rows: features.rows(),
            misclassification: Some(misclassification_rate(&pred, &y)?),
            confusion: Some(confusion_matrix(&pred, &y, model.class_names.len())?),
            purity: None,
        });
    }
    if let Some(kmeans) = &model.kmeans {
        let (agg, ids) = aggregate_per_ue(&features, &set.ue_ids);
        let clusters = kmeans_assign(kmeans, &agg)?;
        let labels: Vec<usize> = ids.iter().map(|ue| ue_labels[ue]).collect();
        return Ok(EvalOutcome {
            kind: model.kind.clone(),
            class_names: model.class_names.clone(),
            n_rows: agg.rows(),
            misclassification: None,
            confusion: None,
            purity: Some(cluster_purity(&clusters, &labels)?),
        });
    }
    Err(Error::Model("model file carries neither an ensemble nor centroids".into()))
}
