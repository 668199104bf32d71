//! Fingerprint construction and feature scaling.
//!
//! A fingerprint stacks the scaled RSRP values and the scaled narrow-beam
//! indices of `W` consecutive reports of one UE: for each report in the
//! window (oldest first) the `R` RSRPs come first, then the `R` beam
//! features, giving `2 * R * W` features per row.

use crate::beam_mgmt::MeasurementReport;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::Real;
use crate::paam::GridOfBeams;
use serde::{Deserialize, Serialize};

/// How the narrow-beam identity enters the feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamEncoding {
    /// The raw beam index as a real number (default).
    RawIndex,
    /// The beam's azimuth steering angle in degrees.
    SteeringAzimuth,
}

impl Default for BeamEncoding {
    fn default() -> Self {
        BeamEncoding::RawIndex
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingKind {
    MinMax,
    ZScore,
}

impl Default for ScalingKind {
    fn default() -> Self {
        ScalingKind::MinMax
    }
}

/// Windowing and encoding parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct FingerprintConfig {
    /// Window length in reports.
    pub window_w: usize,
    /// Step between consecutive windows of one UE.
    pub stride: usize,
    /// Optional cap on windows per UE (evenly subsampled when exceeded).
    pub max_per_ue: Option<usize>,
    pub encoding: BeamEncoding,
    pub scaling: ScalingKind,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        Self {
            window_w: 3,
            stride: 1,
            max_per_ue: None,
            encoding: BeamEncoding::RawIndex,
            scaling: ScalingKind::MinMax,
        }
    }
}

/// Fitted per-feature scaling transform.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ScalingModel<R> {
    /// Affine map taking the training range of each feature to [0, 1].
    MinMax { min: Vec<R>, max: Vec<R> },
    /// Standardization to zero mean and unit variance.
    ZScore { mean: Vec<R>, std: Vec<R> },
}

impl<R: Real> ScalingModel<R> {
    pub fn fit(kind: ScalingKind, x: &Matrix<R>) -> Self {
        match kind {
            ScalingKind::MinMax => {
                let mut min = vec![R::infinity(); x.cols()];
                let mut max = vec![R::neg_infinity(); x.cols()];
                for row in x.iter_rows() {
                    for (j, &v) in row.iter().enumerate() {
                        min[j] = min[j].min(v);
                        max[j] = max[j].max(v);
                    }
                }
                ScalingModel::MinMax { min, max }
            }
            ScalingKind::ZScore => {
                let mean = x.col_means();
                let mut var = vec![R::zero(); x.cols()];
                for row in x.iter_rows() {
                    for (j, &v) in row.iter().enumerate() {
                        let d = v - mean[j];
                        var[j] += d * d;
                    }
                }
                let n = R::of_usize(x.rows().max(1));
                let std = var.into_iter().map(|v| (v / n).sqrt()).collect();
                ScalingModel::ZScore { mean, std }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ScalingModel::MinMax { min, .. } => min.len(),
            ScalingModel::ZScore { mean, .. } => mean.len(),
        }
    }

    /// Apply the stored affine transform in place. Constant features map
    /// to 0.
    pub fn apply(&self, x: &mut Matrix<R>) -> Result<()> {
        if x.cols() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), actual: x.cols() });
        }
        for r in 0..x.rows() {
            let row = x.row_mut(r);
            match self {
                ScalingModel::MinMax { min, max } => {
                    for (j, v) in row.iter_mut().enumerate() {
                        let span = max[j] - min[j];
                        *v = if span > R::zero() { (*v - min[j]) / span } else { R::zero() };
                    }
                }
                ScalingModel::ZScore { mean, std } => {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = if std[j] > R::zero() { (*v - mean[j]) / std[j] } else { R::zero() };
                    }
                }
            }
        }
        Ok(())
    }
}

/// A built fingerprint matrix plus the row metadata used for label joins.
#[derive(Debug, Clone)]
pub struct FingerprintSet<R> {
    pub matrix: Matrix<R>,
    /// Owning UE of each row (label join only, never a feature).
    pub ue_ids: Vec<u32>,
    /// Report time of the newest report in each row's window.
    pub times: Vec<R>,
    pub window_w: usize,
    pub report_width: usize,
    /// UEs dropped because they had fewer than `window_w` reports.
    pub skipped_ues: usize,
}

/// Feature column names: for each window position, `rsrp_w{i}_{j}` then
/// `nb_w{i}_{j}`.
pub fn feature_names(report_width: usize, window_w: usize) -> Vec<String> {
    let mut names = Vec::with_capacity(2 * report_width * window_w);
    for w in 0..window_w {
        for j in 0..report_width {
            names.push(format!("rsrp_w{w}_{j}"));
        }
        for j in 0..report_width {
            names.push(format!("nb_w{w}_{j}"));
        }
    }
    names
}

/// Evenly pick `keep` indices from `0..n`.
fn even_subsample(n: usize, keep: usize) -> Vec<usize> {
    if keep >= n {
        return (0..n).collect();
    }
    (0..keep).map(|i| i * n / keep).collect()
}

/// Build fingerprint rows from a report stream. Reports are first sorted
/// canonically by (ue_id, t) so the result is independent of ingestion
/// order. When `scaler` is `None` a new scaling model is fitted on the
/// built matrix (training); otherwise the given model is applied (inference).
pub fn build_fingerprints<R: Real>(
    reports: &[MeasurementReport<R>],
    config: &FingerprintConfig,
    gob: Option<&GridOfBeams<R>>,
    scaler: Option<&ScalingModel<R>>,
) -> Result<(FingerprintSet<R>, ScalingModel<R>)> {
    if config.window_w == 0 || config.stride == 0 {
        return Err(Error::config("window_w and stride must be at least 1"));
    }
    if reports.is_empty() {
        return Err(Error::data("no reports to build fingerprints from"));
    }
    let report_width = reports[0].entries.len();
    if reports.iter().any(|r| r.entries.len() != report_width) {
        return Err(Error::data("inconsistent report widths in stream"));
    }
    if config.encoding == BeamEncoding::SteeringAzimuth && gob.is_none() {
        return Err(Error::config("steering-azimuth encoding needs the grid of beams"));
    }

    // Canonical (ue_id, t) order.
    let mut order: Vec<usize> = (0..reports.len()).collect();
    order.sort_by(|&a, &b| {
        reports[a]
            .ue_id
            .cmp(&reports[b].ue_id)
            .then(reports[a].t_s.partial_cmp(&reports[b].t_s).expect("finite times"))
    });

    let beam_feature = |nb_index: u32| -> R {
        match config.encoding {
            BeamEncoding::RawIndex => R::of(nb_index as f64),
            BeamEncoding::SteeringAzimuth => gob
                .unwrap()
                .beam(nb_index)
                .map(|b| b.az_steer_deg)
                .unwrap_or_else(R::zero),
        }
    };

    let dim = 2 * report_width * config.window_w;
    let mut rows: Vec<R> = Vec::new();
    let mut ue_ids = Vec::new();
    let mut times = Vec::new();
    let mut skipped_ues = 0usize;
    let mut n_rows = 0usize;

    let mut i = 0;
    while i < order.len() {
        let ue = reports[order[i]].ue_id;
        let mut j = i;
        while j < order.len() && reports[order[j]].ue_id == ue {
            j += 1;
        }
        let group = &order[i..j];
        i = j;

        if group.len() < config.window_w {
            skipped_ues += 1;
            continue;
        }
        let n_windows = (group.len() - config.window_w) / config.stride + 1;
        let starts: Vec<usize> = match config.max_per_ue {
            Some(cap) => even_subsample(n_windows, cap),
            None => (0..n_windows).collect(),
        };
        for s in starts {
            let begin = s * config.stride;
            for k in 0..config.window_w {
                let r = &reports[group[begin + k]];
                for e in &r.entries {
                    rows.push(e.rsrp_dbm);
                }
                for e in &r.entries {
                    rows.push(beam_feature(e.nb_index));
                }
            }
            ue_ids.push(ue);
            times.push(reports[group[begin + config.window_w - 1]].t_s);
            n_rows += 1;
        }
    }

    if skipped_ues > 0 {
        log::debug!("{skipped_ues} UEs had fewer than {} reports and yielded no rows", config.window_w);
    }
    if n_rows == 0 {
        return Err(Error::data(format!(
            "no UE has {} consecutive reports; fingerprints are empty",
            config.window_w
        )));
    }

    let mut matrix = Matrix::from_vec(n_rows, dim, rows)?;
    let fitted = match scaler {
        Some(s) => {
            s.apply(&mut matrix)?;
            s.clone()
        }
        None => {
            let s = ScalingModel::fit(config.scaling, &matrix);
            s.apply(&mut matrix)?;
            s
        }
    };

    Ok((
        FingerprintSet {
            matrix,
            ue_ids,
            times,
            window_w: config.window_w,
            report_width,
            skipped_ues,
        },
        fitted,
    ))
}

/// CSV export with a header naming every feature column; `ue_id` and `t_s`
/// lead the row for label joins and are not features.
pub fn write_fingerprints_csv<R: Real>(set: &FingerprintSet<R>, path: &std::path::Path) -> Result<()> {
    use std::fmt::Write as _;
    let mut out = String::from("ue_id,t_s");
    for name in feature_names(set.report_width, set.window_w) {
        out.push(',');
        out.push_str(&name);
    }
    out.push('\n');
    for r in 0..set.matrix.rows() {
        let _ = write!(out, "{},{:.4}", set.ue_ids[r], set.times[r].as_f64());
        for &v in set.matrix.row(r) {
            let _ = write!(out, ",{:.6}", v.as_f64());
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::BeamMeasurement;

    fn report(ue: u32, t: f64, base_nb: u32) -> MeasurementReport<f64> {
        let entries = (0..12)
            .map(|i| BeamMeasurement { nb_index: base_nb + i, rsrp_dbm: -50.0 - i as f64 })
            .collect();
        MeasurementReport { ue_id: ue, t_s: t, entries, serving_nb: base_nb }
    }

    #[test]
    fn single_report_window_dimension_24() {
        let reports = vec![report(0, 0.0, 12), report(0, 0.04, 12)];
        let cfg = FingerprintConfig { window_w: 1, ..FingerprintConfig::default() };
        let (set, _) = build_fingerprints(&reports, &cfg, None, None).unwrap();
        assert_eq!(set.matrix.cols(), 24);
        assert_eq!(set.matrix.rows(), 2);
    }

    #[test]
    fn three_report_window_dimension_72() {
        let reports: Vec<_> = (0..5).map(|k| report(0, 0.04 * k as f64, 12)).collect();
        let cfg = FingerprintConfig { window_w: 3, ..FingerprintConfig::default() };
        let (set, _) = build_fingerprints(&reports, &cfg, None, None).unwrap();
        assert_eq!(set.matrix.cols(), 72);
        assert_eq!(set.matrix.rows(), 3); // sliding stride 1 over 5 reports
        assert_eq!(feature_names(12, 3).len(), 72);
    }

    #[test]
    fn identical_reports_give_identical_scaled_rows() {
        let reports: Vec<_> = (0..6).map(|k| report(0, 0.04 * k as f64, 12)).collect();
        let cfg = FingerprintConfig { window_w: 2, ..FingerprintConfig::default() };
        let (set, _) = build_fingerprints(&reports, &cfg, None, None).unwrap();
        let first = set.matrix.row(0).to_vec();
        for r in 1..set.matrix.rows() {
            assert_eq!(set.matrix.row(r), &first[..]);
        }
        // Constant features scale to zero under min-max.
        assert!(first.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn short_ues_are_skipped_and_counted() {
        let mut reports = vec![report(0, 0.0, 12)];
        reports.extend((0..4).map(|k| report(1, 0.04 * k as f64, 12)));
        let cfg = FingerprintConfig { window_w: 3, ..FingerprintConfig::default() };
        let (set, _) = build_fingerprints(&reports, &cfg, None, None).unwrap();
        assert_eq!(set.skipped_ues, 1);
        assert!(set.ue_ids.iter().all(|&u| u == 1));
    }

    #[test]
    fn training_scale_maps_to_unit_interval_and_reapplies_affinely() {
        let reports: Vec<_> = (0..8).map(|k| report(0, 0.04 * k as f64, 12 + k)).collect();
        let cfg = FingerprintConfig { window_w: 2, ..FingerprintConfig::default() };
        let (set, scaler) = build_fingerprints(&reports, &cfg, None, None).unwrap();
        for row in set.matrix.iter_rows() {
            for &v in row {
                assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            }
        }
        // Applying the stored model to new data refits nothing.
        let new_reports: Vec<_> = (0..4).map(|k| report(3, 0.04 * k as f64, 40)).collect();
        let (set2, scaler2) = build_fingerprints(&new_reports, &cfg, None, Some(&scaler)).unwrap();
        assert!(matches!((&scaler, &scaler2), (ScalingModel::MinMax { .. }, ScalingModel::MinMax { .. })));
        // Out-of-range raw values land outside [0, 1]: affine, not refit.
        assert!(set2.matrix.iter_rows().flatten().any(|&v| !(0.0..=1.0).contains(&v)));
    }

    #[test]
    fn ingestion_order_does_not_matter() {
        let mut reports: Vec<_> = (0..6).map(|k| report(0, 0.04 * k as f64, 12 + k)).collect();
        reports.extend((0..6).map(|k| report(1, 0.04 * k as f64, 30 + k)));
        let cfg = FingerprintConfig::default();
        let (a, _) = build_fingerprints(&reports, &cfg, None, None).unwrap();
        reports.reverse();
        let (b, _) = build_fingerprints(&reports, &cfg, None, None).unwrap();
        assert_eq!(a.ue_ids, b.ue_ids);
        assert_eq!(a.matrix, b.matrix);
    }

    #[test]
    fn max_per_ue_caps_rows() {
        let reports: Vec<_> = (0..40).map(|k| report(0, 0.04 * k as f64, 12)).collect();
        let cfg = FingerprintConfig { window_w: 3, max_per_ue: Some(5), ..FingerprintConfig::default() };
        let (set, _) = build_fingerprints(&reports, &cfg, None, None).unwrap();
        assert_eq!(set.matrix.rows(), 5);
    }

    #[test]
    fn zscore_alternative() {
        let reports: Vec<_> = (0..10).map(|k| report(0, 0.04 * k as f64, 12 + k)).collect();
        let cfg = FingerprintConfig {
            window_w: 1,
            scaling: ScalingKind::ZScore,
            ..FingerprintConfig::default()
        };
        let (set, _) = build_fingerprints(&reports, &cfg, None, None).unwrap();
        // Standardized columns have ~zero mean.
        let means = set.matrix.col_means();
        assert!(means.iter().all(|m| m.abs() < 1e-9));
    }
}
